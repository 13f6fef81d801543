//! α-sweeps over the layer bracket and the effective operator, remainder
//! tables, log-log exponent fits, certified gap reports and SVG output.

mod svg;

pub use svg::{Figure, Series};

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effective::{assemble_effective, bloch_bands, degenerate_well_levels, effective_eigs, harmonic_levels, DegenerateWellSpec};
use crate::error::{Error, Result};
use crate::geometry::{build_arc_curve, build_cell, curvature_peak, ArcCurve, CellConfig, CurveConfig, CurveSpec, PeriodicCell};
use crate::layer::{bracket_eigenvalues, LayerConfig};
use crate::linalg::DEFAULT_SEED;

/// Environment variable holding the worker count for parallel sweeps.
pub const WORKERS_ENV: &str = "ROBIN_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Effective,
    Bracket,
    Bands,
}

fn default_solvers() -> Vec<Solver> {
    vec![Solver::Effective, Solver::Bracket]
}

fn default_j_max() -> usize {
    1
}

fn default_stem() -> String {
    "sweep".into()
}

fn default_true() -> bool {
    true
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSizes {
    /// Nodes of the arc-length sampling of the curve.
    pub n_curve: usize,
    pub n_effective: usize,
    pub n_s: usize,
    pub n_t: usize,
    /// Schedule coefficient `b` in `δ = b ln α / α`.
    pub b: f64,
    /// Fixed layer width overriding the schedule.
    pub delta: Option<f64>,
    pub phi_min: f64,
    pub thetas: usize,
}

impl Default for GridSizes {
    fn default() -> Self {
        Self { n_curve: 2048, n_effective: 2048, n_s: 256, n_t: 64, b: 2.0, delta: None, phi_min: 0.5, thetas: 33 }
    }
}

/// Leading-order prediction for `E_j(effective) + ακ_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predictor {
    /// Degenerate well for the flat_well preset, harmonic levels at
    /// nondegenerate maxima, none for flat maxima.
    #[default]
    Auto,
    None,
    Harmonic,
    Degenerate { p: u32, c_p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    /// Directory for CSV, JSON and SVG files; nothing is written when absent.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_stem")]
    pub stem: String,
    #[serde(default = "default_true")]
    pub plots: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: None, stem: default_stem(), plots: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    #[serde(default)]
    pub curve: Option<CurveConfig>,
    #[serde(default)]
    pub cell: Option<CellConfig>,
    pub alphas: Vec<f64>,
    #[serde(default = "default_j_max")]
    pub j_max: usize,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<Solver>,
    #[serde(default)]
    pub grid: GridSizes,
    #[serde(default)]
    pub predictor: Predictor,
    #[serde(default)]
    pub output: OutputSpec,
    /// Seed of the layer solver's start block.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl SweepPlan {
    /// Reads a TOML (or JSON) plan; relative paths are taken from the plan's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        let mut plan: SweepPlan = if json {
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        };
        if let Some(dir) = path.parent() {
            if let Some(c) = plan.curve.as_mut() {
                c.resolve_relative(dir);
            }
            if let Some(out) = plan.output.dir.as_mut() {
                if out.is_relative() {
                    *out = dir.join(&*out);
                }
            }
        }
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::Invalid("the alpha list is empty".into()));
        }
        if self.alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::Invalid("alphas must be positive and finite".into()));
        }
        if self.alphas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("alphas must be strictly ascending".into()));
        }
        if self.j_max == 0 || self.j_max > 10 {
            return Err(Error::Invalid(format!("j_max must be in 1..=10 (got {})", self.j_max)));
        }
        if self.solvers.is_empty() {
            return Err(Error::Invalid("no solver selected".into()));
        }
        let needs_curve = self.solvers.iter().any(|s| *s != Solver::Bands);
        if needs_curve && self.curve.is_none() && self.cell.is_none() {
            return Err(Error::Invalid("effective and bracket solves need a [curve] or [cell] table".into()));
        }
        if self.solvers.contains(&Solver::Bands) && self.cell.is_none() {
            return Err(Error::Invalid("the bands solver needs a [cell] table".into()));
        }
        if let Some(c) = &self.curve {
            c.spec.validate()?;
        }
        let g = &self.grid;
        if g.n_curve < 32 || g.n_effective < 64 || g.n_s < 16 || g.n_t < 16 || g.thetas < 17 {
            return Err(Error::Invalid(
                "grid too coarse: need n_curve >= 32, n_effective >= 64, n_s >= 16, n_t >= 16, thetas >= 17".into(),
            ));
        }
        if !(g.b > 0.0) || !(g.phi_min > 0.0 && g.phi_min < 1.0) || g.delta.is_some_and(|d| !(d > 0.0)) {
            return Err(Error::Invalid("need b > 0, 0 < phi_min < 1 and delta > 0".into()));
        }
        if self.solvers.contains(&Solver::Bracket) && g.delta.is_none() && self.alphas[0] <= 1.0 {
            return Err(Error::Invalid("the delta schedule needs alpha > 1; set grid.delta".into()));
        }
        Ok(())
    }

    fn geometry(&self) -> Result<ArcCurve<f64>> {
        match (&self.curve, &self.cell) {
            (Some(c), _) => build_arc_curve(&c.spec, c.n.unwrap_or(self.grid.n_curve)),
            (None, Some(c)) => Ok(ArcCurve::from_cell(&self.periodic_cell(c)?)),
            (None, None) => Err(Error::Invalid("plan has neither curve nor cell".into())),
        }
    }

    fn periodic_cell(&self, c: &CellConfig) -> Result<PeriodicCell<f64>> {
        build_cell(&c.spec, c.n.unwrap_or(self.grid.n_effective))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderRow {
    pub alpha: f64,
    pub delta: Option<f64>,
    pub j: usize,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub midpoint: Option<f64>,
    pub halfwidth: Option<f64>,
    pub effective: Option<f64>,
    /// `midpoint + α² − effective`.
    pub remainder: Option<f64>,
    /// `e_j α^γ`, the predicted value of `effective + ακ_max`.
    pub predicted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub alpha: f64,
    pub solver: Solver,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictorInfo {
    pub description: String,
    pub exponent: f64,
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub version: String,
    pub seed: u64,
    pub grid: GridSizes,
    pub solvers: Vec<Solver>,
    pub j_max: usize,
    pub kappa_max: Option<f64>,
    pub predictor: Option<PredictorInfo>,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderTable {
    pub meta: RunMetadata,
    pub rows: Vec<RemainderRow>,
    pub errors: Vec<RowError>,
    pub gaps: Option<GapReport>,
}

pub const CSV_HEADER: [&str; 10] =
    ["alpha", "delta", "j", "lower", "upper", "midpoint", "halfwidth", "effective", "remainder", "predicted"];

impl RemainderTable {
    /// Largest `|R|` over rows where the remainder is defined.
    pub fn max_abs_remainder(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.remainder.map(f64::abs)).reduce(f64::max)
    }

    /// `(α, R)` for index `j`.
    pub fn remainders(&self, j: usize) -> Vec<(f64, f64)> {
        self.rows.iter().filter(|r| r.j == j).filter_map(|r| Some((r.alpha, r.remainder?))).collect()
    }

    /// `(α, effective + ακ_max)` for index `j`.
    pub fn shifted_effective(&self, j: usize) -> Vec<(f64, f64)> {
        let Some(k) = self.meta.kappa_max else { return Vec::new() };
        self.rows.iter().filter(|r| r.j == j).filter_map(|r| Some((r.alpha, r.effective? + r.alpha * k))).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(CSV_HEADER).map_err(|e| Error::Io(e.to_string()))?;
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            wr.write_record([
                r.alpha.to_string(),
                cell(r.delta),
                r.j.to_string(),
                cell(r.lower),
                cell(r.upper),
                cell(r.midpoint),
                cell(r.halfwidth),
                cell(r.effective),
                cell(r.remainder),
                cell(r.predicted),
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs `f` inside a pool bounded by [`worker_count`].
pub fn with_workers<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn resolve_predictor(plan: &SweepPlan, curve: &ArcCurve<f64>) -> Result<Option<PredictorInfo>> {
    let j = plan.j_max;
    let degenerate = |p: u32, c_p: f64| -> Result<Option<PredictorInfo>> {
        let levels = degenerate_well_levels::<f64>(&DegenerateWellSpec::new(p, c_p), j)?;
        Ok(Some(PredictorInfo {
            description: format!("degenerate well p={p}, C_p={c_p}"),
            exponent: 1.0 / (p as f64 + 1.0),
            levels,
        }))
    };
    let harmonic = || -> Result<Option<PredictorInfo>> {
        let peak = curvature_peak(curve)?;
        if peak.flat {
            return Ok(None);
        }
        let tol = 1e-9 * peak.kappa_max.abs().max(1.0);
        let mu: Vec<f64> =
            peak.maxima.iter().filter(|m| m.kappa >= peak.kappa_max - tol && m.kappa_dd < 0.0).map(|m| -m.kappa_dd).collect();
        if mu.is_empty() {
            return Ok(None);
        }
        // each maximum is its own well; the spectra are pooled
        let mut levels = Vec::with_capacity(mu.len() * j);
        for m in &mu {
            levels.extend(harmonic_levels(&[*m], j)?.levels);
        }
        levels.sort_by(f64::total_cmp);
        levels.truncate(j);
        Ok(Some(PredictorInfo {
            description: format!("harmonic, {} well(s), kappa'' = {:?}", mu.len(), mu.iter().map(|m| -m).collect::<Vec<_>>()),
            exponent: 0.5,
            levels,
        }))
    };
    match &plan.predictor {
        Predictor::None => Ok(None),
        Predictor::Harmonic => harmonic(),
        Predictor::Degenerate { p, c_p } => degenerate(*p, *c_p),
        Predictor::Auto => match plan.curve.as_ref().map(|c| &c.spec) {
            Some(CurveSpec::FlatWell { p, c_p, .. }) => degenerate(*p, *c_p),
            Some(_) => harmonic(),
            None => Ok(None),
        },
    }
}

struct PointResult {
    rows: Vec<RemainderRow>,
    errors: Vec<RowError>,
}

fn solve_point(plan: &SweepPlan, curve: &ArcCurve<f64>, alpha: f64, kappa_max: Option<f64>, pred: Option<&PredictorInfo>) -> PointResult {
    let j_max = plan.j_max;
    let mut errors = Vec::new();
    let effective = if plan.solvers.contains(&Solver::Effective) {
        match assemble_effective(curve, alpha, plan.grid.n_effective).and_then(|op| effective_eigs(&op, j_max)) {
            Ok(s) => Some(s),
            Err(e) => {
                errors.push(RowError { alpha, solver: Solver::Effective, message: e.to_string() });
                None
            }
        }
    } else {
        None
    };
    let bracket = if plan.solvers.contains(&Solver::Bracket) {
        let g = &plan.grid;
        let cfg = match g.delta {
            Some(d) => LayerConfig::with_delta(curve.clone(), alpha, d, g.n_s, g.n_t).map(|mut c| {
                c.phi_min = g.phi_min;
                c
            }),
            None => LayerConfig::with_schedule(curve.clone(), alpha, g.b, g.phi_min, g.n_s, g.n_t),
        };
        let cfg = cfg.map(|mut c| {
            c.seed = plan.seed;
            c
        });
        match cfg.and_then(|c| bracket_eigenvalues(&c, j_max)) {
            Ok(b) => Some(b),
            Err(e) => {
                errors.push(RowError { alpha, solver: Solver::Bracket, message: e.to_string() });
                None
            }
        }
    } else {
        None
    };
    let rows = (0..j_max)
        .map(|j| {
            let eff = effective.as_ref().and_then(|s| (j < s.len() && s.converged[j]).then(|| s.eigenvalues[j]));
            let br = bracket.as_ref().filter(|b| j < b.len());
            let conv = br.is_some_and(|b| b.converged[j]);
            let mid = br.map(|b| b.midpoint(j));
            let remainder = match (mid, eff) {
                (Some(m), Some(e)) if conv => Some(m + alpha * alpha - e),
                _ => None,
            };
            let predicted = match (pred, kappa_max) {
                (Some(p), Some(_)) if j < p.levels.len() => Some(p.levels[j] * alpha.powf(p.exponent)),
                _ => None,
            };
            RemainderRow {
                alpha,
                delta: bracket.as_ref().map(|b| b.delta),
                j: j + 1,
                lower: br.map(|b| b.lower[j]),
                upper: br.map(|b| b.upper[j]),
                midpoint: mid,
                halfwidth: br.map(|b| b.halfwidth(j)),
                effective: eff,
                remainder,
                predicted,
            }
        })
        .collect();
    PointResult { rows, errors }
}

/// Executes the plan (α points in parallel) and writes CSV, JSON and SVG
/// files when `plan.output.dir` is set. Individual solve failures are
/// recorded in `errors` and leave empty cells.
pub fn run_sweep(plan: &SweepPlan) -> Result<RemainderTable> {
    plan.validate()?;
    let curve_solves = plan.solvers.iter().any(|s| *s != Solver::Bands);
    let curve = if curve_solves { Some(plan.geometry()?) } else { None };
    let kappa_max = curve.as_ref().map(|c| curvature_peak(c).map_or_else(|_| c.kappa_max(), |p| p.kappa_max));
    let pred = match &curve {
        Some(c) => resolve_predictor(plan, c)?,
        None => None,
    };
    let workers = worker_count();
    let points: Vec<PointResult> = match &curve {
        Some(c) => with_workers(|| {
            plan.alphas.par_iter().map(|&a| solve_point(plan, c, a, kappa_max, pred.as_ref())).collect()
        })?,
        None => Vec::new(),
    };
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for p in points {
        rows.extend(p.rows);
        errors.extend(p.errors);
    }
    let mut table = RemainderTable {
        meta: RunMetadata {
            version: env!("CARGO_PKG_VERSION").into(),
            seed: plan.seed,
            grid: plan.grid.clone(),
            solvers: plan.solvers.clone(),
            j_max: plan.j_max,
            kappa_max,
            predictor: pred,
            workers,
        },
        rows,
        errors,
        gaps: None,
    };
    if plan.solvers.contains(&Solver::Bands) {
        let cell = plan.periodic_cell(plan.cell.as_ref().expect("validated"))?;
        let budget = table.max_abs_remainder().map(|m| 2.0 * m);
        let j_bands = plan.j_max.max(2);
        table.gaps = Some(gap_report(&cell, &plan.alphas, plan.grid.thetas, j_bands, budget)?);
    }
    if let Some(dir) = &plan.output.dir {
        write_outputs(&table, dir, &plan.output.stem, plan.output.plots)?;
    }
    Ok(table)
}

/// Writes `<stem>.csv`, `<stem>.json`, the gap CSV when present, and the
/// plots; returns the written paths.
pub fn write_outputs(table: &RemainderTable, dir: &Path, stem: &str, plots: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let csv_path = dir.join(format!("{stem}.csv"));
    table.write_csv(std::fs::File::create(&csv_path)?)?;
    written.push(csv_path);
    let json_path = dir.join(format!("{stem}.json"));
    std::fs::write(&json_path, table.to_json()? + "\n")?;
    written.push(json_path);
    if let Some(g) = &table.gaps {
        let p = dir.join(format!("{stem}_gaps.csv"));
        g.write_csv(std::fs::File::create(&p)?)?;
        written.push(p);
    }
    if plots {
        written.extend(emit_plots(table, &dir.join(format!("{stem}_plots")))?);
    }
    Ok(written)
}

// ---------------------------------------------------------------------------
// exponent fits

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// `exp(intercept)`.
    pub intercept_prefactor: f64,
    pub points: usize,
}

/// Ordinary least squares of `ln value` against `ln α`.
pub fn fit_exponent(pairs: &[(f64, f64)]) -> Result<ExponentFit> {
    if pairs.len() < 4 {
        return Err(Error::Invalid(format!("need at least 4 points (got {})", pairs.len())));
    }
    if pairs.iter().any(|&(a, v)| !(a > 0.0 && v > 0.0 && a.is_finite() && v.is_finite())) {
        return Err(Error::Invalid("alphas and values must be positive and finite".into()));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Invalid("alphas must not all coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok(ExponentFit { slope, stderr, intercept_prefactor: intercept.exp(), points: pairs.len() })
}

/// `value · α^{-exponent}` at the largest α: the leading coefficient read
/// where the lower-order remainder is smallest.
pub fn leading_coefficient(pairs: &[(f64, f64)], exponent: f64) -> Option<f64> {
    pairs.iter().copied().filter(|p| p.0.is_finite()).max_by(|a, b| a.0.total_cmp(&b.0)).map(|(a, v)| v * a.powf(-exponent))
}

// ---------------------------------------------------------------------------
// gap reports

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapWindow {
    pub after_band: usize,
    pub lower: f64,
    pub upper: f64,
    pub length: f64,
    /// Gap longer than twice the remainder budget.
    pub certified: bool,
    /// `(lower + budget, upper − budget)` when certified: a gap window for
    /// the full Robin problem shifted by `α²`.
    pub window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReportEntry {
    pub alpha: f64,
    pub gaps: Vec<GapWindow>,
    pub edge_defect: f64,
    pub merge_tol: f64,
    pub theta: Vec<f64>,
    pub bands: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    /// Empirical remainder budget (twice the largest observed `|R|`), if any.
    pub budget: Option<f64>,
    pub entries: Vec<GapReportEntry>,
}

impl GapReport {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["alpha", "after_band", "lower", "upper", "length", "budget", "certified"])
            .map_err(|e| Error::Io(e.to_string()))?;
        let budget = self.budget.map(|b| b.to_string()).unwrap_or_default();
        for e in &self.entries {
            for g in &e.gaps {
                wr.write_record([
                    e.alpha.to_string(),
                    g.after_band.to_string(),
                    g.lower.to_string(),
                    g.upper.to_string(),
                    g.length.to_string(),
                    budget.clone(),
                    g.certified.to_string(),
                ])
                .map_err(|e| Error::Io(e.to_string()))?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// Total gap length at the given α.
    pub fn total_gap(&self, alpha: f64) -> Option<f64> {
        self.entries.iter().find(|e| e.alpha == alpha).map(|e| e.gaps.iter().map(|g| g.length).sum())
    }
}

/// Band structure and gaps of the effective operator for each α. A gap is
/// certified only when its length exceeds `2 · budget`.
pub fn gap_report(cell: &PeriodicCell<f64>, alphas: &[f64], thetas: usize, j_max: usize, budget: Option<f64>) -> Result<GapReport> {
    if let Some(b) = budget {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Invalid(format!("budget must be finite and nonnegative (got {b})")));
        }
    }
    let entries = alphas
        .iter()
        .map(|&alpha| {
            let bs = bloch_bands(cell, alpha, thetas, j_max.max(2))?;
            let gaps = bs
                .gaps
                .iter()
                .map(|g| {
                    let length = g.length();
                    let certified = budget.is_some_and(|b| length > 2.0 * b);
                    let window = budget.filter(|_| certified).map(|b| (g.lower + b, g.upper - b));
                    GapWindow { after_band: g.after_band, lower: g.lower, upper: g.upper, length, certified, window }
                })
                .collect();
            Ok(GapReportEntry {
                alpha,
                gaps,
                edge_defect: bs.edge_defect,
                merge_tol: bs.merge_tol,
                theta: bs.theta,
                bands: bs.bands,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GapReport { budget, entries })
}

// ---------------------------------------------------------------------------
// plots

/// One SVG per metric: remainder, bracket halfwidth, log-log scaling of the
/// shifted effective eigenvalues, and band functions when a gap report is
/// attached. Returns the written paths.
pub fn emit_plots(table: &RemainderTable, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let js: Vec<usize> = (1..=table.meta.j_max).collect();
    let pick = |f: &dyn Fn(&RemainderRow) -> Option<f64>, j: usize| -> Vec<(f64, f64)> {
        table.rows.iter().filter(|r| r.j == j).filter_map(|r| Some((r.alpha, f(r)?))).collect()
    };
    let mut figures = vec![
        (
            "remainder",
            Figure {
                title: "Remainder R = midpoint + α² − E_eff".into(),
                x_label: "α".into(),
                y_label: "R".into(),
                log_x: true,
                log_y: false,
                series: js
                    .iter()
                    .map(|&j| Series { label: format!("j={j}"), points: pick(&|r| r.remainder, j), line: true })
                    .collect(),
            },
        ),
        (
            "halfwidth",
            Figure {
                title: "Bracket halfwidth".into(),
                x_label: "α".into(),
                y_label: "halfwidth".into(),
                log_x: true,
                log_y: true,
                series: js
                    .iter()
                    .map(|&j| Series { label: format!("j={j}"), points: pick(&|r| r.halfwidth, j), line: true })
                    .collect(),
            },
        ),
    ];
    let mut scaling = Vec::new();
    for &j in &js {
        scaling.push(Series { label: format!("E_{j} + ακ_max"), points: table.shifted_effective(j), line: false });
        let pred = pick(&|r| r.predicted, j);
        if !pred.is_empty() {
            scaling.push(Series { label: format!("predicted j={j}"), points: pred, line: true });
        }
    }
    figures.push((
        "scaling",
        Figure {
            title: "Shifted effective eigenvalues".into(),
            x_label: "α".into(),
            y_label: "E_eff + ακ_max".into(),
            log_x: true,
            log_y: true,
            series: scaling,
        },
    ));
    if let Some(g) = &table.gaps {
        if let Some(e) = g.entries.last() {
            figures.push((
                "bands",
                Figure {
                    title: format!("Band functions at α = {}", e.alpha),
                    x_label: "θ".into(),
                    y_label: "ε_j(θ)".into(),
                    log_x: false,
                    log_y: false,
                    series: e
                        .bands
                        .iter()
                        .enumerate()
                        .map(|(j, b)| Series {
                            label: format!("band {}", j + 1),
                            points: e.theta.iter().copied().zip(b.iter().copied()).collect(),
                            line: true,
                        })
                        .collect(),
                },
            ));
        }
    }
    let mut out = Vec::new();
    for (name, fig) in figures {
        let p = dir.join(format!("{name}.svg"));
        std::fs::write(&p, fig.render())?;
        out.push(p);
    }
    Ok(out)
}

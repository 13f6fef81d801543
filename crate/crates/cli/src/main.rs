use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use robin_core::effective::{assemble_effective, assemble_effective_cell, bloch_bands, degenerate_well_levels, effective_eigs, harmonic_levels, DegenerateWellSpec};
use robin_core::geometry::{build_arc_curve, build_cell, curvature_peak, min_layer_width, CellConfig, CurveConfig, CurveSpec};
use robin_core::harness::{gap_report, run_sweep, SweepPlan, WORKERS_ENV};
use robin_core::layer::{assemble_layer, bracket_eigenvalues, EndCondition, LayerConfig};
use robin_core::linalg::DEFAULT_SEED;
use robin_core::model1d::{solve_dirichlet_model, solve_robin_model};
use robin_core::oracles::{disk_shooting_with, Integrator, ShootingProblem};
use robin_core::{ArcCurve64, Error};

const AFTER_HELP: &str = "Exit status: 0 success, 2 invalid input or usage, 3 numerical failure.\n\
Environment: ROBIN_WORKERS sets the worker count of parallel sweeps.";

#[derive(Parser, Debug)]
#[command(name = "robin", version, about = "Robin Laplacian eigenvalues: layer brackets, effective operator, predictors and sweeps", after_help = AFTER_HELP)]
struct Cli {
    /// Seed of the iterative layer solver's random start block [default: 50411]
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an arc-length sampled curve and print its geometry
    Curve(CurveCmd),
    /// Ground state of the 1D model operator on (0, δ)
    Model1d(Model1dCmd),
    /// Lowest eigenvalues of the effective operator -d²/ds² - ακ(s)
    Effective(EffectiveCmd),
    /// Bloch band functions and gaps of the effective operator on a periodic cell
    Bands(BandsCmd),
    /// Neumann/Dirichlet layer bracket of the Robin eigenvalues
    Bracket(BracketCmd),
    /// Independent reference values
    Oracle(OracleCmd),
    /// Run an α-sweep plan and write remainder tables and plots
    Sweep(SweepCmd),
    /// Semiclassical level predictors
    Predict(PredictCmd),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Preset {
    Circle,
    Ellipse,
    PerturbedCircle,
    FlatWell,
    Stadium,
}

/// Curve source: a TOML/JSON config file or a preset with its parameters.
#[derive(Args, Debug)]
struct CurveSource {
    /// Curve config (TOML or JSON), e.g. kind = "ellipse", a = 2.0, b = 1.0
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Curve preset
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Radius (circle, perturbed-circle, stadium)
    #[arg(long = "R", default_value_t = 1.0)]
    radius: f64,
    /// Ellipse semi-axis along x
    #[arg(long, default_value_t = 2.0)]
    semi_a: f64,
    /// Ellipse semi-axis along y
    #[arg(long, default_value_t = 1.0)]
    semi_b: f64,
    /// Relative amplitude of the perturbed circle
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    /// Angular mode of the perturbed circle
    #[arg(long, default_value_t = 3)]
    mode: u32,
    /// Degeneracy order p of the flat-well maximum
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Coefficient C_p of the flat-well maximum
    #[arg(long, default_value_t = 1.0)]
    c_p: f64,
    /// Radius of curvature at the flat-well maximum
    #[arg(long, default_value_t = 1.0)]
    r0: f64,
    /// Straight segment length of the stadium
    #[arg(long, default_value_t = 2.0)]
    ell: f64,
    /// Curve nodes; overrides the config value [default: 2048]
    #[arg(long)]
    n: Option<usize>,
}

impl CurveSource {
    fn config(&self) -> Result<CurveConfig> {
        let mut cfg = match (&self.config, self.preset) {
            (Some(path), _) => CurveConfig::load(path)?,
            (None, Some(p)) => {
                let spec = match p {
                    Preset::Circle => CurveSpec::Circle { radius: self.radius },
                    Preset::Ellipse => CurveSpec::Ellipse { a: self.semi_a, b: self.semi_b },
                    Preset::PerturbedCircle => {
                        CurveSpec::PerturbedCircle { radius: self.radius, amplitude: self.amplitude, mode: self.mode }
                    }
                    Preset::FlatWell => CurveSpec::FlatWell { p: self.p, c_p: self.c_p, r0: self.r0, q: None },
                    Preset::Stadium => CurveSpec::Stadium { radius: self.radius, ell: self.ell },
                };
                CurveConfig { spec, n: None }
            }
            (None, None) => bail!(Error::Invalid("give --config or --preset".into())),
        };
        if self.n.is_some() {
            cfg.n = self.n;
        }
        Ok(cfg)
    }

    fn build(&self) -> Result<ArcCurve64> {
        let cfg = self.config()?;
        let curve = build_arc_curve(&cfg.spec, cfg.n.unwrap_or(2048))?;
        if let Some(w) = &curve.warning {
            eprintln!("warning: {w}");
        }
        Ok(curve)
    }
}

/// Destination of the primary output.
#[derive(Args, Debug)]
struct OutArg {
    /// Write the primary output to this file instead of stdout
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

impl OutArg {
    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CurveAction {
    /// One JSON line with length, curvature extremes and layer width
    Info,
    /// CSV s,x,y,kappa of every node
    Samples,
}

#[derive(Args, Debug)]
struct CurveCmd {
    #[command(flatten)]
    source: CurveSource,
    #[command(flatten)]
    out: OutArg,
    /// What to print
    #[arg(value_enum, default_value = "info")]
    action: CurveAction,
}

#[derive(Args, Debug)]
struct Model1dCmd {
    /// Robin parameter α > 0
    #[arg(long)]
    alpha: f64,
    /// Interval length δ > 0
    #[arg(long)]
    delta: f64,
    /// Robin coupling β ≥ 0 at t = δ (Dirichlet end when absent)
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct EffectiveCmd {
    #[command(flatten)]
    source: CurveSource,
    /// Robin parameter α ≥ 0
    #[arg(long)]
    alpha: f64,
    /// Number of eigenvalues
    #[arg(short = 'k', long = "k", default_value_t = 5)]
    k: usize,
    /// Grid nodes of the effective operator
    #[arg(long, default_value_t = 2048)]
    n_eff: usize,
    /// Dump the assembled matrix in MatrixMarket format
    #[arg(long)]
    matrix_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct BandsCmd {
    /// Periodic cell config (TOML or JSON), e.g. kind = "cosine", mean = 1.0, amplitude = 1.0
    #[arg(long)]
    config: PathBuf,
    /// Robin parameter α ≥ 0
    #[arg(long)]
    alpha: f64,
    /// Phase points θ = 2πi/T on [0, 2π); π is added when T is odd
    #[arg(long, default_value_t = 33)]
    thetas: usize,
    /// Number of band functions
    #[arg(long, default_value_t = 4)]
    j_max: usize,
    /// Cell grid nodes; overrides the config value [default: 512]
    #[arg(long)]
    n: Option<usize>,
    /// Remainder budget for gap certification; writes a JSON gap report with --gaps-out
    #[arg(long)]
    budget: Option<f64>,
    /// JSON gap report destination
    #[arg(long)]
    gaps_out: Option<PathBuf>,
    /// Dump the θ = 0 matrix in MatrixMarket format
    #[arg(long)]
    matrix_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct BracketCmd {
    #[command(flatten)]
    source: CurveSource,
    /// Robin parameter α
    #[arg(long)]
    alpha: f64,
    /// Layer width; overrides the schedule
    #[arg(long, conflicts_with = "b")]
    delta: Option<f64>,
    /// Schedule coefficient in δ = b ln α / α
    #[arg(long, default_value_t = 2.0)]
    b: f64,
    /// Lower bound on 1 - tκ over the layer
    #[arg(long, default_value_t = 0.5)]
    phi_min: f64,
    /// Nodes along the curve
    #[arg(long, default_value_t = 256)]
    ns: usize,
    /// Intervals across the layer
    #[arg(long, default_value_t = 64)]
    nt: usize,
    /// Number of eigenvalues (at most 10)
    #[arg(short = 'k', long = "k", default_value_t = 1)]
    k: usize,
    /// Dump the normalized Neumann and Dirichlet matrices as <prefix>_neumann.mtx and <prefix>_dirichlet.mtx
    #[arg(long)]
    matrix_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args, Debug)]
struct OracleCmd {
    #[command(subcommand)]
    which: OracleKind,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum IntegratorArg {
    Rk4,
    Taylor,
}

#[derive(Subcommand, Debug)]
enum OracleKind {
    /// Radial shooting on the disk
    Disk {
        /// Disk radius
        #[arg(long = "R", default_value_t = 1.0)]
        radius: f64,
        /// Robin parameter α > 0
        #[arg(long)]
        alpha: f64,
        /// Angular mode
        #[arg(long, default_value_t = 0)]
        m: u32,
        /// Radial integrator
        #[arg(long, value_enum, default_value = "rk4")]
        integrator: IntegratorArg,
        /// Lower end of the energy window [default: -(α + m/R + 1/R + 1)²]
        #[arg(long, allow_negative_numbers = true)]
        e_lo: Option<f64>,
        /// Upper end of the energy window
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        e_hi: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug)]
struct SweepCmd {
    /// Sweep plan (TOML or JSON)
    #[arg(long)]
    plan: PathBuf,
    /// Output directory; overrides the plan
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// α values; override the plan
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Skip SVG plots
    #[arg(long)]
    no_plots: bool,
}

#[derive(Args, Debug)]
struct PredictCmd {
    #[command(subcommand)]
    which: PredictKind,
}

#[derive(Subcommand, Debug)]
enum PredictKind {
    /// Harmonic levels Σ sqrt(μ_k/2)(2n_k - 1), with multiplicity
    Harmonic {
        /// Hessian eigenvalue μ_k > 0 (repeat for several)
        #[arg(long, required = true)]
        mu: Vec<f64>,
        /// Number of levels
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Levels of -d²/ds² + C_p s^{2p} on the line
    Degenerate {
        /// Degeneracy order
        #[arg(long)]
        p: u32,
        /// Well coefficient
        #[arg(long)]
        c_p: f64,
        /// Number of levels
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn curve_cmd(c: &CurveCmd) -> Result<()> {
    let curve = c.source.build()?;
    let mut w = c.out.sink()?;
    match c.action {
        CurveAction::Info => {
            let kmin = curve.kappa.iter().copied().fold(f64::INFINITY, f64::min);
            let peak = curvature_peak(&curve).ok();
            let width = min_layer_width(&curve);
            let line = json!({
                "n": curve.n,
                "L": curve.length,
                "kappa_max": curve.kappa_max(),
                "kappa_min": kmin,
                "total_curvature": curve.total_curvature(),
                "min_layer_width": if width.is_finite() { json!(width) } else { json!("inf") },
                "s0": peak.as_ref().map(|p| p.s0),
                "kappa_dd": peak.as_ref().map(|p| p.kappa_dd),
                "flat_maximum": peak.as_ref().map(|p| p.flat),
                "maxima": peak.as_ref().map(|p| p.maxima.len()),
                "warning": curve.warning,
            });
            writeln!(w, "{line}")?;
        }
        CurveAction::Samples => {
            writeln!(w, "s,x,y,kappa")?;
            for i in 0..curve.n {
                let [x, y] = curve.position[i];
                writeln!(w, "{},{x},{y},{}", curve.s(i), curve.kappa[i])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn model1d_cmd(c: &Model1dCmd) -> Result<()> {
    let r = match c.beta {
        Some(beta) => solve_robin_model(c.alpha, c.delta, beta)?,
        None => solve_dirichlet_model(c.alpha, c.delta)?,
    };
    let (bc0, bc1) = r.bc_residuals();
    let line = json!({
        "alpha": r.alpha,
        "delta": r.delta,
        "end": if r.beta().is_some() { "robin" } else { "dirichlet" },
        "beta": r.beta(),
        "k": r.k,
        "E": r.e,
        "E_plus_alpha_sq": r.e_plus_alpha_sq(),
        "psi0_sq": r.psi0_sq,
        "psidelta_sq": r.psidelta_sq,
        "bc_residual_0": bc0,
        "bc_residual_delta": bc1,
    });
    let mut w = c.out.sink()?;
    writeln!(w, "{line}")?;
    w.flush()?;
    Ok(())
}

fn write_mtx(path: &Path, a: &robin_core::SparseSym64) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    a.write_matrix_market(BufWriter::new(f))?;
    Ok(())
}

fn effective_cmd(c: &EffectiveCmd) -> Result<()> {
    let curve = c.source.build()?;
    let op = assemble_effective(&curve, c.alpha, c.n_eff)?;
    if let Some(p) = &c.matrix_out {
        write_mtx(p, &op.matrix)?;
    }
    let spec = effective_eigs(&op, c.k)?;
    if !spec.all_converged() {
        bail!(Error::NoConvergence(format!("residuals {:?}", spec.residuals)));
    }
    let mut w = c.out.sink()?;
    writeln!(w, "alpha,j,eigenvalue")?;
    for (j, e) in spec.eigenvalues.iter().enumerate() {
        writeln!(w, "{},{},{e}", c.alpha, j + 1)?;
    }
    w.flush()?;
    Ok(())
}

fn bands_cmd(c: &BandsCmd) -> Result<()> {
    let mut cfg = CellConfig::load(&c.config)?;
    if c.n.is_some() {
        cfg.n = c.n;
    }
    let cell = build_cell::<f64>(&cfg.spec, cfg.n.unwrap_or(512))?;
    if let Some(p) = &c.matrix_out {
        write_mtx(p, &assemble_effective_cell(&cell, c.alpha)?.matrix)?;
    }
    let bs = bloch_bands(&cell, c.alpha, c.thetas, c.j_max)?;
    let mut w = c.out.sink()?;
    writeln!(w, "theta,j,epsilon")?;
    for (j, band) in bs.bands.iter().enumerate() {
        for (t, e) in bs.theta.iter().zip(band) {
            writeln!(w, "{t},{},{e}", j + 1)?;
        }
    }
    w.flush()?;
    for g in &bs.gaps {
        eprintln!("gap after band {}: ({}, {}), length {}", g.after_band, g.lower, g.upper, g.length());
    }
    if let Some(p) = &c.gaps_out {
        let report = gap_report(&cell, &[c.alpha], c.thetas, c.j_max, c.budget)?;
        std::fs::write(p, serde_json::to_string_pretty(&report)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn bracket_cmd(c: &BracketCmd, seed: u64) -> Result<()> {
    let curve = c.source.build()?;
    let mut cfg = match c.delta {
        Some(d) => LayerConfig::with_delta(curve, c.alpha, d, c.ns, c.nt)?,
        None => LayerConfig::with_schedule(curve, c.alpha, c.b, c.phi_min, c.ns, c.nt)?,
    };
    cfg.phi_min = c.phi_min;
    cfg.seed = seed;
    if let Some(prefix) = &c.matrix_out {
        for (end, tag) in [(EndCondition::Neumann, "neumann"), (EndCondition::Dirichlet, "dirichlet")] {
            let sys = assemble_layer(&cfg, end)?;
            let name = format!("{}_{tag}.mtx", prefix.display());
            write_mtx(Path::new(&name), &sys.normalized())?;
        }
    }
    let r = bracket_eigenvalues(&cfg, c.k)?;
    if r.truncated {
        eprintln!("warning: only {} Dirichlet eigenvalue(s) below 0; the bracket stops there", r.len());
    }
    let mut w = c.out.sink()?;
    writeln!(w, "alpha,delta,j,lower,upper,midpoint,halfwidth")?;
    for j in 0..r.len() {
        writeln!(w, "{},{},{},{},{},{},{}", r.alpha, r.delta, j + 1, r.lower[j], r.upper[j], r.midpoint(j), r.halfwidth(j))?;
    }
    w.flush()?;
    if r.converged.iter().any(|c| !c) {
        bail!(Error::NoConvergence("layer solver did not reach its tolerance".into()));
    }
    Ok(())
}

fn oracle_cmd(c: &OracleCmd) -> Result<()> {
    match &c.which {
        OracleKind::Disk { radius, alpha, m, integrator, e_lo, e_hi, out } => {
            let mut p = ShootingProblem::new(*radius, *alpha, *m);
            if let Some(lo) = e_lo {
                p.e_lo = *lo;
            }
            p.e_hi = *e_hi;
            let how = match integrator {
                IntegratorArg::Rk4 => Integrator::Rk4,
                IntegratorArg::Taylor => Integrator::Taylor,
            };
            let e = disk_shooting_with(&p, how)?;
            let line = json!({"R": radius, "alpha": alpha, "m": m, "integrator": format!("{how:?}").to_lowercase(), "E": e});
            let mut w = out.sink()?;
            writeln!(w, "{line}")?;
            w.flush()?;
        }
    }
    Ok(())
}

fn sweep_cmd(c: &SweepCmd, seed: Option<u64>) -> Result<()> {
    let mut plan = SweepPlan::load(&c.plan)?;
    if let Some(d) = &c.out_dir {
        plan.output.dir = Some(d.clone());
    }
    if let Some(a) = &c.alphas {
        plan.alphas = a.clone();
    }
    if let Some(s) = seed {
        plan.seed = s;
    }
    if c.no_plots {
        plan.output.plots = false;
    }
    plan.validate()?;
    let table = run_sweep(&plan)?;
    let mut w = BufWriter::new(io::stdout().lock());
    table.write_csv(&mut w)?;
    w.flush()?;
    for e in &table.errors {
        eprintln!("warning: α = {} ({:?}): {}", e.alpha, e.solver, e.message);
    }
    if let Some(g) = &table.gaps {
        let certified: usize = g.entries.iter().map(|e| e.gaps.iter().filter(|w| w.certified).count()).sum();
        eprintln!("gap report: budget {:?}, {certified} certified window(s)", g.budget);
    }
    if let Some(d) = &plan.output.dir {
        eprintln!("wrote {}", d.display());
    }
    Ok(())
}

fn predict_cmd(c: &PredictCmd) -> Result<()> {
    let levels = match &c.which {
        PredictKind::Harmonic { mu, count } => harmonic_levels(mu, *count)?.levels,
        PredictKind::Degenerate { p, c_p, count } => degenerate_well_levels::<f64>(&DegenerateWellSpec::new(*p, *c_p), *count)?,
    };
    println!("{}", join(&levels));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        if v.trim().parse::<usize>().map_or(true, |n| n == 0) {
            bail!(Error::Invalid(format!("{WORKERS_ENV} must be a positive integer (got {v:?})")));
        }
    }
    let seed = cli.seed;
    match &cli.command {
        Command::Curve(c) => curve_cmd(c),
        Command::Model1d(c) => model1d_cmd(c),
        Command::Effective(c) => effective_cmd(c),
        Command::Bands(c) => bands_cmd(c),
        Command::Bracket(c) => bracket_cmd(c, seed.unwrap_or(DEFAULT_SEED)),
        Command::Oracle(c) => oracle_cmd(c),
        Command::Sweep(c) => sweep_cmd(c, seed),
        Command::Predict(c) => predict_cmd(c),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(e) if !e.is_validation() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

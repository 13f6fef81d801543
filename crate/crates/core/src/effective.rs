//! The effective boundary operator `-d²/ds² - ακ(s)` and its semiclassical
//! predictors.
//!
//! The operator is discretized by second-order central differences on the
//! uniform arc-length grid with periodic (or Bloch) closure, which yields a
//! cyclic tridiagonal matrix.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{resample_kappa, ArcCurve, PeriodicCell};
use crate::linalg::{CyclicTridiagonal, SparseSym, SpectrumResult, SymBuilder, SymTridiagonal};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone)]
pub struct EffectiveOperator<T> {
    pub alpha: T,
    pub n: usize,
    pub length: T,
    pub kappa: Vec<T>,
    pub matrix: SparseSym<T>,
    cyclic: CyclicTridiagonal<T>,
}

impl<T: Real> EffectiveOperator<T> {
    fn from_kappa(kappa: Vec<T>, length: T, alpha: T) -> Result<Self> {
        let n = kappa.len();
        if n < 64 {
            return Err(Error::Invalid(format!("effective operator needs n >= 64 (got {n})")));
        }
        if !(alpha.is_finite() && length > T::zero()) {
            return Err(Error::Invalid("alpha must be finite and the length positive".into()));
        }
        let h = length / T::from_usize_lossy(n);
        let inv_h2 = T::one() / (h * h);
        let diag: Vec<T> = kappa.iter().map(|&k| lit::<T>(2.0) * inv_h2 - alpha * k).collect();
        let off = vec![-inv_h2; n];
        let mut b = SymBuilder::new(n);
        for i in 0..n {
            b.add(i, i, diag[i]);
            b.add(i, (i + 1) % n, off[i]);
        }
        let matrix = b.build();
        let cyclic = CyclicTridiagonal::new(diag, off)?;
        Ok(Self { alpha, n, length, kappa, matrix, cyclic })
    }

    pub fn spacing(&self) -> T {
        self.length / T::from_usize_lossy(self.n)
    }

    pub fn cyclic(&self) -> &CyclicTridiagonal<T> {
        &self.cyclic
    }

    /// Row sums of the kinetic part; zero for periodic closure.
    pub fn kinetic_row_sums(&self) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let mut s = T::zero();
                for (j, v) in self.matrix.row(i) {
                    s = s + v;
                    if j == i {
                        s = s + self.alpha * self.kappa[i];
                    }
                }
                s
            })
            .collect()
    }
}

/// Assembles `-d²/ds² - ακ` on a closed (or periodic) curve with `n ≥ 64`
/// nodes; the curvature is interpolated when `n` differs from `curve.n`.
pub fn assemble_effective<T: Real>(curve: &ArcCurve<T>, alpha: T, n: usize) -> Result<EffectiveOperator<T>> {
    if n < 64 {
        return Err(Error::Invalid(format!("effective operator needs n >= 64 (got {n})")));
    }
    let kappa = resample_kappa(curve, n)?;
    EffectiveOperator::from_kappa(kappa, curve.length, alpha)
}

/// Same as [`assemble_effective`] on one period of a periodic cell.
pub fn assemble_effective_cell<T: Real>(cell: &PeriodicCell<T>, alpha: T) -> Result<EffectiveOperator<T>> {
    EffectiveOperator::from_kappa(cell.kappa.clone(), cell.period, alpha)
}

/// The `k` lowest eigenvalues with residuals; pairs count as converged when
/// the residual is below `max(1e-9, 64 ε ‖A‖)`.
pub fn effective_eigs<T: Real>(op: &EffectiveOperator<T>, k: usize) -> Result<SpectrumResult<T>> {
    if k == 0 || k > op.n {
        return Err(Error::Invalid(format!("k must be in 1..={} (got {k})", op.n)));
    }
    let tol = lit::<T>(1e-9).max(lit::<T>(64.0) * T::epsilon() * op.cyclic.norm_inf());
    Ok(op.cyclic.lowest(k, tol))
}

/// Leading coefficient `sqrt(-κ''(s₀)/2)` of `E₁ + ακ_max ≈ e₁ α^{1/2}` at a
/// nondegenerate curvature maximum.
pub fn harmonic_prefactor<T: Real>(kappa_dd: T) -> Result<T> {
    if !(kappa_dd < T::zero()) {
        return Err(Error::Invalid(format!("curvature maximum is degenerate (kappa'' = {kappa_dd})")));
    }
    Ok((-kappa_dd / lit(2.0)).sqrt())
}

// ---------------------------------------------------------------------------
// harmonic levels

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicLevels<T> {
    pub mu: Vec<T>,
    /// Ascending, repeated according to multiplicity.
    pub levels: Vec<T>,
}

impl<T: Real> HarmonicLevels<T> {
    /// Distinct values with multiplicities, merging values closer than `tol`.
    pub fn distinct(&self, tol: T) -> Vec<(T, usize)> {
        let mut out: Vec<(T, usize)> = Vec::new();
        for &v in &self.levels {
            match out.last_mut() {
                Some((w, m)) if (v - *w).abs() <= tol => *m += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }
}

struct Frontier<T> {
    value: T,
    index: Vec<u32>,
}

impl<T: Real> PartialEq for Frontier<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Frontier<T> {}
impl<T: Real> PartialOrd for Frontier<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Frontier<T> {
    // min-heap on value, ties broken by index for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        other.value.partial_cmp(&self.value).unwrap_or(Ordering::Equal).then_with(|| other.index.cmp(&self.index))
    }
}

/// The `count` smallest elements of `{Σ sqrt(μ_k/2)(2n_k - 1) : n_k ≥ 1}`,
/// with multiplicity.
pub fn harmonic_levels<T: Real>(mu: &[T], count: usize) -> Result<HarmonicLevels<T>> {
    if mu.is_empty() || mu.iter().any(|&m| !(m > T::zero() && m.is_finite())) {
        return Err(Error::Invalid("all mu must be positive and finite".into()));
    }
    if count == 0 || count > 64 {
        return Err(Error::Invalid(format!("count must be in 1..=64 (got {count})")));
    }
    let omega: Vec<T> = mu.iter().map(|&m| (m / lit(2.0)).sqrt()).collect();
    let value = |idx: &[u32]| -> T {
        idx.iter().zip(&omega).map(|(&n, &w)| w * T::from_usize_lossy(2 * n as usize - 1)).sum()
    };
    let start = vec![1u32; mu.len()];
    let mut heap = BinaryHeap::new();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    heap.push(Frontier { value: value(&start), index: start.clone() });
    seen.insert(start);
    let mut levels = Vec::with_capacity(count);
    while levels.len() < count {
        let Some(top) = heap.pop() else { break };
        levels.push(top.value);
        for k in 0..mu.len() {
            let mut next = top.index.clone();
            next[k] += 1;
            if seen.insert(next.clone()) {
                heap.push(Frontier { value: value(&next), index: next });
            }
        }
    }
    Ok(HarmonicLevels { mu: mu.to_vec(), levels })
}

// ---------------------------------------------------------------------------
// degenerate wells

fn default_well_nodes() -> usize {
    4000
}

/// `-d²/ds² + C_p s^{2p}` on the line, truncated to `[-W, W]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateWellSpec {
    pub p: u32,
    pub c_p: f64,
    /// Initial box half-width; chosen from the expected levels when absent.
    #[serde(default)]
    pub half_width: Option<f64>,
    /// Interior grid nodes on the initial box.
    #[serde(default = "default_well_nodes")]
    pub n: usize,
}

impl DegenerateWellSpec {
    pub fn new(p: u32, c_p: f64) -> Self {
        Self { p, c_p, half_width: None, n: default_well_nodes() }
    }
}

fn well_levels<T: Real>(p: i32, c: T, w: T, interior: usize, count: usize) -> Vec<T> {
    let h = lit::<T>(2.0) * w / T::from_usize_lossy(interior + 1);
    let inv_h2 = T::one() / (h * h);
    let diag = (0..interior)
        .map(|i| {
            let x = -w + h * T::from_usize_lossy(i + 1);
            lit::<T>(2.0) * inv_h2 + c * x.powi(2 * p)
        })
        .collect();
    let tri = SymTridiagonal { diag, off: vec![-inv_h2; interior - 1] };
    (0..count).map(|j| tri.eigenvalue(j)).collect()
}

/// Richardson-extrapolated levels from grids `h` and `h/2`.
fn well_levels_extrapolated<T: Real>(p: i32, c: T, w: T, interior: usize, count: usize) -> Vec<T> {
    let coarse = well_levels(p, c, w, interior, count);
    let fine = well_levels(p, c, w, 2 * interior + 1, count);
    coarse.iter().zip(&fine).map(|(&a, &b)| (lit::<T>(4.0) * b - a) / lit(3.0)).collect()
}

/// The `count` lowest eigenvalues of `-d²/ds² + C_p s^{2p}` on the line.
///
/// The box is doubled (at fixed spacing) until the ground level changes by
/// less than `1e-8` and `C_p W^{2p} ≥ 50 e_count` holds.
pub fn degenerate_well_levels<T: Real>(spec: &DegenerateWellSpec, count: usize) -> Result<Vec<T>> {
    if spec.p == 0 {
        return Err(Error::Invalid("p must be at least 1".into()));
    }
    if !(spec.c_p > 0.0 && spec.c_p.is_finite()) {
        return Err(Error::Invalid(format!("C_p must be positive (got {})", spec.c_p)));
    }
    if count == 0 || count > 64 {
        return Err(Error::Invalid(format!("count must be in 1..=64 (got {count})")));
    }
    if spec.n < 4 * count + 16 {
        return Err(Error::Invalid(format!("grid of {} nodes too coarse for {count} levels", spec.n)));
    }
    let p = spec.p as i32;
    let pf = spec.p as f64;
    let c: T = lit(spec.c_p);
    // crude upper estimate of e_count used only to size the first box
    let guess = spec.c_p.powf(1.0 / (pf + 1.0)) * 1.5 * (2.0 * count as f64).powf(2.0 * pf / (pf + 1.0));
    let mut w = spec.half_width.unwrap_or_else(|| (50.0 * guess / spec.c_p).powf(1.0 / (2.0 * pf)));
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::Invalid(format!("box half-width must be positive (got {w})")));
    }
    let mut interior = spec.n;
    let mut current = well_levels_extrapolated(p, c, lit::<T>(w), interior, count);
    for _ in 0..8 {
        let wider = well_levels_extrapolated(p, c, lit::<T>(2.0 * w), 2 * interior + 1, count);
        let change = (wider[0] - current[0]).abs();
        let confined = spec.c_p * w.powi(2 * p) >= 50.0 * current[count - 1].to_f64_lossy();
        if change.to_f64_lossy() < 1e-8 * current[0].abs().to_f64_lossy().max(1.0) && confined {
            return Ok(wider);
        }
        w *= 2.0;
        interior = 2 * interior + 1;
        current = wider;
    }
    Err(Error::NoConvergence(format!(
        "levels still change under box doubling at W = {w}; supply a larger half_width"
    )))
}

// ---------------------------------------------------------------------------
// Floquet bands

/// Open interval between two consecutive band unions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap<T> {
    pub lower: T,
    pub upper: T,
    /// 1-based index of the band directly below the gap.
    pub after_band: usize,
}

impl<T: Real> Gap<T> {
    pub fn length(&self) -> T {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure<T> {
    pub alpha: T,
    /// Phases in `[0, 2π)`; always contains `0` and `π`.
    pub theta: Vec<T>,
    /// `bands[j][i] = ε_{j+1}(θ_i)`.
    pub bands: Vec<Vec<T>>,
    pub gaps: Vec<Gap<T>>,
    /// Tolerance below which touching band ranges are merged.
    pub merge_tol: T,
    /// Largest difference between band ranges from `θ ∈ {0, π}` and from the full grid.
    pub edge_defect: T,
}

impl<T: Real> BandStructure<T> {
    fn index_of(&self, target: T) -> Option<usize> {
        self.theta.iter().position(|&t| (t - target).abs() <= lit::<T>(1e-12))
    }

    /// Band ranges from the periodic and antiperiodic values.
    pub fn edge_ranges(&self) -> Vec<(T, T)> {
        let i0 = self.index_of(T::zero()).expect("theta grid contains 0");
        let ipi = self.index_of(T::PI()).expect("theta grid contains pi");
        self.bands.iter().map(|b| (b[i0].min(b[ipi]), b[i0].max(b[ipi]))).collect()
    }

    /// Band ranges from the extrema over the whole phase grid.
    pub fn grid_ranges(&self) -> Vec<(T, T)> {
        self.bands
            .iter()
            .map(|b| {
                let lo = b.iter().copied().fold(T::infinity(), T::min);
                let hi = b.iter().copied().fold(T::neg_infinity(), T::max);
                (lo, hi)
            })
            .collect()
    }

    /// Largest jump of any band function between neighbouring phases.
    pub fn max_adjacent_jump(&self) -> T {
        let m = self.theta.len();
        let mut worst = T::zero();
        for b in &self.bands {
            for i in 0..m {
                worst = worst.max((b[(i + 1) % m] - b[i]).abs());
            }
        }
        worst
    }
}

/// Gaps between consecutive band unions, using the band-edge property
/// (edges attained at `θ ∈ {0, π}`).
pub fn detect_gaps<T: Real>(bands: &BandStructure<T>) -> Result<Vec<Gap<T>>> {
    if bands.bands.len() < 2 {
        return Err(Error::Invalid("gap detection needs at least two bands".into()));
    }
    let mut ranges: Vec<(T, T, usize)> =
        bands.edge_ranges().into_iter().enumerate().map(|(j, (lo, hi))| (lo, hi, j + 1)).collect();
    ranges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut gaps = Vec::new();
    let (mut top, mut top_band) = (ranges[0].1, ranges[0].2);
    for &(lo, hi, j) in &ranges[1..] {
        if lo - top > bands.merge_tol {
            gaps.push(Gap { lower: top, upper: lo, after_band: top_band });
        }
        if hi >= top {
            top = hi;
            top_band = j;
        }
    }
    Ok(gaps)
}

/// Phase grid `θ_i = 2πi/m`, with `π` added when `m` is odd.
pub fn theta_grid<T: Real>(m: usize) -> Vec<T> {
    let mut theta: Vec<T> = (0..m).map(|i| T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(m)).collect();
    if m % 2 == 1 {
        theta.insert(m / 2 + 1, T::PI());
    }
    theta
}

/// Band functions `ε_j(θ)`, `j ≤ j_max`, of the effective operator on a
/// periodic cell, solved in parallel over the phase grid.
pub fn bloch_bands<T: Real>(cell: &PeriodicCell<T>, alpha: T, theta_count: usize, j_max: usize) -> Result<BandStructure<T>> {
    if theta_count < 17 {
        return Err(Error::Invalid(format!("theta_count must be at least 17 (got {theta_count})")));
    }
    if j_max == 0 || j_max > cell.n {
        return Err(Error::Invalid(format!("j_max must be in 1..={} (got {j_max})", cell.n)));
    }
    let op = assemble_effective_cell(cell, alpha)?;
    let theta = theta_grid::<T>(theta_count);
    let per_theta: Vec<Vec<T>> = theta.par_iter().map(|&t| op.cyclic.eigenvalues_at(t, j_max)).collect();
    let bands: Vec<Vec<T>> = (0..j_max).map(|j| per_theta.iter().map(|v| v[j]).collect()).collect();
    let h = cell.spacing();
    let merge_tol = lit::<T>(1e-9) * T::one().max(alpha.abs()).max(T::one() / (h * h));
    let mut bs = BandStructure { alpha, theta, bands, gaps: Vec::new(), merge_tol, edge_defect: T::zero() };
    bs.edge_defect = bs
        .edge_ranges()
        .iter()
        .zip(bs.grid_ranges())
        .map(|(e, g)| (e.0 - g.0).abs().max((e.1 - g.1).abs()))
        .fold(T::zero(), T::max);
    if j_max >= 2 {
        bs.gaps = detect_gaps(&bs)?;
    }
    Ok(bs)
}

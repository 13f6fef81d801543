//! Robin Laplacian on the boundary layer `S × (0, δ)` in tubular
//! coordinates, with Neumann and Dirichlet truncation at `t = δ`.
//!
//! In coordinates `(s, t)` with `φ = 1 − tκ(s)` the quadratic form is
//! `∫∫ φ⁻¹(∂_s u)² + φ(∂_t u)² ds dt − α ∫ u(s,0)² ds` with mass `φ ds dt`.
//! The two truncations give lower and upper bounds for every eigenvalue of
//! the full problem that lies below zero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{min_layer_width, resample_kappa, ArcCurve};
use crate::linalg::{chebyshev_lowest, dense_eigh, ChebyshevOptions, SparseSym, SpectrumResult, SymBuilder, DENSE_CUTOFF, DEFAULT_SEED};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndCondition {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone)]
pub struct LayerConfig<T> {
    pub curve: ArcCurve<T>,
    pub alpha: T,
    pub delta: T,
    /// Schedule coefficient in `δ = b ln α / α`.
    pub b: T,
    pub n_s: usize,
    pub n_t: usize,
    /// Lower bound enforced on `φ = 1 − tκ` over the layer; `1/2` by default.
    pub phi_min: T,
    /// Seed of the iterative solver's start block.
    pub seed: u64,
}

/// Largest `δ` with `1 − tκ ≥ phi_min` on `[0, δ]`; equals
/// [`min_layer_width`] for `phi_min = 1/2`. Values below `1/2` are only
/// meaningful while the normal map stays injective (`δ` below the reach).
pub fn layer_width_limit<T: Real>(curve: &ArcCurve<T>, phi_min: T) -> T {
    if phi_min == lit(0.5) {
        return min_layer_width(curve);
    }
    let kmax = curve.kappa_max();
    if kmax > T::zero() {
        (T::one() - phi_min) / kmax
    } else {
        T::infinity()
    }
}

/// `min(b ln α / α, layer_width_limit(phi_min))`.
pub fn default_delta<T: Real>(curve: &ArcCurve<T>, alpha: T, b: T, phi_min: T) -> Result<T> {
    if !(alpha > T::one()) || !(b > T::zero()) {
        return Err(Error::Invalid("the δ schedule needs alpha > 1 and b > 0".into()));
    }
    Ok((b * alpha.ln() / alpha).min(layer_width_limit(curve, phi_min)))
}

impl<T: Real> LayerConfig<T> {
    /// Scheduled width with `b = 2` and `phi_min = 1/2`.
    pub fn new(curve: ArcCurve<T>, alpha: T, n_s: usize, n_t: usize) -> Result<Self> {
        Self::with_schedule(curve, alpha, lit(2.0), lit(0.5), n_s, n_t)
    }

    pub fn with_schedule(curve: ArcCurve<T>, alpha: T, b: T, phi_min: T, n_s: usize, n_t: usize) -> Result<Self> {
        let delta = default_delta(&curve, alpha, b, phi_min)?;
        let c = Self { curve, alpha, delta, b, n_s, n_t, phi_min, seed: DEFAULT_SEED };
        c.validate()?;
        Ok(c)
    }

    /// Explicit width; `b` is reported as the equivalent schedule coefficient
    /// (zero when `α ≤ 1`).
    pub fn with_delta(curve: ArcCurve<T>, alpha: T, delta: T, n_s: usize, n_t: usize) -> Result<Self> {
        let b = if alpha > T::one() { delta * alpha / alpha.ln() } else { T::zero() };
        let c = Self { curve, alpha, delta, b, n_s, n_t, phi_min: lit(0.5), seed: DEFAULT_SEED };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.curve.closed() {
            return Err(Error::Invalid("the layer needs a closed or periodic curve".into()));
        }
        if !(self.alpha >= T::zero() && self.alpha.is_finite()) {
            return Err(Error::Invalid(format!("alpha must be finite and nonnegative (got {})", self.alpha)));
        }
        if !(self.delta > T::zero() && self.delta.is_finite()) {
            return Err(Error::Invalid(format!("delta must be positive (got {})", self.delta)));
        }
        if !(self.phi_min > T::zero() && self.phi_min < T::one()) {
            return Err(Error::Invalid(format!("phi_min must lie in (0, 1) (got {})", self.phi_min)));
        }
        if self.n_t < 16 {
            return Err(Error::Invalid(format!("n_t must be at least 16 (got {})", self.n_t)));
        }
        if self.n_s < 16 {
            return Err(Error::Invalid(format!("n_s must be at least 16 (got {})", self.n_s)));
        }
        Ok(())
    }

    pub fn h_s(&self) -> T {
        self.curve.length / T::from_usize_lossy(self.n_s)
    }

    pub fn h_t(&self) -> T {
        self.delta / T::from_usize_lossy(self.n_t)
    }

    /// Robin coefficient used on the `t = 0` row: `α (1 + α²h_t²/4)^{1/2}`,
    /// for which the discrete half-line problem has the exact eigenvalue `−α²`.
    pub fn fitted_alpha(&self) -> T {
        let ah = self.alpha * self.h_t();
        self.alpha * (T::one() + ah * ah / lit(4.0)).sqrt()
    }
}

/// Stiffness matrix and lumped mass of one truncation.
#[derive(Debug, Clone)]
pub struct LayerSystem<T> {
    pub stiffness: SparseSym<T>,
    pub mass: Vec<T>,
    pub end: EndCondition,
    pub n_s: usize,
    /// Unknowns per `s` node: `n_t + 1` (Neumann) or `n_t` (Dirichlet).
    pub rows_t: usize,
}

impl<T: Real> LayerSystem<T> {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Unknown at `(s_i, t_j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.rows_t + j
    }

    /// `M^{-1/2} K M^{-1/2}`, similar to the pencil `(K, M)`.
    pub fn normalized(&self) -> SparseSym<T> {
        let d: Vec<T> = self.mass.iter().map(|&m| T::one() / m.sqrt()).collect();
        self.stiffness.scaled(&d)
    }

    /// `M^{-1} K u`: the discrete operator acting on nodal values.
    pub fn apply_operator(&self, u: &[T]) -> Result<Vec<T>> {
        let ku = self.stiffness.apply(u)?;
        Ok(ku.iter().zip(&self.mass).map(|(&k, &m)| k / m).collect())
    }
}

/// Assembles the truncated form on the tensor grid: periodic `s` with `n_s`
/// nodes, `t_j = jδ/n_t`. Every difference quotient carries `φ` (or `φ⁻¹`)
/// at its midpoint, mass and Robin term use trapezoid weights.
pub fn assemble_layer<T: Real>(config: &LayerConfig<T>, end: EndCondition) -> Result<LayerSystem<T>> {
    config.validate()?;
    let (n_s, n_t) = (config.n_s, config.n_t);
    let kappa2 = resample_kappa(&config.curve, 2 * n_s)?;
    let half = lit::<T>(0.5);
    let worst = kappa2.iter().fold(T::one(), |m, &k| m.min(T::one() - config.delta * k));
    if worst < config.phi_min {
        return Err(Error::Invalid(format!(
            "1 - δκ drops to {worst} < {}; reduce delta below {}",
            config.phi_min,
            layer_width_limit(&config.curve, config.phi_min)
        )));
    }
    let (hs, ht) = (config.h_s(), config.h_t());
    let rows_t = match end {
        EndCondition::Neumann => n_t + 1,
        EndCondition::Dirichlet => n_t,
    };
    let t = |j: usize| ht * T::from_usize_lossy(j);
    let tw = |j: usize| if j == 0 || j == n_t { ht * half } else { ht };
    let phi = |k: T, tt: T| T::one() - tt * k;
    let idx = |i: usize, j: usize| i * rows_t + j;

    let mut b = SymBuilder::new(n_s * rows_t);
    let mut mass = vec![T::zero(); n_s * rows_t];
    let alpha_fit = config.fitted_alpha();
    for i in 0..n_s {
        let k_node = kappa2[2 * i];
        let k_mid = kappa2[2 * i + 1];
        let ip = (i + 1) % n_s;
        for j in 0..rows_t {
            mass[idx(i, j)] = phi(k_node, t(j)) * hs * tw(j);
            // t-edge (j, j+1)
            if j < n_t {
                let w = phi(k_node, t(j) + ht * half) * hs / ht;
                b.add(idx(i, j), idx(i, j), w);
                if j + 1 < rows_t {
                    b.add(idx(i, j + 1), idx(i, j + 1), w);
                    b.add(idx(i, j), idx(i, j + 1), -w);
                }
            }
            // s-edge (i, i+1)
            let w = tw(j) / (phi(k_mid, t(j)) * hs);
            b.add(idx(i, j), idx(i, j), w);
            b.add(idx(ip, j), idx(ip, j), w);
            b.add(idx(i, j), idx(ip, j), -w);
        }
        b.add(idx(i, 0), idx(i, 0), -alpha_fit * hs);
    }
    Ok(LayerSystem { stiffness: b.build(), mass, end, n_s, rows_t })
}

/// Lowest `k` eigenvalues of one truncation with residuals of the
/// normalized matrix.
pub fn layer_eigs<T: Real>(system: &LayerSystem<T>, k: usize) -> Result<SpectrumResult<T>> {
    layer_eigs_seeded(system, k, DEFAULT_SEED)
}

pub fn layer_eigs_seeded<T: Real>(system: &LayerSystem<T>, k: usize, seed: u64) -> Result<SpectrumResult<T>> {
    let a = system.normalized();
    if a.dim() <= DENSE_CUTOFF {
        let full = dense_eigh(&a.to_dense())?;
        let k = k.min(a.dim());
        return Ok(SpectrumResult {
            eigenvalues: full.spectrum.eigenvalues[..k].to_vec(),
            residuals: full.spectrum.residuals[..k].to_vec(),
            iterations: full.spectrum.iterations,
            converged: vec![true; k],
        });
    }
    let tol = lit::<T>(1e-8).max(lit::<T>(1e3) * T::epsilon() * a.norm_inf());
    let opts = ChebyshevOptions { tol, seed, ..ChebyshevOptions::default() };
    chebyshev_lowest(&a, k, &opts)
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketResult<T> {
    /// Neumann-truncation eigenvalues.
    pub lower: Vec<T>,
    /// Dirichlet-truncation eigenvalues.
    pub upper: Vec<T>,
    pub alpha: T,
    pub delta: T,
    pub n_s: usize,
    pub n_t: usize,
    pub lower_residuals: Vec<T>,
    pub upper_residuals: Vec<T>,
    pub converged: Vec<bool>,
    /// Set when indices with a nonnegative upper bound were dropped.
    pub truncated: bool,
}

impl<T: Real> BracketResult<T> {
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn midpoint(&self, j: usize) -> T {
        (self.lower[j] + self.upper[j]) * lit(0.5)
    }

    /// Half the bracket width plus the larger residual of the two solves.
    pub fn halfwidth(&self, j: usize) -> T {
        (self.upper[j] - self.lower[j]) * lit(0.5) + self.lower_residuals[j].max(self.upper_residuals[j])
    }

    pub fn contains(&self, j: usize, value: T, tol: T) -> bool {
        value >= self.lower[j] - tol && value <= self.upper[j] + tol
    }
}

/// Neumann and Dirichlet truncations on identical grids, solved concurrently.
///
/// Only indices whose upper bound is negative are returned; when fewer
/// than `k` qualify the list is cut and `truncated` is set.
pub fn bracket_eigenvalues<T: Real>(config: &LayerConfig<T>, k: usize) -> Result<BracketResult<T>> {
    if k == 0 || k > 10 {
        return Err(Error::Invalid(format!("k must be in 1..=10 (got {k})")));
    }
    let (neu, dir) = rayon::join(
        || assemble_layer(config, EndCondition::Neumann).and_then(|s| layer_eigs_seeded(&s, k, config.seed)),
        || assemble_layer(config, EndCondition::Dirichlet).and_then(|s| layer_eigs_seeded(&s, k, config.seed)),
    );
    let (neu, dir) = (neu?, dir?);
    let m = neu.len().min(dir.len());
    let mut out = BracketResult {
        lower: Vec::with_capacity(m),
        upper: Vec::with_capacity(m),
        alpha: config.alpha,
        delta: config.delta,
        n_s: config.n_s,
        n_t: config.n_t,
        lower_residuals: Vec::with_capacity(m),
        upper_residuals: Vec::with_capacity(m),
        converged: Vec::with_capacity(m),
        truncated: m < k,
    };
    for j in 0..m {
        if !(dir.eigenvalues[j] < T::zero()) {
            out.truncated = true;
            break;
        }
        let conv = neu.converged[j] && dir.converged[j];
        let slack = lit::<T>(1e-9) * dir.eigenvalues[j].abs() + neu.residuals[j] + dir.residuals[j];
        if conv && neu.eigenvalues[j] > dir.eigenvalues[j] + slack {
            return Err(Error::NoConvergence(format!(
                "bracket inverted at j={}: lower {} > upper {}",
                j + 1,
                neu.eigenvalues[j],
                dir.eigenvalues[j]
            )));
        }
        out.lower.push(neu.eigenvalues[j]);
        out.upper.push(dir.eigenvalues[j]);
        out.lower_residuals.push(neu.residuals[j]);
        out.upper_residuals.push(dir.residuals[j]);
        out.converged.push(conv);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenEstimate<T> {
    pub estimate: T,
    pub halfwidth: T,
}

/// Bracket midpoints with their halfwidths.
pub fn robin_eig_estimate<T: Real>(config: &LayerConfig<T>, k: usize) -> Result<Vec<EigenEstimate<T>>> {
    let br = bracket_eigenvalues(config, k)?;
    Ok((0..br.len()).map(|j| EigenEstimate { estimate: br.midpoint(j), halfwidth: br.halfwidth(j) }).collect())
}

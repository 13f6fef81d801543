use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{axpy, dot, norm, SparseSym, SpectrumResult, SymTridiagonal};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions<T> {
    /// Absolute residual tolerance `‖Av − θv‖` for a Ritz pair.
    pub tol: T,
    /// Krylov dimension cap per cycle.
    pub max_iter: usize,
    /// Seed for the start vectors of deflated restart cycles.
    pub seed: u64,
    /// Deflated restart cycles used to pick up missed copies of multiple eigenvalues.
    pub max_restarts: usize,
}

impl<T: Real> Default for LanczosOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-9), max_iter: 4000, seed: 0x5eed, max_restarts: 4 }
    }
}

impl<T: Real> LanczosOptions<T> {
    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }
}

struct Cycle<T> {
    values: Vec<T>,
    vectors: Vec<Vec<T>>,
    estimates: Vec<T>,
    iterations: usize,
}

/// Alternating-sign ramp `(-1)^i (1 + i/n)`, normalized.
fn ramp_start<T: Real>(n: usize) -> Vec<T> {
    let nf = T::from_usize_lossy(n);
    let mut v: Vec<T> = (0..n)
        .map(|i| {
            let r = T::one() + T::from_usize_lossy(i) / nf;
            if i % 2 == 0 { r } else { -r }
        })
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x = *x / nv);
    v
}

fn random_start<T: Real>(n: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect()
}

fn orthogonalize<T: Real>(w: &mut [T], basis: &[Vec<T>], locked: &[Vec<T>]) {
    for _ in 0..2 {
        for q in locked.iter().chain(basis) {
            let c = dot(w, q);
            axpy(-c, q, w);
        }
    }
}

/// One Lanczos run with full reorthogonalization against its own basis and
/// the `locked` vectors. Stops once the `want` lowest Ritz pairs have
/// residual estimates below `tol`, or, when `stop_at_or_above` is given,
/// once the lowest Ritz pair has converged at or above that value.
fn run_cycle<T: Real>(
    a: &SparseSym<T>,
    locked: &[Vec<T>],
    mut v: Vec<T>,
    want: usize,
    stop_at_or_above: Option<T>,
    opts: &LanczosOptions<T>,
) -> Result<Cycle<T>> {
    let n = a.dim();
    let max_dim = opts.max_iter.min(n - locked.len()).max(1);
    orthogonalize(&mut v, &[], locked);
    let nv = norm(&v);
    if !(nv > T::zero()) {
        return Err(Error::NoConvergence("start vector lies in the locked subspace".into()));
    }
    v.iter_mut().for_each(|x| *x = *x / nv);

    let anorm = a.norm_inf().max(T::min_positive_value());
    let breakdown = T::epsilon() * anorm * T::lit(16.0);
    let mut basis: Vec<Vec<T>> = vec![v];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let mut w = vec![T::zero(); n];
    let mut next_check = (want + 8).min(max_dim);

    loop {
        let j = basis.len() - 1;
        a.apply_into(&basis[j], &mut w);
        let alpha = dot(&w, &basis[j]);
        axpy(-alpha, &basis[j], &mut w);
        if j > 0 {
            axpy(-betas[j - 1], &basis[j - 1], &mut w);
        }
        orthogonalize(&mut w, &basis, locked);
        alphas.push(alpha);
        let beta = norm(&w);
        let m = alphas.len();
        let exhausted = beta <= breakdown || m >= max_dim;

        if m >= next_check || exhausted {
            let t = SymTridiagonal::new(alphas.clone(), betas.clone())?;
            let (vals, svecs) = t.lowest_eigenpairs(want.min(m));
            let est: Vec<T> = svecs.iter().map(|s| (beta * s[m - 1]).abs()).collect();
            let all_ok = vals.len() == want && est.iter().all(|&e| e <= opts.tol);
            let above = match stop_at_or_above {
                Some(th) => !vals.is_empty() && est[0] <= opts.tol && vals[0] >= th,
                None => false,
            };
            if all_ok || above || exhausted {
                let vectors = svecs
                    .iter()
                    .map(|s| {
                        let mut y = vec![T::zero(); n];
                        for (c, q) in s.iter().zip(&basis) {
                            axpy(*c, q, &mut y);
                        }
                        y
                    })
                    .collect();
                let estimates = if beta <= breakdown { vec![T::zero(); vals.len()] } else { est };
                return Ok(Cycle { values: vals, vectors, estimates, iterations: m });
            }
            let step = (m / 8).max(6);
            next_check = (m + step).min(max_dim);
        }
        betas.push(beta);
        w.iter_mut().for_each(|x| *x = *x / beta);
        basis.push(std::mem::replace(&mut w, vec![T::zero(); n]));
    }
}

fn true_residual<T: Real>(a: &SparseSym<T>, lam: T, v: &[T]) -> T {
    let mut av = vec![T::zero(); v.len()];
    a.apply_into(v, &mut av);
    axpy(-lam, v, &mut av);
    norm(&av) / norm(v)
}

/// The `k` lowest eigenvalues of a sparse symmetric matrix by Lanczos with
/// full reorthogonalization.
///
/// The first cycle starts from a deterministic alternating-sign ramp. For
/// `k > 1`, further cycles restart from seeded random vectors deflated
/// against the converged pairs, so that copies of multiple eigenvalues that
/// a single Krylov space cannot see are picked up. Non-convergence yields a
/// partial result with `converged` flags cleared rather than an error.
pub fn lanczos_lowest<T: Real>(a: &SparseSym<T>, k: usize, opts: &LanczosOptions<T>) -> Result<SpectrumResult<T>> {
    lanczos_lowest_pairs(a, k, opts).map(|(s, _)| s)
}

pub(crate) fn lanczos_lowest_pairs<T: Real>(
    a: &SparseSym<T>,
    k: usize,
    opts: &LanczosOptions<T>,
) -> Result<(SpectrumResult<T>, Vec<Vec<T>>)> {
    let n = a.dim();
    if k == 0 || k > 20 {
        return Err(Error::Invalid(format!("lanczos_lowest supports 1 <= k <= 20, got {k}")));
    }
    if n < 4 * k {
        return Err(Error::Invalid(format!("matrix dimension {n} must be at least 4k = {}", 4 * k)));
    }
    let mut pairs: Vec<(T, Vec<T>, bool)> = Vec::new();
    let mut iterations = 0;

    let first = run_cycle(a, &[], ramp_start(n), k, None, opts)?;
    iterations += first.iterations;
    for ((v, x), e) in first.values.into_iter().zip(first.vectors).zip(first.estimates) {
        pairs.push((v, x, e <= opts.tol));
    }
    let all_conv = pairs.len() == k && pairs.iter().all(|p| p.2);

    if all_conv && k > 1 {
        for cycle in 1..=opts.max_restarts {
            pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            let kth = pairs[k - 1].0;
            let locked: Vec<Vec<T>> = pairs.iter().map(|p| p.1.clone()).collect();
            if locked.len() + 4 >= n {
                break;
            }
            let start = random_start(n, opts.seed.wrapping_add(cycle as u64));
            let run = run_cycle(a, &locked, start, k, Some(kth - opts.tol), opts)?;
            iterations += run.iterations;
            let mut found = false;
            for ((v, x), e) in run.values.into_iter().zip(run.vectors).zip(run.estimates) {
                if e <= opts.tol && v < kth - opts.tol {
                    pairs.push((v, x, true));
                    found = true;
                }
            }
            if !found {
                break;
            }
        }
    }

    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    pairs.truncate(k);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut converged = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for (v, x, c) in pairs {
        let r = true_residual(a, v, &x);
        eigenvalues.push(v);
        residuals.push(r);
        converged.push(c && r <= opts.tol);
        vectors.push(x);
    }
    Ok((SpectrumResult { eigenvalues, residuals, iterations, converged }, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense_eigh, SymBuilder};
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_laplacian_matches_fd_closed_form() {
        let n = 400;
        let h = 1.0 / 401.0;
        let mut b = SymBuilder::new(n);
        for i in 0..n {
            b.add(i, i, 2.0 / (h * h));
            if i + 1 < n {
                b.add(i, i + 1, -1.0 / (h * h));
            }
        }
        let a = b.build();
        let r = lanczos_lowest(&a, 3, &LanczosOptions::default()).unwrap();
        assert!(r.all_converged());
        for j in 0..3 {
            let jf = (j + 1) as f64;
            let fd = 2.0 * (1.0 - (jf * PI * h).cos()) / (h * h);
            assert!((r.eigenvalues[j] - fd).abs() < 1e-9, "j={j}: {} vs {fd}", r.eigenvalues[j]);
            let cont = (jf * PI).powi(2);
            assert!((r.eigenvalues[j] - cont).abs() / cont < 5e-3);
        }
    }

    #[test]
    fn diagonal_thousand() {
        let d: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        let a = SparseSym::diagonal(&d);
        let r = lanczos_lowest(&a, 5, &LanczosOptions::default()).unwrap();
        for (j, v) in r.eigenvalues.iter().enumerate() {
            assert!((v - (j + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn finds_both_copies_of_a_double_eigenvalue() {
        // periodic 1D Laplacian: every nonzero eigenvalue is double
        let n = 64;
        let mut b = SymBuilder::<f64>::new(n);
        for i in 0..n {
            b.add(i, i, 2.0);
            b.add(i, (i + 1) % n, -1.0);
        }
        let a = b.build();
        let r = lanczos_lowest(&a, 5, &LanczosOptions::default()).unwrap();
        let dense = dense_eigh(&a.to_dense()).unwrap().spectrum.eigenvalues;
        for j in 0..5 {
            assert!((r.eigenvalues[j] - dense[j]).abs() < 1e-10, "{:?} vs {:?}", r.eigenvalues, &dense[..5]);
        }
    }

    #[test]
    fn rejects_bad_k() {
        let a = SparseSym::<f64>::identity(10);
        assert!(lanczos_lowest(&a, 3, &LanczosOptions::default()).is_err());
        assert!(lanczos_lowest(&a, 0, &LanczosOptions::default()).is_err());
    }

    #[test]
    fn non_convergence_is_flagged() {
        let d: Vec<f64> = (0..500).map(|i| 1.0 + 1e-6 * i as f64).collect();
        let mut b = SymBuilder::new(500);
        for (i, v) in d.iter().enumerate() {
            b.add(i, i, *v);
            if i + 1 < 500 {
                b.add(i, i + 1, 0.5);
            }
        }
        let opts = LanczosOptions { max_iter: 5, ..LanczosOptions::default() };
        let r = lanczos_lowest(&b.build(), 2, &opts).unwrap();
        assert!(!r.all_converged());
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{axpy, dense_eigh, dot, norm, DenseSym, SparseSym, SpectrumResult};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Seed of the random start block unless a caller supplies one.
pub const DEFAULT_SEED: u64 = 0xc4eb;

/// Options for [`chebyshev_lowest`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevOptions<T> {
    /// Absolute residual tolerance `‖Av − θv‖` per returned pair.
    pub tol: T,
    pub max_passes: usize,
    /// Extra block columns beyond `k`.
    pub guard: usize,
    /// Upper limit on the filter degree of one pass.
    pub max_degree: usize,
    pub seed: u64,
}

impl<T: Real> Default for ChebyshevOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-9), max_passes: 400, guard: 8, max_degree: 600, seed: DEFAULT_SEED }
    }
}

/// Upper Gershgorin bound of the spectrum.
fn gershgorin_upper<T: Real>(a: &SparseSym<T>) -> T {
    (0..a.dim())
        .map(|i| {
            a.row(i).fold(T::zero(), |acc, (j, v)| if j == i { acc + v } else { acc + v.abs() })
        })
        .fold(T::neg_infinity(), T::max)
}

/// Modified Gram-Schmidt, two sweeps. Columns that collapse are replaced by
/// fresh random vectors.
fn orthonormalize<T: Real>(block: &mut [Vec<T>], rng: &mut ChaCha8Rng) {
    let n = block[0].len();
    for i in 0..block.len() {
        for attempt in 0..4 {
            let before = norm(&block[i]);
            for _ in 0..2 {
                for j in 0..i {
                    let (head, tail) = block.split_at_mut(i);
                    let c = dot(&tail[0], &head[j]);
                    axpy(-c, &head[j], &mut tail[0]);
                }
            }
            let after = norm(&block[i]);
            if after > before * T::lit(1e-10) && after > T::zero() {
                block[i].iter_mut().for_each(|x| *x = *x / after);
                break;
            }
            if attempt == 3 {
                break;
            }
            block[i] = (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        }
    }
}

/// Rayleigh-Ritz on an orthonormal block: returns ascending Ritz values and
/// rotates `block` onto the Ritz vectors.
fn rayleigh_ritz<T: Real>(a: &SparseSym<T>, block: &mut Vec<Vec<T>>) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let p = block.len();
    let n = a.dim();
    let ab: Vec<Vec<T>> = block
        .iter()
        .map(|x| {
            let mut y = vec![T::zero(); n];
            a.apply_into(x, &mut y);
            y
        })
        .collect();
    let h = DenseSym::from_fn(p, |i, j| {
        let v = dot(&block[i], &ab[j]);
        let w = dot(&block[j], &ab[i]);
        (v + w) * T::lit(0.5)
    });
    let eig = dense_eigh(&h)?;
    let mut xs = vec![vec![T::zero(); n]; p];
    let mut axs = vec![vec![T::zero(); n]; p];
    for c in 0..p {
        for r in 0..p {
            let w = eig.vectors[c][r];
            axpy(w, &block[r], &mut xs[c]);
            axpy(w, &ab[r], &mut axs[c]);
        }
    }
    *block = xs;
    Ok((eig.spectrum.eigenvalues, axs))
}

/// Applies the scaled degree-`m` Chebyshev polynomial that damps `[lo, hi]`
/// and amplifies the spectrum below `lo`; `floor` estimates the lowest
/// eigenvalue and fixes the scaling.
fn filter<T: Real>(a: &SparseSym<T>, x: &[T], m: usize, lo: T, hi: T, floor: T) -> Vec<T> {
    let n = x.len();
    let e = (hi - lo) * T::lit(0.5);
    let c = (hi + lo) * T::lit(0.5);
    let mut sigma = e / (floor - c);
    let sigma1 = sigma;
    let tau = T::lit(2.0) / sigma1;
    let mut prev = x.to_vec();
    let mut cur = vec![T::zero(); n];
    a.apply_into(x, &mut cur);
    for i in 0..n {
        cur[i] = (cur[i] - c * x[i]) * sigma1 / e;
    }
    let mut next = vec![T::zero(); n];
    for _ in 1..m {
        let sigma2 = T::one() / (tau - sigma);
        a.apply_into(&cur, &mut next);
        let f = T::lit(2.0) * sigma2 / e;
        let g = sigma * sigma2;
        for i in 0..n {
            next[i] = f * (next[i] - c * cur[i]) - g * prev[i];
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        sigma = sigma2;
    }
    cur
}

/// The `k` lowest eigenpairs by Chebyshev-filtered subspace iteration with
/// Rayleigh-Ritz extraction.
///
/// Suited to stiff operators whose norm is dominated by a few directions,
/// where plain Krylov methods need very long bases. Clusters and multiple
/// eigenvalues inside the block are resolved by the Ritz step.
pub fn chebyshev_lowest<T: Real>(a: &SparseSym<T>, k: usize, opts: &ChebyshevOptions<T>) -> Result<SpectrumResult<T>> {
    chebyshev_lowest_pairs(a, k, opts).map(|(s, _)| s)
}

fn chebyshev_lowest_pairs<T: Real>(
    a: &SparseSym<T>,
    k: usize,
    opts: &ChebyshevOptions<T>,
) -> Result<(SpectrumResult<T>, Vec<Vec<T>>)> {
    let n = a.dim();
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let p = k + opts.guard.max(k).max(4);
    if n < 2 * p {
        return Err(Error::Invalid(format!("matrix dimension {n} too small for a block of {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let hi = gershgorin_upper(a);
    let nf = T::from_usize_lossy(n);
    let mut block: Vec<Vec<T>> = (0..p)
        .map(|c| {
            if c == 0 {
                (0..n).map(|i| T::one() + T::from_usize_lossy(i) / nf).collect()
            } else {
                (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect()
            }
        })
        .collect();
    orthonormalize(&mut block, &mut rng);
    let (mut theta, mut ax) = rayleigh_ritz(a, &mut block)?;
    let mut passes = 0;
    let mut residuals = vec![T::infinity(); k];
    loop {
        for i in 0..k {
            let mut r = ax[i].clone();
            axpy(-theta[i], &block[i], &mut r);
            residuals[i] = norm(&r);
        }
        if residuals.iter().all(|&r| r <= opts.tol) || passes >= opts.max_passes {
            break;
        }
        passes += 1;
        let floor = theta[0];
        let lo = theta[p - 1];
        if !(hi > lo) || !(lo > floor) {
            break;
        }
        let x0 = T::one() + T::lit(2.0) * (lo - floor) / (hi - lo);
        let reach = x0.acosh();
        let degree = ((T::lit(16.0) / reach).to_f64_lossy().ceil() as usize).clamp(4, opts.max_degree.max(4));
        block = block.iter().map(|x| filter(a, x, degree, lo, hi, floor)).collect();
        orthonormalize(&mut block, &mut rng);
        let rr = rayleigh_ritz(a, &mut block)?;
        theta = rr.0;
        ax = rr.1;
    }
    let converged = residuals.iter().map(|&r| r <= opts.tol).collect();
    block.truncate(k);
    theta.truncate(k);
    Ok((SpectrumResult { eigenvalues: theta, residuals, iterations: passes, converged }, block))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dense_eigvalsh, SymBuilder};

    fn random_sparse(n: usize, seed: u64) -> SparseSym<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = SymBuilder::new(n);
        for i in 0..n {
            b.add(i, i, rng.gen_range(-2.0..2.0));
            for _ in 0..3 {
                let j = rng.gen_range(0..n);
                if j != i {
                    b.add(i.min(j), i.max(j), rng.gen_range(-1.0..1.0));
                }
            }
        }
        b.build()
    }

    #[test]
    fn matches_dense_on_random_instances() {
        for seed in 0..5 {
            let a = random_sparse(200, seed);
            let r = chebyshev_lowest(&a, 6, &ChebyshevOptions::default()).unwrap();
            assert!(r.all_converged(), "seed {seed}: {:?}", r.residuals);
            let d = dense_eigvalsh(&a.to_dense()).unwrap();
            for j in 0..6 {
                assert!((r.eigenvalues[j] - d[j]).abs() < 1e-9, "seed {seed} j {j}");
            }
        }
    }

    #[test]
    fn stiff_anisotropic_grid() {
        // 2D Laplacian with a strongly anisotropic second direction
        let (nx, ny) = (60, 20);
        let (cx, cy) = (1.0, 1e4);
        let id = |i: usize, j: usize| i * ny + j;
        let mut b = SymBuilder::new(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                b.add(id(i, j), id(i, j), 2.0 * cx + 2.0 * cy);
                b.add(id(i, j), id((i + 1) % nx, j), -cx);
                if j + 1 < ny {
                    b.add(id(i, j), id(i, j + 1), -cy);
                }
            }
        }
        let a = b.build();
        let r = chebyshev_lowest(&a, 5, &ChebyshevOptions::default()).unwrap();
        assert!(r.all_converged());
        let mut exact = Vec::new();
        for m in 0..nx {
            for q in 1..=ny {
                let lx = 2.0 * cx * (1.0 - (2.0 * std::f64::consts::PI * m as f64 / nx as f64).cos());
                let ly = 2.0 * cy * (1.0 - (std::f64::consts::PI * q as f64 / (ny + 1) as f64).cos());
                exact.push(lx + ly);
            }
        }
        exact.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for j in 0..5 {
            assert!((r.eigenvalues[j] - exact[j]).abs() < 1e-8, "{j}: {} vs {}", r.eigenvalues[j], exact[j]);
        }
    }

    #[test]
    fn too_small_is_rejected() {
        let a = SparseSym::<f64>::identity(10);
        assert!(chebyshev_lowest(&a, 3, &ChebyshevOptions::default()).is_err());
        assert!(chebyshev_lowest(&a, 0, &ChebyshevOptions::default()).is_err());
    }
}

use super::band::SymBand;
use super::{axpy, dot, norm, SpectrumResult};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Symmetric tridiagonal matrix with periodic wrap: `off[i]` couples `i`
/// and `i+1` for `i < n-1`, `off[n-1]` couples `n-1` and `0`.
///
/// With a Bloch phase `θ` the wrap entry becomes `off[n-1]·e^{iθ}` in
/// position `(n-1, 0)` and its conjugate in `(0, n-1)`. Eigenvalues come from
/// an orthogonal band-to-tridiagonal reduction followed by bisection, which
/// stays accurate for the double eigenvalues typical of periodic problems.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> CyclicTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.len() < 3 || off.len() != diag.len() {
            return Err(Error::Dimension { expected: diag.len().max(3), got: off.len() });
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("cyclic tridiagonal has non-finite entries".into()));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn gershgorin(&self) -> (T, T) {
        let n = self.dim();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let r = self.off[(i + n - 1) % n].abs() + self.off[i].abs();
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_inf(&self) -> T {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let l = (i + n - 1) % n;
                let r = (i + 1) % n;
                self.diag[i] * x[i] + self.off[l] * x[l] + self.off[i] * x[r]
            })
            .collect()
    }

    /// Position of node `i` in the folded ordering `0, n-1, 1, n-2, ...`,
    /// in which the wrap-around coupling has bandwidth two.
    fn folded_index(&self, i: usize) -> usize {
        let n = self.dim();
        if i < n.div_ceil(2) {
            2 * i
        } else {
            2 * (n - 1 - i) + 1
        }
    }

    /// Folded band form with the corner entry scaled by `sign` (`±1` for
    /// periodic or antiperiodic closure).
    pub fn folded(&self, sign: T) -> SymBand<T> {
        let n = self.dim();
        let mut band = SymBand::zeros(n, 2);
        for i in 0..n {
            let fi = self.folded_index(i);
            band.set(fi, fi, self.diag[i]).expect("diagonal in band");
            let j = (i + 1) % n;
            let v = if i == n - 1 { sign * self.off[i] } else { self.off[i] };
            band.set(fi, self.folded_index(j), v).expect("folded coupling in band");
        }
        band
    }

    /// Real `2n` representation `[[Re H, -Im H], [Im H, Re H]]` of the Bloch
    /// matrix `H(θ)`, in a folded ordering of bandwidth four. Every eigenvalue
    /// of `H(θ)` appears twice.
    pub fn bloch_doubled(&self, theta: T) -> SymBand<T> {
        let n = self.dim();
        let pos = |copy: usize, i: usize| 2 * self.folded_index(i) + copy;
        let mut band = SymBand::zeros(2 * n, 4);
        let (c, s) = (theta.cos(), theta.sin());
        let corner = self.off[n - 1];
        for copy in 0..2 {
            for i in 0..n {
                band.set(pos(copy, i), pos(copy, i), self.diag[i]).expect("diagonal in band");
                if i + 1 < n {
                    band.set(pos(copy, i), pos(copy, i + 1), self.off[i]).expect("chain in band");
                }
            }
            band.set(pos(copy, n - 1), pos(copy, 0), corner * c).expect("corner in band");
        }
        // Im H has (n-1, 0) = corner·sin θ and (0, n-1) = -corner·sin θ
        band.set(pos(1, n - 1), pos(0, 0), corner * s).expect("cross in band");
        band.set(pos(1, 0), pos(0, n - 1), -corner * s).expect("cross in band");
        band
    }

    /// Closure sign when `θ` is (numerically) `0` or `π`.
    fn real_sign(theta: T) -> Option<T> {
        let t = theta.modulo(T::TAU());
        let tol = lit::<T>(64.0) * T::epsilon();
        if t <= tol || T::TAU() - t <= tol {
            Some(T::one())
        } else if (t - T::PI()).abs() <= tol {
            Some(-T::one())
        } else {
            None
        }
    }

    /// The `k` lowest eigenvalues at Bloch phase `theta`.
    pub fn eigenvalues_at(&self, theta: T, k: usize) -> Vec<T> {
        match Self::real_sign(theta) {
            Some(sign) => {
                let tri = self.folded(sign).tridiagonalize();
                (0..k.min(self.dim())).map(|j| tri.eigenvalue(j)).collect()
            }
            None => {
                let tri = self.bloch_doubled(theta).tridiagonalize();
                (0..k.min(self.dim())).map(|j| tri.eigenvalue(2 * j)).collect()
            }
        }
    }

    /// The `k` lowest eigenpairs at `θ = 0`: eigenvalues from the reduced
    /// tridiagonal matrix, vectors by inverse iteration on the folded band,
    /// orthogonalized within clusters.
    pub fn lowest_eigenpairs(&self, k: usize) -> (Vec<T>, Vec<Vec<T>>) {
        let n = self.dim();
        let k = k.min(n);
        let band = self.folded(T::one());
        let values: Vec<T> = {
            let tri = band.clone().tridiagonalize();
            (0..k).map(|j| tri.eigenvalue(j)).collect()
        };
        let scale = self.norm_inf().max(T::min_positive_value());
        let cluster_gap = scale * lit(1e-3);
        let mut folded_vecs: Vec<Vec<T>> = Vec::with_capacity(k);
        for (j, &lam) in values.iter().enumerate() {
            let cluster_start = (0..j)
                .rev()
                .take_while(|&i| (values[i + 1] - values[i]).abs() < cluster_gap)
                .last()
                .unwrap_or(j);
            let shift = lam + scale * T::epsilon() * lit::<T>(4.0) * T::from_usize_lossy(j + 1);
            let lu = band.shifted_lu(shift);
            let mut x: Vec<T> = (0..n)
                .map(|i| T::one() + lit::<T>(0.37) * T::from_usize_lossy((i * 7 + j * 13) % 11) / lit(11.0))
                .collect();
            for _ in 0..4 {
                for p in &folded_vecs[cluster_start..j] {
                    let c = dot(&x, p);
                    axpy(-c, p, &mut x);
                }
                let nx = norm(&x);
                x.iter_mut().for_each(|v| *v = *v / nx);
                x = lu.solve(&x);
            }
            for p in &folded_vecs[cluster_start..j] {
                let c = dot(&x, p);
                axpy(-c, p, &mut x);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|v| *v = *v / nx);
            folded_vecs.push(x);
        }
        let vectors = folded_vecs
            .iter()
            .map(|f| (0..n).map(|i| f[self.folded_index(i)]).collect())
            .collect();
        (values, vectors)
    }

    /// Lowest `k` eigenvalues at `θ = 0` with residual diagnostics.
    pub fn lowest(&self, k: usize, tol: T) -> SpectrumResult<T> {
        let (values, vectors) = self.lowest_eigenpairs(k);
        let residuals: Vec<T> = values.iter().zip(&vectors).map(|(&l, v)| residual(self, l, v)).collect();
        let converged = residuals.iter().map(|&r| r <= tol).collect();
        SpectrumResult { eigenvalues: values, residuals, iterations: 0, converged }
    }
}
fn residual<T: Real>(a: &CyclicTridiagonal<T>, lam: T, v: &[T]) -> T {
    let mut av = a.apply(v);
    axpy(-lam, v, &mut av);
    norm(&av) / norm(v)
}

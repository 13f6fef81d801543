use super::{dot, norm};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric tridiagonal matrix: `diag[0..n]`, `off[0..n-1]` (off[i] couples i and i+1).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> SymTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Dimension { expected: diag.len().saturating_sub(1), got: off.len() });
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("tridiagonal has non-finite entries".into()));
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
            let r = if i > 0 { self.off[i - 1].abs() } else { T::zero() }
                + if i + 1 < n { self.off[i].abs() } else { T::zero() };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: T) -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q == T::zero() {
            q = -tiny;
        }
        if q < T::zero() {
            count += 1;
        }
        for i in 1..self.dim() {
            let b = self.off[i - 1];
            q = self.diag[i] - x - b * b / q;
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// The `j`-th smallest eigenvalue (0-based) by bisection to machine precision.
    pub fn eigenvalue(&self, j: usize) -> T {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(T::min_positive_value());
        let two = T::lit(2.0);
        for _ in 0..200 {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi || hi - lo <= T::epsilon() * scale {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) / two
    }

    /// All eigenvalues, ascending, by implicit QL.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = vec![T::zero(); n];
        e[1..].copy_from_slice(&self.off);
        super::dense::tql2(n, &mut d, &mut e, None)?;
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(d)
    }

    /// The `k` lowest eigenpairs: bisection for values, inverse iteration
    /// with in-cluster reorthogonalization for vectors.
    pub fn lowest_eigenpairs(&self, k: usize) -> (Vec<T>, Vec<Vec<T>>) {
        let n = self.dim();
        let k = k.min(n);
        let values: Vec<T> = (0..k).map(|j| self.eigenvalue(j)).collect();
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(T::min_positive_value());
        let cluster_gap = scale * T::lit(1e-3);
        let mut vectors: Vec<Vec<T>> = Vec::with_capacity(k);
        for (j, &lam) in values.iter().enumerate() {
            let cluster_start = (0..j)
                .rev()
                .take_while(|&i| (values[i + 1] - values[i]).abs() < cluster_gap)
                .last()
                .unwrap_or(j);
            let shift = lam + scale * T::epsilon() * T::lit(4.0) * T::from_usize_lossy(j + 1);
            let mut x: Vec<T> = (0..n)
                .map(|i| T::one() + T::lit(0.37) * T::from_usize_lossy((i * 7 + j * 13) % 11) / T::lit(11.0))
                .collect();
            let lu = TriLu::factor(self, shift);
            for _ in 0..4 {
                for prev in &vectors[cluster_start..j] {
                    let c = dot(&x, prev);
                    super::axpy(-c, prev, &mut x);
                }
                let nx = norm(&x);
                x.iter_mut().for_each(|v| *v = *v / nx);
                x = lu.solve(&x);
            }
            for prev in &vectors[cluster_start..j] {
                let c = dot(&x, prev);
                super::axpy(-c, prev, &mut x);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|v| *v = *v / nx);
            vectors.push(x);
        }
        (values, vectors)
    }
}

/// LU with partial pivoting of `T - σI` (LAPACK `gttrf` layout).
pub(crate) struct TriLu<T> {
    dl: Vec<T>,
    d: Vec<T>,
    du: Vec<T>,
    du2: Vec<T>,
    swap: Vec<bool>,
}

impl<T: Real> TriLu<T> {
    pub(crate) fn factor(t: &SymTridiagonal<T>, sigma: T) -> Self {
        let n = t.dim();
        let mut d: Vec<T> = t.diag.iter().map(|&v| v - sigma).collect();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut du2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swap = vec![false; n];
        let tiny = T::epsilon() * T::epsilon();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == T::zero() {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] = d[i + 1] - f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swap[i] = true;
            }
        }
        if n > 0 && d[n - 1] == T::zero() {
            d[n - 1] = tiny;
        }
        Self { dl, d, du, du2, swap }
    }

    pub(crate) fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                let tmp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = tmp - self.dl[i] * x[i];
            } else {
                x[i + 1] = x[i + 1] - self.dl[i] * x[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s = s - self.du[i] * x[i + 1];
            }
            if i + 2 < n {
                s = s - self.du2[i] * x[i + 2];
            }
            x[i] = s / self.d[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laplacian(n: usize) -> SymTridiagonal<f64> {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn bisection_matches_closed_form() {
        let t = laplacian(50);
        for j in 0..5 {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * PI / 51.0).cos();
            assert!((t.eigenvalue(j) - exact).abs() < 1e-14);
        }
        let all = t.eigenvalues().unwrap();
        assert!((all[49] - (2.0 - 2.0 * (50.0 * PI / 51.0).cos())).abs() < 1e-13);
    }

    #[test]
    fn inverse_iteration_vectors_are_eigenvectors() {
        let t = laplacian(40);
        let (vals, vecs) = t.lowest_eigenpairs(4);
        for (lam, v) in vals.iter().zip(&vecs) {
            let n = v.len();
            let mut r = 0.0f64;
            for i in 0..n {
                let mut av = 2.0 * v[i];
                if i > 0 {
                    av -= v[i - 1];
                }
                if i + 1 < n {
                    av -= v[i + 1];
                }
                r = r.max((av - lam * v[i]).abs());
            }
            assert!(r < 1e-12);
        }
        assert!(dot(&vecs[0], &vecs[1]).abs() < 1e-12);
    }

    #[test]
    fn near_degenerate_pair_gets_orthogonal_vectors() {
        // two decoupled identical blocks joined by a tiny coupling
        let mut diag = vec![2.0f64; 20];
        diag.extend(vec![2.0; 20]);
        let mut off = vec![-1.0; 39];
        off[19] = 1e-13;
        let t = SymTridiagonal::new(diag, off).unwrap();
        let (vals, vecs) = t.lowest_eigenpairs(2);
        assert!((vals[1] - vals[0]).abs() < 1e-12);
        assert!(dot(&vecs[0], &vecs[1]).abs() < 1e-8);
    }

    #[test]
    fn sturm_count() {
        let t = SymTridiagonal::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(t.count_below(0.5), 0);
        assert_eq!(t.count_below(2.5), 2);
        assert_eq!(t.count_below(10.0), 3);
    }
}

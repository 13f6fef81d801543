use super::{norm, SpectrumResult};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DenseSym<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    /// Builds from `f(i, j)` evaluated on the lower triangle and mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| super::dot(&self.data[i * self.n..(i + 1) * self.n], x))
            .collect()
    }

    /// Frobenius norm, an upper bound for the spectral norm.
    pub fn norm_fro(&self) -> T {
        norm(&self.data)
    }

    fn check(&self) -> Result<()> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("matrix has non-finite entries".into()));
        }
        if self.n > 2000 {
            return Err(Error::Invalid(format!("dense solver limited to n <= 2000, got {}", self.n)));
        }
        Ok(())
    }
}

/// Eigenvalues and orthonormal eigenvectors (`vectors[j]` pairs with
/// `spectrum.eigenvalues[j]`).
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T> {
    pub spectrum: SpectrumResult<T>,
    pub vectors: Vec<Vec<T>>,
}

/// Full symmetric eigendecomposition by Householder tridiagonalization and
/// implicit QL.
pub fn dense_eigh<T: Real>(a: &DenseSym<T>) -> Result<EigenDecomposition<T>> {
    a.check()?;
    let n = a.n;
    if n == 0 {
        return Ok(EigenDecomposition {
            spectrum: SpectrumResult { eigenvalues: vec![], residuals: vec![], iterations: 0, converged: vec![] },
            vectors: vec![],
        });
    }
    let mut v = a.data.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(n, &mut v, &mut d, &mut e, true);
    let sweeps = tql2(n, &mut d, &mut e, Some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let eigenvalues: Vec<T> = order.iter().map(|&i| d[i]).collect();
    let vectors: Vec<Vec<T>> = order
        .iter()
        .map(|&c| (0..n).map(|r| v[r * n + c]).collect())
        .collect();
    let residuals = eigenvalues
        .iter()
        .zip(&vectors)
        .map(|(&lam, x)| {
            let ax = a.apply(x);
            let r: Vec<T> = ax.iter().zip(x).map(|(&p, &q)| p - lam * q).collect();
            norm(&r) / norm(x)
        })
        .collect();
    Ok(EigenDecomposition {
        spectrum: SpectrumResult { eigenvalues, residuals, iterations: sweeps, converged: vec![true; n] },
        vectors,
    })
}

/// All eigenvalues, ascending, without eigenvectors.
pub fn dense_eigvalsh<T: Real>(a: &DenseSym<T>) -> Result<Vec<T>> {
    a.check()?;
    let n = a.n;
    if n == 0 {
        return Ok(vec![]);
    }
    let mut v = a.data.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(n, &mut v, &mut d, &mut e, false);
    tql2(n, &mut d, &mut e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Householder reduction to tridiagonal form (EISPACK `tred2`). On exit `d`
/// holds the diagonal and `e[1..]` the subdiagonal; `v` holds the
/// orthogonal transform when `accumulate` is set.
pub(crate) fn tred2<T: Real>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T], accumulate: bool) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for k in 0..i {
            scale = scale + d[k].abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
                v[idx(j, i)] = T::zero();
            }
        } else {
            for k in 0..i {
                d[k] = d[k] / scale;
                h = h + d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in j + 1..i {
                    g = g + v[idx(k, j)] * d[k];
                    e[k] = e[k] + v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[idx(k, j)] = v[idx(k, j)] - (f * e[k] + g * d[k]);
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    if !accumulate {
        for j in 0..n {
            d[j] = v[idx(j, j)];
        }
        e[0] = T::zero();
        return;
    }
    for i in 0..n - 1 {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g = g + v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    v[idx(k, j)] = v[idx(k, j)] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = T::zero();
    }
    v[idx(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

/// Implicit QL on the tridiagonal `(d, e[1..])` (EISPACK `tql2`). Rotations
/// are applied to `v` when given. Returns the number of QL sweeps.
pub(crate) fn tql2<T: Real>(n: usize, d: &mut [T], e: &mut [T], mut v: Option<&mut [T]>) -> Result<usize> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let mut sweeps = 0usize;
    let two = T::lit(2.0);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                sweeps += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence("implicit QL exceeded 60 sweeps".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let hk = v[k * n + i + 1];
                            v[k * n + i + 1] = s * v[k * n + i] + c * hk;
                            v[k * n + i] = c * v[k * n + i] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(sweeps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_sorted() {
        let a = DenseSym::from_diag(&[3.0, 1.0, 2.0]);
        let r = dense_eigh(&a).unwrap();
        assert_eq!(r.spectrum.eigenvalues, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn swap_matrix() {
        let a = DenseSym::<f64>::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let r = dense_eigh(&a).unwrap();
        assert!((r.spectrum.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((r.spectrum.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_trace_and_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = DenseSym::from_fn(50, |_, _| rng.gen_range(-1.0..1.0));
        let r = dense_eigh(&a).unwrap();
        let sum: f64 = r.spectrum.eigenvalues.iter().sum();
        assert!((sum - a.trace()).abs() < 1e-10);
        let scale = a.norm_fro();
        for j in [0, 11, 24, 37, 49] {
            assert!(r.spectrum.residuals[j] <= 1e-10 * scale, "pair {j}");
        }
        let vals = dense_eigvalsh(&a).unwrap();
        for (x, y) in vals.iter().zip(&r.spectrum.eigenvalues) {
            assert!((x - y).abs() < 1e-12);
        }
        // orthonormality of two vectors
        let v0 = &r.vectors[3];
        let v1 = &r.vectors[40];
        assert!(super::super::dot(v0, v1).abs() < 1e-12);
        assert!((norm(v0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = DenseSym::<f64>::zeros(3);
        a.set(1, 1, f64::INFINITY);
        assert!(dense_eigh(&a).is_err());
        assert!(dense_eigvalsh(&a).is_err());
    }

    #[test]
    fn single_precision_works() {
        let a = DenseSym::<f32>::from_fn(6, |i, j| if i == j { 2.0 } else if i.abs_diff(j) == 1 { -1.0 } else { 0.0 });
        let r = dense_eigh(&a).unwrap();
        let exact = 2.0 - 2.0 * (std::f32::consts::PI / 7.0).cos();
        assert!((r.spectrum.eigenvalues[0] - exact).abs() < 1e-5);
    }
}

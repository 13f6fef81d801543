use super::SymTridiagonal;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric band matrix in lower storage with one spare diagonal for the
/// bulge created during tridiagonalization.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBand<T> {
    n: usize,
    kd: usize,
    /// `data[d * n + j] = A[j + d][j]` for `d ≤ kd + 1`.
    data: Vec<T>,
}

impl<T: Real> SymBand<T> {
    pub fn zeros(n: usize, kd: usize) -> Self {
        Self { n, kd, data: vec![T::zero(); (kd + 2) * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.kd
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        if d > self.kd + 1 {
            T::zero()
        } else {
            self.data[d * self.n + j]
        }
    }

    /// Sets `A[i][j] = A[j][i] = v`; `|i - j|` must not exceed the bandwidth.
    pub fn set(&mut self, i: usize, j: usize, v: T) -> Result<()> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i >= self.n || i - j > self.kd {
            return Err(Error::Invalid(format!("entry ({i}, {j}) outside band of width {}", self.kd)));
        }
        self.data[(i - j) * self.n + j] = v;
        Ok(())
    }

    fn put(&mut self, i: usize, j: usize, v: T) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j <= self.kd + 1 {
            self.data[(i - j) * self.n + j] = v;
        }
    }

    /// Similarity by the plane rotation `[[c, s], [-s, c]]` on `(p, p+1)`.
    fn rotate(&mut self, p: usize, c: T, s: T) {
        let q = p + 1;
        let w = self.kd + 1;
        let lo = p.saturating_sub(w);
        let hi = (q + w).min(self.n - 1);
        for k in lo..=hi {
            if k == p || k == q {
                continue;
            }
            let x = self.get(k, p);
            let y = self.get(k, q);
            if x == T::zero() && y == T::zero() {
                continue;
            }
            self.put(k, p, c * x - s * y);
            self.put(k, q, s * x + c * y);
        }
        let app = self.get(p, p);
        let aqq = self.get(q, q);
        let apq = self.get(q, p);
        let two = T::lit(2.0);
        self.put(p, p, c * c * app - two * c * s * apq + s * s * aqq);
        self.put(q, q, s * s * app + two * c * s * apq + c * c * aqq);
        self.put(q, p, c * s * (app - aqq) + (c * c - s * s) * apq);
    }

    /// Zeroes `A[i][j]` by rotating rows `(i-1, i)`.
    fn annihilate(&mut self, i: usize, j: usize) {
        let y = self.get(i, j);
        if y == T::zero() {
            return;
        }
        let x = self.get(i - 1, j);
        let r = x.hypot(y);
        let (c, s) = (x / r, -y / r);
        self.rotate(i - 1, c, s);
        self.put(i, j, T::zero());
    }

    /// Orthogonally similar tridiagonal matrix (band reduction by bulge chasing).
    pub fn tridiagonalize(mut self) -> SymTridiagonal<T> {
        let n = self.n;
        let kd = self.kd;
        if kd >= 2 {
            for j in 0..n.saturating_sub(2) {
                for d in (2..=kd).rev() {
                    let i = j + d;
                    if i >= n {
                        continue;
                    }
                    self.annihilate(i, j);
                    let (mut r, mut c) = (i + kd, i - 1);
                    while r < n {
                        self.annihilate(r, c);
                        c = r - 1;
                        r += kd;
                    }
                }
            }
        }
        let diag = (0..n).map(|i| self.get(i, i)).collect();
        let off = (0..n.saturating_sub(1)).map(|i| self.get(i + 1, i)).collect();
        SymTridiagonal { diag, off }
    }

    /// LU factorization of `A - σI` with partial pivoting.
    pub fn shifted_lu(&self, sigma: T) -> BandLu<T> {
        BandLu::factor(self, sigma)
    }
}

/// Banded LU with partial pivoting (`kl = ku = kd`, fill up to `2kd`).
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    n: usize,
    kd: usize,
    /// row `i` holds columns `i - kd ..= i + 2kd` at offsets `0 ..= 3kd`
    rows: Vec<T>,
    mult: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    fn width(&self) -> usize {
        3 * self.kd + 1
    }

    fn factor(a: &SymBand<T>, sigma: T) -> Self {
        let n = a.n;
        let kd = a.kd;
        let w = 3 * kd + 1;
        let mut lu = BandLu { n, kd, rows: vec![T::zero(); n * w], mult: vec![T::zero(); n * kd], piv: vec![0; n] };
        // u[i][j] stored at rows[i*w + (j + kd - i)]
        for i in 0..n {
            for j in i.saturating_sub(kd)..=(i + kd).min(n - 1) {
                let mut v = a.get(i, j);
                if i == j {
                    v = v - sigma;
                }
                lu.rows[i * w + (j + kd - i)] = v;
            }
        }
        let tiny = T::epsilon() * T::epsilon();
        for k in 0..n {
            let last = (k + kd).min(n - 1);
            // pivot search in column k among rows k..=last
            let mut p = k;
            let mut best = lu.at(k, k).abs();
            for r in k + 1..=last {
                let v = lu.at(r, k).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            lu.piv[k] = p;
            if p != k {
                for j in k..=(k + 2 * kd).min(n - 1) {
                    let a1 = lu.at(k, j);
                    let a2 = lu.at(p, j);
                    lu.set_at(k, j, a2);
                    lu.set_at(p, j, a1);
                }
            }
            let mut pivot = lu.at(k, k);
            if pivot == T::zero() {
                pivot = tiny;
                lu.set_at(k, k, pivot);
            }
            for r in k + 1..=last {
                let f = lu.at(r, k) / pivot;
                lu.mult[k * kd + (r - k - 1)] = f;
                lu.set_at(r, k, T::zero());
                for j in k + 1..=(k + 2 * kd).min(n - 1) {
                    let v = lu.at(r, j) - f * lu.at(k, j);
                    lu.set_at(r, j, v);
                }
            }
        }
        lu
    }

    fn at(&self, i: usize, j: usize) -> T {
        let off = j + self.kd;
        if off < i || off - i >= self.width() {
            return T::zero();
        }
        self.rows[i * self.width() + (off - i)]
    }

    fn set_at(&mut self, i: usize, j: usize, v: T) {
        let off = j + self.kd;
        if off < i || off - i >= self.width() {
            return;
        }
        let w = self.width();
        self.rows[i * w + (off - i)] = v;
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let (n, kd) = (self.n, self.kd);
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            for r in k + 1..=(k + kd).min(n - 1) {
                let f = self.mult[k * kd + (r - k - 1)];
                x[r] = x[r] - f * x[k];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + 2 * kd).min(n - 1) {
                s = s - self.at(i, j) * x[j];
            }
            x[i] = s / self.at(i, i);
        }
        x
    }
}

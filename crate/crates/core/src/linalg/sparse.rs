use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DenseSym;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric matrix in CSR form with the full (upper and lower) pattern stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym<T> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

/// Accumulates symmetric entries; duplicates are summed.
#[derive(Debug, Clone)]
pub struct SymBuilder<T> {
    n: usize,
    rows: Vec<BTreeMap<usize, T>>,
}

impl<T: Real> SymBuilder<T> {
    pub fn new(n: usize) -> Self {
        Self { n, rows: vec![BTreeMap::new(); n] }
    }

    /// Adds `v` at `(i, j)` and, for `i != j`, at `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range {}", self.n);
        let e = self.rows[i].entry(j).or_insert(T::zero());
        *e = *e + v;
        if i != j {
            let e = self.rows[j].entry(i).or_insert(T::zero());
            *e = *e + v;
        }
    }

    pub fn build(self) -> SparseSym<T> {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in self.rows {
            for (j, v) in row {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        SparseSym { n: self.n, row_ptr, col_idx, values }
    }
}

impl<T: Real> SparseSym<T> {
    /// Builds from an explicit full pattern. Every `(i, j, v)` must have its
    /// transpose present; the result is checked for value symmetry.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut rows: Vec<BTreeMap<usize, T>> = vec![BTreeMap::new(); n];
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::Invalid(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            if !v.is_finite() {
                return Err(Error::Invalid(format!("non-finite entry at ({i}, {j})")));
            }
            let e = rows[i].entry(j).or_insert(T::zero());
            *e = *e + v;
        }
        let m = SymBuilder { n, rows }.build();
        let scale = m.max_abs().max(T::min_positive_value());
        for i in 0..n {
            for p in m.row_ptr[i]..m.row_ptr[i + 1] {
                let j = m.col_idx[p];
                let vt = m.get(j, i);
                if (m.values[p] - vt).abs() > T::lit(1e-14).max(T::epsilon()) * scale {
                    return Err(Error::Invalid(format!("entries ({i}, {j}) and ({j}, {i}) differ")));
                }
            }
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    pub fn diagonal(d: &[T]) -> Self {
        Self {
            n: d.len(),
            row_ptr: (0..=d.len()).collect(),
            col_idx: (0..d.len()).collect(),
            values: d.to_vec(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, row_ptr: vec![0; n + 1], col_idx: vec![], values: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&j) {
            Ok(p) => self.values[self.row_ptr[i] + p],
            Err(_) => T::zero(),
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (self.col_idx[p], self.values[p]))
    }

    /// Matrix–vector product.
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: x.len() });
        }
        let mut y = vec![T::zero(); self.n];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn apply_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = T::zero();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s = s + self.values[p] * x[self.col_idx[p]];
            }
            *yi = s;
        }
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum, an upper bound for the spectral norm.
    pub fn norm_inf(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `D A D` for a diagonal `D = diag(d)`.
    pub fn scaled(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.n);
        let mut out = self.clone();
        for i in 0..self.n {
            for p in out.row_ptr[i]..out.row_ptr[i + 1] {
                out.values[p] = d[i] * out.values[p] * d[out.col_idx[p]];
            }
        }
        out
    }

    /// `A + c I`
    pub fn shifted(&self, c: T) -> Self {
        let mut b = SymBuilder::new(self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j >= i {
                    b.add(i, j, v);
                }
            }
            b.add(i, i, c);
        }
        b.build()
    }

    /// Largest `|A_ij − A_ji|` over `probes` random stored entries.
    pub fn symmetry_defect(&self, probes: usize, seed: u64) -> T {
        if self.nnz() == 0 {
            return T::zero();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = T::zero();
        for _ in 0..probes {
            let i = rng.gen_range(0..self.n);
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DenseSym<T> {
        let mut d = DenseSym::zeros(self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d.set(i, j, v);
            }
        }
        d
    }

    /// Writes the lower triangle in MatrixMarket `coordinate real symmetric` format.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        let lower: Vec<(usize, usize, T)> = (0..self.n)
            .flat_map(|i| self.row(i).filter(move |&(j, _)| j <= i).map(move |(j, v)| (i, j, v)))
            .collect();
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{} {} {}", self.n, self.n, lower.len())?;
        for (i, j, v) in lower {
            writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v.to_f64_lossy())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_apply_is_identity() {
        let a = SparseSym::<f64>::identity(7);
        let v: Vec<f64> = (0..7).map(|i| i as f64 - 2.5).collect();
        assert_eq!(a.apply(&v).unwrap(), v);
    }

    #[test]
    fn zero_matrix_gives_zero() {
        let a = SparseSym::<f64>::zeros(5);
        assert_eq!(a.apply(&[1.0; 5]).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn unit_vector_extracts_column() {
        let mut b = SymBuilder::new(4);
        b.add(0, 0, 2.0);
        b.add(0, 1, -1.0);
        b.add(1, 1, 2.0);
        b.add(1, 3, 0.5);
        b.add(2, 2, 3.0);
        b.add(3, 3, 1.0);
        let a = b.build();
        for i in 0..4 {
            let mut e = vec![0.0; 4];
            e[i] = 1.0;
            let col = a.apply(&e).unwrap();
            for (r, c) in col.iter().enumerate() {
                assert_eq!(*c, a.get(r, i));
            }
        }
        assert_eq!(a.symmetry_defect(16, 1), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = SparseSym::<f64>::identity(3);
        assert!(matches!(a.apply(&[1.0, 2.0]), Err(Error::Dimension { expected: 3, got: 2 })));
    }

    #[test]
    fn asymmetric_triplets_rejected() {
        let t = [(0, 1, 1.0), (1, 0, 2.0)];
        assert!(SparseSym::from_triplets(2, &t).is_err());
        let t = [(0, 1, 1.0), (1, 0, 1.0), (0, 0, f64::NAN)];
        assert!(SparseSym::from_triplets(2, &t).is_err());
    }

    #[test]
    fn matrix_market_header() {
        let a = SparseSym::<f64>::identity(2);
        let mut out = Vec::new();
        a.write_matrix_market(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n"));
    }
}

//! Interpolating cubic splines for sampled curves.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Cubic spline through `(u_i, y_i)`, periodic or natural.
#[derive(Debug, Clone)]
pub(crate) struct Cubic<T> {
    knots: Vec<T>,
    values: Vec<T>,
    /// Second derivatives at the knots.
    m: Vec<T>,
    periodic: bool,
}

/// Solves a cyclic tridiagonal system; `sub[0]` couples to `x[n-1]`,
/// `sup[n-1]` to `x[0]`.
fn solve_cyclic<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Vec<T> {
    let n = diag.len();
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] = diag[0] - gamma;
    d[n - 1] = diag[n - 1] - sub[0] * sup[n - 1] / gamma;
    let x = thomas(sub, &d, sup, rhs);
    let mut u = vec![T::zero(); n];
    u[0] = gamma;
    u[n - 1] = sup[n - 1];
    let z = thomas(sub, &d, sup, &u);
    let fact = (x[0] + sub[0] * x[n - 1] / gamma) / (T::one() + z[0] + sub[0] * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(&xi, &zi)| xi - fact * zi).collect()
}

/// Plain tridiagonal solve ignoring `sub[0]` and `sup[n-1]`.
fn thomas<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Vec<T> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut x = vec![T::zero(); n];
    let mut beta = diag[0];
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i];
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] = x[i] - c[i + 1] * next;
    }
    x
}

impl<T: Real> Cubic<T> {
    /// For a periodic spline `knots` has one more entry than `values`
    /// (the period end), and `values` wraps.
    pub(crate) fn new(knots: Vec<T>, values: Vec<T>, periodic: bool) -> Result<Self> {
        let n = values.len();
        let expected = if periodic { n + 1 } else { n };
        if knots.len() != expected || n < 4 {
            return Err(Error::Invalid("spline needs at least 4 values and matching knots".into()));
        }
        let h: Vec<T> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        if h.iter().any(|&hi| !(hi > T::zero())) {
            return Err(Error::Invalid("spline knots must be strictly increasing".into()));
        }
        let six = lit::<T>(6.0);
        let three = lit::<T>(3.0);
        let m = if periodic {
            let mut sub = vec![T::zero(); n];
            let mut diag = vec![T::zero(); n];
            let mut sup = vec![T::zero(); n];
            let mut rhs = vec![T::zero(); n];
            for i in 0..n {
                let hp = h[(i + n - 1) % n];
                let hn = h[i];
                sub[i] = hp / six;
                diag[i] = (hp + hn) / three;
                sup[i] = hn / six;
                rhs[i] = (values[(i + 1) % n] - values[i]) / hn - (values[i] - values[(i + n - 1) % n]) / hp;
            }
            solve_cyclic(&sub, &diag, &sup, &rhs)
        } else {
            let k = n - 2;
            let mut sub = vec![T::zero(); k];
            let mut diag = vec![T::zero(); k];
            let mut sup = vec![T::zero(); k];
            let mut rhs = vec![T::zero(); k];
            for j in 0..k {
                let i = j + 1;
                sub[j] = h[i - 1] / six;
                diag[j] = (h[i - 1] + h[i]) / three;
                sup[j] = h[i] / six;
                rhs[j] = (values[i + 1] - values[i]) / h[i] - (values[i] - values[i - 1]) / h[i - 1];
            }
            let inner = thomas(&sub, &diag, &sup, &rhs);
            let mut m = vec![T::zero(); n];
            m[1..n - 1].copy_from_slice(&inner);
            m
        };
        Ok(Cubic { knots, values, m, periodic })
    }

    pub(crate) fn segments(&self) -> usize {
        self.knots.len() - 1
    }

    pub(crate) fn knot(&self, i: usize) -> T {
        self.knots[i]
    }

    fn ends(&self, seg: usize) -> (T, T, T, T, T) {
        let n = self.values.len();
        let j = if self.periodic { (seg + 1) % n } else { seg + 1 };
        let h = self.knots[seg + 1] - self.knots[seg];
        (self.values[seg], self.values[j], self.m[seg], self.m[j], h)
    }

    /// Value and first derivative on segment `seg` at local offset `t`.
    pub(crate) fn eval(&self, seg: usize, t: T) -> (T, T) {
        let (y0, y1, m0, m1, h) = self.ends(seg);
        let six = lit::<T>(6.0);
        let two = lit::<T>(2.0);
        let b = (y1 - y0) / h - h * (two * m0 + m1) / six;
        let c3 = (m1 - m0) / (six * h);
        let y = y0 + t * (b + t * (m0 / two + t * c3));
        let dy = b + t * (m0 + t * lit::<T>(3.0) * c3);
        (y, dy)
    }
}

//! Symmetric eigenvalue machinery: CSR storage, a dense Householder/QL
//! solver, band reduction with tridiagonal bisection, Lanczos with full
//! reorthogonalization, and Chebyshev-filtered subspace iteration.

mod band;
mod chebyshev;
mod cyclic;
mod dense;
mod lanczos;
mod sparse;
mod tridiag;

pub use band::{BandLu, SymBand};
pub use chebyshev::{chebyshev_lowest, ChebyshevOptions, DEFAULT_SEED};
pub use cyclic::CyclicTridiagonal;
pub use dense::{dense_eigh, dense_eigvalsh, DenseSym, EigenDecomposition};
pub use lanczos::{lanczos_lowest, LanczosOptions};
pub use sparse::{SparseSym, SymBuilder};
pub use tridiag::SymTridiagonal;

use crate::scalar::Real;

/// Lowest part of a symmetric spectrum together with per-pair diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T> {
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<T>,
    /// `‖Av − λv‖ / ‖v‖` for each returned pair.
    pub residuals: Vec<T>,
    pub iterations: usize,
    pub converged: Vec<bool>,
}

impl<T: Real> SpectrumResult<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, &r| m.max(r))
    }
}

/// Dimension up to which [`lowest_eigenvalues`] uses the dense solver.
pub const DENSE_CUTOFF: usize = 600;

/// The `k` lowest eigenvalues of `a`: dense Householder/QL for small
/// matrices, Lanczos otherwise.
pub fn lowest_eigenvalues<T: Real>(
    a: &SparseSym<T>,
    k: usize,
    opts: &LanczosOptions<T>,
) -> crate::Result<SpectrumResult<T>> {
    if a.dim() <= DENSE_CUTOFF {
        let full = dense_eigh(&a.to_dense())?;
        let k = k.min(a.dim());
        Ok(SpectrumResult {
            eigenvalues: full.spectrum.eigenvalues[..k].to_vec(),
            residuals: full.spectrum.residuals[..k].to_vec(),
            iterations: full.spectrum.iterations,
            converged: vec![true; k],
        })
    } else {
        lanczos_lowest(a, k, opts)
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] = acc[0] + a[i] * b[i];
        acc[1] = acc[1] + a[i + 1] * b[i + 1];
        acc[2] = acc[2] + a[i + 2] * b[i + 2];
        acc[3] = acc[3] + a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s = s + a[i] * b[i];
    }
    s
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y ← y + c·x`
pub(crate) fn axpy<T: Real>(c: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + c * xi;
    }
}

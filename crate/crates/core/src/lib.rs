//! Eigenvalues of the attractive Robin Laplacian on planar domains.
//!
//! The crate discretizes the Robin problem on a thin boundary layer in
//! tubular coordinates and brackets its eigenvalues between Neumann and
//! Dirichlet truncations, computes the effective boundary operator
//! `-d²/ds² - α κ(s)` on closed and periodic curves, and provides the
//! semiclassical predictors and independent oracles used to cross-check
//! both.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the double-precision instances used by the harness
//! and the CLI.

pub mod effective;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod layer;
pub mod linalg;
pub mod model1d;
pub mod oracles;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SparseSym64 = linalg::SparseSym<f64>;
pub type SpectrumResult64 = linalg::SpectrumResult<f64>;
pub type Model1DResult64 = model1d::Model1DResult<f64>;
pub type ArcCurve64 = geometry::ArcCurve<f64>;
pub type PeriodicCell64 = geometry::PeriodicCell<f64>;
pub type EffectiveOperator64 = effective::EffectiveOperator<f64>;
pub type BandStructure64 = effective::BandStructure<f64>;
pub type BracketResult64 = layer::BracketResult<f64>;
pub type LayerConfig64 = layer::LayerConfig<f64>;

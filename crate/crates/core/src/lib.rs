//! Numerical construction and certification of countable families of
//! homologically independent complex limit cycles for holomorphic foliations
//! of the complex plane.
//!
//! The pipeline works in a linearization chart at a complex hyperbolic
//! singular point: compose the local loop holonomy with an entry-path
//! holonomy, locate fixed points of the contracting return maps, read off
//! multipliers, assemble closed representatives (entry lift plus spiral),
//! and certify pairwise disjointness and homological independence through
//! the multiplier cascade or contour-integral domination.
//!
//! Everything is generic over the real scalar backing complex arithmetic
//! (`f32`/`f64`); the `*64` aliases below fix the default precision.

pub mod certify;
pub mod chart;
pub mod error;
pub mod forge;
pub mod io;
pub mod model;
mod numeric;
pub mod projective;
pub mod scalar;
pub mod transport;

pub use error::{Error, Result};
pub use scalar::{cplx, Real, C};

/// Default-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;

pub type Field64 = model::PolynomialVectorField<f64>;

pub type Model64 = model::LocalLinearModel<f64>;
pub type Config64 = model::NumericConfig<f64>;
pub type Section64 = model::CrossSection<f64>;
pub type Germ64 = transport::GermMap<f64>;
pub type Family64 = forge::CycleFamily<f64>;

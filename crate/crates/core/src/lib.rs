//! Moebius energy of closed curves and the tools around it: spectral curve
//! representation, mollification, fractional Sobolev seminorms, sphere
//! inversions, discrete polygon energies and inscribed equilateral polygons.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar.

pub mod curve;
pub mod energies;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod inscribe;
pub mod io;
pub mod mobius;
pub mod mollify;
pub mod polygon;
pub mod quad;
pub mod scalar;
pub mod sobolev;

pub use curve::{ClosedCurve, CurveFamily, CurveSource, OpenCurve, ParamPoint};
pub use energies::{DiagonalPolicy, EnergyReport, QuadratureSpec};
pub use error::{Error, Result};
pub use polygon::Polygon;
pub use scalar::Real;

pub type ClosedCurve64 = ClosedCurve<f64>;
pub type ClosedCurve32 = ClosedCurve<f32>;
pub type OpenCurve64 = OpenCurve<f64>;
pub type OpenCurve32 = OpenCurve<f32>;
pub type Polygon64 = Polygon<f64>;
pub type Polygon32 = Polygon<f32>;
pub type EnergyReport64 = EnergyReport<f64>;
pub type EnergyReport32 = EnergyReport<f32>;

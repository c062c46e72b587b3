//! Constructive fractal uncertainty principle for the short-time Fourier transform.
//!
//! The crate is organized bottom-up:
//!
//! * [`cantor`]: discrete/continuous/product/radial Cantor iterates and growth conditions.
//! * [`porosity`]: exact 1-D porosity verification, certificates, thickening, product sampling.
//! * [`nyquist`]: maximal Nyquist densities and the Cantor-function subadditivity oracles.
//! * [`bounds`]: `κ_d`, single-step density bounds, the radius schedule and bound tables.
//! * [`tf`]: Bargmann/STFT quadrature, Gram matrices, spectra, overlap counts.
//! * [`harness`]: experiment configs, CSV emission, property-suite runner.

pub mod bounds;
pub mod cantor;
pub mod error;
pub mod harness;
pub mod interval;
pub mod linalg;
pub mod nyquist;
pub mod porosity;
pub mod quadrature;
pub mod special;
pub mod tf;

pub use cantor::{
    build_iterate, cantor_function, check_growth, discrete_iterate, radial_slice, CantorSpec, GrowthCondition,
    GrowthKind, Length, ProductCantor, RadialCantorSpec,
};
pub use error::{FupError, Result};
pub use interval::IntervalUnion;

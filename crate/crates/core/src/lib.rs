//! Spherical analysis and synthesis on the Gelfand pair (R^n, SO(n)).
//!
//! - [`bessel`]: spherical functions `J_lambda` and their lambda-derivatives.
//! - [`quadrature`]: sphere averages as Gegenbauer-weighted angular rules.
//! - [`radial`]: radial functions by profile, including lazy operator chains.
//! - [`ops`]: translation, spherical differences, product formula, monomial degrees.
//! - [`measure`]: radial measure expressions, convolution and the lift experiment.
//! - [`synthesis`]: least-squares fits over spherical-monomial dictionaries.
//! - [`checks`] and [`cli`]: the check suites and the command-line surface.

pub mod bessel;
pub mod checks;
pub mod cli;
pub mod config;
mod dd;
pub mod error;
pub mod gamma;
pub mod measure;
pub mod ops;
pub mod quadrature;
pub mod radial;
pub mod synthesis;

pub use bessel::{MonomialGenerator, SphericalFunction};
pub use error::{Error, Result};
pub use measure::{LiftSemantics, LineMeasure, RadialMeasureExpr};
pub use ops::SphericalDifference;
pub use quadrature::SphereAverageRule;
pub use radial::RadialFunction;
pub use synthesis::{FitResult, SynthesisProblem};

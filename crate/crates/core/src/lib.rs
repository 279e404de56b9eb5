//! Brjuno-type functions of the quadratic family `P_α(z) = e^{2iπα} z + z²`.
//!
//! Reals enter as exact [`AlphaSpec`] descriptions and are expanded in
//! continued fractions ([`cf`]). On top of the expansions sit the sums
//! `Φ`, `Φ_n`, `Φ_trunc`, `Φ̃` ([`brjuno`]), parabolic data of `P_{p/q}^{∘q}`
//! ([`series`]), the linearizing series and conformal radius of the Siegel
//! disk ([`linearization`]), periodic points and exploding cycles
//! ([`dynamics`]) and the extension `Υ` that ties them together
//! ([`upsilon`]).

pub mod brjuno;
pub mod cf;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod extended;
pub mod grid;
pub mod linearization;
pub mod precision;
pub mod series;
pub mod upsilon;

pub use cf::{AlphaSpec, CFExpansion, CfFlavor, Rational};
pub use error::{Error, Result};

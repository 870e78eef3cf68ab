//! Ergodic secrecy rate of a downlink LEO satellite network.
//!
//! Satellites, and the eavesdroppers listening to them, are homogeneous
//! Poisson point processes on two concentric spheres. A typical user on the
//! Earth is served by its nearest visible satellite, and the eavesdropper
//! nearest to that satellite (inside the satellite's beam footprint) tries to
//! decode the same downlink. Both links see Shadowed-Rician fading with an
//! integer Nakagami parameter, which makes every conditional probability a
//! finite series.
//!
//! The crate has two independent routes to the same numbers:
//!
//! * [`analysis`] evaluates the exact expression: a closed-form Laplace
//!   transform (and its derivatives) of the eavesdropper link, nested over the
//!   two truncated-Rayleigh distance laws and integrated over the rate
//!   threshold.
//! * [`montecarlo`] samples whole constellations, fading, and per-realization
//!   secrecy rates, with reproducible parallel random streams.
//!
//! All lengths are meters and all powers are linear inside the crate;
//! conversions from km / dB live at the configuration boundary.

pub mod analysis;
pub mod channel;
mod error;
pub mod geometry;
pub mod montecarlo;
pub mod numerics;

pub use analysis::{CcdfCurve, SecrecyScenario};
pub use channel::{Alignment, LinkBudget, LinkBudgetParams, ShadowedRician};
pub use error::{Error, Result};
pub use geometry::{GeometryParams, NetworkGeometry};
pub use montecarlo::{McEstimate, Realization, SamplingMode};
pub use numerics::QuadratureSpec;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Mean Earth radius used when a configuration does not override it, m.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

//! Bohmian trajectories of a three-state superposition of the isotropic 2D
//! harmonic oscillator.
//!
//! The crate covers the wave function and its velocity field ([`wavefield`]),
//! reduction to canonical form ([`canonical`]), adaptive Runge-Kutta-Fehlberg
//! 7(8) integration ([`integrator`]), the analytic results for the circular
//! vortex and the autonomous case together with numerical indicators
//! ([`analysis`]), batch stroboscopic sections ([`sections`]) and the
//! acceptance checks ([`verify`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.

pub mod analysis;
pub mod canonical;
pub mod error;
pub mod extended;
pub mod integrator;
pub mod model;
pub mod sections;
pub mod verify;
pub mod wavefield;

pub use canonical::{canonicalize, CanonicalTransform, Direction};
pub use error::{Error, Result};
pub use integrator::{IntegratorConfig, StroboscopicOrbit, Trajectory, TrajectoryStatus};
pub use model::{preset, presets, Field, Model, Preset};
pub use wavefield::{CanonicalCoefficients, GeneralCoefficients, PlanarState, VelocityField, VortexEllipse};

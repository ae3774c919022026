//! Analytic results for the circular-vortex and autonomous cases, and the
//! numerical indicators used to check them.

mod action;
mod autonomous;
mod lyapunov;
mod periodic;
mod reduced;
mod reversibility;
mod rotation;

pub use action::{
    autonomous_vortex_h, autonomous_vortex_series, average_over_period, EllipticActionExpansion, VortexActionExpansion,
    AVERAGE_NODES,
};
pub use autonomous::{autonomous_frequency, autonomous_solution, return_time};
pub use lyapunov::{lyapunov_exponent, sections_with_lyapunov, LyapunovConfig, LyapunovEstimate};
pub use periodic::{
    eigenvalues2, fundamental_solution, monodromy, orbit_closure, orbit_closure_extended, orbit_monodromy,
    periodic_orbits, variational_matrix, ClosureEstimate, MonodromyResult, OrbitKind, PeriodicOrbit, VariationalSystem,
};
pub use reduced::{first_integral_h2, hamiltonian_h, ReducedCircleField};
pub use reversibility::{reflect, reversibility_residual};
pub use rotation::{comoving_frequency, enclosed_area_action, rotation_number, vortex_ic_for_level, RotationNumber};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficients are not normalized: |A|^2+|B|^2+|C|^2 = {norm_sq} (tolerance {tolerance:e})")]
    Normalization { norm_sq: f64, tolerance: f64 },

    #[error("degenerate coefficients: BC - EF = {value} (the vortex is not unique)")]
    NonDegeneracy { value: f64 },

    #[error("invalid canonical coefficients: {0}")]
    InvalidCanonical(String),

    #[error("denominator V = {denominator:e} at ({x}, {y}, t = {t}) is within the vortex guard")]
    Singularity { x: f64, y: f64, t: f64, denominator: f64 },

    #[error("vortex position is undefined: |B|^2 = |C|^2 in the complexified form")]
    DegenerateVortex,

    #[error("degenerate parameter: {0}")]
    Degenerate(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("orbit does not wind consistently around ({cx}, {cy})")]
    NonRotating { cx: f64, cy: f64 },

    #[error("trajectory entered the singularity radius of the vortex at t = {t}")]
    SingularityAbort { t: f64 },

    #[error("step limit of {max_steps} exceeded at t = {t}")]
    StepLimitExceeded { t: f64, max_steps: usize },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("invalid integrator configuration: {0}")]
    Config(String),
}

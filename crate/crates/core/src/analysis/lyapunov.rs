use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{
    section_times, IntegratorConfig, JacobianMode, Stepper, StroboscopicOrbit, TangentSystem, TrajectoryStatus,
};
use crate::wavefield::{PlanarState, VelocityField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    /// Length of the averaging window, after the transient.
    pub total_time: f64,
    pub renorm_interval: f64,
    /// Initial time excluded from the average while the tangent vector aligns.
    pub transient: f64,
    pub jacobian: JacobianMode,
}

impl LyapunovConfig {
    pub fn new(total_time: f64) -> Self {
        Self { total_time, renorm_interval: TAU, transient: 0.0, jacobian: JacobianMode::FiniteDifference }
    }

    pub fn with_transient(self, transient: f64) -> Self {
        Self { transient, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub exponent: f64,
    /// Time over which growth was averaged.
    pub averaged_time: f64,
    pub renormalizations: usize,
}

/// Largest Lyapunov exponent by tangent-vector renormalization.
pub fn lyapunov_exponent<F: VelocityField>(
    field: F,
    ic: PlanarState,
    lcfg: &LyapunovConfig,
    cfg: &IntegratorConfig,
) -> Result<LyapunovEstimate> {
    if !(lcfg.total_time > 0.0 && lcfg.renorm_interval > 0.0 && lcfg.transient >= 0.0) {
        return Err(Error::Config(format!("invalid Lyapunov configuration {lcfg:?}")));
    }
    let system = TangentSystem { field, mode: lcfg.jacobian, singularity_radius: cfg.singularity_radius };
    let mut stepper = Stepper::new(system, ic.t, [ic.x, ic.y, 1.0, 0.0, 0.0, 1.0], *cfg)?;
    let start = ic.t + lcfg.transient;
    let end = start + lcfg.total_time;
    let mut v = [std::f64::consts::FRAC_1_SQRT_2; 2];
    let mut sum = 0.0;
    let mut renormalizations = 0;
    let mut k = 1u64;
    loop {
        let target = (ic.t + k as f64 * lcfg.renorm_interval).min(end);
        let from = stepper.time();
        stepper.advance_to(target, |_, _| {})?;
        let s = *stepper.state();
        let w = [s[2] * v[0] + s[3] * v[1], s[4] * v[0] + s[5] * v[1]];
        let norm = w[0].hypot(w[1]);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Degenerate(format!("tangent vector norm {norm} at t = {target}")));
        }
        if from >= start {
            sum += norm.ln();
        }
        renormalizations += 1;
        v = [w[0] / norm, w[1] / norm];
        stepper.set_state([s[0], s[1], 1.0, 0.0, 0.0, 1.0]);
        if target >= end {
            break;
        }
        k += 1;
    }
    Ok(LyapunovEstimate { exponent: sum / lcfg.total_time, averaged_time: lcfg.total_time, renormalizations })
}

/// Stroboscopic orbit together with the Lyapunov exponent accumulated over
/// the same integration, renormalizing once per section.
///
/// The exponent is `None` when the orbit stops before its first section.
pub fn sections_with_lyapunov<F: VelocityField>(
    field: F,
    ic: PlanarState,
    n_sections: usize,
    mode: JacobianMode,
    cfg: &IntegratorConfig,
) -> (StroboscopicOrbit, Option<LyapunovEstimate>) {
    let mut points = Vec::with_capacity(n_sections);
    let mut sum = 0.0;
    let system = TangentSystem { field, mode, singularity_radius: cfg.singularity_radius };
    let outcome = Stepper::new(system, ic.t, [ic.x, ic.y, 1.0, 0.0, 0.0, 1.0], *cfg).and_then(|mut stepper| {
        let mut v = [std::f64::consts::FRAC_1_SQRT_2; 2];
        for target in section_times(ic.t, n_sections) {
            stepper.advance_to(target, |_, _| {})?;
            let s = *stepper.state();
            let w = [s[2] * v[0] + s[3] * v[1], s[4] * v[0] + s[5] * v[1]];
            let norm = w[0].hypot(w[1]);
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::Degenerate(format!("tangent vector norm {norm} at t = {target}")));
            }
            sum += norm.ln();
            points.push([s[0], s[1]]);
            v = [w[0] / norm, w[1] / norm];
            stepper.set_state([s[0], s[1], 1.0, 0.0, 0.0, 1.0]);
        }
        Ok(())
    });
    let status = outcome.as_ref().err().map_or(TrajectoryStatus::Completed, TrajectoryStatus::from_error);
    let estimate = (!points.is_empty()).then(|| {
        let averaged_time = points.len() as f64 * TAU;
        LyapunovEstimate { exponent: sum / averaged_time, averaged_time, renormalizations: points.len() }
    });
    (StroboscopicOrbit { ic, points, status }, estimate)
}

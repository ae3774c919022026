//! Adaptive Runge-Kutta-Fehlberg 7(8) integration.
//!
//! The pair propagates the eighth-order solution and uses the difference to the
//! seventh-order one, `41/840 (k1 + k11 - k12 - k13) h`, as the local error
//! estimate. Steps are clamped so that every requested output time is hit
//! exactly; there is no dense output.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::{PlanarState, VelocityField};

const STAGES: usize = 13;

const NODES: [f64; STAGES] = [
    0.0,
    2.0 / 27.0,
    1.0 / 9.0,
    1.0 / 6.0,
    5.0 / 12.0,
    1.0 / 2.0,
    5.0 / 6.0,
    1.0 / 6.0,
    2.0 / 3.0,
    1.0 / 3.0,
    1.0,
    0.0,
    1.0,
];

#[rustfmt::skip]
const COUPLING: [[f64; STAGES - 1]; STAGES] = [
    [0.0; 12],
    [2.0 / 27.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 36.0, 1.0 / 12.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 24.0, 0.0, 1.0 / 8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0, 0.0, 0.0, 0.0, 0.0],
    [-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0, -19.0 / 60.0, 17.0 / 6.0, -1.0 / 12.0, 0.0, 0.0, 0.0],
    [2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -301.0 / 82.0, 2133.0 / 4100.0, 45.0 / 82.0, 45.0 / 164.0, 18.0 / 41.0, 0.0, 0.0],
    [3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0, 3.0 / 41.0, 6.0 / 41.0, 0.0, 0.0],
    [-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -289.0 / 82.0, 2193.0 / 4100.0, 51.0 / 82.0, 33.0 / 164.0, 12.0 / 41.0, 0.0, 1.0],
];

/// Eighth-order weights.
const WEIGHTS: [f64; STAGES] = [
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    34.0 / 105.0,
    9.0 / 35.0,
    9.0 / 35.0,
    9.0 / 280.0,
    9.0 / 280.0,
    0.0,
    41.0 / 840.0,
    41.0 / 840.0,
];

const ERROR_WEIGHT: f64 = 41.0 / 840.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Cap on attempted steps (accepted and rejected) per integration.
    pub max_steps: usize,
    /// Trajectories closer than this to the vortex are aborted.
    pub singularity_radius: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-13,
            h_max: 0.25,
            max_steps: 50_000_000,
            singularity_radius: 1e-6,
        }
    }
}

impl IntegratorConfig {
    /// Default configuration with both tolerances set to `tol`.
    pub fn with_tolerance(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: tol, ..Self::default() }
    }

    /// Every step of size `h` is accepted; used for convergence studies.
    pub fn fixed_step(h: f64) -> Self {
        Self { abs_tol: f64::MAX, rel_tol: 0.0, h_init: h, h_min: h, h_max: h, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.rel_tol >= 0.0
            && self.h_min > 0.0
            && self.h_min <= self.h_init
            && self.h_init <= self.h_max
            && self.h_max.is_finite()
            && self.max_steps > 0
            && self.singularity_radius >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("{self:?}")))
        }
    }
}

/// A first-order system `y' = f(t, y)` in `N` real components.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]>;

    /// Leading components that enter the local error norm.
    fn error_components(&self) -> usize {
        N
    }

    /// Rejects an accepted state, e.g. one inside the singularity radius.
    fn check(&self, _t: f64, _y: &[f64; N]) -> Result<()> {
        Ok(())
    }
}

/// Step-by-step driver that keeps its step size between calls.
#[derive(Debug, Clone)]
pub struct Stepper<const N: usize, S> {
    system: S,
    cfg: IntegratorConfig,
    t: f64,
    y: [f64; N],
    h: f64,
    attempts: usize,
}

impl<const N: usize, S: OdeSystem<N>> Stepper<N, S> {
    pub fn new(system: S, t0: f64, y0: [f64; N], cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        system.check(t0, &y0)?;
        Ok(Self { system, cfg, t: t0, y: y0, h: cfg.h_init, attempts: 0 })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[f64; N] {
        &self.y
    }

    /// Replaces the state in place, e.g. to renormalize tangent components.
    pub fn set_state(&mut self, y: [f64; N]) {
        self.y = y;
    }

    pub fn attempts(&self) -> usize {
        self.attempts
    }

    pub fn system(&self) -> &S {
        &self.system
    }

    /// Integrates to exactly `target`, calling `on_step` after every accepted step.
    pub fn advance_to<O: FnMut(f64, &[f64; N])>(&mut self, target: f64, mut on_step: O) -> Result<()> {
        if !target.is_finite() {
            return Err(Error::Config(format!("non-finite target time {target}")));
        }
        let dir = if target >= self.t { 1.0 } else { -1.0 };
        let mut h = self.h;
        while self.t != target {
            if self.attempts >= self.cfg.max_steps {
                return Err(Error::StepLimitExceeded { t: self.t, max_steps: self.cfg.max_steps });
            }
            self.attempts += 1;
            let remaining = (target - self.t) * dir;
            let (h_step, last) = if h >= remaining { (remaining, true) } else { (h, false) };

            let singular = match self.attempt(dir * h_step) {
                Ok((y_new, err)) if err <= 1.0 => {
                    self.t = if last { target } else { self.t + dir * h_step };
                    self.y = y_new;
                    self.system.check(self.t, &self.y)?;
                    on_step(self.t, &self.y);
                    let proposed = (h_step * growth(err)).min(self.cfg.h_max);
                    h = if last { h.max(proposed).min(self.cfg.h_max) } else { proposed };
                    continue;
                }
                Ok((_, err)) => {
                    h = h_step * growth(err).min(1.0);
                    false
                }
                Err(Error::Singularity { .. }) => {
                    h = h_step * 0.5;
                    true
                }
                Err(e) => return Err(e),
            };
            if h < self.cfg.h_min.min(remaining) {
                return Err(if singular {
                    Error::SingularityAbort { t: self.t }
                } else {
                    Error::StepUnderflow { t: self.t, h }
                });
            }
        }
        self.h = h;
        Ok(())
    }

    fn attempt(&self, h: f64) -> Result<([f64; N], f64)> {
        let mut k = [[0.0; N]; STAGES];
        for stage in 0..STAGES {
            let mut y = self.y;
            for (j, &a) in COUPLING[stage].iter().enumerate().take(stage) {
                if a != 0.0 {
                    for i in 0..N {
                        y[i] += h * a * k[j][i];
                    }
                }
            }
            k[stage] = self.system.rhs(self.t + NODES[stage] * h, &y)?;
        }

        let mut y_new = self.y;
        for (stage, &w) in WEIGHTS.iter().enumerate() {
            if w != 0.0 {
                for i in 0..N {
                    y_new[i] += h * w * k[stage][i];
                }
            }
        }

        let mut err = 0.0f64;
        for i in 0..self.system.error_components().min(N) {
            let estimate = (ERROR_WEIGHT * h * (k[0][i] + k[10][i] - k[11][i] - k[12][i])).abs();
            let scale = self.cfg.abs_tol + self.cfg.rel_tol * self.y[i].abs().max(y_new[i].abs());
            err = err.max(estimate / scale);
        }
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            err = f64::INFINITY;
        }
        Ok((y_new, err))
    }
}

fn growth(err: f64) -> f64 {
    if err == 0.0 {
        MAX_FACTOR
    } else if !err.is_finite() {
        MIN_FACTOR
    } else {
        (SAFETY * err.powf(-1.0 / 8.0)).clamp(MIN_FACTOR, MAX_FACTOR)
    }
}

fn check_vortex<F: VelocityField>(field: &F, radius: f64, t: f64, x: f64, y: f64) -> Result<()> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::SingularityAbort { t });
    }
    if let Some([vx, vy]) = field.vortex(t) {
        if (x - vx).hypot(y - vy) < radius {
            return Err(Error::SingularityAbort { t });
        }
    }
    Ok(())
}

/// Position dynamics `r' = X(r, t)`.
#[derive(Debug, Clone, Copy)]
pub struct PositionSystem<F> {
    pub field: F,
    pub singularity_radius: f64,
}

impl<F: VelocityField> OdeSystem<2> for PositionSystem<F> {
    fn rhs(&self, t: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
        self.field.velocity(y[0], y[1], t)
    }

    fn check(&self, t: f64, y: &[f64; 2]) -> Result<()> {
        check_vortex(&self.field, self.singularity_radius, t, y[0], y[1])
    }
}

/// Source of the Jacobian in tangent-flow integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

/// Central-difference Jacobian with step `1e-7 max(1, |r|)`.
pub fn finite_difference_jacobian<F: VelocityField + ?Sized>(
    field: &F,
    x: f64,
    y: f64,
    t: f64,
) -> Result<[[f64; 2]; 2]> {
    let h = 1e-7 * x.hypot(y).max(1.0);
    let [u_xp, v_xp] = field.velocity(x + h, y, t)?;
    let [u_xm, v_xm] = field.velocity(x - h, y, t)?;
    let [u_yp, v_yp] = field.velocity(x, y + h, t)?;
    let [u_ym, v_ym] = field.velocity(x, y - h, t)?;
    let s = 0.5 / h;
    Ok([[(u_xp - u_xm) * s, (u_yp - u_ym) * s], [(v_xp - v_xm) * s, (v_yp - v_ym) * s]])
}

/// Position plus the fundamental matrix `M' = J(r, t) M`, stored row-major
/// after the two position components.
#[derive(Debug, Clone, Copy)]
pub struct TangentSystem<F> {
    pub field: F,
    pub mode: JacobianMode,
    pub singularity_radius: f64,
}

impl<F: VelocityField> TangentSystem<F> {
    fn jacobian(&self, x: f64, y: f64, t: f64) -> Result<[[f64; 2]; 2]> {
        match self.mode {
            JacobianMode::Analytic => self
                .field
                .jacobian(x, y, t)
                .unwrap_or_else(|| Err(Error::Config("field has no analytic Jacobian".into()))),
            JacobianMode::FiniteDifference => finite_difference_jacobian(&self.field, x, y, t),
        }
    }
}

impl<F: VelocityField> OdeSystem<6> for TangentSystem<F> {
    fn rhs(&self, t: f64, s: &[f64; 6]) -> Result<[f64; 6]> {
        let [u, v] = self.field.velocity(s[0], s[1], t)?;
        let j = self.jacobian(s[0], s[1], t)?;
        let m = [[s[2], s[3]], [s[4], s[5]]];
        Ok([
            u,
            v,
            j[0][0] * m[0][0] + j[0][1] * m[1][0],
            j[0][0] * m[0][1] + j[0][1] * m[1][1],
            j[1][0] * m[0][0] + j[1][1] * m[1][0],
            j[1][0] * m[0][1] + j[1][1] * m[1][1],
        ])
    }

    fn error_components(&self) -> usize {
        // Finite-difference noise in the matrix would defeat step control.
        match self.mode {
            JacobianMode::Analytic => 6,
            JacobianMode::FiniteDifference => 2,
        }
    }

    fn check(&self, t: f64, s: &[f64; 6]) -> Result<()> {
        check_vortex(&self.field, self.singularity_radius, t, s[0], s[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Completed,
    HitSingularity,
    StepLimit,
    StepUnderflow,
    Failed,
}

impl TrajectoryStatus {
    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::SingularityAbort { .. } | Error::Singularity { .. } => Self::HitSingularity,
            Error::StepLimitExceeded { .. } => Self::StepLimit,
            Error::StepUnderflow { .. } => Self::StepUnderflow,
            _ => Self::Failed,
        }
    }
}

/// Accepted integration steps, starting with the initial condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<PlanarState>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn last(&self) -> PlanarState {
        *self.samples.last().expect("a trajectory holds at least its initial condition")
    }
}

/// Section points at `t0 + 2 pi n`, `n = 1..`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StroboscopicOrbit {
    pub ic: PlanarState,
    pub points: Vec<[f64; 2]>,
    pub status: TrajectoryStatus,
}

fn position_stepper<F: VelocityField>(
    field: F,
    ic: PlanarState,
    cfg: &IntegratorConfig,
) -> Result<Stepper<2, PositionSystem<F>>> {
    let system = PositionSystem { field, singularity_radius: cfg.singularity_radius };
    Stepper::new(system, ic.t, [ic.x, ic.y], *cfg)
}

/// Integrates to `t_end`, keeping a partial trajectory if integration fails.
pub fn integrate_partial<F: VelocityField>(
    field: F,
    ic: PlanarState,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> (Trajectory, Option<Error>) {
    let mut samples = vec![ic];
    let outcome = position_stepper(field, ic, cfg)
        .and_then(|mut stepper| stepper.advance_to(t_end, |t, y| samples.push(PlanarState::new(y[0], y[1], t))));
    let status = match &outcome {
        Ok(()) => TrajectoryStatus::Completed,
        Err(e) => TrajectoryStatus::from_error(e),
    };
    (Trajectory { samples, status }, outcome.err())
}

/// Integrates from `ic` to `t_end` (either direction).
pub fn integrate<F: VelocityField>(
    field: F,
    ic: PlanarState,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    match integrate_partial(field, ic, t_end, cfg) {
        (trajectory, None) => Ok(trajectory),
        (_, Some(e)) => Err(e),
    }
}

/// End state at `t_end`.
pub fn flow<F: VelocityField>(field: F, ic: PlanarState, t_end: f64, cfg: &IntegratorConfig) -> Result<PlanarState> {
    let mut stepper = position_stepper(field, ic, cfg)?;
    stepper.advance_to(t_end, |_, _| {})?;
    let y = stepper.state();
    Ok(PlanarState::new(y[0], y[1], t_end))
}

/// States at each of `times`, which must be monotone away from `ic.t`.
/// On failure the states reached so far are returned with the error.
pub fn states_at<F: VelocityField>(
    field: F,
    ic: PlanarState,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> (Vec<PlanarState>, Option<Error>) {
    let mut out = Vec::with_capacity(times.len());
    let mut stepper = match position_stepper(field, ic, cfg) {
        Ok(s) => s,
        Err(e) => return (out, Some(e)),
    };
    for &t in times {
        if let Err(e) = stepper.advance_to(t, |_, _| {}) {
            return (out, Some(e));
        }
        let y = stepper.state();
        out.push(PlanarState::new(y[0], y[1], t));
    }
    (out, None)
}

/// Section times `t0 + 2 pi n` for `n = 1..=count`, computed without accumulation.
pub fn section_times(t0: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|n| t0 + n as f64 * TAU).collect()
}

pub fn stroboscopic<F: VelocityField>(
    field: F,
    ic: PlanarState,
    n_sections: usize,
    cfg: &IntegratorConfig,
) -> StroboscopicOrbit {
    let (states, err) = states_at(field, ic, &section_times(ic.t, n_sections), cfg);
    StroboscopicOrbit {
        ic,
        points: states.iter().map(|s| [s.x, s.y]).collect(),
        status: err.as_ref().map_or(TrajectoryStatus::Completed, TrajectoryStatus::from_error),
    }
}

/// Trajectory together with the fundamental matrix at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentTrajectory {
    pub trajectory: Trajectory,
    pub matrices: Vec<[[f64; 2]; 2]>,
}

impl TangentTrajectory {
    pub fn final_matrix(&self) -> [[f64; 2]; 2] {
        *self.matrices.last().expect("at least the initial identity")
    }
}

pub const IDENTITY: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

fn unpack(t: f64, s: &[f64; 6]) -> (PlanarState, [[f64; 2]; 2]) {
    (PlanarState::new(s[0], s[1], t), [[s[2], s[3]], [s[4], s[5]]])
}

pub fn integrate_tangent<F: VelocityField>(
    field: F,
    ic: PlanarState,
    t_end: f64,
    cfg: &IntegratorConfig,
    mode: JacobianMode,
) -> Result<TangentTrajectory> {
    let system = TangentSystem { field, mode, singularity_radius: cfg.singularity_radius };
    let mut stepper = Stepper::new(system, ic.t, [ic.x, ic.y, 1.0, 0.0, 0.0, 1.0], *cfg)?;
    let mut samples = vec![ic];
    let mut matrices = vec![IDENTITY];
    stepper.advance_to(t_end, |t, s| {
        let (p, m) = unpack(t, s);
        samples.push(p);
        matrices.push(m);
    })?;
    Ok(TangentTrajectory { trajectory: Trajectory { samples, status: TrajectoryStatus::Completed }, matrices })
}

pub fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    use super::*;
    use crate::model::preset;
    use crate::wavefield::CanonicalCoefficients;

    fn autonomous() -> CanonicalCoefficients {
        CanonicalCoefficients::new(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap()
    }

    fn circular(a: f64) -> CanonicalCoefficients {
        CanonicalCoefficients::from_semi_axes(a, a).unwrap()
    }

    fn elliptic_amplitude(a: f64) -> f64 {
        (-a + (a * a + 4.0).sqrt()) / 2.0
    }

    #[test]
    fn unit_circle_follows_analytic_solution() {
        let cfg = IntegratorConfig::default();
        let tr = integrate(autonomous(), PlanarState::new(1.0, 0.0, 0.0), TAU, &cfg).unwrap();
        for s in &tr.samples {
            assert!((s.x - s.t.cos()).abs() < 1e-10 && (s.y - s.t.sin()).abs() < 1e-10, "{s:?}");
        }
        let end = tr.last();
        assert_eq!(end.t, TAU);
        assert!((end.x - 1.0).abs() < 1e-10 && end.y.abs() < 1e-10);
    }

    #[test]
    fn zero_interval_returns_ic() {
        let ic = PlanarState::new(0.3, -0.2, 1.5);
        let tr = integrate(autonomous(), ic, 1.5, &IntegratorConfig::default()).unwrap();
        assert_eq!(tr.samples, vec![ic]);
        assert_eq!(tr.status, TrajectoryStatus::Completed);
    }

    #[test]
    fn forward_then_backward_returns() {
        let field = preset("fig2-right").unwrap().model.field().unwrap();
        let cfg = IntegratorConfig::default();
        let ic = PlanarState::new(0.5, 0.3, 0.0);
        let there = flow(field, ic, 10.0 * PI, &cfg).unwrap();
        let back = flow(field, there, 0.0, &cfg).unwrap();
        assert!((back.x - ic.x).hypot(back.y - ic.y) < 1e-9, "{back:?}");
    }

    #[test]
    fn half_turn_per_section_at_radius_sqrt2() {
        let orbit = stroboscopic(autonomous(), PlanarState::new(SQRT_2, 0.0, 0.0), 3, &IntegratorConfig::default());
        assert_eq!(orbit.points.len(), 3);
        let [x, y] = orbit.points[0];
        assert!((x + SQRT_2).abs() < 1e-9 && y.abs() < 1e-9);
        let [x, y] = orbit.points[1];
        assert!((x - SQRT_2).abs() < 1e-9 && y.abs() < 1e-9);
    }

    #[test]
    fn elliptic_orbit_is_a_fixed_point_of_the_section() {
        let a_plus = elliptic_amplitude(0.4);
        assert!((a_plus - 0.8198039).abs() < 1e-7);
        let orbit = stroboscopic(circular(0.4), PlanarState::new(a_plus, 0.0, 0.0), 20, &IntegratorConfig::default());
        assert_eq!(orbit.status, TrajectoryStatus::Completed);
        for [x, y] in orbit.points {
            assert!((x - a_plus).abs() < 1e-8 && y.abs() < 1e-8, "({x}, {y})");
        }
    }

    #[test]
    fn empty_section_request() {
        let orbit = stroboscopic(autonomous(), PlanarState::new(1.0, 0.0, 0.0), 0, &IntegratorConfig::default());
        assert!(orbit.points.is_empty());
        assert_eq!(orbit.status, TrajectoryStatus::Completed);
    }

    #[test]
    fn section_times_are_exact() {
        let field = circular(0.4);
        let times = section_times(0.0, 50);
        let (states, err) = states_at(field, PlanarState::new(0.3, 0.2, 0.0), &times, &IntegratorConfig::default());
        assert!(err.is_none());
        for (n, s) in states.iter().enumerate() {
            assert_eq!(s.t, (n + 1) as f64 * TAU);
        }
    }

    #[test]
    fn vortex_encounter_aborts() {
        let field = circular(0.4);
        // Start on the vortex at t = 0.
        let (tr, err) = integrate_partial(field, PlanarState::new(-0.4, 0.0, 0.0), 1.0, &IntegratorConfig::default());
        assert!(matches!(err, Some(Error::SingularityAbort { .. })));
        assert_eq!(tr.status, TrajectoryStatus::HitSingularity);
    }

    #[test]
    fn step_limit_is_reported() {
        let cfg = IntegratorConfig { max_steps: 10, ..IntegratorConfig::default() };
        let err = integrate(autonomous(), PlanarState::new(1.0, 0.0, 0.0), 100.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::StepLimitExceeded { .. }));
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = IntegratorConfig { h_min: 1.0, h_init: 0.1, ..IntegratorConfig::default() };
        assert!(matches!(integrate(autonomous(), PlanarState::new(1.0, 0.0, 0.0), 1.0, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn tangent_at_zero_time_is_identity() {
        let tt = integrate_tangent(
            circular(0.4),
            PlanarState::new(0.5, 0.5, 0.0),
            0.0,
            &IntegratorConfig::default(),
            JacobianMode::Analytic,
        )
        .unwrap();
        assert_eq!(tt.final_matrix(), IDENTITY);
    }

    #[test]
    fn unit_determinant_on_hyperbolic_orbit() {
        let a_minus = (-0.4 - 4.16f64.sqrt()) / 2.0;
        let tt = integrate_tangent(
            circular(0.4),
            PlanarState::new(a_minus, 0.0, 0.0),
            TAU,
            &IntegratorConfig::default(),
            JacobianMode::Analytic,
        )
        .unwrap();
        assert!((det2(&tt.final_matrix()) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn analytic_and_finite_difference_tangents_agree() {
        let ic = PlanarState::new(elliptic_amplitude(0.4), 0.0, 0.0);
        let cfg = IntegratorConfig::default();
        let analytic = integrate_tangent(circular(0.4), ic, TAU, &cfg, JacobianMode::Analytic).unwrap().final_matrix();
        let fd =
            integrate_tangent(circular(0.4), ic, TAU, &cfg, JacobianMode::FiniteDifference).unwrap().final_matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((analytic[i][j] - fd[i][j]).abs() < 1e-6, "{analytic:?} vs {fd:?}");
            }
        }
    }

    fn circle_error(cfg: &IntegratorConfig) -> f64 {
        // B != C keeps the angular speed non-uniform along the orbit.
        let field = CanonicalCoefficients::new(0.0, 0.6, 0.8).unwrap();
        let end = flow(field, PlanarState::new(1.0, 0.0, 0.0), 4.0 * PI, cfg).unwrap();
        let exact = crate::analysis::autonomous_solution(0.6, 0.8, 1.0, 0.0, 4.0 * PI).unwrap();
        (end.x - exact[0]).hypot(end.y - exact[1])
    }

    #[test]
    fn eighth_order_convergence_with_fixed_steps() {
        let coarse = circle_error(&IntegratorConfig::fixed_step(0.2));
        let fine = circle_error(&IntegratorConfig::fixed_step(0.1));
        assert!(coarse / fine > 100.0, "coarse {coarse:e}, fine {fine:e}");
    }

    #[test]
    fn error_tracks_tolerance() {
        let loose = circle_error(&IntegratorConfig::with_tolerance(1e-7));
        let tight = circle_error(&IntegratorConfig::with_tolerance(1e-9));
        assert!(tight < 1e-8 && loose / tight > 10.0, "loose {loose:e}, tight {tight:e}");
    }

    #[test]
    fn bitwise_deterministic() {
        let field = preset("fig2-left").unwrap().model.field().unwrap();
        let cfg = IntegratorConfig::default();
        let ic = PlanarState::new(0.7, -0.4, 0.0);
        let a = stroboscopic(field, ic, 30, &cfg);
        let b = stroboscopic(field, ic, 30, &cfg);
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p[0].to_bits(), q[0].to_bits());
            assert_eq!(p[1].to_bits(), q[1].to_bits());
        }
    }
}

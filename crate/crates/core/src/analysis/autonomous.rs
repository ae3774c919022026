//! The `A = 0` field, where the vortex sits at the origin and every orbit is a
//! circle traversed non-uniformly.

use std::f64::consts::PI;

use crate::canonical::wrap_angle;
use crate::error::{Error, Result};
use crate::integrator::{flow, IntegratorConfig, PositionSystem, Stepper};
use crate::wavefield::{PlanarState, VelocityField};

fn check_autonomous(b: f64, c: f64, radius: f64) -> Result<()> {
    if !(b != 0.0 && c != 0.0 && b.is_finite() && c.is_finite()) {
        return Err(Error::Domain(format!("B and C must be finite and non-zero, got ({b}, {c})")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("orbit radius must be positive, got {radius}")));
    }
    Ok(())
}

/// Mean angular frequency `2BC/(alpha^2 (B^2 + C^2))` of the circle of radius `alpha`.
pub fn autonomous_frequency(b: f64, c: f64, radius: f64) -> Result<f64> {
    check_autonomous(b, c, radius)?;
    Ok(2.0 * b * c / (radius * radius * (b * b + c * c)))
}

/// Position at time `t` on the circle of radius `alpha`, with phase `beta` of
/// the auxiliary time `tau` defined by `gamma t = tau + delta sin(2BC tau + 2 beta)`.
pub fn autonomous_solution(b: f64, c: f64, radius: f64, beta: f64, t: f64) -> Result<[f64; 2]> {
    check_autonomous(b, c, radius)?;
    let norm = b * b + c * c;
    let gamma = 2.0 / (radius * radius * norm);
    let delta = (b * b - c * c) / (2.0 * norm * b * c);
    let k = 2.0 * b * c;
    assert!((k * delta).abs() < 1.0, "|2BC delta| < 1 holds for all non-zero B, C");

    // g is strictly increasing with g' >= 1 - |k delta| > 0, and its root lies
    // within |delta| of gamma t.
    let target = gamma * t;
    let g = |tau: f64| tau + delta * (k * tau + 2.0 * beta).sin() - target;
    let (mut lo, mut hi) = (target - delta.abs() - 1e-12, target + delta.abs() + 1e-12);
    let mut tau = target;
    for _ in 0..100 {
        let value = g(tau);
        if value == 0.0 {
            break;
        }
        if value > 0.0 {
            hi = tau;
        } else {
            lo = tau;
        }
        let slope = 1.0 + k * delta * (k * tau + 2.0 * beta).cos();
        let mut next = tau - value / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - tau).abs() <= 4.0 * f64::EPSILON * tau.abs().max(1.0) {
            tau = next;
            break;
        }
        tau = next;
    }
    let phase = b * c * tau + beta;
    Ok([radius * phase.cos(), radius * phase.sin()])
}

fn angle_about(center: [f64; 2], x: f64, y: f64) -> f64 {
    (y - center[1]).atan2(x - center[0])
}

/// Time, measured from `ic.t`, for the angle about the fixed point `center` to
/// advance by `turns` full revolutions in either sense.
pub fn return_time<F: VelocityField>(
    field: F,
    ic: PlanarState,
    center: [f64; 2],
    turns: u32,
    max_time: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    if turns == 0 {
        return Ok(0.0);
    }
    let system = PositionSystem { field: &field, singularity_radius: cfg.singularity_radius };
    let mut stepper = Stepper::new(system, ic.t, [ic.x, ic.y], *cfg)?;
    let goal = 2.0 * PI * turns as f64;
    let chunk = 0.5;

    let mut unwrapped = 0.0;
    let mut prev = (ic.t, [ic.x, ic.y], angle_about(center, ic.x, ic.y));
    let mut bracket = None;
    while bracket.is_none() {
        let target = stepper.time() + chunk;
        if target - ic.t > max_time {
            return Err(Error::Degenerate(format!("no return within time {max_time}")));
        }
        let mut steps = Vec::new();
        stepper.advance_to(target, |t, y| steps.push((t, *y)))?;
        for (t, y) in steps {
            let angle = angle_about(center, y[0], y[1]);
            let next = unwrapped + wrap_angle(angle - prev.2);
            if next.abs() >= goal {
                bracket = Some((prev, unwrapped, t, next));
                break;
            }
            unwrapped = next;
            prev = (t, y, angle);
        }
    }

    // Newton on the time from the last state before the crossing.
    let ((t_a, r_a, angle_a), unwrapped_a, t_b, unwrapped_b) = bracket.expect("loop exits with a bracket");
    let sign = unwrapped_b.signum();
    let remaining = sign * goal - unwrapped_a;
    let start = PlanarState::new(r_a[0], r_a[1], t_a);
    let mut dt = (t_b - t_a) * remaining / (unwrapped_b - unwrapped_a);
    for _ in 0..50 {
        let s = flow(&field, start, t_a + dt, cfg)?;
        let advanced = wrap_angle(angle_about(center, s.x, s.y) - angle_a);
        let [u, v] = field.velocity(s.x, s.y, s.t)?;
        let (dx, dy) = (s.x - center[0], s.y - center[1]);
        let rate = (dx * v - dy * u) / (dx * dx + dy * dy);
        let correction = (advanced - remaining) / rate;
        dt -= correction;
        if correction.abs() <= 1e-15 * (t_a + dt).abs().max(1.0) {
            break;
        }
    }
    Ok(t_a + dt - ic.t)
}

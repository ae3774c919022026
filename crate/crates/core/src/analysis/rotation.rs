//! Rotation numbers of stroboscopic orbits and vortex-centred frequencies.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::reduced::ReducedCircleField;
use crate::canonical::wrap_angle;
use crate::error::{Error, Result};
use crate::integrator::{IntegratorConfig, OdeSystem, Stepper};
use crate::wavefield::{PlanarState, VelocityField};

/// Mean angle advanced per section about a centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationNumber {
    /// In `[0, 2 pi)`.
    pub value: f64,
    /// Difference to the estimate from the first half of the orbit.
    pub error: f64,
    pub samples: usize,
}

/// Smooth weights vanishing to all orders at both ends; they make the
/// average converge faster than any power of `1/N` on quasi-periodic orbits.
fn bump_weights(n: usize) -> Vec<f64> {
    let w: Vec<f64> = (1..=n)
        .map(|k| {
            let s = k as f64 / (n + 1) as f64;
            (-1.0 / (s * (1.0 - s))).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

fn weighted_mean_increment(increments: &[f64]) -> f64 {
    let (s, c) = increments.iter().fold((0.0, 0.0), |(s, c), d| (s + d.sin(), c + d.cos()));
    let centre = s.atan2(c);
    bump_weights(increments.len()).iter().zip(increments).map(|(w, d)| w * (centre + wrap_angle(d - centre))).sum()
}

/// Weighted Birkhoff average of the angle increments of `points` about `center`.
///
/// Fails with [`Error::NonRotating`] when the points do not surround the
/// centre (an angular gap wider than a half turn), including fixed points.
pub fn rotation_number(points: &[[f64; 2]], center: [f64; 2]) -> Result<RotationNumber> {
    let non_rotating = Error::NonRotating { cx: center[0], cy: center[1] };
    if points.len() < 4 {
        return Err(non_rotating);
    }
    let mut angles = Vec::with_capacity(points.len());
    for p in points {
        let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
        if dx.hypot(dy) < 1e-12 || !dx.is_finite() || !dy.is_finite() {
            return Err(non_rotating);
        }
        angles.push(dy.atan2(dx));
    }

    let mut sorted = angles.clone();
    sorted.sort_by(f64::total_cmp);
    let widest = sorted.windows(2).map(|w| w[1] - w[0]).fold(TAU - (sorted[sorted.len() - 1] - sorted[0]), f64::max);
    if widest > PI + 1e-9 {
        return Err(non_rotating);
    }

    let increments: Vec<f64> = angles.windows(2).map(|w| wrap_angle(w[1] - w[0])).collect();
    let full = weighted_mean_increment(&increments);
    let half = weighted_mean_increment(&increments[..increments.len() / 2]);
    Ok(RotationNumber { value: full.rem_euclid(TAU), error: wrap_angle(full - half).abs(), samples: points.len() })
}

/// Position plus the unwrapped angle about the moving vortex.
struct ComovingSystem {
    field: ReducedCircleField,
    singularity_radius: f64,
}

impl OdeSystem<3> for ComovingSystem {
    fn rhs(&self, t: f64, y: &[f64; 3]) -> Result<[f64; 3]> {
        let [u, v] = self.field.velocity(y[0], y[1], t)?;
        let (st, ct) = t.sin_cos();
        let a = self.field.a;
        let (dx, dy) = (y[0] + a * ct, y[1] + a * st);
        let (du, dv) = (u - a * st, v + a * ct);
        Ok([u, v, (dx * dv - dy * du) / (dx * dx + dy * dy)])
    }

    fn error_components(&self) -> usize {
        2
    }

    fn check(&self, t: f64, y: &[f64; 3]) -> Result<()> {
        let [vx, vy] = self.field.vortex(t).expect("reduced field has a vortex");
        if (y[0] - vx).hypot(y[1] - vy) < self.singularity_radius || !y.iter().all(|v| v.is_finite()) {
            return Err(Error::SingularityAbort { t });
        }
        Ok(())
    }
}

/// Mean angular velocity about the moving vortex over `periods` field periods.
pub fn comoving_frequency(
    field: ReducedCircleField,
    ic: PlanarState,
    periods: usize,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let system = ComovingSystem { field, singularity_radius: cfg.singularity_radius };
    let mut stepper = Stepper::new(system, ic.t, [ic.x, ic.y, 0.0], *cfg)?;
    let span = periods as f64 * TAU;
    stepper.advance_to(ic.t + span, |_, _| {})?;
    Ok(stepper.state()[2] / span)
}

/// Solves `u exp(-u) = level` on the branch `u < 1`.
fn small_root(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < (-1.0f64).exp()) {
        return Err(Error::Domain(format!("level {level} has no root below the separatrix")));
    }
    let mut u = level;
    for _ in 0..200 {
        let next = u - (u - level * u.exp()) / (1.0 - level * u.exp());
        if (next - u).abs() <= 1e-16 * u {
            return Ok(next);
        }
        u = next;
    }
    Ok(u)
}

/// Point at `t = 0` directly above the vortex where the first integral equals `level`.
pub fn vortex_ic_for_level(a: f64, level: f64) -> Result<PlanarState> {
    // With the offset (0, d) from the vortex at t = 0 the first integral is
    // d^2 exp(-a^2 - d^2).
    let u = small_root(level * (a * a).exp())?;
    Ok(PlanarState::new(-a, u.sqrt(), 0.0))
}

/// `1/(2 pi)` times the area enclosed, at `t = 0`, by the level curve of the
/// first integral around the vortex.
pub fn enclosed_area_action(a: f64, level: f64) -> Result<f64> {
    const NODES: usize = 2048;
    let target = level.ln();
    let mut area = 0.0;
    let mut rho = (level * (a * a).exp()).sqrt();
    for k in 0..NODES {
        let c = (k as f64 * TAU / NODES as f64).cos();
        // log of the first integral along the ray: 2 ln r - a^2 + 2 a r c - r^2.
        for _ in 0..100 {
            let g = 2.0 * rho.ln() - a * a + 2.0 * a * rho * c - rho * rho - target;
            let slope = 2.0 / rho + 2.0 * a * c - 2.0 * rho;
            if !(slope > 0.0) {
                return Err(Error::Domain(format!("level {level} reaches the separatrix")));
            }
            let step = g / slope;
            rho -= step;
            if step.abs() <= 1e-15 * rho {
                break;
            }
        }
        area += 0.5 * rho * rho * TAU / NODES as f64;
    }
    Ok(area / TAU)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    use super::*;
    use crate::analysis::{first_integral_h2, VortexActionExpansion};
    use crate::integrator::stroboscopic;
    use crate::wavefield::CanonicalCoefficients;

    #[test]
    fn half_turn_orbit() {
        let field = CanonicalCoefficients::new(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        let orbit = stroboscopic(field, PlanarState::new(SQRT_2, 0.0, 0.0), 1000, &IntegratorConfig::default());
        let rot = rotation_number(&orbit.points, [0.0, 0.0]).unwrap();
        assert!((rot.value - PI).abs() < 1e-6, "{rot:?}");
    }

    #[test]
    fn irrational_rotation_converges_fast() {
        let omega = 2.0 * PI * (5f64.sqrt() - 1.0) / 2.0;
        // Non-uniform circle map conjugated to a rigid rotation.
        let points: Vec<[f64; 2]> = (0..2000)
            .map(|n| {
                let phase = n as f64 * omega;
                let warped = phase + 0.3 * phase.sin();
                [2.0 + warped.cos(), 1.0 + 0.5 * warped.sin()]
            })
            .collect();
        let rot = rotation_number(&points, [2.0, 1.0]).unwrap();
        assert!((rot.value - omega).abs() < 1e-10, "{rot:?}");
        assert!(rot.error < 1e-8);
    }

    #[test]
    fn fixed_point_is_not_rotating() {
        let points = vec![[0.5, 0.1]; 100];
        assert!(matches!(rotation_number(&points, [0.0, 0.0]), Err(Error::NonRotating { .. })));
        // Points on one side of the centre.
        let arc: Vec<[f64; 2]> = (0..100).map(|k| [1.0, 0.01 * k as f64]).collect();
        assert!(rotation_number(&arc, [0.0, 0.0]).is_err());
    }

    #[test]
    fn ic_for_level_hits_level() {
        for a in [0.2, 0.4] {
            let ic = vortex_ic_for_level(a, 1e-3).unwrap();
            let value = first_integral_h2(&ReducedCircleField::new(a), ic);
            assert!((value - 1e-3).abs() < 1e-15);
        }
    }

    #[test]
    fn enclosed_area_near_vortex() {
        // Leading order: I ~ e^{-a^2} r^2, so J ~ e^{a^2} I / 2.
        let a: f64 = 0.4;
        let j = enclosed_area_action(a, 1e-6).unwrap();
        let leading = (a * a).exp() * 1e-6 / 2.0;
        assert!((j / leading - 1.0).abs() < 1e-3);
    }

    #[test]
    fn comoving_frequency_matches_area_action_prediction() {
        let a = 0.4;
        let level = 1e-3;
        let field = ReducedCircleField::new(a);
        let measured =
            comoving_frequency(field, vortex_ic_for_level(a, level).unwrap(), 4, &IntegratorConfig::default()).unwrap();
        let d = 1e-4 * level;
        let dj =
            (enclosed_area_action(a, level + d).unwrap() - enclosed_area_action(a, level - d).unwrap()) / (2.0 * d);
        let predicted = VortexActionExpansion::new(a).dh(level).unwrap().abs() / dj;
        assert!((measured / predicted - 1.0).abs() < 1e-3, "measured {measured}, predicted {predicted}");
    }
}

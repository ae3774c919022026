use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::reduced::ReducedCircleField;
use crate::error::{Error, Result};
use crate::extended::{circular_orbit_amplitudes, integrate_reduced, DoubleDouble};
use crate::integrator::{flow, integrate_tangent, IntegratorConfig, JacobianMode, OdeSystem, Stepper};
use crate::wavefield::PlanarState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    Elliptic,
    Hyperbolic,
}

/// A circular periodic orbit `amplitude (cos t, sin t)` of the reduced field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    /// Vortex radius of the reduced field.
    pub a: f64,
    pub amplitude: f64,
    pub kind: OrbitKind,
    /// Magnitude of the characteristic exponents: real for hyperbolic orbits,
    /// imaginary for elliptic ones.
    pub exponent: f64,
}

impl PeriodicOrbit {
    pub fn position(&self, t: f64) -> [f64; 2] {
        [self.amplitude * t.cos(), self.amplitude * t.sin()]
    }

    pub fn initial_state(&self) -> PlanarState {
        PlanarState::new(self.amplitude, 0.0, 0.0)
    }

    /// Floquet multipliers over one period implied by the exponent.
    pub fn expected_multipliers(&self) -> [Complex64; 2] {
        let phase = TAU * self.exponent;
        match self.kind {
            OrbitKind::Hyperbolic => [Complex64::new(phase.exp(), 0.0), Complex64::new((-phase).exp(), 0.0)],
            OrbitKind::Elliptic => [Complex64::from_polar(1.0, phase), Complex64::from_polar(1.0, -phase)],
        }
    }
}

/// The two periodic orbits `(elliptic, hyperbolic)` of the reduced field.
///
/// Amplitudes solve `x = 1/(x + a)`. For `a < 0` the roles of the two roots swap.
pub fn periodic_orbits(a: f64) -> Result<(PeriodicOrbit, PeriodicOrbit)> {
    if a == 0.0 {
        return Err(Error::Degenerate("a = 0: both periodic orbits merge into the unit circle family".into()));
    }
    if !a.is_finite() {
        return Err(Error::Domain(format!("vortex radius must be finite, got {a}")));
    }
    let m = a.abs();
    let root = (m * m + 4.0).sqrt();
    let outer = -(m + root) / 2.0;
    // Stable form of (-m + root)/2, so that inner * outer = -1 to rounding.
    let inner = 2.0 / (m + root);
    let sign = a.signum();
    let elliptic =
        PeriodicOrbit { a, amplitude: sign * inner, kind: OrbitKind::Elliptic, exponent: (1.0 - inner.powi(4)).sqrt() };
    let hyperbolic = PeriodicOrbit {
        a,
        amplitude: sign * outer,
        kind: OrbitKind::Hyperbolic,
        exponent: (outer.powi(4) - 1.0).sqrt(),
    };
    Ok((elliptic, hyperbolic))
}

/// Coefficient matrix of the variational equations along a circular orbit of
/// amplitude `amplitude`.
pub fn variational_matrix(amplitude: f64, t: f64) -> [[f64; 2]; 2] {
    let a2 = amplitude * amplitude;
    let (s, c) = (2.0 * t).sin_cos();
    [[a2 * s, -a2 * c], [-a2 * c, -a2 * s]]
}

/// Fundamental matrix of the variational equations, stored row-major.
#[derive(Debug, Clone, Copy)]
pub struct VariationalSystem {
    pub amplitude: f64,
}

impl OdeSystem<4> for VariationalSystem {
    fn rhs(&self, t: f64, m: &[f64; 4]) -> Result<[f64; 4]> {
        let a = variational_matrix(self.amplitude, t);
        Ok([
            a[0][0] * m[0] + a[0][1] * m[2],
            a[0][0] * m[1] + a[0][1] * m[3],
            a[1][0] * m[0] + a[1][1] * m[2],
            a[1][0] * m[1] + a[1][1] * m[3],
        ])
    }
}

/// Closed-form solutions of the variational equations; `branch` selects the
/// upper (`+1`) or lower (`-1`) sign.
pub fn fundamental_solution(orbit: &PeriodicOrbit, branch: f64, t: f64) -> [f64; 2] {
    let a2 = orbit.amplitude * orbit.amplitude;
    let s = orbit.exponent;
    let (sin_t, cos_t) = t.sin_cos();
    match orbit.kind {
        OrbitKind::Hyperbolic => {
            let growth = (branch * t * s).exp();
            [growth * ((1.0 - a2) * cos_t - branch * s * sin_t), growth * ((1.0 - a2) * sin_t + branch * s * cos_t)]
        }
        OrbitKind::Elliptic => {
            let (sp, cp) = (branch * t * s).sin_cos();
            let bs = branch * s;
            [
                cp * (bs * cos_t - (1.0 + a2) * sin_t) + sp * (bs * cos_t + (1.0 + a2) * sin_t),
                cp * (bs * sin_t + (1.0 + a2) * cos_t) + sp * (bs * sin_t - (1.0 + a2) * cos_t),
            ]
        }
    }
}

/// Eigenvalues of a real 2x2 matrix, larger modulus first for real pairs and
/// non-negative imaginary part first for complex pairs.
pub fn eigenvalues2(m: &[[f64; 2]; 2]) -> [Complex64; 2] {
    let half_trace = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = half_trace * half_trace - det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        // Avoid cancellation in the smaller root.
        let big = half_trace + half_trace.signum() * root;
        let small = if big != 0.0 { det / big } else { half_trace - root };
        [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let root = (-disc).sqrt();
        [Complex64::new(half_trace, root), Complex64::new(half_trace, -root)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromyResult {
    pub orbit: PeriodicOrbit,
    pub matrix: [[f64; 2]; 2],
    pub determinant: f64,
    /// Expanding multiplier first for hyperbolic orbits; the contracting one
    /// is measured on the backward-time monodromy, where it dominates.
    pub eigenvalues: [Complex64; 2],
    /// `ln|lambda|/(2 pi)` of the expanding multiplier (hyperbolic), or the
    /// rotation angle `arg(lambda)` in `[0, pi]` divided by `2 pi` (elliptic).
    pub measured_exponent: f64,
}

fn variational_flow(amplitude: f64, t_end: f64, cfg: &IntegratorConfig) -> Result<[[f64; 2]; 2]> {
    let mut stepper = Stepper::new(VariationalSystem { amplitude }, 0.0, [1.0, 0.0, 0.0, 1.0], *cfg)?;
    stepper.advance_to(t_end, |_, _| {})?;
    let m = stepper.state();
    Ok([[m[0], m[1]], [m[2], m[3]]])
}

/// Integrates the variational equations over one period.
pub fn monodromy(orbit: &PeriodicOrbit, cfg: &IntegratorConfig) -> Result<MonodromyResult> {
    let matrix = variational_flow(orbit.amplitude, TAU, cfg)?;
    let determinant = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let forward = eigenvalues2(&matrix);
    let (eigenvalues, measured_exponent) = match orbit.kind {
        OrbitKind::Hyperbolic => {
            let backward = variational_flow(orbit.amplitude, -TAU, cfg)?;
            let contracting = eigenvalues2(&backward)[0].inv();
            ([forward[0], contracting], forward[0].norm().ln() / TAU)
        }
        OrbitKind::Elliptic => (forward, forward[0].arg().abs() / TAU),
    };
    Ok(MonodromyResult { orbit: *orbit, matrix, determinant, eigenvalues, measured_exponent })
}

/// Monodromy obtained by linearizing the reduced field along the integrated
/// orbit, independent of the closed-form variational matrix.
pub fn orbit_monodromy(orbit: &PeriodicOrbit, cfg: &IntegratorConfig) -> Result<[[f64; 2]; 2]> {
    let field = ReducedCircleField::new(orbit.a);
    Ok(integrate_tangent(field, orbit.initial_state(), TAU, cfg, JacobianMode::Analytic)?.final_matrix())
}

/// Distance between the start and the end of one period along the orbit.
pub fn orbit_closure(orbit: &PeriodicOrbit, cfg: &IntegratorConfig) -> Result<f64> {
    let end = flow(ReducedCircleField::new(orbit.a), orbit.initial_state(), TAU, cfg)?;
    Ok((end.x - orbit.amplitude).hypot(end.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureEstimate {
    pub distance: f64,
    pub steps: usize,
    /// Change of the end point under the last step halving; bounds the
    /// discretization error of the coarser run.
    pub refinement: f64,
}

/// [`orbit_closure`] in double-double precision, starting from the
/// extended-precision amplitude.
///
/// In `f64` the rounding of the amplitude alone is amplified by the expanding
/// multiplier, which exceeds `1e15` at `a = 2`. Fixed-step runs are refined by
/// doubling the step count until successive end points agree to `tolerance`.
pub fn orbit_closure_extended(orbit: &PeriodicOrbit, tolerance: f64) -> Result<ClosureEstimate> {
    const MAX_STEPS: usize = 1 << 20;
    let (inner, outer) = circular_orbit_amplitudes(orbit.a);
    let magnitude = match orbit.kind {
        OrbitKind::Elliptic => inner,
        OrbitKind::Hyperbolic => outer,
    };
    let start = if orbit.a < 0.0 { -magnitude } else { magnitude };
    let a = DoubleDouble::from_f64(orbit.a);
    let run = |steps| integrate_reduced(a, [start, DoubleDouble::ZERO], DoubleDouble::TAU, steps);

    let mut steps = 256;
    let mut previous = run(steps)?;
    loop {
        steps *= 2;
        let current = run(steps)?;
        let refinement = (current[0] - previous[0]).hypot(current[1] - previous[1]).to_f64();
        if refinement <= tolerance {
            let distance = (current[0] - start).hypot(current[1]).to_f64();
            return Ok(ClosureEstimate { distance, steps, refinement });
        }
        if steps >= MAX_STEPS {
            return Err(Error::Degenerate(format!(
                "closure did not settle: refinement {refinement:e} at {steps} steps"
            )));
        }
        previous = current;
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::canonical::wrap_angle;

    #[test]
    fn amplitudes_at_a_04() {
        let (e, h) = periodic_orbits(0.4).unwrap();
        assert!((e.amplitude - 0.8198039).abs() < 1e-7);
        assert!((h.amplitude + 1.2198039).abs() < 1e-7);
        assert!((h.exponent - 1.101776).abs() < 1e-6);
        assert!((e.exponent - 0.740480).abs() < 1e-6);
        for o in [e, h] {
            assert!((o.amplitude - 1.0 / (o.amplitude + 0.4)).abs() < 1e-15);
        }
        assert!(h.amplitude.powi(2) > 1.0 && e.amplitude.powi(2) < 1.0);
    }

    #[test]
    fn small_a_limit() {
        let (e, h) = periodic_orbits(1e-9).unwrap();
        assert!((e.amplitude - 1.0).abs() < 1e-8 && (h.amplitude + 1.0).abs() < 1e-8);
        assert!(e.exponent < 1e-4 && h.exponent < 1e-4);
        assert!(matches!(periodic_orbits(0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn negative_a_swaps_roles() {
        let (e, h) = periodic_orbits(-0.4).unwrap();
        let (e_pos, h_pos) = periodic_orbits(0.4).unwrap();
        assert_eq!(e.amplitude, -e_pos.amplitude);
        assert_eq!(h.amplitude, -h_pos.amplitude);
        // Still fixed points of x = 1/(x + a).
        for o in [e, h] {
            assert!((o.amplitude - 1.0 / (o.amplitude - 0.4)).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn vieta_product(a in 0.0f64..3.0) {
            prop_assume!(a > 0.0);
            let (e, h) = periodic_orbits(a).unwrap();
            prop_assert!((e.amplitude * h.amplitude + 1.0).abs() <= 1e-15);
            prop_assert!((e.amplitude + h.amplitude + a).abs() <= 1e-14);
        }
    }

    #[test]
    fn variational_matrix_is_the_linearization_on_the_orbit() {
        let field = ReducedCircleField::new(0.4);
        let (e, h) = periodic_orbits(0.4).unwrap();
        for orbit in [e, h] {
            for k in 0..8 {
                let t = 0.7 * k as f64;
                let [x, y] = orbit.position(t);
                let j = crate::wavefield::VelocityField::jacobian(&field, x, y, t).unwrap().unwrap();
                let m = variational_matrix(orbit.amplitude, t);
                for i in 0..2 {
                    for l in 0..2 {
                        assert!((j[i][l] - m[i][l]).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_solutions_satisfy_the_variational_equations() {
        for a in [0.1, 0.4, 1.0, 2.0] {
            let (e, h) = periodic_orbits(a).unwrap();
            for orbit in [e, h] {
                for branch in [1.0, -1.0] {
                    for k in 0..40 {
                        let t = 0.05 + 0.16 * k as f64;
                        let d = 1e-5;
                        let w = fundamental_solution(&orbit, branch, t);
                        let wp = fundamental_solution(&orbit, branch, t + d);
                        let wm = fundamental_solution(&orbit, branch, t - d);
                        let m = variational_matrix(orbit.amplitude, t);
                        let scale = 1.0 + w[0].hypot(w[1]);
                        for i in 0..2 {
                            let derivative = (wp[i] - wm[i]) / (2.0 * d);
                            let rhs = m[i][0] * w[0] + m[i][1] * w[1];
                            assert!(
                                (derivative - rhs).abs() < 1e-6 * scale,
                                "{:?} branch {branch} t {t}: {derivative} vs {rhs}",
                                orbit.kind
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_solutions_match_integrated_flow() {
        let cfg = IntegratorConfig::default();
        let (e, h) = periodic_orbits(0.4).unwrap();
        for orbit in [e, h] {
            let w0 = fundamental_solution(&orbit, 1.0, 0.0);
            for t in [TAU / 4.0, TAU / 2.0, TAU] {
                let m = variational_flow(orbit.amplitude, t, &cfg).unwrap();
                let w = fundamental_solution(&orbit, 1.0, t);
                for i in 0..2 {
                    let propagated = m[i][0] * w0[0] + m[i][1] * w0[1];
                    assert!((propagated - w[i]).abs() < 1e-8 * (1.0 + w[i].abs()));
                }
            }
        }
    }

    #[test]
    fn monodromy_at_a_04() {
        let cfg = IntegratorConfig::default();
        let (e, h) = periodic_orbits(0.4).unwrap();

        let hyp = monodromy(&h, &cfg).unwrap();
        let expected = h.expected_multipliers();
        assert!((expected[0].re - 1015.02).abs() < 0.01);
        for (got, want) in hyp.eigenvalues.iter().zip(&expected) {
            assert!(((got - want).norm() / want.norm()) < 1e-6);
        }
        assert!((hyp.determinant - 1.0).abs() < 1e-8);

        let ell = monodromy(&e, &cfg).unwrap();
        assert!((ell.eigenvalues[0].norm() - 1.0).abs() < 1e-8);
        let angle = ell.eigenvalues[0].arg();
        let target = wrap_angle(TAU * e.exponent).abs();
        assert!((angle - target).abs() < 1e-6);
        assert!((ell.determinant - 1.0).abs() < 1e-8);
    }

    #[test]
    fn variational_and_orbit_monodromies_agree() {
        let cfg = IntegratorConfig::default();
        let (e, h) = periodic_orbits(0.4).unwrap();
        for orbit in [e, h] {
            let literal = monodromy(&orbit, &cfg).unwrap().matrix;
            let linearized = orbit_monodromy(&orbit, &cfg).unwrap();
            let scale = literal.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
            for i in 0..2 {
                for l in 0..2 {
                    assert!((literal[i][l] - linearized[i][l]).abs() < 1e-6 * scale);
                }
            }
        }
    }

    #[test]
    fn orbits_close_after_one_period() {
        let cfg = IntegratorConfig::default();
        let (e, h) = periodic_orbits(0.4).unwrap();
        for orbit in [e, h] {
            let end = flow(ReducedCircleField::new(0.4), orbit.initial_state(), TAU, &cfg).unwrap();
            assert!((end.x - orbit.amplitude).hypot(end.y) < 1e-8);
        }
    }

    #[test]
    fn eigenvalue_ordering() {
        let ev = eigenvalues2(&[[2.0, 0.0], [0.0, 0.5]]);
        assert_eq!(ev[0].re, 2.0);
        assert_eq!(ev[1].re, 0.5);
        let ev = eigenvalues2(&[[0.0, -1.0], [1.0, 0.0]]);
        assert!(ev[0].im > 0.0 && (ev[0].norm() - 1.0).abs() < 1e-15);
    }
}

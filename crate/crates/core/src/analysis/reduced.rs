use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::{PlanarState, VelocityField, DENOMINATOR_GUARD};

/// Canonical field with `B = C`, rescaled so that only the vortex radius `a`
/// remains: `x' = -(y + a sin t)/V`, `y' = (x + a cos t)/V`,
/// `V = (x + a cos t)^2 + (y + a sin t)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedCircleField {
    pub a: f64,
}

impl ReducedCircleField {
    pub fn new(a: f64) -> Self {
        Self { a }
    }

    /// Offsets from the vortex, `(x + a cos t, y + a sin t)`.
    fn offsets(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let (st, ct) = t.sin_cos();
        (x + self.a * ct, y + self.a * st)
    }

    pub fn denominator(&self, x: f64, y: f64, t: f64) -> f64 {
        let (p, q) = self.offsets(x, y, t);
        p * p + q * q
    }

    fn guarded(&self, x: f64, y: f64, t: f64) -> Result<(f64, f64, f64)> {
        let (p, q) = self.offsets(x, y, t);
        let v = p * p + q * q;
        if v > DENOMINATOR_GUARD {
            Ok((p, q, v))
        } else {
            Err(Error::Singularity { x, y, t, denominator: v })
        }
    }
}

impl VelocityField for ReducedCircleField {
    fn velocity(&self, x: f64, y: f64, t: f64) -> Result<[f64; 2]> {
        let (p, q, v) = self.guarded(x, y, t)?;
        Ok([-q / v, p / v])
    }

    fn vortex(&self, t: f64) -> Option<[f64; 2]> {
        let (st, ct) = t.sin_cos();
        Some([-self.a * ct, -self.a * st])
    }

    fn jacobian(&self, x: f64, y: f64, t: f64) -> Option<Result<[[f64; 2]; 2]>> {
        Some(self.guarded(x, y, t).map(|(p, q, v)| {
            let v2 = v * v;
            let shear = (q * q - p * p) / v2;
            let stretch = 2.0 * p * q / v2;
            [[stretch, shear], [shear, -stretch]]
        }))
    }
}

/// `H = -ln(V)/2`; the reduced field is its Hamiltonian vector field.
pub fn hamiltonian_h(field: &ReducedCircleField, s: PlanarState) -> Result<f64> {
    let v = field.denominator(s.x, s.y, s.t);
    if v > 0.0 {
        Ok(-0.5 * v.ln())
    } else {
        Err(Error::Singularity { x: s.x, y: s.y, t: s.t, denominator: v })
    }
}

/// The conserved quantity `V exp(-x^2 - y^2)`.
pub fn first_integral_h2(field: &ReducedCircleField, s: PlanarState) -> f64 {
    field.denominator(s.x, s.y, s.t) * (-s.x * s.x - s.y * s.y).exp()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::integrator::{integrate, IntegratorConfig};
    use crate::wavefield::CanonicalCoefficients;

    const A: f64 = 0.4;

    fn a_minus() -> f64 {
        (-A - (A * A + 4.0).sqrt()) / 2.0
    }

    #[test]
    fn hamiltonian_values() {
        let h = hamiltonian_h(&ReducedCircleField::new(0.0), PlanarState::new(1.0, 0.0, 0.7)).unwrap();
        assert_eq!(h, 0.0);
        let h = hamiltonian_h(&ReducedCircleField::new(A), PlanarState::new(a_minus(), 0.0, 0.0)).unwrap();
        // (a_- + a)^2 = 1/a_-^2.
        let oracle = 0.5 * (a_minus() * a_minus()).ln();
        assert!((h - oracle).abs() < 1e-15);
        assert!((h - 0.198690).abs() < 1e-6);
        assert!(hamiltonian_h(&ReducedCircleField::new(A), PlanarState::new(-A, 0.0, 0.0)).is_err());
    }

    #[test]
    fn velocity_is_the_hamiltonian_vector_field() {
        let field = ReducedCircleField::new(A);
        let h = 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (x, y, t) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.0..TAU));
            if field.denominator(x, y, t) < 0.05 {
                continue;
            }
            let ham = |x: f64, y: f64| hamiltonian_h(&field, PlanarState::new(x, y, t)).unwrap();
            let dh_dx = (ham(x + h, y) - ham(x - h, y)) / (2.0 * h);
            let dh_dy = (ham(x, y + h) - ham(x, y - h)) / (2.0 * h);
            let [u, v] = field.velocity(x, y, t).unwrap();
            assert!((u - dh_dy).abs() < 1e-6 && (v + dh_dx).abs() < 1e-6);
        }
    }

    #[test]
    fn matches_canonical_field_with_equal_amplitudes() {
        let canonical = CanonicalCoefficients::from_semi_axes(A, A).unwrap();
        let reduced = ReducedCircleField::new(A);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let (x, y, t) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-10.0..10.0));
            let (Ok(p), Ok(q)) = (VelocityField::velocity(&canonical, x, y, t), reduced.velocity(x, y, t)) else {
                continue;
            };
            let scale = 1.0 + p[0].hypot(p[1]);
            assert!((p[0] - q[0]).abs() < 1e-12 * scale && (p[1] - q[1]).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let field = ReducedCircleField::new(A);
        let (x, y, t) = (0.3, -0.9, 1.1);
        let j = field.jacobian(x, y, t).unwrap().unwrap();
        let fd = crate::integrator::finite_difference_jacobian(&field, x, y, t).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[i][k] - fd[i][k]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn first_integral_value_on_hyperbolic_orbit() {
        let am = a_minus();
        let value = first_integral_h2(&ReducedCircleField::new(A), PlanarState::new(am, 0.0, 0.0));
        let oracle = (am + A).powi(2) * (-am * am).exp();
        assert!((value - oracle).abs() < 1e-15);
        assert!((value - 0.15179).abs() < 1e-5);
    }

    #[test]
    fn first_integral_is_conserved() {
        let field = ReducedCircleField::new(A);
        let cfg = IntegratorConfig::default();
        let ic = PlanarState::new(0.9, 0.4, 0.0);
        let h0 = first_integral_h2(&field, ic);
        let tr = integrate(field, ic, 100.0 * TAU, &cfg).unwrap();
        let drift = tr.samples.iter().map(|s| (first_integral_h2(&field, *s) - h0).abs() / h0).fold(0.0, f64::max);
        assert!(drift < 1e-8, "drift {drift:e}");
    }

    #[test]
    fn periodic_orbits_are_critical_points_of_the_first_integral() {
        let field = ReducedCircleField::new(A);
        let a_plus = -1.0 / a_minus();
        let h = 1e-5;
        for amp in [a_plus, a_minus()] {
            for k in 0..8 {
                let t = k as f64 * TAU / 8.0;
                let (x, y) = (amp * t.cos(), amp * t.sin());
                let f = |x: f64, y: f64| first_integral_h2(&field, PlanarState::new(x, y, t));
                let gx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
                let gy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
                assert!(gx.hypot(gy) < 1e-8, "amp {amp} t {t}: {gx:e} {gy:e}");
            }
        }
    }
}

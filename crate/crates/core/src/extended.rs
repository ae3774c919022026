//! Double-double arithmetic and a fixed-step eighth-order integrator for the
//! reduced field, for checks whose conditioning exceeds `f64`.
//!
//! A [`DoubleDouble`] is an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving about 106 bits of significand. Only the operations needed by the
//! integrator are provided.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Requires `|a| >= |b|`.
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const TAU: Self = Self { hi: std::f64::consts::TAU, lo: 2.4492935982947064e-16 };

    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn renormalized(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    /// Correctly rounded to double-double for integer inputs below `2^53`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_f64(num as f64) / Self::from_f64(den as f64)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        // One Newton step from the f64 root doubles the number of correct bits.
        let s = self.hi.sqrt();
        let (sq, sq_err) = two_prod(s, s);
        let residual = (self - Self { hi: sq, lo: sq_err }).to_f64();
        let (hi, lo) = two_sum(s, residual / (2.0 * s));
        Self::renormalized(hi, lo)
    }

    pub fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renormalized(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        Self::renormalized(p, e + (self.hi * rhs.lo + self.lo * rhs.hi))
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Self::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Self::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        Self::renormalized(q1, q2) + Self::from_f64(q3)
    }
}

const STAGES: usize = 13;

/// Fehlberg 7(8) tableau as exact ratios; the same pair as the adaptive
/// integrator, here used only for its eighth-order solution.
#[rustfmt::skip]
const NODES: [(i64, i64); STAGES] = [
    (0, 1), (2, 27), (1, 9), (1, 6), (5, 12), (1, 2), (5, 6), (1, 6), (2, 3), (1, 3), (1, 1), (0, 1), (1, 1),
];

/// Non-zero coupling coefficients `(stage, column, num, den)`.
#[rustfmt::skip]
const COUPLING: &[(usize, usize, i64, i64)] = &[
    (1, 0, 2, 27),
    (2, 0, 1, 36), (2, 1, 1, 12),
    (3, 0, 1, 24), (3, 2, 1, 8),
    (4, 0, 5, 12), (4, 2, -25, 16), (4, 3, 25, 16),
    (5, 0, 1, 20), (5, 3, 1, 4), (5, 4, 1, 5),
    (6, 0, -25, 108), (6, 3, 125, 108), (6, 4, -65, 27), (6, 5, 125, 54),
    (7, 0, 31, 300), (7, 4, 61, 225), (7, 5, -2, 9), (7, 6, 13, 900),
    (8, 0, 2, 1), (8, 3, -53, 6), (8, 4, 704, 45), (8, 5, -107, 9), (8, 6, 67, 90), (8, 7, 3, 1),
    (9, 0, -91, 108), (9, 3, 23, 108), (9, 4, -976, 135), (9, 5, 311, 54), (9, 6, -19, 60), (9, 7, 17, 6),
    (9, 8, -1, 12),
    (10, 0, 2383, 4100), (10, 3, -341, 164), (10, 4, 4496, 1025), (10, 5, -301, 82), (10, 6, 2133, 4100),
    (10, 7, 45, 82), (10, 8, 45, 164), (10, 9, 18, 41),
    (11, 0, 3, 205), (11, 5, -6, 41), (11, 6, -3, 205), (11, 7, -3, 41), (11, 8, 3, 41), (11, 9, 6, 41),
    (12, 0, -1777, 4100), (12, 3, -341, 164), (12, 4, 4496, 1025), (12, 5, -289, 82), (12, 6, 2193, 4100),
    (12, 7, 51, 82), (12, 8, 33, 164), (12, 9, 12, 41), (12, 11, 1, 1),
];

#[rustfmt::skip]
const WEIGHTS: [(i64, i64); STAGES] = [
    (0, 1), (0, 1), (0, 1), (0, 1), (0, 1), (34, 105), (9, 35), (9, 35), (9, 280), (9, 280), (0, 1), (41, 840),
    (41, 840),
];

/// State `(x, y, cos t, sin t)`; carrying the phase as a harmonic oscillator
/// keeps every operation within `+ - * /`.
pub type ExtendedState = [DoubleDouble; 4];

fn reduced_rhs(a: DoubleDouble, s: &ExtendedState) -> Result<ExtendedState> {
    let p = s[0] + a * s[2];
    let q = s[1] + a * s[3];
    let v = p * p + q * q;
    if !(v.hi > 0.0) {
        return Err(Error::Singularity { x: s[0].to_f64(), y: s[1].to_f64(), t: f64::NAN, denominator: v.hi });
    }
    Ok([-q / v, p / v, -s[3], s[2]])
}

/// Integrates the reduced field with vortex radius `a` over `[0, t_end]` in
/// `steps` equal steps of the eighth-order Fehlberg solution.
pub fn integrate_reduced(
    a: DoubleDouble,
    start: [DoubleDouble; 2],
    t_end: DoubleDouble,
    steps: usize,
) -> Result<ExtendedState> {
    if steps == 0 {
        return Err(Error::Config("extended integration needs at least one step".into()));
    }
    let nodes = NODES.map(|(n, d)| DoubleDouble::ratio(n, d));
    let weights = WEIGHTS.map(|(n, d)| DoubleDouble::ratio(n, d));
    let mut coupling = [[DoubleDouble::ZERO; STAGES]; STAGES];
    for &(i, j, n, d) in COUPLING {
        coupling[i][j] = DoubleDouble::ratio(n, d);
    }
    debug_assert!(nodes.iter().enumerate().all(|(i, c)| {
        let sum = coupling[i].iter().fold(DoubleDouble::ZERO, |acc, &v| acc + v);
        (sum - *c).abs().hi < 1e-30
    }));

    let h = t_end / DoubleDouble::from_f64(steps as f64);
    let mut y: ExtendedState = [start[0], start[1], DoubleDouble::ONE, DoubleDouble::ZERO];
    for _ in 0..steps {
        let mut k = [[DoubleDouble::ZERO; 4]; STAGES];
        for i in 0..STAGES {
            let mut stage = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                let c = coupling[i][j];
                if c.hi != 0.0 {
                    for (sv, kv) in stage.iter_mut().zip(kj) {
                        *sv = *sv + h * c * *kv;
                    }
                }
            }
            k[i] = reduced_rhs(a, &stage)?;
        }
        for (m, yv) in y.iter_mut().enumerate() {
            let increment = k.iter().zip(&weights).fold(DoubleDouble::ZERO, |acc, (ki, w)| acc + *w * ki[m]);
            *yv = *yv + h * increment;
        }
    }
    Ok(y)
}

/// Extended-precision roots `(inner, outer)` of `x = 1/(x + |a|)`, with `inner > 0`.
pub fn circular_orbit_amplitudes(a: f64) -> (DoubleDouble, DoubleDouble) {
    let m = DoubleDouble::from_f64(a.abs());
    let root = (m * m + DoubleDouble::from_f64(4.0)).sqrt();
    let sum = m + root;
    (DoubleDouble::from_f64(2.0) / sum, -(sum / DoubleDouble::from_f64(2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::from_f64(x)
    }

    #[test]
    fn arithmetic_carries_the_low_word() {
        let third = DoubleDouble::ratio(1, 3);
        let back = third * dd(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let tiny = dd(1.0) + dd(1e-20);
        assert_eq!(tiny.hi, 1.0);
        assert_eq!((tiny - dd(1.0)).to_f64(), 1e-20);
    }

    #[test]
    fn square_root_to_double_double_precision() {
        let two = dd(2.0);
        let r = two.sqrt();
        assert!((r * r - two).abs().to_f64() < 1e-31);
        assert_eq!(dd(0.0).sqrt(), DoubleDouble::ZERO);
    }

    #[test]
    fn amplitudes_solve_the_orbit_equation() {
        for a in [0.1, 0.4, 1.0, 2.0] {
            let (inner, outer) = circular_orbit_amplitudes(a);
            for x in [inner, outer] {
                let residual = x * (x + dd(a)) - DoubleDouble::ONE;
                assert!(residual.abs().to_f64() < 1e-30, "a {a}: {residual:?}");
            }
        }
    }

    #[test]
    fn phase_oscillator_converges_at_eighth_order() {
        let phase_error = |steps| {
            let end = integrate_reduced(dd(0.4), [dd(0.9), dd(0.0)], DoubleDouble::TAU, steps).unwrap();
            (end[2] - DoubleDouble::ONE).hypot(end[3]).to_f64()
        };
        let (coarse, fine) = (phase_error(256), phase_error(512));
        assert!(fine < 1e-20, "{fine:e}");
        // 2^8 = 256 for an eighth-order method.
        assert!(coarse / fine > 150.0, "{coarse:e} {fine:e}");
    }

    #[test]
    fn agrees_with_the_adaptive_integrator() {
        use crate::analysis::ReducedCircleField;
        use crate::integrator::{flow, IntegratorConfig};
        use crate::wavefield::PlanarState;
        let f = flow(ReducedCircleField::new(0.4), PlanarState::new(0.9, 0.2, 0.0), 3.0, &IntegratorConfig::default())
            .unwrap();
        let e = integrate_reduced(dd(0.4), [dd(0.9), dd(0.2)], dd(3.0), 512).unwrap();
        assert!((f.x - e[0].to_f64()).hypot(f.y - e[1].to_f64()) < 1e-10);
    }
}

//! Truncated action-angle expansions of the reduced Hamiltonian near the
//! vortex and near the elliptic periodic orbit.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::periodic::periodic_orbits;
use crate::error::{Error, Result};

/// Number of nodes used for period averages.
pub const AVERAGE_NODES: usize = 10_000;

/// Mean of a `2 pi`-periodic function by the trapezoid rule on `nodes` points.
pub fn average_over_period<F: Fn(f64) -> f64>(f: F, nodes: usize) -> f64 {
    let h = TAU / nodes as f64;
    (0..nodes).map(|k| f(k as f64 * h)).sum::<f64>() / nodes as f64
}

/// Expansion around the vortex, with the action `I` given by the first
/// integral so that the vortex sits at `I = 0`:
/// `h(I) = -ln(I)/2 - a^2/2 - e^{a^2} I/2 - (3 a^2 e^{2a^2}/2) I^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VortexActionExpansion {
    pub a: f64,
}

impl VortexActionExpansion {
    pub fn new(a: f64) -> Self {
        Self { a }
    }

    /// Coefficients of `(ln I, 1, I, I^2)`.
    pub fn coefficients(&self) -> [f64; 4] {
        let a2 = self.a * self.a;
        [-0.5, -0.5 * a2, -0.5 * a2.exp(), -1.5 * a2 * (2.0 * a2).exp()]
    }

    fn check(i: f64) -> Result<()> {
        if i > 0.0 && i.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("action must be positive, got {i}")))
        }
    }

    pub fn h(&self, i: f64) -> Result<f64> {
        Self::check(i)?;
        let [log, constant, linear, quadratic] = self.coefficients();
        Ok(log * i.ln() + constant + linear * i + quadratic * i * i)
    }

    pub fn dh(&self, i: f64) -> Result<f64> {
        Self::check(i)?;
        let [log, _, linear, quadratic] = self.coefficients();
        Ok(log / i + linear + 2.0 * quadratic * i)
    }

    /// Derivative truncated after the `I^0` term, `-1/(2I) - e^{a^2}/2`.
    pub fn dh_first_order(&self, i: f64) -> Result<f64> {
        Self::check(i)?;
        let [log, _, linear, _] = self.coefficients();
        Ok(log / i + linear)
    }
}

/// Exact `h(I)` of the `a = 0` field, where `H = -ln(alpha^2)/2` and
/// `I = alpha^2 exp(-alpha^2)` on the circle of radius `alpha < 1`.
pub fn autonomous_vortex_h(i: f64) -> Result<f64> {
    if !(i > 0.0 && i < (-1.0f64).exp()) {
        return Err(Error::Domain(format!("need 0 < I < 1/e, got {i}")));
    }
    // Newton on u - I e^u = 0 for the branch u < 1; u = I e^u is a contraction there.
    let mut u = i;
    for _ in 0..100 {
        let next = u - (u - i * u.exp()) / (1.0 - i * u.exp());
        if (next - u).abs() <= 1e-16 * u {
            u = next;
            break;
        }
        u = next;
    }
    Ok(-0.5 * u.ln())
}

/// Series of [`autonomous_vortex_h`] to second order: `-ln(I)/2 - I/2 - I^2/2`.
pub fn autonomous_vortex_series(i: f64) -> f64 {
    -0.5 * i.ln() - 0.5 * i - 0.5 * i * i
}

/// Expansion around the elliptic orbit in `J = 1 - e^{a^2} I/(a_+ + a)^2`:
/// `h = -ln(a + a_+)^2 + (1 - P1)/2 J - (1 + 2 P2)/4 J^2` with `P1 = <alpha_1>`
/// and `P2 = <alpha_2>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticActionExpansion {
    pub a: f64,
    pub a_plus: f64,
    /// `1/sqrt(1 - a_+^4)`.
    pub pi1: f64,
    /// Period average of `alpha_2`, computed by quadrature.
    pub pi2: f64,
}

impl EllipticActionExpansion {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Degenerate(format!(
                "the elliptic expansion needs a > 0 (P1 diverges as a_+ -> 1), got {a}"
            )));
        }
        let (elliptic, _) = periodic_orbits(a)?;
        let a_plus = elliptic.amplitude;
        let mut expansion = Self { a, a_plus, pi1: 1.0 / (1.0 - a_plus.powi(4)).sqrt(), pi2: 0.0 };
        expansion.pi2 = average_over_period(|t| expansion.alpha2(t), AVERAGE_NODES);
        Ok(expansion)
    }

    /// Action of the periodic orbit itself.
    pub fn orbit_action(&self) -> f64 {
        (self.a_plus + self.a).powi(2) * (-self.a * self.a).exp()
    }

    pub fn j_of(&self, i: f64) -> f64 {
        1.0 - (self.a * self.a).exp() * i / (self.a_plus + self.a).powi(2)
    }

    pub fn h_of_j(&self, j: f64) -> Result<f64> {
        if !(j.abs() < 1.0) {
            return Err(Error::Domain(format!("expansion needs |J| < 1, got {j}")));
        }
        Ok(-(self.a + self.a_plus).powi(2).ln() + 0.5 * (1.0 - self.pi1) * j - 0.25 * (1.0 + 2.0 * self.pi2) * j * j)
    }

    pub fn h(&self, i: f64) -> Result<f64> {
        self.h_of_j(self.j_of(i))
    }

    fn denominator(&self, t: f64) -> f64 {
        1.0 - self.a_plus * self.a_plus * (2.0 * t).cos()
    }

    pub fn alpha1(&self, t: f64) -> f64 {
        1.0 / self.denominator(t)
    }

    pub fn alpha_three_halves(&self, t: f64) -> f64 {
        let ap = self.a_plus;
        let s = t.sin();
        (-ap * (1.0 + ap * ap) * s + 8.0 / 3.0 * ap.powi(3) * s.powi(3)) / self.denominator(t).powf(2.5)
    }

    pub fn alpha2(&self, t: f64) -> f64 {
        let ap = self.a_plus;
        let s = t.sin();
        let numerator = ap * (1.0 + ap).powi(2) * s - 8.0 / 3.0 * ap.powi(3) * s.powi(3);
        1.5 * numerator * numerator / self.denominator(t).powi(4)
    }

    /// The rational closed form for `P2` evaluated with parameter `x`; it is
    /// read either with `x = a` or `x = a_+`.
    pub fn pi2_closed_form(x: f64) -> f64 {
        let x2 = x * x;
        let x4 = x2 * x2;
        let x6 = x4 * x2;
        let x8 = x4 * x4;
        x2 * (41.0 * x8 - 88.0 * x6 + 119.0 * x4 - 54.0 * x2 + 18.0)
            / (36.0 * (1.0 - x4).sqrt() * (x8 + 1.0 - 2.0 * x4) * (1.0 + x2))
    }
}

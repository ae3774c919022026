//! Wave function of the three-state superposition, its Bohmian velocity
//! field, and the vortex (zero set of the wave function).
//!
//! The superposition is
//!
//! ```text
//! psi = ( A e^{-it}/sqrt(pi) + 2x B e^{-2it}/sqrt(2 pi) + 2y C e^{-2it}/sqrt(2 pi) ) e^{-(x^2+y^2)/2}
//! ```
//!
//! with complex amplitudes `A = a + i d`, `B = b + i e`, `C = f + i c` (the
//! real and imaginary parts of the last one are deliberately swapped so that
//! the canonical form has `d = e = f = 0`). Units: hbar = 1, unit mass.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard on the velocity denominator `V`; at or below it the state is
/// treated as sitting on the vortex.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

/// Default tolerance of the normalization check.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Below this `|BC - EF|` the vortex is not unique.
pub const NON_DEGENERACY_TOLERANCE: f64 = 1e-12;

/// A point of the extended configuration space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarState {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl PlanarState {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }
}

/// The six real amplitudes of the general superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralCoefficients {
    pub a: f64,
    pub d: f64,
    pub b: f64,
    pub e: f64,
    pub c: f64,
    pub f: f64,
}

impl GeneralCoefficients {
    /// Validates normalization (to 1e-12) and non-degeneracy. Arguments are in
    /// the order `A, D, B, E, C, F`.
    pub fn new(a: f64, d: f64, b: f64, e: f64, c: f64, f: f64) -> Result<Self> {
        Self::with_tolerance(a, d, b, e, c, f, NORMALIZATION_TOLERANCE)
    }

    pub fn with_tolerance(a: f64, d: f64, b: f64, e: f64, c: f64, f: f64, tolerance: f64) -> Result<Self> {
        let coeffs = Self { a, d, b, e, c, f };
        let norm_sq = coeffs.norm_sq();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > tolerance {
            return Err(Error::Normalization { norm_sq, tolerance });
        }
        let value = coeffs.non_degeneracy();
        if value.abs() <= NON_DEGENERACY_TOLERANCE {
            return Err(Error::NonDegeneracy { value });
        }
        Ok(coeffs)
    }

    /// Rescales raw amplitudes by their Euclidean norm before validating.
    pub fn renormalize(a: f64, d: f64, b: f64, e: f64, c: f64, f: f64) -> Result<Self> {
        let norm = [a, d, b, e, c, f].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Normalization { norm_sq: norm * norm, tolerance: NORMALIZATION_TOLERANCE });
        }
        Self::new(a / norm, d / norm, b / norm, e / norm, c / norm, f / norm)
    }

    pub fn from_array(v: [f64; 6]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    /// `[A, D, B, E, C, F]`
    pub fn to_array(&self) -> [f64; 6] {
        [self.a, self.d, self.b, self.e, self.c, self.f]
    }

    pub fn norm_sq(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum()
    }

    /// `BC - EF`; zero means the vortex is not unique.
    pub fn non_degeneracy(&self) -> f64 {
        self.b * self.c - self.e * self.f
    }

    pub fn psi(&self, s: PlanarState) -> Complex64 {
        let amp_a = Complex64::new(self.a, self.d);
        let amp_b = Complex64::new(self.b, self.e);
        let amp_c = Complex64::new(self.f, self.c);
        let e1 = Complex64::from_polar(1.0, -s.t);
        let e2 = Complex64::from_polar(1.0, -2.0 * s.t);
        let norm2 = (2.0 * PI).sqrt();
        let poly = amp_a * e1 / PI.sqrt() + 2.0 * s.x * amp_b * e2 / norm2 + 2.0 * s.y * amp_c * e2 / norm2;
        poly * (-(s.x * s.x + s.y * s.y) / 2.0).exp()
    }

    /// The velocity denominator `V(x, y, t)`, equal to `pi e^{x^2+y^2} |psi|^2`.
    pub fn denominator(&self, x: f64, y: f64, t: f64) -> f64 {
        let Self { a, d, b, e, c, f } = *self;
        let (st, ct) = t.sin_cos();
        // Term order mirrors the canonical expression so that D = E = F = 0
        // reproduces it bit for bit.
        2.0 * (b * b + e * e) * x * x
            + 2.0 * (c * c + f * f) * y * y
            + 2.0 * SQRT_2 * ((a * b + d * e) * ct + (a * e - d * b) * st) * x
            + 2.0 * SQRT_2 * ((d * c + a * f) * ct + (a * c - d * f) * st) * y
            + a * a
            + d * d
            + 4.0 * (b * f + e * c) * x * y
    }

    fn numerators(&self, x: f64, y: f64, t: f64) -> (f64, f64) {
        let Self { a, d, b, e, c, f } = *self;
        let (st, ct) = t.sin_cos();
        let k = b * c - e * f;
        let nx = -2.0 * k * y - SQRT_2 * (b * d - a * e) * ct - SQRT_2 * (a * b + d * e) * st;
        let ny = 2.0 * k * x + SQRT_2 * (a * c - d * f) * ct - SQRT_2 * (d * c + a * f) * st;
        (nx, ny)
    }

    /// Bohmian velocity `(xdot, ydot)`.
    pub fn velocity(&self, s: PlanarState) -> Result<[f64; 2]> {
        let v = self.denominator(s.x, s.y, s.t);
        if !(v > DENOMINATOR_GUARD) {
            return Err(Error::Singularity { x: s.x, y: s.y, t: s.t, denominator: v });
        }
        let (nx, ny) = self.numerators(s.x, s.y, s.t);
        Ok([nx / v, ny / v])
    }

    /// Analytic Jacobian of the velocity with respect to `(x, y)`.
    pub fn velocity_jacobian(&self, s: PlanarState) -> Result<[[f64; 2]; 2]> {
        let Self { a, d, b, e, c, f } = *self;
        let (x, y, t) = (s.x, s.y, s.t);
        let v = self.denominator(x, y, t);
        if !(v > DENOMINATOR_GUARD) {
            return Err(Error::Singularity { x, y, t, denominator: v });
        }
        let (st, ct) = t.sin_cos();
        let k = b * c - e * f;
        let (nx, ny) = self.numerators(x, y, t);
        let dv_dx = 4.0 * (b * b + e * e) * x
            + 4.0 * (b * f + e * c) * y
            + 2.0 * SQRT_2 * ((a * b + d * e) * ct + (a * e - d * b) * st);
        let dv_dy = 4.0 * (c * c + f * f) * y
            + 4.0 * (b * f + e * c) * x
            + 2.0 * SQRT_2 * ((d * c + a * f) * ct + (a * c - d * f) * st);
        let v2 = v * v;
        Ok([[-nx * dv_dx / v2, (-2.0 * k * v - nx * dv_dy) / v2], [(2.0 * k * v - ny * dv_dx) / v2, -ny * dv_dy / v2]])
    }

    /// Complexified amplitudes `(A^, B^, C^)` multiplying `e^{-it}`,
    /// `e^{-2it} z` and `e^{-2it} conj(z)`, with `z = x + iy`.
    pub fn complexified(&self) -> (Complex64, Complex64, Complex64) {
        let Self { a, d, b, e, c, f } = *self;
        let s1 = PI.sqrt();
        let s2 = (2.0 * PI).sqrt();
        (Complex64::new(a, d) / s1, Complex64::new(b + c, e - f) / s2, Complex64::new(b - c, e + f) / s2)
    }

    /// Position of the (unique) vortex at time `t`.
    pub fn vortex_position(&self, t: f64) -> Result<[f64; 2]> {
        let (amp_a, amp_b, amp_c) = self.complexified();
        let det = amp_b.norm_sqr() - amp_c.norm_sqr();
        if det.abs() <= NON_DEGENERACY_TOLERANCE {
            return Err(Error::DegenerateVortex);
        }
        // Solves B z + C conj(z) = -A e^{it}.
        let rhs = -amp_a * Complex64::from_polar(1.0, t);
        let z = (rhs * amp_b.conj() - amp_c * rhs.conj()) / det;
        Ok([z.re, z.im])
    }
}

/// Reduced amplitudes of the canonical form, where `D = E = F = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CanonicalCoefficients {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::with_tolerance(a, b, c, NORMALIZATION_TOLERANCE)
    }

    pub fn with_tolerance(a: f64, b: f64, c: f64, tolerance: f64) -> Result<Self> {
        let norm_sq = a * a + b * b + c * c;
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > tolerance {
            return Err(Error::Normalization { norm_sq, tolerance });
        }
        if !(b > 0.0) {
            return Err(Error::InvalidCanonical(format!("B must be positive, got {b}")));
        }
        if c.abs() <= NON_DEGENERACY_TOLERANCE {
            return Err(Error::InvalidCanonical(format!("C must be non-zero, got {c}")));
        }
        Ok(Self { a, b, c })
    }

    pub fn renormalize(a: f64, b: f64, c: f64) -> Result<Self> {
        let norm = (a * a + b * b + c * c).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Normalization { norm_sq: norm * norm, tolerance: NORMALIZATION_TOLERANCE });
        }
        Self::new(a / norm, b / norm, c / norm)
    }

    pub fn to_general(&self) -> GeneralCoefficients {
        GeneralCoefficients { a: self.a, d: 0.0, b: self.b, e: 0.0, c: self.c, f: 0.0 }
    }

    pub fn psi(&self, s: PlanarState) -> Complex64 {
        self.to_general().psi(s)
    }

    pub fn denominator(&self, x: f64, y: f64, t: f64) -> f64 {
        let Self { a, b, c } = *self;
        let (st, ct) = t.sin_cos();
        2.0 * b * b * x * x
            + 2.0 * c * c * y * y
            + 2.0 * SQRT_2 * (a * b * ct) * x
            + 2.0 * SQRT_2 * (a * c * st) * y
            + a * a
    }

    pub fn velocity(&self, s: PlanarState) -> Result<[f64; 2]> {
        let Self { a, b, c } = *self;
        let v = self.denominator(s.x, s.y, s.t);
        if !(v > DENOMINATOR_GUARD) {
            return Err(Error::Singularity { x: s.x, y: s.y, t: s.t, denominator: v });
        }
        let (st, ct) = s.t.sin_cos();
        Ok([(-2.0 * (b * c) * s.y - SQRT_2 * (a * b) * st) / v, (2.0 * (b * c) * s.x + SQRT_2 * (a * c) * ct) / v])
    }

    /// The vortex moves on the ellipse `(-a cos t, -b sin t)`.
    pub fn vortex_position(&self, t: f64) -> [f64; 2] {
        let ellipse = self.semi_axes();
        [-ellipse.a * t.cos(), -ellipse.b * t.sin()]
    }

    pub fn semi_axes(&self) -> VortexEllipse {
        VortexEllipse { a: self.a / (SQRT_2 * self.b), b: self.a / (SQRT_2 * self.c) }
    }

    /// Inverse of [`semi_axes`](Self::semi_axes) for `A > 0`: solves
    /// `A^2 (1 + 1/(2a^2) + 1/(2b^2)) = 1` with `B = A/(sqrt2 a)`, `C = A/(sqrt2 b)`.
    pub fn from_semi_axes(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("semi-axes must be positive, got ({a}, {b})")));
        }
        let amp = 1.0 / (1.0 + 1.0 / (2.0 * a * a) + 1.0 / (2.0 * b * b)).sqrt();
        Self::new(amp, amp / (SQRT_2 * a), amp / (SQRT_2 * b))
    }

    /// Vortex-on-a-circle case `B = C`.
    pub fn is_circular(&self) -> bool {
        (self.b - self.c).abs() <= 1e-15 * self.b.abs().max(1.0)
    }
}

/// Semi-axes of the ellipse traced by the canonical vortex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VortexEllipse {
    pub a: f64,
    pub b: f64,
}

/// A time-dependent planar velocity field, possibly singular at a moving vortex.
pub trait VelocityField: Send + Sync {
    fn velocity(&self, x: f64, y: f64, t: f64) -> Result<[f64; 2]>;

    /// Position of the field's vortex, if it has one.
    fn vortex(&self, _t: f64) -> Option<[f64; 2]> {
        None
    }

    /// Analytic `d(velocity)/d(x, y)`, when the field provides one.
    fn jacobian(&self, _x: f64, _y: f64, _t: f64) -> Option<Result<[[f64; 2]; 2]>> {
        None
    }
}

impl VelocityField for GeneralCoefficients {
    fn velocity(&self, x: f64, y: f64, t: f64) -> Result<[f64; 2]> {
        GeneralCoefficients::velocity(self, PlanarState { x, y, t })
    }

    fn vortex(&self, t: f64) -> Option<[f64; 2]> {
        self.vortex_position(t).ok()
    }

    fn jacobian(&self, x: f64, y: f64, t: f64) -> Option<Result<[[f64; 2]; 2]>> {
        Some(self.velocity_jacobian(PlanarState { x, y, t }))
    }
}

impl VelocityField for CanonicalCoefficients {
    fn velocity(&self, x: f64, y: f64, t: f64) -> Result<[f64; 2]> {
        CanonicalCoefficients::velocity(self, PlanarState { x, y, t })
    }

    fn vortex(&self, t: f64) -> Option<[f64; 2]> {
        Some(self.vortex_position(t))
    }

    fn jacobian(&self, x: f64, y: f64, t: f64) -> Option<Result<[[f64; 2]; 2]>> {
        Some(self.to_general().velocity_jacobian(PlanarState { x, y, t }))
    }
}

impl<F: VelocityField + ?Sized> VelocityField for &F {
    fn velocity(&self, x: f64, y: f64, t: f64) -> Result<[f64; 2]> {
        (**self).velocity(x, y, t)
    }

    fn vortex(&self, t: f64) -> Option<[f64; 2]> {
        (**self).vortex(t)
    }

    fn jacobian(&self, x: f64, y: f64, t: f64) -> Option<Result<[[f64; 2]; 2]>> {
        (**self).jacobian(x, y, t)
    }
}

/// A field with a constant velocity offset added; used as a negative control
/// for symmetry checks.
#[derive(Debug, Clone, Copy)]
pub struct Perturbed<F> {
    pub inner: F,
    pub offset: [f64; 2],
}

impl<F: VelocityField> VelocityField for Perturbed<F> {
    fn velocity(&self, x: f64, y: f64, t: f64) -> Result<[f64; 2]> {
        let [u, v] = self.inner.velocity(x, y, t)?;
        Ok([u + self.offset[0], v + self.offset[1]])
    }

    fn vortex(&self, t: f64) -> Option<[f64; 2]> {
        self.inner.vortex(t)
    }

    fn jacobian(&self, x: f64, y: f64, t: f64) -> Option<Result<[[f64; 2]; 2]>> {
        self.inner.jacobian(x, y, t)
    }
}

/// Adapts a closure `(x, y, t) -> velocity` into a [`VelocityField`].
pub struct FnField<F>(pub F);

impl<F> VelocityField for FnField<F>
where
    F: Fn(f64, f64, f64) -> [f64; 2] + Send + Sync,
{
    fn velocity(&self, x: f64, y: f64, t: f64) -> Result<[f64; 2]> {
        Ok((self.0)(x, y, t))
    }
}

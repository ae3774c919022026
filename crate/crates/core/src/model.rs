//! Ways of specifying a superposition, and the named parameter sets used to
//! reproduce the published sections.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::ReducedCircleField;
use crate::canonical::{canonicalize, CanonicalTransform};
use crate::error::Result;
use crate::wavefield::{CanonicalCoefficients, GeneralCoefficients, VelocityField};

/// Coefficients given in one of the supported forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    General {
        coefficients: GeneralCoefficients,
    },
    Canonical {
        coefficients: CanonicalCoefficients,
    },
    /// Canonical form parametrized by the vortex ellipse.
    SemiAxes {
        a: f64,
        b: f64,
    },
}

impl Model {
    pub fn general(&self) -> Option<GeneralCoefficients> {
        match *self {
            Model::General { coefficients } => Some(coefficients),
            _ => None,
        }
    }

    /// Canonical triple and the transform from this model's frame.
    pub fn canonical(&self) -> Result<(CanonicalCoefficients, CanonicalTransform)> {
        match *self {
            Model::General { coefficients } => canonicalize(&coefficients),
            Model::Canonical { coefficients } => Ok((coefficients, CanonicalTransform::identity())),
            Model::SemiAxes { a, b } => {
                Ok((CanonicalCoefficients::from_semi_axes(a, b)?, CanonicalTransform::identity()))
            }
        }
    }

    pub fn field(&self) -> Result<Field> {
        Ok(match *self {
            Model::General { coefficients } => Field::General(coefficients),
            Model::Canonical { coefficients } => Field::Canonical(coefficients),
            Model::SemiAxes { a, b } => Field::Canonical(CanonicalCoefficients::from_semi_axes(a, b)?),
        })
    }
}

/// Concrete velocity field with static dispatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field {
    General(GeneralCoefficients),
    Canonical(CanonicalCoefficients),
    Reduced(ReducedCircleField),
}

impl VelocityField for Field {
    fn velocity(&self, x: f64, y: f64, t: f64) -> Result<[f64; 2]> {
        match self {
            Field::General(g) => VelocityField::velocity(g, x, y, t),
            Field::Canonical(c) => VelocityField::velocity(c, x, y, t),
            Field::Reduced(r) => VelocityField::velocity(r, x, y, t),
        }
    }

    fn vortex(&self, t: f64) -> Option<[f64; 2]> {
        match self {
            Field::General(g) => VelocityField::vortex(g, t),
            Field::Canonical(c) => VelocityField::vortex(c, t),
            Field::Reduced(r) => VelocityField::vortex(r, t),
        }
    }

    fn jacobian(&self, x: f64, y: f64, t: f64) -> Option<Result<[[f64; 2]; 2]>> {
        match self {
            Field::General(g) => VelocityField::jacobian(g, x, y, t),
            Field::Canonical(c) => VelocityField::jacobian(c, x, y, t),
            Field::Reduced(r) => VelocityField::jacobian(r, x, y, t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub model: Model,
    /// Coefficients completed from the normalization condition rather than
    /// read from a figure caption.
    pub derived: Vec<String>,
}

pub const PRESET_NAMES: [&str; 6] = ["fig2-left", "fig2-right", "fig3-a", "fig3-b", "fig3-c", "fig3-d"];

pub fn preset(name: &str) -> Option<Preset> {
    let preset = match name {
        "fig2-left" => {
            // B = C = 0.44, F = -E, with E > 0 fixed by normalization.
            let (a, d, b) = (0.37f64, -0.02f64, 0.44f64);
            let e = ((1.0 - a * a - d * d - 2.0 * b * b) / 2.0).sqrt();
            Preset {
                name: name.into(),
                description: "general field with B = C: A=0.37, D=-0.02, B=C=0.44, E=-F".into(),
                model: Model::General { coefficients: GeneralCoefficients::new(a, d, b, e, b, -e).ok()? },
                derived: vec!["E".into(), "F".into()],
            }
        }
        "fig2-right" => {
            // F < 0 is the sign that reproduces the published canonical triple.
            let (a, d, b, c) = (0.4f64, -0.018f64, 0.37f64, 0.49f64);
            let f = -(1.0 - a * a - d * d - b * b - 2.0 * c * c).sqrt();
            Preset {
                name: name.into(),
                description: "general field with unequal B, C: A=0.4, D=-0.018, B=0.37, C=E=0.49".into(),
                model: Model::General { coefficients: GeneralCoefficients::new(a, d, b, c, c, f).ok()? },
                derived: vec!["F".into()],
            }
        }
        "fig3-a" | "fig3-b" | "fig3-c" | "fig3-d" => {
            let b = match name {
                "fig3-a" => 0.40,
                "fig3-b" => 0.44,
                "fig3-c" => 0.48,
                _ => 0.68,
            };
            Preset {
                name: name.into(),
                description: format!("sweep panel: canonical field with semi-axes a=0.4, b={b}"),
                model: Model::SemiAxes { a: 0.4, b },
                derived: vec!["A".into(), "B".into(), "C".into()],
            }
        }
        _ => return None,
    };
    Some(preset)
}

pub fn presets() -> Vec<Preset> {
    PRESET_NAMES.iter().filter_map(|n| preset(n)).collect()
}

/// One field period.
pub const PERIOD: f64 = 2.0 * PI;

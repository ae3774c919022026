//! Command-line arguments. Every subcommand's arguments serialize into the
//! run manifest, so a run can be repeated from the manifest alone.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use bohm_vortex::sections::{IcSet, DEFAULT_SECTIONS};
use bohm_vortex::{preset, CanonicalCoefficients, GeneralCoefficients, IntegratorConfig, Model};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "bohm-vortex", version, about = "Bohmian trajectories around a moving vortex")]
pub struct Cli {
    /// Directory for output files and the run manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for batch computations.
    #[arg(long, global = true, env = "BOHM_VORTEX_THREADS")]
    pub threads: Option<usize>,

    /// Repeat the run recorded in a manifest.
    #[arg(long, global = true, value_name = "FILE")]
    pub from_manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Canonical coefficients and the transform that produces them.
    Canonicalize(CanonicalizeArgs),
    /// Vortex ellipse and its sampled locus over one period.
    Vortex(VortexArgs),
    /// One trajectory, written as CSV.
    Integrate(IntegrateArgs),
    /// Stroboscopic sections with per-orbit classification.
    Section(SectionArgs),
    /// Circular periodic orbits of the reduced field and their stability.
    Orbits(OrbitsArgs),
    /// Frequency report for the circular-vortex or the autonomous field.
    Freq(FreqArgs),
    /// Largest Lyapunov exponent for each initial condition.
    Lyapunov(LyapunovArgs),
    /// Time-reversibility residual for each initial condition.
    Reversibility(ReversibilityArgs),
    /// Dynamical character of the canonical cases.
    Roadmap(RoadmapArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
    /// List the named parameter sets.
    Presets,
}

impl Command {
    /// The preset a run was configured from, if any.
    pub fn preset(&self) -> Option<&str> {
        let model = match self {
            Command::Canonicalize(a) => &a.model,
            Command::Vortex(a) => &a.model,
            Command::Integrate(a) => &a.model,
            Command::Section(a) => &a.model,
            Command::Freq(a) => &a.model,
            Command::Lyapunov(a) => &a.model,
            Command::Reversibility(a) => &a.model,
            Command::Roadmap(a) => &a.model,
            _ => return None,
        };
        model.preset.as_deref()
    }
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let values: Vec<f64> =
        s.split(',').map(|v| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"))).collect::<Result<_, _>>()?;
    let values: [f64; N] =
        values.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))?;
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(format!("{v} is not a finite number")),
        None => Ok(values),
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_floats::<2>(s)
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_floats::<3>(s)
}

fn parse_six(s: &str) -> Result<[f64; 6], String> {
    parse_floats::<6>(s)
}

fn count(v: f64, what: &str) -> Result<usize, String> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(format!("{what} must be a positive integer, got {v}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: [f64; 2],
    pub nx: usize,
    pub y: [f64; 2],
    pub ny: usize,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let [x0, x1, nx, y0, y1, ny] = parse_floats::<6>(s)?;
    Ok(GridSpec { x: [x0, x1], nx: count(nx, "nx")?, y: [y0, y1], ny: count(ny, "ny")? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanSpec {
    pub angle: f64,
    pub radii: [f64; 2],
    pub count: usize,
}

fn parse_fan(s: &str) -> Result<FanSpec, String> {
    let [angle, r0, r1, n] = parse_floats::<4>(s)?;
    Ok(FanSpec { angle, radii: [r0, r1], count: count(n, "count")? })
}

/// One way of naming the superposition.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[group(multiple = false)]
pub struct ModelArgs {
    /// Named parameter set (see `presets`).
    #[arg(long)]
    pub preset: Option<String>,
    /// General coefficients A,D,B,E,C,F.
    #[arg(long, value_name = "A,D,B,E,C,F", value_parser = parse_six, allow_hyphen_values = true)]
    pub coeffs: Option<[f64; 6]>,
    /// Canonical coefficients A,B,C.
    #[arg(long, value_name = "A,B,C", value_parser = parse_triple, allow_hyphen_values = true)]
    pub canonical: Option<[f64; 3]>,
    /// Canonical field with the given vortex semi-axes a,b.
    #[arg(long, value_name = "a,b", value_parser = parse_pair, allow_hyphen_values = true)]
    pub semi_axes: Option<[f64; 2]>,
}

impl ModelArgs {
    pub fn is_given(&self) -> bool {
        self.preset.is_some() || self.coeffs.is_some() || self.canonical.is_some() || self.semi_axes.is_some()
    }

    pub fn resolve(&self) -> Result<Model> {
        if let Some(name) = &self.preset {
            return preset(name)
                .map(|p| p.model)
                .ok_or_else(|| anyhow!("unknown preset '{name}' (see `bohm-vortex presets`)"));
        }
        if let Some([a, d, b, e, c, f]) = self.coeffs {
            return Ok(Model::General { coefficients: GeneralCoefficients::new(a, d, b, e, c, f)? });
        }
        if let Some([a, b, c]) = self.canonical {
            return Ok(Model::Canonical { coefficients: CanonicalCoefficients::new(a, b, c)? });
        }
        if let Some([a, b]) = self.semi_axes {
            CanonicalCoefficients::from_semi_axes(a, b)?;
            return Ok(Model::SemiAxes { a, b });
        }
        bail!("a model is required: pass one of --preset, --coeffs, --canonical or --semi-axes")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct ToleranceArgs {
    /// Absolute and relative integrator tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl ToleranceArgs {
    pub fn config(&self) -> Result<IntegratorConfig> {
        let cfg = self.tol.map_or_else(IntegratorConfig::default, IntegratorConfig::with_tolerance);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CanonicalizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VortexArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Points sampled along one period of the locus.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial condition x,y at t = 0.
    #[arg(long, value_name = "x,y", value_parser = parse_pair, allow_hyphen_values = true)]
    pub ic: [f64; 2],
    /// Final time; negative values integrate backwards.
    #[arg(long, default_value_t = 2.0 * PI, allow_hyphen_values = true)]
    pub time: f64,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[group(multiple = false)]
pub struct IcArgs {
    /// Initial condition x,y; repeatable.
    #[arg(long, value_name = "x,y", value_parser = parse_pair, allow_hyphen_values = true)]
    pub ic: Vec<[f64; 2]>,
    /// Grid x0,x1,nx,y0,y1,ny, bounds inclusive.
    #[arg(long, value_name = "x0,x1,nx,y0,y1,ny", value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Ray from the elliptic fixed point: angle,r0,r1,count.
    #[arg(long, value_name = "angle,r0,r1,count", value_parser = parse_fan, allow_hyphen_values = true)]
    pub fan: Option<FanSpec>,
}

impl IcArgs {
    pub fn ic_set(&self) -> Result<IcSet> {
        if let Some(g) = self.grid {
            return Ok(IcSet::Grid { x: g.x, nx: g.nx, y: g.y, ny: g.ny });
        }
        if let Some(f) = self.fan {
            return Ok(IcSet::Fan { center: None, angle: f.angle, radii: f.radii, count: f.count });
        }
        if self.ic.is_empty() {
            bail!("initial conditions are required: pass --ic (repeatable), --grid or --fan");
        }
        Ok(IcSet::List { points: self.ic.clone() })
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SectionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub ics: IcArgs,
    /// Sections per orbit.
    #[arg(long, default_value_t = DEFAULT_SECTIONS)]
    pub sections: usize,
    /// Skip the Lyapunov estimate and the labels.
    #[arg(long)]
    pub no_classify: bool,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OrbitsArgs {
    /// Vortex radius of the circular field.
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FreqArgs {
    /// Vortex radius of the circular field; reports the action expansions.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// First-integral levels near the vortex, with --a.
    #[arg(long, value_delimiter = ',', default_value = "0.001")]
    pub level: Vec<f64>,
    /// Field with A = 0; reports the rotation rate of each --ic.
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial condition x,y; repeatable.
    #[arg(long, value_name = "x,y", value_parser = parse_pair, allow_hyphen_values = true)]
    pub ic: Vec<[f64; 2]>,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial condition x,y; repeatable.
    #[arg(long, value_name = "x,y", value_parser = parse_pair, allow_hyphen_values = true, required = true)]
    pub ic: Vec<[f64; 2]>,
    /// Averaging window after the transient.
    #[arg(long, default_value_t = 200.0 * PI)]
    pub time: f64,
    /// Initial time excluded from the average.
    #[arg(long, default_value_t = 0.0)]
    pub transient: f64,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReversibilityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial condition x,y; repeatable.
    #[arg(long, value_name = "x,y", value_parser = parse_pair, allow_hyphen_values = true, required = true)]
    pub ic: Vec<[f64; 2]>,
    /// Time span compared in each direction.
    #[arg(long, default_value_t = 10.0 * PI)]
    pub time: f64,
    /// Comparison times within the span.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RoadmapArgs {
    /// Model to place on the road map; all presets when omitted.
    #[command(flatten)]
    pub model: ModelArgs,
    /// Also label the sections of this grid, x0,x1,nx,y0,y1,ny.
    #[arg(long, value_name = "x0,x1,nx,y0,y1,ny", value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Sections per orbit for --grid.
    #[arg(long, default_value_t = DEFAULT_SECTIONS)]
    pub sections: usize,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Criteria to run, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_parse_with_negative_entries() {
        assert_eq!(parse_pair("-0.5, 1e-3").unwrap(), [-0.5, 1e-3]);
        assert!(parse_pair("1,2,3").unwrap_err().contains("expected 2"));
        assert!(parse_pair("1,nan").is_err());
        let g = parse_grid("-1,1,3,0,2,2").unwrap();
        assert_eq!((g.nx, g.ny, g.x, g.y), (3, 2, [-1.0, 1.0], [0.0, 2.0]));
        assert!(parse_grid("-1,1,2.5,0,2,2").is_err());
    }

    #[test]
    fn command_round_trips_through_json() {
        let cli =
            Cli::try_parse_from(["bohm-vortex", "section", "--preset", "fig3-d", "--grid", "-1,1,2,-1,1,2"]).unwrap();
        let command = cli.command.unwrap();
        let json = serde_json::to_string(&command).unwrap();
        assert_eq!(serde_json::from_str::<Command>(&json).unwrap(), command);
        assert_eq!(command.preset(), Some("fig3-d"));
    }

    #[test]
    fn model_flags_are_exclusive() {
        let err = Cli::try_parse_from(["bohm-vortex", "vortex", "--preset", "fig3-a", "--semi-axes", "0.4,0.5"]);
        assert!(err.is_err());
    }
}

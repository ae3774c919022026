//! Subcommand implementations. Reports go to stdout as JSON and, with
//! `--out`, to files next to the run manifest.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bohm_vortex::analysis::{
    autonomous_frequency, comoving_frequency, enclosed_area_action, lyapunov_exponent, monodromy,
    orbit_closure_extended, periodic_orbits, return_time, reversibility_residual, vortex_ic_for_level,
    EllipticActionExpansion, LyapunovConfig, LyapunovEstimate, MonodromyResult, PeriodicOrbit, ReducedCircleField,
    VortexActionExpansion,
};
use bohm_vortex::integrator::integrate_partial;
use bohm_vortex::model::PRESET_NAMES;
use bohm_vortex::sections::{run_sections, IcSet, Label, SectionDataset, SectionRequest};
use bohm_vortex::verify::{self, CRITERIA};
use bohm_vortex::{
    presets, CanonicalCoefficients, CanonicalTransform, IntegratorConfig, Model, PlanarState, TrajectoryStatus,
    VelocityField, VortexEllipse,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::args::*;
use crate::svg::{emit_svg_scatter, PlotStyle};

/// Exit status for a run whose checks did not all pass.
pub const VERIFICATION_FAILURE: u8 = 2;

/// Destination for reports and data files.
pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Self { dir })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn require_dir(&self, command: &str) -> Result<&Path> {
        match self.dir() {
            Some(d) => Ok(d),
            None => bail!("`{command}` writes files: pass --out DIR"),
        }
    }

    /// Prints `report` and writes it as `<name>.json` when there is a directory.
    fn report<T: Serialize>(&self, name: &str, report: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(report)? + "\n";
        std::io::stdout().write_all(text.as_bytes())?;
        self.file(&format!("{name}.json"), text.as_bytes())
    }

    fn file(&self, name: &str, bytes: &[u8]) -> Result<()> {
        if let Some(d) = self.dir() {
            let path = d.join(name);
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

pub fn run(command: &Command, out: &Output) -> Result<u8> {
    match command {
        Command::Canonicalize(a) => canonicalize(a, out),
        Command::Vortex(a) => vortex(a, out),
        Command::Integrate(a) => integrate(a, out),
        Command::Section(a) => section(a, out),
        Command::Orbits(a) => orbits(a, out),
        Command::Freq(a) => freq(a, out),
        Command::Lyapunov(a) => lyapunov(a, out),
        Command::Reversibility(a) => reversibility(a, out),
        Command::Roadmap(a) => roadmap(a, out),
        Command::Verify(a) => return verify(a, out),
        Command::Presets => out.report("presets", &presets()),
    }?;
    Ok(0)
}

/// `x` rounded to `digits` significant digits, without exponent notation.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", digits.saturating_sub(1), x);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Serialize)]
struct CanonicalReport {
    canonical: CanonicalCoefficients,
    transform: CanonicalTransform,
    semi_axes: VortexEllipse,
}

fn canonicalize(args: &CanonicalizeArgs, out: &Output) -> Result<()> {
    let (canonical, transform) = args.model.resolve()?.canonical()?;
    for (name, value) in [("A", canonical.a), ("B", canonical.b), ("C", canonical.c)] {
        println!("{name} = {}", significant(value, 15));
    }
    println!("mu = {}", significant(transform.mu, 15));
    println!("lambda = {}", significant(transform.lambda, 15));
    println!("time_reversed = {}", transform.time_reversed);
    let report = CanonicalReport { canonical, transform, semi_axes: canonical.semi_axes() };
    out.file("canonicalize.json", (serde_json::to_string_pretty(&report)? + "\n").as_bytes())
}

#[derive(Serialize)]
struct VortexReport {
    semi_axes: VortexEllipse,
    /// Rotation of the ellipse from the canonical frame.
    rotation: f64,
    /// Time shift from the canonical clock.
    time_shift: f64,
    time_reversed: bool,
    /// `[t, x, y]` samples over one period.
    locus: Vec<[f64; 3]>,
}

fn vortex(args: &VortexArgs, out: &Output) -> Result<()> {
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    let model = args.model.resolve()?;
    let (canonical, transform) = model.canonical()?;
    let field = model.field()?;
    let locus = (0..args.samples)
        .map(|k| {
            let t = TAU * k as f64 / args.samples as f64;
            field.vortex(t).map(|[x, y]| [t, x, y]).context("the field has no vortex")
        })
        .collect::<Result<Vec<_>>>()?;
    let report = VortexReport {
        semi_axes: canonical.semi_axes(),
        rotation: transform.mu,
        time_shift: transform.lambda,
        time_reversed: transform.time_reversed,
        locus,
    };
    if out.dir().is_some() {
        let mut csv = csv::Writer::from_writer(Vec::new());
        csv.write_record(["t", "x", "y"])?;
        for [t, x, y] in &report.locus {
            csv.serialize((t, x, y))?;
        }
        out.file("vortex.csv", &csv.into_inner()?)?;
    }
    out.report("vortex", &report)
}

#[derive(Serialize)]
struct IntegrateSummary {
    status: TrajectoryStatus,
    error: Option<String>,
    samples: usize,
    end: PlanarState,
}

fn integrate(args: &IntegrateArgs, out: &Output) -> Result<()> {
    let model = args.model.resolve()?;
    let cfg = args.tolerance.config()?;
    let ic = PlanarState::new(args.ic[0], args.ic[1], 0.0);
    let (trajectory, error) = integrate_partial(model.field()?, ic, args.time, &cfg);
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["t", "x", "y"])?;
    for s in &trajectory.samples {
        csv.serialize((s.t, s.x, s.y))?;
    }
    let bytes = csv.into_inner()?;
    let summary = IntegrateSummary {
        status: trajectory.status,
        error: error.map(|e| e.to_string()),
        samples: trajectory.samples.len(),
        end: trajectory.last(),
    };
    if out.dir().is_some() {
        out.file("trajectory.csv", &bytes)?;
        out.report("integrate", &summary)
    } else {
        std::io::stdout().write_all(&bytes)?;
        eprintln!("{}", serde_json::to_string(&summary)?);
        Ok(())
    }
}

#[derive(Serialize)]
struct OrbitSummary {
    ic_index: usize,
    ic: [f64; 2],
    status: TrajectoryStatus,
    sections: usize,
    lyapunov: Option<f64>,
    classification: Option<bohm_vortex::sections::Classification>,
}

/// Everything in a dataset except the section points, which go to the CSV.
#[derive(Serialize)]
struct SectionSidecar<'a> {
    version: &'a str,
    request: &'a SectionRequest,
    centers: bohm_vortex::sections::MainCenters,
    label_counts: BTreeMap<&'static str, usize>,
    orbits: Vec<OrbitSummary>,
}

fn label_counts(dataset: &SectionDataset) -> BTreeMap<&'static str, usize> {
    let mut counts = BTreeMap::new();
    for record in &dataset.orbits {
        *counts.entry(record.label().map_or("unlabeled", Label::as_str)).or_insert(0) += 1;
    }
    counts
}

fn section_request(
    model: Model,
    ics: IcSet,
    sections: usize,
    cfg: IntegratorConfig,
    classify: bool,
) -> Result<SectionRequest> {
    if sections == 0 {
        bail!("--sections must be positive");
    }
    Ok(SectionRequest { n_sections: sections, integrator: cfg, classify, ..SectionRequest::new(model, ics) })
}

fn section(args: &SectionArgs, out: &Output) -> Result<()> {
    let dir = out.require_dir("section")?;
    let request = section_request(
        args.model.resolve()?,
        args.ics.ic_set()?,
        args.sections,
        args.tolerance.config()?,
        !args.no_classify,
    )?;
    let dataset = run_sections(&request)?;
    if dataset.orbits.is_empty() {
        bail!("no initial conditions left after excluding the neighbourhood of the vortex");
    }

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["ic_index", "n", "x", "y"])?;
    for record in &dataset.orbits {
        let ic = record.orbit.ic;
        csv.serialize((record.ic_index, 0usize, ic.x, ic.y))?;
        for (n, p) in record.orbit.points.iter().enumerate() {
            csv.serialize((record.ic_index, n + 1, p[0], p[1]))?;
        }
    }
    out.file("sections.csv", &csv.into_inner()?)?;

    let sidecar = SectionSidecar {
        version: &dataset.version,
        request: &dataset.request,
        centers: dataset.centers,
        label_counts: label_counts(&dataset),
        orbits: dataset
            .orbits
            .iter()
            .map(|r| OrbitSummary {
                ic_index: r.ic_index,
                ic: [r.orbit.ic.x, r.orbit.ic.y],
                status: r.orbit.status,
                sections: r.orbit.points.len(),
                lyapunov: r.lyapunov,
                classification: r.classification,
            })
            .collect(),
    };
    out.file("sections.json", (serde_json::to_string_pretty(&sidecar)? + "\n").as_bytes())?;
    emit_svg_scatter(&dataset, &dir.join("sections.svg"), &PlotStyle::default())?;
    let summary = serde_json::json!({
        "orbits": dataset.orbits.len(),
        "label_counts": sidecar.label_counts,
        "centers": dataset.centers,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

#[derive(Serialize)]
struct OrbitStability {
    orbit: PeriodicOrbit,
    /// Floquet multipliers implied by the closed-form exponent.
    expected_multipliers: [[f64; 2]; 2],
    monodromy: Option<MonodromyResult>,
    closure: Option<f64>,
    error: Option<String>,
}

fn stability(orbit: PeriodicOrbit, cfg: &IntegratorConfig) -> OrbitStability {
    let expected = orbit.expected_multipliers().map(|z| [z.re, z.im]);
    let mut error = None;
    let monodromy = monodromy(&orbit, cfg).map_err(|e| error = Some(e.to_string())).ok();
    let closure = orbit_closure_extended(&orbit, 1e-20).map_err(|e| error = Some(e.to_string())).ok();
    OrbitStability { orbit, expected_multipliers: expected, monodromy, closure: closure.map(|c| c.distance), error }
}

fn orbits(args: &OrbitsArgs, out: &Output) -> Result<()> {
    let cfg = args.tolerance.config()?;
    let (elliptic, hyperbolic) = periodic_orbits(args.a)?;
    let report = serde_json::json!({
        "a": args.a,
        "a_plus": elliptic.amplitude,
        "a_minus": hyperbolic.amplitude,
        "elliptic": stability(elliptic, &cfg),
        "hyperbolic": stability(hyperbolic, &cfg),
    });
    out.report("orbits", &report)
}

#[derive(Serialize)]
struct LevelFrequency {
    level: f64,
    dh: f64,
    dh_first_order: f64,
    /// Co-moving angular velocity about the vortex over eight periods.
    measured_rate: Option<f64>,
    /// `1/(2 pi)` times the enclosed area of the level curve.
    area_action: Option<f64>,
    /// First-order prediction divided by the derivative of the area action.
    area_rate: Option<f64>,
    error: Option<String>,
}

fn level_frequency(a: f64, level: f64, cfg: &IntegratorConfig) -> Result<LevelFrequency> {
    let expansion = VortexActionExpansion::new(a);
    let first = expansion.dh_first_order(level)?;
    let mut row = LevelFrequency {
        level,
        dh: expansion.dh(level)?,
        dh_first_order: first,
        measured_rate: None,
        area_action: None,
        area_rate: None,
        error: None,
    };
    let measured =
        vortex_ic_for_level(a, level).and_then(|ic| comoving_frequency(ReducedCircleField::new(a), ic, 8, cfg));
    match measured {
        Ok(rate) => row.measured_rate = Some(rate),
        Err(e) => row.error = Some(e.to_string()),
    }
    let d = 1e-4 * level;
    if let (Ok(lo), Ok(mid), Ok(hi)) =
        (enclosed_area_action(a, level - d), enclosed_area_action(a, level), enclosed_area_action(a, level + d))
    {
        row.area_action = Some(mid);
        row.area_rate = Some(first.abs() / ((hi - lo) / (2.0 * d)));
    }
    Ok(row)
}

#[derive(Serialize)]
struct AutonomousRate {
    ic: [f64; 2],
    radius: f64,
    predicted: f64,
    measured: Option<f64>,
    error: Option<String>,
}

fn freq(args: &FreqArgs, out: &Output) -> Result<()> {
    let cfg = args.tolerance.config()?;
    match (args.a, args.model.is_given()) {
        (Some(_), true) => bail!("pass either --a or a model, not both"),
        (None, false) => bail!("pass --a for the circular-vortex field or a model with A = 0"),
        (Some(a), false) => {
            let levels = args.level.iter().map(|&l| level_frequency(a, l, &cfg)).collect::<Result<Vec<_>>>()?;
            let elliptic = EllipticActionExpansion::new(a);
            let closed_forms = elliptic.as_ref().ok().map(|e| {
                serde_json::json!({
                    "read_with_a": EllipticActionExpansion::pi2_closed_form(a),
                    "read_with_a_plus": EllipticActionExpansion::pi2_closed_form(e.a_plus),
                })
            });
            let report = serde_json::json!({
                "a": a,
                "vortex": {
                    "coefficients_ln_1_i_i2": VortexActionExpansion::new(a).coefficients(),
                    "levels": levels,
                },
                "elliptic": elliptic.as_ref().ok(),
                "elliptic_error": elliptic.as_ref().err().map(ToString::to_string),
                "pi2_closed_form": closed_forms,
            });
            out.report("freq", &report)
        }
        (None, true) => {
            let model = args.model.resolve()?;
            let (canonical, _) = model.canonical()?;
            if canonical.a.abs() > 1e-12 {
                bail!("the autonomous frequency law needs A = 0, got canonical A = {}", canonical.a);
            }
            if args.ic.is_empty() {
                bail!("pass at least one --ic");
            }
            let field = model.field()?;
            let rates: Vec<AutonomousRate> = args
                .ic
                .iter()
                .map(|&ic| {
                    let radius = ic[0].hypot(ic[1]);
                    let predicted = autonomous_frequency(canonical.b, canonical.c, radius)?;
                    let start = PlanarState::new(ic[0], ic[1], 0.0);
                    let (measured, error) = match return_time(field, start, [0.0, 0.0], 1, 1e4 / predicted, &cfg) {
                        Ok(t) => (Some(TAU / t), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    Ok(AutonomousRate { ic, radius, predicted, measured, error })
                })
                .collect::<Result<_>>()?;
            out.report("freq", &serde_json::json!({ "canonical": canonical, "rates": rates }))
        }
    }
}

#[derive(Serialize)]
struct LyapunovRow {
    ic: [f64; 2],
    estimate: Option<LyapunovEstimate>,
    error: Option<String>,
}

fn lyapunov(args: &LyapunovArgs, out: &Output) -> Result<()> {
    let field = args.model.resolve()?.field()?;
    let cfg = args.tolerance.config()?;
    let lcfg = LyapunovConfig::new(args.time).with_transient(args.transient);
    let rows: Vec<LyapunovRow> = args
        .ic
        .par_iter()
        .map(|&ic| match lyapunov_exponent(field, PlanarState::new(ic[0], ic[1], 0.0), &lcfg, &cfg) {
            Ok(e) => LyapunovRow { ic, estimate: Some(e), error: None },
            Err(e) => LyapunovRow { ic, estimate: None, error: Some(e.to_string()) },
        })
        .collect();
    out.report("lyapunov", &serde_json::json!({ "config": lcfg, "orbits": rows }))
}

#[derive(Serialize)]
struct ReversibilityRow {
    ic: [f64; 2],
    residual: Option<f64>,
    error: Option<String>,
}

fn reversibility(args: &ReversibilityArgs, out: &Output) -> Result<()> {
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    let field = args.model.resolve()?.field()?;
    let cfg = args.tolerance.config()?;
    let rows: Vec<ReversibilityRow> = args
        .ic
        .par_iter()
        .map(|&ic| match reversibility_residual(field, ic, args.time, args.samples, &cfg) {
            Ok(r) => ReversibilityRow { ic, residual: Some(r), error: None },
            Err(e) => ReversibilityRow { ic, residual: None, error: Some(e.to_string()) },
        })
        .collect();
    out.report("reversibility", &serde_json::json!({ "span": args.time, "orbits": rows }))
}

/// Coefficients this close are treated as equal.
const CASE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CanonicalCase {
    /// `A = 0`: the vortex sits at the origin.
    Autonomous,
    /// `A != 0, B = C`: circular vortex.
    Circular,
    /// `A != 0, B != C`: elliptic vortex.
    Elliptic,
}

impl CanonicalCase {
    fn of(c: &CanonicalCoefficients) -> Self {
        if c.a.abs() <= CASE_TOLERANCE {
            Self::Autonomous
        } else if (c.b - c.c).abs() <= CASE_TOLERANCE {
            Self::Circular
        } else {
            Self::Elliptic
        }
    }

    fn condition(self) -> &'static str {
        match self {
            Self::Autonomous => "A = 0, B != 0, C != 0",
            Self::Circular => "A != 0, B = C",
            Self::Elliptic => "A != 0, B != C",
        }
    }

    /// Integrable, Hamiltonian, time reversible.
    fn properties(self) -> [bool; 3] {
        match self {
            Self::Autonomous => [true, false, true],
            Self::Circular => [true, true, true],
            Self::Elliptic => [false, false, true],
        }
    }

    fn sections(self) -> &'static str {
        match self {
            Self::Autonomous => "ellipses around the origin",
            Self::Circular => "invariant curves only",
            Self::Elliptic => "invariant curves and island chains mixed with chaotic orbits",
        }
    }
}

#[derive(Serialize)]
struct RoadmapRow {
    name: String,
    canonical: CanonicalCoefficients,
    case: CanonicalCase,
    condition: &'static str,
    integrable: bool,
    hamiltonian: bool,
    time_reversible: bool,
    expected_sections: &'static str,
    /// Fraction of the `--grid` orbits carrying each label.
    label_fractions: Option<BTreeMap<&'static str, f64>>,
}

fn roadmap(args: &RoadmapArgs, out: &Output) -> Result<()> {
    let models: Vec<(String, Model)> = if args.model.is_given() {
        let name = args.model.preset.clone().unwrap_or_else(|| "model".into());
        vec![(name, args.model.resolve()?)]
    } else {
        PRESET_NAMES.iter().filter_map(|n| bohm_vortex::preset(n)).map(|p| (p.name, p.model)).collect()
    };
    let cfg = args.tolerance.config()?;
    let mut rows = Vec::new();
    for (name, model) in models {
        let (canonical, _) = model.canonical()?;
        let case = CanonicalCase::of(&canonical);
        let [integrable, hamiltonian, time_reversible] = case.properties();
        let label_fractions = match args.grid {
            Some(g) => {
                let ics = IcSet::Grid { x: g.x, nx: g.nx, y: g.y, ny: g.ny };
                let dataset = run_sections(&section_request(model, ics, args.sections, cfg, true)?)?;
                Some(Label::ALL.iter().map(|&l| (l.as_str(), dataset.fraction(l))).collect())
            }
            None => None,
        };
        rows.push(RoadmapRow {
            name,
            canonical,
            case,
            condition: case.condition(),
            integrable,
            hamiltonian,
            time_reversible,
            expected_sections: case.sections(),
            label_fractions,
        });
    }
    out.report("roadmap", &rows)
}

/// Drops wall-clock fields so that repeated runs give identical reports.
fn without_timings(mut value: Value) -> Value {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(map) => {
                map.remove("seconds");
                map.values_mut().for_each(strip);
            }
            Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    strip(&mut value);
    value
}

fn verify(args: &VerifyArgs, out: &Output) -> Result<u8> {
    if let Some(id) = args.only.iter().find(|id| !CRITERIA.contains(id)) {
        bail!("no criterion {id}; criteria are numbered 1 to {}", CRITERIA.len());
    }
    let report = verify::run(&args.only);
    for c in &report.criteria {
        eprintln!("{} criterion {:>2}: {} ({:.1} s)", if c.pass() { "PASS" } else { "FAIL" }, c.id, c.title, c.seconds);
        for check in c.checks.iter().filter(|k| !k.pass) {
            eprintln!("    failed: {} (measured {:e}, expected {:e})", check.name, check.measured, check.expected);
        }
    }
    out.report("verify", &without_timings(serde_json::to_value(&report)?))?;
    Ok(if report.pass { 0 } else { VERIFICATION_FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(0.370540146272978, 15), "0.370540146272978");
        assert_eq!(significant(0.58441308118811, 15), "0.584413081188110");
        assert_eq!(significant(-12.5, 3), "-12.5");
        assert_eq!(significant(0.0, 3), "0.00");
    }

    #[test]
    fn road_map_cases() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(CanonicalCase::of(&CanonicalCoefficients::new(0.0, r, r).unwrap()), CanonicalCase::Autonomous);
        let circular = CanonicalCoefficients::from_semi_axes(0.4, 0.4).unwrap();
        assert_eq!(CanonicalCase::of(&circular), CanonicalCase::Circular);
        let elliptic = CanonicalCoefficients::from_semi_axes(0.4, 0.68).unwrap();
        assert_eq!(CanonicalCase::of(&elliptic), CanonicalCase::Elliptic);
        assert!(CanonicalCase::Elliptic.properties()[2]);
    }

    #[test]
    fn timings_are_stripped_at_every_level() {
        let v = serde_json::json!({"seconds": 1.0, "criteria": [{"id": 1, "seconds": 2.0}]});
        assert_eq!(without_timings(v), serde_json::json!({"criteria": [{"id": 1}]}));
    }
}

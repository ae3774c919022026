//! The acceptance checks, each a self-contained computation with a stated
//! tolerance.
//!
//! A criterion passes when all of its checks pass. Diagnostics are reported
//! next to the checks but never gate a criterion.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    average_over_period, comoving_frequency, enclosed_area_action, first_integral_h2, lyapunov_exponent, monodromy,
    orbit_closure, orbit_closure_extended, periodic_orbits, return_time, reversibility_residual, vortex_ic_for_level,
    EllipticActionExpansion, LyapunovConfig, OrbitKind, ReducedCircleField, VortexActionExpansion, AVERAGE_NODES,
};
use crate::canonical::{canonicalize, Direction};
use crate::integrator::{integrate, states_at, IntegratorConfig};
use crate::model::preset;
use crate::sections::{run_sections, IcSet, Label, SectionRequest};
use crate::wavefield::{CanonicalCoefficients, GeneralCoefficients, Perturbed, PlanarState, VelocityField};

pub const CRITERIA: [u8; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

/// Sections per orbit for the panel sweep.
pub const SWEEP_SECTIONS: usize = 1000;
/// Semi-axis `b` of the four panels at `a = 0.4`.
pub const SWEEP_PANELS: [f64; 4] = [0.40, 0.44, 0.48, 0.68];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Where the expected value comes from.
    pub oracle: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    /// `|measured - expected| <= tolerance`.
    pub fn absolute(name: impl Into<String>, oracle: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance;
        Self { name: name.into(), oracle: oracle.into(), measured, expected, tolerance, pass }
    }

    /// `|measured - expected| <= tolerance |expected|`.
    pub fn relative(name: impl Into<String>, oracle: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance * expected.abs();
        Self { name: name.into(), oracle: oracle.into(), measured, expected, tolerance, pass }
    }

    /// `measured <= bound`, recorded with `expected = 0`.
    pub fn at_most(name: impl Into<String>, oracle: &str, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            oracle: oracle.into(),
            measured,
            expected: 0.0,
            tolerance: bound,
            pass: measured <= bound,
        }
    }

    /// `measured >= bound`, recorded with `expected = bound` and zero tolerance.
    pub fn at_least(name: impl Into<String>, oracle: &str, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            oracle: oracle.into(),
            measured,
            expected: bound,
            tolerance: 0.0,
            pass: measured >= bound,
        }
    }

    /// A yes/no property, recorded as `1` or `0` against `1`.
    pub fn holds(name: impl Into<String>, oracle: &str, holds: bool) -> Self {
        let measured = if holds { 1.0 } else { 0.0 };
        Self { name: name.into(), oracle: oracle.into(), measured, expected: 1.0, tolerance: 0.0, pass: holds }
    }

    /// Reported for information only; always passes.
    pub fn informational(name: impl Into<String>, oracle: &str, measured: f64, expected: f64) -> Self {
        Self { name: name.into(), oracle: oracle.into(), measured, expected, tolerance: f64::INFINITY, pass: true }
    }

    fn failed(name: impl Into<String>, error: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            oracle: format!("computation failed: {error}"),
            measured: f64::NAN,
            expected: f64::NAN,
            tolerance: f64::NAN,
            pass: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub checks: Vec<CheckResult>,
    pub diagnostics: Vec<CheckResult>,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    pub criteria: Vec<CriterionReport>,
    pub pass: bool,
    pub seconds: f64,
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "canonical coefficients of the two general presets",
        2 => "wave function vanishes at the vortex",
        3 => "first integral of the circular-vortex field is conserved",
        4 => "circular periodic orbits close and have the predicted multipliers",
        5 => "rotation rate of the autonomous field",
        6 => "first-order frequency near the vortex",
        7 => "period averages of the elliptic-orbit expansion",
        8 => "time reversibility under (x, y) -> (x, -y)",
        9 => "chaotic fraction grows with the ellipse eccentricity",
        10 => "Lyapunov exponents on the hyperbolic orbit and the integrable field",
        11 => "general and canonical trajectories coincide through the transform",
        _ => "unknown criterion",
    }
}

pub fn run_criterion(id: u8) -> CriterionReport {
    let start = Instant::now();
    let (checks, diagnostics) = match id {
        1 => (canonical_table(), vec![]),
        2 => (vortex_zero(), vec![]),
        3 => (conservation(), vec![]),
        4 => closure_and_stability(),
        5 => (frequency_law(), vec![]),
        6 => vortex_frequency(),
        7 => elliptic_averages(),
        8 => (reversibility(), vec![]),
        9 => (panel_sweep(), vec![]),
        10 => (lyapunov(), vec![]),
        11 => (canonical_equivalence(), vec![]),
        _ => (vec![CheckResult::failed(format!("criterion {id}"), "no such criterion")], vec![]),
    };
    CriterionReport { id, title: title(id).into(), checks, diagnostics, seconds: start.elapsed().as_secs_f64() }
}

/// Runs the selected criteria (all when `ids` is empty), in parallel, and
/// reports them in the order given.
pub fn run(ids: &[u8]) -> VerificationReport {
    let start = Instant::now();
    let ids: Vec<u8> = if ids.is_empty() { CRITERIA.to_vec() } else { ids.to_vec() };
    let criteria: Vec<CriterionReport> = ids.par_iter().map(|&id| run_criterion(id)).collect();
    let pass = criteria.iter().all(CriterionReport::pass);
    VerificationReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        criteria,
        pass,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn canonical_table() -> Vec<CheckResult> {
    let table = [
        ("fig2-left", [0.370540146272978, 0.656772411113622, 0.656772411113622]),
        ("fig2-right", [0.400404795176082, 0.705788460189184, 0.584413081188110]),
    ];
    let mut checks = Vec::new();
    for (name, expected) in table {
        let general = preset(name).and_then(|p| p.model.general());
        match general.map(|g| canonicalize(&g)) {
            Some(Ok((c, _))) => {
                for (label, measured, want) in
                    [("A", c.a, expected[0]), ("B", c.b, expected[1]), ("C", c.c, expected[2])]
                {
                    checks.push(CheckResult::absolute(
                        format!("{name} canonical {label}"),
                        "tabulated canonical triple",
                        measured,
                        want,
                        1e-12,
                    ));
                }
            }
            Some(Err(e)) => checks.push(CheckResult::failed(name, e)),
            None => checks.push(CheckResult::failed(name, "preset is not a general superposition")),
        }
    }
    checks
}

fn random_general(rng: &mut ChaCha8Rng) -> GeneralCoefficients {
    loop {
        let v: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        if let Ok(c) = GeneralCoefficients::renormalize(v[0], v[1], v[2], v[3], v[4], v[5]) {
            if c.non_degeneracy().abs() > 1e-3 {
                return c;
            }
        }
    }
}

fn vortex_zero() -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..100 {
        let g = random_general(&mut rng);
        for _ in 0..100 {
            let t = rng.gen_range(0.0..TAU);
            match g.vortex_position(t) {
                Ok([x, y]) => worst = worst.max(g.psi(PlanarState::new(x, y, t)).norm()),
                Err(_) => failures += 1,
            }
        }
    }
    vec![
        CheckResult::at_most("max |psi| at the vortex, 100 sets x 100 times", "exact zero", worst, 1e-12),
        CheckResult::absolute("vortex solves", "every sampled set has a vortex", failures as f64, 0.0, 0.0),
    ]
}

fn conservation() -> Vec<CheckResult> {
    let start = Instant::now();
    let cfg = IntegratorConfig::default();
    let mut checks: Vec<CheckResult> = [0.1, 0.4, 1.0]
        .par_iter()
        .map(|&a| {
            let field = ReducedCircleField::new(a);
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                // Stay clear of the vortex so that the level is well resolved.
                let ic = loop {
                    let p = PlanarState::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), 0.0);
                    if first_integral_h2(&field, p) > 1e-3 {
                        break p;
                    }
                };
                let h0 = first_integral_h2(&field, ic);
                match integrate(field, ic, 200.0 * PI, &cfg) {
                    Ok(tr) => {
                        for s in &tr.samples {
                            worst = worst.max((first_integral_h2(&field, *s) - h0).abs() / h0);
                        }
                    }
                    Err(e) => return CheckResult::failed(format!("a = {a}"), e),
                }
            }
            CheckResult::at_most(
                format!("a = {a}: max relative drift, 50 orbits over 200 pi"),
                "exact invariant",
                worst,
                1e-8,
            )
        })
        .collect();
    checks.push(CheckResult::at_most("runtime in seconds", "budget", start.elapsed().as_secs_f64(), 30.0));
    checks
}

const ORBIT_RADII: [f64; 4] = [0.1, 0.4, 1.0, 2.0];

fn closure_and_stability() -> (Vec<CheckResult>, Vec<CheckResult>) {
    let cfg = IntegratorConfig::default();
    let mut checks = Vec::new();
    let mut diagnostics = Vec::new();
    for a in ORBIT_RADII {
        let (elliptic, hyperbolic) = match periodic_orbits(a) {
            Ok(pair) => pair,
            Err(e) => {
                checks.push(CheckResult::failed(format!("a = {a}"), e));
                continue;
            }
        };
        for orbit in [elliptic, hyperbolic] {
            let kind = match orbit.kind {
                OrbitKind::Elliptic => "elliptic",
                OrbitKind::Hyperbolic => "hyperbolic",
            };
            let tag = format!("a = {a} {kind}");
            match orbit_closure_extended(&orbit, 1e-12) {
                Ok(c) => checks.push(CheckResult::at_most(
                    format!("{tag}: closure after one period (double-double)"),
                    "exact periodic orbit",
                    c.distance,
                    1e-8,
                )),
                Err(e) => checks.push(CheckResult::failed(format!("{tag}: closure"), e)),
            }
            if let Ok(d) = orbit_closure(&orbit, &cfg) {
                diagnostics.push(CheckResult::at_most(
                    format!("{tag}: closure in f64 from the rounded amplitude"),
                    "conditioning probe; multiplier amplifies the rounding of the start",
                    d,
                    1e-8,
                ));
            }
            let result = match monodromy(&orbit, &cfg) {
                Ok(r) => r,
                Err(e) => {
                    checks.push(CheckResult::failed(format!("{tag}: monodromy"), e));
                    continue;
                }
            };
            let expected = orbit.expected_multipliers();
            match orbit.kind {
                OrbitKind::Hyperbolic => {
                    for (k, sign) in [(0, "+"), (1, "-")] {
                        checks.push(CheckResult::relative(
                            format!("{tag}: multiplier exp({sign}2 pi sigma)"),
                            "closed-form exponent",
                            result.eigenvalues[k].re,
                            expected[k].re,
                            1e-6,
                        ));
                    }
                }
                OrbitKind::Elliptic => {
                    let angle = TAU * orbit.exponent;
                    let measured = result.eigenvalues[0].arg().abs();
                    // Compare on the principal branch of the rotation angle.
                    let principal = crate::canonical::wrap_angle(angle).abs();
                    checks.push(CheckResult::relative(
                        format!("{tag}: multiplier angle"),
                        "closed-form exponent",
                        measured,
                        principal,
                        1e-6,
                    ));
                    checks.push(CheckResult::absolute(
                        format!("{tag}: multiplier modulus"),
                        "unit modulus",
                        result.eigenvalues[0].norm(),
                        1.0,
                        1e-6,
                    ));
                }
            }
            // Cancellation limits det M to about eps |M|^2.
            let scale = result.matrix.iter().flatten().map(|v| v * v).sum::<f64>();
            diagnostics.push(CheckResult::absolute(
                format!("{tag}: det M, tolerance max(1e-8, 1e-14 |M|^2)"),
                "trace-free linearization",
                result.determinant,
                1.0,
                (1e-14 * scale).max(1e-8),
            ));
        }
    }
    (checks, diagnostics)
}

fn frequency_law() -> Vec<CheckResult> {
    let cfg = IntegratorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..20 {
        let theta: f64 = rng.gen_range(0.2..(PI / 2.0 - 0.2));
        let (b, c) = (theta.cos(), theta.sin());
        let alpha: f64 = rng.gen_range(0.5..2.0);
        let measured = CanonicalCoefficients::new(0.0, b, c).and_then(|field| {
            let period = return_time(field, PlanarState::new(alpha, 0.0, 0.0), [0.0, 0.0], 1, 1e4, &cfg)?;
            Ok(TAU / period)
        });
        match measured {
            Ok(omega) => {
                let expected = 2.0 * b * c / (alpha * alpha * (b * b + c * c));
                worst = worst.max((omega - expected).abs() / expected);
            }
            Err(_) => failures += 1,
        }
    }
    let mut checks = vec![
        CheckResult::at_most("max relative error, 20 random (B, C, alpha)", "2BC/(alpha^2 (B^2 + C^2))", worst, 1e-6),
        CheckResult::absolute("failed measurements", "none", failures as f64, 0.0, 0.0),
    ];

    let field = CanonicalCoefficients::new(0.0, 0.6, 0.8).expect("normalized");
    let rates: Vec<f64> = [0.5, 0.8, 1.1, 1.4, 1.7, 2.0]
        .iter()
        .filter_map(|&alpha| return_time(field, PlanarState::new(alpha, 0.0, 0.0), [0.0, 0.0], 1, 1e4, &cfg).ok())
        .map(|period| TAU / period)
        .collect();
    let monotone = rates.len() == 6 && rates.windows(2).all(|w| w[1] < w[0]);
    checks.push(CheckResult::holds("measured rate strictly decreasing in alpha", "closed form", monotone));
    checks
}

fn vortex_frequency() -> (Vec<CheckResult>, Vec<CheckResult>) {
    const LEVEL: f64 = 1e-3;
    let cfg = IntegratorConfig::default();
    let mut checks = Vec::new();
    let mut diagnostics = Vec::new();
    for a in [0.2, 0.4] {
        let field = ReducedCircleField::new(a);
        let expansion = VortexActionExpansion::new(a);
        let measured = vortex_ic_for_level(a, LEVEL).and_then(|ic| comoving_frequency(field, ic, 8, &cfg));
        let (measured, first_order) = match (measured, expansion.dh_first_order(LEVEL)) {
            (Ok(m), Ok(p)) => (m, p.abs()),
            (Err(e), _) | (_, Err(e)) => {
                checks.push(CheckResult::failed(format!("a = {a}"), e));
                continue;
            }
        };
        checks.push(CheckResult::relative(
            format!("a = {a}, I = 1e-3: co-moving rotation rate vs |dh/dI| at first order"),
            "|-1/(2I) - e^{a^2}/2|",
            measured,
            first_order,
            0.02,
        ));
        // The same derivative divided by dJ/dI, J the enclosed-area action.
        let d = 1e-4 * LEVEL;
        let dj = enclosed_area_action(a, LEVEL + d)
            .and_then(|hi| Ok((hi - enclosed_area_action(a, LEVEL - d)?) / (2.0 * d)));
        if let Ok(dj) = dj {
            diagnostics.push(CheckResult::relative(
                format!("a = {a}, I = 1e-3: co-moving rate vs |dh/dI| / (dJ/dI), J = area / 2 pi"),
                "first-order derivative converted to the canonical action",
                measured,
                first_order / dj,
                0.02,
            ));
        }
    }
    (checks, diagnostics)
}

fn elliptic_averages() -> (Vec<CheckResult>, Vec<CheckResult>) {
    let mut checks = Vec::new();
    let mut diagnostics = Vec::new();
    for a in ORBIT_RADII {
        let e = match EllipticActionExpansion::new(a) {
            Ok(e) => e,
            Err(err) => {
                checks.push(CheckResult::failed(format!("a = {a}"), err));
                continue;
            }
        };
        checks.push(CheckResult::absolute(
            format!("a = {a}: <alpha_1>"),
            "1/sqrt(1 - a_+^4)",
            average_over_period(|t| e.alpha1(t), AVERAGE_NODES),
            e.pi1,
            1e-10,
        ));
        checks.push(CheckResult::absolute(
            format!("a = {a}: <alpha_3/2>"),
            "odd integrand",
            average_over_period(|t| e.alpha_three_halves(t), AVERAGE_NODES),
            0.0,
            1e-10,
        ));
        for (reading, x) in [("a", a), ("a_+", e.a_plus)] {
            diagnostics.push(CheckResult::informational(
                format!("a = {a}: <alpha_2> vs closed form read with {reading}"),
                "rational closed form",
                e.pi2,
                EllipticActionExpansion::pi2_closed_form(x),
            ));
        }
        // alpha_2 rebuilt from alpha_3/2, i.e. with (1 + a_+^2) in the
        // numerator, and without the factor 3/2.
        let ap2 = e.a_plus * e.a_plus;
        let rebuilt =
            average_over_period(|t| e.alpha_three_halves(t).powi(2) * (1.0 - ap2 * (2.0 * t).cos()), AVERAGE_NODES);
        diagnostics.push(CheckResult::relative(
            format!("a = {a}: <alpha_3/2^2 (1 - a_+^2 cos 2t)> vs closed form read with a_+"),
            "rational closed form",
            rebuilt,
            EllipticActionExpansion::pi2_closed_form(e.a_plus),
            1e-10,
        ));
    }
    (checks, diagnostics)
}

fn reversibility() -> Vec<CheckResult> {
    let cfg = IntegratorConfig::default();
    let Some(field) = preset("fig3-d").and_then(|p| p.model.field().ok()) else {
        return vec![CheckResult::failed("fig3-d", "preset unavailable")];
    };
    let vortex = field.vortex(0.0).unwrap_or([0.0, 0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..20 {
        let ic = loop {
            let p = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            if (p[0] - vortex[0]).hypot(p[1] - vortex[1]) > 0.2 {
                break p;
            }
        };
        match reversibility_residual(field, ic, 10.0 * PI, 200, &cfg) {
            Ok(r) => worst = worst.max(r),
            Err(_) => failures += 1,
        }
    }
    let perturbed = Perturbed { inner: field, offset: [0.01, 0.0] };
    let control = reversibility_residual(perturbed, [0.5, 0.3], 10.0 * PI, 200, &cfg);
    vec![
        CheckResult::at_most("max residual, 20 random initial conditions over 10 pi", "exact symmetry", worst, 1e-8),
        CheckResult::absolute("failed integrations", "none", failures as f64, 0.0, 0.0),
        match control {
            Ok(r) => CheckResult::at_least("residual with +0.01 added to dx/dt", "broken symmetry", r, 1e-3),
            Err(e) => CheckResult::failed("negative control", e),
        },
    ]
}

/// Label fractions on the fixed 10 x 10 grid over `[-1.8, 1.8]^2` for the four panels.
pub fn panel_fractions(n_sections: usize) -> crate::Result<Vec<(f64, f64)>> {
    SWEEP_PANELS
        .iter()
        .map(|&b| {
            let model = crate::model::Model::SemiAxes { a: 0.4, b };
            let ics = IcSet::Grid { x: [-1.8, 1.8], nx: 10, y: [-1.8, 1.8], ny: 10 };
            let data = run_sections(&SectionRequest::new(model, ics).with_sections(n_sections))?;
            Ok((b, data.fraction(Label::Chaotic)))
        })
        .collect()
}

fn panel_sweep() -> Vec<CheckResult> {
    let fractions = match panel_fractions(SWEEP_SECTIONS) {
        Ok(f) => f,
        Err(e) => return vec![CheckResult::failed("panel sweep", e)],
    };
    let mut checks =
        vec![CheckResult::absolute("b = 0.40: chaotic fraction", "integrable panel", fractions[0].1, 0.0, 0.0)];
    for w in fractions.windows(2) {
        checks.push(CheckResult::at_least(
            format!("b = {:.2}: chaotic fraction not below b = {:.2}", w[1].0, w[0].0),
            "growth of the chaotic region",
            w[1].1,
            w[0].1,
        ));
    }
    let last = fractions[fractions.len() - 1].1;
    checks.push(CheckResult::holds(
        format!("b = 0.68: chaotic fraction {last} is positive"),
        "chaotic sea present",
        last > 0.0,
    ));
    checks
}

fn lyapunov() -> Vec<CheckResult> {
    let cfg = IntegratorConfig::default();
    let mut checks = Vec::new();
    match periodic_orbits(0.4) {
        Ok((_, hyperbolic)) => {
            // One period to align the tangent vector, one to measure; the orbit
            // itself is only followed for a few periods before rounding ejects it.
            let lcfg = LyapunovConfig::new(TAU).with_transient(TAU);
            match lyapunov_exponent(ReducedCircleField::new(0.4), hyperbolic.initial_state(), &lcfg, &cfg) {
                Ok(est) => checks.push(CheckResult::absolute(
                    "a = 0.4 hyperbolic orbit",
                    "closed-form characteristic exponent",
                    est.exponent,
                    hyperbolic.exponent,
                    5e-3,
                )),
                Err(e) => checks.push(CheckResult::failed("hyperbolic orbit", e)),
            }
        }
        Err(e) => checks.push(CheckResult::failed("hyperbolic orbit", e)),
    }
    let field = CanonicalCoefficients::new(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2).expect("normalized");
    // The estimator decays like ln(T)/T on a twisting integrable orbit.
    let lcfg = LyapunovConfig::new(20_000.0 * PI);
    match lyapunov_exponent(field, PlanarState::new(1.0, 0.0, 0.0), &lcfg, &cfg) {
        Ok(est) => {
            checks.push(CheckResult::at_most("A = 0 field, T = 20000 pi", "integrable", est.exponent.abs(), 1e-3))
        }
        Err(e) => checks.push(CheckResult::failed("A = 0 field", e)),
    }
    checks
}

fn canonical_equivalence() -> Vec<CheckResult> {
    let cfg = IntegratorConfig::default();
    let Some(model) = preset("fig2-right").map(|p| p.model) else {
        return vec![CheckResult::failed("fig2-right", "preset unavailable")];
    };
    let (Ok(general), Ok((canonical, transform))) = (model.field(), model.canonical()) else {
        return vec![CheckResult::failed("fig2-right", "cannot build the fields")];
    };
    let times: Vec<f64> = (1..=400).map(|k| 20.0 * PI * k as f64 / 400.0).collect();
    let canonical_times: Vec<f64> = times.iter().map(|&t| transform.canonical_time(t)).collect();
    let mut worst: f64 = 0.0;
    let mut checks = Vec::new();
    for ic in [[0.7, 0.2], [-0.5, 0.9], [1.2, -0.4], [0.0, -1.3], [-1.1, -0.6]] {
        let start = PlanarState::new(ic[0], ic[1], 0.0);
        let (ours, e1) = states_at(general, start, &times, &cfg);
        let mapped = transform.map_state(start, Direction::ToCanonical);
        let (theirs, e2) = states_at(canonical, mapped, &canonical_times, &cfg);
        if let Some(e) = e1.or(e2) {
            checks.push(CheckResult::failed(format!("ic {ic:?}"), e));
            continue;
        }
        for (g, c) in ours.iter().zip(&theirs) {
            let m = transform.map_state(*g, Direction::ToCanonical);
            worst = worst.max((m.x - c.x).hypot(m.y - c.y));
        }
    }
    checks.push(CheckResult::at_most(
        "max distance over 5 orbits, t in [0, 20 pi]",
        "exact change of frame",
        worst,
        1e-8,
    ));
    checks
}

//! Batch stroboscopic sections over sets of initial conditions, with a label
//! per orbit.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{periodic_orbits, rotation_number, sections_with_lyapunov, RotationNumber};
use crate::canonical::Direction;
use crate::error::{Error, Result};
use crate::integrator::{
    det2, flow, integrate_tangent, stroboscopic, IntegratorConfig, JacobianMode, StroboscopicOrbit, TrajectoryStatus,
};
use crate::model::{Field, Model};
use crate::wavefield::{PlanarState, VelocityField};

pub const DEFAULT_SECTIONS: usize = 10_000;
/// Initial conditions closer than this to the vortex at `t = 0` are dropped
/// from grids and fans, and rejected from explicit lists.
pub const EXCLUSION_RADIUS: f64 = 1e-3;
/// Fewer sections than this are never classified.
pub const MIN_CLASSIFIED_SECTIONS: usize = 100;
pub const PERIODIC_DIAMETER: f64 = 1e-6;
pub const CHAOTIC_EXPONENT: f64 = 1e-2;
pub const REGULAR_EXPONENT: f64 = 1e-3;
/// Bound on the rotation-number tail for an orbit to count as converged.
pub const ROTATION_TAIL: f64 = 1e-4;
/// Subsequences smaller than this fraction of the orbit are treated as
/// periodic cycles rather than islands.
pub const CYCLE_EXTENT: f64 = 1e-3;
/// Highest island-chain order searched for.
pub const MAX_CHAIN_ORDER: usize = 16;

/// Initial conditions, all at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IcSet {
    List {
        points: Vec<[f64; 2]>,
    },
    /// `nx * ny` points on a rectangle, bounds inclusive, row by row in `y`.
    Grid {
        x: [f64; 2],
        nx: usize,
        y: [f64; 2],
        ny: usize,
    },
    /// `count` points along the ray from `center` at `angle`, with distances
    /// spread evenly over `radii`. Without a centre the ray starts at the
    /// field's elliptic fixed point.
    Fan {
        center: Option<[f64; 2]>,
        angle: f64,
        radii: [f64; 2],
        count: usize,
    },
}

fn spread(range: [f64; 2], count: usize, k: usize) -> f64 {
    if count <= 1 {
        range[0]
    } else {
        range[0] + (range[1] - range[0]) * k as f64 / (count - 1) as f64
    }
}

impl IcSet {
    /// The points of the set, before exclusion around the vortex.
    pub fn points(&self, centers: &MainCenters) -> Result<Vec<[f64; 2]>> {
        Ok(match self {
            IcSet::List { points } => points.clone(),
            IcSet::Grid { x, nx, y, ny } => {
                (0..*ny).flat_map(|j| (0..*nx).map(move |i| [spread(*x, *nx, i), spread(*y, *ny, j)])).collect()
            }
            IcSet::Fan { center, angle, radii, count } => {
                let origin = center
                    .or(centers.elliptic)
                    .ok_or_else(|| Error::Config("fan without a centre needs an elliptic fixed point".into()))?;
                let (s, c) = angle.sin_cos();
                (0..*count)
                    .map(|k| {
                        let r = spread(*radii, *count, k);
                        [origin[0] + r * c, origin[1] + r * s]
                    })
                    .collect()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionRequest {
    pub model: Model,
    pub ics: IcSet,
    pub n_sections: usize,
    pub integrator: IntegratorConfig,
    pub classify: bool,
}

impl SectionRequest {
    pub fn new(model: Model, ics: IcSet) -> Self {
        Self { model, ics, n_sections: DEFAULT_SECTIONS, integrator: IntegratorConfig::default(), classify: true }
    }

    pub fn with_sections(self, n_sections: usize) -> Self {
        Self { n_sections, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Regular,
    IslandChain,
    Chaotic,
    Periodic,
    Unresolved,
    Aborted,
}

impl Label {
    pub const ALL: [Label; 6] =
        [Label::Regular, Label::IslandChain, Label::Chaotic, Label::Periodic, Label::Unresolved, Label::Aborted];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Regular => "regular",
            Label::IslandChain => "island-chain",
            Label::Chaotic => "chaotic",
            Label::Periodic => "periodic",
            Label::Unresolved => "unresolved",
            Label::Aborted => "aborted",
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Points of the section at `t = 0` that organize the regular motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainCenters {
    pub vortex: Option<[f64; 2]>,
    /// Elliptic fixed point of the period map, when one is found.
    pub elliptic: Option<[f64; 2]>,
}

impl MainCenters {
    pub fn list(&self) -> Vec<[f64; 2]> {
        self.elliptic.into_iter().chain(self.vortex).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: Label,
    pub rotation: Option<RotationNumber>,
    /// Centre the orbit winds around, when it winds at all.
    pub winding_center: Option<[f64; 2]>,
    /// Island-chain order, counted in sections.
    pub chain_order: Option<usize>,
}

impl Classification {
    fn bare(label: Label) -> Self {
        Self { label, rotation: None, winding_center: None, chain_order: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub ic_index: usize,
    pub orbit: StroboscopicOrbit,
    pub lyapunov: Option<f64>,
    pub classification: Option<Classification>,
}

impl OrbitRecord {
    pub fn label(&self) -> Option<Label> {
        self.classification.map(|c| c.label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionDataset {
    pub request: SectionRequest,
    pub version: String,
    pub centers: MainCenters,
    pub orbits: Vec<OrbitRecord>,
}

impl SectionDataset {
    /// Fraction of all orbits carrying `label`.
    pub fn fraction(&self, label: Label) -> f64 {
        if self.orbits.is_empty() {
            return 0.0;
        }
        self.orbits.iter().filter(|o| o.label() == Some(label)).count() as f64 / self.orbits.len() as f64
    }
}

fn sample_diameter(points: &[[f64; 2]]) -> f64 {
    let centroid = centroid(points);
    let radius = points.iter().map(|p| (p[0] - centroid[0]).hypot(p[1] - centroid[1])).fold(0.0, f64::max);
    // The diameter lies in [radius, 2 radius]; settle the ambiguous band exactly.
    if 2.0 * radius < PERIODIC_DIAMETER || radius >= PERIODIC_DIAMETER {
        return 2.0 * radius;
    }
    let mut diameter: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            diameter = diameter.max((p[0] - q[0]).hypot(p[1] - q[1]));
        }
    }
    diameter
}

fn centroid(points: &[[f64; 2]]) -> [f64; 2] {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p[0], sy + p[1]));
    [sx / n, sy / n]
}

fn converged(points: &[[f64; 2]], center: [f64; 2]) -> Option<RotationNumber> {
    rotation_number(points, center).ok().filter(|r| r.error < ROTATION_TAIL)
}

/// Labels an orbit from its section points, Lyapunov estimate and the main
/// centres of the section.
///
/// An orbit is an island chain of order `q` when every `q`-th point winds
/// around its own centroid while staying clear of all main centres. When such
/// a subsequence winds around nothing the orbit is unresolved.
pub fn classify_orbit(orbit: &StroboscopicOrbit, lyapunov: Option<f64>, centers: &[[f64; 2]]) -> Classification {
    if orbit.status != TrajectoryStatus::Completed {
        return Classification::bare(Label::Aborted);
    }
    let points = &orbit.points;
    if points.len() < MIN_CLASSIFIED_SECTIONS {
        return Classification::bare(Label::Unresolved);
    }
    if sample_diameter(points) < PERIODIC_DIAMETER {
        return Classification { winding_center: Some(centroid(points)), ..Classification::bare(Label::Periodic) };
    }
    let Some(lambda) = lyapunov else {
        return Classification::bare(Label::Unresolved);
    };
    if lambda > CHAOTIC_EXPONENT {
        return Classification::bare(Label::Chaotic);
    }
    if !(lambda < REGULAR_EXPONENT) {
        return Classification::bare(Label::Unresolved);
    }

    let extent = sample_diameter(points);
    for order in 1..=MAX_CHAIN_ORDER {
        let sub: Vec<[f64; 2]> = points.iter().step_by(order).copied().collect();
        if sub.len() < MIN_CLASSIFIED_SECTIONS {
            break;
        }
        if centers.iter().any(|&c| rotation_number(&sub, c).is_ok()) {
            continue;
        }
        // Every order-th point stays on one side of each main centre.
        let own = centroid(&sub);
        if let Some(rotation) = converged(&sub, own) {
            return Classification {
                label: Label::IslandChain,
                rotation: Some(rotation),
                winding_center: Some(own),
                chain_order: Some(order),
            };
        }
        if sample_diameter(&sub) < CYCLE_EXTENT * extent {
            // A period-`order` cycle, e.g. on a resonant invariant curve.
            break;
        }
        return Classification::bare(Label::Unresolved);
    }
    for &center in centers {
        if let Some(rotation) = converged(points, center) {
            return Classification {
                label: Label::Regular,
                rotation: Some(rotation),
                winding_center: Some(center),
                chain_order: None,
            };
        }
    }
    Classification::bare(Label::Unresolved)
}

/// Newton iteration for a fixed point of the period map from `t = 0`.
/// Returns the point and the trace of its monodromy.
pub fn period_map_fixed_point<F: VelocityField>(
    field: F,
    guess: [f64; 2],
    cfg: &IntegratorConfig,
) -> Result<([f64; 2], f64)> {
    let mut p = guess;
    for _ in 0..40 {
        let tangent =
            integrate_tangent(&field, PlanarState::new(p[0], p[1], 0.0), TAU, cfg, JacobianMode::FiniteDifference)?;
        let end = tangent.trajectory.last();
        let m = tangent.final_matrix();
        let residual = [end.x - p[0], end.y - p[1]];
        if residual[0].hypot(residual[1]) < 1e-11 {
            return Ok((p, m[0][0] + m[1][1]));
        }
        // Solve (M - I) d = -residual.
        let a = [[m[0][0] - 1.0, m[0][1]], [m[1][0], m[1][1] - 1.0]];
        let det = det2(&a);
        if det.abs() < 1e-14 {
            break;
        }
        p[0] -= (a[1][1] * residual[0] - a[0][1] * residual[1]) / det;
        p[1] -= (a[0][0] * residual[1] - a[1][0] * residual[0]) / det;
        if !(p[0].is_finite() && p[1].is_finite()) {
            break;
        }
    }
    Err(Error::Degenerate(format!("period-map Newton iteration did not converge from {guess:?}")))
}

/// Vortex at `t = 0` and the elliptic fixed point continued from the circular
/// orbit of the reduced field.
pub fn main_centers(model: &Model, cfg: &IntegratorConfig) -> Result<MainCenters> {
    let field = model.field()?;
    let vortex = field.vortex(0.0);
    let (canonical, transform) = model.canonical()?;
    let elliptic = periodic_orbits(canonical.semi_axes().a).ok().and_then(|(orbit, _)| {
        // Canonical time at the general section time t = 0.
        let s = transform.canonical_time(0.0);
        let start = PlanarState::new(orbit.amplitude * s.cos(), orbit.amplitude * s.sin(), s);
        let guess = transform.map_state(start, Direction::FromCanonical);
        period_map_fixed_point(field, [guess.x, guess.y], cfg)
            .ok()
            .filter(|(_, trace)| trace.abs() < 2.0)
            .map(|(p, _)| p)
    });
    Ok(MainCenters { vortex, elliptic })
}

/// Section points, the Lyapunov estimate and the label of one orbit.
type OrbitOutcome = (StroboscopicOrbit, Option<f64>, Option<Classification>);

fn run_one(field: Field, ic: [f64; 2], req: &SectionRequest, centers: &[[f64; 2]]) -> OrbitOutcome {
    let start = PlanarState::new(ic[0], ic[1], 0.0);
    if !req.classify {
        return (stroboscopic(field, start, req.n_sections, &req.integrator), None, None);
    }
    let mut n = req.n_sections;
    let mut retried = false;
    loop {
        let (orbit, estimate) =
            sections_with_lyapunov(field, start, n, JacobianMode::FiniteDifference, &req.integrator);
        let lambda = estimate.map(|e| e.exponent);
        let class = classify_orbit(&orbit, lambda, centers);
        let undecided = matches!(lambda, Some(l) if (REGULAR_EXPONENT..=CHAOTIC_EXPONENT).contains(&l));
        if class.label == Label::Unresolved && undecided && !retried && orbit.status == TrajectoryStatus::Completed {
            // One retry over twice the time.
            n *= 2;
            retried = true;
            continue;
        }
        return (orbit, lambda, Some(class));
    }
}

/// Computes every orbit of the request; failures become `aborted` records.
/// Records are in input order and independent of the thread count.
pub fn run_sections(req: &SectionRequest) -> Result<SectionDataset> {
    req.integrator.validate()?;
    let field = req.model.field()?;
    let centers = main_centers(&req.model, &req.integrator)?;
    let vortex = centers.vortex;
    let mut ics = req.ics.points(&centers)?;
    let near_vortex = |p: &[f64; 2]| vortex.is_some_and(|v| (p[0] - v[0]).hypot(p[1] - v[1]) < EXCLUSION_RADIUS);
    match req.ics {
        IcSet::List { .. } => {
            if let Some(p) = ics.iter().find(|p| near_vortex(p)) {
                return Err(Error::Domain(format!(
                    "initial condition {p:?} lies within {EXCLUSION_RADIUS} of the vortex"
                )));
            }
        }
        _ => ics.retain(|p| !near_vortex(p)),
    }
    let center_list = centers.list();
    let orbits = ics
        .par_iter()
        .enumerate()
        .map(|(ic_index, &ic)| {
            let (orbit, lyapunov, classification) = run_one(field, ic, req, &center_list);
            OrbitRecord { ic_index, orbit, lyapunov, classification }
        })
        .collect();
    Ok(SectionDataset { request: req.clone(), version: env!("CARGO_PKG_VERSION").to_string(), centers, orbits })
}

/// [`run_sections`] on a dedicated pool of `threads` workers.
pub fn run_sections_with_threads(req: &SectionRequest, threads: usize) -> Result<SectionDataset> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build a pool of {threads} threads: {e}")))?;
    pool.install(|| run_sections(req))
}

/// Largest distance from a point of one set to the nearest point of the other.
pub fn hausdorff_distance(first: &[[f64; 2]], second: &[[f64; 2]]) -> f64 {
    let directed = |from: &[[f64; 2]], to: &[[f64; 2]]| {
        from.iter()
            .map(|p| to.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(first, second).max(directed(second, first))
}

/// Mapped general sections and canonical sections, in that order.
pub type SectionPair = (Vec<[f64; 2]>, Vec<[f64; 2]>);

/// Section points of the general model mapped into the canonical frame,
/// next to the canonical field's own sections from the mapped initial
/// condition. Their distance checks the equivalence of the two descriptions.
pub fn canonical_section_pair(
    model: &Model,
    ic: [f64; 2],
    n_sections: usize,
    cfg: &IntegratorConfig,
) -> Result<SectionPair> {
    let field = model.field()?;
    let (canonical, transform) = model.canonical()?;
    let start = PlanarState::new(ic[0], ic[1], 0.0);
    let general = stroboscopic(field, start, n_sections, cfg);
    let mapped: Vec<[f64; 2]> = general
        .points
        .iter()
        .map(|p| {
            let s = transform.map_state(PlanarState::new(p[0], p[1], 0.0), Direction::ToCanonical);
            [s.x, s.y]
        })
        .collect();
    let c_start = transform.map_state(start, Direction::ToCanonical);
    let step = if transform.time_reversed { -TAU } else { TAU };
    let mut own = Vec::with_capacity(n_sections);
    let mut state = c_start;
    for _ in 0..n_sections {
        state = flow(canonical, state, state.t + step, cfg)?;
        own.push([state.x, state.y]);
    }
    if general.status != TrajectoryStatus::Completed {
        return Err(Error::Degenerate("general-frame orbit did not complete".into()));
    }
    Ok((mapped, own))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::model::preset;
    use crate::wavefield::CanonicalCoefficients;

    fn autonomous() -> Model {
        Model::Canonical { coefficients: CanonicalCoefficients::new(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap() }
    }

    #[test]
    fn grid_and_fan_layouts() {
        let centers = MainCenters { vortex: None, elliptic: Some([1.0, 0.0]) };
        let grid = IcSet::Grid { x: [-1.0, 1.0], nx: 3, y: [0.0, 1.0], ny: 2 }.points(&centers).unwrap();
        assert_eq!(grid, vec![[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0], [-1.0, 1.0], [0.0, 1.0], [1.0, 1.0]]);
        let fan = IcSet::Fan { center: None, angle: 0.0, radii: [0.1, 0.3], count: 3 }.points(&centers).unwrap();
        assert!((fan[2][0] - 1.3).abs() < 1e-15 && fan[1][1] == 0.0);
        let none = MainCenters { vortex: None, elliptic: None };
        assert!(IcSet::Fan { center: None, angle: 0.0, radii: [0.1, 0.3], count: 3 }.points(&none).is_err());
    }

    #[test]
    fn constant_orbit_is_periodic() {
        let orbit = StroboscopicOrbit {
            ic: PlanarState::new(0.82, 0.0, 0.0),
            points: vec![[0.82, 0.0]; 200],
            status: TrajectoryStatus::Completed,
        };
        assert_eq!(classify_orbit(&orbit, Some(0.5), &[[0.0, 0.0]]).label, Label::Periodic);
        let short = StroboscopicOrbit { points: vec![[0.82, 0.0]; 50], ..orbit.clone() };
        assert_eq!(classify_orbit(&short, Some(0.0), &[]).label, Label::Unresolved);
        let failed = StroboscopicOrbit { status: TrajectoryStatus::HitSingularity, ..orbit };
        assert_eq!(classify_orbit(&failed, None, &[]).label, Label::Aborted);
    }

    #[test]
    fn circle_orbit_is_regular_and_large_exponent_chaotic() {
        let orbit = StroboscopicOrbit {
            ic: PlanarState::new(1.0, 0.0, 0.0),
            points: (0..500).map(|n| [(n as f64 * 0.7).cos(), (n as f64 * 0.7).sin()]).collect(),
            status: TrajectoryStatus::Completed,
        };
        let c = classify_orbit(&orbit, Some(1e-4), &[[0.0, 0.0]]);
        assert_eq!(c.label, Label::Regular);
        assert!((c.rotation.unwrap().value - 0.7).abs() < 1e-10);
        assert_eq!(classify_orbit(&orbit, Some(0.05), &[[0.0, 0.0]]).label, Label::Chaotic);
        assert_eq!(classify_orbit(&orbit, Some(5e-3), &[[0.0, 0.0]]).label, Label::Unresolved);
    }

    #[test]
    fn displaced_island_chain_is_detected() {
        // Period-3 chain of small circles around points on the unit circle.
        let omega = 0.05 * (5f64.sqrt() - 1.0);
        let points: Vec<[f64; 2]> = (0..900)
            .map(|n| {
                let island = (n % 3) as f64 * TAU / 3.0;
                let phase = n as f64 * omega;
                [island.cos() + 0.1 * phase.cos(), island.sin() + 0.1 * phase.sin()]
            })
            .collect();
        let orbit =
            StroboscopicOrbit { ic: PlanarState::new(1.1, 0.0, 0.0), points, status: TrajectoryStatus::Completed };
        let c = classify_orbit(&orbit, Some(1e-4), &[[0.0, 0.0]]);
        assert_eq!(c.label, Label::IslandChain, "{c:?}");
        assert_eq!(c.chain_order, Some(3));
        let center = c.winding_center.unwrap();
        assert!((center[0] - 1.0).hypot(center[1]) < 1e-2);
    }

    #[test]
    fn resonant_cycle_is_regular_and_short_near_resonance_unresolved() {
        let circle = |step: f64, n: usize| StroboscopicOrbit {
            ic: PlanarState::new(1.0, 0.0, 0.0),
            points: (0..n).map(|k| [(k as f64 * step).cos(), (k as f64 * step).sin()]).collect(),
            status: TrajectoryStatus::Completed,
        };
        let resonant = classify_orbit(&circle(TAU * 2.0 / 9.0 + 1e-9, 2000), Some(1e-4), &[[0.0, 0.0]]);
        assert_eq!(resonant.label, Label::Regular, "{resonant:?}");
        // Every ninth point drifts through a short arc only.
        let drifting = classify_orbit(&circle(TAU * 2.0 / 9.0 + 3e-4, 1000), Some(1e-4), &[[0.0, 0.0]]);
        assert_eq!(drifting.label, Label::Unresolved, "{drifting:?}");
    }

    #[test]
    fn autonomous_grid_is_all_regular() {
        let req = SectionRequest::new(autonomous(), IcSet::Grid { x: [-1.5, 1.5], nx: 3, y: [-1.5, 1.5], ny: 3 })
            .with_sections(2000);
        let data = run_sections(&req).unwrap();
        // The centre of the grid is the vortex and is excluded.
        assert_eq!(data.orbits.len(), 8);
        for o in &data.orbits {
            assert_eq!(o.label(), Some(Label::Regular), "{:?} {:?}", o.orbit.ic, o.lyapunov);
            assert_eq!(o.classification.unwrap().winding_center, Some([0.0, 0.0]));
        }
    }

    #[test]
    fn list_inside_exclusion_is_rejected() {
        let req = SectionRequest::new(autonomous(), IcSet::List { points: vec![[1e-4, 0.0]] }).with_sections(10);
        assert!(matches!(run_sections(&req), Err(Error::Domain(_))));
    }

    #[test]
    fn aborted_orbits_do_not_fail_the_batch() {
        let mut req =
            SectionRequest::new(autonomous(), IcSet::List { points: vec![[1.0, 0.0], [0.5, 0.0]] }).with_sections(200);
        req.integrator.max_steps = 500;
        let data = run_sections(&req).unwrap();
        assert!(data.orbits.iter().all(|o| o.label() == Some(Label::Aborted)));
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let model = preset("fig3-c").unwrap().model;
        let req =
            SectionRequest::new(model, IcSet::Grid { x: [-1.0, 1.0], nx: 3, y: [-0.5, 0.5], ny: 2 }).with_sections(150);
        let one = run_sections_with_threads(&req, 1).unwrap();
        let four = run_sections_with_threads(&req, 4).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn elliptic_fixed_point_of_the_circular_panel() {
        let model = preset("fig3-a").unwrap().model;
        let centers = main_centers(&model, &IntegratorConfig::default()).unwrap();
        let (orbit, _) = periodic_orbits(0.4).unwrap();
        let p = centers.elliptic.unwrap();
        assert!((p[0] - orbit.amplitude).abs() < 1e-9 && p[1].abs() < 1e-9, "{p:?}");
        let v = centers.vortex.unwrap();
        assert!((v[0] + 0.4).abs() < 1e-15 && v[1].abs() < 1e-15);
    }

    #[test]
    fn general_sections_match_canonical_ones() {
        let model = preset("fig2-right").unwrap().model;
        let (mapped, own) = canonical_section_pair(&model, [0.7, 0.2], 50, &IntegratorConfig::default()).unwrap();
        assert!(hausdorff_distance(&mapped, &own) < 1e-6);
    }
}

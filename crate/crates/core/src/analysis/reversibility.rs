use crate::error::Result;
use crate::integrator::{states_at, IntegratorConfig};
use crate::wavefield::{PlanarState, VelocityField};

/// The involution `(x, y) -> (x, -y)`.
pub fn reflect(p: [f64; 2]) -> [f64; 2] {
    [p[0], -p[1]]
}

/// Largest distance between the reflected time-reversed orbit through `ic`
/// and the forward orbit through the reflected initial condition, sampled at
/// `samples` equally spaced times in `(0, span]`. Both orbits start at `t = 0`.
pub fn reversibility_residual<F: VelocityField>(
    field: F,
    ic: [f64; 2],
    span: f64,
    samples: usize,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let forward_times: Vec<f64> = (1..=samples).map(|k| span * k as f64 / samples as f64).collect();
    let backward_times: Vec<f64> = forward_times.iter().map(|t| -t).collect();
    let (backward, err) = states_at(&field, PlanarState::new(ic[0], ic[1], 0.0), &backward_times, cfg);
    if let Some(e) = err {
        return Err(e);
    }
    let mirrored = reflect(ic);
    let (forward, err) = states_at(&field, PlanarState::new(mirrored[0], mirrored[1], 0.0), &forward_times, cfg);
    if let Some(e) = err {
        return Err(e);
    }
    Ok(backward
        .iter()
        .zip(&forward)
        .map(|(b, f)| {
            let [x, y] = reflect([b.x, b.y]);
            (x - f.x).hypot(y - f.y)
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::integrator::flow;
    use crate::model::preset;
    use crate::wavefield::Perturbed;

    #[test]
    fn canonical_field_is_reversible() {
        let field = preset("fig3-d").unwrap().model.field().unwrap();
        let r = reversibility_residual(field, [0.5, 0.3], 10.0 * PI, 100, &IntegratorConfig::default()).unwrap();
        assert!(r <= 1e-8, "residual {r:e}");
    }

    #[test]
    fn perturbed_field_is_not() {
        let inner = preset("fig3-d").unwrap().model.field().unwrap();
        let field = Perturbed { inner, offset: [0.01, 0.0] };
        let r = reversibility_residual(field, [0.5, 0.3], 10.0 * PI, 100, &IntegratorConfig::default()).unwrap();
        assert!(r > 1e-3, "residual {r:e}");
    }

    #[test]
    fn orbit_through_the_axis_is_its_own_mirror() {
        let field = preset("fig3-c").unwrap().model.field().unwrap();
        let cfg = IntegratorConfig::default();
        let ic = PlanarState::new(0.9, 0.0, 0.0);
        for t in [1.0, 5.0, 12.0] {
            let ahead = flow(field, ic, t, &cfg).unwrap();
            let behind = flow(field, ic, -t, &cfg).unwrap();
            assert!((ahead.x - behind.x).abs() < 1e-10 && (ahead.y + behind.y).abs() < 1e-10);
        }
    }
}

//! Periodic orbits of the Hamiltonian flow on the level curves of `H`,
//! their periods and lengths, and orbit averages of `G`.

mod average;
mod orbit;
mod profile;

pub use average::{effective_g, effective_g_line, Average};
pub use orbit::{trace_orbit, Orbit, OrbitOptions};
pub use profile::{
    build_edge_profile, default_h_grid, default_q_grid, validate_profile, EdgeProfile,
    ProfileOptions, ProfileReport, Violation, ViolationKind,
};

use crate::hamiltonian::{HamiltonianSpec, Point};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelSetError {
    #[error("level {h} on edge {edge} is not bracketed by the seeding ray")]
    NoBracket { edge: usize, h: f64 },
    #[error("no return to the section before t = {t_max}")]
    NoReturn { t_max: f64 },
    #[error("orbit came within |DH| = {grad:.3e} of a critical point at ({x:.6}, {y:.6})")]
    CriticalApproach { x: f64, y: f64, grad: f64 },
}

/// Point on `c_i(h)` found by bisection along the `+x` ray: from the
/// minimum `z_i` outward on a well, from the domain box inward on edge 0.
pub fn seed_point(spec: &HamiltonianSpec, edge: usize, h: f64) -> Result<Point, LevelSetError> {
    let no_bracket = LevelSetError::NoBracket { edge, h };
    if edge >= spec.n_edges() || h == 0.0 || !h.is_finite() {
        return Err(no_bracket);
    }
    let (lo, hi) = spec.thresholds.interval(edge);
    if h < lo || h > hi {
        return Err(no_bracket);
    }
    let d = &spec.domain;
    let (start, end) = if edge == 0 {
        let y0 = spec.critical_points[0].location[1];
        ([d.x_max, y0], spec.critical_points[0].location)
    } else {
        let z = spec.critical_points[edge].location;
        (z, [d.x_max, z[1]])
    };
    let f = |s: f64| spec.value([start[0] + s * (end[0] - start[0]), start[1]]) - h;
    let steps = 4000;
    let mut a = 0.0;
    let fa0 = f(0.0);
    if fa0 == 0.0 {
        return Ok(start);
    }
    let mut b = None;
    for k in 1..=steps {
        let s = k as f64 / steps as f64;
        let fs = f(s);
        if fs == 0.0 || fs.signum() != fa0.signum() {
            b = Some(s);
            break;
        }
        a = s;
    }
    let mut b = b.ok_or(no_bracket)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if fm.signum() == fa0.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let s = if f(a).abs() <= f(b).abs() { a } else { b };
    Ok([start[0] + s * (end[0] - start[0]), start[1]])
}

/// Seeds and traces `c_i(h)`.
pub fn trace_level(
    spec: &HamiltonianSpec,
    edge: usize,
    h: f64,
    opts: &OrbitOptions,
) -> Result<Orbit, LevelSetError> {
    let x0 = seed_point(spec, edge, h)?;
    let mut orbit = trace_orbit(spec, x0, opts)?;
    orbit.edge = Some(edge);
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn seed_examples() {
        let harm = HamiltonianSpec::harmonic(0.5);
        let p = seed_point(&harm, 0, 0.5).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1] == 0.0);

        let dw = HamiltonianSpec::double_well();
        let p = seed_point(&dw, 1, -0.125).unwrap();
        // (x² - 1)² = 1/2 on the outer side of the right well.
        let x = (1.0 + 0.5f64.sqrt()).sqrt();
        assert!((p[0] - x).abs() < 1e-12, "{p:?}");
        assert!((dw.value(p) + 0.125).abs() <= 1e-12);

        assert_eq!(
            seed_point(&dw, 1, 0.05),
            Err(LevelSetError::NoBracket { edge: 1, h: 0.05 })
        );
    }

    #[test]
    fn outer_seed_lies_on_outer_side() {
        let dw = HamiltonianSpec::double_well();
        let p = seed_point(&dw, 0, 0.01).unwrap();
        assert!(p[0] > 1.4 && (dw.value(p) - 0.01).abs() <= 1e-12);
    }

    #[test]
    fn harmonic_period_is_two_pi() {
        let harm = HamiltonianSpec::harmonic(0.5);
        let o = trace_orbit(&harm, [1.0, 0.0], &OrbitOptions::default()).unwrap();
        assert!((o.period - TAU).abs() < 1e-8, "{}", o.period);
        assert!((o.length - TAU).abs() < 1e-6);
        for r in [0.1, 0.7] {
            let o = trace_orbit(&harm, [r, 0.0], &OrbitOptions::default()).unwrap();
            assert!((o.period - TAU).abs() < 1e-8);
        }
    }

    #[test]
    fn double_well_period_grows_slower_than_envelope() {
        let dw = HamiltonianSpec::double_well();
        let opts = OrbitOptions::default();
        let t1 = trace_level(&dw, 1, -1e-1, &opts).unwrap().period;
        let t3 = trace_level(&dw, 1, -1e-3, &opts).unwrap().period;
        assert!(t3 > t1);
        assert!(t3 * 1e-3f64.sqrt() < t1 * 1e-1f64.sqrt());
    }
}

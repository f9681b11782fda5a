//! `min g` over a boundary component `∂_iΩ = c_i(h_i)`.

use hj_core::level_set::{trace_level, LevelSetError, Orbit, OrbitOptions};
use hj_core::{BoundaryDatum, HamiltonianSpec, Point};

const SAMPLES: usize = 1000;
const GOLDEN_ITERS: usize = 80;

/// Point of the orbit at time `t`: linear interpolation between the stored
/// samples, projected back onto the level.
fn position(spec: &HamiltonianSpec, orbit: &Orbit, t: f64) -> Point {
    let n = orbit.points.len() - 1;
    let s = (t / orbit.period).rem_euclid(1.0) * n as f64;
    let k = (s.floor() as usize).min(n - 1);
    let w = s - k as f64;
    let (a, b) = (orbit.points[k], orbit.points[k + 1]);
    let p = [a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])];
    spec.project_to_level(p, orbit.level, 3)
}

/// Dense sampling of `g` along the traced boundary orbit, then
/// golden-section refinement around the best sample.
pub fn boundary_minimum(
    spec: &HamiltonianSpec,
    datum: &BoundaryDatum,
    edge: usize,
    opts: &OrbitOptions,
) -> Result<f64, LevelSetError> {
    let orbit = trace_level(spec, edge, spec.thresholds.level(edge), opts)?;
    let g = |t: f64| datum.eval(spec, position(spec, &orbit, t));
    let dt = orbit.period / SAMPLES as f64;
    let (k, best) = (0..SAMPLES)
        .map(|k| (k, g(k as f64 * dt)))
        .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = ((k as f64 - 1.0) * dt, (k as f64 + 1.0) * dt);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..GOLDEN_ITERS {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    Ok(best.min(gc).min(gd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hj_core::polynomial::Polynomial;

    #[test]
    fn minimum_of_a_linear_datum_on_a_circle() {
        // c_0(0.5) for H = r²/2 is the unit circle; min of x + 2y is -√5.
        let spec = HamiltonianSpec::harmonic(0.5);
        let g = BoundaryDatum::Polynomial(Polynomial::from_triples(&[(1, 0, 1.0), (0, 1, 2.0)]));
        let m = boundary_minimum(&spec, &g, 0, &OrbitOptions::default()).unwrap();
        assert!((m + 5f64.sqrt()).abs() < 1e-9, "{m}");
    }

    #[test]
    fn scaled_hamiltonian_is_constant_on_each_component() {
        let spec = HamiltonianSpec::double_well();
        for e in 0..3 {
            let m = boundary_minimum(&spec, &BoundaryDatum::ScaledHamiltonian(8.0), e, &OrbitOptions::default())
                .unwrap();
            assert!((m - 8.0 * spec.thresholds.level(e)).abs() < 1e-12);
        }
    }
}

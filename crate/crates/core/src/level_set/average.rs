use super::orbit::{Param, Tracer};
use super::{LevelSetError, Orbit, OrbitOptions};
use crate::gfamily::GFamily;
use crate::hamiltonian::{HamiltonianSpec, Point};
use crate::norm;

/// Relative floor added to every halving estimate; covers the integration
/// error of the orbit itself, which halving cannot see.
const ERROR_FLOOR: f64 = 1e-9;

/// Quadrature value with its declared error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Average {
    pub value: f64,
    pub error: f64,
}

/// Uniform periodic trapezoid over `n` samples and over every other sample.
fn periodic_means(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let full = values.iter().sum::<f64>() / n as f64;
    let half = values.iter().step_by(2).sum::<f64>() / n.div_ceil(2) as f64;
    (full, half)
}

fn declared(full: f64, half: f64) -> Average {
    Average {
        value: full,
        error: (full - half).abs() + ERROR_FLOOR * (1.0 + full.abs()),
    }
}

/// Time average `(1/T) ∫ G(X(t), q DH(X(t))) dt` over a traced orbit.
pub fn effective_g(spec: &HamiltonianSpec, g: &GFamily, orbit: &Orbit, q: f64) -> Average {
    let n = orbit.n_intervals();
    let vals: Vec<f64> = orbit.points[..n]
        .iter()
        .map(|&x| g.eval_along_gradient(x, spec.gradient(x), q))
        .collect();
    let (full, half) = periodic_means(&vals);
    declared(full, half)
}

/// Line-integral form `∮ G(x, q DH)/|DH| dl / ∮ dl/|DH|` on the level curve
/// through `x0`, traced independently in arc length. Returns the average
/// and the period `∮ dl/|DH|`.
pub fn effective_g_line(
    spec: &HamiltonianSpec,
    g: &GFamily,
    x0: Point,
    q: f64,
    opts: &OrbitOptions,
) -> Result<(Average, f64), LevelSetError> {
    let level = spec.value(x0);
    let raw = Tracer::new(spec, *opts, Param::Arc, level)
        .trace(x0, |p| 1.0 / norm(spec.gradient(p)))?;
    let n = raw.points.len() - 1;
    let mut num = Vec::with_capacity(n);
    let mut den = Vec::with_capacity(n);
    for &x in &raw.points[..n] {
        let grad = spec.gradient(x);
        let w = 1.0 / norm(grad);
        num.push(g.eval_along_gradient(x, grad, q) * w);
        den.push(w);
    }
    let (nf, nh) = periodic_means(&num);
    let (df, dh) = periodic_means(&den);
    let period = raw.period * df;
    Ok((declared(nf / df, nh / dh), period))
}

#[cfg(test)]
mod tests {
    use super::super::{seed_point, trace_level};
    use super::*;
    use crate::polynomial::Polynomial;
    use crate::RegionMap;

    #[test]
    fn harmonic_eikonal_average() {
        let harm = HamiltonianSpec::harmonic(0.5);
        let o = trace_level(&harm, 0, 0.5, &OrbitOptions::default()).unwrap();
        let a = effective_g(&harm, &GFamily::Eikonal, &o, 2.0);
        assert!((a.value - 2.0).abs() < 1e-9, "{a:?}");
    }

    #[test]
    fn constant_g_averages_to_itself() {
        let dw = HamiltonianSpec::double_well();
        let o = trace_level(&dw, 2, -0.05, &OrbitOptions::default()).unwrap();
        let a = effective_g(&dw, &GFamily::Constant(-0.7), &o, 0.0);
        assert!((a.value + 0.7).abs() < 1e-13);
    }

    #[test]
    fn time_and_line_forms_agree() {
        let dw = HamiltonianSpec::double_well();
        let map = RegionMap::reference(&dw, 401);
        let g = GFamily::games(&dw, &map, 2.0, Polynomial::default());
        let opts = OrbitOptions::default();
        let x0 = seed_point(&dw, 0, 0.1).unwrap();
        let o = trace_level(&dw, 0, 0.1, &opts).unwrap();
        let t = effective_g(&dw, &g, &o, 1.0);
        let (l, period) = effective_g_line(&dw, &g, x0, 1.0, &opts).unwrap();
        assert!((t.value - l.value).abs() < 1e-6);
        assert!((t.value - l.value).abs() <= 10.0 * t.error.max(l.error));
        assert!((period - o.period).abs() < 1e-8 * o.period);
    }
}

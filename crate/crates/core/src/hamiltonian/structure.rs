use super::{GeometryError, HamiltonianSpec, Lattice, Point, RegionIndex, RegionMap};
use crate::norm;
use std::f64::consts::TAU;

/// RMS residual of a log–log fit above which the quantity is not treated as
/// a power law.
pub const FIT_RESIDUAL_MAX: f64 = 0.05;
/// Tolerance on the fitted exponents against the declared `(m, n)`.
pub const EXPONENT_TOLERANCE: f64 = 0.1;

/// Sample layout for [`verify_structure`].
#[derive(Debug, Clone)]
pub struct StructureSamples {
    /// Radii for the exponent fits and `m_H`, decreasing toward 0.
    pub radii: Vec<f64>,
    /// Directions per circle.
    pub directions: usize,
    /// Minimum number of points of `Ω` used for the gradient-floor constant.
    pub points: usize,
}

impl StructureSamples {
    /// `R/4 · 2^{-k}` for `k = 0..13`, 256 directions, `10⁴` points.
    pub fn default_for(spec: &HamiltonianSpec) -> Self {
        let r0 = 0.25 * spec.neighborhood_radius;
        Self {
            radii: (0..13).map(|k| r0 * 0.5f64.powi(k)).collect(),
            directions: 256,
            points: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub log_prefactor: f64,
    pub rms_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub hessian_fit: PowerFit,
    pub gradient_fit: PowerFit,
    /// `α = n/(m+2)` from the declared exponents.
    pub alpha: f64,
    /// `ρ = 1/(1-α)`.
    pub rho: f64,
    /// `min |DH|/|H|^α` over the sampled points of `Ω` after local refinement.
    pub a0: f64,
    pub a0_argmin: Point,
    pub a0_samples: usize,
    /// `((1-α) A_0)^ρ`, the growth constant.
    pub a3_growth: f64,
    /// Largest `A_3` with `m_H(r) ≥ A_3 r^ρ` on the sampled radii.
    pub a3_fit: f64,
    /// `(r, m_H(r))` in the order of the sample radii.
    pub m_h: Vec<(f64, f64)>,
    pub exponents_ok: bool,
    pub alpha_ok: bool,
    pub gradient_floor_ok: bool,
    pub m_h_increasing: bool,
    pub growth_ok: bool,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.exponents_ok
            && self.alpha_ok
            && self.gradient_floor_ok
            && self.m_h_increasing
            && self.growth_ok
            && self.a0 > 0.0
    }
}

/// Least squares fit of `log y = log A + k log r`.
pub fn power_fit(r: &[f64], y: &[f64]) -> PowerFit {
    let n = r.len() as f64;
    let lx: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let k = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - k * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - a - k * x).powi(2))
        .sum();
    PowerFit {
        exponent: k,
        log_prefactor: a,
        rms_residual: (rss / n).sqrt(),
    }
}

fn spectral_norm(h: [[f64; 2]; 2]) -> f64 {
    let tr = 0.5 * (h[0][0] + h[1][1]);
    let d = (0.25 * (h[0][0] - h[1][1]).powi(2) + h[0][1] * h[1][0]).abs().sqrt();
    (tr.abs() + d).max((tr - d).abs())
}

fn circle(r: f64, th: f64) -> Point {
    [r * th.cos(), r * th.sin()]
}

/// Golden-section maximisation of `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// `m_H(r) = max H over Ω̄_0 ∩ B̄_r`. `H` has no interior local maximum, so
/// the maximum sits on the circle unless it is cut by the level `h_0`.
pub fn m_h(spec: &HamiltonianSpec, r: f64, directions: usize) -> f64 {
    let f = |th: f64| spec.value(circle(r, th));
    let step = TAU / directions as f64;
    let best = (0..directions)
        .max_by(|&a, &b| f(a as f64 * step).total_cmp(&f(b as f64 * step)))
        .unwrap_or(0);
    let th = best as f64 * step;
    let refined = golden_max(f, th - step, th + step).max(f(th));
    refined.min(spec.thresholds.outer)
}

fn a0_ratio(spec: &HamiltonianSpec, alpha: f64, p: Point) -> f64 {
    let h = spec.value(p).abs();
    if h == 0.0 {
        return f64::INFINITY;
    }
    norm(spec.gradient(p)) / h.powf(alpha)
}

/// Fits the saddle exponents, the gradient-floor constant and the growth
/// of `m_H` near the saddle.
pub fn verify_structure(
    spec: &HamiltonianSpec,
    samples: &StructureSamples,
) -> Result<StructureReport, GeometryError> {
    let dirs = samples.directions.max(8);
    let step = TAU / dirs as f64;
    let radii = &samples.radii;

    let mut hess = Vec::with_capacity(radii.len());
    let mut grad = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut hmax = 0.0f64;
        let mut gmin = f64::INFINITY;
        for d in 0..dirs {
            let p = circle(r, d as f64 * step);
            hmax = hmax.max(spectral_norm(spec.hessian(p)));
            gmin = gmin.min(norm(spec.gradient(p)));
        }
        hess.push(hmax);
        grad.push(gmin);
    }
    let hessian_fit = power_fit(radii, &hess);
    if !(hessian_fit.rms_residual <= FIT_RESIDUAL_MAX) {
        return Err(GeometryError::FitFailure {
            quantity: "hessian norm",
            residual: hessian_fit.rms_residual,
        });
    }
    let gradient_fit = power_fit(radii, &grad);
    if !(gradient_fit.rms_residual <= FIT_RESIDUAL_MAX) {
        return Err(GeometryError::FitFailure {
            quantity: "gradient floor",
            residual: gradient_fit.rms_residual,
        });
    }

    let alpha = spec.exponents.alpha();
    let rho = 1.0 / (1.0 - alpha);

    // Gradient-floor constant over a lattice dense enough to put the
    // requested number of points in Ω.
    let mut nx = ((samples.points as f64).sqrt() * 2.0) as usize + 2;
    let (map, count) = loop {
        let map = RegionMap::build(spec, Lattice::over(spec.domain, nx));
        let count = (0..map.lattice().len())
            .filter(|&k| matches!(map.node_region(k), Ok(RegionIndex::Edge(_))))
            .count();
        if count >= samples.points || nx > 4000 {
            break (map, count);
        }
        nx = (nx as f64 * 1.5) as usize;
    };
    let (best, best_p) = map.minimize_on_closure(spec, |p| a0_ratio(spec, alpha, p));
    let a0 = best;
    let a3_growth = ((1.0 - alpha) * a0).powf(rho);

    let m_h_samples: Vec<(f64, f64)> = radii.iter().map(|&r| (r, m_h(spec, r, dirs))).collect();
    let mut by_r = m_h_samples.clone();
    by_r.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m_h_increasing = by_r.windows(2).all(|w| w[1].1 > w[0].1);
    let a3_fit = m_h_samples
        .iter()
        .map(|&(r, m)| m / r.powf(rho))
        .fold(f64::INFINITY, f64::min);
    let growth_ok = m_h_samples
        .iter()
        .filter(|(r, _)| *r < spec.neighborhood_radius)
        .all(|&(r, m)| m >= a3_growth * r.powf(rho));

    Ok(StructureReport {
        exponents_ok: (hessian_fit.exponent - spec.exponents.m).abs() <= EXPONENT_TOLERANCE
            && (gradient_fit.exponent - spec.exponents.n).abs() <= EXPONENT_TOLERANCE,
        hessian_fit,
        gradient_fit,
        alpha,
        rho,
        alpha_ok: alpha > 0.0 && alpha < 1.0,
        a0,
        a0_argmin: best_p,
        a0_samples: count,
        a3_growth,
        a3_fit,
        m_h: m_h_samples,
        gradient_floor_ok: spec.gradient_floor_violation().is_none(),
        m_h_increasing,
        growth_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::Polynomial;

    #[test]
    fn double_well_structure() {
        let spec = HamiltonianSpec::double_well();
        let rep = verify_structure(&spec, &StructureSamples::default_for(&spec)).unwrap();
        assert!(rep.hessian_fit.exponent.abs() < 0.1);
        assert!((rep.gradient_fit.exponent - 1.0).abs() < 0.1);
        assert_eq!((rep.alpha, rep.rho), (0.5, 2.0));
        // Minimum of |x³-x| / |H|^½ on the inner boundary of a well, where
        // x² = 1 - 1/√2.
        let x = (1.0 - 0.5f64.sqrt()).sqrt();
        let expect = (x - x * x * x) / 0.125f64.sqrt();
        assert!((rep.a0 - expect).abs() < 1e-6, "{} vs {expect}", rep.a0);
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn m_h_is_half_r_squared_near_saddle() {
        let spec = HamiltonianSpec::double_well();
        for r in [0.1, 0.01, 1e-3] {
            let m = m_h(&spec, r, 256);
            assert!((m / (0.5 * r * r) - 1.0).abs() < 1e-9, "r = {r}: {m}");
        }
        // Capped by the outer level far out.
        assert_eq!(m_h(&spec, 3.0, 256), 0.125);
    }

    #[test]
    fn harmonic_gradient_floor_constant_is_sqrt_two() {
        let spec = HamiltonianSpec::harmonic(0.5);
        let rep = verify_structure(&spec, &StructureSamples::default_for(&spec)).unwrap();
        assert!((rep.a0 - 2f64.sqrt()).abs() < 1e-9, "{}", rep.a0);
    }

    #[test]
    fn knee_in_gradient_is_a_fit_failure() {
        // DH = (a x + x³, -a y + y³): linear below |x| ~ √a, cubic above.
        let a = 1e-4;
        let poly = Polynomial::from_triples(&[(2, 0, 0.5 * a), (0, 2, -0.5 * a), (4, 0, 0.25), (0, 4, 0.25)]);
        let mut spec = HamiltonianSpec::harmonic(0.5);
        spec.kind = super::super::HamiltonianKind::Polynomial(poly);
        let samples = StructureSamples {
            radii: (0..14).map(|k| 0.5f64.powi(k)).collect(),
            directions: 64,
            points: 100,
        };
        assert!(matches!(
            verify_structure(&spec, &samples),
            Err(GeometryError::FitFailure { .. })
        ));
    }

    #[test]
    fn power_fit_recovers_exact_law() {
        let r: Vec<f64> = (0..10).map(|k| 0.5f64.powi(k)).collect();
        let y: Vec<f64> = r.iter().map(|v| 3.0 * v.powf(1.5)).collect();
        let f = power_fit(&r, &y);
        assert!((f.exponent - 1.5).abs() < 1e-12);
        assert!((f.log_prefactor - 3f64.ln()).abs() < 1e-12);
        assert!(f.rms_residual < 1e-12);
    }
}

//! The Hamiltonian `H`, its drift field and the geometry of the domain it
//! induces.
//!
//! Edge `0` is the outer annulus `{0 < H < h_0}`; edge `i ≥ 1` is the part of
//! the well around the minimum `z_i` above the level `h_i`. The zero level set
//! (the separatrix) belongs to the domain and collapses to the graph node.

mod critical;
mod region;
mod structure;

pub use critical::{find_critical_points, SeedGrid};
pub use region::{Lattice, RegionIndex, RegionMap};
pub use structure::{verify_structure, StructureReport, StructureSamples};

use crate::polynomial::Polynomial;
use crate::{dot, norm};
use thiserror::Error;

pub type Point = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("found {found} critical points, expected {expected}")]
    CountMismatch { found: usize, expected: usize },
    #[error("critical point at ({x:.6}, {y:.6}) has a singular hessian (det = {det:.3e})")]
    DegenerateHessian { x: f64, y: f64, det: f64 },
    #[error("point ({x:.6}, {y:.6}) lies in a negative component not reached from any minimum")]
    UnclassifiedPoint { x: f64, y: f64 },
    #[error("power-law fit of {quantity} failed: residual {residual:.3e}")]
    FitFailure { quantity: &'static str, residual: f64 },
    #[error("invalid Hamiltonian: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianKind {
    /// `(x²-1)²/4 + y²/2 - 1/4`: saddle at the origin, minima at `(±1, 0)`.
    DoubleWell,
    /// `(x²+y²)/2`: single minimum, isochronous flow. Used as a test fixture.
    Harmonic,
    Polynomial(Polynomial),
}

impl HamiltonianKind {
    #[inline]
    pub fn value(&self, p: Point) -> f64 {
        let [x, y] = p;
        match self {
            Self::DoubleWell => {
                let s = x * x - 1.0;
                0.25 * s * s + 0.5 * y * y - 0.25
            }
            Self::Harmonic => 0.5 * (x * x + y * y),
            Self::Polynomial(poly) => poly.eval(p),
        }
    }

    #[inline]
    pub fn gradient(&self, p: Point) -> [f64; 2] {
        let [x, y] = p;
        match self {
            Self::DoubleWell => [x * x * x - x, y],
            Self::Harmonic => [x, y],
            Self::Polynomial(poly) => poly.gradient(p),
        }
    }

    #[inline]
    pub fn hessian(&self, p: Point) -> [[f64; 2]; 2] {
        match self {
            Self::DoubleWell => [[3.0 * p[0] * p[0] - 1.0, 0.0], [0.0, 1.0]],
            Self::Harmonic => [[1.0, 0.0], [0.0, 1.0]],
            Self::Polynomial(poly) => poly.hessian(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Saddle,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub location: Point,
    pub kind: CriticalKind,
    pub value: f64,
}

/// Exponents `(m, n)` bounding the hessian from above by `|x|^m` and the
/// gradient from below by `|x|^n` near the saddle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleExponents {
    pub m: f64,
    pub n: f64,
}

impl SaddleExponents {
    /// `α = n / (m + 2)`.
    pub fn alpha(&self) -> f64 {
        self.n / (self.m + 2.0)
    }
}

/// Levels cutting the domain: `h_0 > 0` for the outer edge and `h_i < 0` for
/// each well, indexed so that `wells[i - 1] = h_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    pub outer: f64,
    pub wells: Vec<f64>,
}

impl Thresholds {
    pub fn level(&self, edge: usize) -> f64 {
        if edge == 0 {
            self.outer
        } else {
            self.wells[edge - 1]
        }
    }

    /// Closed interval `J̄_i` as `(lo, hi)`.
    pub fn interval(&self, edge: usize) -> (f64, f64) {
        let h = self.level(edge);
        if edge == 0 {
            (0.0, h)
        } else {
            (h, 0.0)
        }
    }

    /// `h̄ = min |h_i|`.
    pub fn min_abs(&self) -> f64 {
        self.wells
            .iter()
            .fold(self.outer.abs(), |acc, h| acc.min(h.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub h: f64,
    pub grad: [f64; 2],
    pub drift: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    /// `z_0 = 0` first, then the minima `z_1, …, z_{N-1}`.
    pub critical_points: Vec<CriticalPoint>,
    pub exponents: SaddleExponents,
    /// `A_1`: bound of the hessian entries by `A_1 |x|^m` on `B_R`.
    pub hessian_bound: f64,
    /// `A_2`: lower bound `A_2 |x|^n ≤ |DH(x)|` on `B_R`.
    pub gradient_bound: f64,
    /// `R`: radius of the ball where the saddle bounds hold.
    pub neighborhood_radius: f64,
    pub thresholds: Thresholds,
    /// Box covering `Ω̄` with some margin.
    pub domain: Rect,
}

impl HamiltonianSpec {
    /// The canonical double well with `h_0 = 1/8`, `h_1 = h_2 = -1/8`.
    pub fn double_well() -> Self {
        Self::double_well_with(Thresholds {
            outer: 0.125,
            wells: vec![-0.125, -0.125],
        })
    }

    pub fn double_well_with(thresholds: Thresholds) -> Self {
        let h0 = thresholds.outer.max(0.0);
        let x_ext = (1.0 + (1.0 + 4.0 * h0).sqrt()).sqrt();
        let y_ext = (2.0 * h0 + 0.5).sqrt();
        let kind = HamiltonianKind::DoubleWell;
        let cp = |location: Point, kind_: CriticalKind| CriticalPoint {
            location,
            kind: kind_,
            value: kind.value(location),
        };
        Self {
            critical_points: vec![
                cp([0.0, 0.0], CriticalKind::Saddle),
                cp([1.0, 0.0], CriticalKind::Minimum),
                cp([-1.0, 0.0], CriticalKind::Minimum),
            ],
            kind,
            exponents: SaddleExponents { m: 0.0, n: 1.0 },
            hessian_bound: 1.0,
            // |DH| ≥ |x| (1 - R²) on B_R, and 1 - 0.4² = 0.84.
            gradient_bound: 0.8,
            neighborhood_radius: 0.4,
            thresholds,
            domain: Rect {
                x_min: -1.05 * x_ext,
                x_max: 1.05 * x_ext,
                y_min: -1.05 * y_ext,
                y_max: 1.05 * y_ext,
            },
        }
    }

    /// Harmonic oscillator fixture with a single edge `{0 < H < h_0}`.
    pub fn harmonic(h0: f64) -> Self {
        let r = 1.1 * (2.0 * h0.max(0.0)).sqrt();
        Self {
            kind: HamiltonianKind::Harmonic,
            critical_points: vec![CriticalPoint {
                location: [0.0, 0.0],
                kind: CriticalKind::Minimum,
                value: 0.0,
            }],
            exponents: SaddleExponents { m: 0.0, n: 1.0 },
            hessian_bound: 1.0,
            gradient_bound: 1.0,
            neighborhood_radius: (2.0 * h0).sqrt() * 0.5,
            thresholds: Thresholds {
                outer: h0,
                wells: vec![],
            },
            domain: Rect {
                x_min: -r,
                x_max: r,
                y_min: -r,
                y_max: r,
            },
        }
    }

    /// User-supplied polynomial. Critical points are located numerically on
    /// a seed grid over `domain` and must number `1 + thresholds.wells.len()`.
    pub fn from_polynomial(
        poly: Polynomial,
        thresholds: Thresholds,
        exponents: SaddleExponents,
        bounds: (f64, f64, f64),
        domain: Rect,
    ) -> Result<Self, GeometryError> {
        let mut spec = Self {
            kind: HamiltonianKind::Polynomial(poly),
            critical_points: Vec::new(),
            exponents,
            hessian_bound: bounds.0,
            gradient_bound: bounds.1,
            neighborhood_radius: bounds.2,
            thresholds,
            domain,
        };
        let expected = 1 + spec.thresholds.wells.len();
        spec.critical_points =
            find_critical_points(&spec, &SeedGrid::covering(domain, 41), expected)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Number of critical points `N` (= number of edges).
    pub fn n_points(&self) -> usize {
        self.critical_points.len()
    }

    pub fn n_edges(&self) -> usize {
        self.critical_points.len()
    }

    #[inline]
    pub fn value(&self, p: Point) -> f64 {
        self.kind.value(p)
    }

    #[inline]
    pub fn gradient(&self, p: Point) -> [f64; 2] {
        self.kind.gradient(p)
    }

    #[inline]
    pub fn hessian(&self, p: Point) -> [[f64; 2]; 2] {
        self.kind.hessian(p)
    }

    /// Hamiltonian vector field `b = (H_y, -H_x)`.
    #[inline]
    pub fn drift(&self, p: Point) -> [f64; 2] {
        let g = self.gradient(p);
        [g[1], -g[0]]
    }

    pub fn eval_fields(&self, p: Point) -> FieldSample {
        let grad = self.gradient(p);
        FieldSample {
            h: self.value(p),
            grad,
            drift: [grad[1], -grad[0]],
        }
    }

    /// Gradient by central differences with step `1e-6`.
    pub fn gradient_fd(&self, p: Point) -> [f64; 2] {
        let s = 1e-6;
        [
            (self.value([p[0] + s, p[1]]) - self.value([p[0] - s, p[1]])) / (2.0 * s),
            (self.value([p[0], p[1] + s]) - self.value([p[0], p[1] - s])) / (2.0 * s),
        ]
    }

    /// Newton projection of `p` onto the level set `{H = level}` along `DH`.
    pub fn project_to_level(&self, p: Point, level: f64, iterations: usize) -> Point {
        let mut q = p;
        for _ in 0..iterations {
            let g = self.gradient(q);
            let g2 = dot(g, g);
            if g2 == 0.0 {
                break;
            }
            let r = (self.value(q) - level) / g2;
            q = [q[0] - r * g[0], q[1] - r * g[1]];
        }
        q
    }

    /// Checks the admissibility conditions on critical points, thresholds and
    /// the saddle exponents. Returns every violation found.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let mut errs = Vec::new();
        if self.critical_points.is_empty() {
            errs.push("no critical points".to_string());
        } else {
            let z0 = self.critical_points[0].location;
            if norm(z0) > 1e-9 || self.value(z0).abs() > 1e-12 {
                errs.push(format!(
                    "z_0 must be the origin with H(0) = 0, got ({}, {}) with H = {}",
                    z0[0],
                    z0[1],
                    self.value(z0)
                ));
            }
        }
        for (i, cp) in self.critical_points.iter().enumerate() {
            let g = norm(self.gradient(cp.location));
            if g > 1e-9 {
                errs.push(format!("|DH(z_{i})| = {g:.3e} is not zero"));
            }
        }
        if self.thresholds.outer <= 0.0 {
            errs.push(format!("h_0 = {} must be positive", self.thresholds.outer));
        }
        if self.thresholds.wells.len() + 1 != self.n_points() {
            errs.push(format!(
                "{} well thresholds given for {} minima",
                self.thresholds.wells.len(),
                self.n_points().saturating_sub(1)
            ));
        } else {
            for (k, &h) in self.thresholds.wells.iter().enumerate() {
                let hz = self.critical_points[k + 1].value;
                if !(hz < h && h < 0.0) {
                    errs.push(format!(
                        "threshold h_{} = {h} must satisfy H(z_{}) = {hz} < h < 0",
                        k + 1,
                        k + 1
                    ));
                }
            }
        }
        let SaddleExponents { m, n } = self.exponents;
        if !(m >= 0.0 && n > 0.0 && n < m + 2.0) {
            errs.push(format!("exponents must satisfy m ≥ 0, 0 < n < m + 2 (m = {m}, n = {n})"));
        }
        if self.gradient_bound <= 0.0 || self.hessian_bound <= 0.0 || self.neighborhood_radius <= 0.0 {
            errs.push("A_1, A_2 and R must be positive".to_string());
        }
        if let Some((r, ratio)) = self.gradient_floor_violation() {
            errs.push(format!(
                "|DH| < A_2 |x|^n at |x| = {r:.3e} (ratio {ratio:.6})"
            ));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(GeometryError::InvalidSpec(errs))
        }
    }

    /// Samples `|x| ∈ [1e-4, R]` (log-spaced, 64 directions) and returns the
    /// worst point where `|DH| < A_2 |x|^n (1 - 1e-6)`.
    pub fn gradient_floor_violation(&self) -> Option<(f64, f64)> {
        let r_max = self.neighborhood_radius;
        if r_max <= 1e-4 {
            return None;
        }
        let mut worst: Option<(f64, f64)> = None;
        let n_r = 48;
        let n_dir = 64;
        for k in 0..n_r {
            let r = 1e-4 * (r_max / 1e-4).powf(k as f64 / (n_r - 1) as f64);
            for d in 0..n_dir {
                let th = std::f64::consts::TAU * d as f64 / n_dir as f64;
                let p = [r * th.cos(), r * th.sin()];
                let ratio = norm(self.gradient(p)) / (self.gradient_bound * r.powf(self.exponents.n));
                if ratio < 1.0 - 1e-6 && worst.is_none_or(|w| ratio < w.1) {
                    worst = Some((r, ratio));
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_fields_examples() {
        let harm = HamiltonianSpec::harmonic(0.5);
        let f = harm.eval_fields([1.0, 0.0]);
        assert_eq!(f.h, 0.5);
        assert_eq!(f.grad, [1.0, 0.0]);
        assert_eq!(f.drift, [0.0, -1.0]);

        let dw = HamiltonianSpec::double_well();
        let f = dw.eval_fields([0.0, 0.0]);
        assert_eq!((f.h, f.grad, f.drift), (0.0, [0.0, 0.0], [0.0, 0.0]));
        let f = dw.eval_fields([1.0, 1.0]);
        assert_eq!(f.h, 0.25);
        assert_eq!(f.grad, [0.0, 1.0]);
        assert_eq!(f.drift, [1.0, 0.0]);
    }

    #[test]
    fn builtins_are_admissible() {
        HamiltonianSpec::double_well().validate().unwrap();
        HamiltonianSpec::harmonic(0.5).validate().unwrap();
    }

    #[test]
    fn threshold_outside_well_range_is_rejected() {
        let spec = HamiltonianSpec::double_well_with(Thresholds {
            outer: 0.125,
            wells: vec![-0.3, -0.125],
        });
        match spec.validate() {
            Err(GeometryError::InvalidSpec(v)) => assert_eq!(v.len(), 1, "{v:?}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let dw = HamiltonianSpec::double_well();
        for p in [[0.3, -0.2], [1.2, 0.7], [-0.9, 0.1]] {
            let a = dw.gradient(p);
            let f = dw.gradient_fd(p);
            assert!((a[0] - f[0]).abs() < 1e-8 && (a[1] - f[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn polynomial_ingestion_reproduces_double_well() {
        // (x²-1)²/4 + y²/2 - 1/4 = x⁴/4 - x²/2 + y²/2
        let poly = Polynomial::from_triples(&[(4, 0, 0.25), (2, 0, -0.5), (0, 2, 0.5)]);
        let builtin = HamiltonianSpec::double_well();
        let spec = HamiltonianSpec::from_polynomial(
            poly,
            builtin.thresholds.clone(),
            builtin.exponents,
            (1.0, 0.8, 0.4),
            builtin.domain,
        )
        .unwrap();
        assert_eq!(spec.n_points(), 3);
        for (a, b) in spec.critical_points.iter().zip(&builtin.critical_points) {
            assert!(norm([a.location[0] - b.location[0], a.location[1] - b.location[1]]) < 1e-10);
            assert_eq!(a.kind, b.kind);
        }
    }
}

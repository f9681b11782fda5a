use super::{CriticalKind, CriticalPoint, GeometryError, HamiltonianSpec, Point, Rect};
use crate::norm;

/// Roots closer than this are the same critical point.
const DEDUP_RADIUS: f64 = 1e-6;
const SINGULAR_DET: f64 = 1e-10;

/// Multi-start seeds for Newton's method on `DH = 0`. Only roots inside the
/// seeded rectangle are reported.
#[derive(Debug, Clone, Copy)]
pub struct SeedGrid {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl SeedGrid {
    pub fn covering(rect: Rect, n: usize) -> Self {
        Self { rect, nx: n, ny: n }
    }

    fn seeds(&self) -> impl Iterator<Item = Point> + '_ {
        let fx = |i: usize| {
            if self.nx == 1 {
                0.5 * (self.rect.x_min + self.rect.x_max)
            } else {
                self.rect.x_min + self.rect.width() * i as f64 / (self.nx - 1) as f64
            }
        };
        let fy = |j: usize| {
            if self.ny == 1 {
                0.5 * (self.rect.y_min + self.rect.y_max)
            } else {
                self.rect.y_min + self.rect.height() * j as f64 / (self.ny - 1) as f64
            }
        };
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| [fx(i), fy(j)]))
    }
}

fn newton_root(spec: &HamiltonianSpec, start: Point) -> Option<Point> {
    let mut p = start;
    for _ in 0..100 {
        let g = spec.gradient(p);
        if norm(g) < 1e-15 {
            return Some(p);
        }
        let h = spec.hessian(p);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let step = if det.abs() > 1e-300 {
            [
                (h[1][1] * g[0] - h[0][1] * g[1]) / det,
                (-h[1][0] * g[0] + h[0][0] * g[1]) / det,
            ]
        } else {
            return None;
        };
        p = [p[0] - step[0], p[1] - step[1]];
        if !p[0].is_finite() || !p[1].is_finite() || norm(p) > 1e6 {
            return None;
        }
        if norm(step) < 1e-15 * (1.0 + norm(p)) {
            break;
        }
    }
    (norm(spec.gradient(p)) < 1e-10).then_some(p)
}

/// Locates all critical points of `H` inside the seed rectangle by Newton
/// iteration from every seed, deduplicates them and classifies them from the
/// hessian signature.
///
/// The result lists the point nearest to the origin first, then minima by
/// decreasing `x` (ties by decreasing `y`).
pub fn find_critical_points(
    spec: &HamiltonianSpec,
    seeds: &SeedGrid,
    expected: usize,
) -> Result<Vec<CriticalPoint>, GeometryError> {
    let slack = 1e-9 * (1.0 + seeds.rect.width().max(seeds.rect.height()));
    let inside = |p: Point| {
        p[0] >= seeds.rect.x_min - slack
            && p[0] <= seeds.rect.x_max + slack
            && p[1] >= seeds.rect.y_min - slack
            && p[1] <= seeds.rect.y_max + slack
    };
    let mut roots: Vec<Point> = Vec::new();
    for s in seeds.seeds() {
        if let Some(r) = newton_root(spec, s) {
            if inside(r)
                && roots
                    .iter()
                    .all(|q| norm([q[0] - r[0], q[1] - r[1]]) > DEDUP_RADIUS)
            {
                roots.push(r);
            }
        }
    }

    let degenerate_saddle_ok = spec.exponents.m > 0.0;
    let mut points = Vec::with_capacity(roots.len());
    for r in roots {
        let h = spec.hessian(r);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let kind = if det.abs() <= SINGULAR_DET {
            if degenerate_saddle_ok && norm(r) < DEDUP_RADIUS {
                CriticalKind::Saddle
            } else {
                return Err(GeometryError::DegenerateHessian { x: r[0], y: r[1], det });
            }
        } else if det < 0.0 {
            CriticalKind::Saddle
        } else if h[0][0] > 0.0 {
            CriticalKind::Minimum
        } else {
            // A local maximum cannot occur for an admissible H.
            return Err(GeometryError::InvalidSpec(vec![format!(
                "local maximum at ({}, {})",
                r[0], r[1]
            )]));
        };
        // Snap roots that are zero up to rounding.
        let loc = [snap(r[0]), snap(r[1])];
        points.push(CriticalPoint {
            location: loc,
            kind,
            value: spec.value(loc),
        });
    }
    points.sort_by(|a, b| {
        let da = norm(a.location) < DEDUP_RADIUS;
        let db = norm(b.location) < DEDUP_RADIUS;
        db.cmp(&da)
            .then(b.location[0].total_cmp(&a.location[0]))
            .then(b.location[1].total_cmp(&a.location[1]))
    });
    if points.len() != expected {
        return Err(GeometryError::CountMismatch {
            found: points.len(),
            expected,
        });
    }
    Ok(points)
}

fn snap(v: f64) -> f64 {
    if v.abs() < 1e-14 {
        0.0
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_well_has_three_critical_points() {
        let spec = HamiltonianSpec::double_well();
        let pts = find_critical_points(&spec, &SeedGrid::covering(spec.domain, 21), 3).unwrap();
        let expect = [([0.0, 0.0], CriticalKind::Saddle, 0.0), ([1.0, 0.0], CriticalKind::Minimum, -0.25), ([-1.0, 0.0], CriticalKind::Minimum, -0.25)];
        for (p, (loc, kind, val)) in pts.iter().zip(expect) {
            assert!(norm([p.location[0] - loc[0], p.location[1] - loc[1]]) < 1e-10);
            assert_eq!(p.kind, kind);
            assert!((p.value - val).abs() < 1e-14);
        }
    }

    #[test]
    fn harmonic_single_minimum() {
        let spec = HamiltonianSpec::harmonic(0.5);
        let pts = find_critical_points(&spec, &SeedGrid::covering(spec.domain, 11), 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].kind, CriticalKind::Minimum);
        assert_eq!(pts[0].location, [0.0, 0.0]);
    }

    #[test]
    fn seeds_restricted_to_left_half_miss_a_minimum() {
        let spec = HamiltonianSpec::double_well();
        let rect = Rect { x_max: 0.0, ..spec.domain };
        let err = find_critical_points(&spec, &SeedGrid::covering(rect, 21), 3).unwrap_err();
        assert_eq!(err, GeometryError::CountMismatch { found: 2, expected: 3 });
    }

    #[test]
    fn degenerate_root_is_reported() {
        // H = x^4 + y^2 has a singular hessian at the origin.
        let poly = crate::polynomial::Polynomial::from_triples(&[(4, 0, 1.0), (0, 2, 1.0)]);
        let mut spec = HamiltonianSpec::harmonic(0.5);
        spec.kind = super::super::HamiltonianKind::Polynomial(poly);
        let r = find_critical_points(&spec, &SeedGrid::covering(spec.domain, 5), 1);
        assert!(matches!(r, Err(GeometryError::DegenerateHessian { .. })), "{r:?}");
    }
}

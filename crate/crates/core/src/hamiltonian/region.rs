use super::{GeometryError, HamiltonianSpec, Point, Rect};
use crate::norm;
use std::collections::VecDeque;

/// Label of a point of the plane relative to `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionIndex {
    /// Inside `Ω_i` (edge `i`).
    Edge(usize),
    /// On the separatrix `{H = 0}` up to the zero-band tolerance.
    ZeroLevel,
    Outside,
}

/// Uniform square lattice `origin + (i, j) * spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub origin: Point,
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Lattice {
    /// Lattice over `rect` with `nx` nodes along `x` and square cells.
    pub fn over(rect: Rect, nx: usize) -> Self {
        let spacing = rect.width() / (nx - 1) as f64;
        let ny = (rect.height() / spacing).ceil() as usize + 1;
        let y0 = 0.5 * (rect.y_min + rect.y_max) - 0.5 * spacing * (ny - 1) as f64;
        Self {
            origin: [rect.x_min, y0],
            spacing,
            nx,
            ny,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point {
        [
            self.origin[0] + i as f64 * self.spacing,
            self.origin[1] + j as f64 * self.spacing,
        ]
    }

    /// Lower-left node of the cell containing `p` and the local coordinates
    /// in `[0, 1]²`, or `None` outside the lattice.
    pub fn locate(&self, p: Point) -> Option<(usize, usize, f64, f64)> {
        let fx = (p[0] - self.origin[0]) / self.spacing;
        let fy = (p[1] - self.origin[1]) / self.spacing;
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (nx, ny) = ((self.nx - 1) as f64, (self.ny - 1) as f64);
        if fx > nx || fy > ny {
            return None;
        }
        let i = (fx.floor() as usize).min(self.nx - 2);
        let j = (fy.floor() as usize).min(self.ny - 2);
        Some((i, j, fx - i as f64, fy - j as f64))
    }

    pub fn neighbors4(&self, k: usize) -> impl Iterator<Item = usize> {
        let (i, j) = self.coords(k);
        let (nx, ny) = (self.nx, self.ny);
        [
            (i > 0).then(|| k - 1),
            (i + 1 < nx).then(|| k + 1),
            (j > 0).then(|| k - nx),
            (j + 1 < ny).then(|| k + nx),
        ]
        .into_iter()
        .flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Component {
    Positive,
    Well(usize),
    Zero,
    Unreached,
}

/// Reference classification of lattice nodes into the components of
/// `{H > 0}`, `{H < 0}` (by flood fill from each minimum) and the zero band.
#[derive(Debug, Clone)]
pub struct RegionMap {
    lattice: Lattice,
    h: Vec<f64>,
    band: Vec<f64>,
    component: Vec<Component>,
    outer: f64,
    wells: Vec<f64>,
}

impl RegionMap {
    pub fn build(spec: &HamiltonianSpec, lattice: Lattice) -> Self {
        let n = lattice.len();
        let mut h = Vec::with_capacity(n);
        let mut grad = Vec::with_capacity(n);
        for k in 0..n {
            let (i, j) = lattice.coords(k);
            let p = lattice.point(i, j);
            h.push(spec.value(p));
            grad.push(norm(spec.gradient(p)));
        }
        let half_diag = 0.5 * std::f64::consts::SQRT_2 * lattice.spacing;
        let band: Vec<f64> = (0..n)
            .map(|k| {
                let gmax = lattice.neighbors4(k).fold(grad[k], |m, q| m.max(grad[q]));
                half_diag * gmax
            })
            .collect();

        let mut component: Vec<Component> = (0..n)
            .map(|k| {
                if h[k].abs() <= band[k] {
                    Component::Zero
                } else if h[k] > 0.0 {
                    Component::Positive
                } else {
                    Component::Unreached
                }
            })
            .collect();

        let mut queue = VecDeque::new();
        for (w, cp) in spec.critical_points.iter().enumerate().skip(1) {
            let Some((i, j, fx, fy)) = lattice.locate(cp.location) else {
                continue;
            };
            let i = if fx > 0.5 { i + 1 } else { i };
            let j = if fy > 0.5 { j + 1 } else { j };
            let seed = lattice.index(i, j);
            if component[seed] != Component::Unreached {
                continue;
            }
            component[seed] = Component::Well(w);
            queue.push_back(seed);
            while let Some(k) = queue.pop_front() {
                for q in lattice.neighbors4(k) {
                    if component[q] == Component::Unreached {
                        component[q] = Component::Well(w);
                        queue.push_back(q);
                    }
                }
            }
        }

        Self {
            lattice,
            h,
            band,
            component,
            outer: spec.thresholds.outer,
            wells: spec.thresholds.wells.clone(),
        }
    }

    /// Reference map over the spec's domain box.
    pub fn reference(spec: &HamiltonianSpec, nx: usize) -> Self {
        Self::build(spec, Lattice::over(spec.domain, nx))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn h_at_node(&self, k: usize) -> f64 {
        self.h[k]
    }

    fn label(&self, comp: Component, h: f64, at: Point) -> Result<RegionIndex, GeometryError> {
        Ok(match comp {
            Component::Zero => RegionIndex::ZeroLevel,
            Component::Positive => {
                if h < self.outer {
                    RegionIndex::Edge(0)
                } else {
                    RegionIndex::Outside
                }
            }
            Component::Well(w) => {
                if h > self.wells[w - 1] {
                    RegionIndex::Edge(w)
                } else {
                    RegionIndex::Outside
                }
            }
            Component::Unreached => {
                return Err(GeometryError::UnclassifiedPoint { x: at[0], y: at[1] })
            }
        })
    }

    /// Connected component of `{H ≠ 0}` containing `p` ignoring the
    /// thresholds: `Some(0)` for `D_0`, `Some(i)` for the well `D_i`.
    pub fn component_of(&self, spec: &HamiltonianSpec, p: Point) -> Option<usize> {
        match self.region_of(spec, p) {
            Ok(RegionIndex::Edge(i)) => Some(i),
            Ok(RegionIndex::ZeroLevel) | Err(_) => None,
            Ok(RegionIndex::Outside) => {
                let (i, j, fx, fy) = self.lattice.locate(p)?;
                if spec.value(p) > 0.0 {
                    return Some(0);
                }
                let l = &self.lattice;
                let k = l.index(
                    if fx > 0.5 { i + 1 } else { i },
                    if fy > 0.5 { j + 1 } else { j },
                );
                match self.component[k] {
                    Component::Well(w) => Some(w),
                    _ => None,
                }
            }
        }
    }

    /// Edge whose closure `Ω̄_i` contains `p`, judged by the component and
    /// the closed level interval. Points in the zero band give `None`.
    pub fn closure_edge(&self, spec: &HamiltonianSpec, p: Point) -> Option<usize> {
        let h = spec.value(p);
        let i = self.component_of(spec, p)?;
        let (lo, hi) = spec.thresholds.interval(i);
        let slack = 1e-13 * (1.0 + h.abs());
        (lo - slack <= h && h <= hi + slack).then_some(i)
    }

    /// Minimum of `f` over `Ω̄`: best lattice node of `Ω̄`, then compass
    /// search from the eight best nodes, each confined to its own edge.
    /// Trial points leaving through a threshold level are projected back
    /// onto it, so the search can slide along the boundary.
    pub fn minimize_on_closure(
        &self,
        spec: &HamiltonianSpec,
        f: impl Fn(Point) -> f64,
    ) -> (f64, Point) {
        let l = &self.lattice;
        let mut nodes: Vec<(f64, Point)> = (0..l.len())
            .filter(|&k| {
                matches!(
                    self.node_region(k),
                    Ok(RegionIndex::Edge(_) | RegionIndex::ZeroLevel)
                )
            })
            .map(|k| {
                let (i, j) = l.coords(k);
                let p = l.point(i, j);
                (f(p), p)
            })
            .filter(|(v, _)| !v.is_nan())
            .collect();
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        let Some(&first) = nodes.first() else {
            return (f64::NAN, [f64::NAN; 2]);
        };
        let mut best = first;
        for &(v0, p0) in nodes.iter().take(8) {
            let Some(edge) = self.closure_edge(spec, p0) else {
                continue;
            };
            let (mut p, mut v, mut h) = (p0, v0, l.spacing);
            while h > 1e-12 {
                let mut moved = false;
                for d in COMPASS {
                    let mut q = [p[0] + h * d[0], p[1] + h * d[1]];
                    if self.closure_edge(spec, q) != Some(edge) {
                        let (lo, hi) = spec.thresholds.interval(edge);
                        let hq = spec.value(q);
                        let level = if hq > hi { hi } else if hq < lo { lo } else { continue };
                        if level == 0.0 {
                            continue;
                        }
                        q = spec.project_to_level(q, level, 3);
                        if self.closure_edge(spec, q) != Some(edge) {
                            continue;
                        }
                    }
                    let w = f(q);
                    if w < v {
                        (p, v, moved) = (q, w, true);
                    }
                }
                if !moved {
                    h *= 0.5;
                }
            }
            if v < best.0 {
                best = (v, p);
            }
        }
        best
    }

    /// Label of lattice node `k`.
    pub fn node_region(&self, k: usize) -> Result<RegionIndex, GeometryError> {
        let (i, j) = self.lattice.coords(k);
        self.label(self.component[k], self.h[k], self.lattice.point(i, j))
    }

    /// Label of an arbitrary point. The zero band at `p` is half the cell
    /// diameter times the largest `|DH|` on the enclosing cell.
    pub fn region_of(&self, spec: &HamiltonianSpec, p: Point) -> Result<RegionIndex, GeometryError> {
        let Some((i, j, fx, fy)) = self.lattice.locate(p) else {
            return Ok(RegionIndex::Outside);
        };
        let l = &self.lattice;
        let corners = [
            l.index(i, j),
            l.index(i + 1, j),
            l.index(i, j + 1),
            l.index(i + 1, j + 1),
        ];
        let band = corners.iter().fold(0.0f64, |m, &c| m.max(self.band[c]));
        let h = spec.value(p);
        if h.abs() <= band {
            return Ok(RegionIndex::ZeroLevel);
        }
        if h > 0.0 {
            return self.label(Component::Positive, h, p);
        }
        // Nearest corner first.
        let weights = [
            (1.0 - fx) * (1.0 - fy),
            fx * (1.0 - fy),
            (1.0 - fx) * fy,
            fx * fy,
        ];
        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
        for o in order {
            if let Component::Well(w) = self.component[corners[o]] {
                return self.label(Component::Well(w), h, p);
            }
        }
        Err(GeometryError::UnclassifiedPoint { x: p[0], y: p[1] })
    }
}

const D: f64 = std::f64::consts::FRAC_1_SQRT_2;
const COMPASS: [[f64; 2]; 8] = [
    [1.0, 0.0],
    [-1.0, 0.0],
    [0.0, 1.0],
    [0.0, -1.0],
    [D, D],
    [D, -D],
    [-D, D],
    [-D, -D],
];

/// Default reference resolution used by [`HamiltonianSpec::region_of`].
pub const REFERENCE_RESOLUTION: usize = 801;

impl HamiltonianSpec {
    /// Convenience wrapper building a reference map on every call; build a
    /// [`RegionMap`] once when classifying many points.
    pub fn region_of(&self, p: Point) -> Result<RegionIndex, GeometryError> {
        RegionMap::reference(self, REFERENCE_RESOLUTION).region_of(self, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Thresholds;

    #[test]
    fn region_examples() {
        let spec = HamiltonianSpec::double_well();
        let map = RegionMap::reference(&spec, 401);
        assert_eq!(map.region_of(&spec, [1.0, 0.0]), Ok(RegionIndex::Outside));
        assert_eq!(map.component_of(&spec, [1.0, 0.0]), Some(1));
        assert_eq!(map.component_of(&spec, [-1.0, 0.0]), Some(2));
        // (1, 0) is the minimum itself: below h_1 it is cut out of Ω_1, so
        // probe a point of the well above the threshold instead.
        assert_eq!(map.region_of(&spec, [1.35, 0.0]), Ok(RegionIndex::Edge(1)));
        assert_eq!(map.region_of(&spec, [-1.35, 0.0]), Ok(RegionIndex::Edge(2)));
        assert_eq!(map.region_of(&spec, [0.0, 2.0]), Ok(RegionIndex::Outside));
        assert_eq!(map.region_of(&spec, [0.0, 0.0]), Ok(RegionIndex::ZeroLevel));
        assert_eq!(map.region_of(&spec, [0.0, 0.3]), Ok(RegionIndex::Edge(0)));
    }

    #[test]
    fn well_component_labels_follow_minimum() {
        // Thresholds just above the minimum level leave almost the whole well.
        let spec = HamiltonianSpec::double_well_with(Thresholds {
            outer: 0.125,
            wells: vec![-0.2499, -0.2499],
        });
        let map = RegionMap::reference(&spec, 401);
        assert_eq!(map.region_of(&spec, [1.05, 0.0]), Ok(RegionIndex::Edge(1)));
        assert_eq!(map.region_of(&spec, [-1.05, 0.0]), Ok(RegionIndex::Edge(2)));
    }

    #[test]
    fn every_node_gets_one_label() {
        let spec = HamiltonianSpec::double_well();
        let map = RegionMap::reference(&spec, 201);
        for k in 0..map.lattice().len() {
            assert!(map.node_region(k).is_ok());
        }
    }

    #[test]
    fn unreached_negative_component_is_unclassified() {
        // Drop the second minimum: its well is never flood-filled.
        let mut spec = HamiltonianSpec::double_well();
        spec.critical_points.truncate(2);
        spec.thresholds.wells.truncate(1);
        let map = RegionMap::reference(&spec, 201);
        assert!(matches!(
            map.region_of(&spec, [-1.35, 0.0]),
            Err(GeometryError::UnclassifiedPoint { .. })
        ));
    }
}

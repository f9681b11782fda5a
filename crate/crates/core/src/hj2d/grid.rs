use super::Hj2dError;
use crate::gfamily::BoundaryDatum;
use crate::hamiltonian::{HamiltonianSpec, Lattice, RegionIndex, RegionMap};

pub const MIN_RESOLUTION: usize = 64;
/// Fewest interior nodes along the longest grid line through each edge.
pub const MIN_RUN: usize = 8;

const NEIGHBOURS8: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    /// Next to the interior, approximating `∂_iΩ`.
    Boundary(usize),
    Outside,
}

#[derive(Debug, Clone)]
pub struct MaskedGrid {
    pub lattice: Lattice,
    pub class: Vec<NodeClass>,
    /// `Edge(i)` or `ZeroLevel` for interior nodes, `Outside` otherwise.
    pub region: Vec<RegionIndex>,
    /// `H` at every node.
    pub h: Vec<f64>,
    /// Boundary datum at boundary nodes, NaN elsewhere.
    pub g: Vec<f64>,
}

impl MaskedGrid {
    pub fn spacing(&self) -> f64 {
        self.lattice.spacing
    }

    pub fn is_active(&self, k: usize) -> bool {
        self.class[k] != NodeClass::Outside
    }

    pub fn count(&self, pred: impl Fn(NodeClass) -> bool) -> usize {
        self.class.iter().filter(|c| pred(**c)).count()
    }

    /// Connected components (4-neighbour) of nodes satisfying `pred`.
    pub fn components(&self, pred: impl Fn(usize) -> bool) -> usize {
        self.count_components(pred, false)
    }

    /// Same with diagonal neighbours, which is what a one-node-thick
    /// boundary ring needs.
    pub fn components8(&self, pred: impl Fn(usize) -> bool) -> usize {
        self.count_components(pred, true)
    }

    fn count_components(&self, pred: impl Fn(usize) -> bool, diagonal: bool) -> usize {
        let l = &self.lattice;
        let n = self.lattice.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] || !pred(s) {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(k) = stack.pop() {
                let (i, j) = l.coords(k);
                for (di, dj) in NEIGHBOURS8 {
                    if !diagonal && di != 0 && dj != 0 {
                        continue;
                    }
                    let (qi, qj) = (i as i64 + di, j as i64 + dj);
                    if qi < 0 || qj < 0 || qi >= l.nx as i64 || qj >= l.ny as i64 {
                        continue;
                    }
                    let q = l.index(qi as usize, qj as usize);
                    if !seen[q] && pred(q) {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        count
    }

    /// `max |g|` over boundary nodes.
    pub fn max_abs_g(&self) -> f64 {
        self.g
            .iter()
            .filter(|v| !v.is_nan())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Longest run of interior nodes of `edge` along any grid row or column.
    pub fn longest_run(&self, edge: usize) -> usize {
        let l = &self.lattice;
        let inside = |i: usize, j: usize| self.region[l.index(i, j)] == RegionIndex::Edge(edge);
        let mut best = 0;
        for j in 0..l.ny {
            let mut run = 0;
            for i in 0..l.nx {
                run = if inside(i, j) { run + 1 } else { 0 };
                best = best.max(run);
            }
        }
        for i in 0..l.nx {
            let mut run = 0;
            for j in 0..l.ny {
                run = if inside(i, j) { run + 1 } else { 0 };
                best = best.max(run);
            }
        }
        best
    }
}

/// Classifies a lattice with `resolution` nodes along `x` over the spec's
/// domain box. Interior nodes are those of `Ω` (the zero band included);
/// outside nodes next to an interior node become boundary nodes and carry
/// `g` at their one-step Newton projection onto the threshold level.
pub fn build_masked_grid(
    spec: &HamiltonianSpec,
    resolution: usize,
    datum: &BoundaryDatum,
) -> Result<MaskedGrid, Hj2dError> {
    if resolution < MIN_RESOLUTION {
        return Err(Hj2dError::TooCoarse(format!(
            "resolution {resolution} < {MIN_RESOLUTION}"
        )));
    }
    let lattice = Lattice::over(spec.domain, resolution);
    let map = RegionMap::build(spec, lattice);
    let n = lattice.len();
    let mut region = Vec::with_capacity(n);
    for k in 0..n {
        region.push(match map.node_region(k)? {
            r @ (RegionIndex::Edge(_) | RegionIndex::ZeroLevel) => r,
            RegionIndex::Outside => RegionIndex::Outside,
        });
    }
    let mut class = vec![NodeClass::Outside; n];
    let mut g = vec![f64::NAN; n];
    for k in 0..n {
        if region[k] == RegionIndex::Outside {
            continue;
        }
        let (i, j) = lattice.coords(k);
        if i == 0 || j == 0 || i + 1 == lattice.nx || j + 1 == lattice.ny {
            return Err(Hj2dError::DomainTooSmall);
        }
        class[k] = NodeClass::Interior;
    }
    for k in 0..n {
        if class[k] != NodeClass::Outside
            || !lattice
                .neighbors4(k)
                .any(|q| region[q] != RegionIndex::Outside)
        {
            continue;
        }
        let (i, j) = lattice.coords(k);
        let p = lattice.point(i, j);
        let edge = if map.h_at_node(k) > 0.0 {
            0
        } else {
            match map.component_of(spec, p) {
                Some(e) => e,
                None => continue,
            }
        };
        class[k] = NodeClass::Boundary(edge);
        let target = spec.project_to_level(p, spec.thresholds.level(edge), 1);
        g[k] = datum.eval(spec, target);
    }
    let grid = MaskedGrid {
        lattice,
        class,
        region,
        h: (0..n).map(|k| map.h_at_node(k)).collect(),
        g,
    };
    for e in 0..spec.n_edges() {
        let run = grid.longest_run(e);
        if run < MIN_RUN {
            return Err(Hj2dError::TooCoarse(format!(
                "edge {e} has at most {run} interior nodes across"
            )));
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_well_mask_topology() {
        let spec = HamiltonianSpec::double_well();
        let grid = build_masked_grid(&spec, 256, &BoundaryDatum::ScaledHamiltonian(8.0)).unwrap();
        // Each edge alone is connected; the zero band joins them into one.
        for e in 0..3 {
            assert_eq!(grid.components(|k| grid.region[k] == RegionIndex::Edge(e)), 1);
        }
        assert_eq!(grid.components(|k| matches!(grid.region[k], RegionIndex::Edge(_))), 3);
        assert_eq!(grid.components(|k| grid.class[k] == NodeClass::Interior), 1);
        // Boundary nodes sit within one cell's H-variation of their level.
        let s = grid.spacing();
        for k in 0..grid.lattice.len() {
            if let NodeClass::Boundary(e) = grid.class[k] {
                let (i, j) = grid.lattice.coords(k);
                let p = grid.lattice.point(i, j);
                let gmax = crate::norm(spec.gradient(p)) + 2.0 * s * 3.0;
                assert!((grid.h[k] - spec.thresholds.level(e)).abs() <= s * gmax);
                let expect = if e == 0 { 1.0 } else { -1.0 };
                assert!((grid.g[k] - expect).abs() < 1e-2, "{}", grid.g[k]);
            }
        }
    }

    #[test]
    fn harmonic_disk_and_ring() {
        let spec = HamiltonianSpec::harmonic(0.5);
        let grid = build_masked_grid(&spec, 64, &BoundaryDatum::Constant(1.0)).unwrap();
        assert_eq!(grid.components(|k| grid.class[k] == NodeClass::Interior), 1);
        assert_eq!(grid.components8(|k| matches!(grid.class[k], NodeClass::Boundary(_))), 1);
        assert!(grid.class.iter().all(|c| !matches!(c, NodeClass::Boundary(e) if *e != 0)));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let spec = HamiltonianSpec::double_well();
        assert!(matches!(
            build_masked_grid(&spec, 16, &BoundaryDatum::Constant(1.0)),
            Err(Hj2dError::TooCoarse(_))
        ));
    }
}

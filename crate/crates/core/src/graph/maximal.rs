use super::edge::{residuals, solve_edge_from, solve_edge_unchecked, EdgeScheme};
use super::{solve_edge, EdgeGrid, EdgeSolution, GraphError, GraphOptions, NodeEnd};
use crate::level_set::EdgeProfile;
use rayon::prelude::*;

/// Allowed one-sided node residual, relative to `1 + C`.
const NODE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSolution {
    pub lambda: f64,
    /// Shared node value.
    pub d: f64,
    pub edges: Vec<EdgeSolution>,
    /// Node values of the free-node solves, when computed.
    pub free_values: Vec<f64>,
    pub bound: f64,
}

impl GraphSolution {
    pub fn value(&self, edge: usize, h: f64) -> f64 {
        self.edges[edge].value(h)
    }

    /// `max u - min u` over all edges.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .edges
            .iter()
            .flat_map(|e| e.u.iter())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            });
        hi - lo
    }
}

/// Outer end of the edge a profile tabulates: its level of largest `|h|`.
fn outer_level(p: &EdgeProfile) -> f64 {
    let (a, b) = (p.h_grid[0], p.h_grid[p.n_h() - 1]);
    if a.abs() > b.abs() {
        a
    } else {
        b
    }
}

fn check_counts(profiles: &[EdgeProfile], data: &[f64]) -> Result<(), GraphError> {
    if profiles.len() != data.len() {
        return Err(GraphError::CountMismatch {
            expected: profiles.len(),
            got: data.len(),
        });
    }
    Ok(())
}

fn graph_bound(profiles: &[EdgeProfile], data: &[f64], lambda: f64, opts: &GraphOptions) -> f64 {
    profiles
        .iter()
        .zip(data)
        .map(|(p, &g)| {
            let grid = EdgeGrid::new(outer_level(p), opts);
            let s = EdgeScheme::new(p, &grid, lambda, opts.godunov);
            (s.sup_abs_at_zero() / lambda).max(g.abs())
        })
        .fold(0.0, f64::max)
}

/// Node residual that a change of size `delta` in `u` can produce next to
/// the node, where the fine cells amplify it by the scheme's sensitivity.
/// The factor covers solve errors of a few tolerances on either side.
fn node_slack(scheme: &EdgeScheme, grid: &EdgeGrid, delta: f64) -> f64 {
    4.0 * delta * scheme.sensitivity(grid.node_index())
}

/// Every edge solved with the node pinned at `d`.
pub fn solve_graph_at(
    profiles: &[EdgeProfile],
    data: &[f64],
    lambda: f64,
    d: f64,
    opts: &GraphOptions,
) -> Result<GraphSolution, GraphError> {
    check_counts(profiles, data)?;
    let edges = profiles
        .par_iter()
        .zip(data.par_iter())
        .map(|(p, &g)| {
            let grid = EdgeGrid::new(outer_level(p), opts);
            solve_edge(p, &grid, NodeEnd::Dirichlet(d), g, lambda, opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GraphSolution {
        lambda,
        d,
        edges,
        free_values: Vec::new(),
        bound: graph_bound(profiles, data, lambda, opts),
    })
}

/// Maximal solution: the largest node value each edge admits on its own
/// (free-node solves), minimised over edges, then every edge re-solved with
/// that node value.
pub fn solve_graph_maximal(
    profiles: &[EdgeProfile],
    data: &[f64],
    lambda: f64,
    opts: &GraphOptions,
) -> Result<GraphSolution, GraphError> {
    check_counts(profiles, data)?;
    let free = profiles
        .par_iter()
        .zip(data.par_iter())
        .map(|(p, &g)| {
            let grid = EdgeGrid::new(outer_level(p), opts);
            solve_edge(p, &grid, NodeEnd::Free, g, lambda, opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let free_values: Vec<f64> = free.iter().map(|e| e.node_value).collect();
    let d = free_values.iter().copied().fold(f64::INFINITY, f64::min);
    // Each free solution is a supersolution with the node lowered to `d`,
    // and the same solution shifted down by `free - d` is a subsolution, so
    // the re-solve stays within `free - d` of it.
    let edges = profiles
        .par_iter()
        .zip(data.par_iter())
        .zip(free.par_iter())
        .map(|((p, &g), f)| solve_edge_from(p, &f.grid, NodeEnd::Dirichlet(d), g, lambda, opts, Some(&f.u)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut gs = GraphSolution {
        lambda,
        d,
        edges,
        free_values: Vec::new(),
        bound: graph_bound(profiles, data, lambda, opts),
    };
    for ((e, p), &fv) in gs.edges.iter().zip(profiles).zip(&free_values) {
        let scheme = EdgeScheme::new(p, &e.grid, lambda, opts.godunov);
        let slack = node_slack(&scheme, &e.grid, fv - d + opts.tol * (1.0 + e.bound));
        let tol = NODE_TOL * (1.0 + gs.bound) + slack;
        if e.node_residual > tol || e.node_value != d {
            return Err(GraphError::Inconsistent {
                edge: e.edge,
                residual: e.node_residual,
            });
        }
    }
    gs.free_values = free_values;
    Ok(gs)
}

/// Largest node value on the grid `C - kδ`, `δ = step_rel · 2C`, for which
/// every edge's Dirichlet solution is a subsolution at the node.
pub fn oracle_node_scan(
    profiles: &[EdgeProfile],
    data: &[f64],
    lambda: f64,
    opts: &GraphOptions,
) -> Result<(f64, f64), GraphError> {
    check_counts(profiles, data)?;
    let c = graph_bound(profiles, data, lambda, opts);
    let step = opts.oracle_step_rel * 2.0 * c.max(f64::MIN_POSITIVE);
    let tol = NODE_TOL * (1.0 + c);
    let grids: Vec<EdgeGrid> = profiles
        .iter()
        .map(|p| EdgeGrid::new(outer_level(p), opts))
        .collect();
    let slack: Vec<f64> = profiles
        .iter()
        .zip(&grids)
        .map(|(p, g)| {
            let scheme = EdgeScheme::new(p, g, lambda, opts.godunov);
            node_slack(&scheme, g, opts.tol * (1.0 + c))
        })
        .collect();
    let mut warm: Vec<Option<Vec<f64>>> = vec![None; profiles.len()];
    let steps = (2.0 * c / step).round() as usize;
    for k in 0..=steps {
        let d = c - k as f64 * step;
        let mut feasible = true;
        for (e, p) in profiles.iter().enumerate() {
            let s = solve_edge_unchecked(
                p,
                &grids[e],
                NodeEnd::Dirichlet(d),
                data[e],
                lambda,
                opts,
                warm[e].as_deref(),
            )?;
            feasible &= s.node_residual <= tol + slack[e];
            warm[e] = Some(s.u);
        }
        if feasible {
            return Ok((d, step));
        }
    }
    Err(GraphError::NoFeasible { d_min: -c })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub residuals: Vec<f64>,
    pub residual_tol: f64,
    /// `u_i(h_i) - datum_i`, positive when the boundary inequality fails.
    pub boundary_excess: Vec<f64>,
    /// `|u_i(0) - d|` per edge.
    pub node_mismatch: Vec<f64>,
    /// Successive differences exceeding the coercivity envelope.
    pub modulus_violations: usize,
    /// Against a reference: below it everywhere and strictly below at the
    /// node.
    pub dominated: Option<bool>,
    /// Against a reference: above it somewhere, so the reference is not
    /// maximal.
    pub exceeds_reference: Option<bool>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| *r <= self.residual_tol)
            && self.boundary_excess.iter().all(|e| *e <= self.residual_tol)
            && self.node_mismatch.iter().all(|m| *m == 0.0)
            && self.modulus_violations == 0
            && self.exceeds_reference != Some(true)
    }
}

/// Recomputes residuals, the boundary inequality, node continuity and the
/// modulus of continuity implied by coercivity; optionally compares against
/// a reference (maximal) solution.
pub fn verify_solution(
    gs: &GraphSolution,
    profiles: &[EdgeProfile],
    opts: &GraphOptions,
    reference: Option<&GraphSolution>,
) -> VerifyReport {
    let lambda = gs.lambda;
    let mut rep = VerifyReport {
        residual_tol: 10.0 * opts.tol * (1.0 + gs.bound),
        ..Default::default()
    };
    for (e, p) in gs.edges.iter().zip(profiles) {
        let scheme = EdgeScheme::new(p, &e.grid, lambda, opts.godunov);
        let r = residuals(&scheme, &e.grid, &e.u, e.boundary_datum, NodeEnd::Dirichlet(gs.d));
        rep.residuals.push(r.into_iter().fold(0.0, f64::max));
        rep.boundary_excess
            .push(e.u[e.grid.outer_index()] - e.boundary_datum);
        rep.node_mismatch
            .push((e.u[e.grid.node_index()] - gs.d).abs());
        if p.nu > 0.0 {
            let reach = lambda * gs.bound + p.m;
            for k in 0..e.grid.len() - 1 {
                let (h0, h1) = (e.grid.h[k], e.grid.h[k + 1]);
                let speed = p.speed_at(h0).min(p.speed_at(h1));
                let bound = reach / (p.nu * speed) * (h1 - h0);
                if (e.u[k + 1] - e.u[k]).abs() > bound * (1.0 + 1e-6) + rep.residual_tol {
                    rep.modulus_violations += 1;
                }
            }
        }
    }
    if let Some(r) = reference {
        let tol = rep.residual_tol;
        let mut above = false;
        let mut below_everywhere = true;
        for (e, re) in gs.edges.iter().zip(&r.edges) {
            for (k, &h) in e.grid.h.iter().enumerate() {
                let diff = e.u[k] - re.value(h);
                above |= diff > tol;
                below_everywhere &= diff <= tol;
            }
        }
        rep.exceeds_reference = Some(above);
        rep.dominated = Some(below_everywhere && gs.d < r.d - tol);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::super::edge::tests::fixture;
    use super::*;

    fn opts() -> GraphOptions {
        GraphOptions {
            n_uniform: 500,
            ..Default::default()
        }
    }

    #[test]
    fn symmetric_abs_pair_has_zero_node_value() {
        let ps = [
            fixture(0, 1.0, 4.0, f64::abs, 1.0),
            fixture(1, -1.0, 4.0, f64::abs, 1.0),
        ];
        let gs = solve_graph_maximal(&ps, &[0.0, 0.0], 1.0, &opts()).unwrap();
        assert_eq!(gs.d, 0.0);
        assert!(gs.edges.iter().all(|e| e.u.iter().all(|v| v.abs() < 1e-12)));
        let (d, step) = oracle_node_scan(&ps, &[0.0, 0.0], 1.0, &opts()).unwrap_or((f64::NAN, 0.0));
        // C = 0 here, so the oracle's grid is the single point 0.
        assert_eq!(d, 0.0);
        assert!(step >= 0.0);
    }

    #[test]
    fn constant_edges_pin_the_node_at_one() {
        let ps = [
            fixture(0, 1.0, 4.0, |_| -1.0, 0.0),
            fixture(1, -1.0, 4.0, |_| -1.0, 0.0),
        ];
        let gs = solve_graph_maximal(&ps, &[2.0, 2.0], 1.0, &opts()).unwrap();
        assert!((gs.d - 1.0).abs() < 1e-10);
        let (d, step) = oracle_node_scan(&ps, &[2.0, 2.0], 1.0, &opts()).unwrap();
        assert!((d - gs.d).abs() <= step);
    }

    /// Data 0 on edge A and -1 on edge B: B's largest admissible node value
    /// is `-e^{-1}`, reached by `u_B(h) = -e^{-(1+h)}` on `J_B = (-1, 0)`.
    #[test]
    fn mixed_data_pair() {
        let ps = [
            fixture(0, 1.0, 4.0, f64::abs, 1.0),
            fixture(1, -1.0, 4.0, f64::abs, 1.0),
        ];
        let o = GraphOptions {
            n_uniform: 2000,
            ..Default::default()
        };
        let gs = solve_graph_maximal(&ps, &[0.0, -1.0], 1.0, &o).unwrap();
        let expect = -(-1.0f64).exp();
        assert!((gs.free_values[0]).abs() < 1e-12);
        assert!((gs.d - expect).abs() < 1e-3, "{}", gs.d);
        for (k, &h) in gs.edges[1].grid.h.iter().enumerate() {
            assert!((gs.edges[1].u[k] + (-(1.0 + h)).exp()).abs() < 1e-3);
        }
        // Edge A then carries d e^{-h}.
        for (k, &h) in gs.edges[0].grid.h.iter().enumerate() {
            assert!((gs.edges[0].u[k] - gs.d * (-h).exp()).abs() < 1e-3);
        }
        let (d, step) = oracle_node_scan(&ps, &[0.0, -1.0], 1.0, &o).unwrap();
        assert!((d - gs.d).abs() <= step, "{d} {}", gs.d);
        assert!(verify_solution(&gs, &ps, &o, None).passed());
    }

    #[test]
    fn verification_flags_corruption_and_domination() {
        let ps = [
            fixture(0, 1.0, 4.0, f64::abs, 1.0),
            fixture(1, -1.0, 4.0, f64::abs, 1.0),
        ];
        let data = [0.0, -1.0];
        let o = opts();
        let gs = solve_graph_maximal(&ps, &data, 1.0, &o).unwrap();
        let rep = verify_solution(&gs, &ps, &o, Some(&gs));
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.dominated, Some(false));

        let mut bad = gs.clone();
        let ni = bad.edges[0].grid.node_index();
        bad.edges[0].u[ni] = gs.d + 0.1;
        let rep = verify_solution(&bad, &ps, &o, None);
        assert!(!rep.passed());
        assert!(rep.node_mismatch[0] > 0.09);

        let low = solve_graph_at(&ps, &data, 1.0, gs.d - 0.2, &o).unwrap();
        let rep = verify_solution(&low, &ps, &o, Some(&gs));
        assert!(rep.residuals.iter().all(|r| *r <= rep.residual_tol));
        assert_eq!(rep.dominated, Some(true));
        assert_eq!(rep.exceeds_reference, Some(false));
    }
}

//! The limit problem on the graph: `λu_i + Ḡ_i(h, u_i') = 0` on each edge
//! `J_i`, the viscosity boundary condition at `h_i`, continuity at the node
//! and selection of the maximal solution.

mod edge;
mod maximal;

pub use edge::{solve_edge, EdgeGrid, EdgeSolution, NodeEnd};
pub use maximal::{
    oracle_node_scan, solve_graph_at, solve_graph_maximal, verify_solution, GraphSolution, VerifyReport,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge}: slope {q:.4e} at h = {h:.6e} lies outside the tabulated range")]
    ProfileGap { edge: usize, h: f64, q: f64 },
    #[error("edge {edge} cannot carry the node value (node residual {residual:.3e})")]
    Inconsistent { edge: usize, residual: f64 },
    #[error("no feasible node value down to {d_min:.6e}")]
    NoFeasible { d_min: f64 },
    #[error("edge {edge}: no convergence after {sweeps} sweeps")]
    NoConvergence { edge: usize, sweeps: usize },
    #[error("expected {expected} profiles, got {got}")]
    CountMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphOptions {
    /// Residual tolerance, relative to `λ(1 + C)`.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Uniform cells along each edge.
    pub n_uniform: usize,
    /// Geometric points between the node and the first uniform cell.
    pub n_geometric: usize,
    /// Smallest geometric distance to the node relative to `|h_i|`.
    pub floor_rel: f64,
    /// Oracle step relative to the range `2C`.
    pub oracle_step_rel: f64,
    /// Allows the Godunov flux on convexity-certified rows.
    pub godunov: bool,
}

impl Default for GraphOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_sweeps: 100_000,
            n_uniform: 2000,
            n_geometric: 60,
            floor_rel: 1e-7,
            oracle_step_rel: 1e-3,
            godunov: true,
        }
    }
}

//! Numerical averaging of Hamilton–Jacobi equations with a large Hamiltonian
//! drift on a multi-well planar domain.
//!
//! The crate is organised bottom-up:
//!
//! * [`hamiltonian`] – the Hamiltonian `H`, its drift `b = (H_y, -H_x)`, critical
//!   points, region labelling and structural checks near the saddle.
//! * [`level_set`] – periodic orbits of the Hamiltonian flow, periods `T_i(h)`,
//!   lengths `L_i(h)` and orbit-averaged effective Hamiltonians.
//! * [`hj2d`] – monotone finite-difference solver for the perturbed Dirichlet
//!   problem on a masked Cartesian grid.
//! * [`graph`] – the limit problem on the graph (one node, `N` edges) and its
//!   maximal viscosity solution.
//! * [`convergence`] – projection of planar solutions onto the graph and the
//!   convergence measurements.
//! * [`format`] – fixed-precision text formats shared by all persisted tables.

pub mod convergence;
pub mod format;
pub mod gfamily;
pub mod graph;
pub mod hamiltonian;
pub mod hj2d;
pub mod level_set;
pub mod ode;
pub mod polynomial;

pub use gfamily::{BoundaryDatum, Coercivity, GFamily};
pub use hamiltonian::{HamiltonianSpec, Point, RegionIndex, RegionMap};

/// Euclidean norm of a planar vector.
#[inline]
pub fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

#[inline]
pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

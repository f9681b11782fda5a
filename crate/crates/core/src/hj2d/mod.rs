//! Monotone finite differences for `λu - ε⁻¹ b·Du + G(x, Du) = 0` in `Ω`
//! with `u = g` on `∂Ω` in the viscosity sense.

mod characteristic;
mod grid;
mod scheme;
mod solve;

pub use characteristic::{check_characteristic_inequality, CharacteristicReport, Steering};
pub use grid::{build_masked_grid, MaskedGrid, NodeClass, MIN_RESOLUTION, MIN_RUN};
pub use scheme::{numerical_hamiltonian, Scheme};
pub use solve::{interpolate, residual, solve_eps, solve_eps_from, EpsSolution, SolveOptions};

use crate::hamiltonian::GeometryError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Hj2dError {
    #[error("grid too coarse: {0}")]
    TooCoarse(String),
    #[error("dissipation {sigma:.6e} below the Lipschitz bound {required:.6e} on axis {axis}")]
    InsufficientDissipation {
        axis: usize,
        sigma: f64,
        required: f64,
    },
    #[error("no convergence after {max_iters} sweeps (residual {residual:.3e})")]
    NoConvergence { max_iters: usize, residual: f64 },
    #[error("trajectory left the grid at t = {t:.6e}")]
    TrajectoryExit { t: f64 },
    #[error("interior node on the edge of the lattice; enlarge the domain box")]
    DomainTooSmall,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

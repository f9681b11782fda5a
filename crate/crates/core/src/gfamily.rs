//! The perturbation `G(x, p)` and the boundary datum `g`.

use crate::hamiltonian::{HamiltonianSpec, Point, RegionMap};
use crate::polynomial::Polynomial;
use crate::{dot, norm};

/// Constants of the lower bound `G(x, p) ≥ ν|p| - M` on `Ω̄ × ℝ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coercivity {
    pub nu: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GFamily {
    /// `G = |p|`.
    Eikonal,
    /// `G = θ|p| - |p·b(x)| - f(x)` with `θ > max |DH|` on `Ω̄`.
    Games { theta: f64, f: Polynomial },
    /// `G = c`, independent of `(x, p)`. Test fixture, not coercive.
    Constant(f64),
}

impl GFamily {
    /// Games family with `θ = factor · max_{Ω̄} |DH|`.
    pub fn games(spec: &HamiltonianSpec, map: &RegionMap, factor: f64, f: Polynomial) -> Self {
        Self::Games {
            theta: factor * max_gradient(spec, map),
            f,
        }
    }

    #[inline]
    pub fn eval(&self, spec: &HamiltonianSpec, x: Point, p: [f64; 2]) -> f64 {
        match self {
            Self::Eikonal => norm(p),
            Self::Games { theta, f } => {
                theta * norm(p) - dot(p, spec.drift(x)).abs() - f.eval(x)
            }
            Self::Constant(c) => *c,
        }
    }

    /// `G(x, q DH(x))` with the gradient already evaluated.
    #[inline]
    pub fn eval_along_gradient(&self, x: Point, grad: [f64; 2], q: f64) -> f64 {
        match self {
            Self::Eikonal => q.abs() * norm(grad),
            // p·b vanishes identically for p parallel to DH.
            Self::Games { theta, f } => {
                let p = [q * grad[0], q * grad[1]];
                let b = [grad[1], -grad[0]];
                theta * norm(p) - dot(p, b).abs() - f.eval(x)
            }
            Self::Constant(c) => *c,
        }
    }

    /// Lipschitz constant of `p ↦ G(x, p)` at `x`.
    #[inline]
    pub fn lip_p(&self, spec: &HamiltonianSpec, x: Point) -> f64 {
        match self {
            Self::Eikonal => 1.0,
            Self::Games { theta, .. } => theta + norm(spec.gradient(x)),
            Self::Constant(_) => 0.0,
        }
    }

    /// Uniform Lipschitz constant in `p` over `Ω̄`.
    pub fn lip_p_max(&self, spec: &HamiltonianSpec, map: &RegionMap) -> f64 {
        match self {
            Self::Games { theta, .. } => theta + max_gradient(spec, map),
            _ => self.lip_p(spec, [0.0, 0.0]),
        }
    }

    /// `G(x, 0)`.
    pub fn at_zero(&self, x: Point) -> f64 {
        match self {
            Self::Eikonal => 0.0,
            Self::Games { f, .. } => -f.eval(x),
            Self::Constant(c) => *c,
        }
    }

    /// `max |G(x, 0)|` over `Ω̄`.
    pub fn sup_abs_at_zero(&self, spec: &HamiltonianSpec, map: &RegionMap) -> f64 {
        match self {
            Self::Eikonal => 0.0,
            Self::Games { f, .. } => {
                if f.is_zero() {
                    0.0
                } else {
                    -map.minimize_on_closure(spec, |x| -f.eval(x).abs()).0
                }
            }
            Self::Constant(c) => c.abs(),
        }
    }

    /// Games: `ν = θ - max|DH|`, `M = max(sup f, 0)`. Eikonal: `(1, 0)`.
    pub fn coercivity(&self, spec: &HamiltonianSpec, map: &RegionMap) -> Coercivity {
        match self {
            Self::Eikonal => Coercivity { nu: 1.0, m: 0.0 },
            Self::Games { theta, f } => {
                let sup_f = if f.is_zero() {
                    0.0
                } else {
                    -map.minimize_on_closure(spec, |x| -f.eval(x)).0
                };
                Coercivity {
                    nu: theta - max_gradient(spec, map),
                    m: sup_f.max(0.0),
                }
            }
            Self::Constant(c) => Coercivity {
                nu: 0.0,
                m: (-c).max(0.0),
            },
        }
    }
}

/// `max |DH|` over `Ω̄`.
pub fn max_gradient(spec: &HamiltonianSpec, map: &RegionMap) -> f64 {
    -map.minimize_on_closure(spec, |x| -norm(spec.gradient(x))).0
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryDatum {
    Constant(f64),
    Polynomial(Polynomial),
    /// `g = s · H`.
    ScaledHamiltonian(f64),
}

impl BoundaryDatum {
    pub fn eval(&self, spec: &HamiltonianSpec, x: Point) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Polynomial(p) => p.eval(x),
            Self::ScaledHamiltonian(s) => s * spec.value(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_well_gradient_max_on_outer_boundary() {
        let spec = HamiltonianSpec::double_well();
        let map = RegionMap::reference(&spec, 401);
        // On {H = 1/8} the largest |DH| is at y = 0, x² = 1 + √(3/2).
        let x = (1.0 + 1.5f64.sqrt()).sqrt();
        let expect = x * x * x - x;
        assert!((max_gradient(&spec, &map) - expect).abs() < 1e-8);
    }

    #[test]
    fn games_value_along_gradient_drops_drift_term() {
        let spec = HamiltonianSpec::double_well();
        let g = GFamily::Games {
            theta: 4.0,
            f: Polynomial::from_triples(&[(2, 0, 1.0)]),
        };
        let x = [0.7, -0.3];
        let grad = spec.gradient(x);
        let q = -1.3;
        let direct = g.eval(&spec, x, [q * grad[0], q * grad[1]]);
        assert!((g.eval_along_gradient(x, grad, q) - direct).abs() < 1e-14);
        assert!((direct - (4.0 * 1.3 * norm(grad) - 0.49)).abs() < 1e-12);
    }

    #[test]
    fn coercivity_holds_on_samples() {
        let spec = HamiltonianSpec::double_well();
        let map = RegionMap::reference(&spec, 201);
        let g = GFamily::games(&spec, &map, 2.0, Polynomial::from_triples(&[(0, 0, 0.5), (2, 0, 1.0)]));
        let c = g.coercivity(&spec, &map);
        assert!(c.nu > 0.0 && c.m > 0.5);
        for (k, x) in [[0.2, 0.1], [1.3, 0.0], [-0.5, 0.6]].into_iter().enumerate() {
            let p = [k as f64 - 1.0, 2.0 * k as f64];
            assert!(g.eval(&spec, x, p) >= c.nu * norm(p) - c.m);
        }
    }
}

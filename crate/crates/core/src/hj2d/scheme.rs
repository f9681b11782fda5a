use super::{Hj2dError, MaskedGrid, NodeClass};
use crate::gfamily::GFamily;
use crate::hamiltonian::HamiltonianSpec;
use crate::norm;

/// Local Lax–Friedrichs value
/// `F(x, (p⁻+p⁺)/2) - σ_x(p₁⁺-p₁⁻)/2 - σ_y(p₂⁺-p₂⁻)/2`.
///
/// `lip` is the per-axis Lipschitz bound of `p ↦ F(x, p)`; a smaller `sigma`
/// would break monotonicity.
pub fn numerical_hamiltonian(
    f: impl Fn([f64; 2]) -> f64,
    lip: [f64; 2],
    p_minus: [f64; 2],
    p_plus: [f64; 2],
    sigma: [f64; 2],
) -> Result<f64, Hj2dError> {
    for axis in 0..2 {
        if !(sigma[axis] >= lip[axis]) {
            return Err(Hj2dError::InsufficientDissipation {
                axis,
                sigma: sigma[axis],
                required: lip[axis],
            });
        }
    }
    let mid = [
        0.5 * (p_minus[0] + p_plus[0]),
        0.5 * (p_minus[1] + p_plus[1]),
    ];
    Ok(f(mid)
        - 0.5 * sigma[0] * (p_plus[0] - p_minus[0])
        - 0.5 * sigma[1] * (p_plus[1] - p_minus[1]))
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Eikonal,
    Games { theta: f64 },
    Constant(f64),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    /// Active indices of the east, west, north and south neighbours; the node
    /// itself stands in for a missing one.
    nb: [u32; 4],
    b: [f64; 2],
    sigma: [f64; 2],
    /// `f(x)` for the games family.
    f: f64,
    /// Boundary value, `+∞` at interior nodes.
    g: f64,
    diag: f64,
}

/// The discrete operator on the active (interior and boundary) nodes of a
/// masked grid for fixed `λ` and `ε`.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub lambda: f64,
    pub eps: f64,
    pub spacing: f64,
    kind: Kind,
    pub(crate) nodes: Vec<Node>,
    /// Lattice index of each active node, ascending.
    pub(crate) lattice_index: Vec<usize>,
    /// `[start, end)` ranges of `nodes` per lattice row.
    pub(crate) rows: Vec<(usize, usize)>,
    n_lattice: usize,
}

impl Scheme {
    /// `dissipation` scales the per-node dissipation above the Lipschitz
    /// bound `|b_k|/ε + Lip_p G(x)`; values below 1 are rejected.
    pub fn new(
        grid: &MaskedGrid,
        spec: &HamiltonianSpec,
        g: &GFamily,
        lambda: f64,
        eps: f64,
        dissipation: f64,
    ) -> Result<Self, Hj2dError> {
        let lat = &grid.lattice;
        let kind = match g {
            GFamily::Eikonal => Kind::Eikonal,
            GFamily::Games { theta, .. } => Kind::Games { theta: *theta },
            GFamily::Constant(c) => Kind::Constant(*c),
        };
        let lattice_index: Vec<usize> = (0..lat.len()).filter(|&k| grid.is_active(k)).collect();
        let mut active = vec![u32::MAX; lat.len()];
        for (a, &k) in lattice_index.iter().enumerate() {
            active[k] = a as u32;
        }
        let h = lat.spacing;
        let mut nodes = Vec::with_capacity(lattice_index.len());
        for (a, &k) in lattice_index.iter().enumerate() {
            let (i, j) = lat.coords(k);
            let x = lat.point(i, j);
            let pick = |q: Option<usize>| match q {
                Some(q) if active[q] != u32::MAX => active[q],
                _ => a as u32,
            };
            let nb = [
                pick((i + 1 < lat.nx).then(|| k + 1)),
                pick((i > 0).then(|| k - 1)),
                pick((j + 1 < lat.ny).then(|| k + lat.nx)),
                pick((j > 0).then(|| k - lat.nx)),
            ];
            let b = spec.drift(x);
            let lip_g = g.lip_p(spec, x);
            let lip = [b[0].abs() / eps + lip_g, b[1].abs() / eps + lip_g];
            let sigma = [dissipation * lip[0], dissipation * lip[1]];
            for axis in 0..2 {
                if !(sigma[axis] >= lip[axis]) {
                    return Err(Hj2dError::InsufficientDissipation {
                        axis,
                        sigma: sigma[axis],
                        required: lip[axis],
                    });
                }
            }
            let gb = match grid.class[k] {
                NodeClass::Boundary(_) => grid.g[k],
                _ => f64::INFINITY,
            };
            nodes.push(Node {
                nb,
                b,
                sigma,
                f: -g.at_zero(x),
                g: gb,
                diag: lambda + (sigma[0] + sigma[1]) / h,
            });
        }
        let mut rows = Vec::new();
        let mut start = 0;
        for a in 1..=lattice_index.len() {
            if a == lattice_index.len() || lattice_index[a] / lat.nx != lattice_index[start] / lat.nx
            {
                rows.push((start, a));
                start = a;
            }
        }
        Ok(Self {
            lambda,
            eps,
            spacing: h,
            kind,
            nodes,
            lattice_index,
            rows,
            n_lattice: lat.len(),
        })
    }

    pub fn n_active(&self) -> usize {
        self.nodes.len()
    }

    /// East, west, north and south neighbours of active node `a`; a missing
    /// neighbour is `a` itself.
    pub fn neighbours(&self, a: usize) -> [usize; 4] {
        self.nodes[a].nb.map(|q| q as usize)
    }

    /// `max_k σ_k · spacing` relative to `ε`-free units: the largest drift
    /// Courant-like number `spacing·|b|/ε` over the grid.
    pub fn coupling(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| norm(n.b))
            .fold(0.0, f64::max)
            * self.spacing
            / self.eps
    }

    #[inline]
    fn g_eval(&self, n: &Node, p: [f64; 2]) -> f64 {
        match self.kind {
            Kind::Eikonal => norm(p),
            Kind::Games { theta } => theta * norm(p) - (p[0] * n.b[0] + p[1] * n.b[1]).abs() - n.f,
            Kind::Constant(c) => c,
        }
    }

    /// Scheme residual `R` at active node `a`.
    #[inline]
    pub(crate) fn raw_residual(&self, a: usize, u: &[f64]) -> f64 {
        let n = &self.nodes[a];
        let uc = u[a];
        let [e, w, no, s] = n.nb.map(|q| u[q as usize]);
        let h = self.spacing;
        let p = [(e - w) / (2.0 * h), (no - s) / (2.0 * h)];
        let f = -(n.b[0] * p[0] + n.b[1] * p[1]) / self.eps + self.g_eval(n, p);
        self.lambda * uc + f
            - n.sigma[0] * (e - 2.0 * uc + w) / (2.0 * h)
            - n.sigma[1] * (no - 2.0 * uc + s) / (2.0 * h)
    }

    /// Damped local update; at boundary nodes the result is capped by `g`.
    /// `u` is indexed by active node.
    #[inline]
    pub fn update(&self, a: usize, u: &[f64]) -> f64 {
        let n = &self.nodes[a];
        (u[a] - self.raw_residual(a, u) / n.diag).min(n.g)
    }

    /// Residual in units of `u`: `D|u_a - update|/λ`. The local operator
    /// grows at least like `λ` under constant shifts, so by discrete
    /// comparison this bounds the distance to the exact discrete solution.
    #[inline]
    pub(crate) fn local_residual(&self, a: usize, u: &[f64]) -> f64 {
        (u[a] - self.update(a, u)).abs() * self.nodes[a].diag / self.lambda
    }

    #[inline]
    pub(crate) fn scale(&self, a: usize) -> f64 {
        self.nodes[a].diag / self.lambda
    }

    pub(crate) fn gather(&self, field: &[f64]) -> Vec<f64> {
        self.lattice_index.iter().map(|&k| field[k]).collect()
    }

    pub(crate) fn scatter(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![f64::NAN; self.n_lattice];
        for (a, &k) in self.lattice_index.iter().enumerate() {
            out[k] = u[a];
        }
        out
    }

    /// `max |G(x, 0)|` over the active nodes.
    pub fn sup_abs_g_at_zero(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| self.g_eval(n, [0.0, 0.0]).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_boundary(&self) -> f64 {
        self.nodes
            .iter()
            .filter(|n| n.g.is_finite())
            .map(|n| n.g.abs())
            .fold(0.0, f64::max)
    }

    /// Discrete counterpart of the uniform bound
    /// `max{λ⁻¹ max|G(x,0)|, max|g|}`.
    pub fn uniform_bound(&self) -> f64 {
        (self.sup_abs_g_at_zero() / self.lambda).max(self.max_abs_boundary())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfamily::BoundaryDatum;
    use crate::hj2d::build_masked_grid;
    use crate::RegionMap;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn consistency_and_hand_value() {
        let f = |p: [f64; 2]| norm(p);
        let v = numerical_hamiltonian(f, [1.0, 1.0], [0.0, 0.0], [2.0, 0.0], [1.0, 1.0]).unwrap();
        assert_eq!(v, 0.0);
        let p = [0.3, -1.7];
        let v = numerical_hamiltonian(f, [1.0, 1.0], p, p, [5.0, 9.0]).unwrap();
        assert_eq!(v, norm(p));
        assert!(matches!(
            numerical_hamiltonian(f, [1.0, 1.0], p, p, [0.5, 1.0]),
            Err(Hj2dError::InsufficientDissipation { axis: 0, .. })
        ));
    }

    #[test]
    fn scheme_rejects_low_dissipation() {
        let spec = HamiltonianSpec::double_well();
        let grid = build_masked_grid(&spec, 64, &BoundaryDatum::Constant(1.0)).unwrap();
        assert!(matches!(
            Scheme::new(&grid, &spec, &GFamily::Eikonal, 1.0, 0.1, 0.9),
            Err(Hj2dError::InsufficientDissipation { .. })
        ));
    }

    fn canonical(eps: f64) -> (MaskedGrid, Scheme) {
        let spec = HamiltonianSpec::double_well();
        let map = RegionMap::reference(&spec, 201);
        let g = GFamily::games(&spec, &map, 2.0, Default::default());
        let grid = build_masked_grid(&spec, 64, &BoundaryDatum::ScaledHamiltonian(8.0)).unwrap();
        let scheme = Scheme::new(&grid, &spec, &g, 1.0, eps, 1.0).unwrap();
        (grid, scheme)
    }

    /// Raising any one stencil value never lowers the update.
    #[test]
    fn randomized_stencil_monotonicity() {
        let (_, scheme) = canonical(0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = scheme.n_active();
        let mut violations = 0;
        for _ in 0..10_000 {
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = rng.gen_range(0..n);
            let base = scheme.update(a, &u);
            let slot = rng.gen_range(0..5);
            let q = if slot == 4 { a } else { scheme.nodes[a].nb[slot] as usize };
            let mut v = u.clone();
            v[q] += rng.gen_range(1e-6..0.5);
            let moved = scheme.update(a, &v);
            if moved < base - 1e-12 * (1.0 + base.abs()) {
                violations += 1;
            }
        }
        assert_eq!(violations, 0);
    }

    #[test]
    fn perturbation_is_local() {
        let (_, scheme) = canonical(0.1);
        let n = scheme.n_active();
        let u: Vec<f64> = (0..n).map(|a| (a as f64 * 0.37).sin()).collect();
        let a = n / 2;
        let mut v = u.clone();
        v[a] += 1e-3;
        let mut stencil: Vec<usize> = scheme.nodes[a].nb.iter().map(|&q| q as usize).collect();
        stencil.push(a);
        for b in 0..n {
            let changed = scheme.raw_residual(b, &u) != scheme.raw_residual(b, &v);
            let near = b == a || scheme.nodes[b].nb.contains(&(a as u32));
            assert!(!changed || near, "node {b} changed");
        }
        assert!(scheme.raw_residual(a, &u) != scheme.raw_residual(a, &v));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn lf_is_monotone_in_neighbours(
            b in prop::array::uniform2(-3.0f64..3.0),
            eps in 0.01f64..1.0,
            theta in 0.0f64..4.0,
            u in prop::array::uniform4(-2.0f64..2.0),
            uc in -2.0f64..2.0,
            which in 0usize..4,
            bump in 1e-6f64..1.0,
        ) {
            let h = 0.05;
            let lip_g = theta + norm(b);
            let f = |p: [f64; 2]| {
                -(b[0] * p[0] + b[1] * p[1]) / eps + theta * norm(p) - (p[0] * b[0] + p[1] * b[1]).abs()
            };
            let lip = [b[0].abs() / eps + lip_g, b[1].abs() / eps + lip_g];
            let value = |u: [f64; 4]| {
                let [e, w, n, s] = u;
                let pm = [(uc - w) / h, (uc - s) / h];
                let pp = [(e - uc) / h, (n - uc) / h];
                numerical_hamiltonian(f, lip, pm, pp, lip).unwrap()
            };
            let mut v = u;
            v[which] += bump;
            prop_assert!(value(v) <= value(u) + 1e-9 * (1.0 + value(u).abs()));
        }
    }
}

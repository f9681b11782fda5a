use super::{GraphError, GraphOptions};
use crate::level_set::EdgeProfile;

/// Points of `J̄_i`, ascending in `h`, refined geometrically toward the node
/// at `h = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGrid {
    /// `h_i`, the outer end.
    pub outer: f64,
    pub h: Vec<f64>,
}

impl EdgeGrid {
    pub fn new(outer: f64, opts: &GraphOptions) -> Self {
        let len = outer.abs();
        let n = opts.n_uniform.max(2);
        let mut s: Vec<f64> = (0..=n).map(|k| len * k as f64 / n as f64).collect();
        let first = len / n as f64;
        let floor = (len * opts.floor_rel).min(first);
        if opts.n_geometric > 0 && floor < first {
            let ratio = (first / floor).powf(1.0 / opts.n_geometric as f64);
            for k in 0..opts.n_geometric {
                s.push(floor * ratio.powi(k as i32));
            }
        }
        s.sort_by(f64::total_cmp);
        s.dedup();
        let sign = if outer > 0.0 { 1.0 } else { -1.0 };
        let mut h: Vec<f64> = s.into_iter().map(|v| sign * v).collect();
        h.sort_by(f64::total_cmp);
        Self { outer, h }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn node_index(&self) -> usize {
        if self.outer > 0.0 {
            0
        } else {
            self.h.len() - 1
        }
    }

    pub fn outer_index(&self) -> usize {
        if self.outer > 0.0 {
            self.h.len() - 1
        } else {
            0
        }
    }
}

/// Condition at the node end of an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeEnd {
    Dirichlet(f64),
    /// One-sided update only; yields the maximal subsolution's trace.
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSolution {
    pub edge: usize,
    pub grid: EdgeGrid,
    pub u: Vec<f64>,
    pub node_value: f64,
    /// `min g` over `∂_iΩ`.
    pub boundary_datum: f64,
    /// Residual in units of `u` (comparison bound).
    pub residual_inf: f64,
    /// One-sided residual at the node in units of `u`; positive means the
    /// node value is too large for this edge.
    pub node_residual: f64,
    pub sweeps: usize,
    pub max_slope: f64,
    /// `max{λ⁻¹ max|Ḡ(h,0)|, |datum|, |d|}`.
    pub bound: f64,
}

impl EdgeSolution {
    /// Linear interpolation, constant beyond the ends.
    pub fn value(&self, h: f64) -> f64 {
        let g = &self.grid.h;
        if h <= g[0] {
            return self.u[0];
        }
        let n = g.len();
        if h >= g[n - 1] {
            return self.u[n - 1];
        }
        let k = g.partition_point(|&v| v <= h) - 1;
        let w = (h - g[k]) / (g[k + 1] - g[k]);
        self.u[k] + w * (self.u[k + 1] - self.u[k])
    }
}

#[derive(Debug, Clone, Copy)]
enum Flux {
    /// Convex row with minimiser `q*`.
    Godunov(f64),
    Lf(f64),
}

/// Discrete operator on one edge.
pub(crate) struct EdgeScheme<'a> {
    profile: &'a EdgeProfile,
    h: &'a [f64],
    br: Vec<(usize, f64)>,
    flux: Vec<Flux>,
    /// Lipschitz bound of `Ḡ` in `q` at each point.
    lip: Vec<f64>,
    lambda: f64,
}

impl<'a> EdgeScheme<'a> {
    pub fn new(profile: &'a EdgeProfile, grid: &'a EdgeGrid, lambda: f64, godunov: bool) -> Self {
        let mut br = Vec::with_capacity(grid.len());
        let mut flux = Vec::with_capacity(grid.len());
        let mut lip = Vec::with_capacity(grid.len());
        for &h in &grid.h {
            let b = profile.h_bracket(h);
            let rows = [b.0, (b.0 + 1).min(profile.n_h() - 1)];
            let convex = rows.iter().all(|&a| profile.row_convex(a));
            let sigma = rows.iter().map(|&a| profile.row_lipschitz(a)).fold(0.0, f64::max);
            lip.push(sigma);
            let f = if godunov && h.abs() < profile.gamma && convex {
                // Ties go to the smallest |q|.
                let mut order: Vec<f64> = profile.q_grid.clone();
                order.sort_by(|x, y| x.abs().total_cmp(&y.abs()).then(x.total_cmp(y)));
                let mut best = (f64::INFINITY, 0.0);
                for q in order {
                    let v = profile.value_bracketed(b, q);
                    if v < best.0 {
                        best = (v, q);
                    }
                }
                Flux::Godunov(best.1)
            } else {
                Flux::Lf(sigma)
            };
            br.push(b);
            flux.push(f);
        }
        Self {
            profile,
            h: &grid.h,
            br,
            flux,
            lip,
            lambda,
        }
    }

    /// Bound on the change of `φ/λ` at `k` per unit change of `u` at `k`
    /// and its neighbours: `(Lip/Δ⁻ + Lip/Δ⁺ + λ)/λ`.
    pub fn sensitivity(&self, k: usize) -> f64 {
        let n = self.h.len();
        let mut inv = 0.0;
        if k > 0 {
            inv += 1.0 / (self.h[k] - self.h[k - 1]);
        }
        if k + 1 < n {
            inv += 1.0 / (self.h[k + 1] - self.h[k]);
        }
        (self.lip[k] * inv + self.lambda) / self.lambda
    }

    /// Size of `|φ|/λ` that rounding of `u` alone can produce at `k`.
    pub fn roundoff(&self, k: usize, u: &[f64]) -> f64 {
        64.0 * f64::EPSILON * (1.0 + u[k].abs()) * self.sensitivity(k)
    }

    #[inline]
    fn gbar(&self, k: usize, q: f64) -> f64 {
        self.profile.value_bracketed(self.br[k], q)
    }

    #[inline]
    fn numerical(&self, k: usize, pm: f64, pp: f64) -> f64 {
        match self.flux[k] {
            Flux::Godunov(qs) => self.gbar(k, pm.max(qs)).max(self.gbar(k, pp.min(qs))),
            Flux::Lf(sigma) => self.gbar(k, 0.5 * (pm + pp)) - 0.5 * sigma * (pp - pm),
        }
    }

    /// One-sided slopes at `k` if it took the value `v`; a missing
    /// neighbour contributes slope zero.
    #[inline]
    fn slopes(&self, k: usize, v: f64, u: &[f64]) -> (f64, f64) {
        let n = self.h.len();
        let pm = if k > 0 {
            (v - u[k - 1]) / (self.h[k] - self.h[k - 1])
        } else {
            0.0
        };
        let pp = if k + 1 < n {
            (u[k + 1] - v) / (self.h[k + 1] - self.h[k])
        } else {
            0.0
        };
        (pm, pp)
    }

    /// `λv + Ĝ(p⁻(v), p⁺(v))`, increasing in `v` with slope at least `λ`.
    #[inline]
    pub fn phi(&self, k: usize, v: f64, u: &[f64]) -> f64 {
        let (pm, pp) = self.slopes(k, v, u);
        self.lambda * v + self.numerical(k, pm, pp)
    }

    /// Root of `phi(k, ·)` by the Illinois variant of regula falsi.
    pub fn solve_local(&self, k: usize, u: &[f64]) -> f64 {
        let v0 = u[k];
        let f0 = self.phi(k, v0, u);
        if f0 == 0.0 {
            return v0;
        }
        let v1 = v0 - f0 / self.lambda;
        let f1 = self.phi(k, v1, u);
        if f1 == 0.0 {
            return v1;
        }
        let (mut a, mut fa, mut b, mut fb) = if f0 < 0.0 {
            (v0, f0, v1, f1)
        } else {
            (v1, f1, v0, f0)
        };
        if !(fa < 0.0 && fb > 0.0) {
            // Roundoff at the bracket end.
            return if fa.abs() < fb.abs() { a } else { b };
        }
        let tol = 1e-15 * (1.0 + v0.abs());
        let mut side = 0i8;
        for _ in 0..200 {
            let c = (a * fb - b * fa) / (fb - fa);
            let fc = self.phi(k, c, u);
            if fc == 0.0 || (b - a).abs() <= tol {
                return c;
            }
            if fc < 0.0 {
                a = c;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        0.5 * (a + b)
    }

    pub fn sup_abs_at_zero(&self) -> f64 {
        (0..self.h.len())
            .map(|k| self.gbar(k, 0.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_slope(&self, u: &[f64], skip: Option<usize>) -> (f64, f64, usize) {
        let mut best = (0.0f64, 0.0, 0usize);
        for k in 0..self.h.len() {
            if Some(k) == skip {
                continue;
            }
            let (pm, pp) = self.slopes(k, u[k], u);
            for p in [pm, pp] {
                if p.abs() > best.0.abs() {
                    best = (p, self.h[k], k);
                }
            }
        }
        (best.0.abs(), best.1, best.2)
    }
}

/// Residuals in units of `u` at every grid point: `|φ|/λ` inside,
/// `|max(u - datum, φ/λ)|` at the outer end, and `|φ|/λ` (free) or 0
/// (pinned) at the node. The rounding floor of [`EdgeScheme::roundoff`] is
/// subtracted, since the fine cells next to the node amplify ulp-level
/// noise far above any useful tolerance.
pub(crate) fn residuals(
    scheme: &EdgeScheme,
    grid: &EdgeGrid,
    u: &[f64],
    datum: f64,
    node: NodeEnd,
) -> Vec<f64> {
    let (ni, oi) = (grid.node_index(), grid.outer_index());
    (0..grid.len())
        .map(|k| {
            let r = scheme.phi(k, u[k], u) / scheme.lambda;
            let raw = if k == oi {
                (u[k] - datum).max(r).abs()
            } else if k == ni {
                match node {
                    NodeEnd::Dirichlet(_) => 0.0,
                    NodeEnd::Free => r.abs(),
                }
            } else {
                r.abs()
            };
            (raw - scheme.roundoff(k, u)).max(0.0)
        })
        .collect()
}

/// Gauss–Seidel sweeps in alternating directions from `start`, with exact
/// local solves.
pub(crate) fn iterate(
    scheme: &EdgeScheme,
    grid: &EdgeGrid,
    mut u: Vec<f64>,
    datum: f64,
    node: NodeEnd,
    tol: f64,
    max_sweeps: usize,
) -> Option<(Vec<f64>, usize, f64)> {
    let n = grid.len();
    let (ni, oi) = (grid.node_index(), grid.outer_index());
    if let NodeEnd::Dirichlet(d) = node {
        u[ni] = d;
    }
    for sweep in 1..=max_sweeps {
        let mut change = 0.0f64;
        let mut visit = |k: usize, u: &mut Vec<f64>| {
            if k == ni && matches!(node, NodeEnd::Dirichlet(_)) {
                return;
            }
            let mut v = scheme.solve_local(k, u);
            if k == oi {
                v = v.min(datum);
            }
            change = change.max((v - u[k]).abs());
            u[k] = v;
        };
        if sweep % 2 == 1 {
            for k in 0..n {
                visit(k, &mut u);
            }
        } else {
            for k in (0..n).rev() {
                visit(k, &mut u);
            }
        }
        if change <= tol {
            let r = residuals(scheme, grid, &u, datum, node)
                .into_iter()
                .fold(0.0, f64::max);
            if r <= tol {
                return Some((u, sweep, r));
            }
        }
    }
    None
}

/// Solves one edge, descending from the constant upper bound. Slopes beyond
/// the tabulated `q` range are reported as [`GraphError::ProfileGap`].
pub fn solve_edge(
    profile: &EdgeProfile,
    grid: &EdgeGrid,
    node: NodeEnd,
    datum: f64,
    lambda: f64,
    opts: &GraphOptions,
) -> Result<EdgeSolution, GraphError> {
    solve_edge_from(profile, grid, node, datum, lambda, opts, None)
}

/// [`solve_edge`] descending from `start`, which must be a supersolution.
pub(crate) fn solve_edge_from(
    profile: &EdgeProfile,
    grid: &EdgeGrid,
    node: NodeEnd,
    datum: f64,
    lambda: f64,
    opts: &GraphOptions,
    start: Option<&[f64]>,
) -> Result<EdgeSolution, GraphError> {
    let sol = solve_edge_unchecked(profile, grid, node, datum, lambda, opts, start)?;
    let q_max = profile
        .q_grid
        .iter()
        .fold(0.0f64, |m, q| m.max(q.abs()));
    let scheme = EdgeScheme::new(profile, grid, lambda, opts.godunov);
    let (slope, h, _) = scheme.max_slope(&sol.u, None);
    if slope > q_max * (1.0 + 1e-9) {
        return Err(GraphError::ProfileGap {
            edge: profile.edge,
            h,
            q: slope,
        });
    }
    Ok(sol)
}

pub(crate) fn solve_edge_unchecked(
    profile: &EdgeProfile,
    grid: &EdgeGrid,
    node: NodeEnd,
    datum: f64,
    lambda: f64,
    opts: &GraphOptions,
    start: Option<&[f64]>,
) -> Result<EdgeSolution, GraphError> {
    let scheme = EdgeScheme::new(profile, grid, lambda, opts.godunov);
    let mut bound = (scheme.sup_abs_at_zero() / lambda).max(datum.abs());
    if let NodeEnd::Dirichlet(d) = node {
        bound = bound.max(d.abs());
    }
    let u0 = match start {
        Some(s) => s.to_vec(),
        None => vec![bound; grid.len()],
    };
    let tol = opts.tol * (1.0 + bound);
    let (u, sweeps, residual) = iterate(&scheme, grid, u0, datum, node, tol, opts.max_sweeps)
        .ok_or(GraphError::NoConvergence {
            edge: profile.edge,
            sweeps: opts.max_sweeps,
        })?;
    let ni = grid.node_index();
    let node_residual = {
        let r = scheme.phi(ni, u[ni], &u) / lambda;
        r.signum() * (r.abs() - scheme.roundoff(ni, &u)).max(0.0)
    };
    let (max_slope, _, _) = scheme.max_slope(&u, None);
    Ok(EdgeSolution {
        edge: profile.edge,
        grid: grid.clone(),
        node_value: u[ni],
        u,
        boundary_datum: datum,
        residual_inf: residual,
        node_residual,
        sweeps,
        max_slope,
        bound,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::level_set::{default_q_grid, EdgeProfile};

    /// `Ḡ(h, q) = f(q)` on the edge with outer end `outer`.
    pub fn fixture(edge: usize, outer: f64, q_max: f64, f: fn(f64) -> f64, nu: f64) -> EdgeProfile {
        let hs: Vec<f64> = (0..=10).map(|k| outer * k as f64 / 10.0).collect();
        let mut hs = hs;
        hs.sort_by(f64::total_cmp);
        EdgeProfile::tabulate(
            edge,
            hs,
            default_q_grid(q_max, 81),
            |_, q| f(q),
            (nu, 0.0),
            outer.abs(),
        )
    }

    fn opts() -> GraphOptions {
        GraphOptions {
            n_uniform: 1000,
            ..Default::default()
        }
    }

    #[test]
    fn grid_is_refined_toward_the_node() {
        let g = EdgeGrid::new(-0.125, &GraphOptions::default());
        assert_eq!(g.h[g.node_index()], 0.0);
        assert_eq!(g.h[g.outer_index()], -0.125);
        assert!(g.h.windows(2).all(|w| w[0] < w[1]));
        let n = g.len();
        assert!(g.h[n - 1] - g.h[n - 2] < 1e-7);
    }

    #[test]
    fn exponential_profile_with_dirichlet_node() {
        let p = fixture(0, 1.0, 4.0, f64::abs, 1.0);
        let g = EdgeGrid::new(1.0, &opts());
        let s = solve_edge(&p, &g, NodeEnd::Dirichlet(-1.0), 0.0, 1.0, &opts()).unwrap();
        let err = g
            .h
            .iter()
            .zip(&s.u)
            .map(|(h, u)| (u + (-h).exp()).abs())
            .fold(0.0, f64::max);
        // First-order upwinding on 1000 cells.
        assert!(err < 2e-3, "{err}");
        let z = solve_edge(&p, &g, NodeEnd::Dirichlet(0.0), 0.0, 1.0, &opts()).unwrap();
        assert!(z.u.iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn first_order_convergence_on_the_exponential() {
        let p = fixture(0, 1.0, 4.0, f64::abs, 1.0);
        let errs: Vec<f64> = [250, 500, 1000]
            .iter()
            .map(|&n| {
                let o = GraphOptions {
                    n_uniform: n,
                    n_geometric: 0,
                    ..Default::default()
                };
                let g = EdgeGrid::new(1.0, &o);
                let s = solve_edge(&p, &g, NodeEnd::Dirichlet(-1.0), 0.0, 1.0, &o).unwrap();
                g.h.iter()
                    .zip(&s.u)
                    .map(|(h, u)| (u + (-h).exp()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < 0.6 * errs[0] && errs[2] < 0.6 * errs[1], "{errs:?}");
    }

    #[test]
    fn constant_profile_gives_constant_solution() {
        let p = fixture(1, -1.0, 4.0, |_| -1.0, 0.0);
        let g = EdgeGrid::new(-1.0, &opts());
        let s = solve_edge(&p, &g, NodeEnd::Dirichlet(1.0), 2.0, 1.0, &opts()).unwrap();
        assert!(s.u.iter().all(|v| (v - 1.0).abs() <= 1e-10));
        let f = solve_edge(&p, &g, NodeEnd::Free, 2.0, 1.0, &opts()).unwrap();
        assert!((f.node_value - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn free_node_abs_profile_is_zero() {
        let p = fixture(0, 1.0, 4.0, f64::abs, 1.0);
        let g = EdgeGrid::new(1.0, &opts());
        let s = solve_edge(&p, &g, NodeEnd::Free, 0.0, 1.0, &opts()).unwrap();
        assert!(s.u.iter().all(|v| v.abs() <= 1e-12));
        assert_eq!(s.node_value, 0.0);
    }

    #[test]
    fn truncated_table_is_a_profile_gap() {
        let p = fixture(0, 1.0, 0.5, f64::abs, 1.0);
        let g = EdgeGrid::new(1.0, &opts());
        assert!(matches!(
            solve_edge(&p, &g, NodeEnd::Dirichlet(-1.0), 0.0, 1.0, &opts()),
            Err(GraphError::ProfileGap { .. })
        ));
    }

    #[test]
    fn godunov_and_lf_agree_to_grid_order() {
        let p = fixture(2, -1.0, 4.0, |q| q * q - 0.5 * q, 1.0);
        let o = opts();
        let g = EdgeGrid::new(-1.0, &o);
        let a = solve_edge(&p, &g, NodeEnd::Dirichlet(-0.5), -1.0, 1.0, &o).unwrap();
        let lf = GraphOptions { godunov: false, ..o };
        let b = solve_edge(&p, &g, NodeEnd::Dirichlet(-0.5), -1.0, 1.0, &lf).unwrap();
        let diff = a.u.iter().zip(&b.u).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 20.0 / o.n_uniform as f64, "{diff}");
    }
}

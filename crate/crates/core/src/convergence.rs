//! Projection of planar solutions onto the graph and the convergence
//! measurements of an `ε`-sweep.

use crate::gfamily::{BoundaryDatum, GFamily};
use crate::graph::GraphSolution;
use crate::hamiltonian::{HamiltonianSpec, RegionIndex};
use crate::hj2d::{build_masked_grid, solve_eps, EpsSolution, Hj2dError, MaskedGrid, NodeClass, SolveOptions};
use crate::level_set::{trace_level, LevelSetError, OrbitOptions};
use crate::norm;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvergenceError {
    #[error(transparent)]
    Orbit(#[from] LevelSetError),
    #[error(transparent)]
    Solver(#[from] Hj2dError),
    #[error("orbit at h = {h:.6e} on edge {edge} leaves the solved grid")]
    OffGrid { edge: usize, h: f64 },
    #[error("edge {edge} has {got} trace samples, need at least 3")]
    InsufficientSamples { edge: usize, got: usize },
    #[error("ε list must be strictly decreasing and positive")]
    EpsOrder,
    #[error("grid/ε coupling {coupling:.3} exceeds the cap {cap:.3} at ε = {eps}")]
    Coupling { eps: f64, coupling: f64, cap: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub h: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub osc: f64,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTrace {
    pub edge: usize,
    pub samples: Vec<TraceSample>,
}

/// Max and min of `u^ε` along the orbits `c_i(h)`. The orbit polyline is
/// subdivided to half a grid cell before interpolating.
pub fn project_to_edges(
    sol: &EpsSolution,
    spec: &HamiltonianSpec,
    h_samples: &[(usize, Vec<f64>)],
    opts: &OrbitOptions,
) -> Result<Vec<EdgeTrace>, ConvergenceError> {
    let cell = sol.lattice.spacing;
    h_samples
        .iter()
        .map(|(edge, hs)| {
            let samples = hs
                .iter()
                .map(|&h| {
                    let orbit = trace_level(spec, *edge, h, opts)?;
                    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
                    for w in orbit.points.windows(2) {
                        let d = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
                        let pieces = ((norm(d) / (0.5 * cell)).ceil() as usize).max(1);
                        for s in 0..pieces {
                            let t = s as f64 / pieces as f64;
                            let p = [w[0][0] + t * d[0], w[0][1] + t * d[1]];
                            let v = sol
                                .interpolate(p)
                                .ok_or(ConvergenceError::OffGrid { edge: *edge, h })?;
                            hi = hi.max(v);
                            lo = lo.min(v);
                        }
                    }
                    Ok(TraceSample {
                        h,
                        v_plus: hi,
                        v_minus: lo,
                        osc: hi - lo,
                        period: orbit.period,
                    })
                })
                .collect::<Result<Vec<_>, ConvergenceError>>()?;
            Ok(EdgeTrace {
                edge: *edge,
                samples,
            })
        })
        .collect()
}

/// `u(x) = u_i(H(x))` on the masked grid: the edge of an interior node is
/// its region, the zero band takes `d`, boundary nodes take their own edge.
pub fn limit_field(grid: &MaskedGrid, gs: &GraphSolution) -> Vec<f64> {
    (0..grid.lattice.len())
        .map(|k| match (grid.class[k], grid.region[k]) {
            (NodeClass::Outside, _) => f64::NAN,
            (NodeClass::Boundary(e), _) => gs.value(e, grid.h[k]),
            (_, RegionIndex::Edge(e)) => gs.value(e, grid.h[k]),
            _ => gs.d,
        })
        .collect()
}

/// Interior nodes at Euclidean distance at least `delta` from every
/// boundary node and every node of the zero band.
pub fn compact_mask(grid: &MaskedGrid, delta: f64) -> Vec<bool> {
    let l = &grid.lattice;
    let r = (delta / l.spacing).ceil() as i64;
    let r2 = (delta / l.spacing).powi(2);
    let excluded = |k: usize| {
        matches!(grid.class[k], NodeClass::Boundary(_)) || grid.region[k] == RegionIndex::ZeroLevel
    };
    (0..l.len())
        .map(|k| {
            if grid.class[k] != NodeClass::Interior || grid.region[k] == RegionIndex::ZeroLevel {
                return false;
            }
            let (i, j) = l.coords(k);
            for dj in -r..=r {
                for di in -r..=r {
                    if ((di * di + dj * dj) as f64) >= r2 + 1e-9 {
                        continue;
                    }
                    let (qi, qj) = (i as i64 + di, j as i64 + dj);
                    if qi < 0 || qj < 0 || qi >= l.nx as i64 || qj >= l.ny as i64 {
                        continue;
                    }
                    if excluded(l.index(qi as usize, qj as usize)) {
                        return false;
                    }
                }
            }
            true
        })
        .collect()
}

/// Largest central-difference gradient of `u` over interior nodes.
pub fn gradient_bound(grid: &MaskedGrid, u: &[f64]) -> f64 {
    let l = &grid.lattice;
    let h = l.spacing;
    let mut best = 0.0f64;
    for k in 0..l.len() {
        if grid.class[k] != NodeClass::Interior {
            continue;
        }
        let gx = (u[k + 1] - u[k - 1]) / (2.0 * h);
        let gy = (u[k + l.nx] - u[k - l.nx]) / (2.0 * h);
        best = best.max(norm([gx, gy]));
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationRow {
    pub edge: usize,
    pub h: f64,
    pub osc: f64,
    pub bound: f64,
}

impl OscillationRow {
    pub fn holds(&self) -> bool {
        self.osc <= self.bound
    }
}

/// Compares each orbit oscillation with `2εC_M(λ+1)T_i(h)` plus an
/// interpolation allowance of two cells times the field gradient.
pub fn oscillation_table(
    sol: &EpsSolution,
    traces: &[EdgeTrace],
    gradient: f64,
) -> Vec<OscillationRow> {
    let slack = 2.0 * sol.lattice.spacing * gradient;
    traces
        .iter()
        .flat_map(|t| {
            t.samples.iter().map(move |s| OscillationRow {
                edge: t.edge,
                h: s.h,
                osc: s.osc,
                bound: 2.0 * sol.eps * sol.c_m * (sol.lambda + 1.0) * s.period + slack,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeGap {
    pub edge: usize,
    /// Linear extrapolations of `v_i^±` to `h = 0`.
    pub v_plus0: f64,
    pub v_minus0: f64,
    /// `max |v_i^±(0) - d|`.
    pub gap: f64,
}

/// Least-squares line through the points, evaluated at 0.
fn extrapolate_to_zero(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return my;
    }
    my - sxy / sxx * mx
}

/// Extrapolates `v_i^±` linearly over the three samples nearest the node.
pub fn node_value_check(traces: &[EdgeTrace], d: f64) -> Result<Vec<NodeGap>, ConvergenceError> {
    traces
        .iter()
        .map(|t| {
            if t.samples.len() < 3 {
                return Err(ConvergenceError::InsufficientSamples {
                    edge: t.edge,
                    got: t.samples.len(),
                });
            }
            let mut s = t.samples.clone();
            s.sort_by(|a, b| a.h.abs().total_cmp(&b.h.abs()));
            let near = &s[..3];
            let vp = extrapolate_to_zero(&near.iter().map(|x| (x.h, x.v_plus)).collect::<Vec<_>>());
            let vm = extrapolate_to_zero(&near.iter().map(|x| (x.h, x.v_minus)).collect::<Vec<_>>());
            Ok(NodeGap {
                edge: t.edge,
                v_plus0: vp,
                v_minus0: vm,
                gap: (vp - d).abs().max((vm - d).abs()),
            })
        })
        .collect()
}

/// Largest `v_0^+(0) - v_i^+(0)` over the well edges; the limit ordering
/// puts it at or below zero.
pub fn edge_ordering_excess(gaps: &[NodeGap]) -> f64 {
    let Some(outer) = gaps.iter().find(|g| g.edge == 0) else {
        return f64::NAN;
    };
    gaps.iter()
        .filter(|g| g.edge != 0)
        .map(|g| outer.v_plus0 - g.v_plus0)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub lambda: f64,
    /// Strictly decreasing.
    pub eps: Vec<f64>,
    /// Nodes along `x`, one per `ε`.
    pub resolutions: Vec<usize>,
    pub solve: SolveOptions,
    /// Largest allowed `spacing · max|DH| / ε`.
    pub coupling_cap: f64,
    /// Exclusion distance of `K` in cells of the coarsest grid.
    pub k_cells: f64,
    pub h_samples: Vec<(usize, Vec<f64>)>,
    pub orbit: OrbitOptions,
    /// `M` of the lower bound `G ≥ ν|p| - M`.
    pub m: f64,
}

/// Default orbit levels: `|h| ∈ {0.8, 0.6, 0.4, 0.2, 0.08, 0.04, 0.02}·|h_i|`.
pub fn default_h_samples(spec: &HamiltonianSpec) -> Vec<(usize, Vec<f64>)> {
    (0..spec.n_edges())
        .map(|e| {
            let hi = spec.thresholds.level(e);
            (e, [0.8, 0.6, 0.4, 0.2, 0.08, 0.04, 0.02].iter().map(|f| f * hi).collect())
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct EpsRecord {
    pub eps: f64,
    pub resolution: usize,
    pub coupling: f64,
    pub sweeps: usize,
    pub residual: f64,
    pub sup_norm: f64,
    pub bound: f64,
    pub c_m: f64,
    /// `max_K |u^ε - u∘H|`.
    pub e_k: f64,
    /// `max_Ω̄ (u∘H - u^ε)_+`.
    pub negative_part: f64,
    pub k_nodes: usize,
    pub gradient: f64,
    pub traces: Vec<EdgeTrace>,
    pub oscillation: Vec<OscillationRow>,
    pub node_gaps: Vec<NodeGap>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub lambda: f64,
    pub d: f64,
    pub range: f64,
    pub delta_k: f64,
    pub records: Vec<EpsRecord>,
    /// Set when a solve failed; records stop before that `ε`.
    pub incomplete: Option<String>,
    /// Least-squares slope of `log e_ε` against `log ε`.
    pub rate: f64,
}

impl ConvergenceReport {
    pub fn e_strictly_decreasing(&self) -> bool {
        self.records.windows(2).all(|w| w[1].e_k < w[0].e_k)
    }

    pub fn negative_part_decreasing(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].negative_part < w[0].negative_part)
    }

    pub fn negative_part_below_e(&self) -> bool {
        self.records.iter().all(|r| r.negative_part <= r.e_k)
    }

    /// `e` at the last `ε` over `e` at the first.
    pub fn reduction(&self) -> f64 {
        match (self.records.first(), self.records.last()) {
            (Some(a), Some(b)) => b.e_k / a.e_k,
            _ => f64::NAN,
        }
    }

    /// Largest node gap at the smallest `ε` over the solution range.
    pub fn relative_node_gap(&self) -> f64 {
        self.records
            .last()
            .map(|r| r.node_gaps.iter().map(|g| g.gap).fold(0.0, f64::max) / self.range)
            .unwrap_or(f64::NAN)
    }
}

pub(crate) fn fit_rate(eps: &[f64], e: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(e)
        .filter(|(_, v)| **v > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Builds the masked grids of a sweep and validates the `ε` order and the
/// grid/`ε` coupling. Returns the grids and `δ_K`.
pub fn prepare_sweep(
    spec: &HamiltonianSpec,
    datum: &BoundaryDatum,
    cfg: &SweepConfig,
) -> Result<(Vec<MaskedGrid>, f64), ConvergenceError> {
    if cfg.eps.is_empty()
        || cfg.eps.iter().any(|e| !(*e > 0.0))
        || cfg.eps.windows(2).any(|w| w[1] >= w[0])
        || cfg.resolutions.len() != cfg.eps.len()
    {
        return Err(ConvergenceError::EpsOrder);
    }
    let grids = cfg
        .resolutions
        .iter()
        .map(|&r| build_masked_grid(spec, r, datum))
        .collect::<Result<Vec<_>, _>>()?;
    for (grid, &eps) in grids.iter().zip(&cfg.eps) {
        let c = coupling(spec, grid, eps);
        if c > cfg.coupling_cap {
            return Err(ConvergenceError::Coupling {
                eps,
                coupling: c,
                cap: cfg.coupling_cap,
            });
        }
    }
    let delta_k = cfg.k_cells * grids.iter().map(|g| g.spacing()).fold(0.0, f64::max);
    Ok((grids, delta_k))
}

/// `spacing · max|DH| / ε` over the active nodes.
pub fn coupling(spec: &HamiltonianSpec, grid: &MaskedGrid, eps: f64) -> f64 {
    let max_grad = (0..grid.lattice.len())
        .filter(|&k| grid.is_active(k))
        .map(|k| {
            let (i, j) = grid.lattice.coords(k);
            norm(spec.gradient(grid.lattice.point(i, j)))
        })
        .fold(0.0, f64::max);
    grid.spacing() * max_grad / eps
}

/// Measures one solution against `u∘H`.
pub fn measure_solution(
    spec: &HamiltonianSpec,
    grid: &MaskedGrid,
    sol: &EpsSolution,
    gs: &GraphSolution,
    delta_k: f64,
    cfg: &SweepConfig,
) -> Result<EpsRecord, ConvergenceError> {
    let limit = limit_field(grid, gs);
    let k_mask = compact_mask(grid, delta_k);
    let mut e_k = 0.0f64;
    let mut neg = 0.0f64;
    for k in 0..grid.lattice.len() {
        if !grid.is_active(k) {
            continue;
        }
        let diff = sol.u[k] - limit[k];
        neg = neg.max(-diff);
        if k_mask[k] {
            e_k = e_k.max(diff.abs());
        }
    }
    let traces = project_to_edges(sol, spec, &cfg.h_samples, &cfg.orbit)?;
    let gradient = gradient_bound(grid, &sol.u);
    let oscillation = oscillation_table(sol, &traces, gradient);
    let node_gaps = node_value_check(&traces, gs.d)?;
    Ok(EpsRecord {
        eps: sol.eps,
        resolution: grid.lattice.nx,
        coupling: coupling(spec, grid, sol.eps),
        sweeps: sol.iterations,
        residual: sol.residual_inf,
        sup_norm: sol.sup_norm(),
        bound: sol.bound,
        c_m: sol.c_m,
        e_k,
        negative_part: neg,
        k_nodes: k_mask.iter().filter(|b| **b).count(),
        gradient,
        traces,
        oscillation,
        node_gaps,
    })
}

/// Sequential reduction of per-`ε` outcomes into a report. Records stop at
/// the first failure, which marks the report incomplete.
pub fn assemble_report(
    gs: &GraphSolution,
    lambda: f64,
    delta_k: f64,
    outcomes: Vec<Result<EpsRecord, ConvergenceError>>,
) -> ConvergenceReport {
    let mut records = Vec::new();
    let mut incomplete = None;
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(e) => {
                incomplete = Some(e.to_string());
                break;
            }
        }
    }
    let rate = fit_rate(
        &records.iter().map(|r| r.eps).collect::<Vec<_>>(),
        &records.iter().map(|r| r.e_k).collect::<Vec<_>>(),
    );
    ConvergenceReport {
        lambda,
        d: gs.d,
        range: gs.range(),
        delta_k,
        records,
        incomplete,
        rate,
    }
}

/// Solves every `ε` of the sweep (in parallel), then measures each
/// solution against `u∘H`. Returns the report and the solutions that
/// completed.
pub fn eps_sweep(
    spec: &HamiltonianSpec,
    g: &GFamily,
    datum: &BoundaryDatum,
    gs: &GraphSolution,
    cfg: &SweepConfig,
) -> Result<(ConvergenceReport, Vec<EpsSolution>), ConvergenceError> {
    let (grids, delta_k) = prepare_sweep(spec, datum, cfg)?;
    let outcomes: Vec<Result<(EpsRecord, EpsSolution), ConvergenceError>> = grids
        .par_iter()
        .zip(cfg.eps.par_iter())
        .map(|(grid, &eps)| {
            let sol = solve_eps(grid, spec, g, cfg.lambda, eps, cfg.m, &cfg.solve)?;
            let rec = measure_solution(spec, grid, &sol, gs, delta_k, cfg)?;
            Ok((rec, sol))
        })
        .collect();
    let mut sols = Vec::new();
    let mut recs = Vec::new();
    for o in outcomes {
        match o {
            Ok((r, s)) => {
                sols.push(s);
                recs.push(Ok(r));
            }
            Err(e) => {
                recs.push(Err(e));
                break;
            }
        }
    }
    Ok((assemble_report(gs, cfg.lambda, delta_k, recs), sols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hj2d::Scheme;
    use crate::RegionMap;

    #[test]
    fn extrapolation_is_exact_on_lines() {
        let pts = [(0.01, 1.0 + 2.0 * 0.01), (0.02, 1.04), (0.04, 1.08)];
        assert!((extrapolate_to_zero(&pts) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_field_has_zero_oscillation() {
        let spec = HamiltonianSpec::double_well();
        let grid = build_masked_grid(&spec, 128, &BoundaryDatum::Constant(5.0)).unwrap();
        let sol = solve_eps(&grid, &spec, &GFamily::Constant(-1.0), 1.0, 0.1, 1.0, &SolveOptions {
            tol: 1e-13,
            ..Default::default()
        })
        .unwrap();
        let traces = project_to_edges(&sol, &spec, &default_h_samples(&spec), &OrbitOptions::default())
            .unwrap();
        for t in &traces {
            for s in &t.samples {
                assert!(s.osc <= 1e-11, "{s:?}");
                assert!(s.v_minus <= s.v_plus);
            }
        }
        let gaps = node_value_check(&traces, 1.0).unwrap();
        assert!(gaps.iter().all(|g| g.gap < 1e-10));
        assert!(matches!(
            node_value_check(&[EdgeTrace { edge: 0, samples: traces[0].samples[..2].to_vec() }], 1.0),
            Err(ConvergenceError::InsufficientSamples { edge: 0, got: 2 })
        ));
    }

    fn linear_graph(d: f64, slope: f64) -> GraphSolution {
        use crate::graph::{EdgeGrid, EdgeSolution};
        let spec = HamiltonianSpec::double_well();
        let edges = (0..3)
            .map(|e| {
                let outer = spec.thresholds.level(e);
                let h: Vec<f64> = (0..=100).map(|k| outer * k as f64 / 100.0).collect();
                let mut h = h;
                h.sort_by(f64::total_cmp);
                let u = h.iter().map(|v| d + slope * v.abs()).collect();
                EdgeSolution {
                    edge: e,
                    grid: EdgeGrid { outer, h },
                    u,
                    node_value: d,
                    boundary_datum: 0.0,
                    residual_inf: 0.0,
                    node_residual: 0.0,
                    sweeps: 0,
                    max_slope: slope,
                    bound: 1.0,
                }
            })
            .collect();
        GraphSolution { lambda: 1.0, d, edges, free_values: vec![], bound: 1.0 }
    }

    #[test]
    fn composed_limit_has_small_node_gap() {
        let spec = HamiltonianSpec::double_well();
        let grid = build_masked_grid(&spec, 256, &BoundaryDatum::Constant(0.0)).unwrap();
        let gs = linear_graph(-0.5, 2.0);
        let u = limit_field(&grid, &gs);
        // The node band takes d on every edge.
        for k in 0..u.len() {
            if grid.region[k] == RegionIndex::ZeroLevel && grid.is_active(k) {
                assert_eq!(u[k], -0.5);
            }
        }
        let sol = EpsSolution {
            eps: 0.1,
            lambda: 1.0,
            lattice: grid.lattice,
            u,
            iterations: 0,
            residual_inf: 0.0,
            tol: 0.0,
            c_m: 1.0,
            bound: 1.0,
        };
        let traces = project_to_edges(&sol, &spec, &default_h_samples(&spec), &OrbitOptions::default())
            .unwrap();
        let gaps = node_value_check(&traces, -0.5).unwrap();
        // u∘H has a kink on {H = 0}; cells straddling it interpolate across
        // one cell of H-variation, about slope · cell · |DH| with |DH| < 1
        // on the sampled orbits near the node.
        let allowance = 2.0 * grid.spacing();
        for g in &gaps {
            assert!(g.gap <= allowance, "{g:?}");
        }
        assert!(edge_ordering_excess(&gaps).abs() <= allowance);
    }

    #[test]
    fn compact_set_keeps_its_distance() {
        let spec = HamiltonianSpec::double_well();
        let grid = build_masked_grid(&spec, 128, &BoundaryDatum::Constant(1.0)).unwrap();
        let delta = 4.0 * grid.spacing();
        let mask = compact_mask(&grid, delta);
        let l = &grid.lattice;
        let bad: Vec<usize> = (0..l.len())
            .filter(|&k| {
                matches!(grid.class[k], NodeClass::Boundary(_)) || grid.region[k] == RegionIndex::ZeroLevel
            })
            .collect();
        let mut kept = 0;
        for k in (0..l.len()).filter(|&k| mask[k]) {
            kept += 1;
            let (i, j) = l.coords(k);
            let p = l.point(i, j);
            for &b in &bad {
                let (bi, bj) = l.coords(b);
                let q = l.point(bi, bj);
                assert!(norm([p[0] - q[0], p[1] - q[1]]) >= delta * (1.0 - 1e-9));
            }
        }
        assert!(kept > 100);
    }

    #[test]
    fn coupling_is_enforced() {
        let spec = HamiltonianSpec::double_well();
        let map = RegionMap::reference(&spec, 201);
        let g = GFamily::games(&spec, &map, 2.0, Default::default());
        let gs = GraphSolution {
            lambda: 1.0,
            d: 0.0,
            edges: vec![],
            free_values: vec![],
            bound: 1.0,
        };
        let cfg = SweepConfig {
            lambda: 1.0,
            eps: vec![0.01],
            resolutions: vec![64],
            solve: SolveOptions::default(),
            coupling_cap: 0.5,
            k_cells: 4.0,
            h_samples: default_h_samples(&spec),
            orbit: OrbitOptions::default(),
            m: 0.0,
        };
        let r = eps_sweep(&spec, &g, &BoundaryDatum::ScaledHamiltonian(8.0), &gs, &cfg);
        assert!(matches!(r, Err(ConvergenceError::Coupling { .. })));
        let grid = build_masked_grid(&spec, 64, &BoundaryDatum::Constant(1.0)).unwrap();
        let s = Scheme::new(&grid, &spec, &g, 1.0, 0.01, 1.0).unwrap();
        assert!(s.coupling() > 0.5);
    }
}

//! The seven stages. Each one reads the config and the files of the stages
//! it depends on and writes its own files; nothing depends on wall-clock
//! time, and the only randomness is seeded from the config.

use crate::boundary::boundary_minimum;
use crate::checks::{self, finite, Suite};
use crate::config::{ExperimentConfig, Problem};
use crate::svg::{field_plot, line_plot, Series, PALETTE};
use crate::{Artifacts, CliError, Subcommand};
use hj_core::convergence::{
    assemble_report, default_h_samples, edge_ordering_excess, measure_solution, prepare_sweep, ConvergenceReport,
    EpsRecord, SweepConfig,
};
use hj_core::format::{read_graph_solution, read_profile, read_solution, write_graph_solution, write_profile, write_solution, FormatError};
use hj_core::graph::{oracle_node_scan, solve_graph_maximal, verify_solution, GraphSolution};
use hj_core::hamiltonian::{find_critical_points, verify_structure, CriticalKind, SeedGrid, StructureSamples};
use hj_core::hj2d::{solve_eps, EpsSolution, MaskedGrid, NodeClass};
use hj_core::level_set::{build_edge_profile, default_h_grid, default_q_grid, validate_profile, EdgeProfile};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::Path;

/// Criterion thresholds on the convergence report.
pub const REDUCTION_LIMIT: f64 = 0.5;
pub const NODE_GAP_LIMIT: f64 = 0.05;

pub fn run_stage(sub: Subcommand, cfg: &ExperimentConfig, art: &Artifacts) -> Result<(), CliError> {
    let problem = cfg.problem()?;
    match sub {
        Subcommand::Geometry => geometry(cfg, &problem, art),
        Subcommand::Profile => profile(cfg, &problem, art),
        Subcommand::Solve2d => solve2d(cfg, &problem, art),
        Subcommand::SolveGraph => solvegraph(cfg, &problem, art),
        Subcommand::Converge => converge(cfg, &problem, art),
        Subcommand::Report => report(cfg, &problem, art),
        Subcommand::Check => check(cfg, &problem, art),
    }
}

/// Runs every stage in order.
pub fn run_all(cfg: &ExperimentConfig, art: &Artifacts) -> Result<(), CliError> {
    for sub in Subcommand::ALL {
        run_stage(sub, cfg, art)?;
    }
    Ok(())
}

fn format_err(path: &Path, source: FormatError) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        source,
    }
}

pub fn sweep_config(cfg: &ExperimentConfig, p: &Problem) -> SweepConfig {
    SweepConfig {
        lambda: cfg.lambda,
        eps: cfg.eps.clone(),
        resolutions: cfg.resolutions.clone(),
        solve: cfg.solver,
        coupling_cap: cfg.harness.coupling_cap,
        k_cells: cfg.harness.k_cells,
        h_samples: default_h_samples(&p.spec),
        orbit: cfg.orbit(),
        m: p.g.coercivity(&p.spec, &p.map).m,
    }
}

fn point(p: [f64; 2]) -> Value {
    json!([p[0], p[1]])
}

fn geometry(cfg: &ExperimentConfig, p: &Problem, art: &Artifacts) -> Result<(), CliError> {
    let spec = &p.spec;
    spec.validate()?;
    let found = find_critical_points(spec, &SeedGrid::covering(spec.domain, 41), spec.n_points())?;
    let structure = verify_structure(spec, &StructureSamples::default_for(spec))?;
    let boundary = (0..spec.n_edges())
        .map(|e| boundary_minimum(spec, &p.datum, e, &cfg.orbit()))
        .collect::<Result<Vec<_>, _>>()?;
    let coer = p.g.coercivity(spec, &p.map);
    let v = json!({
        "thresholds": (0..spec.n_edges()).map(|e| spec.thresholds.level(e)).collect::<Vec<_>>(),
        "critical_points": spec.critical_points.iter().map(|c| json!({
            "location": point(c.location),
            "kind": match c.kind { CriticalKind::Saddle => "saddle", CriticalKind::Minimum => "minimum" },
            "value": c.value,
        })).collect::<Vec<_>>(),
        "located": found.iter().map(|c| point(c.location)).collect::<Vec<_>>(),
        "exponents": {"m": spec.exponents.m, "n": spec.exponents.n},
        "structure": {
            "hessian_exponent": structure.hessian_fit.exponent,
            "gradient_exponent": structure.gradient_fit.exponent,
            "alpha": structure.alpha,
            "rho": structure.rho,
            "a0": structure.a0,
            "a0_argmin": point(structure.a0_argmin),
            "a0_samples": structure.a0_samples,
            "a3_growth": structure.a3_growth,
            "a3_fit": finite(structure.a3_fit),
            "m_h": structure.m_h.iter().map(|(r, m)| json!([r, m])).collect::<Vec<_>>(),
            "exponents_ok": structure.exponents_ok,
            "alpha_ok": structure.alpha_ok,
            "gradient_floor_ok": structure.gradient_floor_ok,
            "m_h_increasing": structure.m_h_increasing,
            "growth_ok": structure.growth_ok,
            "all_pass": structure.all_pass(),
        },
        "max_gradient": p.max_gradient,
        "coercivity": {"nu": coer.nu, "m": coer.m},
        "boundary_data": boundary,
    });
    art.write_json("geometry.json", &v)
}

fn profile_opts(cfg: &ExperimentConfig) -> hj_core::level_set::ProfileOptions {
    cfg.profile
}

fn profile(cfg: &ExperimentConfig, p: &Problem, art: &Artifacts) -> Result<(), CliError> {
    art.read(&art.path("geometry.json"))?;
    let opts = profile_opts(cfg);
    let qs = default_q_grid(opts.q_max, opts.n_q);
    let mut summary = Vec::new();
    for e in 0..p.spec.n_edges() {
        let hs = default_h_grid(&p.spec, e, &opts);
        let prof = build_edge_profile(&p.spec, &p.map, &p.g, e, &hs, &qs, &opts);
        let rep = validate_profile(&prof);
        art.write(&format!("profile_edge{e}.txt"), &write_profile(&prof))?;
        summary.push(json!({
            "edge": e,
            "n_h": prof.n_h(),
            "n_q": prof.n_q(),
            "nu": prof.nu,
            "m": prof.m,
            "gamma": prof.gamma,
            "lip_p": prof.lip_p,
            "failed_levels": prof.failed.iter().map(|(h, m)| json!({"h": h, "message": m})).collect::<Vec<_>>(),
            "entries_checked": rep.entries_checked,
            "violations": rep.violations.len(),
            "min_period": rep.min_period,
            "min_length": rep.min_length,
            "passed": rep.passed() && prof.failed.is_empty(),
        }));
    }
    art.write_json("profiles.json", &json!({ "edges": summary }))
}

fn load_profiles(p: &Problem, art: &Artifacts) -> Result<Vec<EdgeProfile>, CliError> {
    (0..p.spec.n_edges())
        .map(|e| {
            let path = art.profile(e);
            let text = art.read(&path)?;
            read_profile(&text).map_err(|s| format_err(&path, s))
        })
        .collect()
}

fn solve2d(cfg: &ExperimentConfig, p: &Problem, art: &Artifacts) -> Result<(), CliError> {
    art.read(&art.path("geometry.json"))?;
    let sweep = sweep_config(cfg, p);
    let (grids, delta_k) = prepare_sweep(&p.spec, &p.datum, &sweep)?;
    let results: Vec<_> = grids
        .par_iter()
        .zip(cfg.eps.par_iter())
        .map(|(grid, &eps)| solve_eps(grid, &p.spec, &p.g, cfg.lambda, eps, sweep.m, &cfg.solver))
        .collect();
    let mut entries = Vec::new();
    let mut first_err = None;
    for (k, (res, grid)) in results.into_iter().zip(&grids).enumerate() {
        let coupling = hj_core::convergence::coupling(&p.spec, grid, cfg.eps[k]);
        match res {
            Ok(sol) => {
                art.write(&format!("solution_{k}.txt"), &write_solution(&sol, &grid.class))?;
                entries.push(json!({
                    "index": k,
                    "eps": sol.eps,
                    "resolution": grid.lattice.nx,
                    "coupling": coupling,
                    "status": "ok",
                    "iterations": sol.iterations,
                    "residual": sol.residual_inf,
                    "tol": sol.tol,
                    "c_m": sol.c_m,
                    "bound": sol.bound,
                    "sup_norm": sol.sup_norm(),
                }));
            }
            Err(e) => {
                art.remove(&format!("solution_{k}.txt"));
                entries.push(json!({
                    "index": k,
                    "eps": cfg.eps[k],
                    "resolution": grid.lattice.nx,
                    "coupling": coupling,
                    "status": "failed",
                    "message": e.to_string(),
                }));
                first_err.get_or_insert(e);
            }
        }
    }
    art.write_json("solve2d.json", &json!({ "delta_k": delta_k, "solutions": entries }))?;
    match first_err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn boundary_data(art: &Artifacts, n: usize) -> Result<Vec<f64>, CliError> {
    let geo = art.read_json("geometry.json")?;
    let data: Vec<f64> = geo["boundary_data"]
        .as_array()
        .map(|a| a.iter().filter_map(Value::as_f64).collect())
        .unwrap_or_default();
    if data.len() != n {
        return Err(CliError::Stage(format!(
            "geometry.json lists {} boundary values for {n} edges",
            data.len()
        )));
    }
    Ok(data)
}

fn solvegraph(cfg: &ExperimentConfig, p: &Problem, art: &Artifacts) -> Result<(), CliError> {
    let profiles = load_profiles(p, art)?;
    let data = boundary_data(art, p.spec.n_edges())?;
    let gs = solve_graph_maximal(&profiles, &data, cfg.lambda, &cfg.graph)?;
    let (oracle, step) = oracle_node_scan(&profiles, &data, cfg.lambda, &cfg.graph)?;
    let rep = verify_solution(&gs, &profiles, &cfg.graph, None);
    art.write("graph.txt", &write_graph_solution(&gs))?;
    art.write_json(
        "graph_check.json",
        &json!({
            "lambda": gs.lambda,
            "d": gs.d,
            "oracle_d": oracle,
            "oracle_step": step,
            "within_step": (gs.d - oracle).abs() <= step,
            "free_values": gs.free_values,
            "boundary_data": data,
            "range": gs.range(),
            "bound": gs.bound,
            "verify": {
                "passed": rep.passed(),
                "residuals": rep.residuals,
                "residual_tol": rep.residual_tol,
                "boundary_excess": rep.boundary_excess,
                "node_mismatch": rep.node_mismatch,
                "modulus_violations": rep.modulus_violations,
            },
        }),
    )
}

fn load_graph(art: &Artifacts) -> Result<GraphSolution, CliError> {
    let path = art.path("graph.txt");
    let text = art.read(&path)?;
    read_graph_solution(&text).map_err(|e| format_err(&path, e))
}

/// One stored solution with its rebuilt grid.
pub type Stored = (EpsSolution, Vec<NodeClass>, MaskedGrid);

/// Solutions listed as solved in `solve2d.json`, in `ε` order, up to the
/// first failure, and the message of that failure.
pub fn load_solutions(
    cfg: &ExperimentConfig,
    p: &Problem,
    art: &Artifacts,
) -> Result<(Vec<Stored>, f64, Option<String>), CliError> {
    let index = art.read_json("solve2d.json")?;
    let (grids, delta_k) = prepare_sweep(&p.spec, &p.datum, &sweep_config(cfg, p))?;
    let entries = index["solutions"].as_array().cloned().unwrap_or_default();
    let mut out = Vec::new();
    let mut failure = None;
    for (k, grid) in grids.into_iter().enumerate() {
        let status = entries.get(k).and_then(|e| e["status"].as_str()).unwrap_or("missing");
        if status != "ok" {
            let msg = entries
                .get(k)
                .and_then(|e| e["message"].as_str())
                .unwrap_or("not solved");
            failure = Some(format!("ε = {}: {msg}", cfg.eps[k]));
            break;
        }
        let path = art.solution(k);
        let text = art.read(&path)?;
        let (sol, class) = read_solution(&text).map_err(|e| format_err(&path, e))?;
        if class != grid.class || sol.eps != cfg.eps[k] {
            return Err(format_err(
                &path,
                FormatError::Inconsistent("stored solution does not match the configured grid".into()),
            ));
        }
        out.push((sol, class, grid));
    }
    Ok((out, delta_k, failure))
}

fn record_json(r: &EpsRecord) -> Value {
    json!({
        "eps": r.eps,
        "resolution": r.resolution,
        "coupling": r.coupling,
        "sweeps": r.sweeps,
        "residual": r.residual,
        "sup_norm": r.sup_norm,
        "bound": r.bound,
        "c_m": r.c_m,
        "e_k": r.e_k,
        "negative_part": r.negative_part,
        "k_nodes": r.k_nodes,
        "gradient": r.gradient,
        "edge_ordering_excess": finite(edge_ordering_excess(&r.node_gaps)),
        "node_gaps": r.node_gaps.iter().map(|g| json!({
            "edge": g.edge, "v_plus0": g.v_plus0, "v_minus0": g.v_minus0, "gap": g.gap,
        })).collect::<Vec<_>>(),
        "oscillation": r.oscillation.iter().map(|o| json!({
            "edge": o.edge, "h": o.h, "osc": o.osc, "bound": o.bound, "holds": o.holds(),
        })).collect::<Vec<_>>(),
        "traces": r.traces.iter().map(|t| json!({
            "edge": t.edge,
            "samples": t.samples.iter().map(|s| json!({
                "h": s.h, "v_plus": s.v_plus, "v_minus": s.v_minus, "osc": s.osc, "period": s.period,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// Pass/fail of the convergence measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceCriteria {
    pub complete: bool,
    pub e_decreasing: bool,
    pub reduction: f64,
    pub negative_decreasing: bool,
    pub negative_below_e: bool,
    pub relative_node_gap: f64,
}

impl ConvergenceCriteria {
    pub fn of(rep: &ConvergenceReport) -> Self {
        Self {
            complete: rep.incomplete.is_none(),
            e_decreasing: rep.e_strictly_decreasing(),
            reduction: rep.reduction(),
            negative_decreasing: rep.negative_part_decreasing(),
            negative_below_e: rep.negative_part_below_e(),
            relative_node_gap: rep.relative_node_gap(),
        }
    }

    pub fn error_ok(&self) -> bool {
        self.complete && self.e_decreasing && self.reduction <= REDUCTION_LIMIT
    }

    pub fn negative_ok(&self) -> bool {
        self.complete && self.negative_decreasing
    }

    pub fn node_gap_ok(&self) -> bool {
        self.complete && self.relative_node_gap <= NODE_GAP_LIMIT
    }

    fn to_json(self) -> Value {
        json!({
            "complete": self.complete,
            "e_strictly_decreasing": self.e_decreasing,
            "reduction": finite(self.reduction),
            "reduction_limit": REDUCTION_LIMIT,
            "negative_part_decreasing": self.negative_decreasing,
            "negative_part_below_e": self.negative_below_e,
            "relative_node_gap": finite(self.relative_node_gap),
            "node_gap_limit": NODE_GAP_LIMIT,
            "error_ok": self.error_ok(),
            "negative_ok": self.negative_ok(),
            "node_gap_ok": self.node_gap_ok(),
        })
    }
}

pub fn convergence_report(
    cfg: &ExperimentConfig,
    p: &Problem,
    art: &Artifacts,
) -> Result<ConvergenceReport, CliError> {
    let gs = load_graph(art)?;
    let (stored, delta_k, failure) = load_solutions(cfg, p, art)?;
    let sweep = sweep_config(cfg, p);
    let outcomes = stored
        .par_iter()
        .map(|(sol, _, grid)| measure_solution(&p.spec, grid, sol, &gs, delta_k, &sweep))
        .collect();
    let mut rep = assemble_report(&gs, cfg.lambda, delta_k, outcomes);
    if rep.incomplete.is_none() {
        rep.incomplete = failure;
    }
    Ok(rep)
}

fn converge(cfg: &ExperimentConfig, p: &Problem, art: &Artifacts) -> Result<(), CliError> {
    let rep = convergence_report(cfg, p, art)?;
    let v = json!({
        "lambda": rep.lambda,
        "d": rep.d,
        "range": rep.range,
        "delta_k": rep.delta_k,
        "rate": finite(rep.rate),
        "incomplete": rep.incomplete,
        "criteria": ConvergenceCriteria::of(&rep).to_json(),
        "records": rep.records.iter().map(record_json).collect::<Vec<_>>(),
    });
    art.write_json("convergence.json", &v)?;
    match rep.incomplete {
        Some(msg) => Err(CliError::Stage(format!("convergence report incomplete: {msg}"))),
        None => Ok(()),
    }
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn report(cfg: &ExperimentConfig, p: &Problem, art: &Artifacts) -> Result<(), CliError> {
    let conv = art.read_json("convergence.json")?;
    let graph_check = art.read_json("graph_check.json")?;
    let profiles = art.read_json("profiles.json")?;
    let gs = load_graph(art)?;
    let (stored, _, _) = load_solutions(cfg, p, art)?;
    let records = conv["records"].as_array().cloned().unwrap_or_default();

    let mut s = String::new();
    let _ = writeln!(s, "lambda {}", cfg.lambda);
    let _ = writeln!(s, "edges {}", p.spec.n_edges());
    let _ = writeln!(s, "max |DH| {:.6e}", p.max_gradient);
    let _ = writeln!(s);
    let _ = writeln!(s, "profiles");
    for e in profiles["edges"].as_array().into_iter().flatten() {
        let _ = writeln!(
            s,
            "  edge {}  nu {:.6e}  M {:.6e}  gamma {:.6e}  violations {}  passed {}",
            e["edge"], f(&e["nu"]), f(&e["m"]), f(&e["gamma"]), e["violations"], e["passed"]
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "graph");
    let _ = writeln!(s, "  d* {:.10e}", f(&graph_check["d"]));
    let _ = writeln!(
        s,
        "  oracle {:.10e} (step {:.3e}, within step {})",
        f(&graph_check["oracle_d"]),
        f(&graph_check["oracle_step"]),
        graph_check["within_step"]
    );
    let _ = writeln!(s, "  range {:.6e}  verify {}", f(&graph_check["range"]), graph_check["verify"]["passed"]);
    let _ = writeln!(s);
    let _ = writeln!(s, "convergence (delta_K {:.4e})", f(&conv["delta_k"]));
    let _ = writeln!(
        s,
        "  {:>8} {:>6} {:>12} {:>12} {:>10} {:>12}",
        "eps", "nodes", "e_K", "neg part", "osc/bound", "node gap"
    );
    for r in &records {
        let worst = r["oscillation"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|o| f(&o["osc"]) / f(&o["bound"]))
            .fold(0.0, f64::max);
        let gap = r["node_gaps"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|g| f(&g["gap"]))
            .fold(0.0, f64::max);
        let _ = writeln!(
            s,
            "  {:>8} {:>6} {:>12.4e} {:>12.4e} {:>10.4} {:>12.4e}",
            f(&r["eps"]),
            r["resolution"],
            f(&r["e_k"]),
            f(&r["negative_part"]),
            worst,
            gap
        );
    }
    let c = &conv["criteria"];
    let _ = writeln!(s, "  rate {:.4}", f(&conv["rate"]));
    let _ = writeln!(s, "  e strictly decreasing {}", c["e_strictly_decreasing"]);
    let _ = writeln!(s, "  e(last)/e(first) {:.4} (limit {})", f(&c["reduction"]), REDUCTION_LIMIT);
    let _ = writeln!(s, "  negative part decreasing {}", c["negative_part_decreasing"]);
    let _ = writeln!(
        s,
        "  node gap / range {:.4} (limit {})",
        f(&c["relative_node_gap"]),
        NODE_GAP_LIMIT
    );
    if let Some(msg) = conv["incomplete"].as_str() {
        let _ = writeln!(s, "  INCOMPLETE: {msg}");
    }
    art.write("summary.txt", &s)?;

    let levels: Vec<f64> = (0..p.spec.n_edges())
        .map(|e| p.spec.thresholds.level(e))
        .chain([0.0])
        .collect();
    for (k, (sol, _, _)) in stored.iter().enumerate() {
        let title = format!("u at eps = {}", sol.eps);
        art.write(
            &format!("field_{k}.svg"),
            &field_plot(&title, &sol.lattice, &sol.u, &p.spec, &levels),
        )?;
    }

    let curve = |key: &str| -> Vec<(f64, f64)> { records.iter().map(|r| (f(&r["eps"]), f(&r[key]))).collect() };
    let series = [
        Series {
            label: "e_K".into(),
            points: curve("e_k"),
            colour: PALETTE[0],
            markers: true,
        },
        Series {
            label: "negative part".into(),
            points: curve("negative_part"),
            colour: PALETTE[1],
            markers: true,
        },
    ];
    art.write("convergence.svg", &line_plot("Error against eps", "eps", "error", &series, true))?;

    let last = records.last();
    for e in 0..p.spec.n_edges() {
        let Some(edge) = gs.edges.iter().find(|x| x.edge == e) else { continue };
        let mut series = vec![Series {
            label: format!("graph solution u_{e}"),
            points: edge.grid.h.iter().zip(&edge.u).map(|(h, u)| (*h, *u)).collect(),
            colour: PALETTE[0],
            markers: false,
        }];
        if let Some(r) = last {
            let samples: Vec<&Value> = r["traces"]
                .as_array()
                .into_iter()
                .flatten()
                .filter(|t| t["edge"].as_u64() == Some(e as u64))
                .flat_map(|t| t["samples"].as_array().into_iter().flatten())
                .collect();
            for (key, label, colour) in [("v_plus", "orbit max", PALETTE[1]), ("v_minus", "orbit min", PALETTE[2])] {
                series.push(Series {
                    label: format!("{label}, eps = {}", f(&r["eps"])),
                    points: samples.iter().map(|s| (f(&s["h"]), f(&s[key]))).collect(),
                    colour,
                    markers: true,
                });
            }
        }
        art.write(
            &format!("edge_{e}.svg"),
            &line_plot(&format!("Edge {e}"), "h", "u", &series, false),
        )?;
    }
    Ok(())
}

/// `ε` values of the oscillation suite that the sweep actually solved.
pub fn oscillation_eps(cfg: &ExperimentConfig) -> Vec<f64> {
    [0.1, 0.05].into_iter().filter(|e| cfg.eps.contains(e)).collect()
}

/// All suites on the stored artifacts.
pub fn check_suites(cfg: &ExperimentConfig, p: &Problem, art: &Artifacts) -> Result<Vec<Suite>, CliError> {
    let profiles = load_profiles(p, art)?;
    let gs = load_graph(art)?;
    let graph_check = art.read_json("graph_check.json")?;
    let (stored, delta_k, _) = load_solutions(cfg, p, art)?;
    let orbit = cfg.orbit();
    let mut suites = vec![
        checks::geometry_suite(&p.spec),
        checks::flow_suite(&p.spec, &orbit),
        checks::profile_suite(&p.spec, &p.map, &p.g, &profiles, &profile_opts(cfg)),
        checks::solver_suite(&p.spec, &p.g, cfg, &stored),
        checks::oscillation_suite(&p.spec, &stored, &oscillation_eps(cfg), &default_h_samples(&p.spec), &orbit),
        checks::graph_suite(
            &gs,
            &profiles,
            (f(&graph_check["oracle_d"]), f(&graph_check["oracle_step"])),
            &cfg.graph,
        ),
    ];
    if let Some(last) = stored.last() {
        suites.push(checks::characteristic_suite(
            &p.spec,
            &p.map,
            &p.g,
            last,
            &profiles,
            delta_k,
            cfg.check.trajectories,
            cfg.seed,
        ));
    }
    Ok(suites)
}

fn check(cfg: &ExperimentConfig, p: &Problem, art: &Artifacts) -> Result<(), CliError> {
    let suites = check_suites(cfg, p, art)?;
    let failed: Vec<String> = suites.iter().filter(|s| !s.passed()).map(|s| s.name.clone()).collect();
    art.write_json(
        "check.json",
        &json!({
            "passed": failed.is_empty(),
            "suites": suites.iter().map(Suite::to_json).collect::<Vec<_>>(),
        }),
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(failed))
    }
}

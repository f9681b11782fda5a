//! Experiment configuration (TOML).
//!
//! Every key is optional except where noted; unknown keys are errors.
//! Parsing never stops at the first problem: all violations are collected
//! with the path of the offending key.
//!
//! ```toml
//! seed = 1
//! lambda = 1.0
//! eps = [0.2, 0.1, 0.05, 0.025]
//! resolution = 512              # or resolutions = [...], one per ε
//! output = "out"
//!
//! [hamiltonian]
//! builtin = "double_well"       # or "harmonic_fixture", or give `terms`
//! thresholds = [0.125, -0.125, -0.125]   # [h_0, h_1, ...]
//! # terms = [[4, 0, 0.25], [2, 0, -0.5], [0, 2, 0.5]]
//! # domain = [x_min, x_max, y_min, y_max]
//! # exponents = [0.0, 1.0]
//! # bounds = [hessian_bound, gradient_bound, radius]
//!
//! [g]
//! family = "games"              # or "eikonal"
//! theta_factor = 2.0            # or theta = <absolute value>
//! f = []                        # polynomial terms [[i, j, c], ...]
//!
//! [boundary]
//! scale_h = 8.0                 # or constant = 1.0, or terms = [[i, j, c], ...]
//! ```
//!
//! Tuning tables: `[profile]`, `[solver]`, `[graph]`, `[harness]`, `[check]`
//! (see [`ExperimentConfig`] for the keys and defaults).

use hj_core::gfamily::max_gradient;
use hj_core::graph::GraphOptions;
use hj_core::hamiltonian::{Rect, SaddleExponents, Thresholds};
use hj_core::hj2d::SolveOptions;
use hj_core::level_set::{OrbitOptions, ProfileOptions};
use hj_core::polynomial::Polynomial;
use hj_core::{BoundaryDatum, GFamily, HamiltonianSpec, RegionMap};
use std::fmt;
use std::path::PathBuf;
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "invalid config: {}", parts.join("; "))
    }
}

impl std::error::Error for SchemaError {}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianChoice {
    DoubleWell,
    Harmonic,
    Polynomial {
        terms: Vec<(u32, u32, f64)>,
        domain: Rect,
        exponents: SaddleExponents,
        bounds: (f64, f64, f64),
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum GChoice {
    Eikonal,
    Games { theta: Theta, f: Vec<(u32, u32, f64)> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta {
    Factor(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnessOptions {
    /// `δ_K` in cells of the coarsest grid.
    pub k_cells: f64,
    /// Largest allowed `spacing · max|DH| / ε`.
    pub coupling_cap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub trajectories: usize,
    pub stencils: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub lambda: f64,
    pub eps: Vec<f64>,
    pub resolutions: Vec<usize>,
    pub output: PathBuf,
    pub hamiltonian: HamiltonianChoice,
    pub thresholds: Option<Vec<f64>>,
    pub g: GChoice,
    pub boundary: BoundaryDatum,
    /// Nodes per axis of the reference region map used for `max |DH|` and
    /// the coercivity constants.
    pub reference_resolution: usize,
    pub profile: ProfileOptions,
    pub solver: SolveOptions,
    pub graph: GraphOptions,
    pub harness: HarnessOptions,
    pub check: CheckOptions,
}

/// The built problem: Hamiltonian, perturbation and boundary datum.
#[derive(Debug, Clone)]
pub struct Problem {
    pub spec: HamiltonianSpec,
    pub map: RegionMap,
    pub g: GFamily,
    pub datum: BoundaryDatum,
    pub max_gradient: f64,
}

impl ExperimentConfig {
    pub fn problem(&self) -> Result<Problem, SchemaError> {
        let spec = build_spec(self).map_err(|message| SchemaError {
            violations: vec![Violation {
                path: "hamiltonian".into(),
                message,
            }],
        })?;
        let map = RegionMap::reference(&spec, self.reference_resolution);
        let max_grad = max_gradient(&spec, &map);
        let g = match &self.g {
            GChoice::Eikonal => GFamily::Eikonal,
            GChoice::Games { theta, f } => GFamily::Games {
                theta: match theta {
                    Theta::Factor(k) => k * max_grad,
                    Theta::Absolute(t) => *t,
                },
                f: Polynomial::from_triples(f),
            },
        };
        Ok(Problem {
            spec,
            map,
            g,
            datum: self.boundary.clone(),
            max_gradient: max_grad,
        })
    }

    pub fn orbit(&self) -> OrbitOptions {
        self.profile.orbit
    }
}

fn build_spec(cfg: &ExperimentConfig) -> Result<HamiltonianSpec, String> {
    let th = cfg.thresholds.as_ref().map(|t| Thresholds {
        outer: t[0],
        wells: t[1..].to_vec(),
    });
    let spec = match &cfg.hamiltonian {
        HamiltonianChoice::DoubleWell => match th {
            Some(t) => HamiltonianSpec::double_well_with(t),
            None => HamiltonianSpec::double_well(),
        },
        HamiltonianChoice::Harmonic => {
            let h0 = th.map(|t| t.outer).unwrap_or(0.5);
            if cfg.thresholds.as_ref().is_some_and(|t| t.len() != 1) {
                return Err("the harmonic fixture takes exactly one threshold".into());
            }
            HamiltonianSpec::harmonic(h0)
        }
        HamiltonianChoice::Polynomial {
            terms,
            domain,
            exponents,
            bounds,
        } => {
            let t = th.ok_or("a polynomial Hamiltonian needs `thresholds`")?;
            return HamiltonianSpec::from_polynomial(
                Polynomial::from_triples(terms),
                t,
                *exponents,
                *bounds,
                *domain,
            )
            .map_err(|e| e.to_string());
        }
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// Walks a TOML table, recording violations and the keys it consumed.
struct Reader<'a> {
    violations: &'a mut Vec<Violation>,
}

impl Reader<'_> {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn unknown(&mut self, prefix: &str, t: &Table, known: &[&str]) {
        for k in t.keys() {
            if !known.contains(&k.as_str()) {
                self.push(&join(prefix, k), "unknown key");
            }
        }
    }

    fn float(&mut self, t: &Table, prefix: &str, key: &str) -> Option<f64> {
        let v = t.get(key)?;
        match as_float(v) {
            Some(x) => Some(x),
            None => {
                self.push(&join(prefix, key), "expected a number");
                None
            }
        }
    }

    fn float_or(&mut self, t: &Table, prefix: &str, key: &str, default: f64) -> f64 {
        self.float(t, prefix, key).unwrap_or(default)
    }

    fn positive(&mut self, t: &Table, prefix: &str, key: &str, default: f64) -> f64 {
        let v = self.float_or(t, prefix, key, default);
        if !(v > 0.0 && v.is_finite()) {
            self.push(&join(prefix, key), format!("must be a positive number, got {v}"));
        }
        v
    }

    fn uint(&mut self, t: &Table, prefix: &str, key: &str, default: usize) -> usize {
        match t.get(key) {
            None => default,
            Some(Value::Integer(i)) if *i >= 0 => *i as usize,
            Some(_) => {
                self.push(&join(prefix, key), "expected a nonnegative integer");
                default
            }
        }
    }

    fn boolean(&mut self, t: &Table, prefix: &str, key: &str, default: bool) -> bool {
        match t.get(key) {
            None => default,
            Some(Value::Boolean(b)) => *b,
            Some(_) => {
                self.push(&join(prefix, key), "expected true or false");
                default
            }
        }
    }

    fn string(&mut self, t: &Table, prefix: &str, key: &str) -> Option<String> {
        match t.get(key)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.push(&join(prefix, key), "expected a string");
                None
            }
        }
    }

    fn floats(&mut self, t: &Table, prefix: &str, key: &str) -> Option<Vec<f64>> {
        let path = join(prefix, key);
        match t.get(key)? {
            Value::Array(a) => {
                let mut out = Vec::with_capacity(a.len());
                for (k, v) in a.iter().enumerate() {
                    match as_float(v) {
                        Some(x) => out.push(x),
                        None => self.push(&format!("{path}[{k}]"), "expected a number"),
                    }
                }
                (out.len() == a.len()).then_some(out)
            }
            _ => {
                self.push(&path, "expected an array of numbers");
                None
            }
        }
    }

    fn terms(&mut self, t: &Table, prefix: &str, key: &str) -> Option<Vec<(u32, u32, f64)>> {
        let path = join(prefix, key);
        let Value::Array(a) = t.get(key)? else {
            self.push(&path, "expected an array of [i, j, coefficient] terms");
            return None;
        };
        let mut out = Vec::new();
        let mut ok = true;
        for (k, v) in a.iter().enumerate() {
            let parsed = match v {
                Value::Array(x) if x.len() == 3 => match (&x[0], &x[1], as_float(&x[2])) {
                    (Value::Integer(i), Value::Integer(j), Some(c))
                        if (0..=32).contains(i) && (0..=32).contains(j) =>
                    {
                        Some((*i as u32, *j as u32, c))
                    }
                    _ => None,
                },
                _ => None,
            };
            match parsed {
                Some(term) => out.push(term),
                None => {
                    ok = false;
                    self.push(
                        &format!("{path}[{k}]"),
                        "expected [i, j, coefficient] with integer exponents 0..=32",
                    );
                }
            }
        }
        ok.then_some(out)
    }

    fn table<'t>(&mut self, t: &'t Table, key: &str) -> Option<&'t Table> {
        match t.get(key)? {
            Value::Table(x) => Some(x),
            _ => {
                self.push(key, "expected a table");
                None
            }
        }
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

const TOP: &[&str] = &[
    "seed",
    "lambda",
    "eps",
    "resolution",
    "resolutions",
    "output",
    "reference_resolution",
    "hamiltonian",
    "g",
    "boundary",
    "profile",
    "solver",
    "graph",
    "harness",
    "check",
];

/// Parses and validates a config. On failure every violation found is
/// returned, each with the path of its key.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, SchemaError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| SchemaError {
        violations: vec![Violation {
            path: "<document>".into(),
            message: e.message().to_string(),
        }],
    })?;
    let mut violations = Vec::new();
    let mut r = Reader {
        violations: &mut violations,
    };
    r.unknown("", &root, TOP);
    let empty = Table::new();

    let seed = r.uint(&root, "", "seed", 1) as u64;
    let lambda = r.positive(&root, "", "lambda", 1.0);
    let eps = r
        .floats(&root, "", "eps")
        .unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025]);
    if eps.is_empty() {
        r.push("eps", "must not be empty");
    }
    if eps.iter().any(|e| !(*e > 0.0)) {
        r.push("eps", "every ε must be positive");
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        r.push("eps", "ε list must be strictly decreasing");
    }
    let resolutions = match (root.get("resolution"), root.get("resolutions")) {
        (Some(_), Some(_)) => {
            r.push("resolutions", "give either `resolution` or `resolutions`, not both");
            vec![512; eps.len()]
        }
        (None, Some(Value::Array(a))) => {
            let v: Vec<usize> = a
                .iter()
                .filter_map(|x| x.as_integer().filter(|i| *i > 0).map(|i| i as usize))
                .collect();
            if v.len() != a.len() {
                r.push("resolutions", "expected positive integers");
            }
            if v.len() != eps.len() {
                r.push(
                    "resolutions",
                    format!("{} resolutions for {} ε values", v.len(), eps.len()),
                );
            }
            v
        }
        (None, Some(_)) => {
            r.push("resolutions", "expected an array of integers");
            vec![512; eps.len()]
        }
        _ => vec![r.uint(&root, "", "resolution", 512); eps.len()],
    };
    let output = r
        .string(&root, "", "output")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("hj-out"));
    let reference_resolution = r.uint(&root, "", "reference_resolution", 401);

    // [hamiltonian]
    let ht = r.table(&root, "hamiltonian").unwrap_or(&empty);
    r.unknown(
        "hamiltonian",
        ht,
        &["builtin", "thresholds", "terms", "domain", "exponents", "bounds"],
    );
    let thresholds = r.floats(ht, "hamiltonian", "thresholds");
    if let Some(t) = &thresholds {
        if t.is_empty() {
            r.push("hamiltonian.thresholds", "needs at least the outer threshold h_0");
        }
    }
    let builtin = r.string(ht, "hamiltonian", "builtin");
    let hamiltonian = match (builtin.as_deref(), ht.contains_key("terms")) {
        (Some(_), true) => {
            r.push("hamiltonian", "give either `builtin` or `terms`, not both");
            HamiltonianChoice::DoubleWell
        }
        (Some("double_well"), false) | (None, false) => HamiltonianChoice::DoubleWell,
        (Some("harmonic_fixture"), false) => HamiltonianChoice::Harmonic,
        (Some(other), false) => {
            r.push(
                "hamiltonian.builtin",
                format!("unknown builtin `{other}` (double_well, harmonic_fixture)"),
            );
            HamiltonianChoice::DoubleWell
        }
        (None, true) => {
            let terms = r.terms(ht, "hamiltonian", "terms").unwrap_or_default();
            let domain = match r.floats(ht, "hamiltonian", "domain") {
                Some(d) if d.len() == 4 && d[0] < d[1] && d[2] < d[3] => Rect {
                    x_min: d[0],
                    x_max: d[1],
                    y_min: d[2],
                    y_max: d[3],
                },
                _ => {
                    r.push("hamiltonian.domain", "needs [x_min, x_max, y_min, y_max] with min < max");
                    Rect {
                        x_min: -1.0,
                        x_max: 1.0,
                        y_min: -1.0,
                        y_max: 1.0,
                    }
                }
            };
            let exponents = match r.floats(ht, "hamiltonian", "exponents") {
                None => SaddleExponents { m: 0.0, n: 1.0 },
                Some(e) if e.len() == 2 => SaddleExponents { m: e[0], n: e[1] },
                Some(_) => {
                    r.push("hamiltonian.exponents", "expected [m, n]");
                    SaddleExponents { m: 0.0, n: 1.0 }
                }
            };
            let bounds = match r.floats(ht, "hamiltonian", "bounds") {
                Some(b) if b.len() == 3 => (b[0], b[1], b[2]),
                _ => {
                    r.push(
                        "hamiltonian.bounds",
                        "needs [hessian_bound, gradient_bound, radius] for a polynomial",
                    );
                    (1.0, 1.0, 1.0)
                }
            };
            if thresholds.is_none() {
                r.push("hamiltonian.thresholds", "required for a polynomial Hamiltonian");
            }
            HamiltonianChoice::Polynomial {
                terms,
                domain,
                exponents,
                bounds,
            }
        }
    };

    // [g]
    let gt = r.table(&root, "g").unwrap_or(&empty);
    r.unknown("g", gt, &["family", "theta_factor", "theta", "f"]);
    let g = match r.string(gt, "g", "family").as_deref() {
        Some("eikonal") => {
            for k in ["theta_factor", "theta", "f"] {
                if gt.contains_key(k) {
                    r.push(&join("g", k), "only used by the `games` family");
                }
            }
            GChoice::Eikonal
        }
        Some("games") | None => {
            let theta = match (r.float(gt, "g", "theta_factor"), r.float(gt, "g", "theta")) {
                (Some(_), Some(_)) => {
                    r.push("g", "give either `theta_factor` or `theta`, not both");
                    Theta::Factor(2.0)
                }
                (Some(k), None) => Theta::Factor(k),
                (None, Some(t)) => Theta::Absolute(t),
                (None, None) => Theta::Factor(2.0),
            };
            let f = r.terms(gt, "g", "f").unwrap_or_default();
            GChoice::Games { theta, f }
        }
        Some(other) => {
            r.push("g.family", format!("unknown family `{other}` (eikonal, games)"));
            GChoice::Eikonal
        }
    };

    // [boundary]
    let bt = r.table(&root, "boundary").unwrap_or(&empty);
    r.unknown("boundary", bt, &["constant", "scale_h", "terms"]);
    let given: Vec<&str> = ["constant", "scale_h", "terms"]
        .into_iter()
        .filter(|k| bt.contains_key(*k))
        .collect();
    if given.len() > 1 {
        r.push("boundary", format!("conflicting data: {}", given.join(", ")));
    }
    let boundary = if let Some(c) = r.float(bt, "boundary", "constant") {
        BoundaryDatum::Constant(c)
    } else if let Some(t) = r.terms(bt, "boundary", "terms") {
        BoundaryDatum::Polynomial(Polynomial::from_triples(&t))
    } else {
        BoundaryDatum::ScaledHamiltonian(r.float_or(bt, "boundary", "scale_h", 8.0))
    };

    // [profile]
    let pt = r.table(&root, "profile").unwrap_or(&empty);
    r.unknown(
        "profile",
        pt,
        &["h_floor_rel", "n_uniform", "q_max", "n_q", "gamma", "t_max"],
    );
    let dp = ProfileOptions::default();
    let mut profile = ProfileOptions {
        h_floor_rel: r.positive(pt, "profile", "h_floor_rel", dp.h_floor_rel),
        n_uniform: r.uint(pt, "profile", "n_uniform", dp.n_uniform),
        q_max: r.positive(pt, "profile", "q_max", dp.q_max),
        n_q: r.uint(pt, "profile", "n_q", dp.n_q),
        gamma: r.float(pt, "profile", "gamma"),
        orbit: dp.orbit,
    };
    profile.orbit.t_max = r.positive(pt, "profile", "t_max", dp.orbit.t_max);
    if profile.n_q < 3 {
        r.push("profile.n_q", "needs at least 3 slopes");
    }

    // [solver]
    let st = r.table(&root, "solver").unwrap_or(&empty);
    r.unknown("solver", st, &["tol", "max_sweeps", "dissipation", "coupling_cap"]);
    let ds = SolveOptions::default();
    let solver = SolveOptions {
        tol: r.positive(st, "solver", "tol", ds.tol),
        max_sweeps: r.uint(st, "solver", "max_sweeps", ds.max_sweeps),
        dissipation: r.float_or(st, "solver", "dissipation", ds.dissipation),
    };
    if solver.dissipation < 1.0 {
        r.push("solver.dissipation", "must be at least 1 (monotonicity)");
    }
    let coupling_cap = r.positive(st, "solver", "coupling_cap", 0.5);

    // [graph]
    let gr = r.table(&root, "graph").unwrap_or(&empty);
    r.unknown(
        "graph",
        gr,
        &["tol", "max_sweeps", "n_uniform", "n_geometric", "floor_rel", "oracle_step_rel", "godunov"],
    );
    let dg = GraphOptions::default();
    let graph = GraphOptions {
        tol: r.positive(gr, "graph", "tol", dg.tol),
        max_sweeps: r.uint(gr, "graph", "max_sweeps", dg.max_sweeps),
        n_uniform: r.uint(gr, "graph", "n_uniform", dg.n_uniform),
        n_geometric: r.uint(gr, "graph", "n_geometric", dg.n_geometric),
        floor_rel: r.positive(gr, "graph", "floor_rel", dg.floor_rel),
        oracle_step_rel: r.positive(gr, "graph", "oracle_step_rel", dg.oracle_step_rel),
        godunov: r.boolean(gr, "graph", "godunov", dg.godunov),
    };

    // [harness], [check]
    let ht2 = r.table(&root, "harness").unwrap_or(&empty);
    r.unknown("harness", ht2, &["k_cells"]);
    let harness = HarnessOptions {
        k_cells: r.positive(ht2, "harness", "k_cells", 4.0),
        coupling_cap,
    };
    let ct = r.table(&root, "check").unwrap_or(&empty);
    r.unknown("check", ct, &["trajectories", "stencils"]);
    let check = CheckOptions {
        trajectories: r.uint(ct, "check", "trajectories", 100),
        stencils: r.uint(ct, "check", "stencils", 10_000),
    };

    let cfg = ExperimentConfig {
        seed,
        lambda,
        eps,
        resolutions,
        output,
        hamiltonian,
        thresholds,
        g,
        boundary,
        reference_resolution,
        profile,
        solver,
        graph,
        harness,
        check,
    };
    if violations.is_empty() {
        // Checks that need the built Hamiltonian.
        match cfg.problem() {
            Err(e) => violations.extend(e.violations),
            Ok(p) => {
                if let GFamily::Games { theta, .. } = p.g {
                    if !(theta > p.max_gradient) {
                        violations.push(Violation {
                            path: "g.theta".into(),
                            message: format!(
                                "θ = {theta:.6} must exceed max |DH| = {:.6} over the closed domain",
                                p.max_gradient
                            ),
                        });
                    }
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(SchemaError { violations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.eps, vec![0.2, 0.1, 0.05, 0.025]);
        assert_eq!(cfg.resolutions, vec![512; 4]);
        assert_eq!(cfg.lambda, 1.0);
        assert_eq!(cfg.hamiltonian, HamiltonianChoice::DoubleWell);
        assert_eq!(cfg.boundary, BoundaryDatum::ScaledHamiltonian(8.0));
        assert!(matches!(cfg.g, GChoice::Games { theta: Theta::Factor(k), .. } if k == 2.0));
        let p = cfg.problem().unwrap();
        assert_eq!(p.spec.n_edges(), 3);
    }

    #[test]
    fn small_theta_cites_the_bound() {
        let err = parse_config("[g]\nfamily = \"games\"\ntheta_factor = 0.5\n").unwrap_err();
        assert_eq!(err.violations.len(), 1);
        assert_eq!(err.violations[0].path, "g.theta");
        assert!(err.violations[0].message.contains("max |DH|"));
    }

    #[test]
    fn all_violations_are_reported() {
        let text = "eps = [0.1, 0.2]\nlambda = -1\nbogus = 3\n[solver]\ndissipation = 0.5\n[g]\nfamily = \"nope\"\n";
        let err = parse_config(text).unwrap_err();
        let paths: Vec<&str> = err.violations.iter().map(|v| v.path.as_str()).collect();
        for p in ["eps", "lambda", "bogus", "solver.dissipation", "g.family"] {
            assert!(paths.contains(&p), "{p} missing from {paths:?}");
        }
    }

    #[test]
    fn polynomial_config_builds() {
        let text = r#"
[hamiltonian]
terms = [[4, 0, 0.25], [2, 0, -0.5], [0, 2, 0.5]]
thresholds = [0.125, -0.125, -0.125]
domain = [-1.7, 1.7, -0.9, 0.9]
bounds = [1.0, 0.8, 0.4]
"#;
        let cfg = parse_config(text).unwrap();
        let p = cfg.problem().unwrap();
        assert_eq!(p.spec.n_edges(), 3);
    }

    #[test]
    fn malformed_terms_name_the_entry() {
        let err = parse_config("[g]\nf = [[0, 0, 1.0], [1, \"x\", 2.0]]\n").unwrap_err();
        assert_eq!(err.violations[0].path, "g.f[1]");
    }
}

//! Plain-text tables with every float written as `{:.16e}` (17 significant
//! digits), which reads back to the same bits.
//!
//! Each line is comma separated and starts with a tag naming the record.
//! Lines starting with `#` are comments.

use crate::graph::{EdgeGrid, EdgeSolution, GraphSolution};
use crate::hamiltonian::Lattice;
use crate::hj2d::{EpsSolution, NodeClass};
use crate::level_set::EdgeProfile;
use std::collections::HashMap;
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing record `{0}`")]
    Missing(String),
    #[error("inconsistent table: {0}")]
    Inconsistent(String),
}

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn nums(vs: &[f64]) -> String {
    vs.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

/// Tagged records in file order, with line numbers.
struct Records<'a> {
    lines: Vec<(usize, &'a str, Vec<&'a str>)>,
}

impl<'a> Records<'a> {
    fn parse(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
            .map(|(n, l)| {
                let mut it = l.split(',');
                let tag = it.next().unwrap_or("");
                (n + 1, tag, it.collect())
            })
            .collect();
        Self { lines }
    }

    fn tagged(&self, tag: &str) -> impl Iterator<Item = &(usize, &'a str, Vec<&'a str>)> + '_ {
        let tag = tag.to_string();
        self.lines.iter().filter(move |l| l.1 == tag)
    }

    fn one(&self, tag: &str) -> Result<&(usize, &'a str, Vec<&'a str>), FormatError> {
        self.tagged(tag)
            .next()
            .ok_or_else(|| FormatError::Missing(tag.to_string()))
    }

    fn scalar(&self, tag: &str) -> Result<f64, FormatError> {
        let (line, _, f) = self.one(tag)?;
        field(*line, f, 0)
    }

    fn count(&self, tag: &str) -> Result<usize, FormatError> {
        let (line, _, f) = self.one(tag)?;
        int(*line, f, 0)
    }
}

fn field(line: usize, f: &[&str], k: usize) -> Result<f64, FormatError> {
    let s = f.get(k).ok_or_else(|| FormatError::Parse {
        line,
        message: format!("missing field {k}"),
    })?;
    s.trim().parse().map_err(|_| FormatError::Parse {
        line,
        message: format!("not a number: `{s}`"),
    })
}

fn int(line: usize, f: &[&str], k: usize) -> Result<usize, FormatError> {
    let s = f.get(k).ok_or_else(|| FormatError::Parse {
        line,
        message: format!("missing field {k}"),
    })?;
    s.trim().parse().map_err(|_| FormatError::Parse {
        line,
        message: format!("not an integer: `{s}`"),
    })
}

fn floats(line: usize, f: &[&str]) -> Result<Vec<f64>, FormatError> {
    (0..f.len()).map(|k| field(line, f, k)).collect()
}

pub fn write_profile(p: &EdgeProfile) -> String {
    let mut s = String::from("# edge profile\n");
    let _ = writeln!(s, "edge,{}", p.edge);
    let _ = writeln!(s, "nu,{}", num(p.nu));
    let _ = writeln!(s, "m,{}", num(p.m));
    let _ = writeln!(s, "gamma,{}", num(p.gamma));
    let _ = writeln!(s, "lip_p,{}", num(p.lip_p));
    let _ = writeln!(s, "h_grid,{}", nums(&p.h_grid));
    let _ = writeln!(s, "q_grid,{}", nums(&p.q_grid));
    s.push_str("# level,h,T,L,min|DH|,max|DH|\n");
    for a in 0..p.n_h() {
        let _ = writeln!(
            s,
            "level,{}",
            nums(&[p.h_grid[a], p.period[a], p.length[a], p.dh_min[a], p.dh_max[a]])
        );
    }
    s.push_str("# cell,h,q,G,err\n");
    for a in 0..p.n_h() {
        for b in 0..p.n_q() {
            let k = a * p.n_q() + b;
            let _ = writeln!(s, "cell,{}", nums(&[p.h_grid[a], p.q_grid[b], p.g[k], p.error[k]]));
        }
    }
    for (h, msg) in &p.failed {
        let _ = writeln!(s, "failed,{},{}", num(*h), msg.replace(['\n', ','], " "));
    }
    s
}

pub fn read_profile(text: &str) -> Result<EdgeProfile, FormatError> {
    let r = Records::parse(text);
    let (l, _, f) = r.one("h_grid")?;
    let h_grid = if f.iter().all(|s| s.is_empty()) { vec![] } else { floats(*l, f)? };
    let (l, _, f) = r.one("q_grid")?;
    let q_grid = floats(*l, f)?;
    let mut p = EdgeProfile {
        edge: r.count("edge")?,
        h_grid,
        q_grid,
        period: vec![],
        length: vec![],
        dh_min: vec![],
        dh_max: vec![],
        g: vec![],
        error: vec![],
        nu: r.scalar("nu")?,
        m: r.scalar("m")?,
        gamma: r.scalar("gamma")?,
        lip_p: r.scalar("lip_p")?,
        failed: vec![],
    };
    for (l, _, f) in r.tagged("level") {
        let v = floats(*l, f)?;
        if v.len() != 5 {
            return Err(FormatError::Parse { line: *l, message: "level needs 5 fields".into() });
        }
        p.period.push(v[1]);
        p.length.push(v[2]);
        p.dh_min.push(v[3]);
        p.dh_max.push(v[4]);
    }
    for (l, _, f) in r.tagged("cell") {
        p.g.push(field(*l, f, 2)?);
        p.error.push(field(*l, f, 3)?);
    }
    for (l, _, f) in r.tagged("failed") {
        p.failed.push((field(*l, f, 0)?, f[1..].join(",")));
    }
    if p.period.len() != p.n_h() || p.g.len() != p.n_h() * p.n_q() {
        return Err(FormatError::Inconsistent(format!(
            "{} levels and {} cells for a {}×{} grid",
            p.period.len(),
            p.g.len(),
            p.n_h(),
            p.n_q()
        )));
    }
    Ok(p)
}

fn class_code(c: NodeClass) -> String {
    match c {
        NodeClass::Interior => "I".into(),
        NodeClass::Boundary(e) => format!("B{e}"),
        NodeClass::Outside => "O".into(),
    }
}

fn parse_class(line: usize, s: &str) -> Result<NodeClass, FormatError> {
    match s {
        "I" => Ok(NodeClass::Interior),
        "O" => Ok(NodeClass::Outside),
        _ => s
            .strip_prefix('B')
            .and_then(|e| e.parse().ok())
            .map(NodeClass::Boundary)
            .ok_or(FormatError::Parse {
                line,
                message: format!("unknown node class `{s}`"),
            }),
    }
}

/// Solution dump: header, then one `node,class,value` row per lattice node
/// in row-major order.
pub fn write_solution(sol: &EpsSolution, class: &[NodeClass]) -> String {
    let l = &sol.lattice;
    let mut s = String::from("# hj2d solution\n");
    let _ = writeln!(s, "origin,{}", nums(&l.origin));
    let _ = writeln!(s, "spacing,{}", num(l.spacing));
    let _ = writeln!(s, "dims,{},{}", l.nx, l.ny);
    let _ = writeln!(s, "eps,{}", num(sol.eps));
    let _ = writeln!(s, "lambda,{}", num(sol.lambda));
    let _ = writeln!(s, "iterations,{}", sol.iterations);
    let _ = writeln!(s, "residual,{}", num(sol.residual_inf));
    let _ = writeln!(s, "tol,{}", num(sol.tol));
    let _ = writeln!(s, "c_m,{}", num(sol.c_m));
    let _ = writeln!(s, "bound,{}", num(sol.bound));
    s.reserve(sol.u.len() * 32);
    for (c, v) in class.iter().zip(&sol.u) {
        let _ = writeln!(s, "node,{},{}", class_code(*c), num(*v));
    }
    s
}

pub fn read_solution(text: &str) -> Result<(EpsSolution, Vec<NodeClass>), FormatError> {
    let r = Records::parse(text);
    let (l, _, f) = r.one("origin")?;
    let origin = [field(*l, f, 0)?, field(*l, f, 1)?];
    let (l, _, f) = r.one("dims")?;
    let (nx, ny) = (int(*l, f, 0)?, int(*l, f, 1)?);
    let lattice = Lattice {
        origin,
        spacing: r.scalar("spacing")?,
        nx,
        ny,
    };
    let mut class = Vec::with_capacity(nx * ny);
    let mut u = Vec::with_capacity(nx * ny);
    for (l, _, f) in r.tagged("node") {
        class.push(parse_class(*l, f.first().copied().unwrap_or(""))?);
        u.push(field(*l, f, 1)?);
    }
    if u.len() != nx * ny {
        return Err(FormatError::Inconsistent(format!(
            "{} nodes for dims {nx}×{ny}",
            u.len()
        )));
    }
    Ok((
        EpsSolution {
            eps: r.scalar("eps")?,
            lambda: r.scalar("lambda")?,
            lattice,
            u,
            iterations: r.count("iterations")?,
            residual_inf: r.scalar("residual")?,
            tol: r.scalar("tol")?,
            c_m: r.scalar("c_m")?,
            bound: r.scalar("bound")?,
        },
        class,
    ))
}

/// Per-edge `(h, u)` rows plus the node record.
pub fn write_graph_solution(gs: &GraphSolution) -> String {
    let mut s = String::from("# graph solution\n");
    let _ = writeln!(s, "lambda,{}", num(gs.lambda));
    let _ = writeln!(s, "node,{}", num(gs.d));
    let _ = writeln!(s, "bound,{}", num(gs.bound));
    let _ = writeln!(s, "free,{}", nums(&gs.free_values));
    s.push_str("# edge,i,outer,node_value,datum,residual,node_residual,sweeps,max_slope,bound\n");
    for e in &gs.edges {
        let _ = writeln!(
            s,
            "edge,{},{},{},{},{}",
            e.edge,
            nums(&[e.grid.outer, e.node_value, e.boundary_datum, e.residual_inf, e.node_residual]),
            e.sweeps,
            num(e.max_slope),
            num(e.bound)
        );
    }
    s.push_str("# u,i,h,u\n");
    for e in &gs.edges {
        for (h, v) in e.grid.h.iter().zip(&e.u) {
            let _ = writeln!(s, "u,{},{},{}", e.edge, num(*h), num(*v));
        }
    }
    s
}

pub fn read_graph_solution(text: &str) -> Result<GraphSolution, FormatError> {
    let r = Records::parse(text);
    let (l, _, f) = r.one("free")?;
    let free_values = if f.iter().all(|s| s.is_empty()) { vec![] } else { floats(*l, f)? };
    let mut edges = Vec::new();
    for (l, _, f) in r.tagged("edge") {
        let l = *l;
        edges.push(EdgeSolution {
            edge: int(l, f, 0)?,
            grid: EdgeGrid {
                outer: field(l, f, 1)?,
                h: vec![],
            },
            u: vec![],
            node_value: field(l, f, 2)?,
            boundary_datum: field(l, f, 3)?,
            residual_inf: field(l, f, 4)?,
            node_residual: field(l, f, 5)?,
            sweeps: int(l, f, 6)?,
            max_slope: field(l, f, 7)?,
            bound: field(l, f, 8)?,
        });
    }
    let slot: HashMap<usize, usize> = edges.iter().enumerate().map(|(k, e)| (e.edge, k)).collect();
    for (l, _, f) in r.tagged("u") {
        let i = int(*l, f, 0)?;
        let k = *slot.get(&i).ok_or(FormatError::Parse {
            line: *l,
            message: format!("row for undeclared edge {i}"),
        })?;
        edges[k].grid.h.push(field(*l, f, 1)?);
        edges[k].u.push(field(*l, f, 2)?);
    }
    if let Some(e) = edges.iter().find(|e| e.u.is_empty()) {
        return Err(FormatError::Inconsistent(format!("edge {} has no rows", e.edge)));
    }
    Ok(GraphSolution {
        lambda: r.scalar("lambda")?,
        d: r.scalar("node")?,
        edges,
        free_values,
        bound: r.scalar("bound")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn same(a: f64, b: f64) -> bool {
        (a.is_nan() && b.is_nan()) || a.to_bits() == b.to_bits()
    }

    fn all_same(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| same(*x, *y))
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
            Just(0.0),
            Just(-0.0),
            Just(f64::MIN_POSITIVE),
            Just(5e-324),
        ]
    }

    proptest! {
        #[test]
        fn scalars_round_trip(v in finite()) {
            let back: f64 = num(v).parse().unwrap();
            prop_assert!(same(v, back));
        }

        #[test]
        fn profiles_round_trip(
            nh in 1usize..5,
            nq in 1usize..5,
            vals in prop::collection::vec(finite(), 64),
            consts in prop::collection::vec(finite(), 4),
        ) {
            let pick = |k: usize| vals[k % vals.len()];
            let p = EdgeProfile {
                edge: 2,
                h_grid: (0..nh).map(pick).collect(),
                q_grid: (0..nq).map(|k| pick(k + 7)).collect(),
                period: (0..nh).map(|k| pick(k + 11)).collect(),
                length: (0..nh).map(|k| pick(k + 13)).collect(),
                dh_min: (0..nh).map(|k| pick(k + 17)).collect(),
                dh_max: (0..nh).map(|k| pick(k + 19)).collect(),
                g: (0..nh * nq).map(|k| pick(k + 23)).collect(),
                error: (0..nh * nq).map(|k| pick(k + 29)).collect(),
                nu: consts[0],
                m: consts[1],
                gamma: consts[2],
                lip_p: consts[3],
                failed: vec![(pick(3), "no return, t = 1".into())],
            };
            let q = read_profile(&write_profile(&p)).unwrap();
            prop_assert_eq!(q.edge, p.edge);
            for (a, b) in [
                (&p.h_grid, &q.h_grid), (&p.q_grid, &q.q_grid), (&p.period, &q.period),
                (&p.length, &q.length), (&p.dh_min, &q.dh_min), (&p.dh_max, &q.dh_max),
                (&p.g, &q.g), (&p.error, &q.error),
            ] {
                prop_assert!(all_same(a, b));
            }
            prop_assert!(all_same(&[p.nu, p.m, p.gamma, p.lip_p], &[q.nu, q.m, q.gamma, q.lip_p]));
            prop_assert!(same(q.failed[0].0, p.failed[0].0));
            prop_assert_eq!(&q.failed[0].1, "no return  t = 1");
        }

        #[test]
        fn solutions_round_trip(
            nx in 1usize..6,
            ny in 1usize..6,
            vals in prop::collection::vec(finite(), 40),
            classes in prop::collection::vec(0usize..5, 40),
        ) {
            let class: Vec<NodeClass> = (0..nx * ny)
                .map(|k| match classes[k] {
                    0 => NodeClass::Interior,
                    1 => NodeClass::Outside,
                    c => NodeClass::Boundary(c - 2),
                })
                .collect();
            let u: Vec<f64> = (0..nx * ny)
                .map(|k| if class[k] == NodeClass::Outside { f64::NAN } else { vals[k] })
                .collect();
            let sol = EpsSolution {
                eps: vals[0],
                lambda: vals[1],
                lattice: Lattice { origin: [vals[2], vals[3]], spacing: vals[4], nx, ny },
                u,
                iterations: 17,
                residual_inf: vals[5],
                tol: vals[6],
                c_m: vals[7],
                bound: vals[8],
            };
            let (back, cls) = read_solution(&write_solution(&sol, &class)).unwrap();
            prop_assert_eq!(cls, class);
            prop_assert!(all_same(&back.u, &sol.u));
            prop_assert_eq!(back.lattice.nx, nx);
            prop_assert_eq!(back.lattice.ny, ny);
            prop_assert_eq!(back.iterations, 17);
            prop_assert!(all_same(
                &[back.eps, back.lambda, back.lattice.origin[0], back.lattice.origin[1],
                  back.lattice.spacing, back.residual_inf, back.tol, back.c_m, back.bound],
                &[sol.eps, sol.lambda, sol.lattice.origin[0], sol.lattice.origin[1],
                  sol.lattice.spacing, sol.residual_inf, sol.tol, sol.c_m, sol.bound],
            ));
        }

        #[test]
        fn graph_solutions_round_trip(
            vals in prop::collection::vec(finite(), 60),
            sizes in prop::collection::vec(1usize..6, 1..4),
        ) {
            let pick = |k: usize| vals[k % vals.len()];
            let edges: Vec<EdgeSolution> = sizes
                .iter()
                .enumerate()
                .map(|(i, &n)| EdgeSolution {
                    edge: i,
                    grid: EdgeGrid { outer: pick(i), h: (0..n).map(|k| pick(k + 3 * i)).collect() },
                    u: (0..n).map(|k| pick(k + 5 * i + 1)).collect(),
                    node_value: pick(i + 2),
                    boundary_datum: pick(i + 4),
                    residual_inf: pick(i + 6),
                    node_residual: pick(i + 8),
                    sweeps: 3 + i,
                    max_slope: pick(i + 10),
                    bound: pick(i + 12),
                })
                .collect();
            let gs = GraphSolution {
                lambda: pick(20),
                d: pick(21),
                free_values: sizes.iter().enumerate().map(|(i, _)| pick(30 + i)).collect(),
                bound: pick(22),
                edges,
            };
            let back = read_graph_solution(&write_graph_solution(&gs)).unwrap();
            prop_assert!(all_same(&[back.lambda, back.d, back.bound], &[gs.lambda, gs.d, gs.bound]));
            prop_assert!(all_same(&back.free_values, &gs.free_values));
            prop_assert_eq!(back.edges.len(), gs.edges.len());
            for (a, b) in back.edges.iter().zip(&gs.edges) {
                prop_assert_eq!(a.edge, b.edge);
                prop_assert_eq!(a.sweeps, b.sweeps);
                prop_assert!(all_same(&a.grid.h, &b.grid.h));
                prop_assert!(all_same(&a.u, &b.u));
                prop_assert!(all_same(
                    &[a.grid.outer, a.node_value, a.boundary_datum, a.residual_inf, a.node_residual, a.max_slope, a.bound],
                    &[b.grid.outer, b.node_value, b.boundary_datum, b.residual_inf, b.node_residual, b.max_slope, b.bound],
                ));
            }
        }
    }

    #[test]
    fn bad_input_names_the_line() {
        let err = read_graph_solution("lambda,1\nnode,x\nbound,1\nfree,\n").unwrap_err();
        assert_eq!(err, FormatError::Parse { line: 2, message: "not a number: `x`".into() });
        assert!(matches!(read_profile("edge,0\n"), Err(FormatError::Missing(_))));
    }
}

use super::{effective_g, trace_level, LevelSetError, OrbitOptions};
use crate::gfamily::GFamily;
use crate::hamiltonian::{HamiltonianSpec, RegionMap};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct ProfileOptions {
    /// Smallest `|h|` on the grid relative to `|J_i|`.
    pub h_floor_rel: f64,
    /// Uniform levels across `J̄_i` added to the geometric ones.
    pub n_uniform: usize,
    pub q_max: f64,
    pub n_q: usize,
    /// Convexity radius `γ`; defaults to half of `min |h_i|`.
    pub gamma: Option<f64>,
    pub orbit: OrbitOptions,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            h_floor_rel: 1e-4,
            n_uniform: 32,
            q_max: 20.0,
            n_q: 81,
            gamma: None,
            orbit: OrbitOptions::default(),
        }
    }
}

/// Levels in `J̄_i \ {0}`, ascending: `|J_i| 2^{-k}` down to the floor plus
/// `n_uniform` evenly spaced levels ending at the threshold.
pub fn default_h_grid(spec: &HamiltonianSpec, edge: usize, opts: &ProfileOptions) -> Vec<f64> {
    let level = spec.thresholds.level(edge);
    let width = level.abs();
    let sign = level.signum();
    let floor = opts.h_floor_rel * width;
    let mut mags = Vec::new();
    let mut m = width;
    while m >= floor * (1.0 - 1e-12) {
        mags.push(m);
        m *= 0.5;
    }
    for k in 1..=opts.n_uniform {
        mags.push(width * k as f64 / opts.n_uniform as f64);
    }
    mags.sort_by(|a, b| a.total_cmp(b));
    mags.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * width);
    let mut grid: Vec<f64> = mags.into_iter().map(|m| sign * m).collect();
    grid.sort_by(|a, b| a.total_cmp(b));
    grid
}

/// `n` evenly spaced slopes on `[-q_max, q_max]`.
pub fn default_q_grid(q_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| -q_max + 2.0 * q_max * k as f64 / (n - 1) as f64)
        .collect()
}

/// Tabulated `T_i`, `L_i` and `Ḡ_i` on one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProfile {
    pub edge: usize,
    /// Levels with a successful orbit, ascending.
    pub h_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub period: Vec<f64>,
    pub length: Vec<f64>,
    pub dh_min: Vec<f64>,
    pub dh_max: Vec<f64>,
    /// `Ḡ_i(h_a, q_b)` at `a * n_q + b`.
    pub g: Vec<f64>,
    pub error: Vec<f64>,
    pub nu: f64,
    pub m: f64,
    pub gamma: f64,
    /// Lipschitz constant of `G` in `p`, giving the linear modulus `m₂`.
    pub lip_p: f64,
    /// Levels whose orbit could not be traced.
    pub failed: Vec<(f64, String)>,
}

impl EdgeProfile {
    pub fn n_h(&self) -> usize {
        self.h_grid.len()
    }

    pub fn n_q(&self) -> usize {
        self.q_grid.len()
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.g[a * self.q_grid.len() + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        let nq = self.q_grid.len();
        &self.g[a * nq..(a + 1) * nq]
    }

    /// Bracketing index and weight along an ascending grid, clamped to the
    /// ends (constant extrapolation).
    fn bracket(grid: &[f64], v: f64) -> (usize, f64) {
        let n = grid.len();
        if n == 1 || v <= grid[0] {
            return (0, 0.0);
        }
        if v >= grid[n - 1] {
            return (n - 2, 1.0);
        }
        let k = grid.partition_point(|&g| g <= v).clamp(1, n - 1) - 1;
        (k, (v - grid[k]) / (grid[k + 1] - grid[k]))
    }

    /// Table filled from a closed form, with unit period and length. Used
    /// for analytic fixtures of the graph problem.
    pub fn tabulate(
        edge: usize,
        h_grid: Vec<f64>,
        q_grid: Vec<f64>,
        f: impl Fn(f64, f64) -> f64,
        coercivity: (f64, f64),
        gamma: f64,
    ) -> Self {
        let n = h_grid.len();
        let mut g = Vec::with_capacity(n * q_grid.len());
        for &h in &h_grid {
            for &q in &q_grid {
                g.push(f(h, q));
            }
        }
        let lip = (0..n)
            .flat_map(|a| {
                let (h, qg) = (h_grid[a], &q_grid);
                let f = &f;
                (1..qg.len()).map(move |b| ((f(h, qg[b]) - f(h, qg[b - 1])) / (qg[b] - qg[b - 1])).abs())
            })
            .fold(0.0, f64::max);
        Self {
            edge,
            period: vec![1.0; n],
            length: vec![1.0; n],
            dh_min: vec![1.0; n],
            dh_max: vec![1.0; n],
            error: vec![0.0; g.len()],
            g,
            h_grid,
            q_grid,
            nu: coercivity.0,
            m: coercivity.1,
            gamma,
            lip_p: lip,
            failed: Vec::new(),
        }
    }

    /// Bracket of `h` in the level grid: lower row and weight.
    pub(crate) fn h_bracket(&self, h: f64) -> (usize, f64) {
        if self.h_grid.len() == 1 {
            return (0, 0.0);
        }
        Self::bracket(&self.h_grid, h)
    }

    /// Lookup with a precomputed bracket from [`Self::h_bracket`].
    #[inline]
    pub(crate) fn value_bracketed(&self, (a, w): (usize, f64), q: f64) -> f64 {
        if self.h_grid.len() == 1 {
            return self.row_value(0, q);
        }
        let lo = self.row_value(a, q);
        if w == 0.0 {
            return lo;
        }
        lo + w * (self.row_value(a + 1, q) - lo)
    }

    /// Largest slope magnitude of row `a` between grid slopes.
    pub(crate) fn row_lipschitz(&self, a: usize) -> f64 {
        let r = self.row(a);
        let qg = &self.q_grid;
        (1..qg.len())
            .map(|b| ((r[b] - r[b - 1]) / (qg[b] - qg[b - 1])).abs())
            .fold(0.0, f64::max)
    }

    /// Whether row `a` is convex in `q` up to [`CONVEXITY_TOL`].
    pub(crate) fn row_convex(&self, a: usize) -> bool {
        let r = self.row(a);
        let qg = &self.q_grid;
        (1..qg.len().saturating_sub(1)).all(|b| {
            let left = (r[b] - r[b - 1]) / (qg[b] - qg[b - 1]);
            let right = (r[b + 1] - r[b]) / (qg[b + 1] - qg[b]);
            right - left >= -CONVEXITY_TOL
        })
    }

    /// Row `a` at slope `q`: linear between grid slopes, linear with the end
    /// slope beyond the range.
    fn row_value(&self, a: usize, q: f64) -> f64 {
        let qg = &self.q_grid;
        let n = qg.len();
        let r = self.row(a);
        let k = if q <= qg[0] {
            0
        } else if q >= qg[n - 1] {
            n - 2
        } else {
            qg.partition_point(|&g| g <= q).clamp(1, n - 1) - 1
        };
        let w = (q - qg[k]) / (qg[k + 1] - qg[k]);
        r[k] + w * (r[k + 1] - r[k])
    }

    /// Bilinear lookup of `Ḡ_i(h, q)`. Constant in `h` beyond the grid
    /// (in particular between the floor and the node), linear in `q`
    /// beyond the slope range.
    pub fn value(&self, h: f64, q: f64) -> f64 {
        let (a, w) = Self::bracket(&self.h_grid, h);
        if self.h_grid.len() == 1 {
            return self.row_value(0, q);
        }
        let lo = self.row_value(a, q);
        let hi = self.row_value(a + 1, q);
        lo + w * (hi - lo)
    }

    /// `T_i(h)` by linear interpolation, constant beyond the grid.
    pub fn period_at(&self, h: f64) -> f64 {
        let (a, w) = Self::bracket(&self.h_grid, h);
        if self.h_grid.len() == 1 {
            return self.period[0];
        }
        self.period[a] + w * (self.period[a + 1] - self.period[a])
    }

    /// `L_i(h)/T_i(h)` by linear interpolation of the ratio.
    pub fn speed_at(&self, h: f64) -> f64 {
        let (a, w) = Self::bracket(&self.h_grid, h);
        let s = |k: usize| self.length[k] / self.period[k];
        if self.h_grid.len() == 1 {
            return s(0);
        }
        s(a) + w * (s(a + 1) - s(a))
    }

    /// Level nearest to the node.
    pub fn floor_level(&self) -> f64 {
        if self.edge == 0 {
            self.h_grid[0]
        } else {
            self.h_grid[self.h_grid.len() - 1]
        }
    }
}

/// Tabulates one edge. Orbits are traced in parallel, each level into its
/// own slot, so the result does not depend on the thread count.
pub fn build_edge_profile(
    spec: &HamiltonianSpec,
    map: &RegionMap,
    g: &GFamily,
    edge: usize,
    h_grid: &[f64],
    q_grid: &[f64],
    opts: &ProfileOptions,
) -> EdgeProfile {
    type Row = (f64, f64, f64, f64, Vec<f64>, Vec<f64>);
    let rows: Vec<(f64, Result<Row, LevelSetError>)> = h_grid
        .par_iter()
        .map(|&h| {
            let r = trace_level(spec, edge, h, &opts.orbit).map(|o| {
                let (lo, hi) = o.gradient_range(spec);
                let (vals, errs): (Vec<f64>, Vec<f64>) = q_grid
                    .iter()
                    .map(|&q| {
                        let a = effective_g(spec, g, &o, q);
                        (a.value, a.error)
                    })
                    .unzip();
                (o.period, o.length, lo, hi, vals, errs)
            });
            (h, r)
        })
        .collect();

    let coercivity = g.coercivity(spec, map);
    let mut p = EdgeProfile {
        edge,
        h_grid: Vec::new(),
        q_grid: q_grid.to_vec(),
        period: Vec::new(),
        length: Vec::new(),
        dh_min: Vec::new(),
        dh_max: Vec::new(),
        g: Vec::new(),
        error: Vec::new(),
        nu: coercivity.nu,
        m: coercivity.m,
        gamma: opts
            .gamma
            .unwrap_or(0.5 * spec.thresholds.min_abs()),
        lip_p: g.lip_p_max(spec, map),
        failed: Vec::new(),
    };
    for (h, r) in rows {
        match r {
            Ok((t, l, lo, hi, vals, errs)) => {
                p.h_grid.push(h);
                p.period.push(t);
                p.length.push(l);
                p.dh_min.push(lo);
                p.dh_max.push(hi);
                p.g.extend(vals);
                p.error.extend(errs);
            }
            Err(e) => p.failed.push((h, e.to_string())),
        }
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    PeriodBounds,
    Coercivity,
    Lipschitz,
    Convexity,
    LocalCoercivity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub h: f64,
    pub q: f64,
    /// Amount by which the inequality fails (positive).
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProfileReport {
    pub violations: Vec<Violation>,
    pub entries_checked: usize,
    /// `min T` and `min L` over the table.
    pub min_period: f64,
    pub min_length: f64,
}

impl ProfileReport {
    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tolerance of the midpoint convexity test.
pub const CONVEXITY_TOL: f64 = 1e-6;

/// Checks the table against the period bounds, the coercivity and
/// Lipschitz estimates, convexity near the node and local coercivity.
pub fn validate_profile(p: &EdgeProfile) -> ProfileReport {
    let mut rep = ProfileReport {
        min_period: p.period.iter().copied().fold(f64::INFINITY, f64::min),
        min_length: p.length.iter().copied().fold(f64::INFINITY, f64::min),
        ..Default::default()
    };
    let nq = p.n_q();
    let zero = p
        .q_grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let mut push = |kind, h, q, excess: f64| {
        if excess > 0.0 {
            rep.violations.push(Violation { kind, h, q, excess });
        }
    };
    for a in 0..p.n_h() {
        let h = p.h_grid[a];
        let (t, l) = (p.period[a], p.length[a]);
        let slack = 1e-9 * t;
        push(ViolationKind::PeriodBounds, h, f64::NAN, l / p.dh_max[a] - t - slack);
        push(ViolationKind::PeriodBounds, h, f64::NAN, t - l / p.dh_min[a] - slack);

        let speed = l / t;
        let row = p.row(a);
        let err = &p.error[a * nq..(a + 1) * nq];
        for b in 0..nq {
            let q = p.q_grid[b];
            let floor = p.nu * speed * q.abs() - p.m - err[b];
            push(ViolationKind::Coercivity, h, q, floor - row[b]);
        }
        for b in 0..nq.saturating_sub(1) {
            let bound = p.lip_p * p.dh_max[a] * (p.q_grid[b + 1] - p.q_grid[b]).abs();
            let diff = (row[b + 1] - row[b]).abs();
            push(ViolationKind::Lipschitz, h, p.q_grid[b], diff - bound - err[b] - err[b + 1]);
        }
        if h.abs() < p.gamma {
            for b in 1..nq.saturating_sub(1) {
                let mid = 0.5 * (row[b - 1] + row[b + 1]);
                push(ViolationKind::Convexity, h, p.q_grid[b], row[b] - mid - CONVEXITY_TOL);
            }
        }
        if nq >= 2 {
            for b in [0, nq - 1] {
                let q = p.q_grid[b];
                let gain = row[b] - row[zero];
                let need = (p.nu * speed * q.abs() - p.m - row[zero]).max(0.0);
                let excess = if gain <= 0.0 {
                    f64::MIN_POSITIVE - gain
                } else {
                    need - gain - err[b] - err[zero]
                };
                push(ViolationKind::LocalCoercivity, h, q, excess);
            }
        }
        rep.entries_checked += nq;
    }
    rep
}

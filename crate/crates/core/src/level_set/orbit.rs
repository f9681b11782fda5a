use super::LevelSetError;
use crate::hamiltonian::{HamiltonianSpec, Point};
use crate::norm;
use crate::ode::{dopri_step, next_step, Tolerance};

#[derive(Debug, Clone, Copy)]
pub struct OrbitOptions {
    pub tolerance: Tolerance,
    /// Give up when no return happened before this time.
    pub t_max: f64,
    /// First sample count; doubled until the average of `|DH|` settles.
    pub n_min: usize,
    pub n_max: usize,
    /// Relative settling tolerance for the sample average of `|DH|`.
    pub avg_tol: f64,
    /// `|DH|` below this floor counts as hitting a critical point.
    pub grad_floor: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            tolerance: Tolerance {
                rtol: 1e-11,
                atol: 1e-13,
            },
            t_max: 1e4,
            n_min: 256,
            n_max: 1 << 16,
            avg_tol: 1e-11,
            grad_floor: 1e-10,
        }
    }
}

/// Parametrisation of the level curve during tracing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Param {
    /// `ẋ = b`, auxiliary `ℓ' = |b|` (arc length).
    Time,
    /// `ẋ = b/|b|`, auxiliary `t' = 1/|b|` (time).
    Arc,
}

/// Closed level curve sampled at uniform parameter values.
#[derive(Debug, Clone)]
pub(crate) struct RawOrbit {
    /// `n + 1` points; the last one is the return point.
    pub points: Vec<Point>,
    /// Auxiliary integral at each point.
    pub aux: Vec<f64>,
    pub period: f64,
    pub aux_total: f64,
    pub diameter: f64,
}

pub(crate) struct Tracer<'a> {
    spec: &'a HamiltonianSpec,
    opts: OrbitOptions,
    param: Param,
    level: f64,
}

impl<'a> Tracer<'a> {
    pub fn new(spec: &'a HamiltonianSpec, opts: OrbitOptions, param: Param, level: f64) -> Self {
        Self {
            spec,
            opts,
            param,
            level,
        }
    }

    fn rhs(&self) -> impl Fn(&[f64; 3]) -> [f64; 3] + '_ {
        move |y: &[f64; 3]| {
            let g = self.spec.gradient([y[0], y[1]]);
            let s = norm(g);
            match self.param {
                Param::Time => [g[1], -g[0], s],
                Param::Arc => [g[1] / s, -g[0] / s, 1.0 / s],
            }
        }
    }

    fn project(&self, y: [f64; 3]) -> Result<[f64; 3], LevelSetError> {
        let p = self.spec.project_to_level([y[0], y[1]], self.level, 2);
        let g = norm(self.spec.gradient(p));
        if !(g >= self.opts.grad_floor) {
            return Err(LevelSetError::CriticalApproach {
                x: p[0],
                y: p[1],
                grad: g,
            });
        }
        Ok([p[0], p[1], y[2]])
    }

    /// Adaptive integration over a parameter span `dt`; `h` carries the step
    /// size between calls.
    fn advance(&self, y: [f64; 3], dt: f64, h: &mut f64) -> Result<[f64; 3], LevelSetError> {
        let f = self.rhs();
        let mut y = y;
        let mut done = 0.0;
        let mut guard = 0usize;
        while done < dt {
            let last = *h >= dt - done;
            let hh = if last { dt - done } else { *h };
            let (yn, err) = dopri_step(&f, &y, hh, self.opts.tolerance);
            guard += 1;
            if guard > 10_000_000 {
                return Err(LevelSetError::NoReturn { t_max: self.opts.t_max });
            }
            if err <= 1.0 {
                y = self.project(yn)?;
                done = if last { dt } else { done + hh };
                if !last {
                    *h = next_step(hh, err);
                }
            } else {
                *h = next_step(hh, err);
            }
        }
        Ok(y)
    }

    /// First return to the section through `x0` normal to the flow.
    fn find_period(&self, x0: Point) -> Result<(f64, f64, f64), LevelSetError> {
        let f = self.rhs();
        let v0 = {
            let d = f(&[x0[0], x0[1], 0.0]);
            [d[0], d[1]]
        };
        let section = |y: &[f64; 3]| (y[0] - x0[0]) * v0[0] + (y[1] - x0[1]) * v0[1];
        let mut y = self.project([x0[0], x0[1], 0.0])?;
        let mut t = 0.0;
        let mut h = 1e-3;
        let mut dmax = 0.0f64;
        while t <= self.opts.t_max {
            let (yn, err) = dopri_step(&f, &y, h, self.opts.tolerance);
            if err > 1.0 {
                h = next_step(h, err);
                continue;
            }
            let yn = self.project(yn)?;
            let dist = norm([yn[0] - x0[0], yn[1] - x0[1]]);
            if section(&y) < 0.0 && section(&yn) >= 0.0 && dist < 0.5 * dmax {
                let (mut a, mut b) = (0.0, h);
                while b - a > 1e-10 {
                    let m = 0.5 * (a + b);
                    let ym = self.project(dopri_step(&f, &y, m, self.opts.tolerance).0)?;
                    if section(&ym) < 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let yt = self.project(dopri_step(&f, &y, b, self.opts.tolerance).0)?;
                return Ok((t + b, yt[2], dmax));
            }
            dmax = dmax.max(dist);
            y = yn;
            t += h;
            h = next_step(h, err);
        }
        Err(LevelSetError::NoReturn {
            t_max: self.opts.t_max,
        })
    }

    /// Traces the closed curve through `x0` and samples it at `n` uniform
    /// parameter values, doubling `n` until the sample average of
    /// `weight(x)` settles.
    pub fn trace(
        &self,
        x0: Point,
        weight: impl Fn(Point) -> f64,
    ) -> Result<RawOrbit, LevelSetError> {
        let (period, aux_total, diameter) = self.find_period(x0)?;
        let start = self.project([x0[0], x0[1], 0.0])?;
        let mut n = self.opts.n_min.max(2);
        let mut h = 1e-3;
        let mut states = Vec::with_capacity(n + 1);
        states.push(start);
        for _ in 0..n {
            let last = *states.last().unwrap();
            states.push(self.advance(last, period / n as f64, &mut h)?);
        }
        let avg = |s: &[[f64; 3]]| {
            s[..s.len() - 1]
                .iter()
                .map(|y| weight([y[0], y[1]]))
                .sum::<f64>()
                / (s.len() - 1) as f64
        };
        let mut a = avg(&states);
        while n < self.opts.n_max {
            let dt = period / (2 * n) as f64;
            let mut refined = Vec::with_capacity(2 * n + 1);
            for k in 0..n {
                refined.push(states[k]);
                refined.push(self.advance(states[k], dt, &mut h)?);
            }
            refined.push(states[n]);
            states = refined;
            n *= 2;
            let a2 = avg(&states);
            let settled = (a2 - a).abs() <= self.opts.avg_tol * (1.0 + a2.abs());
            a = a2;
            if settled {
                break;
            }
        }
        Ok(RawOrbit {
            points: states.iter().map(|y| [y[0], y[1]]).collect(),
            aux: states.iter().map(|y| y[2]).collect(),
            period,
            aux_total,
            diameter,
        })
    }
}

/// Periodic orbit of the Hamiltonian flow, sampled at uniform times.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub edge: Option<usize>,
    pub level: f64,
    /// `X(t_k)` for `t_k = kT/n`, `k = 0..=n`.
    pub points: Vec<Point>,
    pub times: Vec<f64>,
    /// Arc length travelled up to `t_k`.
    pub arc: Vec<f64>,
    pub period: f64,
    pub length: f64,
    /// Largest distance from the starting point.
    pub diameter: f64,
}

impl Orbit {
    pub fn n_intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn energy_drift(&self, spec: &HamiltonianSpec) -> f64 {
        self.points
            .iter()
            .map(|p| (spec.value(*p) - self.level).abs())
            .fold(0.0, f64::max)
    }

    pub fn closure_gap(&self) -> f64 {
        let (a, b) = (self.points[0], self.points[self.points.len() - 1]);
        norm([a[0] - b[0], a[1] - b[1]])
    }

    /// Arc length of the sample polyline.
    pub fn polyline_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| norm([w[1][0] - w[0][0], w[1][1] - w[0][1]]))
            .sum()
    }

    /// `(min, max)` of `|DH|` over the samples.
    pub fn gradient_range(&self, spec: &HamiltonianSpec) -> (f64, f64) {
        self.points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            let g = norm(spec.gradient(*p));
            (lo.min(g), hi.max(g))
        })
    }
}

/// Traces the orbit through `x0` with time parametrisation.
pub fn trace_orbit(
    spec: &HamiltonianSpec,
    x0: Point,
    opts: &OrbitOptions,
) -> Result<Orbit, LevelSetError> {
    let level = spec.value(x0);
    let raw = Tracer::new(spec, *opts, Param::Time, level)
        .trace(x0, |p| norm(spec.gradient(p)))?;
    let n = raw.points.len() - 1;
    Ok(Orbit {
        edge: None,
        level,
        times: (0..=n).map(|k| raw.period * k as f64 / n as f64).collect(),
        points: raw.points,
        arc: raw.aux,
        period: raw.period,
        length: raw.aux_total,
        diameter: raw.diameter,
    })
}

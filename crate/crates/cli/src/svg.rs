//! Minimal SVG emitters: field rasters with level-set overlays and line
//! plots. Coordinates are written with fixed precision so output is
//! reproducible.

use hj_core::hamiltonian::Lattice;
use hj_core::HamiltonianSpec;
use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 56.0;
const MAX_CELLS: usize = 160;

fn header(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Diverging blue-white-red map on `t ∈ [0, 1]`.
fn colour(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let s = t / 0.5;
        (40.0 + 215.0 * s, 90.0 + 165.0 * s, 200.0 + 55.0 * s)
    } else {
        let s = (t - 0.5) / 0.5;
        (255.0 - 35.0 * s, 255.0 - 195.0 * s, 255.0 - 215.0 * s)
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

/// Heat map of a lattice field (NaN cells are left blank), block-averaged
/// to at most `MAX_CELLS` cells per axis, with the contours `H = level`.
pub fn field_plot(title: &str, lattice: &Lattice, u: &[f64], spec: &HamiltonianSpec, levels: &[f64]) -> String {
    let block = lattice.nx.max(lattice.ny).div_ceil(MAX_CELLS).max(1);
    let bx = lattice.nx.div_ceil(block);
    let by = lattice.ny.div_ceil(block);
    let width = (lattice.nx - 1) as f64 * lattice.spacing;
    let height = (lattice.ny - 1) as f64 * lattice.spacing;
    let scale = ((W - 2.0 * MARGIN) / width).min((H - 2.0 * MARGIN) / height);
    let px = |x: f64| MARGIN + (x - lattice.origin[0]) * scale;
    let py = |y: f64| MARGIN + (lattice.origin[1] + height - y) * scale;

    let mut cells = vec![f64::NAN; bx * by];
    for cj in 0..by {
        for ci in 0..bx {
            let (mut s, mut n) = (0.0, 0usize);
            for j in cj * block..((cj + 1) * block).min(lattice.ny) {
                for i in ci * block..((ci + 1) * block).min(lattice.nx) {
                    let v = u[lattice.index(i, j)];
                    if !v.is_nan() {
                        s += v;
                        n += 1;
                    }
                }
            }
            if n > 0 {
                cells[cj * bx + ci] = s / n as f64;
            }
        }
    }
    let (lo, hi) = cells
        .iter()
        .filter(|v| !v.is_nan())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let span = if hi > lo { hi - lo } else { 1.0 };

    let mut s = header(W, H);
    let _ = writeln!(s, "<text x=\"{MARGIN:.0}\" y=\"24\">{}</text>", escape(title));
    let cw = block as f64 * lattice.spacing * scale;
    s.push_str("<g shape-rendering=\"crispEdges\">\n");
    for cj in 0..by {
        for ci in 0..bx {
            let v = cells[cj * bx + ci];
            if v.is_nan() {
                continue;
            }
            let x0 = lattice.origin[0] + (ci * block) as f64 * lattice.spacing;
            let y0 = lattice.origin[1] + (cj * block) as f64 * lattice.spacing;
            let _ = writeln!(
                s,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                px(x0) - 0.5 * cw,
                py(y0) - 0.5 * cw,
                cw + 0.05,
                cw + 0.05,
                colour((v - lo) / span)
            );
        }
    }
    s.push_str("</g>\n");
    for &level in levels {
        s.push_str("<path fill=\"none\" stroke=\"black\" stroke-width=\"0.8\" d=\"");
        for (a, b) in contour(lattice, spec, level) {
            let _ = write!(s, "M{:.2} {:.2}L{:.2} {:.2}", px(a[0]), py(a[1]), px(b[0]), py(b[1]));
        }
        s.push_str("\"/>\n");
    }
    let _ = writeln!(
        s,
        "<text x=\"{MARGIN:.0}\" y=\"{:.0}\">min {:.6} max {:.6}</text>",
        H - 16.0,
        lo,
        hi
    );
    s.push_str("</svg>\n");
    s
}

/// Marching-squares segments of `{H = level}` on the lattice.
fn contour(lattice: &Lattice, spec: &HamiltonianSpec, level: f64) -> Vec<([f64; 2], [f64; 2])> {
    let mut out = Vec::new();
    let f: Vec<f64> = (0..lattice.len())
        .map(|k| {
            let (i, j) = lattice.coords(k);
            spec.value(lattice.point(i, j)) - level
        })
        .collect();
    let cross = |p: [f64; 2], q: [f64; 2], fp: f64, fq: f64| {
        let t = fp / (fp - fq);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    };
    for j in 0..lattice.ny - 1 {
        for i in 0..lattice.nx - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let pts: Vec<[f64; 2]> = corners.iter().map(|&(a, b)| lattice.point(a, b)).collect();
            let vals: Vec<f64> = corners.iter().map(|&(a, b)| f[lattice.index(a, b)]).collect();
            let mut hits = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if (vals[a] < 0.0) != (vals[b] < 0.0) {
                    hits.push(cross(pts[a], pts[b], vals[a], vals[b]));
                }
            }
            for pair in hits.chunks_exact(2) {
                out.push((pair[0], pair[1]));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub colour: &'static str,
    /// Draw markers only.
    pub markers: bool,
}

pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Line plot; `log` selects log10 axes.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], log: bool) -> String {
    let tr = |v: f64| if log { v.log10() } else { v };
    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| !log || (*x > 0.0 && *y > 0.0))
        .map(|(x, y)| (tr(x), tr(y)))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), (x, y)| (a.min(*x), b.max(*x), c.min(*y), d.max(*y)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 <= 0.0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = header(W, H);
    let _ = writeln!(s, "<text x=\"{MARGIN:.0}\" y=\"24\">{}</text>", escape(title));
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN:.0}\" y=\"{MARGIN:.0}\" width=\"{:.0}\" height=\"{:.0}\" fill=\"none\" stroke=\"#444\"/>",
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    let tick = |v: f64| if log { format!("1e{v:.2}") } else { format!("{v:.4}") };
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.0}\" text-anchor=\"middle\">{}</text>",
            px(fx),
            H - MARGIN + 16.0,
            tick(fx)
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.0}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            MARGIN - 4.0,
            py(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.0}\" y=\"{:.0}\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{:.0}\" transform=\"rotate(-90 14 {:.0})\" text-anchor=\"middle\">{}</text>",
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = ser
            .points
            .iter()
            .filter(|(x, y)| !log || (*x > 0.0 && *y > 0.0))
            .map(|(x, y)| (px(tr(*x)), py(tr(*y))))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        if ser.markers {
            for (x, y) in &pts {
                let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.5\" fill=\"{}\"/>", ser.colour);
            }
        } else if !pts.is_empty() {
            let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
                ser.colour,
                d.join(" ")
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.0}\" y=\"{:.0}\" fill=\"{}\">{}</text>",
            W - MARGIN - 150.0,
            MARGIN + 16.0 + 14.0 * k as f64,
            ser.colour,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

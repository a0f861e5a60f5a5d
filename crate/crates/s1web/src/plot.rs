//! Static figures as CSV tables and standalone SVG files.
//!
//! Every CSV starts with `#` comment lines naming the figure, the parameter
//! and the columns. Output depends only on the configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use s1web_core::curve::{Curve, CurvePoint};
use s1web_core::moebius::{fiber_monodromy_maps, gamma_orbit, SpherePoint};
use s1web_core::ode::{integrate, OdeOptions};
use s1web_core::riccati::{continue_y_locally, slope_z0, SpecialLeaf};
use s1web_core::sections::{delta_roots, section_value, sections_through, Proj};
use s1web_core::transport::battery_base;
use s1web_core::{c64, CoreError, C64};

use crate::config::{PlotKind, SuiteConfig};

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] CoreError),
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// A named polyline or point set in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Scatter instead of a connected line.
    pub scatter: bool,
}

impl Series {
    fn line(name: impl Into<String>) -> Self {
        Self { name: name.into(), points: Vec::new(), scatter: false }
    }

    fn dots(name: impl Into<String>) -> Self {
        Self { name: name.into(), points: Vec::new(), scatter: true }
    }
}

/// A figure: series plus the CSV layout they are written with.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub kind: PlotKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub bounds: [f64; 4],
    pub series: Vec<Series>,
    pub header: Vec<String>,
    pub columns: String,
    pub rows: Vec<String>,
}

fn num(v: f64) -> String {
    format!("{v:.10e}")
}

impl Figure {
    pub fn csv(&self) -> String {
        let mut s = String::new();
        for h in &self.header {
            let _ = writeln!(s, "# {h}");
        }
        let _ = writeln!(s, "# columns: {}", self.columns);
        let _ = writeln!(s, "{}", self.columns);
        for r in &self.rows {
            let _ = writeln!(s, "{r}");
        }
        s
    }

    pub fn svg(&self) -> String {
        let (w, h, m) = (640.0, 480.0, 50.0);
        let [x0, x1, y0, y1] = self.bounds;
        let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
        let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
        let inside = |(x, y): (f64, f64)| x.is_finite() && y.is_finite() && x >= x0 && x <= x1 && y >= y0 && y <= y1;
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r##"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="#444" stroke-width="1"/>"##,
            w - 2.0 * m,
            h - 2.0 * m
        );
        let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#, w / 2.0, xml(&self.title));
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#, w / 2.0, h - 12.0, xml(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            xml(&self.y_label)
        );
        for (v, anchor) in [(x0, "start"), (x1, "end")] {
            let _ = writeln!(s, r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{v}</text>"#, sx(v), h - m + 14.0);
        }
        for v in [y0, y1] {
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{v}</text>"#, m - 4.0, sy(v) + 3.0);
        }
        for (i, ser) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let _ = writeln!(s, r#"<g id="{}">"#, xml(&ser.name));
            if ser.scatter {
                for &p in ser.points.iter().filter(|p| inside(**p)) {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.6" fill="{colour}"/>"#, sx(p.0), sy(p.1));
                }
            } else {
                // split the polyline wherever it leaves the frame
                let mut run: Vec<String> = Vec::new();
                let flush = |run: &mut Vec<String>, s: &mut String| {
                    if run.len() > 1 {
                        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{}"/>"#, run.join(" "));
                    }
                    run.clear();
                };
                for &p in &ser.points {
                    if inside(p) {
                        run.push(format!("{:.2},{:.2}", sx(p.0), sy(p.1)));
                    } else {
                        flush(&mut run, &mut s);
                    }
                }
                flush(&mut run, &mut s);
            }
            let _ = writeln!(s, "</g>");
        }
        let _ = writeln!(s, "</svg>");
        s
    }
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn grid(range: (f64, f64), n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |k| range.0 + (range.1 - range.0) * k as f64 / n as f64)
}

fn near_fiber(x: f64, t: C64, r: f64) -> bool {
    [c64(0.0, 0.0), c64(1.0, 0.0), t].iter().any(|b| (c64(x, 0.0) - b).norm() < r)
}

/// The four roots of `Delta(u, .)` over a real sweep of `u`.
pub fn discriminant_figure(config: &SuiteConfig) -> Figure {
    let t = config.t.0;
    let mut series: Vec<Series> = (0..4).map(|k| Series::dots(format!("root_{k}"))).collect();
    let mut rows = Vec::new();
    for u in grid(config.region.x_re, 400) {
        if u.abs() < 1e-9 || (c64(u, 0.0) - t).norm() < 1e-9 {
            continue;
        }
        for (k, r) in delta_roots(t, c64(u, 0.0)).iter().enumerate() {
            if let SpherePoint::Finite(z) = r {
                series[k].points.push((u, z.re));
                rows.push(format!("{},{k},{},{}", num(u), num(z.re), num(z.im)));
            }
        }
    }
    Figure {
        kind: PlotKind::Discriminant,
        title: format!("roots of Delta(u, z), t = {}", config.t),
        x_label: "u (real)".into(),
        y_label: "Re z".into(),
        bounds: [config.region.x_re.0, config.region.x_re.1, config.region.z_re.0 * 2.0, config.region.z_re.1 * 2.0],
        series,
        header: vec![
            format!("discriminant roots of the 2-web over real u, t = {}", config.t),
            "root index k orders the four roots as returned by the polynomial root finder; roots at infinity are omitted".into(),
        ],
        columns: "u,k,re_z,im_z".into(),
        rows,
    }
}

/// Integrates a real leaf from `(x0, z0)` towards `x_end` in steps of `dx`,
/// stopping near singular fibers or outside the frame.
fn real_leaf(x0: f64, z0: f64, x_end: f64, dx: f64, zmax: f64) -> Vec<(f64, f64)> {
    let opts = OdeOptions { rtol: 1e-9, atol: 1e-11, ..OdeOptions::default() };
    let step = dx.copysign(x_end - x0);
    let mut pts = vec![(x0, z0)];
    let (mut x, mut z) = (x0, c64(z0, 0.0));
    while (x_end - x) * step.signum() > 1e-12 {
        let next = if (x_end - x).abs() < step.abs() { x_end } else { x + step };
        if next.abs() < 0.01 || (next - 1.0).abs() < 0.01 {
            break;
        }
        let f = |s: f64, y: &[C64; 1]| slope_z0(c64(s, 0.0), y[0]).map(|m| [m]);
        match integrate(f, x, next, [z], &opts) {
            Ok((y, _)) => {
                z = y[0];
                x = next;
            }
            Err(_) => break,
        }
        if z.re.abs() > zmax {
            break;
        }
        pts.push((x, z.re));
    }
    pts
}

/// Real Riccati leaves and the three special conics.
pub fn leaves_figure(config: &SuiteConfig) -> Figure {
    let (xr, zr) = (config.region.x_re, config.region.z_re);
    let zmax = 2.0 * zr.0.abs().max(zr.1.abs());
    let mut series = Vec::new();
    let mut rows = Vec::new();
    let mut k = 0;
    for x0 in [-0.5, 0.5, 2.0] {
        if x0 <= xr.0 || x0 >= xr.1 {
            continue;
        }
        for z0 in grid(zr, 8) {
            let mut back = real_leaf(x0, z0, xr.0, 0.02, zmax);
            back.reverse();
            let fwd = real_leaf(x0, z0, xr.1, 0.02, zmax);
            let mut s = Series::line(format!("leaf_{k}"));
            s.points = back.into_iter().chain(fwd.into_iter().skip(1)).collect();
            for p in &s.points {
                rows.push(format!("{},{},{}", s.name, num(p.0), num(p.1)));
            }
            series.push(s);
            k += 1;
        }
    }
    for leaf in SpecialLeaf::ALL {
        for branch in 0..2 {
            let mut s = Series::line(format!("{}_{branch}", leaf.name()));
            for x in grid(xr, 400) {
                let z = leaf.points_over(c64(x, 0.0))[branch];
                if z.im.abs() < 1e-9 {
                    s.points.push((x, z.re));
                    rows.push(format!("{},{},{}", s.name, num(x), num(z.re)));
                } else {
                    s.points.push((x, f64::NAN));
                }
            }
            series.push(s);
        }
    }
    Figure {
        kind: PlotKind::Leaves,
        title: "real leaves of the Riccati foliation".into(),
        x_label: "x".into(),
        y_label: "z".into(),
        bounds: [xr.0, xr.1, zr.0, zr.1],
        series,
        header: vec![
            "integrated leaves dz/dx = -P/Q over real x, and the special leaves f0 = 0, f1 = 0, ft = 0".into(),
            "series leaf_k are integrated leaves; series <leaf>_<branch> are the two real branches of a special conic".into(),
        ],
        columns: "series,x,z".into(),
        rows,
    }
}

/// Section graphs through a marked point, including the tangent pair at the
/// discriminant.
pub fn web_figure(config: &SuiteConfig) -> Result<Figure, PlotError> {
    let e = Curve::new(config.t.0)?;
    let t = config.t.0;
    let (xr, zr) = (config.region.x_re, config.region.z_re);
    let u = [0.5, -0.5, 1.5, 2.5].into_iter().find(|u| !near_fiber(*u, t, 0.1) && *u > xr.0 && *u < xr.1).unwrap_or(0.5 * (xr.0 + xr.1));
    let uc = c64(u, 0.0);
    let v = e.cubic(&uc).sqrt();
    let mut zs: Vec<(String, C64)> = grid(zr, 4).map(|z| (format!("{z:.3}"), c64(z, 0.0))).collect();
    for r in delta_roots(t, uc) {
        if let SpherePoint::Finite(z) = r {
            if z.im.abs() < 1e-9 && z.re > zr.0 && z.re < zr.1 {
                zs.push((format!("delta {:.3}", z.re), z));
            }
        }
    }
    // one sheet of y along the sweep, continued from the marked point
    let xs: Vec<f64> = grid(xr, 400).collect();
    let start = xs.iter().position(|x| *x >= u).unwrap_or(0);
    let mut ys = vec![c64(0.0, 0.0); xs.len()];
    let mut y = v;
    for i in start..xs.len() {
        y = continue_y_locally(&e, y, c64(xs[i], 0.0));
        ys[i] = y;
    }
    y = v;
    for i in (0..start).rev() {
        y = continue_y_locally(&e, y, c64(xs[i], 0.0));
        ys[i] = y;
    }
    let mut series = Vec::new();
    let mut rows = Vec::new();
    for (label, z) in &zs {
        let Ok(res) = sections_through(&e, &uc, &v, &Proj::finite(*z)) else { continue };
        for (j, s) in res.sections.iter().enumerate() {
            let mut ser = Series::line(format!("z={label} section {j}"));
            for (x, y) in xs.iter().zip(&ys) {
                let val = section_value(&e, s, &CurvePoint::affine(c64(*x, 0.0), *y)).value();
                match val {
                    Some(w) if !near_fiber(*x, t, 1e-6) => {
                        ser.points.push((*x, w.re));
                        rows.push(format!("{},{},{},{}", ser.name, num(*x), num(w.re), num(w.im)));
                    }
                    _ => ser.points.push((*x, f64::NAN)),
                }
            }
            series.push(ser);
        }
    }
    let mut marked = Series::dots("marked point");
    for (_, z) in &zs {
        marked.points.push((u, z.re));
    }
    series.push(marked);
    Ok(Figure {
        kind: PlotKind::Web,
        title: format!("minimal sections through x = {u}, t = {}", config.t),
        x_label: "x (real)".into(),
        y_label: "Re z".into(),
        bounds: [xr.0, xr.1, zr.0 * 2.0, zr.1 * 2.0],
        series,
        header: vec![
            format!("graphs of the two sections through (u, v, z) with u = {u}, v = {}", v),
            "z runs over a grid of the region and the real roots of Delta(u, .), where the two sections are tangent".into(),
            "y is continued along the real sweep from the marked point on one sheet".into(),
        ],
        columns: "series,x,re_z,im_z".into(),
        rows,
    })
}

/// Orbits of sample fiber points under `<-z, 1/z>` and under the fiber
/// monodromy group at the battery base.
pub fn orbits_figure(config: &SuiteConfig) -> Result<Figure, PlotError> {
    let e = Curve::new(config.t.0)?;
    let (x0, _) = battery_base(&e);
    let maps = fiber_monodromy_maps(x0)?;
    let seeds = [c64(0.5, 0.25), c64(-0.8, 0.6), c64(1.5, -0.3), c64(0.2, -1.1), c64(1.0, 0.0), c64(0.0, 1.0)];
    let mut gamma = Series::dots("gamma orbits");
    let mut mono = Series::dots("monodromy orbits");
    let mut rows = Vec::new();
    for (i, z) in seeds.iter().enumerate() {
        for (j, w) in gamma_orbit(SpherePoint::Finite(*z)).into_iter().enumerate() {
            if let SpherePoint::Finite(w) = w {
                gamma.points.push((w.re, w.im));
                rows.push(format!("gamma,{i},{j},{},{}", num(w.re), num(w.im)));
            }
        }
        for (label, m) in &maps {
            if let SpherePoint::Finite(w) = m.apply_finite(*z) {
                mono.points.push((w.re, w.im));
                rows.push(format!("monodromy,{i},{},{},{}", label.name(), num(w.re), num(w.im)));
            }
        }
    }
    Ok(Figure {
        kind: PlotKind::Orbits,
        title: format!("fiber orbits, t = {}", config.t),
        x_label: "Re z".into(),
        y_label: "Im z".into(),
        bounds: [-3.0, 3.0, -3.0, 3.0],
        series: vec![gamma, mono],
        header: vec![
            "gamma rows: orbit of seed i under z -> -z, 1/z, -1/z; element j".into(),
            format!("monodromy rows: images of seed i under the fiber monodromy maps at x0 = {x0}"),
            "points at infinity are omitted".into(),
        ],
        columns: "group,seed,element,re,im".into(),
        rows,
    })
}

pub fn figure(kind: PlotKind, config: &SuiteConfig) -> Result<Figure, PlotError> {
    Ok(match kind {
        PlotKind::Discriminant => discriminant_figure(config),
        PlotKind::Leaves => leaves_figure(config),
        PlotKind::Web => web_figure(config)?,
        PlotKind::Orbits => orbits_figure(config)?,
    })
}

fn write(path: &Path, body: &str) -> Result<(), PlotError> {
    std::fs::write(path, body).map_err(|source| PlotError::Io { path: path.display().to_string(), source })
}

/// Writes `<kind>.csv` and `<kind>.svg` into `dir` and returns their paths.
pub fn emit_plot(kind: PlotKind, config: &SuiteConfig, dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    let fig = figure(kind, config)?;
    let csv = dir.join(format!("{}.csv", kind.name()));
    let svg = dir.join(format!("{}.svg", kind.name()));
    write(&csv, &fig.csv())?;
    write(&svg, &fig.svg())?;
    Ok(vec![csv, svg])
}

//! Deterministic SVG diagrams.  Output depends only on the inputs, and
//! coordinates are printed with fixed precision, so files are byte-stable.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invlim::Atlas;

const SIZE: f64 = 480.0;
const PAD: f64 = 40.0;

/// Kinds accepted by [`plot`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    Regions,
    Identification,
    Quotient,
    Orbit,
    Circle,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "regions" => PlotKind::Regions,
            "identification" => PlotKind::Identification,
            "quotient" => PlotKind::Quotient,
            "orbit" => PlotKind::Orbit,
            "circle" => PlotKind::Circle,
            _ => return Err(Error::Invalid(format!("unknown plot kind {s:?}"))),
        })
    }
}

/// Inputs for [`plot`]; each kind reads the fields it needs.
#[derive(Clone, Debug, Default)]
pub struct PlotData {
    pub base: u32,
    pub depth: u32,
    pub lambda: f64,
    pub eps: f64,
    pub points: Vec<(f64, f64)>,
    pub title: String,
}

pub fn plot(kind: PlotKind, data: &PlotData) -> Result<String> {
    match kind {
        PlotKind::Regions => regions_svg(data.lambda, data.eps, &data.points),
        PlotKind::Identification => identification_svg(data.base, data.depth),
        PlotKind::Quotient => quotient_svg(data.base, data.depth),
        PlotKind::Orbit => Ok(orbit_svg(&data.points, &data.title)),
        PlotKind::Circle => Ok(circle_svg(&Atlas::default_cat())),
    }
}

/// An SVG canvas showing the world box `[x0, x1] x [y0, y1]`, y pointing up.
struct Canvas {
    x0: f64,
    y0: f64,
    scale_x: f64,
    scale_y: f64,
    body: String,
}

impl Canvas {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let inner = SIZE - 2.0 * PAD;
        Canvas {
            x0,
            y0,
            scale_x: inner / (x1 - x0),
            scale_y: inner / (y1 - y0),
            body: String::new(),
        }
    }

    fn px(&self, p: (f64, f64)) -> (f64, f64) {
        (
            PAD + (p.0 - self.x0) * self.scale_x,
            SIZE - PAD - (p.1 - self.y0) * self.scale_y,
        )
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64) {
        let (a, b) = (self.px(a), self.px(b));
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{stroke}" stroke-width="{width:.1}"/>"#,
            a.0, a.1, b.0, b.1
        );
    }

    fn polygon(&mut self, pts: &[(f64, f64)], fill: &str, stroke: &str) {
        let mut s = String::new();
        for p in pts {
            let q = self.px(*p);
            let _ = write!(s, "{:.2},{:.2} ", q.0, q.1);
        }
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="1.0"/>"#,
            s.trim_end()
        );
    }

    fn dot(&mut self, p: (f64, f64), r: f64, fill: &str) {
        let q = self.px(p);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r:.1}" fill="{fill}"/>"#,
            q.0, q.1
        );
    }

    fn ring(&mut self, c: (f64, f64), radius: f64, stroke: &str) {
        let q = self.px(c);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="{stroke}" stroke-width="1.0"/>"#,
            q.0,
            q.1,
            radius * self.scale_x
        );
    }

    fn text(&mut self, p: (f64, f64), s: &str) {
        let q = self.px(p);
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11">{}</text>"#,
            q.0,
            q.1,
            escape(s)
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str) {
        if pts.len() < 2 {
            return;
        }
        let mut s = String::new();
        for p in pts {
            let q = self.px(*p);
            let _ = write!(s, "{:.2},{:.2} ", q.0, q.1);
        }
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            s.trim_end()
        );
    }

    fn finish(self, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{PAD}" y="24" font-family="monospace" font-size="13">{}</text>"#,
            escape(title)
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const SECTOR_FILL: [&str; 4] = ["#f4c7c3", "#c6dbef", "#c7e9c0", "#fdd0a2"];

/// Region square `D` with its four sectors, the band `E` and an optional
/// excursion path.
pub fn regions_svg(lambda: f64, eps: f64, path: &[(f64, f64)]) -> Result<String> {
    if !(lambda > 1.0 && eps > 0.0) {
        return Err(Error::Invalid("need lambda > 1 and eps > 0".into()));
    }
    let w = lambda * eps;
    let m = 1.1 * w;
    let mut c = Canvas::new(-m, m, -m, m);
    let o = (0.0, 0.0);
    let corners = [(w, -w), (w, w), (-w, w), (-w, -w)];
    for i in 0..4 {
        c.polygon(&[o, corners[i], corners[(i + 1) % 4]], SECTOR_FILL[i], "#555555");
    }
    // the inner square bounds the band E from inside
    c.polygon(&[(eps, -eps), (eps, eps), (-eps, eps), (-eps, -eps)], "none", "#000000");
    c.line((-w, 0.0), (w, 0.0), "#888888", 0.5);
    c.line((0.0, -w), (0.0, w), "#888888", 0.5);
    for (i, label) in ["D1", "D2", "D3", "D4"].iter().enumerate() {
        let a = std::f64::consts::FRAC_PI_2 * i as f64;
        c.text((0.75 * w * a.cos(), 0.75 * w * a.sin()), label);
    }
    c.text((eps, eps), "E");
    let clipped: Vec<(f64, f64)> = path.iter().map(|p| (p.0.clamp(-m, m), p.1.clamp(-m, m))).collect();
    c.polyline(&clipped, "#b2182b");
    for p in &clipped {
        c.dot(*p, 2.0, "#b2182b");
    }
    Ok(c.finish(&format!("regions lambda={lambda} eps={eps}")))
}

fn side_segments(n: u32, depth: u32) -> Result<Vec<(u32, f64, f64)>> {
    if n < 2 {
        return Err(Error::BadBase(n));
    }
    if depth == 0 || depth > 12 {
        return Err(Error::Invalid("depth must lie in 1..=12".into()));
    }
    let nf = n as f64;
    Ok((1..=depth)
        .map(|k| (k, nf.powi(-(k as i32)), nf.powi(1 - k as i32)))
        .collect())
}

const SIDE_COLOURS: [&str; 4] = ["#d73027", "#4575b4", "#1a9850", "#984ea3"];

/// Unit square with the glued segments `I_k, I_k'` and `J_k, J_k'`.
pub fn identification_svg(n: u32, depth: u32) -> Result<String> {
    let segs = side_segments(n, depth)?;
    let mut c = Canvas::new(-0.08, 1.08, -0.08, 1.08);
    c.polygon(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], "#f7f7f7", "#000000");
    for (k, lo, hi) in &segs {
        let col = SIDE_COLOURS[(*k as usize - 1) % SIDE_COLOURS.len()];
        c.line((0.0, *lo), (0.0, *hi), col, 3.0);
        c.line((1.0, 1.0 - hi), (1.0, 1.0 - lo), col, 3.0);
        c.line((*lo, 0.0), (*hi, 0.0), col, 3.0);
        c.line((1.0 - hi, 1.0), (1.0 - lo, 1.0), col, 3.0);
        if *k <= 3 {
            let mid = 0.5 * (lo + hi);
            c.text((-0.07, mid), &format!("I{k}"));
            c.text((1.01, 1.0 - mid), &format!("I{k}'"));
            c.text((mid, -0.05), &format!("J{k}"));
            c.text((1.0 - mid, 1.02), &format!("J{k}'"));
        }
    }
    for p in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        c.dot(p, 3.0, "#000000");
    }
    Ok(c.finish(&format!("identifications n={n}")))
}

/// Half-square fundamental domain `x <= 1/2` of the quotient sphere.  The
/// half-turn folds each `J_k` and the segment `x = 1/2` at their midpoints,
/// which are the branch points.
pub fn quotient_svg(n: u32, depth: u32) -> Result<String> {
    let segs = side_segments(n, depth)?;
    let mut c = Canvas::new(-0.08, 0.58, -0.08, 1.08);
    c.polygon(&[(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.0, 1.0)], "#f7f7f7", "#000000");
    c.line((0.5, 0.0), (0.5, 1.0), "#777777", 2.0);
    c.dot((0.5, 0.5), 3.5, "#000000");
    c.dot((0.0, 0.0), 3.5, "#000000");
    for (k, lo, hi) in &segs {
        let col = SIDE_COLOURS[(*k as usize - 1) % SIDE_COLOURS.len()];
        c.line((0.0, *lo), (0.0, *hi), col, 3.0);
        c.dot((0.0, 0.5 * (lo + hi)), 2.5, "#000000");
        let (jl, jh) = (lo.min(0.5), hi.min(0.5));
        c.line((jl, 0.0), (jh, 0.0), col, 3.0);
        if *hi <= 0.5 {
            c.dot((0.5 * (lo + hi), 0.0), 2.5, "#000000");
        }
        if *k <= 3 {
            c.text((-0.07, 0.5 * (lo + hi)), &format!("I{k}"));
            c.text((0.5 * (jl + jh), -0.05), &format!("J{k}"));
        }
    }
    Ok(c.finish(&format!("quotient fundamental domain n={n}")))
}

/// Orbit points in the unit square; an empty orbit gives the axes alone.
pub fn orbit_svg(points: &[(f64, f64)], title: &str) -> String {
    let mut c = Canvas::new(0.0, 1.0, 0.0, 1.0);
    c.line((0.0, 0.0), (1.0, 0.0), "#000000", 1.0);
    c.line((0.0, 0.0), (0.0, 1.0), "#000000", 1.0);
    c.line((1.0, 0.0), (1.0, 1.0), "#bbbbbb", 0.5);
    c.line((0.0, 1.0), (1.0, 1.0), "#bbbbbb", 0.5);
    for p in points {
        c.dot(*p, 2.0, "#2166ac");
    }
    c.finish(title)
}

/// The blown circle over the fixed point in its chart: arcs over the four
/// sector closures, the targets `z(1), z(2)` and the radius-`M` discs.
pub fn circle_svg(atlas: &Atlas) -> String {
    let st = &atlas.stages[0];
    let m = 1.15 * st.radius;
    let mut c = Canvas::new(-m, m, -m, m);
    let f = &atlas.frame;
    let ring = |t: f64| -> (f64, f64) {
        let (a, b) = (t.cos(), t.sin());
        (
            st.inner * (a * f.es[0] + b * f.eu[0]),
            st.inner * (a * f.es[1] + b * f.eu[1]),
        )
    };
    c.ring((0.0, 0.0), st.radius, "#999999");
    for i in 0..4 {
        let mid = std::f64::consts::FRAC_PI_2 * i as f64;
        let arc: Vec<(f64, f64)> = (0..=32)
            .map(|k| ring(mid - std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_2 * k as f64 / 32.0))
            .collect();
        c.polyline(&arc, SIDE_COLOURS[i]);
        let lab = ring(mid);
        c.text((1.3 * lab.0, 1.3 * lab.1), &format!("C{}", i + 1));
    }
    let thr = crate::invlim::ball::threshold(atlas);
    for (sign, name) in [(1.0, "z(1)"), (-1.0, "z(2)")] {
        let p = (sign * st.inner * f.es[0], sign * st.inner * f.es[1]);
        c.dot(p, 3.0, "#000000");
        c.ring(p, thr, "#b2182b");
        c.text((p.0, p.1 + 0.1 * st.inner), name);
    }
    c.finish("blown circle over the fixed point")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_well_formed() {
        let a = regions_svg(2.0, 0.1, &[(0.15, 0.01), (0.075, 0.02)]).unwrap();
        assert_eq!(a, regions_svg(2.0, 0.1, &[(0.15, 0.01), (0.075, 0.02)]).unwrap());
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<polygon").count(), 5);
        let id = identification_svg(3, 4).unwrap();
        assert!(id.contains(">I1<") && id.contains(">J2'<"));
        assert!(quotient_svg(2, 3).unwrap().contains("<circle"));
        assert!(identification_svg(1, 3).is_err());
        assert!("bogus".parse::<PlotKind>().is_err());
    }

    #[test]
    fn empty_orbit_draws_axes_only() {
        let s = orbit_svg(&[], "empty");
        assert_eq!(s.matches("<line").count(), 4);
        assert_eq!(s.matches("<circle").count(), 0);
    }
}

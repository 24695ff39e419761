//! Finite-depth model of the blow-up inverse limit over a hyperbolic toral
//! automorphism.
//!
//! Stage `s` blows up one periodic orbit: each of its points is replaced by a
//! circle of directions.  A [`LimPoint`] of depth `k` lists the coordinates
//! `u_0, ..., u_k`, where `u_j` lives in the stage-`j` space.  Coordinate
//! metrics are pulled back from the torus through charts that open each blown
//! point into a hole of radius `rho`.

pub mod ball;
pub mod falsify;
pub mod frame;
pub mod zip;

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{q, to_f64, Q};
use crate::surd::QuadSurd;
use crate::toral::{pillowcase, Step, ToralAuto, TorusPoint};

pub use frame::EigenFrame;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtlasMode {
    /// Blow-ups on the torus itself.
    Upstairs,
    /// Blow-ups of orbits of the pillowcase map; orbits must avoid the
    /// branch set `{0, 1/2}^2` and the base metric is the quotient metric.
    Pillowcase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlownOrbit {
    pub points: Vec<TorusPoint>,
    /// Chart radius `R`: the chart is the identity outside this disc.
    pub radius: f64,
    /// Radius `rho` of the hole the circle is drawn on.
    pub inner: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atlas {
    pub matrix: ToralAuto,
    pub mode: AtlasMode,
    /// Scale of the local region `D = {|s|, |t| < lambda eps}` around the
    /// first blown point, in eigen-coordinates.
    pub eps: Q,
    pub stages: Vec<BlownOrbit>,
    pub frame: EigenFrame,
}

impl Atlas {
    /// The default atlas: the fixed point `(0, 0)` blown up at stage 1, with
    /// chart radius `lambda eps sin(angle(v_s, v_u))` so that the chart disc
    /// lies inside `D`.
    pub fn fixed_point(matrix: ToralAuto, eps: Q) -> Result<Self> {
        let frame = EigenFrame::new(&matrix);
        if eps <= Q::zero() {
            return Err(Error::Invalid("eps must be positive".into()));
        }
        let half_width = frame.lambda_f * to_f64(&eps);
        frame.check_linear_window(&matrix, half_width)?;
        let radius = half_width * frame.sin_su;
        Ok(Atlas {
            matrix,
            mode: AtlasMode::Upstairs,
            eps,
            stages: vec![BlownOrbit {
                points: vec![TorusPoint::zero()],
                radius,
                inner: radius / 2.0,
            }],
            frame,
        })
    }

    /// Cat map with `eps = 1/20`.
    pub fn default_cat() -> Self {
        Atlas::fixed_point(ToralAuto::cat(), q(1, 20)).expect("cat-map atlas is valid")
    }

    /// Default atlas extended to `depth` stages by blowing up the
    /// period-2 orbits of the cat map on the `1/5` grid.
    pub fn default_cat_depth(depth: usize) -> Result<Self> {
        let mut a = Atlas::default_cat();
        let extra = crate::toral::periodic_points(&a.matrix, 5)?
            .into_iter()
            .filter(|o| o.period == 2)
            .collect::<Vec<_>>();
        for o in extra.into_iter().take(depth.saturating_sub(1)) {
            a = a.blow_up(o.points)?;
        }
        if a.stages.len() < depth {
            return Err(Error::ResourceCap(format!("only {} stages available", a.stages.len())));
        }
        Ok(a)
    }

    pub fn half_width(&self) -> f64 {
        self.frame.lambda_f * to_f64(&self.eps)
    }

    pub fn lambda_eps(&self) -> QuadSurd {
        self.frame.lambda.mul_q(&self.eps)
    }

    pub fn z1(&self) -> &TorusPoint {
        &self.stages[0].points[0]
    }

    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    /// Adds the orbit as the next stage.
    pub fn blow_up(&self, orbit: Vec<TorusPoint>) -> Result<Self> {
        if orbit.is_empty() {
            return Err(Error::Invalid("empty orbit".into()));
        }
        for (i, p) in orbit.iter().enumerate() {
            let next = &orbit[(i + 1) % orbit.len()];
            if &self.matrix.apply(p, Step::Forward) != next {
                return Err(Error::Invalid(format!("{p} does not map to {next}: not an orbit")));
            }
            if self.mode == AtlasMode::Pillowcase && p.is_half_integer() {
                return Err(Error::Invalid(format!("{p} is a branch point of the pillowcase")));
            }
            if orbit[..i].contains(p) {
                return Err(Error::Invalid(format!("{p} repeated in orbit")));
            }
        }
        let existing: Vec<&TorusPoint> = self.stages.iter().flat_map(|s| s.points.iter()).collect();
        for p in &orbit {
            if existing.contains(&p) {
                return Err(Error::Invalid(format!("{p} is already blown up")));
            }
            if self.mode == AtlasMode::Pillowcase && existing.contains(&&p.neg()) {
                return Err(Error::Invalid(format!("{p} is identified with a blown point")));
            }
        }
        let mut min_d = f64::INFINITY;
        for (i, p) in orbit.iter().enumerate() {
            for e in existing.iter().copied().chain(orbit[..i].iter()) {
                min_d = min_d.min(self.base_dist(p, e));
            }
        }
        let prev = self.stages.last().map_or(f64::INFINITY, |s| s.radius);
        let radius = (prev / 2.0).min(min_d / 4.0);
        let mut out = self.clone();
        out.stages.push(BlownOrbit {
            points: orbit,
            radius,
            inner: radius / 2.0,
        });
        Ok(out)
    }

    /// Base metric: flat torus distance, or its quotient under `z ~ -z`.
    pub fn base_dist(&self, a: &TorusPoint, b: &TorusPoint) -> f64 {
        let d = torus_dist_f(a.to_f64(), b.to_f64());
        match self.mode {
            AtlasMode::Upstairs => d,
            AtlasMode::Pillowcase => d.min(torus_dist_f(a.to_f64(), b.neg().to_f64())),
        }
    }

    /// Stage and index of a blown point, if any stage `<= max_stage` blew it up.
    pub fn blown_index(&self, p: &TorusPoint, max_stage: usize) -> Option<(usize, usize)> {
        let key = match self.mode {
            AtlasMode::Upstairs => p.clone(),
            AtlasMode::Pillowcase => pillowcase(p).rep,
        };
        for (s, st) in self.stages.iter().enumerate().take(max_stage) {
            for (i, c) in st.points.iter().enumerate() {
                let ck = match self.mode {
                    AtlasMode::Upstairs => c.clone(),
                    AtlasMode::Pillowcase => pillowcase(c).rep,
                };
                if ck == key {
                    return Some((s + 1, i));
                }
            }
        }
        None
    }

    fn center(&self, stage: usize, index: usize) -> &TorusPoint {
        &self.stages[stage - 1].points[index]
    }

    /// Chart `E_j` of one coordinate, as a point of the plane (a lift of the
    /// torus point).
    pub fn chart(&self, j: usize, c: &Coord) -> (f64, f64) {
        match c {
            Coord::Circle { stage, index, dir } => {
                let st = &self.stages[stage - 1];
                let (cx, cy) = self.center(*stage, *index).to_f64();
                let (dx, dy) = (dir.0.to_f64(), dir.1.to_f64());
                let n = dx.hypot(dy);
                (cx + st.inner * dx / n, cy + st.inner * dy / n)
            }
            Coord::Base(p) => self.chart_base(j, p.to_f64()),
        }
    }

    /// Chart `E_j` of a base point given in floating point.
    pub fn chart_base(&self, j: usize, (px, py): (f64, f64)) -> (f64, f64) {
        for st in self.stages.iter().take(j) {
            for c in &st.points {
                let (cx, cy) = c.to_f64();
                let (dx, dy) = (wrap(px - cx), wrap(py - cy));
                let r = dx.hypot(dy);
                if r < st.radius && r > 0.0 {
                    let scaled = st.inner + r * (1.0 - st.inner / st.radius);
                    return (cx + scaled * dx / r, cy + scaled * dy / r);
                }
            }
        }
        (px, py)
    }

    /// Distance between two chart images.
    pub fn chart_dist(&self, pa: (f64, f64), pb: (f64, f64)) -> f64 {
        let d = torus_dist_f(pa, pb);
        match self.mode {
            AtlasMode::Upstairs => d,
            AtlasMode::Pillowcase => d.min(torus_dist_f(pa, (-pb.0, -pb.1))),
        }
    }

    /// Coordinate metric `d_j`.
    pub fn coord_dist(&self, j: usize, a: &Coord, b: &Coord) -> f64 {
        if j == 0 {
            if let (Coord::Base(p), Coord::Base(q)) = (a, b) {
                return self.base_dist(p, q);
            }
        }
        self.chart_dist(self.chart(j, a), self.chart(j, b))
    }
}

/// Signed representative of `t mod 1` in `[-1/2, 1/2)`.
pub fn wrap(t: f64) -> f64 {
    t - (t + 0.5).floor()
}

pub fn torus_dist_f(a: (f64, f64), b: (f64, f64)) -> f64 {
    wrap(a.0 - b.0).hypot(wrap(a.1 - b.1))
}

/// One coordinate `u_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Coord {
    Base(TorusPoint),
    /// A direction (up to positive scaling) on the circle blown up at
    /// `stage` over the `index`-th point of that stage's orbit.
    Circle {
        stage: usize,
        index: usize,
        dir: (QuadSurd, QuadSurd),
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimPoint {
    pub coords: Vec<Coord>,
}

impl LimPoint {
    /// A point off every circle.
    pub fn from_base(atlas: &Atlas, p: TorusPoint, depth: usize) -> Result<Self> {
        check_depth(atlas, depth)?;
        if let Some((s, _)) = atlas.blown_index(&p, depth) {
            return Err(Error::Incompatible(format!(
                "{p} is blown up at stage {s}; give a direction"
            )));
        }
        Ok(LimPoint {
            coords: vec![Coord::Base(p); depth + 1],
        })
    }

    /// The point of the circle over the `index`-th point of `stage` in
    /// direction `dir`.
    pub fn on_circle(
        atlas: &Atlas,
        stage: usize,
        index: usize,
        dir: (QuadSurd, QuadSurd),
        depth: usize,
    ) -> Result<Self> {
        check_depth(atlas, depth)?;
        if stage == 0 || stage > depth || index >= atlas.stages[stage - 1].points.len() {
            return Err(Error::Incompatible(format!(
                "no circle at stage {stage}, index {index}"
            )));
        }
        if dir.0.is_zero() && dir.1.is_zero() {
            return Err(Error::Invalid("zero direction".into()));
        }
        let c = atlas.center(stage, index).clone();
        let coords = (0..=depth)
            .map(|j| {
                if j < stage {
                    Coord::Base(c.clone())
                } else {
                    Coord::Circle {
                        stage,
                        index,
                        dir: dir.clone(),
                    }
                }
            })
            .collect();
        Ok(LimPoint { coords })
    }

    pub fn depth(&self) -> usize {
        self.coords.len() - 1
    }

    /// `Pi_0`: the base coordinate.
    pub fn project0(&self) -> &TorusPoint {
        match &self.coords[0] {
            Coord::Base(p) => p,
            Coord::Circle { .. } => unreachable!("coordinate 0 is never on a circle"),
        }
    }
}

fn check_depth(atlas: &Atlas, depth: usize) -> Result<()> {
    if depth > atlas.depth() {
        return Err(Error::Incompatible(format!(
            "depth {depth} exceeds the {} blown stages",
            atlas.depth()
        )));
    }
    Ok(())
}

/// Checks `pi_j(u_j) = u_{j-1}` for every `j` and that no base coordinate
/// sits on a point blown up at or before its stage.
pub fn check_compatible(atlas: &Atlas, z: &LimPoint) -> Result<()> {
    check_depth(atlas, z.depth())?;
    if !matches!(z.coords[0], Coord::Base(_)) {
        return Err(Error::Incompatible("u_0 must be a base point".into()));
    }
    for j in 0..=z.depth() {
        match &z.coords[j] {
            Coord::Base(p) => {
                if let Some((s, _)) = atlas.blown_index(p, j) {
                    return Err(Error::Incompatible(format!("u_{j} = {p} lies on the stage-{s} circle")));
                }
            }
            Coord::Circle { stage, index, .. } => {
                if *stage > j || *stage == 0 || *index >= atlas.stages[stage - 1].points.len() {
                    return Err(Error::Incompatible(format!("u_{j} names a circle not yet blown up")));
                }
            }
        }
        if j > 0 {
            let down = collapse(atlas, j, &z.coords[j]);
            if down != z.coords[j - 1] {
                return Err(Error::Incompatible(format!("pi_{j}(u_{j}) != u_{}", j - 1)));
            }
        }
    }
    Ok(())
}

/// `pi_j`: collapses the circles blown up at stage `j`.
fn collapse(atlas: &Atlas, j: usize, c: &Coord) -> Coord {
    match c {
        Coord::Circle { stage, index, .. } if *stage == j => Coord::Base(atlas.center(*stage, *index).clone()),
        other => other.clone(),
    }
}

/// Differential action on a direction vector.
pub fn transport(m: &[[i64; 2]; 2], v: &(QuadSurd, QuadSurd)) -> (QuadSurd, QuadSurd) {
    let r = |x: i64| QuadSurd::rational(q(x, 1));
    (
        &(&r(m[0][0]) * &v.0) + &(&r(m[0][1]) * &v.1),
        &(&r(m[1][0]) * &v.0) + &(&r(m[1][1]) * &v.1),
    )
}

/// `H_k`, coordinate-wise; directions move by the differential.
pub fn h_apply(atlas: &Atlas, z: &LimPoint, step: Step) -> Result<LimPoint> {
    check_compatible(atlas, z)?;
    let m = match step {
        Step::Forward => atlas.matrix.m,
        Step::Inverse => atlas.matrix.inverse_matrix(),
    };
    let coords = z
        .coords
        .iter()
        .map(|c| match c {
            Coord::Base(p) => Coord::Base(atlas.matrix.apply(p, step)),
            Coord::Circle { stage, index, dir } => {
                let st = &atlas.stages[stage - 1];
                let image = atlas.matrix.apply(&st.points[*index], step);
                let next = st
                    .points
                    .iter()
                    .position(|c| *c == image)
                    .expect("blown orbits are invariant");
                Coord::Circle {
                    stage: *stage,
                    index: next,
                    dir: normalize_dir(&transport(&m, dir)),
                }
            }
        })
        .collect();
    let out = LimPoint { coords };
    check_compatible(atlas, &out)?;
    Ok(out)
}

/// Rescales a direction by a power of two so that its coefficients stay near 1.
fn normalize_dir(v: &(QuadSurd, QuadSurd)) -> (QuadSurd, QuadSurd) {
    let scale = v.0.to_f64().abs().max(v.1.to_f64().abs());
    if !(scale > 0.0) {
        return v.clone();
    }
    let e = scale.log2().round() as i32;
    if e == 0 {
        return v.clone();
    }
    let k = crate::rational::pow(2, -e);
    (v.0.mul_q(&k), v.1.mul_q(&k))
}

/// Truncated product metric and the bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dinf {
    pub value: f64,
    pub tail_bound: f64,
}

/// `sum_{j <= k} d_j / (2^j (1 + d_j))`; the omitted terms sum to at most `2^-k`.
pub fn dinf(atlas: &Atlas, z: &LimPoint, w: &LimPoint) -> Result<Dinf> {
    if z.depth() != w.depth() {
        return Err(Error::Incompatible("depth mismatch".into()));
    }
    let mut value = 0.0;
    for j in 0..=z.depth() {
        let d = atlas.coord_dist(j, &z.coords[j], &w.coords[j]);
        value += d / (2f64.powi(j as i32) * (1.0 + d));
    }
    Ok(Dinf {
        value,
        tail_bound: 0.5f64.powi(z.depth() as i32),
    })
}

/// `z(1)` (sign `+1`) or `z(2)` (sign `-1`): the first blown point with the
/// contracting direction `+-v_s`.
pub fn z_target(atlas: &Atlas, sign: i32, depth: usize) -> Result<LimPoint> {
    let v = atlas.frame.vs.clone();
    let dir = if sign >= 0 { v } else { (-v.0, -v.1) };
    LimPoint::on_circle(atlas, 1, 0, dir, depth)
}

/// Directions on the first circle fixed by the differential: `+-v_s` and
/// `+-v_u`, verified exactly.
pub fn fixed_directions(atlas: &Atlas) -> Vec<(QuadSurd, QuadSurd)> {
    let f = &atlas.frame;
    let cands = [
        f.vs.clone(),
        (-f.vs.0.clone(), -f.vs.1.clone()),
        f.vu.clone(),
        (-f.vu.0.clone(), -f.vu.1.clone()),
    ];
    cands
        .into_iter()
        .filter(|v| same_direction(&transport(&atlas.matrix.m, v), v))
        .collect()
}

/// Exact test that two nonzero vectors are positive multiples.
pub fn same_direction(a: &(QuadSurd, QuadSurd), b: &(QuadSurd, QuadSurd)) -> bool {
    let cross = &(&a.0 * &b.1) - &(&a.1 * &b.0);
    let dot = &(&a.0 * &b.0) + &(&a.1 * &b.1);
    cross.is_zero() && dot.signum() > 0
}

/// Angle of `D (cos t, sin t)`.
pub fn transport_angle(atlas: &Atlas, theta: f64) -> f64 {
    let m = atlas.matrix.m;
    let (c, s) = (theta.cos(), theta.sin());
    let x = m[0][0] as f64 * c + m[0][1] as f64 * s;
    let y = m[1][0] as f64 * c + m[1][1] as f64 * s;
    y.atan2(x)
}

/// Number of fixed angles of the projectivized differential, located by sign
/// changes of the wrapped angle displacement on `samples` equally spaced angles.
pub fn count_fixed_angles(atlas: &Atlas, samples: usize) -> usize {
    let tau = std::f64::consts::TAU;
    let disp = |t: f64| {
        let d = transport_angle(atlas, t) - t;
        d - tau * ((d + std::f64::consts::PI) / tau).floor()
    };
    let mut count = 0;
    // offset the grid so no sample lands on an eigen-angle
    let shift = 0.5 * tau / samples as f64 * 0.7371;
    for i in 0..samples {
        let a = shift + tau * i as f64 / samples as f64;
        let b = shift + tau * (i + 1) as f64 / samples as f64;
        let (da, db) = (disp(a), disp(b));
        // a genuine root, not a wrap-around jump
        if da.signum() != db.signum() && (da - db).abs() < 1.0 {
            count += 1;
        }
    }
    count
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Base(p) => write!(f, "{p}"),
            Coord::Circle { stage, index, dir } => {
                write!(f, "S{stage}.{index}[{:.6}, {:.6}]", dir.0.to_f64(), dir.1.to_f64())
            }
        }
    }
}

#[cfg(test)]
mod tests;

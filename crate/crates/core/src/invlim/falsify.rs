//! Exhaustive grid searches for shadowing orbits that would witness the
//! approximate product property or specification.
//!
//! Candidates are every point of the torus grid `(a, b) / 2^R` together with
//! sampled directions on the blown circle over the fixed point.  Grid orbits
//! are computed exactly in integers modulo `2^R`.  A step counts as a hit when
//! the truncated metric (a lower bound for `dinf`) is below the tolerance, so
//! hits are never undercounted.  Each exclusion is tied to the region trace
//! that justifies it.  The search is evidence at a stated resolution, not a
//! proof.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::threshold;
use super::frame::dyadic_lift;
use super::{z_target, Atlas, Coord};
use crate::error::{Error, Result};
use crate::hyperlocal::{Region, Sector};
use crate::rational::{q, to_f64};
use crate::surd::QuadSurd;
use crate::toral::Step;

pub const EVIDENCE_LABEL: &str = "falsification evidence at the stated resolution and budget; not a proof";

/// Sample traces kept per exclusion reason.
const SAMPLE_TRACES: usize = 3;
/// Steps kept in a sample trace.
const TRACE_LEN: usize = 12;
/// Float slack when deciding hits: a step within this of the tolerance counts
/// as a hit.
const SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub base: (f64, f64),
    pub region: Region,
    /// Truncated metric to the target at this step.
    pub dinf: f64,
    pub hit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateTrace {
    pub candidate: String,
    pub reason: String,
    pub steps: Vec<TraceStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FalsificationReport {
    pub property: String,
    pub label: String,
    pub resolution: u32,
    pub depth: usize,
    pub parameters: BTreeMap<String, f64>,
    pub grid_candidates: u64,
    pub circle_candidates: u64,
    pub survivors: u64,
    pub survivor_traces: Vec<CandidateTrace>,
    /// Exclusions per reason code.
    pub reasons: BTreeMap<String, u64>,
    /// Region of the deciding step, per reason code.
    pub deciding_regions: BTreeMap<String, BTreeMap<String, u64>>,
    /// Hit steps whose base point lies outside the sector the ball lemma
    /// predicts.  Nonzero values would contradict the ball containment.
    pub hit_steps: u64,
    pub hit_region_violations: u64,
    /// Candidates that met the first window.
    pub window1_passes: u64,
    pub samples: Vec<CandidateTrace>,
    pub notes: Vec<String>,
}

impl FalsificationReport {
    pub fn passed(&self) -> bool {
        self.survivors == 0 && self.hit_region_violations == 0
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    survivors: u64,
    survivor_traces: Vec<CandidateTrace>,
    reasons: BTreeMap<String, u64>,
    deciding: BTreeMap<String, BTreeMap<String, u64>>,
    hit_steps: u64,
    hit_region_violations: u64,
    window1_passes: u64,
    samples: Vec<CandidateTrace>,
}

impl Tally {
    fn exclude(&mut self, reason: &str, region: Region, trace: impl FnOnce() -> CandidateTrace) {
        *self.reasons.entry(reason.to_string()).or_default() += 1;
        *self
            .deciding
            .entry(reason.to_string())
            .or_default()
            .entry(region_name(region))
            .or_default() += 1;
        if self.samples.iter().filter(|t| t.reason == reason).count() < SAMPLE_TRACES {
            self.samples.push(trace());
        }
    }

    fn survive(&mut self, trace: CandidateTrace) {
        self.survivors += 1;
        if self.survivor_traces.len() < SAMPLE_TRACES {
            self.survivor_traces.push(trace);
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.survivors += other.survivors;
        for t in other.survivor_traces {
            if self.survivor_traces.len() < SAMPLE_TRACES {
                self.survivor_traces.push(t);
            }
        }
        for (k, v) in other.reasons {
            *self.reasons.entry(k).or_default() += v;
        }
        for (k, m) in other.deciding {
            let e = self.deciding.entry(k).or_default();
            for (r, v) in m {
                *e.entry(r).or_default() += v;
            }
        }
        self.hit_steps += other.hit_steps;
        self.hit_region_violations += other.hit_region_violations;
        self.window1_passes += other.window1_passes;
        for t in other.samples {
            if self.samples.iter().filter(|s| s.reason == t.reason).count() < SAMPLE_TRACES {
                self.samples.push(t);
            }
        }
        self
    }
}

fn region_name(r: Region) -> String {
    serde_json::to_value(r)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Shared search context.
struct Ctx<'a> {
    atlas: &'a Atlas,
    r: u32,
    eps_f: f64,
}

impl Ctx<'_> {
    fn side(&self) -> u64 {
        1u64 << self.r
    }

    fn pos(&self, (a, b): (u64, u64)) -> (f64, f64) {
        let m = self.side() as f64;
        (super::wrap(a as f64 / m), super::wrap(b as f64 / m))
    }

    fn region(&self, p: (u64, u64)) -> Region {
        let lift = || (dyadic_lift(p.0, self.r), dyadic_lift(p.1, self.r));
        self.atlas.frame.region(self.pos(p), lift, &self.atlas.eps, self.eps_f)
    }

    fn sector(&self, p: (u64, u64)) -> Option<Sector> {
        let lift = || (dyadic_lift(p.0, self.r), dyadic_lift(p.1, self.r));
        self.atlas.frame.sector(self.pos(p), lift, &self.atlas.eps, self.eps_f)
    }

    /// Truncated metric between a base point and a target given by its chart
    /// images `u_0, ..., u_k`.
    fn dinf_to(&self, p: (f64, f64), target: &[(f64, f64)]) -> f64 {
        let mut v = 0.0;
        for (j, t) in target.iter().enumerate() {
            let d = self.atlas.chart_dist(self.atlas.chart_base(j, p), *t);
            v += d / (2f64.powi(j as i32) * (1.0 + d));
        }
        v
    }

    fn step(&self, p: (u64, u64)) -> (u64, u64) {
        self.atlas.matrix.apply_grid(p, self.side(), Step::Forward)
    }

    fn trace_step(&self, step: usize, p: (u64, u64), target: &[(f64, f64)], tol: f64) -> TraceStep {
        let d = self.dinf_to(self.pos(p), target);
        TraceStep {
            step,
            base: self.pos(p),
            region: self.region(p),
            dinf: d,
            hit: d < tol + SLACK,
        }
    }

    /// Trace of the first `TRACE_LEN` steps from `start`, measured against
    /// the targets `targets(step)`.
    fn trace<'t>(
        &self,
        p0: (u64, u64),
        start: usize,
        targets: impl Fn(usize) -> &'t [(f64, f64)],
        tol: f64,
        reason: &str,
    ) -> CandidateTrace {
        let mut p = p0;
        for _ in 0..start {
            p = self.step(p);
        }
        let mut steps = Vec::new();
        for l in start..start + TRACE_LEN {
            steps.push(self.trace_step(l, p, targets(l), tol));
            p = self.step(p);
        }
        CandidateTrace {
            candidate: format!("({}, {}) / 2^{}", p0.0, p0.1, self.r),
            reason: reason.to_string(),
            steps,
        }
    }
}

fn check_common(atlas: &Atlas, resolution: u32, budget: u64) -> Result<(u64, usize)> {
    if !(1..=16).contains(&resolution) {
        return Err(Error::Invalid("resolution must lie in 1..=16".into()));
    }
    if *atlas.z1() != crate::toral::TorusPoint::zero() {
        return Err(Error::Invalid(
            "the first blown point must be the fixed point (0, 0)".into(),
        ));
    }
    let grid = 1u64 << (2 * resolution);
    if grid > budget {
        return Err(Error::ResourceCap(format!(
            "inconclusive at this resolution: {grid} grid candidates exceed the budget of {budget}"
        )));
    }
    Ok((grid, atlas.depth()))
}

/// Chart images of a limit point.
fn target_charts(atlas: &Atlas, coords: &[Coord]) -> Vec<(f64, f64)> {
    coords.iter().enumerate().map(|(j, c)| atlas.chart(j, c)).collect()
}

/// Directions on the first circle: `count` dyadic approximations of equally
/// spaced angles and the four eigendirections.
fn circle_directions(atlas: &Atlas, count: u64) -> Vec<(QuadSurd, QuadSurd)> {
    let bits = 1i64 << 40;
    let dy = |x: f64| QuadSurd::rational(q((x * bits as f64).round() as i64, bits));
    let mut out: Vec<(QuadSurd, QuadSurd)> = (0..count)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / count as f64;
            (dy(t.cos()), dy(t.sin()))
        })
        .collect();
    let f = &atlas.frame;
    for v in [&f.vs, &f.vu] {
        out.push(v.clone());
        out.push((-v.0.clone(), -v.1.clone()));
    }
    out
}

/// Sign of the contracting component of a direction.  The differential scales
/// that component by the positive stable eigenvalue, so the sign is invariant.
fn stable_sign(atlas: &Atlas, v: &(QuadSurd, QuadSurd)) -> i32 {
    let f = &atlas.frame;
    let s = &(&(&v.0 * &f.vu.1) - &(&v.1 * &f.vu.0)) / &f.det;
    s.signum()
}

/// Searches for candidates shadowing `z(1)` on steps `0..n` and `z(2)` on
/// steps `n..2n`, each with at most `delta1 n` misses at tolerance `delta2`.
pub fn app_falsify(
    atlas: &Atlas,
    delta1: f64,
    delta2: f64,
    n: usize,
    resolution: u32,
    budget: u64,
) -> Result<FalsificationReport> {
    if n < 100 || !n.is_multiple_of(100) {
        return Err(Error::Invalid("n must be a positive multiple of 100".into()));
    }
    if !(delta1 > 0.0 && delta1 < 1.0 && delta2 > 0.0 && delta2 < 0.5) {
        return Err(Error::Invalid("need 0 < delta1 < 1 and 0 < delta2 < 1/2".into()));
    }
    if atlas.frame.mu_f <= 0.0 {
        return Err(Error::NotHyperbolic("the stable eigenvalue must be positive".into()));
    }
    let (grid, depth) = check_common(atlas, resolution, budget)?;
    let ctx = Ctx {
        atlas,
        r: resolution,
        eps_f: to_f64(&atlas.eps),
    };
    let z1 = target_charts(atlas, &z_target(atlas, 1, depth)?.coords);
    let z2 = target_charts(atlas, &z_target(atlas, -1, depth)?.coords);
    let max_miss = (delta1 * n as f64).floor() as usize;
    // dinf >= d_0 / (1 + d_0), so larger base distances are certain misses
    let near = delta2 / (1.0 - delta2);
    let side = ctx.side();

    let rows: Vec<Tally> = (0..side)
        .into_par_iter()
        .map(|a| {
            let mut t = Tally::default();
            for b in 0..side {
                if a == 0 && b == 0 {
                    continue;
                }
                app_candidate(&ctx, (a, b), n, max_miss, near, delta2, &z1, &z2, &mut t);
            }
            t
        })
        .collect();
    let mut tally = rows.into_iter().fold(Tally::default(), Tally::merge);

    // circle over the fixed point: the base coordinate never moves, and the
    // invariant stable sign keeps the direction on one side of the circle
    let dirs = circle_directions(atlas, side);
    let circle = dirs.len() as u64;
    let rho = atlas.stages[0].inner;
    let chord = std::f64::consts::SQRT_2 * rho;
    let bound = chord / (2.0 * (1.0 + chord));
    for v in &dirs {
        let sg = stable_sign(atlas, v);
        let reason = match sg {
            s if s > 0 => "circle_stable_sign_positive_misses_window2",
            s if s < 0 => "circle_stable_sign_negative_misses_window1",
            _ => "circle_unstable_direction_misses_both",
        };
        if bound > delta2 {
            tally.exclude(reason, Region::Axis, || CandidateTrace {
                candidate: format!("circle direction ({:.6}, {:.6})", v.0.to_f64(), v.1.to_f64()),
                reason: reason.to_string(),
                steps: vec![],
            });
        } else {
            tally.survive(CandidateTrace {
                candidate: format!("circle direction ({:.6}, {:.6})", v.0.to_f64(), v.1.to_f64()),
                reason: "circle bound too weak".into(),
                steps: vec![],
            });
        }
    }

    let m = threshold(atlas);
    let mut parameters = BTreeMap::new();
    parameters.insert("delta1".into(), delta1);
    parameters.insert("delta2".into(), delta2);
    parameters.insert("n".into(), n as f64);
    parameters.insert("max_misses".into(), max_miss as f64);
    parameters.insert("ball_threshold_m".into(), m);
    parameters.insert("circle_lower_bound".into(), bound);
    let notes = vec![
        format!(
            "delta2 = {delta2} {} M/4 = {:.6}, so hits near z(1) project into D1 and hits near z(2) into D3",
            if delta2 < m / 4.0 { "<" } else { ">=" },
            m / 4.0
        ),
        format!(
            "circle candidates: the stable component keeps its sign under the differential, so one target stays at chord distance >= sqrt(2) rho, i.e. dinf >= {bound:.6}"
        ),
    ];
    Ok(FalsificationReport {
        property: "approximate product property".into(),
        label: EVIDENCE_LABEL.into(),
        resolution,
        depth,
        parameters,
        grid_candidates: grid - 1,
        circle_candidates: circle,
        survivors: tally.survivors,
        survivor_traces: tally.survivor_traces,
        reasons: tally.reasons,
        deciding_regions: tally.deciding,
        hit_steps: tally.hit_steps,
        hit_region_violations: tally.hit_region_violations,
        window1_passes: tally.window1_passes,
        samples: tally.samples,
        notes,
    })
}

#[allow(clippy::too_many_arguments)]
fn app_candidate(
    ctx: &Ctx<'_>,
    p0: (u64, u64),
    n: usize,
    max_miss: usize,
    near: f64,
    tol: f64,
    z1: &[(f64, f64)],
    z2: &[(f64, f64)],
    t: &mut Tally,
) {
    let targets = |l: usize| if l < n { z1 } else { z2 };
    let mut p = p0;
    for (window, target, sector) in [(0usize, z1, Sector::D1), (1, z2, Sector::D3)] {
        let mut misses = 0;
        for l in window * n..(window + 1) * n {
            let pf = ctx.pos(p);
            let hit = pf.0.hypot(pf.1) < near && ctx.dinf_to(pf, target) < tol + SLACK;
            if hit {
                t.hit_steps += 1;
                if ctx.sector(p) != Some(sector) {
                    t.hit_region_violations += 1;
                }
            } else {
                misses += 1;
                if misses > max_miss {
                    let reason = if window == 0 {
                        "window1_misses"
                    } else {
                        "window2_misses"
                    };
                    let start = l.saturating_sub(TRACE_LEN - 1);
                    t.exclude(reason, ctx.region(p), || ctx.trace(p0, start, targets, tol, reason));
                    return;
                }
            }
            p = ctx.step(p);
        }
        if window == 0 {
            t.window1_passes += 1;
        }
    }
    t.survive(ctx.trace(
        p0,
        n.saturating_sub(TRACE_LEN / 2),
        targets,
        tol,
        "survived both windows",
    ));
}

/// Searches for candidates within `delta` of the orbit of `Q(1)` on steps
/// `0..=N+1` and of the orbit of `Q(2)` at step `2N+1`, where
/// `Q(1), Q(2) = z_1 +- x_Q e_s` lie on opposite contracting rays.
pub fn spec_falsify(
    atlas: &Atlas,
    delta: f64,
    big_n: usize,
    resolution: u32,
    budget: u64,
) -> Result<FalsificationReport> {
    if big_n == 0 {
        return Err(Error::Invalid("N = 0 leaves no gap between the windows".into()));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Invalid("need 0 < delta < 1/2".into()));
    }
    if atlas.frame.mu_f <= 0.0 {
        return Err(Error::NotHyperbolic("the stable eigenvalue must be positive".into()));
    }
    let (grid, depth) = check_common(atlas, resolution, budget)?;
    let ctx = Ctx {
        atlas,
        r: resolution,
        eps_f: to_f64(&atlas.eps),
    };
    let st = &atlas.stages[0];
    let x_q = st.radius / 4.0;
    let es = atlas.frame.es;
    let mu = atlas.frame.mu_f;
    // chart images of z_1 + sign mu^l x_Q e_s, computed along the ray so that
    // tiny radii keep their direction
    let ray_target = |sign: f64, l: usize| -> Vec<(f64, f64)> {
        let r = mu.powi(l as i32) * x_q;
        (0..=depth)
            .map(|j| {
                if j == 0 {
                    (sign * r * es[0], sign * r * es[1])
                } else {
                    let rr = st.inner + r * (1.0 - st.inner / st.radius);
                    (sign * rr * es[0], sign * rr * es[1])
                }
            })
            .collect()
    };
    let w1: Vec<Vec<(f64, f64)>> = (0..=big_n + 1).map(|l| ray_target(1.0, l)).collect();
    let w2 = ray_target(-1.0, 2 * big_n + 1);
    let near = delta / (1.0 - delta);
    let side = ctx.side();
    let end = 2 * big_n + 1;

    let rows: Vec<Tally> = (0..side)
        .into_par_iter()
        .map(|a| {
            let mut t = Tally::default();
            for b in 0..side {
                if a == 0 && b == 0 {
                    continue;
                }
                spec_candidate(&ctx, (a, b), &w1, &w2, end, near, delta, &mut t);
            }
            t
        })
        .collect();
    let mut tally = rows.into_iter().fold(Tally::default(), Tally::merge);

    // circle candidates project to z_1, at base distance x_Q from Q(1)
    let dirs = circle_directions(atlas, side);
    let circle = dirs.len() as u64;
    let circle_bound = x_q / (1.0 + x_q);
    for v in &dirs {
        let name = format!("circle direction ({:.6}, {:.6})", v.0.to_f64(), v.1.to_f64());
        if circle_bound > delta {
            tally.exclude("circle_base_far_from_q1", Region::Axis, || CandidateTrace {
                candidate: name,
                reason: "circle_base_far_from_q1".into(),
                steps: vec![],
            });
        } else {
            tally.survive(CandidateTrace {
                candidate: name,
                reason: "circle bound too weak".into(),
                steps: vec![],
            });
        }
    }

    let m = threshold(atlas);
    let mut parameters = BTreeMap::new();
    parameters.insert("delta".into(), delta);
    parameters.insert("N".into(), big_n as f64);
    parameters.insert("x_q".into(), x_q);
    parameters.insert("ball_threshold_m".into(), m);
    parameters.insert("circle_lower_bound".into(), circle_bound);
    let notes = vec![
        format!(
            "targets Q(1), Q(2) = z1 +- {x_q:.6} e_s; windows [0, {}] and {{{end}}}",
            big_n + 1
        ),
        format!(
            "delta = {delta} {} M/4 = {:.6}, so the window-1 ball projects into D1",
            if delta < m / 4.0 { "<" } else { ">=" },
            m / 4.0
        ),
    ];
    Ok(FalsificationReport {
        property: "specification".into(),
        label: EVIDENCE_LABEL.into(),
        resolution,
        depth,
        parameters,
        grid_candidates: grid - 1,
        circle_candidates: circle,
        survivors: tally.survivors,
        survivor_traces: tally.survivor_traces,
        reasons: tally.reasons,
        deciding_regions: tally.deciding,
        hit_steps: tally.hit_steps,
        hit_region_violations: tally.hit_region_violations,
        window1_passes: tally.window1_passes,
        samples: tally.samples,
        notes,
    })
}

#[allow(clippy::too_many_arguments)]
fn spec_candidate(
    ctx: &Ctx<'_>,
    p0: (u64, u64),
    w1: &[Vec<(f64, f64)>],
    w2: &[(f64, f64)],
    end: usize,
    near: f64,
    tol: f64,
    t: &mut Tally,
) {
    let targets = |l: usize| -> &[(f64, f64)] {
        if l < w1.len() {
            &w1[l]
        } else {
            w2
        }
    };
    let mut p = p0;
    for (l, target) in w1.iter().enumerate() {
        let pf = ctx.pos(p);
        let d0 = ctx.atlas.chart_dist(pf, target[0]);
        let hit = d0 < near && ctx.dinf_to(pf, target) < tol + SLACK;
        if !hit {
            let start = l.saturating_sub(TRACE_LEN - 1);
            t.exclude("window1_miss", ctx.region(p), || {
                ctx.trace(p0, start, targets, tol, "window1_miss")
            });
            return;
        }
        t.hit_steps += 1;
        if ctx.sector(p) != Some(Sector::D1) {
            t.hit_region_violations += 1;
        }
        p = ctx.step(p);
    }
    t.window1_passes += 1;
    for _ in w1.len()..end {
        p = ctx.step(p);
    }
    let pf = ctx.pos(p);
    if ctx.dinf_to(pf, w2) >= tol + SLACK {
        t.exclude("window2_miss", ctx.region(p), || {
            ctx.trace(p0, (end + 1).saturating_sub(TRACE_LEN), |_| w2, tol, "window2_miss")
        });
        return;
    }
    t.survive(ctx.trace(
        p0,
        (end + 1).saturating_sub(TRACE_LEN),
        |_| w2,
        tol,
        "survived both windows",
    ));
}

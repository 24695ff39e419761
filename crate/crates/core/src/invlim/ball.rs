//! Projection of small metric balls around `z(1)` and `z(2)`.
//!
//! A point `y` with `dinf(z(1), y) < r` has first-coordinate distance
//! `d_1 < 2r / (1 - 2r)` in the chart `E_1`, where `z(1)` sits at `rho e_s`.
//! The ray through such a chart point makes an angle below `asin(d_1 / rho)`
//! with `e_s`, and base points lie within `2 d_1` of the fixed point.  Hence
//! `M = rho sin(alpha)`, with `alpha` the angle between `e_s` and the sector
//! boundary, is a radius below which the projection stays in `D_1`, and every
//! `r < M/4` works.  The check samples the ball and bisects for the largest
//! passing radius.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dinf, z_target, Atlas, LimPoint};
use crate::error::{Error, Result};
use crate::hyperlocal::Sector;
use crate::rational::{q, to_f64, Q};
use crate::surd::QuadSurd;
use crate::toral::TorusPoint;

/// Resolution `2^-BITS` of sampled base points and directions.
const BITS: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallWitness {
    pub r: f64,
    pub dinf: f64,
    pub base: (f64, f64),
    pub sector: Option<Sector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallCheck {
    pub sign: i32,
    pub r: f64,
    pub drawn: usize,
    /// Samples that landed in the ball.
    pub inside: usize,
    pub violations: usize,
    pub witness: Option<BallWitness>,
}

impl BallCheck {
    /// No sampled ball point projects outside the target sector.  An empty
    /// sample passes vacuously.
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallReport {
    pub sign: i32,
    pub target_sector: Sector,
    /// `rho sin(alpha)`.
    pub m: f64,
    pub m_quarter: f64,
    pub r_star: f64,
    pub bisection_steps: usize,
    pub samples: usize,
    pub at_r_star: BallCheck,
    pub at_m_eighth: BallCheck,
    /// A failing radius found during bisection, with its witness.
    pub above: Option<BallCheck>,
}

impl BallReport {
    pub fn passed(&self) -> bool {
        self.r_star > 0.0 && self.at_r_star.passed() && self.at_r_star.inside > 0 && self.at_m_eighth.passed()
    }
}

/// `M` for the first blown circle.
pub fn threshold(atlas: &Atlas) -> f64 {
    atlas.stages[0].inner * atlas.frame.sector_half_angle().sin()
}

fn target_sector(sign: i32) -> Sector {
    if sign >= 0 {
        Sector::D1
    } else {
        Sector::D3
    }
}

fn round_dyadic(x: f64) -> Q {
    let m = (1u64 << BITS) as f64;
    let k = (x * m).round() as i64;
    q(k, 1i64 << BITS)
}

/// Base point whose first chart image is the plane point `w` (relative to the
/// fixed point), or `None` inside the hole.
fn unchart(atlas: &Atlas, w: (f64, f64)) -> Option<(f64, f64)> {
    let st = &atlas.stages[0];
    let n = w.0.hypot(w.1);
    if n < st.inner {
        return None;
    }
    if n >= st.radius {
        return Some(w);
    }
    let r = (n - st.inner) / (1.0 - st.inner / st.radius);
    Some((w.0 * r / n, w.1 * r / n))
}

/// Samples `B(z(sign), r)` and checks that every sampled point projects into
/// the target sector or onto the fixed point.
pub fn ball_projection_check(atlas: &Atlas, sign: i32, r: f64, samples: usize, seed: u64) -> Result<BallCheck> {
    if !(r > 0.0) {
        return Err(Error::Invalid("r must be positive".into()));
    }
    let depth = atlas.depth();
    let z = z_target(atlas, sign, depth)?;
    let st = &atlas.stages[0];
    let es = atlas.frame.es;
    let sg = if sign >= 0 { 1.0 } else { -1.0 };
    let centre = (sg * st.inner * es[0], sg * st.inner * es[1]);
    // d_1 bound implied by dinf < r, padded so the ball boundary is sampled
    let d1 = if r < 0.5 {
        2.0 * r / (1.0 - 2.0 * r)
    } else {
        f64::INFINITY
    };
    let spread = (1.05 * d1).min(0.75);
    let arc = if spread >= 2.0 * st.inner {
        std::f64::consts::PI
    } else {
        2.0 * (spread / (2.0 * st.inner)).asin()
    };
    let eps_f = to_f64(&atlas.eps);
    let target = target_sector(sign);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BallCheck {
        sign,
        r,
        drawn: 0,
        inside: 0,
        violations: 0,
        witness: None,
    };
    for i in 0..samples {
        out.drawn += 1;
        // one in eight samples lies on the blown circle itself
        let y = if i % 8 == 7 {
            let phi = rng.gen_range(-arc..=arc);
            let (c, s) = (phi.cos(), phi.sin());
            let dx = sg * (c * es[0] - s * es[1]);
            let dy = sg * (s * es[0] + c * es[1]);
            let dir = (
                QuadSurd::rational(round_dyadic(dx)),
                QuadSurd::rational(round_dyadic(dy)),
            );
            match LimPoint::on_circle(atlas, 1, 0, dir, depth) {
                Ok(y) => y,
                Err(_) => continue,
            }
        } else {
            let rad = spread * rng.gen::<f64>().sqrt();
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let w = (centre.0 + rad * phi.cos(), centre.1 + rad * phi.sin());
            let Some(p) = unchart(atlas, w) else { continue };
            let (x, y) = (round_dyadic(p.0), round_dyadic(p.1));
            if x == q(0, 1) && y == q(0, 1) {
                continue;
            }
            match LimPoint::from_base(atlas, TorusPoint::new(x, y), depth) {
                Ok(y) => y,
                Err(_) => continue,
            }
        };
        let d = dinf(atlas, &z, &y)?.value;
        if d >= r {
            continue;
        }
        out.inside += 1;
        let p = y.project0();
        if p == atlas.z1() {
            continue;
        }
        let lift = || (lift_q(&p.x), lift_q(&p.y));
        let pf = (super::wrap(to_f64(&p.x)), super::wrap(to_f64(&p.y)));
        let sector = atlas.frame.sector(pf, lift, &atlas.eps, eps_f);
        if sector != Some(target) {
            out.violations += 1;
            if out.witness.is_none() {
                out.witness = Some(BallWitness {
                    r,
                    dinf: d,
                    base: pf,
                    sector,
                });
            }
        }
    }
    Ok(out)
}

/// Lift of a coordinate in `[0, 1)` to `[-1/2, 1/2)`.
fn lift_q(x: &Q) -> Q {
    if *x >= q(1, 2) {
        x - q(1, 1)
    } else {
        x.clone()
    }
}

/// Bisects `(0, 1/2]` for the largest radius whose sampled ball projects
/// into the target sector.
pub fn ball_projection_search(atlas: &Atlas, sign: i32, samples: usize, seed: u64, steps: usize) -> Result<BallReport> {
    let m = threshold(atlas);
    let mut lo = 0.0f64;
    let mut hi = 0.5f64;
    let mut above = None;
    let empty = BallCheck {
        sign,
        r: 0.0,
        drawn: 0,
        inside: 0,
        violations: 0,
        witness: None,
    };
    let mut at_r_star = empty;
    let top = ball_projection_check(atlas, sign, hi, samples, seed)?;
    if top.passed() {
        lo = hi;
        at_r_star = top;
    } else {
        above = Some(top);
        for k in 0..steps {
            let mid = 0.5 * (lo + hi);
            let c = ball_projection_check(atlas, sign, mid, samples, seed.wrapping_add(k as u64 + 1))?;
            if c.passed() {
                lo = mid;
                at_r_star = c;
            } else {
                hi = mid;
                above = Some(c);
            }
        }
    }
    let at_m_eighth = ball_projection_check(atlas, sign, m / 8.0, samples, seed ^ 0xe1e1)?;
    Ok(BallReport {
        sign,
        target_sector: target_sector(sign),
        m,
        m_quarter: m / 4.0,
        r_star: lo,
        bisection_steps: steps,
        samples,
        at_r_star,
        at_m_eighth,
        above,
    })
}

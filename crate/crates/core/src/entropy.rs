//! Entropy: the Bernoulli formula, realization of any positive value by a
//! Bernoulli shift, and finite-window spanning-set estimates.
//!
//! Spanning estimates are finite proxies for `limsup log r_n(eps, K) / n`.
//! Reports carry both the raw ratios and the value derived from them.

use std::collections::HashSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chamanara::{baker, class_members, factor_map, CnPoint, Direction};
use crate::error::{Error, Result};
use crate::quotient::{canonicalize_q, fiber, induced_apply, QnPoint};
use crate::rational::{to_f64, Q};
use crate::symbolic::{BiSequence, ProbabilityVector};
use crate::toral::{Step, ToralAuto, TorusPoint};

/// `-sum p_i log p_i` with `0 log 0 = 0`.
pub fn bernoulli_entropy(p: &ProbabilityVector) -> f64 {
    -p.to_f64()
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| x * x.ln())
        .sum::<f64>()
}

/// Entropy of `(1 - t, t/(N-1), ..., t/(N-1))`.
pub fn family_entropy(n: usize, t: f64) -> f64 {
    let mut h = 0.0;
    if t < 1.0 {
        h -= (1.0 - t) * (1.0 - t).ln();
    }
    if t > 0.0 {
        h -= t * (t / (n - 1) as f64).ln();
    }
    h
}

fn family_vector(n: usize, t: &Q) -> ProbabilityVector {
    let one = Q::from_integer(1.into());
    let rest = t / Q::from_integer(BigInt::from(n - 1));
    let mut v = vec![&one - t];
    v.extend(std::iter::repeat_n(rest, n - 1));
    ProbabilityVector::new(v).expect("family members are probability vectors")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub target: f64,
    pub n: usize,
    pub p: ProbabilityVector,
    pub achieved: f64,
    pub error: f64,
    pub bisection_steps: usize,
}

/// A Bernoulli shift on `N` symbols with entropy within `tol` of `h`.
///
/// `N` is the smallest integer `>= 2` with `h <= log N`; the family
/// `P(t) = (1 - t, t/(N-1), ...)` has entropy increasing from 0 to `log N` on
/// `t in [0, (N-1)/N]`, so bisection on dyadic `t` finds an exact rational
/// vector.
pub fn realize_entropy(h: f64, tol: f64) -> Result<Realization> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Invalid(format!(
            "target entropy {h} must be positive and finite"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance {tol} must be positive")));
    }
    let mut n = 2usize;
    while (n as f64).ln() < h {
        n += 1;
    }
    let top = (n as f64).ln();
    if (top - h).abs() <= tol {
        let p = ProbabilityVector::uniform(n);
        let achieved = bernoulli_entropy(&p);
        return Ok(Realization {
            target: h,
            n,
            error: (achieved - h).abs(),
            p,
            achieved,
            bisection_steps: 0,
        });
    }
    // dyadic bisection on [0, (N-1)/N]
    let t_max = Q::new(BigInt::from(n - 1), BigInt::from(n));
    let mut lo = Q::from_integer(0.into());
    let mut hi = t_max;
    let two = Q::from_integer(2.into());
    let mut steps = 0;
    loop {
        let mid = (&lo + &hi) / &two;
        let v = family_entropy(n, to_f64(&mid));
        steps += 1;
        if (v - h).abs() <= tol / 4.0 || steps >= 200 {
            let p = family_vector(n, &mid);
            let achieved = bernoulli_entropy(&p);
            let error = (achieved - h).abs();
            if error > tol {
                return Err(Error::Invalid(format!(
                    "bisection stalled at error {error:e} for target {h}"
                )));
            }
            return Ok(Realization {
                target: h,
                n,
                p,
                achieved,
                error,
                bisection_steps: steps,
            });
        }
        if v < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    SpanningEstimate,
}

/// Spanning numbers `r_n(eps, K)` for one window `n`: exact when the two
/// certified bounds meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningBounds {
    pub window: usize,
    pub lower: usize,
    pub upper: usize,
}

impl SpanningBounds {
    pub fn exact(&self) -> Option<usize> {
        (self.lower == self.upper).then_some(self.lower)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub system: String,
    pub method: Method,
    pub value: f64,
    pub eps: Option<f64>,
    pub windows: Vec<usize>,
    pub spanning: Vec<SpanningBounds>,
    /// `log r_n / n` (upper bounds) per window.
    pub raw_ratios: Vec<f64>,
    /// `(log r_n - log r_prev) / (n - prev)` per consecutive window pair.
    pub increments: Vec<f64>,
    pub note: String,
}

pub const ESTIMATE_NOTE: &str = "finite-window proxy for limsup log r_n / n: value is the largest \
increment slope over the last half of the window schedule; not the true entropy";

impl EntropyReport {
    pub fn closed_form(system: &str, value: f64, note: &str) -> Self {
        EntropyReport {
            system: system.to_string(),
            method: Method::ClosedForm,
            value,
            eps: None,
            windows: Vec::new(),
            spanning: Vec::new(),
            raw_ratios: Vec::new(),
            increments: Vec::new(),
            note: note.to_string(),
        }
    }

    fn from_bounds(system: &str, eps: f64, spanning: Vec<SpanningBounds>) -> Self {
        let windows: Vec<usize> = spanning.iter().map(|s| s.window).collect();
        let raw_ratios = spanning
            .iter()
            .map(|s| {
                if s.window == 0 {
                    0.0
                } else {
                    (s.upper as f64).ln() / s.window as f64
                }
            })
            .collect();
        let increments: Vec<f64> = spanning
            .windows(2)
            .map(|w| ((w[1].upper as f64).ln() - (w[0].upper as f64).ln()) / (w[1].window - w[0].window) as f64)
            .collect();
        let tail = &increments[increments.len() / 2..];
        let value = tail.iter().copied().fold(0.0f64, f64::max);
        EntropyReport {
            system: system.to_string(),
            method: Method::SpanningEstimate,
            value,
            eps: Some(eps),
            windows,
            spanning,
            raw_ratios,
            increments,
            note: ESTIMATE_NOTE.to_string(),
        }
    }
}

pub fn bernoulli_report(p: &ProbabilityVector) -> EntropyReport {
    EntropyReport::closed_form(
        &format!("bernoulli shift on {} symbols", p.len()),
        bernoulli_entropy(p),
        "-sum p_i log p_i",
    )
}

pub fn toral_report(a: &ToralAuto) -> EntropyReport {
    EntropyReport::closed_form(
        &format!("toral automorphism {:?}", a.m),
        a.entropy(),
        &format!("log of the leading eigenvalue {}", a.leading_eigenvalue()),
    )
}

/// Floating tolerance applied in the safe direction of each bound.
const SLACK: f64 = 1e-9;

fn bowen_close<P>(a: &[P], b: &[P], r: f64, dist: &(impl Fn(&P, &P) -> f64 + Sync)) -> bool {
    a.iter().zip(b).all(|(x, y)| dist(x, y) <= r)
}

/// Certified bounds on `r_n(eps, K)` from precomputed orbit segments
/// `orbits[i] = (x_i, T x_i, ..., T^{n-1} x_i)`.
///
/// The upper bound is a greedy cover with centres in `K`; the lower bound is
/// the size of a greedy `(n, 2 eps)`-separated subset of `K`, since no
/// `eps`-ball meets two such points.
pub fn spanning_bounds<P: Sync>(
    orbits: &[Vec<P>],
    window: usize,
    eps: f64,
    dist: &(impl Fn(&P, &P) -> f64 + Sync),
) -> SpanningBounds {
    if orbits.is_empty() {
        return SpanningBounds {
            window,
            lower: 0,
            upper: 0,
        };
    }
    let seg = |i: usize| &orbits[i][..window];
    // greedy cover
    let mut covered = vec![false; orbits.len()];
    let mut upper = 0;
    for i in 0..orbits.len() {
        if covered[i] {
            continue;
        }
        upper += 1;
        let ci = seg(i);
        let hits: Vec<usize> = (i..orbits.len())
            .into_par_iter()
            .filter(|&j| !covered[j] && bowen_close(ci, seg(j), eps * (1.0 - SLACK), dist))
            .collect();
        for j in hits {
            covered[j] = true;
        }
        covered[i] = true;
    }
    // greedy separated set at scale 2 eps
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..orbits.len() {
        let si = seg(i);
        let sep = chosen
            .par_iter()
            .all(|&c| !bowen_close(si, seg(c), 2.0 * eps * (1.0 + SLACK), dist));
        if sep {
            chosen.push(i);
        }
    }
    SpanningBounds {
        window,
        lower: chosen.len().min(upper),
        upper,
    }
}

/// Generic spanning estimate over a window schedule.
pub fn spanning_estimate<P: Sync>(
    system: &str,
    orbits: &[Vec<P>],
    windows: &[usize],
    eps: f64,
    dist: &(impl Fn(&P, &P) -> f64 + Sync),
) -> Result<EntropyReport> {
    check_schedule(windows, orbits.iter().map(Vec::len).min().unwrap_or(0))?;
    let spanning = windows.iter().map(|&w| spanning_bounds(orbits, w, eps, dist)).collect();
    Ok(EntropyReport::from_bounds(system, eps, spanning))
}

fn check_schedule(windows: &[usize], available: usize) -> Result<()> {
    if windows.len() < 2 {
        return Err(Error::Invalid("window schedule needs at least two entries".into()));
    }
    if windows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("window schedule must be increasing".into()));
    }
    if *windows.last().unwrap() > available {
        return Err(Error::Invalid("window exceeds computed orbit length".into()));
    }
    Ok(())
}

/// Orbit segments of length `len` under `step`.
pub fn orbits<P: Clone + Send + Sync>(k: &[P], len: usize, step: &(impl Fn(&P) -> P + Sync)) -> Vec<Vec<P>> {
    k.par_iter()
        .map(|x| {
            let mut v = Vec::with_capacity(len);
            let mut cur = x.clone();
            for _ in 0..len {
                let next = step(&cur);
                v.push(cur);
                cur = next;
            }
            v
        })
        .collect()
}

/// Exact `r_n(2^-k, Per_P)` for the full shift on `n_sym` symbols, with `K`
/// the points of period `P`.  In the ultrametric the closed Bowen balls of
/// radius `2^-k` are the cylinders fixing indices `-k < i <= n - 1 + k`, so
/// the count of distinct such blocks over `K` is the minimum.
pub fn shift_spanning_periodic(n_sym: u32, period: usize, window: usize, k: usize) -> Result<SpanningBounds> {
    let total = (n_sym as u64)
        .checked_pow(period as u32)
        .filter(|&t| t <= crate::symbolic::PERIODIC_CAP)
        .ok_or_else(|| Error::ResourceCap(format!("{n_sym}^{period} periodic points")))?;
    if window == 0 {
        return Ok(SpanningBounds {
            window,
            lower: 1,
            upper: 1,
        });
    }
    let lo = 1 - k as i64;
    let hi = window as i64 - 1 + k as i64;
    let blocks: HashSet<Vec<u8>> = (0..total)
        .into_par_iter()
        .map(|code| {
            let word = decode(code, n_sym, period);
            (lo..=hi)
                .map(|i| word[(i - 1).rem_euclid(period as i64) as usize])
                .collect::<Vec<u8>>()
        })
        .collect();
    Ok(SpanningBounds {
        window,
        lower: blocks.len(),
        upper: blocks.len(),
    })
}

fn decode(mut code: u64, n: u32, len: usize) -> Vec<u8> {
    let mut w = vec![0u8; len];
    for d in w.iter_mut().rev() {
        *d = (code % n as u64) as u8;
        code /= n as u64;
    }
    w
}

/// Estimate for the full shift at `eps = 2^-k` using periodic points long
/// enough that every block of the largest window occurs.
pub fn shift_estimate(n_sym: u32, windows: &[usize], k: usize) -> Result<EntropyReport> {
    check_schedule(windows, usize::MAX)?;
    let period = windows.last().unwrap() + 2 * k - 1;
    let spanning = windows
        .iter()
        .map(|&w| shift_spanning_periodic(n_sym, period, w, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyReport::from_bounds(
        &format!("full shift on {n_sym} symbols"),
        0.5f64.powi(k as i32),
        spanning,
    ))
}

/// The identity map on a grid of `size` points of the unit interval.
pub fn identity_estimate(size: usize, windows: &[usize], eps: f64) -> Result<EntropyReport> {
    let k: Vec<f64> = (0..size).map(|i| i as f64 / size as f64).collect();
    let len = *windows.last().unwrap_or(&0);
    let orb = orbits(&k, len, &|x: &f64| *x);
    spanning_estimate("identity on [0,1]", &orb, windows, eps, &|a: &f64, b: &f64| {
        (a - b).abs()
    })
}

/// Class members in floating point, enough of the singular family that the
/// minimum distance is attained to within `2^-60`.
fn members_f64(z: &CnPoint) -> Vec<(f64, f64)> {
    let limit = if z.is_singular() { 4 + 4 * 60 } else { 2 };
    class_members(z, limit)
        .iter()
        .map(|(x, y)| (to_f64(x), to_f64(y)))
        .collect()
}

fn min_member_dist(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut best = f64::INFINITY;
    for p in a {
        for q in b {
            let d = (p.0 - q.0).hypot(p.1 - q.1);
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Report triple for the factor chain `Sigma_n -> C_n -> Q_n` on the
/// period-`period` points, at shift scale `2^-k`.  The baker and quotient
/// systems use `eps = sqrt(2) 2^-k`, since sequences agreeing on
/// `-k < i <= k` have factor images within that distance.
pub fn factor_chain(n: u32, period: usize, windows: &[usize], k: usize) -> Result<[EntropyReport; 3]> {
    let len = *windows.last().ok_or_else(|| Error::Invalid("empty schedule".into()))?;
    let seqs = crate::symbolic::enumerate_periodic(n, period, 1 << 16)?;
    let sigma = EntropyReport::from_bounds(
        &format!("full shift on {n} symbols, period-{period} points"),
        0.5f64.powi(k as i32),
        windows
            .iter()
            .map(|&w| shift_spanning_periodic(n, period, w, k))
            .collect::<Result<Vec<_>>>()?,
    );
    let eps = std::f64::consts::SQRT_2 * 0.5f64.powi(k as i32);

    let cn: Vec<CnPoint> = seqs.iter().map(factor_map).collect();
    let c_orbits: Vec<Vec<CnPoint>> = orbits(&cn, len, &|z: &CnPoint| baker(z, Direction::Forward));
    let c_emb: Vec<Vec<Vec<(f64, f64)>>> = c_orbits
        .par_iter()
        .map(|o| o.iter().map(members_f64).collect())
        .collect();
    let c_report = spanning_estimate(&format!("{n}-baker map on C_{n}"), &c_emb, windows, eps, &|a: &Vec<
        (f64, f64),
    >,
                                                                                                 b: &Vec<
        (f64, f64),
    >| {
        min_member_dist(a, b)
    })?;

    let qn: Vec<QnPoint> = cn.iter().map(canonicalize_q).collect();
    let q_orbits: Vec<Vec<QnPoint>> = orbits(&qn, len, &|p: &QnPoint| {
        induced_apply(p, Direction::Forward).expect("induced map is well defined")
    });
    let q_emb: Vec<Vec<Vec<(f64, f64)>>> = q_orbits
        .par_iter()
        .map(|o| {
            o.iter()
                .map(|p| fiber(p).iter().flat_map(members_f64).collect())
                .collect()
        })
        .collect();
    let q_report = spanning_estimate(
        &format!("induced map T_{n} on Q_{n}"),
        &q_emb,
        windows,
        eps,
        &|a: &Vec<(f64, f64)>, b: &Vec<(f64, f64)>| min_member_dist(a, b),
    )?;
    Ok([sigma, c_report, q_report])
}

/// Toral automorphism on the `1/q` grid with the flat torus metric.
pub fn toral_estimate(a: &ToralAuto, qd: u64, windows: &[usize], eps: f64) -> Result<EntropyReport> {
    let len = *windows.last().unwrap_or(&0);
    let k: Vec<(u64, u64)> = (0..qd).flat_map(|i| (0..qd).map(move |j| (i, j))).collect();
    let orb = orbits(&k, len, &|p: &(u64, u64)| a.apply_grid(*p, qd, Step::Forward));
    let qf = qd as f64;
    let dist = |u: &(u64, u64), v: &(u64, u64)| {
        let w = |s: u64, t: u64| {
            let d = (s as f64 - t as f64).abs() / qf;
            d.min(1.0 - d)
        };
        w(u.0, v.0).hypot(w(u.1, v.1))
    };
    let mut rep = spanning_estimate(
        &format!("toral automorphism {:?} on the 1/{qd} grid", a.m),
        &orb,
        windows,
        eps,
        &dist,
    )?;
    // once every grid orbit is separated the count stops growing; later windows carry no information
    if let Some(sat) = rep.spanning.iter().position(|s| s.lower == orb.len()) {
        let keep = (sat + 1).max(2);
        if keep < rep.spanning.len() {
            let note = format!(
                "{}; truncated at window {} where all grid orbits are separated",
                rep.note, rep.windows[sat]
            );
            rep = EntropyReport::from_bounds(&rep.system, eps, rep.spanning[..keep].to_vec());
            rep.note = note;
        }
    }
    Ok(rep)
}

/// Torus distance between exact points, as `f64`.
pub fn torus_dist(a: &TorusPoint, b: &TorusPoint) -> f64 {
    let (ax, ay) = a.to_f64();
    let (bx, by) = b.to_f64();
    let w = |d: f64| {
        let d = d.abs();
        d.min(1.0 - d)
    };
    w(ax - bx).hypot(w(ay - by))
}

/// Shift-distance between two sequences as `f64`.
pub fn shift_dist(a: &BiSequence, b: &BiSequence) -> f64 {
    a.dist(b).map(|d| to_f64(&d)).unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn bernoulli_examples() {
        let p = ProbabilityVector::new(vec![q(1, 2), q(1, 2)]).unwrap();
        assert!((bernoulli_entropy(&p) - 2f64.ln()).abs() < 1e-15);
        let d = ProbabilityVector::new(vec![q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(bernoulli_entropy(&d), 0.0);
        assert!((bernoulli_entropy(&ProbabilityVector::uniform(3)) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn realize_examples() {
        let r = realize_entropy(3f64.ln(), 1e-9).unwrap();
        assert_eq!(r.n, 3);
        assert_eq!(r.p, ProbabilityVector::uniform(3));
        let r = realize_entropy(0.01, 1e-9).unwrap();
        assert_eq!(r.n, 2);
        assert!(r.error <= 1e-9);
        let r = realize_entropy(5.0, 1e-9).unwrap();
        assert_eq!(r.n, 149);
        assert!(r.error <= 1e-9);
        assert!(realize_entropy(-1.0, 1e-9).is_err());
    }

    #[test]
    fn window_zero_and_fixed_point() {
        let k = vec![0.5f64];
        let orb = orbits(&k, 5, &|x: &f64| *x);
        for w in 0..5 {
            let b = spanning_bounds(&orb, w, 0.1, &|a: &f64, b: &f64| (a - b).abs());
            assert_eq!((b.lower, b.upper), (1, 1));
        }
        let k: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let orb = orbits(&k, 1, &|x: &f64| *x);
        let b = spanning_bounds(&orb, 0, 0.01, &|a: &f64, b: &f64| (a - b).abs());
        assert_eq!(b.upper, 1);
    }

    #[test]
    fn shift_counts_match_cylinders() {
        // 2^{n + 2k - 1} blocks once the period covers the block length
        for (w, k) in [(1, 1), (3, 2), (5, 1)] {
            let p = w + 2 * k - 1;
            let b = shift_spanning_periodic(2, p, w, k).unwrap();
            assert_eq!(b.exact(), Some(1 << p));
        }
    }

    #[test]
    fn identity_has_zero_estimate() {
        let r = identity_estimate(50, &[1, 2, 3, 4], 0.05).unwrap();
        assert_eq!(r.value, 0.0);
    }
}

//! The n-Chamanara surface `C_n` as canonical equivalence classes of the closed
//! unit square, the n-baker map acting on classes, and the symbolic factor map
//! from the full shift.
//!
//! Side identifications: for `k >= 1` the segment `I_k = {0} x (n^-k, n^{1-k})`
//! is glued to `I_k' = {1} x (1 - n^{1-k}, 1 - n^-k)` by the vertical
//! translation `y -> y + c_k` with `c_k = 1 - n^{1-k} - n^-k`, and likewise
//! `J_k` (on `y = 0`) to `J_k'` (on `y = 1`) horizontally.  The corners and the
//! points `(0, n^-k)`, `(n^-k, 0)`, `(1, 1 - n^-k)`, `(1 - n^-k, 1)` form the
//! single singular class.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::digits::DigitNumber;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, pow, to_f64, Q};
use crate::symbolic::{enumerate_periodic, periodic_from_word, BiSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k", rename_all = "snake_case")]
pub enum ClassKind {
    Interior,
    SideI(u32),
    SideJ(u32),
    Singular,
}

/// Canonical representative of a point of `C_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnPoint {
    pub base: u32,
    pub kind: ClassKind,
    pub x: Q,
    pub y: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Where `t in (0, 1)` sits relative to the geometric partition
/// `(n^-k, n^{1-k})`.
enum Level {
    Open(u32),
    Endpoint,
}

fn level(n: u32, t: &Q) -> Level {
    debug_assert!(t > &Q::zero() && t < &Q::one());
    // compare a n^k with b for t = a / b
    let nb = BigInt::from(n);
    let mut scaled = t.numer() * &nb;
    let mut k = 1u32;
    loop {
        match scaled.cmp(t.denom()) {
            Ordering::Greater => return Level::Open(k),
            Ordering::Equal => return Level::Endpoint,
            Ordering::Less => {
                scaled *= &nb;
                k += 1;
            }
        }
    }
}

/// Translation `c_k = 1 - n^{1-k} - n^-k` taking `I_k` to `I_k'`.
pub fn side_shift(n: u32, k: u32) -> Q {
    Q::one() - pow(n, 1 - k as i32) - pow(n, -(k as i32))
}

impl CnPoint {
    pub fn singular(base: u32) -> Self {
        CnPoint {
            base,
            kind: ClassKind::Singular,
            x: Q::zero(),
            y: Q::zero(),
        }
    }

    pub fn is_singular(&self) -> bool {
        self.kind == ClassKind::Singular
    }

    /// Lexicographic order on `(x, y)`; the singular class sorts first.
    pub fn key_cmp(&self, other: &Self) -> Ordering {
        (&self.x, &self.y).cmp(&(&other.x, &other.y))
    }

    pub fn x_digits(&self) -> DigitNumber {
        DigitNumber::from_q(&self.x, self.base).expect("coordinates lie in [0, 1]")
    }

    pub fn y_digits(&self) -> DigitNumber {
        DigitNumber::from_q(&self.y, self.base).expect("coordinates lie in [0, 1]")
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }
}

impl PartialOrd for CnPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CnPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
            .then(self.kind.cmp(&other.kind))
            .then(self.base.cmp(&other.base))
    }
}

impl fmt::Display for CnPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ClassKind::Singular => write!(f, "[singular]_{}", self.base),
            _ => write!(f, "[({}, {})]_{}", fmt_q(&self.x), fmt_q(&self.y), self.base),
        }
    }
}

/// Canonical class of `(x, y) in [0, 1]^2`.
pub fn canonicalize(n: u32, x: &Q, y: &Q) -> Result<CnPoint> {
    if n < 2 {
        return Err(Error::BadBase(n));
    }
    let zero = Q::zero();
    let one = Q::one();
    for t in [x, y] {
        if t < &zero || t > &one {
            return Err(Error::OutOfUnitInterval(fmt_q(t)));
        }
    }
    let x_edge = x.is_zero() || x.is_one();
    let y_edge = y.is_zero() || y.is_one();
    if !x_edge && !y_edge {
        return Ok(CnPoint {
            base: n,
            kind: ClassKind::Interior,
            x: x.clone(),
            y: y.clone(),
        });
    }
    if x_edge && y_edge {
        return Ok(CnPoint::singular(n));
    }
    if x_edge {
        // vertical sides
        if x.is_zero() {
            match level(n, y) {
                Level::Endpoint => Ok(CnPoint::singular(n)),
                Level::Open(k) => Ok(CnPoint {
                    base: n,
                    kind: ClassKind::SideI(k),
                    x: zero,
                    y: y.clone(),
                }),
            }
        } else {
            match level(n, &(&one - y)) {
                Level::Endpoint => Ok(CnPoint::singular(n)),
                Level::Open(k) => Ok(CnPoint {
                    base: n,
                    kind: ClassKind::SideI(k),
                    x: zero,
                    y: y - side_shift(n, k),
                }),
            }
        }
    } else if y.is_zero() {
        match level(n, x) {
            Level::Endpoint => Ok(CnPoint::singular(n)),
            Level::Open(k) => Ok(CnPoint {
                base: n,
                kind: ClassKind::SideJ(k),
                x: x.clone(),
                y: zero,
            }),
        }
    } else {
        match level(n, &(&one - x)) {
            Level::Endpoint => Ok(CnPoint::singular(n)),
            Level::Open(k) => Ok(CnPoint {
                base: n,
                kind: ClassKind::SideJ(k),
                x: x - side_shift(n, k),
                y: zero,
            }),
        }
    }
}

/// Canonical class of a digit-pair point.
pub fn canonicalize_digits(x: &DigitNumber, y: &DigitNumber) -> Result<CnPoint> {
    if x.base() != y.base() {
        return Err(Error::BaseMismatch(x.base(), y.base()));
    }
    canonicalize(x.base(), &x.to_rational(), &y.to_rational())
}

/// Members of the class in the closed square.  The singular class is
/// countable; only its first `limit` members are listed, in the order
/// `(0,0), (1,1), (1,0), (0,1)` followed by
/// `(0, n^-k), (n^-k, 0), (1, 1 - n^-k), (1 - n^-k, 1)` for `k = 1, 2, ...`.
pub fn class_members(z: &CnPoint, limit: usize) -> Vec<(Q, Q)> {
    let n = z.base;
    match z.kind {
        ClassKind::Interior => vec![(z.x.clone(), z.y.clone())],
        ClassKind::SideI(k) => vec![(Q::zero(), z.y.clone()), (Q::one(), &z.y + side_shift(n, k))],
        ClassKind::SideJ(k) => vec![(z.x.clone(), Q::zero()), (&z.x + side_shift(n, k), Q::one())],
        ClassKind::Singular => {
            let mut out = vec![
                (Q::zero(), Q::zero()),
                (Q::one(), Q::one()),
                (Q::one(), Q::zero()),
                (Q::zero(), Q::one()),
            ];
            let mut k = 1;
            while out.len() < limit {
                let t = pow(n, -k);
                let s = Q::one() - &t;
                out.push((Q::zero(), t.clone()));
                out.push((t, Q::zero()));
                out.push((Q::one(), s.clone()));
                out.push((s, Q::one()));
                k += 1;
            }
            out.truncate(limit);
            out
        }
    }
}

/// Strip indices `k` (1-based) whose closed strip `[(k-1)/n, k/n]` contains `t`.
fn strips(n: u32, t: &Q) -> Vec<u32> {
    let scaled = t.numer() * BigInt::from(n);
    let (k, r) = scaled.div_rem(t.denom());
    let k: u32 = k.try_into().unwrap_or(n);
    if r.is_zero() {
        // on a strip boundary: both neighbours (when they exist)
        let mut v = Vec::new();
        if k >= 1 {
            v.push(k);
        }
        if k < n {
            v.push(k + 1);
        }
        v
    } else {
        vec![k + 1]
    }
}

/// `(a n - c) / b` for `t = a / b`, reduced once.
fn expand(t: &Q, n: u32, c: u32) -> Q {
    let num = t.numer() * BigInt::from(n) - t.denom() * BigInt::from(c);
    Q::new(num, t.denom().clone())
}

/// `(t + c) / n`, reduced once.
fn contract(t: &Q, n: u32, c: u32) -> Q {
    let num = t.numer() + t.denom() * BigInt::from(c);
    Q::new(num, t.denom() * BigInt::from(n))
}

/// Branch `k` of the baker map on the closed strip `[(k-1)/n, k/n] x [0, 1]`.
pub fn baker_branch(n: u32, k: u32, x: &Q, y: &Q) -> (Q, Q) {
    (expand(x, n, k - 1), contract(y, n, k - 1))
}

/// Branch `k` of the inverse on `[0, 1] x [(k-1)/n, k/n]`.
pub fn baker_inverse_branch(n: u32, k: u32, x: &Q, y: &Q) -> (Q, Q) {
    (contract(x, n, k - 1), expand(y, n, k - 1))
}

/// The baker map on a single point of the closed square, using the strip that
/// contains `x` (the left strip on interior boundaries).
pub fn baker_point(n: u32, x: &Q, y: &Q, dir: Direction) -> (Q, Q) {
    match dir {
        Direction::Forward => baker_branch(n, strips(n, x)[0], x, y),
        Direction::Inverse => baker_inverse_branch(n, strips(n, y)[0], x, y),
    }
}

/// Class-level baker map (or its inverse).  The singular class is fixed.
pub fn baker(z: &CnPoint, dir: Direction) -> CnPoint {
    if z.is_singular() {
        return z.clone();
    }
    let (x, y) = baker_point(z.base, &z.x, &z.y, dir);
    canonicalize(z.base, &x, &y).expect("baker maps the square into itself")
}

pub fn baker_iter(z: &CnPoint, steps: i64) -> CnPoint {
    let dir = if steps >= 0 {
        Direction::Forward
    } else {
        Direction::Inverse
    };
    let mut w = z.clone();
    for _ in 0..steps.unsigned_abs() {
        w = baker(&w, dir);
    }
    w
}

/// Applies every applicable branch to every listed member and checks that all
/// images fall in one class.  Returns that class.
pub fn baker_memberwise(z: &CnPoint, dir: Direction, singular_limit: usize) -> Result<CnPoint> {
    let n = z.base;
    let mut image: Option<CnPoint> = None;
    for (x, y) in class_members(z, singular_limit) {
        let ks = match dir {
            Direction::Forward => strips(n, &x),
            Direction::Inverse => strips(n, &y),
        };
        for k in ks {
            let (u, v) = match dir {
                Direction::Forward => baker_branch(n, k, &x, &y),
                Direction::Inverse => baker_inverse_branch(n, k, &x, &y),
            };
            let c = canonicalize(n, &u, &v)?;
            match &image {
                None => image = Some(c),
                Some(prev) if prev == &c => {}
                Some(prev) => {
                    return Err(Error::WellDefinedness(format!(
                        "{z}: member ({}, {}) branch {k} lands in {c}, expected {prev}",
                        fmt_q(&x),
                        fmt_q(&y)
                    )))
                }
            }
        }
    }
    Ok(image.expect("every class has a member"))
}

/// `P_n(... b2 b1 ; a1 a2 ...) = [(0.a1 a2 ..., 0.b1 b2 ...)]`.
pub fn factor_map(s: &BiSequence) -> CnPoint {
    let (x, y) = s.coordinates();
    canonicalize(s.base, &x, &y).expect("digit values lie in [0, 1]")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiconjugacyCheck {
    pub holds: bool,
    /// `P_n(shift(s))`
    pub factor_of_shift: CnPoint,
    /// `B_n(P_n(s))`
    pub baker_of_factor: CnPoint,
}

pub fn check_semiconjugacy(s: &BiSequence) -> SemiconjugacyCheck {
    let lhs = factor_map(&s.shift());
    let rhs = baker(&factor_map(s), Direction::Forward);
    SemiconjugacyCheck {
        holds: lhs == rhs,
        factor_of_shift: lhs,
        baker_of_factor: rhs,
    }
}

/// Number of singular-class members used when a distance or member-wise check
/// needs a finite listing.
pub const SINGULAR_LISTING: usize = 64;

/// Squared distance `min |p - q|^2` over listed class members.
pub fn dist_sq(z: &CnPoint, w: &CnPoint) -> Q {
    let a = class_members(z, singular_listing_for(z, w));
    let b = class_members(w, singular_listing_for(w, z));
    let mut best: Option<Q> = None;
    for (x1, y1) in &a {
        for (x2, y2) in &b {
            let dx = x1 - x2;
            let dy = y1 - y2;
            let d = &dx * &dx + &dy * &dy;
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
        }
    }
    best.expect("classes are non-empty")
}

/// Enough singular members that the minimum distance to the other class is
/// attained: past `n^-k < t/2` for every positive coordinate `t` of `other`,
/// the listed points only move toward the corners already included.
fn singular_listing_for(z: &CnPoint, other: &CnPoint) -> usize {
    if !z.is_singular() {
        return 2;
    }
    if other.is_singular() {
        return 4;
    }
    let mut m: Option<Q> = None;
    for (x, y) in class_members(other, 2) {
        for t in [x.clone(), y.clone(), Q::one() - &x, Q::one() - &y] {
            if t > Q::zero() && m.as_ref().is_none_or(|m| &t < m) {
                m = Some(t);
            }
        }
    }
    let m = m.unwrap_or_else(Q::one) / Q::from_integer(2.into());
    let mut k = 0usize;
    let nq = Q::from_integer(z.base.into());
    let mut t = Q::one();
    while t >= m {
        t /= &nq;
        k += 1;
    }
    4 + 4 * (k + 1)
}

/// Smallest `p <= max_period` with `B^p(z) = z`.
pub fn baker_period(z: &CnPoint, max_period: usize) -> Option<usize> {
    let mut w = z.clone();
    for p in 1..=max_period {
        w = baker(&w, Direction::Forward);
        if &w == z {
            return Some(p);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicWitness {
    pub point: CnPoint,
    pub period: usize,
    pub sequence: Option<BiSequence>,
}

/// A `B_n`-periodic class within distance `eps` (strictly) of `center`, found
/// by coding digit prefixes of the center into a periodic word.
pub fn periodic_density_witness(center: &CnPoint, eps: &Q, max_period: usize) -> Result<PeriodicWitness> {
    if eps <= &Q::zero() {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    let n = center.base;
    if center.is_singular() {
        return Ok(PeriodicWitness {
            point: center.clone(),
            period: 1,
            sequence: Some(BiSequence::constant(n, 0)),
        });
    }
    let eps2 = eps * eps;
    let members = class_members(center, 2);
    for p in 1..=max_period {
        let mut tried = std::collections::HashSet::new();
        for (cx, cy) in &members {
            let xs = digit_prefixes(n, cx, p);
            let ys = digit_prefixes(n, cy, p);
            for mx in 0..=p {
                let my = p - mx;
                for xd in &xs {
                    for yd in &ys {
                        // word a1..a_mx y_my..y_1: the right half reads the x
                        // digits first, the left half reads the y digits first
                        let mut word: Vec<u8> = xd[..mx].to_vec();
                        word.extend(yd[..my].iter().rev());
                        if !tried.insert(word.clone()) {
                            continue;
                        }
                        let s = periodic_from_word(n, &word);
                        let w = factor_map(&s);
                        if dist_sq(&w, center) < eps2 {
                            let period = baker_period(&w, p)
                                .ok_or_else(|| Error::WellDefinedness(format!("{w} is not {p}-periodic")))?;
                            return Ok(PeriodicWitness {
                                point: w,
                                period,
                                sequence: Some(s),
                            });
                        }
                    }
                }
            }
        }
        // small periods: exhaustive search as a fallback
        if (n as u64).pow(p as u32) <= 4096 {
            for s in enumerate_periodic(n, p, 4096)? {
                let w = factor_map(&s);
                if dist_sq(&w, center) < eps2 {
                    let period = baker_period(&w, p).expect("periodic sequence");
                    return Ok(PeriodicWitness {
                        point: w,
                        period,
                        sequence: Some(s),
                    });
                }
            }
        }
    }
    Err(Error::ResourceCap(format!(
        "no periodic point within {} of {center} up to period {max_period}",
        fmt_q(eps)
    )))
}

/// First `len` digits of both expansions of `t` (they coincide unless `t` is
/// terminating).
fn digit_prefixes(n: u32, t: &Q, len: usize) -> Vec<Vec<u8>> {
    let d = DigitNumber::from_q(t, n).expect("coordinate in [0, 1]");
    let mut out = vec![d.leading_digits(len)];
    if let Some((pre, per)) = d.nonterminating_view() {
        let twin = crate::symbolic::Tail {
            preperiod: pre,
            period: per,
        };
        let v: Vec<u8> = (0..len).map(|i| twin.at(i)).collect();
        if v != out[0] {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn c(n: u32, x: Q, y: Q) -> CnPoint {
        canonicalize(n, &x, &y).unwrap()
    }

    #[test]
    fn interior_points_are_singletons() {
        let z = c(2, q(1, 4), q(1, 3));
        assert_eq!(z.kind, ClassKind::Interior);
        assert_eq!(class_members(&z, 10), vec![(q(1, 4), q(1, 3))]);
    }

    #[test]
    fn right_side_maps_to_left_partner() {
        // (1, 1/4) in I_1' is glued to (0, 1/4 + 1/2)
        let z = c(2, q(1, 1), q(1, 4));
        assert_eq!(z.kind, ClassKind::SideI(1));
        assert_eq!((z.x.clone(), z.y.clone()), (q(0, 1), q(3, 4)));
        assert_eq!(class_members(&z, 10), vec![(q(0, 1), q(3, 4)), (q(1, 1), q(1, 4))]);
        // (1, 0.001_2) is glued through I_2: c_2 = 1 - 1/2 - 1/4
        let w = c(2, q(1, 1), q(5, 8));
        assert_eq!(w.kind, ClassKind::SideI(2));
        assert_eq!(w.y, q(3, 8));
    }

    #[test]
    fn singular_class_listing() {
        for k in 1..6 {
            let t = pow(2, -k);
            assert!(c(2, t.clone(), q(0, 1)).is_singular());
            assert!(c(2, q(0, 1), t.clone()).is_singular());
            assert!(c(2, q(1, 1), Q::one() - &t).is_singular());
            assert!(c(2, Q::one() - &t, q(1, 1)).is_singular());
        }
        let s = CnPoint::singular(3);
        assert_eq!(
            class_members(&s, 6),
            vec![
                (q(0, 1), q(0, 1)),
                (q(1, 1), q(1, 1)),
                (q(1, 1), q(0, 1)),
                (q(0, 1), q(1, 1)),
                (q(0, 1), q(1, 3)),
                (q(1, 3), q(0, 1)),
            ]
        );
    }

    #[test]
    fn baker_examples() {
        let z = c(2, q(1, 4), q(1, 2));
        assert_eq!(baker(&z, Direction::Forward), c(2, q(1, 2), q(1, 4)));
        let w = c(2, q(3, 4), q(1, 2));
        assert_eq!(baker(&w, Direction::Forward), c(2, q(1, 2), q(3, 4)));
        let s = CnPoint::singular(2);
        assert_eq!(baker_memberwise(&s, Direction::Forward, 40).unwrap(), s);
        assert_eq!(baker_memberwise(&s, Direction::Inverse, 40).unwrap(), s);
    }

    #[test]
    fn factor_map_examples() {
        assert!(factor_map(&BiSequence::constant(2, 0)).is_singular());
        // right half 1010..., left half all 0: the point (2/3, 0) on J_1
        let s: BiSequence = "(0);(10)_2".parse().unwrap();
        let z = factor_map(&s);
        assert_eq!(z.kind, ClassKind::SideJ(1));
        assert_eq!((z.x.clone(), z.y.clone()), (q(2, 3), q(0, 1)));
        assert_eq!(class_members(&z, 4), vec![(q(2, 3), q(0, 1)), (q(1, 6), q(1, 1))]);
        let t: BiSequence = "(0);(1)_2".parse().unwrap();
        assert!(factor_map(&t).is_singular());
    }

    #[test]
    fn semiconjugacy_worked_cases() {
        for s in [
            "(0);1(01)_2",  // interior strip
            "(1)0;01(1)_2", // vertical line x = 1/2 coded by 0111...
            "(1)0;1(0)_2",  // the same line, terminating code
            "(21);(0)_3",   // x = 0
            "(1);(2)_3",    // x = 1
        ] {
            let s: BiSequence = s.parse().unwrap();
            let r = check_semiconjugacy(&s);
            assert!(r.holds, "{s}: {:?}", r);
        }
    }

    #[test]
    fn density_witness_examples() {
        let s = CnPoint::singular(2);
        let w = periodic_density_witness(&s, &q(1, 100), 10).unwrap();
        assert!(w.point.is_singular());
        let z = c(2, q(1, 3), q(1, 3));
        let w = periodic_density_witness(&z, &q(1, 16), 8).unwrap();
        assert!(w.period <= 8);
        assert!(dist_sq(&w.point, &z) < q(1, 256));
        assert_eq!(baker_iter(&w.point, w.period as i64), w.point);
        let z = c(3, q(1, 2), q(1, 2));
        let w = periodic_density_witness(&z, &q(1, 27), 6).unwrap();
        assert!(w.period <= 6);
    }

    #[test]
    fn inverse_undoes_forward() {
        let z = c(3, q(2, 7), q(5, 11));
        let f = baker(&z, Direction::Forward);
        assert_eq!(baker(&f, Direction::Inverse), z);
    }
}

//! The full shift on `n` symbols restricted to eventually periodic
//! bi-infinite sequences, its metric, Bernoulli cylinder measures and
//! periodic-point enumeration.
//!
//! A sequence is written `(... b2 b1 ; a1 a2 ...)`.  Index `i >= 1` holds `a_i`
//! (the right half), index `i <= 0` holds `b_{1-i}` (the left half, read outward
//! from index 0).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::digits::{canonical_tail, DigitNumber};
use crate::error::{Error, Result};
use crate::rational::Q;

/// One-sided eventually periodic digit sequence in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tail {
    pub preperiod: Vec<u8>,
    pub period: Vec<u8>,
}

impl Tail {
    pub fn new(pre: Vec<u8>, per: Vec<u8>) -> Self {
        assert!(!per.is_empty(), "period must be non-empty");
        let (preperiod, period) = canonical_tail(pre, &per);
        Tail { preperiod, period }
    }

    pub fn constant(d: u8) -> Self {
        Tail {
            preperiod: vec![],
            period: vec![d],
        }
    }

    /// Digit at 0-based position `i`.
    pub fn at(&self, i: usize) -> u8 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn pop_front(&self) -> (u8, Tail) {
        if let Some((&d, rest)) = self.preperiod.split_first() {
            (
                d,
                Tail {
                    preperiod: rest.to_vec(),
                    period: self.period.clone(),
                },
            )
        } else {
            let mut per = self.period.clone();
            let d = per[0];
            per.rotate_left(1);
            (
                d,
                Tail {
                    preperiod: vec![],
                    period: per,
                },
            )
        }
    }

    pub fn push_front(&self, d: u8) -> Tail {
        let mut pre = Vec::with_capacity(self.preperiod.len() + 1);
        pre.push(d);
        pre.extend_from_slice(&self.preperiod);
        Tail::new(pre, self.period.clone())
    }

    /// First position where the two tails differ, `None` if equal.
    pub fn first_difference(&self, other: &Tail) -> Option<usize> {
        if self == other {
            return None;
        }
        let lp = self.period.len();
        let lq = other.period.len();
        let bound = self.preperiod.len().max(other.preperiod.len()) + lp * lq / gcd(lp, lq);
        (0..bound).find(|&i| self.at(i) != other.at(i))
    }

    pub fn len_digits(&self) -> usize {
        self.preperiod.len() + self.period.len()
    }

    /// Exact value of `0.d0 d1 d2 ..._n` (may equal 1).
    pub fn value(&self, base: u32) -> Q {
        crate::digits::digits_value(base, &self.preperiod, &self.period)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BiSequence {
    pub base: u32,
    /// `b1 b2 b3 ...` (indices 0, -1, -2, ...)
    pub left: Tail,
    /// `a1 a2 a3 ...` (indices 1, 2, 3, ...)
    pub right: Tail,
}

impl BiSequence {
    pub fn new(base: u32, left: Tail, right: Tail) -> Result<Self> {
        if !(2..=36).contains(&base) {
            return Err(Error::BadBase(base));
        }
        for &d in left
            .preperiod
            .iter()
            .chain(&left.period)
            .chain(&right.preperiod)
            .chain(&right.period)
        {
            if u32::from(d) >= base {
                return Err(Error::BadDigit { digit: d.into(), base });
            }
        }
        Ok(BiSequence {
            base,
            left: Tail::new(left.preperiod, left.period),
            right: Tail::new(right.preperiod, right.period),
        })
    }

    pub fn constant(base: u32, d: u8) -> Self {
        BiSequence {
            base,
            left: Tail::constant(d),
            right: Tail::constant(d),
        }
    }

    /// Symbol at index `i`.
    pub fn at(&self, i: i64) -> u8 {
        if i >= 1 {
            self.right.at((i - 1) as usize)
        } else {
            self.left.at((-i) as usize)
        }
    }

    /// Left shift: index `i` of the output is index `i + 1` of the input.
    pub fn shift(&self) -> Self {
        let (a1, right) = self.right.pop_front();
        BiSequence {
            base: self.base,
            left: self.left.push_front(a1),
            right,
        }
    }

    pub fn unshift(&self) -> Self {
        let (b1, left) = self.left.pop_front();
        BiSequence {
            base: self.base,
            left,
            right: self.right.push_front(b1),
        }
    }

    pub fn shift_by(&self, k: i64) -> Self {
        let mut s = self.clone();
        if k >= 0 {
            for _ in 0..k {
                s = s.shift();
            }
        } else {
            for _ in 0..(-k) {
                s = s.unshift();
            }
        }
        s
    }

    /// Largest `m` such that both sequences agree on all indices `-m < i <= m`;
    /// `None` when the sequences are equal.
    pub fn agreement_radius(&self, other: &BiSequence) -> Result<Option<usize>> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        let r = self.right.first_difference(&other.right);
        let l = self.left.first_difference(&other.left);
        Ok(match (r, l) {
            (None, None) => None,
            // right mismatch at index r+1 forces m <= r; left mismatch at
            // index -l forces m <= l
            (Some(r), None) => Some(r),
            (None, Some(l)) => Some(l),
            (Some(r), Some(l)) => Some(r.min(l)),
        })
    }

    /// `2^{-k}` with `k` the agreement radius, `0` for equal sequences.
    pub fn dist(&self, other: &BiSequence) -> Result<Q> {
        Ok(match self.agreement_radius(other)? {
            None => Q::zero(),
            Some(k) => Q::new(BigInt::one(), num_traits::pow(BigInt::from(2), k)),
        })
    }

    /// `(0.a1 a2 ..., 0.b1 b2 ...)` as exact rationals in `[0, 1]`.
    pub fn coordinates(&self) -> (Q, Q) {
        (self.right.value(self.base), self.left.value(self.base))
    }

    pub fn right_digits(&self) -> DigitNumber {
        DigitNumber::new(self.base, self.right.preperiod.clone(), self.right.period.clone()).expect("validated digits")
    }

    pub fn left_digits(&self) -> DigitNumber {
        DigitNumber::new(self.base, self.left.preperiod.clone(), self.left.period.clone()).expect("validated digits")
    }

    pub fn is_periodic_with(&self, p: usize) -> bool {
        &self.shift_by(p as i64) == self
    }
}

/// Word of symbols placed at consecutive indices starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub start: i64,
    pub word: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    entries: Vec<Q>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<Q>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("empty probability vector".into()));
        }
        if entries.iter().any(|p| p < &Q::zero()) {
            return Err(Error::Invalid("negative probability".into()));
        }
        let total: Q = entries.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::Invalid(format!("probabilities sum to {total}")));
        }
        Ok(ProbabilityVector { entries })
    }

    pub fn uniform(n: usize) -> Self {
        let p = Q::new(BigInt::one(), BigInt::from(n));
        ProbabilityVector { entries: vec![p; n] }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let entries = s.split(',').map(crate::rational::parse_q).collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[Q] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(crate::rational::to_f64).collect()
    }
}

/// Bernoulli measure of a cylinder: the product of `p_digit` over the word.
pub fn cylinder_measure(p: &ProbabilityVector, cyl: &Cylinder) -> Result<Q> {
    let mut m = Q::one();
    for &d in &cyl.word {
        let pd = p.entries.get(d as usize).ok_or(Error::BadDigit {
            digit: d.into(),
            base: p.len() as u32,
        })?;
        m *= pd;
    }
    Ok(m)
}

/// Default cap on `n^p` for [`enumerate_periodic`].
pub const PERIODIC_CAP: u64 = 1 << 24;

/// All `n^p` sequences fixed by `shift^p`, in lexicographic order of the
/// repeating word `a1 .. ap`.
pub fn enumerate_periodic(n: u32, p: usize, cap: u64) -> Result<Vec<BiSequence>> {
    if p == 0 {
        return Err(Error::Invalid("period must be positive".into()));
    }
    let count = (n as u64)
        .checked_pow(p as u32)
        .filter(|&c| c <= cap)
        .ok_or_else(|| Error::ResourceCap(format!("{n}^{p} periodic sequences")))?;
    let mut out = Vec::with_capacity(count as usize);
    let mut word = vec![0u8; p];
    for idx in 0..count {
        let mut v = idx;
        for j in (0..p).rev() {
            word[j] = (v % n as u64) as u8;
            v /= n as u64;
        }
        out.push(periodic_from_word(n, &word));
    }
    Ok(out)
}

/// The sequence `... w w ; w w ...` with `a1..ap = w`.
pub fn periodic_from_word(n: u32, word: &[u8]) -> BiSequence {
    // index -j carries w[(p - 1 - j) mod p]
    let left: Vec<u8> = word.iter().rev().copied().collect();
    BiSequence {
        base: n,
        left: Tail::new(vec![], left),
        right: Tail::new(vec![], word.to_vec()),
    }
}

/// Every canonical eventually periodic bi-sequence whose four digit lists have
/// total length at most `max_digits`, deduplicated.
pub fn enumerate_eventually_periodic(n: u32, max_digits: usize) -> Vec<BiSequence> {
    let tails = tails_up_to(n, max_digits.saturating_sub(1));
    let mut out = Vec::new();
    for l in &tails {
        for r in &tails {
            if l.len_digits() + r.len_digits() <= max_digits {
                out.push(BiSequence {
                    base: n,
                    left: l.clone(),
                    right: r.clone(),
                });
            }
        }
    }
    out
}

/// Canonical tails with `|pre| + |per| <= max_len`, each listed once.
pub fn tails_up_to(n: u32, max_len: usize) -> Vec<Tail> {
    let mut out = Vec::new();
    for per_len in 1..=max_len {
        for pre_len in 0..=(max_len - per_len) {
            for_each_word(n, pre_len, |pre| {
                for_each_word(n, per_len, |per| {
                    let t = Tail::new(pre.to_vec(), per.to_vec());
                    // keep only the words that are already canonical
                    if t.preperiod.len() == pre_len && t.period.len() == per_len {
                        out.push(t);
                    }
                });
            });
        }
    }
    out
}

fn for_each_word(n: u32, len: usize, mut f: impl FnMut(&[u8])) {
    let mut w = vec![0u8; len];
    loop {
        f(&w);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if (w[i] as u32) + 1 < n {
                w[i] += 1;
                break;
            }
            w[i] = 0;
        }
    }
}

fn fmt_digits(ds: &[u8]) -> String {
    ds.iter()
        .map(|&d| std::char::from_digit(d.into(), 36).unwrap())
        .collect()
}

/// `(L)l_k..l_1;r_1..r_m(R)_n` where the left half is written as it sits on the
/// line: the repeating block `L` continues to the left.
impl fmt::Display for BiSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lper: Vec<u8> = self.left.period.iter().rev().copied().collect();
        let lpre: Vec<u8> = self.left.preperiod.iter().rev().copied().collect();
        write!(
            f,
            "({}){};{}({})_{}",
            fmt_digits(&lper),
            fmt_digits(&lpre),
            fmt_digits(&self.right.preperiod),
            fmt_digits(&self.right.period),
            self.base
        )
    }
}

impl FromStr for BiSequence {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected (L)l;r(R)_n, got {s}"));
        let (body, base) = s.trim().rsplit_once('_').ok_or_else(bad)?;
        let base: u32 = base.parse().map_err(|_| bad())?;
        let (l, r) = body.split_once(';').ok_or_else(bad)?;
        let digits = |t: &str| -> Result<Vec<u8>> {
            t.chars()
                .map(|c| c.to_digit(36).map(|d| d as u8).ok_or_else(bad))
                .collect()
        };
        let l = l.strip_prefix('(').ok_or_else(bad)?;
        let (lper, lpre) = l.split_once(')').ok_or_else(bad)?;
        let (rpre, rper) = r.split_once('(').ok_or_else(bad)?;
        let rper = rper.strip_suffix(')').ok_or_else(bad)?;
        let mut left_per = digits(lper)?;
        left_per.reverse();
        let mut left_pre = digits(lpre)?;
        left_pre.reverse();
        if left_per.is_empty() || rper.is_empty() {
            return Err(bad());
        }
        BiSequence::new(
            base,
            Tail::new(left_pre, left_per),
            Tail::new(digits(rpre)?, digits(rper)?),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn bs(s: &str) -> BiSequence {
        s.parse().unwrap()
    }

    #[test]
    fn shift_examples() {
        let z = BiSequence::constant(2, 0);
        assert_eq!(z.shift(), z);
        let p = periodic_from_word(2, &[0, 1]);
        assert_eq!(p.shift().shift(), p);
        assert_ne!(p.shift(), p);
        let s = bs("(0);1(0)_2");
        assert_eq!(s.shift(), bs("(0)1;(0)_2"));
    }

    #[test]
    fn dist_examples() {
        let s = bs("(0);(0)_2");
        assert_eq!(s.dist(&s).unwrap(), q(0, 1));
        // agree on indices -2..3, differ at index 4
        let t = bs("(0);0001(0)_2");
        assert_eq!(s.dist(&t).unwrap(), q(1, 8));
        let u = bs("(0);1(0)_2");
        assert_eq!(s.dist(&u).unwrap(), q(1, 1));
        assert!(s.dist(&BiSequence::constant(3, 0)).is_err());
    }

    #[test]
    fn cylinder_examples() {
        let half = ProbabilityVector::uniform(2);
        let c = |w: Vec<u8>| Cylinder { start: 0, word: w };
        assert_eq!(cylinder_measure(&half, &c(vec![])).unwrap(), q(1, 1));
        assert_eq!(cylinder_measure(&half, &c(vec![0, 1, 1])).unwrap(), q(1, 8));
        let p = ProbabilityVector::new(vec![q(1, 3), q(2, 3)]).unwrap();
        assert_eq!(cylinder_measure(&p, &c(vec![1, 1, 0])).unwrap(), q(4, 27));
        assert!(ProbabilityVector::new(vec![q(1, 3), q(1, 3)]).is_err());
    }

    #[test]
    fn periodic_examples() {
        assert_eq!(enumerate_periodic(2, 1, PERIODIC_CAP).unwrap().len(), 2);
        assert_eq!(enumerate_periodic(2, 2, PERIODIC_CAP).unwrap().len(), 4);
        let all = enumerate_periodic(3, 2, PERIODIC_CAP).unwrap();
        assert_eq!(all.len(), 9);
        for s in &all {
            assert!(s.is_periodic_with(2));
        }
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 9);
        assert!(enumerate_periodic(4, 20, PERIODIC_CAP).is_err());
    }

    #[test]
    fn display_round_trip() {
        let s = bs("(01)2;10(2)_3");
        assert_eq!(s.to_string(), "(01)2;10(2)_3");
        assert_eq!(s.at(0), 2);
        assert_eq!(s.at(-1), 1);
        assert_eq!(s.at(-2), 0);
        assert_eq!(s.at(1), 1);
        assert_eq!(s.at(3), 2);
    }

    #[test]
    fn tails_are_unique() {
        let t = tails_up_to(2, 4);
        let set: std::collections::HashSet<_> = t.iter().collect();
        assert_eq!(set.len(), t.len());
    }
}

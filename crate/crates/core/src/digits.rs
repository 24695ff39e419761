//! Exact eventually-periodic base-n expansions `0.a1 a2 a3 ..._n` of numbers in
//! `[0, 1]`, together with the digit transforms `a-`, `a+` and `a*` used by the
//! Chamanara identifications.
//!
//! Canonical form: the period is primitive, the preperiod is minimal and no
//! number other than 1 carries the all-`(n-1)` tail.  The value 1 is the single
//! number stored as `0.(n-1)` and is available as [`DigitNumber::one`].

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Q;

/// Digit-level transform applied by [`DigitNumber::transform`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigitTransform {
    /// `a1 -> a1 - 1`
    DecrementFirst,
    /// `a1 -> a1 + 1`
    IncrementFirst,
    /// `ai -> (n - 1) - ai` at every position
    ComplementAll,
    /// `ai -> (n - 1) - ai` for positions `i >= k` (1-based)
    ComplementFrom(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDigits")]
pub struct DigitNumber {
    base: u32,
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

#[derive(Deserialize)]
struct RawDigits {
    base: u32,
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

impl TryFrom<RawDigits> for DigitNumber {
    type Error = Error;
    fn try_from(raw: RawDigits) -> Result<Self> {
        DigitNumber::new_strict(raw.base, raw.preperiod, raw.period)
    }
}

/// Smallest repeating unit of a cyclic word.
pub fn primitive_period(per: &[u8]) -> Vec<u8> {
    let len = per.len();
    for d in 1..=len {
        if len.is_multiple_of(d) && (d..len).all(|i| per[i] == per[i - d]) {
            return per[..d].to_vec();
        }
    }
    per.to_vec()
}

/// Canonical `(preperiod, period)` pair of an eventually periodic sequence:
/// primitive period, minimal preperiod.
pub fn canonical_tail(mut pre: Vec<u8>, per: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let mut per = primitive_period(per);
    while let Some(&last) = pre.last() {
        if last == *per.last().expect("period is non-empty") {
            pre.pop();
            per.rotate_right(1);
        } else {
            break;
        }
    }
    (pre, per)
}

fn check_base(base: u32) -> Result<()> {
    if !(2..=36).contains(&base) {
        return Err(Error::BadBase(base));
    }
    Ok(())
}

fn check_digits(base: u32, ds: &[u8]) -> Result<()> {
    for &d in ds {
        if u32::from(d) >= base {
            return Err(Error::BadDigit { digit: d.into(), base });
        }
    }
    Ok(())
}

impl DigitNumber {
    /// Builds the canonical form of `0.pre(per)_base`.  Any all-`(n-1)` tail
    /// (other than the unit itself) is rewritten to its terminating twin.
    pub fn new(base: u32, preperiod: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        check_base(base)?;
        if period.is_empty() {
            return Err(Error::Invalid("period must be non-empty".into()));
        }
        check_digits(base, &preperiod)?;
        check_digits(base, &period)?;
        let top = (base - 1) as u8;
        let (mut pre, mut per) = canonical_tail(preperiod, &period);
        if per == [top] && !pre.is_empty() {
            // minimality guarantees the last preperiod digit is below n-1
            *pre.last_mut().unwrap() += 1;
            let (p2, q2) = canonical_tail(pre, &[0]);
            pre = p2;
            per = q2;
        }
        Ok(DigitNumber {
            base,
            preperiod: pre,
            period: per,
        })
    }

    /// Like [`DigitNumber::new`] but rejects input that is not already canonical.
    pub fn new_strict(base: u32, preperiod: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        let c = Self::new(base, preperiod.clone(), period.clone())?;
        if c.preperiod != preperiod || c.period != period {
            return Err(Error::Invalid(format!(
                "non-canonical expansion; canonical form is {c}"
            )));
        }
        Ok(c)
    }

    pub fn zero(base: u32) -> Self {
        DigitNumber {
            base,
            preperiod: vec![],
            period: vec![0],
        }
    }

    /// The explicit unit constant `0.(n-1)_n = 1`.
    pub fn one(base: u32) -> Self {
        DigitNumber {
            base,
            preperiod: vec![],
            period: vec![(base - 1) as u8],
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }
    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }
    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn is_one(&self) -> bool {
        self.preperiod.is_empty() && self.period == [(self.base - 1) as u8]
    }

    pub fn is_terminating(&self) -> bool {
        self.period == [0]
    }

    /// Long division of `p / q` in base `base`; requires `0 <= p <= q`.
    pub fn from_ratio(p: &BigInt, q: &BigInt, base: u32) -> Result<Self> {
        check_base(base)?;
        if !q.is_positive() || p.is_negative() || p > q {
            return Err(Error::OutOfUnitInterval(format!("{p}/{q}")));
        }
        if p == q {
            return Ok(Self::one(base));
        }
        let g = p.gcd(q);
        let (p, q) = if g.is_zero() {
            (BigInt::zero(), BigInt::one())
        } else {
            (p / &g, q / &g)
        };
        let b = BigInt::from(base);
        let mut seen: HashMap<BigInt, usize> = HashMap::new();
        let mut digits = Vec::new();
        let mut r = p;
        loop {
            if let Some(&start) = seen.get(&r) {
                let pre = digits[..start].to_vec();
                let per = digits[start..].to_vec();
                return Self::new(base, pre, per);
            }
            seen.insert(r.clone(), digits.len());
            let t = &r * &b;
            let (d, rem) = t.div_rem(&q);
            digits.push(d.to_u8().expect("digit below base"));
            r = rem;
        }
    }

    pub fn from_rational(p: i64, q: i64, base: u32) -> Result<Self> {
        if q <= 0 {
            return Err(Error::OutOfUnitInterval(format!("{p}/{q}")));
        }
        Self::from_ratio(&BigInt::from(p), &BigInt::from(q), base)
    }

    pub fn from_q(x: &Q, base: u32) -> Result<Self> {
        Self::from_ratio(x.numer(), x.denom(), base)
    }

    /// Exact value via the geometric series.
    pub fn to_rational(&self) -> Q {
        digits_value(self.base, &self.preperiod, &self.period)
    }

    /// The `i`-th digit, `i >= 1`.
    pub fn digit(&self, i: usize) -> u8 {
        assert!(i >= 1, "digits are indexed from 1");
        let i = i - 1;
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// First `k` digits.
    pub fn leading_digits(&self, k: usize) -> Vec<u8> {
        (1..=k).map(|i| self.digit(i)).collect()
    }

    /// The non-terminating twin `0.a1..(ak - 1)(n-1)(n-1)...` of a terminating
    /// nonzero number, as a raw `(preperiod, period)` pair.  `None` for zero and
    /// for numbers without a second expansion.
    pub fn nonterminating_view(&self) -> Option<(Vec<u8>, Vec<u8>)> {
        if self.is_one() {
            return Some((vec![], self.period.clone()));
        }
        if !self.is_terminating() || self.preperiod.is_empty() {
            return None;
        }
        let mut pre = self.preperiod.clone();
        *pre.last_mut().unwrap() -= 1;
        Some((pre, vec![(self.base - 1) as u8]))
    }

    pub fn transform(&self, kind: DigitTransform) -> Result<Self> {
        let n = self.base;
        let top = (n - 1) as u8;
        match kind {
            DigitTransform::DecrementFirst | DigitTransform::IncrementFirst => {
                let (pre, per) = self.unrolled(1);
                let mut pre = pre;
                let d = pre[0];
                if kind == DigitTransform::DecrementFirst {
                    if d == 0 {
                        return Err(Error::TransformInapplicable(format!("first digit of {self} is 0")));
                    }
                    pre[0] = d - 1;
                } else {
                    if d == top {
                        return Err(Error::TransformInapplicable(format!("first digit of {self} is n-1")));
                    }
                    pre[0] = d + 1;
                }
                Self::new(n, pre, per)
            }
            DigitTransform::ComplementAll => {
                let pre = self.preperiod.iter().map(|d| top - d).collect();
                let per: Vec<u8> = self.period.iter().map(|d| top - d).collect();
                Self::new(n, pre, per)
            }
            DigitTransform::ComplementFrom(k) => {
                if k == 0 {
                    return Err(Error::Invalid("complement_from index is 1-based".into()));
                }
                let (mut pre, per) = self.unrolled(k - 1);
                for d in pre.iter_mut().skip(k - 1) {
                    *d = top - *d;
                }
                let per: Vec<u8> = per.iter().map(|d| top - d).collect();
                Self::new(n, pre, per)
            }
        }
    }

    /// Raw `(pre, per)` with the preperiod unrolled to at least `len` digits.
    fn unrolled(&self, len: usize) -> (Vec<u8>, Vec<u8>) {
        let mut pre = self.preperiod.clone();
        let mut per = self.period.clone();
        while pre.len() < len {
            pre.push(per[0]);
            per.rotate_left(1);
        }
        (pre, per)
    }

    /// Drops the first digit: returns it together with `0.a2 a3 ...`.
    pub fn pop_first(&self) -> (u8, Self) {
        let (mut pre, per) = self.unrolled(1);
        let d = pre.remove(0);
        // the remainder of a canonical expansion is canonical except when it is
        // the all-(n-1) tail, i.e. when self is the unit
        let rest = if self.is_one() {
            Self::one(self.base)
        } else {
            Self::new(self.base, pre, per).expect("digits already validated")
        };
        (d, rest)
    }

    /// Prepends a digit: `0.d a1 a2 ...`.
    pub fn push_first(&self, d: u8) -> Result<Self> {
        check_digits(self.base, &[d])?;
        let mut pre = vec![d];
        pre.extend_from_slice(&self.preperiod);
        Self::new(self.base, pre, self.period.clone())
    }

    /// `k > 0`: drop `k` leading digits (value `n^k x mod 1` for `x < 1`);
    /// `k < 0`: prepend `|k|` zeros (value `x / n^|k|`).
    pub fn shift(&self, k: i32) -> Self {
        let mut x = self.clone();
        if k >= 0 {
            for _ in 0..k {
                x = x.pop_first().1;
            }
        } else {
            for _ in 0..(-k) {
                x = x.push_first(0).expect("0 is a valid digit");
            }
        }
        x
    }
}

/// Value of the raw expansion `0.pre(per)_base`.
pub fn digits_value(base: u32, pre: &[u8], per: &[u8]) -> Q {
    let b = BigInt::from(base);
    let mut pre_int = BigInt::zero();
    for &d in pre {
        pre_int = pre_int * &b + BigInt::from(d);
    }
    let mut per_int = BigInt::zero();
    for &d in per {
        per_int = per_int * &b + BigInt::from(d);
    }
    let bp = num_traits::pow(b.clone(), pre.len());
    let bq = num_traits::pow(b, per.len());
    // (pre_int + per_int / (b^|per| - 1)) / b^|pre|
    let num = pre_int * (&bq - 1u32) + per_int;
    let den = bp * (bq - 1u32);
    Q::new(num, den)
}

fn digit_char(d: u8) -> char {
    std::char::from_digit(u32::from(d), 36).expect("digit below 36")
}

impl fmt::Display for DigitNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0.")?;
        for &d in &self.preperiod {
            write!(f, "{}", digit_char(d))?;
        }
        write!(f, "(")?;
        for &d in &self.period {
            write!(f, "{}", digit_char(d))?;
        }
        write!(f, ")_{}", self.base)
    }
}

/// Parses `0.d1d2...(p1p2...)_n`.  The period may be omitted (`0.101_2`
/// means `0.101(0)_2`).
impl FromStr for DigitNumber {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected 0.digits(period)_base, got {s}"));
        let (body, base) = s.trim().rsplit_once('_').ok_or_else(bad)?;
        let base: u32 = base.parse().map_err(|_| bad())?;
        check_base(base)?;
        let body = body.strip_prefix("0.").ok_or_else(bad)?;
        let (pre_s, per_s) = match body.find('(') {
            Some(i) => {
                let rest = body[i + 1..].strip_suffix(')').ok_or_else(bad)?;
                (&body[..i], rest)
            }
            None => (body, "0"),
        };
        let to_digits = |t: &str| -> Result<Vec<u8>> {
            t.chars()
                .map(|c| c.to_digit(36).filter(|&d| d < base).map(|d| d as u8).ok_or_else(bad))
                .collect()
        };
        Self::new(base, to_digits(pre_s)?, to_digits(per_s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn dn(s: &str) -> DigitNumber {
        s.parse().unwrap()
    }

    #[test]
    fn from_rational_examples() {
        let h = DigitNumber::from_rational(1, 2, 2).unwrap();
        assert_eq!(h.preperiod(), &[1]);
        assert_eq!(h.period(), &[0]);
        let z = DigitNumber::from_rational(0, 1, 3).unwrap();
        assert!(z.preperiod().is_empty());
        assert_eq!(z.period(), &[0]);
        let t = DigitNumber::from_rational(1, 3, 2).unwrap();
        assert!(t.preperiod().is_empty());
        assert_eq!(t.period(), &[0, 1]);
    }

    #[test]
    fn from_rational_rejects_bad_input() {
        assert!(DigitNumber::from_rational(3, 2, 2).is_err());
        assert!(DigitNumber::from_rational(1, 2, 1).is_err());
        assert!(DigitNumber::from_rational(-1, 2, 2).is_err());
    }

    #[test]
    fn to_rational_examples() {
        assert_eq!(dn("0.1(0)_2").to_rational(), q(1, 2));
        assert_eq!(dn("0.(01)_2").to_rational(), q(1, 3));
        // the unit constant
        let one = DigitNumber::new_strict(3, vec![], vec![2]).unwrap();
        assert!(one.is_one());
        assert_eq!(one.to_rational(), q(1, 1));
        // an all-(n-1) tail elsewhere is not canonical
        assert!(DigitNumber::new_strict(3, vec![1], vec![2]).is_err());
        assert_eq!(DigitNumber::new(3, vec![1], vec![2]).unwrap(), dn("0.2_3"));
    }

    #[test]
    fn canonical_form_is_minimal() {
        let x = DigitNumber::new(2, vec![0, 1, 0, 1], vec![0, 1, 0, 1]).unwrap();
        assert!(x.preperiod().is_empty());
        assert_eq!(x.period(), &[0, 1]);
        let y = DigitNumber::new(2, vec![1, 0, 0], vec![0, 0]).unwrap();
        assert_eq!(y.preperiod(), &[1]);
        assert_eq!(y.period(), &[0]);
    }

    #[test]
    fn transforms() {
        let x = dn("0.(1)_3");
        assert_eq!(x.transform(DigitTransform::ComplementAll).unwrap(), x);
        assert_eq!(
            dn("0.101_2").transform(DigitTransform::DecrementFirst).unwrap(),
            dn("0.001_2")
        );
        let half = dn("0.10_2");
        let c = half.transform(DigitTransform::ComplementAll).unwrap();
        assert_eq!(c.to_rational(), q(1, 1) - q(1, 2));
        assert_eq!(c, half);
        assert!(dn("0.01_2").transform(DigitTransform::DecrementFirst).is_err());
        assert!(dn("0.2_3").transform(DigitTransform::IncrementFirst).is_err());
        // complement from position 2: 0.1 2 0 0... -> 0.1 0 2 2 ... = 0.11_3
        assert_eq!(
            dn("0.12_3").transform(DigitTransform::ComplementFrom(2)).unwrap(),
            dn("0.11_3")
        );
    }

    #[test]
    fn shifts() {
        assert_eq!(dn("0.101_2").shift(1), dn("0.01_2"));
        let r = dn("0.(01)_2").shift(-1);
        assert_eq!(r, dn("0.0(01)_2"));
        assert_eq!(r.to_rational(), q(1, 6));
        assert_eq!(DigitNumber::zero(5).shift(1), DigitNumber::zero(5));
    }

    #[test]
    fn nonterminating_twin_has_same_value() {
        let x = dn("0.12_3");
        let (pre, per) = x.nonterminating_view().unwrap();
        assert_eq!(pre, vec![1, 1]);
        assert_eq!(per, vec![2]);
        assert_eq!(digits_value(3, &pre, &per), x.to_rational());
        assert!(DigitNumber::zero(3).nonterminating_view().is_none());
    }

    #[test]
    fn display_and_json() {
        let x = dn("0.1(20)_3");
        assert_eq!(x.to_string(), "0.1(20)_3");
        let j = serde_json::to_string(&x).unwrap();
        assert_eq!(j, r#"{"base":3,"preperiod":[1],"period":[2,0]}"#);
        let back: DigitNumber = serde_json::from_str(&j).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<DigitNumber>(r#"{"base":3,"preperiod":[1],"period":[2]}"#).is_err());
    }
}

//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// `n^k` as an exact rational, `k` may be negative.
pub fn pow(n: u32, k: i32) -> Q {
    let base = Q::from_integer(BigInt::from(n));
    if k >= 0 {
        num_traits::pow(base, k as usize)
    } else {
        num_traits::pow(base, (-k) as usize).recip()
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn floor_int(x: &Q) -> BigInt {
    x.floor().to_integer()
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

pub fn is_zero(x: &Q) -> bool {
    x.is_zero()
}

pub fn is_one(x: &Q) -> bool {
    x.is_one()
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

/// Parses `"p/q"`, `"p"` or a finite decimal like `"0.125"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        let d: BigInt = b.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let ipart: BigInt = if ip.is_empty() || ip == "-" {
            BigInt::zero()
        } else {
            ip.parse().map_err(|_| Error::Parse(s.to_string()))?
        };
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(s.to_string()));
        }
        let fnum: BigInt = if fp.is_empty() {
            BigInt::zero()
        } else {
            fp.parse().map_err(|_| Error::Parse(s.to_string()))?
        };
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let frac = Q::new(fnum, scale);
        let whole = Q::from_integer(ipart);
        return Ok(if neg { whole - frac } else { whole + frac });
    }
    let n: BigInt = s.parse().map_err(|_| Error::Parse(s.to_string()))?;
    Ok(Q::from_integer(n))
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"a,b"` into a pair of rationals.
pub fn parse_pair(s: &str) -> Result<(Q, Q)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected \"x,y\", got {s}")))?;
    Ok((parse_q(a)?, parse_q(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_q("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_q("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_q("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_q("7").unwrap(), int(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(pow(3, 2), int(9));
        assert_eq!(pow(2, -3), q(1, 8));
        assert_eq!(frac(&q(7, 3)), q(1, 3));
        assert_eq!(frac(&q(-1, 3)), q(2, 3));
    }
}

//! Exact arithmetic in a real quadratic field `Q(sqrt d)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{fmt_q, to_f64, Q};

/// `a + b sqrt(d)` with rational `a, b` and a fixed radicand `d >= 0`.
/// `d = 0` is the rational case; a zero `b` is always stored with `d = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadSurd {
    pub a: Q,
    pub b: Q,
    pub d: u64,
}

impl QuadSurd {
    pub fn rational(a: Q) -> Self {
        QuadSurd { a, b: Q::zero(), d: 0 }
    }

    pub fn new(a: Q, b: Q, d: u64) -> Self {
        if d == 0 || b.is_zero() {
            QuadSurd::rational(a)
        } else {
            QuadSurd { a, b, d }
        }
    }

    /// `sqrt(d)` itself.
    pub fn root(d: u64) -> Self {
        QuadSurd::new(Q::zero(), Q::from_integer(1.into()), d)
    }

    fn radicand(&self, other: &Self) -> u64 {
        match (self.d, other.d) {
            (0, d) | (d, 0) => d,
            (x, y) => {
                assert_eq!(x, y, "mixed quadratic fields");
                x
            }
        }
    }

    fn widen(&self, d: u64) -> (Q, Q) {
        if self.d == 0 && d != 0 {
            (self.a.clone(), Q::zero())
        } else {
            (self.a.clone(), self.b.clone())
        }
    }

    pub fn conjugate(&self) -> Self {
        QuadSurd::new(self.a.clone(), -self.b.clone(), self.d)
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - Q::from_integer(self.d.into()) * &self.b * &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = if self.d == 0 { 0 } else { sign(&self.b) };
        if sa == sb || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: compare a^2 with d b^2
        let lhs = &self.a * &self.a;
        let rhs = Q::from_integer(self.d.into()) * &self.b * &self.b;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * (self.d as f64).sqrt()
    }

    pub fn recip(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero in quadratic field");
        QuadSurd::new(&self.a / &n, -(&self.b / &n), self.d)
    }

    pub fn mul_q(&self, k: &Q) -> Self {
        QuadSurd::new(&self.a * k, &self.b * k, self.d)
    }
}

fn sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn add(self, o: &QuadSurd) -> QuadSurd {
        let d = self.radicand(o);
        let (a1, b1) = self.widen(d);
        let (a2, b2) = o.widen(d);
        QuadSurd::new(a1 + a2, b1 + b2, d)
    }
}

impl<'a> Sub<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn sub(self, o: &QuadSurd) -> QuadSurd {
        let d = self.radicand(o);
        let (a1, b1) = self.widen(d);
        let (a2, b2) = o.widen(d);
        QuadSurd::new(a1 - a2, b1 - b2, d)
    }
}

impl<'a> Mul<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn mul(self, o: &QuadSurd) -> QuadSurd {
        let d = self.radicand(o);
        let (a1, b1) = self.widen(d);
        let (a2, b2) = o.widen(d);
        let dq = Q::from_integer(d.into());
        QuadSurd::new(&a1 * &a2 + dq * &b1 * &b2, a1 * b2 + b1 * a2, d)
    }
}

impl<'a> Div<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn div(self, o: &QuadSurd) -> QuadSurd {
        self * &o.recip()
    }
}

macro_rules! owned_op {
    ($tr:ident, $m:ident) => {
        impl $tr for QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: QuadSurd) -> QuadSurd {
                (&self).$m(&o)
            }
        }
    };
}
owned_op!(Add, add);
owned_op!(Sub, sub);
owned_op!(Mul, mul);
owned_op!(Div, div);

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd::new(-self.a, -self.b, self.d)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 0 || self.b.is_zero() {
            write!(f, "{}", fmt_q(&self.a))
        } else {
            write!(f, "{} + {}*sqrt({})", fmt_q(&self.a), fmt_q(&self.b), self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn golden_ratio_identities() {
        let phi = QuadSurd::new(q(1, 2), q(1, 2), 5);
        let one = QuadSurd::rational(q(1, 1));
        // phi^2 = phi + 1
        assert_eq!(&phi * &phi, &phi + &one);
        // lambda = phi^2 = (3 + sqrt5)/2, lambda * lambda' = 1
        let lam = &phi * &phi;
        assert_eq!(lam, QuadSurd::new(q(3, 2), q(1, 2), 5));
        assert_eq!(&lam * &lam.conjugate(), one);
        assert_eq!(&one / &lam, lam.conjugate());
        assert!((lam.to_f64() - 2.618033988749895).abs() < 1e-15);
    }

    #[test]
    fn exact_sign() {
        let s = QuadSurd::new(q(-2, 1), q(1, 1), 5); // sqrt5 - 2 > 0
        assert_eq!(s.signum(), 1);
        let t = QuadSurd::new(q(3, 1), q(-1, 1), 9); // 3 - 3 = 0 (non-reduced radicand)
        assert_eq!(t.signum(), 0);
        assert!(QuadSurd::rational(q(1, 3)) < QuadSurd::new(q(0, 1), q(1, 5), 5));
    }
}

//! Hyperbolic toral automorphisms `F_A(z) = A z mod 1`, the pillowcase quotient
//! by `z ~ -z`, and periodic-point enumeration on rational grids.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, frac, q, to_f64, Q};
use crate::surd::QuadSurd;

/// Largest grid denominator accepted by [`periodic_points`].
pub const PERIODIC_Q_CAP: u64 = 2048;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: Q,
    pub y: Q,
}

impl TorusPoint {
    /// Reduces both coordinates mod 1.
    pub fn new(x: Q, y: Q) -> Self {
        TorusPoint {
            x: frac(&x),
            y: frac(&y),
        }
    }

    pub fn from_ratios(a: i64, b: i64, c: i64, d: i64) -> Self {
        TorusPoint::new(q(a, b), q(c, d))
    }

    pub fn zero() -> Self {
        TorusPoint::new(Q::zero(), Q::zero())
    }

    pub fn neg(&self) -> Self {
        TorusPoint::new(-self.x.clone(), -self.y.clone())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.x.denom().lcm(self.y.denom())
    }

    /// Whether the point lies in the branch set `{0, 1/2}^2` of the pillowcase.
    pub fn is_half_integer(&self) -> bool {
        let two = BigInt::from(2);
        (&two % self.x.denom()).is_zero() && (&two % self.y.denom()).is_zero()
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_q(&self.x), fmt_q(&self.y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Forward,
    Inverse,
}

/// A hyperbolic element of `GL(2, Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToralAuto {
    pub m: [[i64; 2]; 2],
}

impl ToralAuto {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let a = ToralAuto { m };
        let det = a.det();
        if det.abs() != 1 {
            return Err(Error::NotHyperbolic(format!("determinant {det} is not +-1")));
        }
        let t = a.trace();
        let hyperbolic = if det == 1 { t.abs() > 2 } else { t != 0 };
        if !hyperbolic {
            return Err(Error::NotHyperbolic(format!(
                "trace {t}, determinant {det}: an eigenvalue has modulus 1"
            )));
        }
        Ok(a)
    }

    /// The cat map `(2 1; 1 1)`.
    pub fn cat() -> Self {
        ToralAuto::new([[2, 1], [1, 1]]).expect("cat map is hyperbolic")
    }

    /// Parses `"a,b,c,d"` (row-major).
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| Error::Parse(s.to_string())))
            .collect::<Result<_>>()?;
        if v.len() != 4 {
            return Err(Error::Parse(format!("expected four entries, got {s}")));
        }
        ToralAuto::new([[v[0], v[1]], [v[2], v[3]]])
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse_matrix(&self) -> [[i64; 2]; 2] {
        let d = self.det();
        let [[a, b], [c, e]] = self.m;
        [[e * d, -b * d], [-c * d, a * d]]
    }

    fn matrix(&self, step: Step) -> [[i64; 2]; 2] {
        match step {
            Step::Forward => self.m,
            Step::Inverse => self.inverse_matrix(),
        }
    }

    pub fn apply(&self, z: &TorusPoint, step: Step) -> TorusPoint {
        let [[a, b], [c, d]] = self.matrix(step);
        let (a, b, c, d) = (q(a, 1), q(b, 1), q(c, 1), q(d, 1));
        TorusPoint::new(&a * &z.x + &b * &z.y, &c * &z.x + &d * &z.y)
    }

    pub fn iterate(&self, z: &TorusPoint, steps: i64) -> TorusPoint {
        let step = if steps >= 0 { Step::Forward } else { Step::Inverse };
        let mut w = z.clone();
        for _ in 0..steps.unsigned_abs() {
            w = self.apply(&w, step);
        }
        w
    }

    /// Action on the integer grid `(Z/qZ)^2`.
    pub fn apply_grid(&self, (a, b): (u64, u64), qd: u64, step: Step) -> (u64, u64) {
        let [[m00, m01], [m10, m11]] = self.matrix(step);
        let qi = qd as i128;
        let red = |v: i128| v.rem_euclid(qi) as u64;
        (
            red(m00 as i128 * a as i128 + m01 as i128 * b as i128),
            red(m10 as i128 * a as i128 + m11 as i128 * b as i128),
        )
    }

    /// Discriminant `t^2 - 4 det` of the characteristic polynomial; never a
    /// perfect square for a hyperbolic unimodular matrix.
    pub fn discriminant(&self) -> u64 {
        let t = self.trace();
        (t * t - 4 * self.det()) as u64
    }

    /// The eigenvalue of larger modulus, exactly.
    pub fn leading_eigenvalue(&self) -> QuadSurd {
        let t = self.trace();
        let sgn = if t >= 0 { 1 } else { -1 };
        QuadSurd::new(q(t, 2), q(sgn, 2), self.discriminant())
    }

    /// The eigenvalue of smaller modulus.
    pub fn stable_eigenvalue(&self) -> QuadSurd {
        self.leading_eigenvalue().conjugate()
    }

    /// An eigenvector for the eigenvalue `mu`.
    pub fn eigenvector(&self, mu: &QuadSurd) -> (QuadSurd, QuadSurd) {
        let [[a, b], [c, d]] = self.m;
        let r = |v: i64| QuadSurd::rational(q(v, 1));
        if b != 0 {
            (r(b), mu - &r(a))
        } else {
            (mu - &r(d), r(c))
        }
    }

    /// Topological (and Haar-measure) entropy `log |lambda|`.
    pub fn entropy(&self) -> f64 {
        let t = self.trace().abs() as f64;
        ((t + (self.discriminant() as f64).sqrt()) / 2.0).ln()
    }
}

/// A point of the pillowcase sphere `T^2 / (z ~ -z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PillowPoint {
    pub rep: TorusPoint,
    pub branch: bool,
}

pub fn pillowcase(z: &TorusPoint) -> PillowPoint {
    let m = z.neg();
    if &m == z {
        PillowPoint { rep: m, branch: true }
    } else {
        PillowPoint {
            rep: std::cmp::min(m, z.clone()),
            branch: false,
        }
    }
}

pub fn pillow_fiber(p: &PillowPoint) -> Vec<TorusPoint> {
    if p.branch {
        vec![p.rep.clone()]
    } else {
        let mut v = vec![p.rep.clone(), p.rep.neg()];
        v.sort();
        v
    }
}

/// The map induced on the pillowcase; well defined since `A(-z) = -Az`.
pub fn pillow_apply(a: &ToralAuto, p: &PillowPoint, step: Step) -> Result<PillowPoint> {
    let u = pillowcase(&a.apply(&p.rep, step));
    let v = pillowcase(&a.apply(&p.rep.neg(), step));
    if u != v {
        return Err(Error::WellDefinedness(format!("pillowcase image of {}", p.rep)));
    }
    Ok(u)
}

/// The four branch points `{(0,0), (1/2,0), (0,1/2), (1/2,1/2)}`.
pub fn branch_set() -> Vec<TorusPoint> {
    vec![
        TorusPoint::from_ratios(0, 1, 0, 1),
        TorusPoint::from_ratios(1, 2, 0, 1),
        TorusPoint::from_ratios(0, 1, 1, 2),
        TorusPoint::from_ratios(1, 2, 1, 2),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub period: usize,
    pub points: Vec<TorusPoint>,
}

impl Orbit {
    pub fn meets_branch_set(&self) -> bool {
        self.points.iter().any(TorusPoint::is_half_integer)
    }
}

/// All points of `(1/q Z)^2 / Z^2`, grouped into orbits in order of their
/// smallest grid index.  Every rational point is periodic, so this is a
/// partition.
pub fn periodic_points(a: &ToralAuto, qd: u64) -> Result<Vec<Orbit>> {
    if qd == 0 {
        return Err(Error::Invalid("grid denominator must be positive".into()));
    }
    if qd > PERIODIC_Q_CAP {
        return Err(Error::ResourceCap(format!(
            "grid denominator {qd} exceeds {PERIODIC_Q_CAP}"
        )));
    }
    let n = (qd * qd) as usize;
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cur = ((start as u64) / qd, (start as u64) % qd);
        let mut pts = Vec::new();
        loop {
            let idx = (cur.0 * qd + cur.1) as usize;
            if seen[idx] {
                break;
            }
            seen[idx] = true;
            pts.push(TorusPoint::from_ratios(
                cur.0 as i64,
                qd as i64,
                cur.1 as i64,
                qd as i64,
            ));
            cur = a.apply_grid(cur, qd, Step::Forward);
        }
        out.push(Orbit {
            period: pts.len(),
            points: pts,
        });
    }
    Ok(out)
}

/// Smallest-period orbit on grids up to `q_max` that avoids the branch set,
/// ties broken by grid order.
pub fn smallest_non_branch_orbit(a: &ToralAuto, q_max: u64) -> Result<Orbit> {
    let mut best: Option<Orbit> = None;
    for qd in 1..=q_max {
        for o in periodic_points(a, qd)? {
            if o.meets_branch_set() || o.points.iter().any(|p| p.denominator() != BigInt::from(qd)) {
                continue;
            }
            if best.as_ref().is_none_or(|b| o.period < b.period) {
                best = Some(o);
            }
        }
    }
    best.ok_or_else(|| Error::ResourceCap(format!("no branch-free orbit with denominator <= {q_max}")))
}

/// Exact period of a rational point.
pub fn point_period(a: &ToralAuto, z: &TorusPoint) -> usize {
    let d = z.denominator().to_u64().expect("denominator fits in u64");
    let g = |t: &Q| -> u64 { (t * Q::from_integer(d.into())).to_integer().abs().to_u64().unwrap() };
    let start = (g(&z.x), g(&z.y));
    let mut cur = a.apply_grid(start, d, Step::Forward);
    let mut p = 1;
    while cur != start {
        cur = a.apply_grid(cur, d, Step::Forward);
        p += 1;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_map_examples() {
        let a = ToralAuto::cat();
        assert_eq!(a.apply(&TorusPoint::zero(), Step::Forward), TorusPoint::zero());
        let h = TorusPoint::from_ratios(1, 2, 1, 2);
        assert_eq!(a.apply(&h, Step::Forward), TorusPoint::from_ratios(1, 2, 0, 1));
        let z = TorusPoint::from_ratios(2, 7, 3, 5);
        assert_eq!(a.apply(&a.apply(&z, Step::Forward), Step::Inverse), z);
        assert!((a.entropy() - 0.9624236501192069).abs() < 1e-15);
        assert!(ToralAuto::new([[1, 1], [0, 1]]).is_err());
    }

    #[test]
    fn pillowcase_examples() {
        assert!(pillowcase(&TorusPoint::zero()).branch);
        let p = pillowcase(&TorusPoint::from_ratios(1, 3, 0, 1));
        assert_eq!(
            pillow_fiber(&p),
            vec![TorusPoint::from_ratios(1, 3, 0, 1), TorusPoint::from_ratios(2, 3, 0, 1)]
        );
        assert!(pillowcase(&TorusPoint::from_ratios(1, 2, 1, 2)).branch);
    }

    #[test]
    fn periodic_examples() {
        let a = ToralAuto::cat();
        let o1 = periodic_points(&a, 1).unwrap();
        assert_eq!(o1.len(), 1);
        assert_eq!(o1[0].period, 1);
        let o5 = periodic_points(&a, 5).unwrap();
        let nonzero: usize = o5
            .iter()
            .filter(|o| o.points[0] != TorusPoint::zero())
            .map(|o| o.points.len())
            .sum();
        assert_eq!(nonzero, 24);
        for o in &o5 {
            assert_eq!(point_period(&a, &o.points[0]), o.period);
        }
        let o2 = periodic_points(&a, 2).unwrap();
        let halves: usize = o2
            .iter()
            .filter(|o| o.points[0] != TorusPoint::zero())
            .map(|o| o.period)
            .sum();
        assert_eq!(halves, 3);
    }

    #[test]
    fn exact_eigen_data() {
        let a = ToralAuto::cat();
        let lam = a.leading_eigenvalue();
        assert_eq!(lam, QuadSurd::new(q(3, 2), q(1, 2), 5));
        let (vx, vy) = a.eigenvector(&lam);
        // A v = lam v
        let two = QuadSurd::rational(q(2, 1));
        assert_eq!(&(&two * &vx) + &vy, &lam * &vx);
        assert_eq!(&vx + &vy, &lam * &vy);
    }
}

//! The quotient sphere `Q_n = C_n / R` under the half-turn `R(x, y) = (1 - x, 1 - y)`,
//! the induced homeomorphism `T_n`, and the branch-point catalog.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chamanara::{baker, canonicalize, factor_map, ClassKind, CnPoint, Direction};
use crate::error::{Error, Result};
use crate::rational::{pow, q, Q};
use crate::symbolic::BiSequence;

/// A point of `Q_n`, stored as the smaller (lexicographic on `(x, y)`) of the
/// two canonical `C_n` representatives in its fiber.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QnPoint {
    pub rep: CnPoint,
    pub branch: bool,
}

impl QnPoint {
    pub fn base(&self) -> u32 {
        self.rep.base
    }
}

impl fmt::Display for QnPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.rep, if self.branch { "*" } else { "" })
    }
}

/// The half-turn about `(1/2, 1/2)` on classes.
pub fn rotate(z: &CnPoint) -> CnPoint {
    if z.is_singular() {
        return z.clone();
    }
    canonicalize(z.base, &one_minus(&z.x), &one_minus(&z.y)).expect("rotation preserves the square")
}

/// `1 - t`; already in lowest terms, so no reduction is needed.
fn one_minus(t: &Q) -> Q {
    Q::new_raw(t.denom() - t.numer(), t.denom().clone())
}

pub fn canonicalize_q(z: &CnPoint) -> QnPoint {
    let r = rotate(z);
    if &r == z {
        QnPoint { rep: r, branch: true }
    } else {
        QnPoint {
            rep: if r.key_cmp(z).is_lt() { r } else { z.clone() },
            branch: false,
        }
    }
}

/// `\hat P_n`: quotient class of a `C_n` point given by raw coordinates.
pub fn canonicalize_q_xy(n: u32, x: &Q, y: &Q) -> Result<QnPoint> {
    Ok(canonicalize_q(&canonicalize(n, x, y)?))
}

pub fn fiber(p: &QnPoint) -> Vec<CnPoint> {
    if p.branch {
        vec![p.rep.clone()]
    } else {
        let mut v = vec![p.rep.clone(), rotate(&p.rep)];
        v.sort();
        v
    }
}

/// `T_n` (or its inverse), computed from both fiber members; they must agree.
pub fn induced_apply(p: &QnPoint, dir: Direction) -> Result<QnPoint> {
    let a = canonicalize_q(&baker(&p.rep, dir));
    let b = canonicalize_q(&baker(&rotate(&p.rep), dir));
    if a != b {
        return Err(Error::WellDefinedness(format!(
            "T_n({p}) is ambiguous: {a} from the representative, {b} from its rotation"
        )));
    }
    Ok(a)
}

pub fn induced_iter(p: &QnPoint, steps: i64) -> Result<QnPoint> {
    let dir = if steps >= 0 {
        Direction::Forward
    } else {
        Direction::Inverse
    };
    let mut w = p.clone();
    for _ in 0..steps.unsigned_abs() {
        w = induced_apply(&w, dir)?;
    }
    Ok(w)
}

/// `\hat P_n \circ P_n`: the composed factor map from the full shift.
pub fn quotient_factor(s: &BiSequence) -> QnPoint {
    canonicalize_q(&factor_map(s))
}

/// Length of `I_k` plus the length of `I_{k+1}`: `l_k = n^{1-k} + n^{-k}`.
/// The midpoint of `I_k` is `(0, l_k / 2)`.
pub fn l_const(n: u32, k: u32) -> Q {
    pow(n, 1 - k as i32) + pow(n, -(k as i32))
}

/// `m_k = n^{1-k} + n^{-k}` for the bottom segments `J_k`.
pub fn m_const(n: u32, k: u32) -> Q {
    l_const(n, k)
}

/// `\hat m_1 = (n - 1)/n`: twice the x-coordinate of the top-edge member of
/// the fixed point of `J_1`.
pub fn m_hat_1(n: u32) -> Q {
    q(n as i64 - 1, n as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchEntry {
    pub label: String,
    /// Coordinates as written in the catalog (before canonicalization).
    pub x: Q,
    pub y: Q,
    pub point: QnPoint,
}

/// Fixed classes of the rotation: the singular class, the centre, the
/// midpoints of `I_k` for `k <= depth` and of `J_k` for `k <= depth`
/// (with `J_1` written through its top-edge member `(\hat m_1 / 2, 1)`).
pub fn branch_catalog(n: u32, depth: u32) -> Result<Vec<BranchEntry>> {
    if n < 2 {
        return Err(Error::BadBase(n));
    }
    let half = q(1, 2);
    let mut raw: Vec<(String, Q, Q)> = vec![
        ("(0,0)".into(), q(0, 1), q(0, 1)),
        ("(1/2,1/2)".into(), half.clone(), half.clone()),
        ("(m^_1/2,1)".into(), m_hat_1(n) * &half, q(1, 1)),
    ];
    for k in 1..=depth {
        raw.push((format!("(0,l_{k}/2)"), q(0, 1), l_const(n, k) * &half));
    }
    for k in 2..=depth {
        raw.push((format!("(m_{k}/2,0)"), m_const(n, k) * &half, q(0, 1)));
    }
    raw.into_iter()
        .map(|(label, x, y)| {
            let point = canonicalize_q_xy(n, &x, &y)?;
            Ok(BranchEntry { label, x, y, point })
        })
        .collect()
}

/// Depth of a boundary class: `k` for `I_k`/`J_k`, 0 otherwise.
pub fn class_depth(z: &CnPoint) -> u32 {
    match z.kind {
        ClassKind::SideI(k) | ClassKind::SideJ(k) => k,
        _ => 0,
    }
}

/// `\hat J_1 = [1/2, (n+2)/(2n)) x {0}`: the part of `J_1` whose first-strip
/// image under the baker map starts at the middle height band.
pub fn j_hat_1(n: u32) -> (Q, Q) {
    (q(1, 2), q(n as i64 + 2, 2 * n as i64))
}

/// `\check J_1 = (1/n, 1/2] x {0}`.
pub fn j_check_1(n: u32) -> (Q, Q) {
    (q(1, n as i64), q(1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn c(n: u32, x: Q, y: Q) -> CnPoint {
        canonicalize(n, &x, &y).unwrap()
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotate(&c(3, q(1, 4), q(1, 3))), c(3, q(3, 4), q(2, 3)));
        assert!(rotate(&CnPoint::singular(2)).is_singular());
        let m = c(2, q(1, 2), q(1, 2));
        assert_eq!(rotate(&m), m);
        assert!(canonicalize_q(&m).branch);
    }

    #[test]
    fn quotient_identifies_rotation_pairs() {
        let z = c(3, q(1, 4), q(1, 3));
        assert_eq!(canonicalize_q(&z), canonicalize_q(&rotate(&z)));
        assert_eq!(fiber(&canonicalize_q(&z)).len(), 2);
        let mid = c(3, q(0, 1), l_const(3, 1) / q(2, 1));
        assert!(canonicalize_q(&mid).branch);
    }

    #[test]
    fn catalog_entries_have_singleton_fibers() {
        for n in 2..=5 {
            assert_eq!(l_const(n, 1), q(1, 1) + q(1, n as i64));
            for e in branch_catalog(n, 6).unwrap() {
                assert!(e.point.branch, "n={n} {}", e.label);
                assert_eq!(fiber(&e.point).len(), 1);
            }
        }
    }

    #[test]
    fn j_hat_images() {
        // n even, x_1 = n/2: image is (0.x_2 x_3..., 1/2)
        let p = canonicalize_q_xy(4, &q(9, 16), &q(0, 1)).unwrap();
        let t = induced_apply(&p, Direction::Forward).unwrap();
        assert_eq!(t, canonicalize_q_xy(4, &q(1, 4), &q(1, 2)).unwrap());
        // n odd: image is (0.x_2 x_3..., (n-1)/(2n))
        let p = canonicalize_q_xy(3, &q(5, 9), &q(0, 1)).unwrap();
        let t = induced_apply(&p, Direction::Forward).unwrap();
        assert_eq!(t, canonicalize_q_xy(3, &q(2, 3), &q(1, 3)).unwrap());
    }

    #[test]
    fn inverse_round_trip() {
        let p = canonicalize_q_xy(5, &q(2, 7), &q(3, 11)).unwrap();
        let f = induced_apply(&p, Direction::Forward).unwrap();
        assert_eq!(induced_apply(&f, Direction::Inverse).unwrap(), p);
    }
}

//! Eigen-coordinates `(s, t)` around a hyperbolic fixed point: `p = s e_s + t e_u`
//! with unit eigenvectors `e_s` (contracting) and `e_u` (expanding).
//! Region tests run in `f64` and fall back to exact arithmetic in `Q(sqrt d)`
//! whenever a comparison is within rounding distance of a boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperlocal::{Region, Sector};
use crate::rational::{q, Q};
use crate::surd::QuadSurd;
use crate::toral::ToralAuto;

/// Comparisons closer than this fall back to exact arithmetic.
const MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenFrame {
    pub lambda: QuadSurd,
    pub mu: QuadSurd,
    /// Unnormalized eigenvectors.
    pub vs: (QuadSurd, QuadSurd),
    pub vu: (QuadSurd, QuadSurd),
    /// Squared lengths of `vs` and `vu`.
    pub ns: QuadSurd,
    pub nu: QuadSurd,
    /// Determinant of the basis `[vs vu]`.
    pub det: QuadSurd,
    pub lambda_f: f64,
    pub mu_f: f64,
    pub es: [f64; 2],
    pub eu: [f64; 2],
    /// Rows of the inverse of `[e_s e_u]`: `s = row_s . p`, `t = row_u . p`.
    pub row_s: [f64; 2],
    pub row_u: [f64; 2],
    /// Sine of the angle between the eigenlines.
    pub sin_su: f64,
}

impl EigenFrame {
    pub fn new(a: &ToralAuto) -> Self {
        let lambda = a.leading_eigenvalue();
        let mu = a.stable_eigenvalue();
        let vs = a.eigenvector(&mu);
        let vu = a.eigenvector(&lambda);
        let ns = &(&vs.0 * &vs.0) + &(&vs.1 * &vs.1);
        let nu = &(&vu.0 * &vu.0) + &(&vu.1 * &vu.1);
        let det = &(&vs.0 * &vu.1) - &(&vs.1 * &vu.0);
        let unit = |v: &(QuadSurd, QuadSurd)| {
            let (x, y) = (v.0.to_f64(), v.1.to_f64());
            let n = x.hypot(y);
            [x / n, y / n]
        };
        let es = unit(&vs);
        let eu = unit(&vu);
        let d = es[0] * eu[1] - es[1] * eu[0];
        EigenFrame {
            lambda_f: lambda.to_f64().abs(),
            mu_f: mu.to_f64(),
            row_s: [eu[1] / d, -eu[0] / d],
            row_u: [-es[1] / d, es[0] / d],
            sin_su: d.abs(),
            lambda,
            mu,
            vs,
            vu,
            ns,
            nu,
            det,
            es,
            eu,
        }
    }

    pub fn coords_f(&self, p: (f64, f64)) -> (f64, f64) {
        (
            self.row_s[0] * p.0 + self.row_s[1] * p.1,
            self.row_u[0] * p.0 + self.row_u[1] * p.1,
        )
    }

    /// Exact coefficients `(s', t')` with `p = s' vs + t' vu`; the unit
    /// coordinates are `s = s' |vs|`, `t = t' |vu|`.
    pub fn coords_exact(&self, p: &(Q, Q)) -> (QuadSurd, QuadSurd) {
        let x = QuadSurd::rational(p.0.clone());
        let y = QuadSurd::rational(p.1.clone());
        let s = &(&(&x * &self.vu.1) - &(&y * &self.vu.0)) / &self.det;
        let t = &(&(&self.vs.0 * &y) - &(&self.vs.1 * &x)) / &self.det;
        (s, t)
    }

    /// Region of a lift `p` (relative to the fixed point) for the square
    /// `D = {|s|, |t| < lambda eps}` and band `E` at `eps`.
    pub fn region(&self, p_f: (f64, f64), p_exact: impl FnOnce() -> (Q, Q), eps: &Q, eps_f: f64) -> Region {
        let (s, t) = self.coords_f(p_f);
        let w = self.lambda_f * eps_f;
        let (a, b) = (s.abs(), t.abs());
        let close = |u: f64, v: f64| (u - v).abs() <= MARGIN * (1.0 + v.abs());
        let ambiguous = a <= MARGIN
            || b <= MARGIN
            || close(a, b)
            || close(a, w)
            || close(b, w)
            || close(a, eps_f)
            || close(b, eps_f);
        if !ambiguous {
            return classify(s, t, a, b, w, eps_f);
        }
        self.region_exact(&p_exact(), eps)
    }

    pub fn region_exact(&self, p: &(Q, Q), eps: &Q) -> Region {
        let (s1, t1) = self.coords_exact(p);
        // compare squared unit coordinates
        let s2 = &(&s1 * &s1) * &self.ns;
        let t2 = &(&t1 * &t1) * &self.nu;
        let w = self.lambda.abs().mul_q(eps);
        let w2 = &w * &w;
        let e2 = QuadSurd::rational(eps * eps);
        if s2 >= w2 || t2 >= w2 {
            return Region::Outside;
        }
        if s1.is_zero() || t1.is_zero() {
            return Region::Axis;
        }
        if s2 == t2 {
            return Region::Diagonal;
        }
        let in_e = s2 >= e2 || t2 >= e2;
        if s2 > t2 {
            match (s1.signum() > 0, in_e) {
                (true, false) => Region::D1Star,
                (true, true) => Region::D1E,
                (false, false) => Region::D3Star,
                (false, true) => Region::D3E,
            }
        } else if t1.signum() > 0 {
            Region::D2
        } else {
            Region::D4
        }
    }

    /// Open triangular sector of `D` containing `p`: like [`Self::region`],
    /// but the open half-axes belong to the sector they bisect.
    pub fn sector(&self, p_f: (f64, f64), p_exact: impl Fn() -> (Q, Q), eps: &Q, eps_f: f64) -> Option<Sector> {
        match self.region(p_f, &p_exact, eps, eps_f) {
            Region::Axis => {
                let (s1, t1) = self.coords_exact(&p_exact());
                match (s1.signum(), t1.signum()) {
                    (1, 0) => Some(Sector::D1),
                    (-1, 0) => Some(Sector::D3),
                    (0, 1) => Some(Sector::D2),
                    (0, -1) => Some(Sector::D4),
                    _ => None,
                }
            }
            r => r.sector(),
        }
    }

    /// Requires that `A` and `A^{-1}` map the square `D` of half-width `hw`
    /// into the open square `(-1/2, 1/2)^2`, so the lifted dynamics on `D` are
    /// exactly linear.
    pub fn check_linear_window(&self, a: &ToralAuto, hw: f64) -> Result<()> {
        if a.det() != 1 || a.trace() <= 2 {
            return Err(Error::NotHyperbolic(
                "the local model needs two positive eigenvalues (det 1, trace > 2)".into(),
            ));
        }
        for m in [a.m, a.inverse_matrix()] {
            for (ss, tt) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let x = hw * (ss * self.es[0] + tt * self.eu[0]);
                let y = hw * (ss * self.es[1] + tt * self.eu[1]);
                let ix = m[0][0] as f64 * x + m[0][1] as f64 * y;
                let iy = m[1][0] as f64 * x + m[1][1] as f64 * y;
                if ix.abs().max(iy.abs()) >= 0.5 - MARGIN {
                    return Err(Error::Invalid(format!(
                        "region half-width {hw} too large for an exactly linear local model"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Angle between `e_s` and the nearer sector boundary `e_s +- e_u`.
    pub fn sector_half_angle(&self) -> f64 {
        let ang = |sign: f64| {
            let x = self.es[0] + sign * self.eu[0];
            let y = self.es[1] + sign * self.eu[1];
            let c = (x * self.es[0] + y * self.es[1]) / x.hypot(y);
            c.clamp(-1.0, 1.0).acos()
        };
        ang(1.0).min(ang(-1.0))
    }
}

fn classify(s: f64, t: f64, a: f64, b: f64, w: f64, eps: f64) -> Region {
    if a >= w || b >= w {
        return Region::Outside;
    }
    let in_e = a >= eps || b >= eps;
    if a > b {
        match (s > 0.0, in_e) {
            (true, false) => Region::D1Star,
            (true, true) => Region::D1E,
            (false, false) => Region::D3Star,
            (false, true) => Region::D3E,
        }
    } else if t > 0.0 {
        Region::D2
    } else {
        Region::D4
    }
}

/// `q(a, 2^r)` lifted to `[-1/2, 1/2)`.
pub fn dyadic_lift(a: u64, r: u32) -> Q {
    let m = 1u64 << r;
    let v = if a >= m / 2 { a as i64 - m as i64 } else { a as i64 };
    q(v, m as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_frame_is_orthonormal() {
        let f = EigenFrame::new(&ToralAuto::cat());
        assert!((f.sin_su - 1.0).abs() < 1e-12);
        assert!((f.sector_half_angle() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        // s is proportional to x - phi y
        let (s, t) = f.coords_f((1.0, 0.0));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((s.abs() - 1.0 / (1.0 + phi * phi).sqrt()).abs() < 1e-12);
        assert!(t.abs() > 0.0);
    }

    #[test]
    fn exact_and_float_regions_agree() {
        let f = EigenFrame::new(&ToralAuto::cat());
        let eps = q(1, 20);
        for a in -40i64..=40 {
            for b in -40i64..=40 {
                let p = (q(a, 512), q(b, 512));
                let pf = (a as f64 / 512.0, b as f64 / 512.0);
                assert_eq!(f.region(pf, || p.clone(), &eps, 0.05), f.region_exact(&p, &eps));
            }
        }
    }
}

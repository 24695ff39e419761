//! A model zip neighbourhood and its collapse maps.
//!
//! `N` is the closed disc of radius 1 centred at `(1, 0)`; the zip
//! `Z = [0, L] x {0}` starts at the boundary point `O = (0, 0)`.  In polar
//! coordinates about `O` the ray at angle `theta in [-pi/2, pi/2]` meets the
//! boundary at `l(theta) = 2 cos theta`.  Along each ray a piecewise-linear map
//! fixes `l(theta)` and sends the knot `a(theta) = L l(theta) / 2` to
//! `s(theta) a(theta)`:
//!
//! * `h` uses `s(theta) = |theta| / (pi/2)`, which collapses `Z` to `O`;
//! * `h_delta` uses `max(s(theta), delta / L)`, which maps `Z` onto the
//!   segment `[0, delta] x {0}` and is a bijection of `N`.
//!
//! On each ray `|h_delta - h|` peaks at the knot, so the supremum is
//! `max_theta (s_delta - s)(theta) a(theta)`, certified on an angle grid with
//! the Lipschitz constant `2L/pi + delta` of that function.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZipModel {
    /// Zip length `|Z|`.
    pub length: f64,
}

impl Default for ZipModel {
    fn default() -> Self {
        ZipModel { length: 0.5 }
    }
}

impl ZipModel {
    pub fn new(length: f64) -> Result<Self> {
        if !(length > 0.0 && length < 2.0) {
            return Err(Error::Invalid(format!("zip length {length} must lie in (0, 2)")));
        }
        Ok(ZipModel { length })
    }

    pub fn boundary_radius(&self, theta: f64) -> f64 {
        2.0 * theta.cos()
    }

    pub fn knot(&self, theta: f64) -> f64 {
        self.length * self.boundary_radius(theta) / 2.0
    }

    fn slope(theta: f64) -> f64 {
        theta.abs() / FRAC_PI_2
    }

    fn radial(&self, theta: f64, r: f64, s: f64) -> f64 {
        let a = self.knot(theta);
        let l = self.boundary_radius(theta);
        if r <= a {
            s * r
        } else {
            s * a + (r - a) * (l - s * a) / (l - a)
        }
    }

    /// Polar form `(theta, r)` of a point, or `None` outside `N`.
    pub fn polar(&self, p: (f64, f64)) -> Option<(f64, f64)> {
        let r = p.0.hypot(p.1);
        if r == 0.0 {
            return Some((0.0, 0.0));
        }
        let theta = p.1.atan2(p.0);
        if theta.abs() > FRAC_PI_2 || r > self.boundary_radius(theta) * (1.0 + 1e-12) {
            return None;
        }
        Some((theta, r))
    }

    fn map(&self, p: (f64, f64), s: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
        let (theta, r) = self
            .polar(p)
            .ok_or_else(|| Error::Invalid(format!("({}, {}) is outside the model disc", p.0, p.1)))?;
        let rr = self.radial(theta, r, s(theta));
        Ok((rr * theta.cos(), rr * theta.sin()))
    }

    /// The collapse map `h`.
    pub fn h(&self, p: (f64, f64)) -> Result<(f64, f64)> {
        self.map(p, Self::slope)
    }

    /// The homeomorphism `h_delta`.
    pub fn h_delta(&self, delta: f64, p: (f64, f64)) -> Result<(f64, f64)> {
        self.check_delta(delta)?;
        let floor = delta / self.length;
        self.map(p, |t| Self::slope(t).max(floor))
    }

    fn check_delta(&self, delta: f64) -> Result<()> {
        if !(delta > 0.0 && delta < self.length) {
            return Err(Error::Invalid(format!(
                "delta {delta} must lie in (0, {})",
                self.length
            )));
        }
        Ok(())
    }

    /// `max_r |h_delta - h|` on the ray at `theta`.
    pub fn ray_gap(&self, delta: f64, theta: f64) -> f64 {
        let s = Self::slope(theta);
        (s.max(delta / self.length) - s) * self.knot(theta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZipCheck {
    pub delta: f64,
    /// Largest gap over the angle grid.
    pub grid_sup: f64,
    /// `grid_sup + Lip * (half grid step)`: an upper bound for the true sup.
    pub certified_sup: f64,
    /// Largest gap found on a two-dimensional sample of the disc (a sanity
    /// check against the radial formula).
    pub sampled_sup: f64,
    pub boundary_fixed: bool,
    pub endpoint_fixed: bool,
}

pub fn zip_maps(model: &ZipModel, delta: f64, angles: usize) -> Result<ZipCheck> {
    model.check_delta(delta)?;
    let angles = angles.max(2);
    let step = PI / (angles - 1) as f64;
    let mut grid_sup = 0.0f64;
    for i in 0..angles {
        let theta = -FRAC_PI_2 + step * i as f64;
        grid_sup = grid_sup.max(model.ray_gap(delta, theta));
    }
    let lip = 2.0 * model.length / PI + delta;
    let certified_sup = grid_sup + lip * step / 2.0;

    let mut sampled_sup = 0.0f64;
    let mut boundary_fixed = true;
    for i in 0..64 {
        let theta = -FRAC_PI_2 + PI * (i as f64 + 0.5) / 64.0;
        let l = model.boundary_radius(theta);
        for k in 0..=64 {
            let r = l * k as f64 / 64.0;
            let p = (r * theta.cos(), r * theta.sin());
            let a = model.h(p)?;
            let b = model.h_delta(delta, p)?;
            sampled_sup = sampled_sup.max((a.0 - b.0).hypot(a.1 - b.1));
            if k == 64 {
                let tol = 1e-12;
                boundary_fixed &= (a.0 - p.0).hypot(a.1 - p.1) < tol && (b.0 - p.0).hypot(b.1 - p.1) < tol;
            }
        }
    }
    let o = (0.0, 0.0);
    let endpoint_fixed = model.h(o)? == o && model.h_delta(delta, o)? == o;
    Ok(ZipCheck {
        delta,
        grid_sup,
        certified_sup,
        sampled_sup,
        boundary_fixed,
        endpoint_fixed,
    })
}

/// `delta = L / 2^k` for `k = 1..=steps`.
pub fn dyadic_schedule(model: &ZipModel, steps: u32) -> Vec<f64> {
    (1..=steps).map(|k| model.length / 2f64.powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapse_and_bijection() {
        let m = ZipModel::default();
        // h sends the zip to O
        for x in [0.0, 0.1, 0.3, 0.5] {
            let p = m.h((x, 0.0)).unwrap();
            assert!(p.0.abs() < 1e-15 && p.1.abs() < 1e-15);
        }
        // h_delta sends the zip onto [0, delta]
        let p = m.h_delta(0.125, (0.5, 0.0)).unwrap();
        assert!((p.0 - 0.125).abs() < 1e-12);
        // the far boundary point stays put
        let p = m.h_delta(0.125, (2.0, 0.0)).unwrap();
        assert!((p.0 - 2.0).abs() < 1e-12);
        assert!(m.h_delta(0.0, (0.1, 0.0)).is_err());
        assert!(m.h((3.0, 0.0)).is_err());
    }

    #[test]
    fn sup_distance_shrinks() {
        let m = ZipModel::default();
        let mut prev = f64::INFINITY;
        for d in dyadic_schedule(&m, 10) {
            let c = zip_maps(&m, d, 4096).unwrap();
            // the exact sup is delta, attained at theta = 0
            assert!(c.certified_sup <= prev);
            assert!(c.sampled_sup <= c.certified_sup + 1e-12);
            assert!(c.grid_sup <= d + 1e-15 && c.certified_sup >= d);
            assert!((zip_maps(&m, d, 4097).unwrap().grid_sup - d).abs() < 1e-12);
            assert!(c.boundary_fixed && c.endpoint_fixed);
            prev = c.certified_sup;
        }
        assert!(prev < 1e-3);
    }
}

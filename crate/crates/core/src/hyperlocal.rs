//! Local dynamics of a diagonal hyperbolic linear map `L(x, y) = (x / lambda, lambda y)`
//! near its fixed point: the sector decomposition of `D = (-lambda eps, lambda eps)^2`,
//! the band `E`, and the proportion of an excursion through `D` spent in `D_1^*`.
//!
//! Every test is exact for rational `lambda`.

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypLinear {
    pub lambda: Q,
}

impl HypLinear {
    pub fn new(lambda: Q) -> Result<Self> {
        if lambda <= Q::from_integer(1.into()) {
            return Err(Error::NotHyperbolic(format!(
                "expansion factor {} must exceed 1",
                fmt_q(&lambda)
            )));
        }
        Ok(HypLinear { lambda })
    }

    pub fn apply(&self, p: &(Q, Q)) -> (Q, Q) {
        (&p.0 / &self.lambda, &p.1 * &self.lambda)
    }

    pub fn apply_inverse(&self, p: &(Q, Q)) -> (Q, Q) {
        (&p.0 * &self.lambda, &p.1 / &self.lambda)
    }

    pub fn iterate(&self, p: &(Q, Q), k: i64) -> (Q, Q) {
        let mut w = p.clone();
        for _ in 0..k.unsigned_abs() {
            w = if k >= 0 { self.apply(&w) } else { self.apply_inverse(&w) };
        }
        w
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub lambda: Q,
    pub eps: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Outside,
    /// On a coordinate axis (including the origin).
    Axis,
    /// On a diagonal `|p| = |q|`; assigned to no sector.
    Diagonal,
    D1Star,
    D1E,
    D2,
    D3Star,
    D3E,
    D4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    D1,
    D2,
    D3,
    D4,
}

impl Region {
    pub fn sector(self) -> Option<Sector> {
        match self {
            Region::D1Star | Region::D1E => Some(Sector::D1),
            Region::D2 => Some(Sector::D2),
            Region::D3Star | Region::D3E => Some(Sector::D3),
            Region::D4 => Some(Sector::D4),
            _ => None,
        }
    }

    pub fn in_d(self) -> bool {
        self != Region::Outside
    }
}

impl RegionSpec {
    pub fn new(lambda: Q, eps: Q) -> Result<Self> {
        HypLinear::new(lambda.clone())?;
        if eps <= Q::zero() {
            return Err(Error::Invalid("eps must be positive".into()));
        }
        Ok(RegionSpec { lambda, eps })
    }

    pub fn half_width(&self) -> Q {
        &self.lambda * &self.eps
    }

    pub fn in_d(&self, p: &(Q, Q)) -> bool {
        let w = self.half_width();
        p.0.abs() < w && p.1.abs() < w
    }

    /// The two bands `eps <= |t| < lambda eps` in either coordinate, inside `D`.
    pub fn in_e(&self, p: &(Q, Q)) -> bool {
        let w = self.half_width();
        let band = |t: &Q| {
            let a = t.abs();
            a >= self.eps && a < w
        };
        self.in_d(p) && (band(&p.0) || band(&p.1))
    }

    pub fn classify(&self, p: &(Q, Q)) -> Region {
        if !self.in_d(p) {
            return Region::Outside;
        }
        if p.0.is_zero() || p.1.is_zero() {
            return Region::Axis;
        }
        let (ax, ay) = (p.0.abs(), p.1.abs());
        if ax == ay {
            return Region::Diagonal;
        }
        let e = self.in_e(p);
        if ax > ay {
            match (p.0.is_positive(), e) {
                (true, false) => Region::D1Star,
                (true, true) => Region::D1E,
                (false, false) => Region::D3Star,
                (false, true) => Region::D3E,
            }
        } else if p.1.is_positive() {
            Region::D2
        } else {
            Region::D4
        }
    }

    /// Sector membership with the half-axes attached: the open positive
    /// `x`-ray belongs to `D_1` and the negative one to `D_3`.
    pub fn sector_of(&self, p: &(Q, Q)) -> Option<Sector> {
        if !self.in_d(p) {
            return None;
        }
        let (ax, ay) = (p.0.abs(), p.1.abs());
        if ax > ay {
            Some(if p.0.is_positive() { Sector::D1 } else { Sector::D3 })
        } else if ay > ax {
            Some(if p.1.is_positive() { Sector::D2 } else { Sector::D4 })
        } else {
            None
        }
    }
}

/// Which of the two mirror-image variants is being analysed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Entry through `D_1`, counting `D_1^*` visits.
    D1,
    /// Entry through `D_3`, counting `D_3^*` visits.
    D3,
}

impl Variant {
    fn entry_sector(self) -> Sector {
        match self {
            Variant::D1 => Sector::D1,
            Variant::D3 => Sector::D3,
        }
    }

    fn star(self) -> Region {
        match self {
            Variant::D1 => Region::D1Star,
            Variant::D3 => Region::D3Star,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcursionStats {
    /// `L^N(z)` is the last point before the orbit enters `D`.
    pub n: usize,
    /// Number of consecutive iterates `L^{N+1} .. L^{N+K}` inside `D`.
    pub k: usize,
    pub star_visits: usize,
    /// `star_visits / k`.
    pub ratio: Q,
    /// Crossover index: the largest `i` with `|x_i| > |y_i|`, counting `i`
    /// from the entry point `L^{N+1}(z)` as `i = 0`.
    pub m: usize,
    /// Region of `L^{N+j}(z)` for `j = 1..=K`.
    pub trace: Vec<Region>,
    pub witness: WitnessCheck,
}

/// The intermediate claims of the half-bound argument, checked on one
/// excursion with `(p, q)` the entry point and `i` counted from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCheck {
    /// `beta^m |p| > lambda^m |q|` with `beta = 1/lambda`.
    pub crossover_before: bool,
    /// `beta^{m+1} |p| <= lambda^{m+1} |q| < lambda eps`.
    pub crossover_after: bool,
    /// Iterates `i = 1..=m` lie in the starred sector.
    pub star_run: bool,
    /// Iterates `i = m+1..=2m` lie in `D_2 u D_4` (or on a diagonal at `i = m+1`).
    pub vertical_run: bool,
    /// `K >= 2m + 1`.
    pub length: bool,
}

impl WitnessCheck {
    pub fn holds(&self) -> bool {
        self.crossover_before && self.crossover_after && self.star_run && self.vertical_run && self.length
    }
}

/// First excursion of `z` through `D` within `horizon` iterates that enters
/// through the variant's sector and visits its starred region at least once.
pub fn excursion_stats(
    l: &HypLinear,
    spec: &RegionSpec,
    z: &(Q, Q),
    horizon: usize,
    variant: Variant,
) -> Result<ExcursionStats> {
    let mut prev = z.clone();
    for n in 0..horizon {
        let cur = l.apply(&prev);
        if !spec.in_d(&prev) && spec.in_d(&cur) {
            // a linear hyperbolic orbit meets D in one consecutive run
            return analyse_excursion(l, spec, n, cur, horizon - n, variant);
        }
        prev = cur;
    }
    Err(Error::NoExcursion(horizon))
}

fn analyse_excursion(
    l: &HypLinear,
    spec: &RegionSpec,
    n: usize,
    entry: (Q, Q),
    budget: usize,
    variant: Variant,
) -> Result<ExcursionStats> {
    if spec.sector_of(&entry) != Some(variant.entry_sector()) {
        return Err(Error::NoExcursion(n));
    }
    let mut trace = Vec::new();
    let mut pts = Vec::new();
    let mut w = entry.clone();
    while spec.in_d(&w) {
        if trace.len() >= budget {
            return Err(Error::NoExcursion(n + budget));
        }
        trace.push(spec.classify(&w));
        pts.push(w.clone());
        w = l.apply(&w);
    }
    let k = trace.len();
    let star_visits = trace.iter().filter(|r| **r == variant.star()).count();
    if star_visits == 0 {
        return Err(Error::NoExcursion(n));
    }
    let m = pts.iter().take_while(|p| p.0.abs() > p.1.abs()).count() - 1;
    let witness = check_witness(l, spec, &entry, m, &trace, variant);
    Ok(ExcursionStats {
        n,
        k,
        star_visits,
        ratio: Q::new(star_visits.into(), k.into()),
        m,
        trace,
        witness,
    })
}

fn check_witness(
    l: &HypLinear,
    spec: &RegionSpec,
    entry: &(Q, Q),
    m: usize,
    trace: &[Region],
    variant: Variant,
) -> WitnessCheck {
    let lam = &l.lambda;
    let pw = |k: usize| num_traits::pow(lam.clone(), k);
    let (p, q) = (entry.0.abs(), entry.1.abs());
    let crossover_before = &p / pw(m) > &q * pw(m);
    let after_lhs = &p / pw(m + 1);
    let after_mid = &q * pw(m + 1);
    let crossover_after = after_lhs <= after_mid && after_mid < spec.half_width();
    let star_run = m >= 1 && (1..=m).all(|i| trace.get(i) == Some(&variant.star()));
    let vertical_run = (m + 1..=2 * m).all(|i| match trace.get(i) {
        Some(Region::D2) | Some(Region::D4) => true,
        Some(Region::Diagonal) => i == m + 1,
        _ => false,
    });
    WitnessCheck {
        crossover_before,
        crossover_after,
        star_run,
        vertical_run,
        length: trace.len() > 2 * m,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfBoundReport {
    pub variant: Variant,
    pub samples: usize,
    pub qualifying: usize,
    pub max_ratio: Option<Q>,
    pub bound_violations: Vec<(Q, Q)>,
    pub witness_failures: Vec<(Q, Q)>,
    /// Excursions entering through the sector without any starred visit
    /// (the crossover index is 0); these are not qualifying.
    pub entries_without_star: usize,
    pub passed: bool,
}

impl HalfBoundReport {
    /// JSON summary with rationals written as `p/q` strings.
    pub fn to_json(&self) -> serde_json::Value {
        let pair = |p: &(Q, Q)| format!("({}, {})", fmt_q(&p.0), fmt_q(&p.1));
        serde_json::json!({
            "variant": self.variant,
            "samples": self.samples,
            "qualifying": self.qualifying,
            "max_ratio": self.max_ratio.as_ref().map(fmt_q),
            "bound_violations": self.bound_violations.iter().map(pair).collect::<Vec<_>>(),
            "witness_failures": self.witness_failures.iter().map(pair).collect::<Vec<_>>(),
            "entries_without_star": self.entries_without_star,
            "passed": self.passed,
        })
    }
}

pub fn verify_half_bound(
    l: &HypLinear,
    spec: &RegionSpec,
    samples: &[(Q, Q)],
    horizon: usize,
    variant: Variant,
) -> HalfBoundReport {
    let half = Q::new(1.into(), 2.into());
    let mut rep = HalfBoundReport {
        variant,
        samples: samples.len(),
        qualifying: 0,
        max_ratio: None,
        bound_violations: Vec::new(),
        witness_failures: Vec::new(),
        entries_without_star: 0,
        passed: true,
    };
    for z in samples {
        match excursion_stats(l, spec, z, horizon, variant) {
            Ok(st) => {
                rep.qualifying += 1;
                if st.ratio > half {
                    rep.bound_violations.push(z.clone());
                }
                if !st.witness.holds() {
                    rep.witness_failures.push(z.clone());
                }
                if rep.max_ratio.as_ref().is_none_or(|r| &st.ratio > r) {
                    rep.max_ratio = Some(st.ratio);
                }
            }
            Err(_) => {
                if enters_without_star(l, spec, z, horizon, variant) {
                    rep.entries_without_star += 1;
                }
            }
        }
    }
    rep.passed = rep.bound_violations.is_empty() && rep.witness_failures.is_empty();
    rep
}

fn enters_without_star(l: &HypLinear, spec: &RegionSpec, z: &(Q, Q), horizon: usize, variant: Variant) -> bool {
    let mut prev = z.clone();
    for _ in 0..horizon {
        let cur = l.apply(&prev);
        if !spec.in_d(&prev) && spec.in_d(&cur) {
            return spec.sector_of(&cur) == Some(variant.entry_sector());
        }
        prev = cur;
    }
    false
}

/// Random starting points whose orbits enter `D` through the variant's sector
/// with at least one starred visit.  The entry point `(p, q)` is drawn with
/// `eps <= |p| < lambda eps` and `0 < |q| < |p| / lambda^2`; the returned
/// point is `L^{-(N+1)}` of it for a random `N` in `0..8`.
pub fn sample_excursions<R: Rng>(
    l: &HypLinear,
    spec: &RegionSpec,
    count: usize,
    rng: &mut R,
    variant: Variant,
) -> Vec<(Q, Q)> {
    let den: i64 = 1 << 20;
    let lam2 = &l.lambda * &l.lambda;
    (0..count)
        .map(|_| {
            let u = Q::new(rng.gen_range(0..den).into(), den.into());
            let v = Q::new(rng.gen_range(1..den).into(), den.into());
            let p = &spec.eps + (spec.half_width() - &spec.eps) * u;
            let mut q = &p / &lam2 * v;
            if rng.gen_bool(0.5) {
                q = -q;
            }
            let entry = match variant {
                Variant::D1 => (p, q),
                Variant::D3 => (-p, q),
            };
            let back = rng.gen_range(0..8i64);
            l.iterate(&entry, -(back + 1))
        })
        .collect()
}

/// Entry points at and near the edges of the band `E` and the crossover
/// boundary `|q| = |p| / lambda^2`, pulled back one step.
pub fn adversarial_samples(l: &HypLinear, spec: &RegionSpec, grid: i64, variant: Variant) -> Vec<(Q, Q)> {
    let lam2 = &l.lambda * &l.lambda;
    let w = spec.half_width();
    let mut out = Vec::new();
    for a in 0..grid {
        // p runs over [eps, lambda eps) including eps itself
        let p = &spec.eps + (&w - &spec.eps) * Q::new(a.into(), grid.into());
        for b in 1..=grid {
            // q up to, and just below, the crossover boundary
            let frac = Q::new(b.into(), (grid + 1).into());
            for sign in [1, -1] {
                let q = &p / &lam2 * &frac * Q::from_integer(sign.into());
                let entry = match variant {
                    Variant::D1 => (p.clone(), q),
                    Variant::D3 => (-p.clone(), q),
                };
                out.push(l.apply_inverse(&entry));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn setup() -> (HypLinear, RegionSpec) {
        (
            HypLinear::new(q(2, 1)).unwrap(),
            RegionSpec::new(q(2, 1), q(1, 10)).unwrap(),
        )
    }

    #[test]
    fn classification() {
        let (_, s) = setup();
        assert_eq!(s.classify(&(q(0, 1), q(0, 1))), Region::Axis);
        assert_eq!(s.classify(&(q(15, 100), q(12, 100))), Region::D1E);
        assert!(s.in_e(&(q(15, 100), q(12, 100))));
        // first coordinate in [eps, lambda eps): in E under the two-band formula
        assert_eq!(s.classify(&(q(15, 100), q(1, 100))), Region::D1E);
        assert_eq!(s.classify(&(q(5, 100), q(1, 100))), Region::D1Star);
        assert_eq!(s.classify(&(q(1, 100), q(5, 100))), Region::D2);
        assert_eq!(s.classify(&(q(-5, 100), q(1, 100))), Region::D3Star);
        assert_eq!(s.classify(&(q(1, 100), q(-5, 100))), Region::D4);
        assert_eq!(s.classify(&(q(3, 100), q(-3, 100))), Region::Diagonal);
        assert_eq!(s.classify(&(q(2, 10), q(0, 1))), Region::Outside);
    }

    #[test]
    fn worked_excursion() {
        let (l, s) = setup();
        let st = excursion_stats(&l, &s, &(q(24, 100), q(4, 1000)), 100, Variant::D1).unwrap();
        assert_eq!(st.n, 0);
        assert_eq!(st.k, 5);
        assert_eq!(st.m, 1);
        assert_eq!(st.star_visits, 1);
        assert_eq!(st.ratio, q(1, 5));
        assert!(st.witness.holds());
    }

    #[test]
    fn expanding_axis_never_qualifies() {
        let (l, s) = setup();
        assert!(excursion_stats(&l, &s, &(q(0, 1), q(1, 2)), 50, Variant::D1).is_err());
    }

    #[test]
    fn mirror_symmetry() {
        let (l, s) = setup();
        let z = (q(24, 100), q(4, 1000));
        let a = excursion_stats(&l, &s, &z, 100, Variant::D1).unwrap();
        let b = excursion_stats(&l, &s, &(-z.0.clone(), -z.1.clone()), 100, Variant::D3).unwrap();
        assert_eq!((a.k, a.star_visits, a.m), (b.k, b.star_visits, b.m));
    }

    #[test]
    fn empty_sample_set_passes() {
        let (l, s) = setup();
        assert!(verify_half_bound(&l, &s, &[], 10, Variant::D1).passed);
    }
}

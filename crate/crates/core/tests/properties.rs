//! Randomized structural properties.

use carpet_core::chamanara::{baker, baker_iter, canonicalize, check_semiconjugacy, dist_sq, Direction};
use carpet_core::hyperlocal::{excursion_stats, HypLinear, RegionSpec, Variant};
use carpet_core::quotient::{canonicalize_q, induced_apply, induced_iter};
use carpet_core::rational::q;
use carpet_core::symbolic::{BiSequence, Tail};
use carpet_core::toral::Step;
use carpet_core::{ToralAuto, TorusPoint};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = (u32, i64, i64, i64)> {
    (2u32..=5, 1i64..=64).prop_flat_map(|(n, d)| (Just(n), 0..=d, 0..=d, Just(d)))
}

fn tail(n: u32) -> impl Strategy<Value = Tail> {
    let digit = 0..n as u8;
    (
        prop::collection::vec(digit.clone(), 0..4),
        prop::collection::vec(digit, 1..4),
    )
        .prop_map(|(pre, per)| Tail::new(pre, per))
}

fn bisequence() -> impl Strategy<Value = BiSequence> {
    (2u32..=4).prop_flat_map(|n| (tail(n), tail(n)).prop_map(move |(l, r)| BiSequence::new(n, l, r).unwrap()))
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent((n, a, b, d) in point()) {
        let z = canonicalize(n, &q(a, d), &q(b, d)).unwrap();
        prop_assert_eq!(canonicalize(n, &z.x, &z.y).unwrap(), z);
    }

    #[test]
    fn baker_is_invertible((n, a, b, d) in point(), k in 1i64..6) {
        let z = canonicalize(n, &q(a, d), &q(b, d)).unwrap();
        prop_assert_eq!(baker_iter(&baker_iter(&z, k), -k), z.clone());
        prop_assert_eq!(baker(&baker(&z, Direction::Inverse), Direction::Forward), z);
    }

    #[test]
    fn class_distance_is_a_metric_on_samples((n, a, b, d) in point(), (c, e) in (0i64..=64, 0i64..=64)) {
        let z = canonicalize(n, &q(a, d), &q(b, d)).unwrap();
        let w = canonicalize(n, &q(c, 64), &q(e, 64)).unwrap();
        prop_assert_eq!(dist_sq(&z, &w), dist_sq(&w, &z));
        prop_assert_eq!(dist_sq(&z, &z), q(0, 1));
        prop_assert_eq!(dist_sq(&z, &w) == q(0, 1), z == w);
    }

    #[test]
    fn induced_map_commutes_with_projection((n, a, b, d) in point(), k in 1i64..5) {
        let z = canonicalize(n, &q(a, d), &q(b, d)).unwrap();
        let p = canonicalize_q(&z);
        prop_assert_eq!(canonicalize_q(&baker_iter(&z, k)), induced_iter(&p, k).unwrap());
        let fwd = induced_apply(&p, Direction::Forward).unwrap();
        prop_assert_eq!(induced_apply(&fwd, Direction::Inverse).unwrap(), p);
    }

    #[test]
    fn shift_factors_through_baker(s in bisequence()) {
        prop_assert!(check_semiconjugacy(&s).holds);
    }

    #[test]
    fn toral_inverse_undoes_forward(a in 0i64..50, b in 0i64..50, d in 1i64..50, k in 1i64..8) {
        let m = ToralAuto::cat();
        let z = TorusPoint::new(q(a, d), q(b, d));
        prop_assert_eq!(m.iterate(&m.iterate(&z, k), -k), z.clone());
        prop_assert_eq!(m.apply(&m.apply(&z, Step::Inverse), Step::Forward), z);
    }

    #[test]
    fn excursion_ratio_is_at_most_half(p in 1i64..2000, qq in 1i64..2000, mirror in any::<bool>()) {
        let l = HypLinear::new(q(2, 1)).unwrap();
        let spec = RegionSpec::new(q(2, 1), q(1, 10)).unwrap();
        let variant = if mirror { Variant::D3 } else { Variant::D1 };
        // start outside D near the contracting axis so the orbit enters and leaves
        let x = q(1, 4) + q(p, 100_000);
        let z = (if mirror { -x } else { x }, q(qq - 1000, 1_000_000));
        if let Ok(st) = excursion_stats(&l, &spec, &z, 128, variant) {
            if st.m > 0 {
                prop_assert!(st.ratio <= q(1, 2));
                prop_assert!(st.witness.holds());
            }
        }
    }
}

#[test]
fn excursion_sweep_reaches_the_sector() {
    let l = HypLinear::new(q(2, 1)).unwrap();
    let spec = RegionSpec::new(q(2, 1), q(1, 10)).unwrap();
    for (sign, variant) in [(1, Variant::D1), (-1, Variant::D3)] {
        let mut qualifying = 0;
        for p in (1..2000).step_by(37) {
            for qq in (1..2000).step_by(41) {
                let z = ((q(1, 4) + q(p, 100_000)) * q(sign, 1), q(qq - 1000, 1_000_000));
                if let Ok(st) = excursion_stats(&l, &spec, &z, 128, variant) {
                    if st.m > 0 {
                        qualifying += 1;
                        assert!(st.ratio <= q(1, 2) && st.witness.holds());
                    }
                }
            }
        }
        assert!(qualifying > 100, "{variant:?}: {qualifying}");
    }
}

use super::*;
use crate::toral::periodic_points;

fn cat() -> Atlas {
    Atlas::default_cat()
}

#[test]
fn blow_up_and_collapse() {
    let a = cat();
    assert_eq!(a.depth(), 1);
    let z = z_target(&a, 1, 1).unwrap();
    check_compatible(&a, &z).unwrap();
    // collapsing the circle recovers the blown point
    assert_eq!(z.coords[0], Coord::Base(TorusPoint::zero()));
    assert_eq!(collapse(&a, 1, &z.coords[1]), z.coords[0]);
    assert!(LimPoint::from_base(&a, TorusPoint::zero(), 1).is_err());
    assert!(a.blow_up(vec![TorusPoint::zero()]).is_err());
}

#[test]
fn two_period_two_orbits_give_four_charts() {
    let a = Atlas::default_cat_depth(3).unwrap();
    let charts: usize = a.stages[1..].iter().map(|s| s.points.len()).sum();
    assert_eq!(charts, 4);
    for s in &a.stages[1..] {
        assert!(s.radius <= a.stages[0].radius / 2.0);
    }
    let orbits = periodic_points(&a.matrix, 5).unwrap();
    assert!(orbits.iter().any(|o| o.period == 2));
}

#[test]
fn z1_is_fixed_and_four_directions_fixed() {
    let a = Atlas::default_cat_depth(3).unwrap();
    for sign in [1, -1] {
        let z = z_target(&a, sign, 3).unwrap();
        let w = h_apply(&a, &z, Step::Forward).unwrap();
        match (&z.coords[1], &w.coords[1]) {
            (Coord::Circle { dir: d0, .. }, Coord::Circle { dir: d1, .. }) => assert!(same_direction(d0, d1)),
            _ => panic!("expected circle coordinates"),
        }
        let back = h_apply(&a, &w, Step::Inverse).unwrap();
        assert_eq!(back.coords[0], z.coords[0]);
    }
    assert_eq!(fixed_directions(&a).len(), 4);
    assert_eq!(count_fixed_angles(&a, 4096), 4);
}

#[test]
fn transport_matches_matrix_angle() {
    let a = cat();
    let t: f64 = 0.3;
    let (x, y) = (2.0 * t.cos() + t.sin(), t.cos() + t.sin());
    assert!((transport_angle(&a, t) - y.atan2(x)).abs() < 1e-12);
}

#[test]
fn off_circle_points_follow_the_base_map() {
    let a = Atlas::default_cat_depth(3).unwrap();
    let p = TorusPoint::new(q(1, 7), q(3, 11));
    let z = LimPoint::from_base(&a, p.clone(), 3).unwrap();
    let w = h_apply(&a, &z, Step::Forward).unwrap();
    assert_eq!(w.project0(), &a.matrix.apply(&p, Step::Forward));
}

#[test]
fn metric_examples() {
    let a = Atlas::default_cat_depth(3).unwrap();
    let z1 = z_target(&a, 1, 3).unwrap();
    let z2 = z_target(&a, -1, 3).unwrap();
    assert_eq!(dinf(&a, &z1, &z1).unwrap().value, 0.0);
    let d = dinf(&a, &z1, &z2).unwrap();
    let d1 = 2.0 * a.stages[0].inner;
    assert!(d.value >= d1 / (2.0 * (1.0 + d1)) - 1e-15);
    assert_eq!(d.tail_bound, 0.125);
    // a single coordinate at distance 1 contributes 1 / (2^j 2)
    let term = |j: i32, dj: f64| dj / (2f64.powi(j) * (1.0 + dj));
    assert_eq!(term(3, 1.0), 1.0 / 16.0);
}

#[test]
fn incompatible_points_are_rejected() {
    let a = Atlas::default_cat_depth(2).unwrap();
    let mut z = LimPoint::from_base(&a, TorusPoint::new(q(1, 3), q(1, 3)), 2).unwrap();
    z.coords[1] = Coord::Base(TorusPoint::new(q(1, 4), q(1, 3)));
    assert!(h_apply(&a, &z, Step::Forward).is_err());
}

#[test]
fn ball_projection_threshold() {
    let a = Atlas::default_cat_depth(3).unwrap();
    let m = ball::threshold(&a);
    assert!(m > 0.0);
    for sign in [1, -1] {
        let rep = ball::ball_projection_search(&a, sign, 10_000, 7, 20).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.r_star >= m / 4.0);
        let above = rep.above.expect("a failing radius exists");
        assert!(above.witness.is_some());
        assert!(above.r > rep.r_star);
    }
}

#[test]
fn ball_check_empty_sample_is_vacuous() {
    let a = cat();
    let c = ball::ball_projection_check(&a, 1, 0.01, 0, 1).unwrap();
    assert!(c.passed() && c.inside == 0);
    assert!(ball::ball_projection_check(&a, 1, 0.0, 10, 1).is_err());
}

#[test]
fn falsifiers_small_grid() {
    let a = Atlas::default_cat_depth(3).unwrap();
    let app = falsify::app_falsify(&a, 0.1, 0.01, 100, 8, 1 << 30).unwrap();
    assert!(app.passed(), "{:?}", app.reasons);
    assert_eq!(app.grid_candidates, (1 << 16) - 1);
    assert!(app.label.contains("not a proof"));
    let total: u64 = app.reasons.values().sum();
    assert_eq!(total, app.grid_candidates + app.circle_candidates);
    let spec = falsify::spec_falsify(&a, 0.01, 100, 8, 1 << 30).unwrap();
    assert!(spec.passed(), "{:?}", spec.reasons);
    assert!(falsify::spec_falsify(&a, 0.01, 0, 8, 1 << 30).is_err());
    assert!(falsify::app_falsify(&a, 0.1, 0.01, 150, 8, 1 << 30).is_err());
    assert!(falsify::app_falsify(&a, 0.1, 0.01, 100, 8, 10).is_err());
}

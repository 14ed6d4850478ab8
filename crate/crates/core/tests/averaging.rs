//! Haar averaging: exact identities under S¹ and an independent numeric
//! quadrature check under SO(3).

mod common;

use dirac_core::actions::{average, is_invariant};
use dirac_core::calculus::VectorField;
use dirac_core::expr::{ratio, Rat};
use dirac_core::sampling::rng;
use dirac_core::scenes::builtin;
use rand::Rng;

#[test]
fn circle_average_of_translation_vanishes() {
    let scene = builtin("s1_r3").unwrap();
    let dx = VectorField::coordinate(scene.chart.clone(), 0);
    assert!(average(&dx, &scene.action).unwrap().is_zero());
    let dz = VectorField::coordinate(scene.chart.clone(), 2);
    assert_eq!(average(&dz, &scene.action).unwrap(), dz);
}

#[test]
fn circle_average_is_idempotent_and_linear() {
    let scene = builtin("s1_r3").unwrap();
    let a = &scene.action;
    let mut r = rng(11);
    for _ in 0..100 {
        let x = common::random_field(&scene.chart, 3, &mut r);
        let y = common::random_field(&scene.chart, 3, &mut r);
        let (s, t): (Rat, Rat) = (ratio(r.gen_range(-9..=9), r.gen_range(1..=5)), ratio(r.gen_range(-9..=9), r.gen_range(1..=5)));
        let ax = average(&x, a).unwrap();
        let ay = average(&y, a).unwrap();
        assert!(is_invariant(&ax, a).unwrap().holds(), "{x}");
        assert_eq!(average(&ax, a).unwrap(), ax);
        let combo = &x.scale_rat(&s) + &y.scale_rat(&t);
        assert_eq!(average(&combo, a).unwrap(), &ax.scale_rat(&s) + &ay.scale_rat(&t));
    }
}

#[test]
fn gauss_legendre_rule_is_exact_to_degree_23() {
    let rule = common::gauss_legendre(12);
    for d in 0..=23 {
        let got: f64 = rule.iter().map(|(x, w)| w * x.powi(d)).sum();
        let want = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
        assert!((got - want).abs() < 1e-13, "degree {d}: {got} vs {want}");
    }
}

#[test]
fn so3_exact_average_matches_quadrature() {
    let scene = builtin("so3_r3r3").unwrap();
    let mut r = rng(5);
    let fields = [
        VectorField::parse(&scene.chart, &["1", "0", "0", "0", "0", "0"]).unwrap(),
        VectorField::parse(&scene.chart, &["x1*y2", "z1^2", "0", "x2*y1*z2", "0", "y1"]).unwrap(),
        common::random_field(&scene.chart, 3, &mut r),
    ];
    for x in &fields {
        let exact = average(x, &scene.action).unwrap();
        assert!(is_invariant(&exact, &scene.action).unwrap().holds());
        for _ in 0..10 {
            let p: Vec<f64> = (0..6).map(|_| r.gen_range(-2.0..2.0)).collect();
            let want = common::so3_quadrature_average(x, &p);
            let got = exact.eval_f64(&p);
            let err = common::max_abs_diff(&got, &want);
            assert!(err < 1e-9, "{x} at {p:?}: {got:?} vs {want:?} ({err:e})");
        }
    }
}

//! Seeded property suites, all checked in exact arithmetic.

mod common;

use dirac_core::calculus::{courant_bracket, lie_bracket, skew_bracket, Section};
use dirac_core::distributions::{combine, eval_at, Distribution};
use dirac_core::expr::{Rat, RatFn};
use dirac_core::sampling::{random_points, rng};
use dirac_core::scenes::{builtin, BUILTIN_NAMES};
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn builtin_structures_are_lagrangian() {
    let mut r = rng(1);
    for name in BUILTIN_NAMES {
        let scene = builtin(name).unwrap();
        let n = scene.chart.dim();
        let gens = scene.dirac.generators();
        for p in random_points(n, 50, &mut r, &[]) {
            let vals: Vec<Vec<Rat>> = gens.iter().map(|g| common::section_value(g, &p)).collect();
            for a in &vals {
                for b in &vals {
                    assert!(common::pairing(a, b).is_zero(), "{name} at {p:?}");
                }
            }
            assert_eq!(common::rank(&vals), n, "{name} at {p:?}");
        }
    }
}

#[test]
fn double_orthogonal_is_identity() {
    let c = common::chart(&["x", "y", "z"]);
    let mut r = rng(2);
    let mut checked = 0;
    while checked < 100 {
        let k = r.gen_range(1..=4);
        let gens: Vec<Section> = (0..k)
            .map(|_| Section::new(common::random_field(&c, 2, &mut r), common::random_form(&c, 2, &mut r)).unwrap())
            .collect();
        let d = Distribution::pontryagin(c.clone(), gens).unwrap();
        for p in random_points(3, 5, &mut r, &[]) {
            let fiber = eval_at(&d, &p).unwrap();
            let perp = fiber.orthogonal();
            assert!(perp.orthogonal().same_span(&fiber));

            let raw: Vec<Vec<Rat>> = d.generators().iter().map(|g| common::section_value(g, &p)).collect();
            let oracle_perp = common::orthogonal(&raw, 3);
            assert!(common::same_span(&perp.basis, &oracle_perp));
            assert!(common::same_span(&common::orthogonal(&oracle_perp, 3), &raw));
            assert_eq!(fiber.rank() + perp.rank(), 6);
            checked += 1;
        }
    }
}

fn random_combination(gens: &[Section], r: &mut dirac_core::sampling::SampleRng) -> Section {
    let chart = gens[0].chart();
    let coeffs: Vec<RatFn> = gens.iter().map(|_| RatFn::from_poly(common::random_poly(chart.dim(), 2, 2, r))).collect();
    combine(chart, gens, &coeffs)
}

#[test]
fn skew_bracket_equals_courant_on_isotropic_pairs() {
    let mut r = rng(3);
    for name in BUILTIN_NAMES {
        let scene = builtin(name).unwrap();
        for _ in 0..10 {
            let a = random_combination(scene.dirac.generators(), &mut r);
            let b = random_combination(scene.dirac.generators(), &mut r);
            assert!(dirac_core::calculus::pairing(&a, &b).unwrap().is_zero());
            assert_eq!(skew_bracket(&a, &b).unwrap(), courant_bracket(&a, &b).unwrap(), "{name}");
        }
    }
}

#[test]
fn lie_bracket_satisfies_jacobi() {
    let c = common::chart(&["x", "y", "z"]);
    let mut r = rng(4);
    for _ in 0..200 {
        let [x, y, z] = [0; 3].map(|_| common::random_field(&c, 2, &mut r));
        let xyz = lie_bracket(&x, &lie_bracket(&y, &z).unwrap()).unwrap();
        let yzx = lie_bracket(&y, &lie_bracket(&z, &x).unwrap()).unwrap();
        let zxy = lie_bracket(&z, &lie_bracket(&x, &y).unwrap()).unwrap();
        assert!((&(&xyz + &yzx) + &zxy).is_zero());
    }
}

fn rat_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Rat>>> {
    prop::collection::vec(prop::collection::vec((-4i64..=4, 1i64..=3), cols), rows)
        .prop_map(|m| m.into_iter().map(|row| row.into_iter().map(|(p, q)| Rat::new(p.into(), q.into())).collect()).collect())
}

proptest! {
    #[test]
    fn oracle_rank_nullity(m in rat_matrix(4, 6)) {
        let kernel = common::nullspace(&m, 6);
        prop_assert_eq!(common::rank(&m) + kernel.len(), 6);
        for v in &kernel {
            for row in &m {
                let dot = row.iter().zip(v).fold(Rat::zero(), |acc, (a, b)| acc + a * b);
                prop_assert!(dot.is_zero());
            }
        }
    }
}

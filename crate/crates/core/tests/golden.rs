//! Frozen reference values for the bundled scenes, typed in by hand and
//! compared exactly.

mod common;

use std::sync::Arc;

use dirac_core::calculus::{courant_bracket, exterior_derivative_fn, Section, VectorField};
use dirac_core::distributions::{combine, membership_in};
use dirac_core::dynamics::{reduce_hamiltonian, solve_admissible, Admissibility};
use dirac_core::expr::{parse_expr, ratio, Chart, Rat, RatFn};
use dirac_core::reduction::pushforward_vf;
use dirac_core::scenes::{build, builtin, parse_scene, write_scene, Analysis, Scene, BUILTIN_NAMES};

fn reduced_frame(scene: &Scene, stratum: &str) -> Vec<Section> {
    let analysis = Analysis::new(scene, 4).unwrap();
    analysis.reduced(stratum).unwrap().as_ref().unwrap().generators.clone()
}

fn params(scene: &Scene, stratum: &str) -> Arc<Chart> {
    scene.stratum(stratum).unwrap().params().clone()
}

fn sections(chart: &Arc<Chart>, list: &[(&[&str], &[&str])]) -> Vec<Section> {
    list.iter().map(|(x, a)| Section::parse(chart, x, a).unwrap()).collect()
}

fn module_equal(a: &[Section], b: &[Section]) -> bool {
    a.iter().all(|s| membership_in(s, b).unwrap().is_member()) && b.iter().all(|s| membership_in(s, a).unwrap().is_member())
}

#[test]
fn s1_r3_reduced_structures() {
    let scene = builtin("s1_r3").unwrap();
    let p1 = params(&scene, "P1");
    let want = sections(&p1, &[(&["1"], &["0"])]);
    assert!(module_equal(&reduced_frame(&scene, "P1"), &want));

    let p2 = params(&scene, "P2");
    let want = sections(&p2, &[(&["0", "1"], &["0", "0"]), (&["0", "0"], &["1", "0"])]);
    let got = reduced_frame(&scene, "P2");
    assert!(module_equal(&got, &want));
    // ∂x̄ alone is not in the reduced structure on P̄₂.
    let wrong = Section::parse(&p2, &["1", "0"], &["0", "0"]).unwrap();
    assert!(!membership_in(&wrong, &got).unwrap().is_member());
}

const F: &str = "f1 + (sigma^2 + delta^2)/f1";

fn m1_psi1_list(c: &Arc<Chart>) -> Vec<Section> {
    let neg_f = format!("-({F})");
    sections(
        c,
        &[
            (&["0", "0", "0", "1", "0"], &["0", "0", "0", "0", "0"]),
            (&["0", "0", "0", "0", "0"], &["0", "0", "0", "0", "1"]),
            (&["0", "2*sigma", "-2*delta", "0", "0"], &["1", "0", "0", "0", "0"]),
            (&["-2*sigma", "0", &neg_f, "0", "0"], &["0", "1", "0", "0", "0"]),
            (&["2*delta", F, "0", "0", "0"], &["0", "0", "1", "0", "0"]),
        ],
    )
}

fn exprs(c: &Arc<Chart>, list: &[&str]) -> Vec<RatFn> {
    list.iter().map(|e| parse_expr(e, c).unwrap()).collect()
}

#[test]
fn s1_r6_m1_module_and_relation() {
    let scene = builtin("s1_r6").unwrap();
    let c = params(&scene, "M1_psi1");
    assert_eq!(c.coords(), ["f1", "delta", "sigma", "z1", "z2"]);
    let want = m1_psi1_list(&c);
    assert!(module_equal(&reduced_frame(&scene, "M1_psi1"), &want));

    // F g₃ − 2δ g₄ − 2σ g₅ is the pure covector (F, −2δ, −2σ, 0, 0).
    let coeffs = exprs(&c, &["0", "0", F, "-2*delta", "-2*sigma"]);
    let relation = Section::parse(&c, &["0"; 5], &[F, "-2*delta", "-2*sigma", "0", "0"]).unwrap();
    assert_eq!(combine(&c, &want, &coeffs), relation);
    let witness = membership_in(&relation, &want).unwrap();
    assert_eq!(combine(&c, &want, witness.witness().unwrap()), relation);
}

#[test]
fn s1_r6_m1_brackets() {
    let scene = builtin("s1_r6").unwrap();
    let c = params(&scene, "M1_psi1");
    let g = m1_psi1_list(&c);
    let two = Rat::from_integer(2.into());
    assert_eq!(courant_bracket(&g[2], &g[3]).unwrap(), g[4].scale_rat(&two));
    assert_eq!(courant_bracket(&g[2], &g[4]).unwrap(), g[3].scale_rat(&-two.clone()));
    let b45 = courant_bracket(&g[3], &g[4]).unwrap();
    let coeffs = exprs(&c, &["0", "0", &format!("-2 + ({F})/f1"), "-2*delta/f1", "-2*sigma/f1"]);
    assert_eq!(combine(&c, &g, &coeffs), b45);
    let witness = membership_in(&b45, &g).unwrap();
    assert_eq!(combine(&c, &g, witness.witness().unwrap()), b45);
}

#[test]
fn so3_pushforwards() {
    let scene = builtin("so3_r3r3").unwrap();
    let src = scene.chart.clone();
    let tgt = scene.quotient.target().clone();
    let fields: [&[&str]; 10] = [
        &["x1", "y1", "z1", "0", "0", "0"],
        &["0", "0", "0", "x2", "y2", "z2"],
        &["0", "0", "0", "x1", "y1", "z1"],
        &["x2", "y2", "z2", "0", "0", "0"],
        &["-y1", "x1", "0", "-y2", "x2", "0"],
        &["-z1", "0", "x1", "-z2", "0", "x2"],
        &["0", "z1", "-y1", "0", "z2", "-y2"],
        &["y2*z1 - z2*y1", "z2*x1 - z1*x2", "x2*y1 - y2*x1", "0", "0", "0"],
        &["0", "0", "0", "y1*z2 - z1*y2", "z1*x2 - x1*z2", "x1*y2 - y1*x2"],
        &[
            "(z1*x2 - x1*z2)*z1 - (x1*y2 - y1*x2)*y1",
            "(x1*y2 - y1*x2)*x1 - (y1*z2 - z1*y2)*z1",
            "(y1*z2 - z1*y2)*y1 - (z1*x2 - x1*z2)*x1",
            "(z1*x2 - x1*z2)*z2 - (x1*y2 - y1*x2)*y2",
            "(x1*y2 - y1*x2)*x2 - (y1*z2 - z1*y2)*z2",
            "(y1*z2 - z1*y2)*y2 - (z1*x2 - x1*z2)*x2",
        ],
    ];
    let images: [&[&str]; 4] = [&["2*x", "0", "z"], &["0", "2*y", "z"], &["0", "2*z", "x"], &["2*z", "0", "y"]];
    for (i, comps) in fields.iter().enumerate() {
        let x = VectorField::parse(&src, comps).unwrap();
        let got = pushforward_vf(&x, &scene.quotient, 4).unwrap();
        let want = match images.get(i) {
            Some(img) => VectorField::parse(&tgt, img).unwrap(),
            None => VectorField::zero(tgt.clone()),
        };
        assert_eq!(got, want, "X{}", i + 1);
    }
}

#[test]
fn so3_invariant_relation_at_dependent_point() {
    let c = common::chart(&["x1", "y1", "z1", "x2", "y2", "z2"]);
    let f = exprs(&c, &["x1^2 + y1^2 + z1^2", "x2^2 + y2^2 + z2^2", "x1*x2 + y1*y2 + z1*z2"]);
    let p = [0, 0, 1, 0, 0, 2].map(|v| ratio(v, 1));
    let d: Vec<Vec<Rat>> = f.iter().map(|fi| exterior_derivative_fn(fi, &c).eval(&p).unwrap()).collect();
    let v: Vec<Rat> = f.iter().map(|fi| fi.eval(&p).unwrap()).collect();
    let lhs: Vec<Rat> = d[2].iter().map(|a| Rat::from_integer(2.into()) * &v[2] * a).collect();
    let rhs: Vec<Rat> = (0..6).map(|k| &v[0] * &d[1][k] + &v[1] * &d[0][k]).collect();
    let want: Vec<Rat> = [0, 0, 8, 0, 0, 4].map(|v| ratio(v, 1)).to_vec();
    assert_eq!(lhs, want);
    assert_eq!(rhs, want);
}

#[test]
fn s1_r3_dynamics() {
    let scene = builtin("s1_r3").unwrap();
    let c = scene.chart.clone();
    let f = parse_expr("x^2 + y^2", &c).unwrap();
    let sol = match solve_admissible(&f, &scene.dirac) {
        Admissibility::Admissible(s) => s,
        other => panic!("{other:?}"),
    };
    assert_eq!(sol.xf, VectorField::parse(&c, &["2*y", "-2*x", "0"]).unwrap());
    let dz = vec![Section::parse(&c, &["0", "0", "1"], &["0", "0", "0"]).unwrap()];
    assert!(module_equal(sol.gauge.generators(), &dz));

    let analysis = Analysis::new(&scene, 4).unwrap();
    let reduced = analysis.reduced("P2").unwrap().as_ref().unwrap();
    let rh = reduce_hamiltonian(&sol, &scene.quotient, reduced, 4).unwrap();
    assert_eq!(combine(reduced.stratum.params(), &reduced.generators, &rh.witness), rh.section);

    let z = parse_expr("z", &c).unwrap();
    assert!(matches!(solve_admissible(&z, &scene.dirac), Admissibility::NotAdmissible { .. }));
}

#[test]
fn scene_files_round_trip() {
    for name in BUILTIN_NAMES {
        let scene = builtin(name).unwrap();
        let rebuilt = build(parse_scene(&write_scene(&scene.spec)).unwrap()).unwrap();
        assert_eq!(rebuilt, scene, "{name}");
    }
    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenes/s1_r3.scene");
    let text = std::fs::read_to_string(shipped).unwrap();
    assert_eq!(build(parse_scene(&text).unwrap()).unwrap(), builtin("s1_r3").unwrap());
}

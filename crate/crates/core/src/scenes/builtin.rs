//! The bundled scenes.

use super::{
    build, texts, ActionKind, BracketSpec, DescendingSpec, ExpectSpec, FieldSpec, FlowSpec, PushforwardSpec, ReducedSpec,
    RelationSpec, Scene, SceneError, SceneSpec, SectionSpec, StratumSpec, Text,
};
use crate::reduction::Relation;

pub const BUILTIN_NAMES: [&str; 5] = ["s1_r3", "s1_r6", "so3_r3r3", "so3_split_counterexample", "nonintegrable_demo"];

/// A built-in scene by name.
pub fn builtin(name: &str) -> Result<Scene, SceneError> {
    let spec = match name {
        "s1_r3" => s1_r3(),
        "s1_r6" => s1_r6(),
        "so3_r3r3" => so3_r3r3(),
        "so3_split_counterexample" => so3_split(),
        "nonintegrable_demo" => nonintegrable(),
        other => return Err(SceneError::UnknownScene(other.to_string())),
    };
    build(spec)
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn sec(x: &[&str], alpha: &[&str]) -> SectionSpec {
    SectionSpec { x: texts(x), alpha: texts(alpha) }
}

fn desc(name: &str, x: &[&str], alpha: &[&str], presentation: &[(&str, &str)]) -> DescendingSpec {
    DescendingSpec {
        name: name.into(),
        section: sec(x, alpha),
        presentation: presentation.iter().map(|&(g, f)| (g.into(), f.into())).collect(),
    }
}

fn field(name: &str, comps: &[&str]) -> FieldSpec {
    FieldSpec { name: name.into(), components: texts(comps) }
}

fn push(name: &str, f: &[&str], image: &[&str]) -> PushforwardSpec {
    PushforwardSpec { name: name.into(), field: texts(f), image: texts(image) }
}

fn points(ps: &[&[&str]]) -> Vec<Vec<Text>> {
    ps.iter().map(|p| texts(p)).collect()
}

fn stratum(
    name: &str,
    params: &[&str],
    embedding: &[&str],
    constraints: &[(&str, Relation)],
    samples: &[&[&str]],
) -> StratumSpec {
    StratumSpec {
        name: name.into(),
        params: strings(params),
        embedding: texts(embedding),
        constraints: constraints.iter().map(|&(c, r)| (c.into(), r)).collect(),
        samples: points(samples),
    }
}

fn s1_r3() -> SceneSpec {
    SceneSpec {
        name: "s1_r3".into(),
        chart_name: "R3".into(),
        coords: strings(&["x", "y", "z"]),
        action: ActionKind::Circle,
        generators: vec![texts(&["-y", "x", "0"])],
        target_name: "Mbar".into(),
        target_coords: strings(&["xbar", "zbar"]),
        basis: texts(&["x^2 + y^2", "z"]),
        dirac: vec![
            sec(&["1", "0", "0"], &["0", "1", "0"]),
            sec(&["0", "1", "0"], &["-1", "0", "0"]),
            sec(&["0", "0", "1"], &["0", "0", "0"]),
        ],
        descending: vec![
            desc("rotation", &["y", "-x", "0"], &["x", "y", "0"], &[("1/2", "x^2 + y^2")]),
            desc("height", &["0", "0", "1"], &["0", "0", "0"], &[]),
        ],
        fields: vec![field("Z", &["0", "0", "1"]), field("E", &["x", "y", "0"])],
        strata: vec![
            stratum("P1", &["zbar"], &["0", "zbar"], &[("xbar", Relation::Eq)], &[&["0", "0", "1"], &["0", "0", "-2"]]),
            stratum(
                "P2",
                &["xbar", "zbar"],
                &["xbar", "zbar"],
                &[("xbar", Relation::Gt)],
                &[&["1", "0", "0"], &["1/2", "-3", "2"]],
            ),
        ],
        samples: points(&[&["1", "2", "3"], &["0", "0", "1"]]),
        hamiltonians: texts(&["x^2 + y^2", "z"]),
        flows: vec![FlowSpec {
            name: "rotation".into(),
            field: texts(&["y", "-x", "0"]),
            start: texts(&["1", "0", "0"]),
            time: std::f64::consts::FRAC_PI_2,
            steps: 1000,
            end: Some(texts(&["0", "-1", "0"])),
            monitors: texts(&["x^2 + y^2 - 1", "z"]),
        }],
        expect: ExpectSpec {
            integrable: Some(true),
            probe: Some(true),
            pushforwards: vec![
                push("E", &["x", "y", "0"], &["2*xbar", "0"]),
                push("Z", &["0", "0", "1"], &["0", "1"]),
                push("vertical", &["y", "-x", "0"], &["0", "0"]),
            ],
            reduced: vec![
                ReducedSpec { stratum: "P1".into(), generators: vec![sec(&["1"], &["0"])] },
                ReducedSpec {
                    stratum: "P2".into(),
                    generators: vec![sec(&["0", "1"], &["0", "0"]), sec(&["0", "0"], &["1", "0"])],
                },
            ],
            relations: vec![],
            brackets: vec![],
        },
    }
}

const F_PSI1: &str = "f1 + (sigma^2 + delta^2)/f1";
const F_PSI2: &str = "f2 + (sigma^2 + delta^2)/f2";

fn s1_r6() -> SceneSpec {
    let neg_f1 = format!("-({F_PSI1})");
    let neg_f2 = format!("-({F_PSI2})");
    SceneSpec {
        name: "s1_r6".into(),
        chart_name: "R6".into(),
        coords: strings(&["x1", "y1", "z1", "x2", "y2", "z2"]),
        action: ActionKind::Circle,
        generators: vec![texts(&["-y1", "x1", "0", "-y2", "x2", "0"])],
        target_name: "Mbar".into(),
        target_coords: strings(&["f1", "f2", "delta", "sigma", "z1", "z2"]),
        basis: texts(&["x1^2 + y1^2", "x2^2 + y2^2", "x1*y2 - y1*x2", "x1*x2 + y1*y2", "z1", "z2"]),
        dirac: vec![
            sec(&["1", "0", "0", "0", "0", "0"], &["0", "1", "0", "0", "0", "0"]),
            sec(&["0", "1", "0", "0", "0", "0"], &["-1", "0", "0", "0", "0", "0"]),
            sec(&["0", "0", "1", "0", "0", "0"], &["0", "0", "0", "0", "0", "0"]),
            sec(&["0", "0", "0", "1", "0", "0"], &["0", "0", "0", "0", "-1", "0"]),
            sec(&["0", "0", "0", "0", "1", "0"], &["0", "0", "0", "1", "0", "0"]),
            sec(&["0", "0", "0", "0", "0", "0"], &["0", "0", "0", "0", "0", "1"]),
        ],
        descending: vec![
            desc("Z1", &["0", "0", "1", "0", "0", "0"], &["0", "0", "0", "0", "0", "0"], &[]),
            desc("Z2", &["0", "0", "0", "0", "0", "0"], &["0", "0", "0", "0", "0", "1"], &[("1", "z2")]),
            desc("R1", &["y1", "-x1", "0", "0", "0", "0"], &["x1", "y1", "0", "0", "0", "0"], &[("1/2", "x1^2 + y1^2")]),
            desc("R2", &["0", "0", "0", "-y2", "x2", "0"], &["0", "0", "0", "x2", "y2", "0"], &[("1/2", "x2^2 + y2^2")]),
            desc("D", &["-x2", "-y2", "0", "-x1", "-y1", "0"], &["y2", "-x2", "0", "-y1", "x1", "0"], &[("1", "x1*y2 - y1*x2")]),
            desc("S", &["y2", "-x2", "0", "-y1", "x1", "0"], &["x2", "y2", "0", "x1", "y1", "0"], &[("1", "x1*x2 + y1*y2")]),
        ],
        fields: vec![
            field("X1", &["0", "0", "1", "0", "0", "0"]),
            field("X2", &["0", "0", "0", "0", "0", "1"]),
            field("X3", &["x1", "y1", "0", "0", "0", "0"]),
            field("X4", &["0", "0", "0", "x2", "y2", "0"]),
            field("X5", &["0", "0", "0", "y1", "-x1", "0"]),
            field("X6", &["y2", "-x2", "0", "0", "0", "0"]),
            field("X7", &["0", "0", "0", "x1", "y1", "0"]),
            field("X8", &["x2", "y2", "0", "0", "0", "0"]),
            field("X9", &["-y1", "x1", "0", "0", "0", "0"]),
            field("X10", &["0", "0", "0", "-y2", "x2", "0"]),
        ],
        strata: vec![
            stratum(
                "M0",
                &["z1", "z2"],
                &["0", "0", "0", "0", "z1", "z2"],
                &[("f1", Relation::Eq), ("f2", Relation::Eq), ("delta", Relation::Eq), ("sigma", Relation::Eq)],
                &[&["0", "0", "1", "0", "0", "2"], &["0", "0", "-1/2", "0", "0", "3"]],
            ),
            stratum(
                "M1_psi1",
                &["f1", "delta", "sigma", "z1", "z2"],
                &["f1", "(delta^2 + sigma^2)/f1", "delta", "sigma", "z1", "z2"],
                &[("f1", Relation::Gt), ("f1*f2 - delta^2 - sigma^2", Relation::Eq)],
                &[&["1", "2", "3", "-1", "1/2", "2"], &["1", "0", "0", "0", "0", "0"]],
            ),
            stratum(
                "M1_psi2",
                &["f2", "delta", "sigma", "z1", "z2"],
                &["(delta^2 + sigma^2)/f2", "f2", "delta", "sigma", "z1", "z2"],
                &[("f2", Relation::Gt), ("f1*f2 - delta^2 - sigma^2", Relation::Eq)],
                &[&["1", "2", "3", "-1", "1/2", "2"], &["0", "0", "1", "1", "2", "0"]],
            ),
        ],
        samples: points(&[&["1", "2", "3", "-1", "1/2", "2"], &["0", "0", "1", "0", "0", "2"]]),
        hamiltonians: texts(&["z2", "x1^2 + y1^2"]),
        flows: vec![FlowSpec {
            name: "X9".into(),
            field: texts(&["-y1", "x1", "0", "0", "0", "0"]),
            start: texts(&["1", "0", "0", "0", "1", "0"]),
            time: 1.0,
            steps: 1000,
            end: None,
            monitors: texts(&["x1^2 + y1^2 - 1", "x2", "y2 - 1"]),
        }],
        expect: ExpectSpec {
            integrable: Some(true),
            probe: Some(true),
            pushforwards: vec![
                push("X1", &["0", "0", "1", "0", "0", "0"], &["0", "0", "0", "0", "1", "0"]),
                push("X2", &["0", "0", "0", "0", "0", "1"], &["0", "0", "0", "0", "0", "1"]),
                push("X3", &["x1", "y1", "0", "0", "0", "0"], &["2*f1", "0", "delta", "sigma", "0", "0"]),
                push("X4", &["0", "0", "0", "x2", "y2", "0"], &["0", "2*f2", "delta", "sigma", "0", "0"]),
                push("X5", &["0", "0", "0", "y1", "-x1", "0"], &["0", "-2*delta", "-f1", "0", "0", "0"]),
                push("X6", &["y2", "-x2", "0", "0", "0", "0"], &["2*delta", "0", "f2", "0", "0", "0"]),
                push("X7", &["0", "0", "0", "x1", "y1", "0"], &["0", "2*sigma", "0", "f1", "0", "0"]),
                push("X8", &["x2", "y2", "0", "0", "0", "0"], &["2*sigma", "0", "0", "f2", "0", "0"]),
                push("X9", &["-y1", "x1", "0", "0", "0", "0"], &["0", "0", "-sigma", "delta", "0", "0"]),
                push("X10", &["0", "0", "0", "-y2", "x2", "0"], &["0", "0", "sigma", "-delta", "0", "0"]),
            ],
            reduced: vec![
                ReducedSpec {
                    stratum: "M0".into(),
                    generators: vec![sec(&["1", "0"], &["0", "0"]), sec(&["0", "0"], &["0", "1"])],
                },
                ReducedSpec {
                    stratum: "M1_psi1".into(),
                    generators: vec![
                        sec(&["0", "0", "0", "1", "0"], &["0", "0", "0", "0", "0"]),
                        sec(&["0", "0", "0", "0", "0"], &["0", "0", "0", "0", "1"]),
                        sec(&["0", "2*sigma", "-2*delta", "0", "0"], &["1", "0", "0", "0", "0"]),
                        sec(&["-2*sigma", "0", &neg_f1, "0", "0"], &["0", "1", "0", "0", "0"]),
                        sec(&["2*delta", F_PSI1, "0", "0", "0"], &["0", "0", "1", "0", "0"]),
                    ],
                },
                ReducedSpec {
                    stratum: "M1_psi2".into(),
                    generators: vec![
                        sec(&["0", "0", "0", "1", "0"], &["0", "0", "0", "0", "0"]),
                        sec(&["0", "0", "0", "0", "0"], &["0", "0", "0", "0", "1"]),
                        sec(&["0", "2*sigma", "-2*delta", "0", "0"], &["1", "0", "0", "0", "0"]),
                        sec(&["-2*sigma", "0", &neg_f2, "0", "0"], &["0", "1", "0", "0", "0"]),
                        sec(&["2*delta", F_PSI2, "0", "0", "0"], &["0", "0", "1", "0", "0"]),
                    ],
                },
            ],
            relations: vec![RelationSpec {
                stratum: "M1_psi1".into(),
                section: sec(&["0", "0", "0", "0", "0"], &[F_PSI1, "-2*delta", "-2*sigma", "0", "0"]),
                coefficients: texts(&["0", "0", F_PSI1, "-2*delta", "-2*sigma"]),
            }],
            brackets: vec![
                BracketSpec { stratum: "M1_psi1".into(), i: 3, j: 4, coefficients: texts(&["0", "0", "0", "0", "2"]) },
                BracketSpec { stratum: "M1_psi1".into(), i: 3, j: 5, coefficients: texts(&["0", "0", "0", "-2", "0"]) },
                BracketSpec {
                    stratum: "M1_psi1".into(),
                    i: 4,
                    j: 5,
                    coefficients: texts(&["0", "0", "-2 + (f1 + (sigma^2 + delta^2)/f1)/f1", "-2*delta/f1", "-2*sigma/f1"]),
                },
            ],
        },
    }
}

/// `v × w` components for `v = (x1,y1,z1)`, `w = (x2,y2,z2)`.
const CROSS: [&str; 3] = ["(y1*z2 - z1*y2)", "(z1*x2 - x1*z2)", "(x1*y2 - y1*x2)"];

fn cross_with(u: [&str; 3]) -> [String; 3] {
    let c = CROSS;
    [
        format!("{}*{} - {}*{}", c[1], u[2], c[2], u[1]),
        format!("{}*{} - {}*{}", c[2], u[0], c[0], u[2]),
        format!("{}*{} - {}*{}", c[0], u[1], c[1], u[0]),
    ]
}

fn so3_base(name: &str) -> SceneSpec {
    SceneSpec {
        name: name.into(),
        chart_name: "R3xR3".into(),
        coords: strings(&["x1", "y1", "z1", "x2", "y2", "z2"]),
        action: ActionKind::So3,
        generators: vec![
            texts(&["-y1", "x1", "0", "-y2", "x2", "0"]),
            texts(&["-z1", "0", "x1", "-z2", "0", "x2"]),
            texts(&["0", "z1", "-y1", "0", "z2", "-y2"]),
        ],
        target_name: "Mbar".into(),
        target_coords: strings(&["x", "y", "z"]),
        basis: texts(&["x1^2 + y1^2 + z1^2", "x2^2 + y2^2 + z2^2", "x1*x2 + y1*y2 + z1*z2"]),
        dirac: Vec::new(),
        descending: Vec::new(),
        fields: Vec::new(),
        strata: Vec::new(),
        samples: Vec::new(),
        hamiltonians: Vec::new(),
        flows: Vec::new(),
        expect: ExpectSpec::default(),
    }
}

/// The ten generators of `𝒯` in the SO(3) example.
fn so3_fields() -> Vec<(String, Vec<String>)> {
    let z = "0";
    let cv = cross_with(["x1", "y1", "z1"]);
    let cw = cross_with(["x2", "y2", "z2"]);
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        ("X1".into(), s(&["x1", "y1", "z1", z, z, z])),
        ("X2".into(), s(&[z, z, z, "x2", "y2", "z2"])),
        ("X3".into(), s(&[z, z, z, "x1", "y1", "z1"])),
        ("X4".into(), s(&["x2", "y2", "z2", z, z, z])),
        ("X5".into(), s(&["-y1", "x1", z, "-y2", "x2", z])),
        ("X6".into(), s(&["-z1", z, "x1", "-z2", z, "x2"])),
        ("X7".into(), s(&[z, "z1", "-y1", z, "z2", "-y2"])),
        ("X8".into(), s(&["y2*z1 - z2*y1", "z2*x1 - z1*x2", "x2*y1 - y2*x1", z, z, z])),
        ("X9".into(), s(&[z, z, z, CROSS[0], CROSS[1], CROSS[2]])),
        ("X10".into(), vec![cv[0].clone(), cv[1].clone(), cv[2].clone(), cw[0].clone(), cw[1].clone(), cw[2].clone()]),
    ]
}

fn to_texts(v: &[String]) -> Vec<Text> {
    v.iter().map(|s| s.clone().into()).collect()
}

const TANGENT_INVARIANT: [&str; 7] = ["X1", "X2", "X3", "X4", "X8", "X9", "X10"];

fn so3_declared_fields() -> Vec<FieldSpec> {
    so3_fields()
        .into_iter()
        .filter(|(n, _)| TANGENT_INVARIANT.contains(&n.as_str()))
        .map(|(name, comps)| FieldSpec { name, components: to_texts(&comps) })
        .collect()
}

fn so3_r3r3() -> SceneSpec {
    let mut spec = so3_base("so3_r3r3");
    let zero6 = ["0"; 6];
    spec.dirac = (0..6)
        .map(|i| {
            let mut x = zero6;
            x[i] = "1";
            sec(&x, &zero6)
        })
        .collect();
    spec.descending = so3_fields()
        .into_iter()
        .map(|(name, comps)| DescendingSpec {
            name,
            section: SectionSpec { x: to_texts(&comps), alpha: texts(&zero6) },
            presentation: Vec::new(),
        })
        .collect();
    spec.fields = so3_declared_fields();
    spec.strata = vec![
        stratum(
            "P2",
            &["x", "y", "z"],
            &["x", "y", "z"],
            &[("x", Relation::Gt), ("y", Relation::Gt), ("x*y - z^2", Relation::Gt)],
            &[&["1", "0", "0", "0", "1", "0"], &["1", "2", "0", "0", "1", "3"]],
        ),
        stratum(
            "P1",
            &["x", "z"],
            &["x", "z^2/x", "z"],
            &[("x", Relation::Gt), ("x*y - z^2", Relation::Eq)],
            &[&["0", "0", "1", "0", "0", "2"], &["1", "0", "0", "-3", "0", "0"]],
        ),
        stratum("P0", &[], &["0", "0", "0"], &[("x", Relation::Eq), ("y", Relation::Eq), ("z", Relation::Eq)], &[&["0"; 6]]),
    ];
    spec.samples = points(&[&["0", "0", "1", "1", "0", "0"], &["1", "2", "0", "0", "1", "3"]]);
    spec.flows = vec![FlowSpec {
        name: "X8".into(),
        field: texts(&["y2*z1 - z2*y1", "z2*x1 - z1*x2", "x2*y1 - y2*x1", "0", "0", "0"]),
        start: texts(&["0", "0", "1", "0", "0", "2"]),
        time: 1.0,
        steps: 1000,
        end: None,
        monitors: CROSS.iter().map(|&c| c.into()).collect(),
    }];
    let images: [&[&str]; 4] = [&["2*x", "0", "z"], &["0", "2*y", "z"], &["0", "2*z", "x"], &["2*z", "0", "y"]];
    spec.expect = ExpectSpec {
        integrable: Some(true),
        probe: Some(true),
        pushforwards: so3_fields()
            .into_iter()
            .enumerate()
            .map(|(i, (name, comps))| PushforwardSpec {
                name,
                field: to_texts(&comps),
                image: images.get(i).map_or_else(|| texts(&["0", "0", "0"]), |img| texts(img)),
            })
            .collect(),
        reduced: vec![
            ReducedSpec {
                stratum: "P2".into(),
                generators: vec![
                    sec(&["1", "0", "0"], &["0"; 3]),
                    sec(&["0", "1", "0"], &["0"; 3]),
                    sec(&["0", "0", "1"], &["0"; 3]),
                ],
            },
            ReducedSpec { stratum: "P1".into(), generators: vec![sec(&["1", "0"], &["0"; 2]), sec(&["0", "1"], &["0"; 2])] },
            ReducedSpec { stratum: "P0".into(), generators: vec![] },
        ],
        relations: vec![],
        brackets: vec![],
    };
    spec
}

fn so3_split() -> SceneSpec {
    let mut spec = so3_base("so3_split_counterexample");
    let zero6 = ["0"; 6];
    spec.dirac = (0..6)
        .map(|i| {
            let mut unit = zero6;
            unit[i] = "1";
            if i < 3 {
                sec(&unit, &zero6)
            } else {
                sec(&zero6, &unit)
            }
        })
        .collect();
    spec.descending = vec![
        desc("X1", &["x1", "y1", "z1", "0", "0", "0"], &zero6, &[]),
        desc("dF2", &zero6, &["0", "0", "0", "x2", "y2", "z2"], &[("1/2", "x2^2 + y2^2 + z2^2")]),
    ];
    spec.fields = so3_declared_fields();
    spec.strata = vec![stratum(
        "P2",
        &["x", "y", "z"],
        &["x", "y", "z"],
        &[("x", Relation::Gt), ("y", Relation::Gt), ("x*y - z^2", Relation::Gt)],
        &[&["0", "0", "1", "1", "0", "0"]],
    )];
    spec.samples = points(&[&["0", "0", "1", "1", "0", "0"]]);
    spec.expect = ExpectSpec { integrable: Some(true), probe: Some(false), ..ExpectSpec::default() };
    spec
}

fn nonintegrable() -> SceneSpec {
    SceneSpec {
        name: "nonintegrable_demo".into(),
        chart_name: "R3".into(),
        coords: strings(&["x", "y", "z"]),
        action: ActionKind::Trivial,
        generators: Vec::new(),
        target_name: "Mbar".into(),
        target_coords: strings(&["xbar", "ybar", "zbar"]),
        basis: texts(&["x", "y", "z"]),
        dirac: vec![
            sec(&["1", "0", "0"], &["0", "0", "y"]),
            sec(&["0", "1", "0"], &["0", "0", "0"]),
            sec(&["0", "0", "1"], &["-y", "0", "0"]),
        ],
        descending: Vec::new(),
        fields: Vec::new(),
        strata: Vec::new(),
        samples: points(&[&["1", "2", "3"], &["0", "0", "0"]]),
        hamiltonians: Vec::new(),
        flows: Vec::new(),
        expect: ExpectSpec { integrable: Some(false), ..ExpectSpec::default() },
    }
}

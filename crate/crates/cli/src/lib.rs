//! Scene loading, command dispatch and report emission for the `dirac` tool.

pub mod flow;

use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use dirac_core::report::Check;
use dirac_core::scenes::{
    average_report, bracket_report, build, builtin, hamiltonian_report, parse_scene, probe_report, reduce_report, validate,
    Analysis, Options, Scene, SceneError,
};
use serde_json::{json, Value};
use thiserror::Error;

use crate::flow::{distance, flow_numeric, Trajectory};

pub const SCHEMA_VERSION: u32 = 1;

/// Endpoint and drift tolerance of the numeric flow probe.
pub const FLOW_TOLERANCE: f64 = 1e-6;

/// Minimum endpoint-error ratio when halving the step size.
pub const CONVERGENCE_RATIO: f64 = 8.0;

/// Step counts used for the step-halving convergence probe.
pub const CONVERGENCE_STEPS: (usize, usize) = (20, 40);

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Check,
    Reduce,
    Bracket,
    Average,
    Hamiltonian,
    Probe,
    Flow,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Reduce => "reduce",
            Command::Bracket => "bracket",
            Command::Average => "average",
            Command::Hamiltonian => "hamiltonian",
            Command::Probe => "probe",
            Command::Flow => "flow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flags {
    pub json: bool,
    pub stratum: Option<String>,
    pub bound: u32,
    pub seed: u64,
    pub samples: usize,
}

impl Default for Flags {
    fn default() -> Self {
        let o = Options::default();
        Flags { json: false, stratum: None, bound: o.bound, seed: o.seed, samples: o.random_samples }
    }
}

impl Flags {
    pub fn options(&self) -> Options {
        Options { bound: self.bound, stratum: self.stratum.clone(), seed: self.seed, random_samples: self.samples }
    }
}

/// Loads `builtin:NAME` or a scene file.
pub fn load_scene(path: &str) -> Result<Scene, CliError> {
    if let Some(name) = path.strip_prefix("builtin:") {
        return Ok(builtin(name)?);
    }
    let text = std::fs::read_to_string(Path::new(path)).map_err(|source| CliError::Io { path: path.to_string(), source })?;
    Ok(build(parse_scene(&text)?)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub command: Command,
    pub scene: String,
    pub root: Check,
}

impl Report {
    /// 0 iff the tree has no fail node.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.root.has_fail())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schemaVersion": SCHEMA_VERSION,
            "command": self.command.as_str(),
            "scene": self.scene,
            "status": self.root.status.as_str(),
            "exitCode": self.exit_code(),
            "report": check_json(&self.root),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dirac {} {}: {}", self.command.as_str(), self.scene, self.root.status)?;
        write!(f, "{}", self.root)
    }
}

fn check_json(c: &Check) -> Value {
    json!({
        "name": c.name,
        "status": c.status.as_str(),
        "detail": c.detail,
        "witnesses": c.witnesses,
        "children": c.children.iter().map(check_json).collect::<Vec<_>>(),
    })
}

/// Runs one command on a scene.
pub fn run(command: Command, scene: &Scene, flags: &Flags) -> Report {
    let opts = flags.options();
    let with_analysis = |f: &dyn Fn(&Analysis) -> Check| match Analysis::new(scene, opts.bound) {
        Ok(a) => f(&a),
        Err(e) => Check::fail("analysis", e.to_string()),
    };
    let body = match command {
        Command::Check => validate(scene, &opts),
        Command::Reduce => with_analysis(&|a| reduce_report(a, &opts)),
        Command::Bracket => with_analysis(&|a| bracket_report(a, &opts)),
        Command::Average => average_report(scene),
        Command::Hamiltonian => with_analysis(&|a| hamiltonian_report(a, &opts)),
        Command::Probe => with_analysis(&|a| probe_report(a, &opts)),
        Command::Flow => flow_report(scene),
    };
    Report { command, scene: scene.name().to_string(), root: Check::group(scene.name(), vec![body]) }
}

fn to_f64(p: &[dirac_core::expr::Rat]) -> Vec<f64> {
    use num_traits::ToPrimitive;
    p.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
}

fn advisory(name: impl Into<String>, ok: bool, detail: String) -> Check {
    if ok {
        Check::pass(name, detail)
    } else {
        Check::warn(name, detail)
    }
}

/// Largest Euclidean norm of the monitor values along a trajectory.
pub fn max_drift(monitors: &[dirac_core::expr::RatFn], tr: &Trajectory) -> f64 {
    tr.points.iter().map(|p| monitors.iter().map(|m| m.eval_f64(p).powi(2)).sum::<f64>().sqrt()).fold(0.0, f64::max)
}

/// Numeric flows of the scene; every outcome is advisory.
pub fn flow_report(scene: &Scene) -> Check {
    let mut out = Vec::new();
    for fl in &scene.flows {
        let start = to_f64(&fl.start);
        let tr = match flow_numeric(&fl.field, &start, fl.time, fl.steps) {
            Ok(tr) => tr,
            Err(e) => {
                out.push(Check::warn(fl.name.clone(), e.to_string()));
                continue;
            }
        };
        let mut node = Check::pass(fl.name.clone(), format!("RK4, {} steps over t = {}", fl.steps, fl.time))
            .with_witnesses([format!("endpoint {:?}", tr.end())]);
        let reference = fl.end.as_ref().map(|e| to_f64(e)).unwrap_or_else(|| tr.end().to_vec());
        if fl.end.is_some() {
            let err = distance(tr.end(), &reference);
            node.push(advisory("endpoint", err < FLOW_TOLERANCE, format!("error {err:.3e}")));
        }
        if !fl.monitors.is_empty() {
            let drift = max_drift(&fl.monitors, &tr);
            node.push(advisory("drift", drift < FLOW_TOLERANCE, format!("max monitor norm {drift:.3e}")));
        }
        let (coarse, fine) = CONVERGENCE_STEPS;
        let errors = [coarse, fine].map(|k| flow_numeric(&fl.field, &start, fl.time, k).map(|t| distance(t.end(), &reference)));
        node.push(match errors {
            [Ok(e1), Ok(e2)] if e2 < 1e-13 => advisory("convergence", e1 < 1e-13, format!("errors {e1:.3e} and {e2:.3e}")),
            [Ok(e1), Ok(e2)] => {
                let ratio = e1 / e2;
                advisory(
                    "convergence",
                    ratio >= CONVERGENCE_RATIO,
                    format!("error ratio {ratio:.2} between {coarse} and {fine} steps"),
                )
            }
            [Err(e), _] | [_, Err(e)] => Check::warn("convergence", e.to_string()),
        });
        out.push(node);
    }
    if out.is_empty() {
        return Check::skip("flow", "scene declares no flows");
    }
    Check::group("flow", out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_prefix_and_unknown_names() {
        assert_eq!(load_scene("builtin:s1_r3").unwrap().name(), "s1_r3");
        assert!(matches!(load_scene("builtin:nope"), Err(CliError::Scene(SceneError::UnknownScene(_)))));
        assert!(matches!(load_scene("/nonexistent/x.scene"), Err(CliError::Io { .. })));
    }

    #[test]
    fn flow_report_is_advisory() {
        let scene = builtin("s1_r3").unwrap();
        let r = flow_report(&scene);
        assert!(!r.has_fail());
        assert_eq!(r.status, dirac_core::report::Status::Pass, "{r}");
    }

    #[test]
    fn json_has_schema_version() {
        let scene = builtin("s1_r3").unwrap();
        let r = run(Command::Reduce, &scene, &Flags::default());
        let v = r.to_json();
        assert_eq!(v["schemaVersion"], 1);
        assert_eq!(v["exitCode"], 0);
        assert_eq!(r.to_json_string(), run(Command::Reduce, &scene, &Flags::default()).to_json_string());
    }
}

//! Fixed-step RK4 integration of polynomial and rational vector fields.

use dirac_core::calculus::VectorField;
use thiserror::Error;

/// Denominators smaller than this in absolute value abort the integration.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("steps must be at least 1")]
    NoSteps,
    #[error("start point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("denominator of component {component} near zero at step {step}; last safe point {last:?}")]
    DenominatorNearZero { step: usize, component: usize, last: Vec<f64> },
}

/// Points `x(0), x(h), …, x(t)` with `h = t / steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub step: f64,
    pub points: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn end(&self) -> &[f64] {
        self.points.last().map_or(&[], Vec::as_slice)
    }
}

/// Field value at `p`; `signs` holds the denominator signs at the step's base
/// point, and a sign change means the path crossed a pole.
fn eval(x: &VectorField, p: &[f64], signs: &[f64], step: usize, last: &[f64]) -> Result<Vec<f64>, FlowError> {
    x.components()
        .iter()
        .zip(signs)
        .enumerate()
        .map(|(component, (c, sign))| {
            let den = c.denom().eval_f64(p);
            if den.abs() < DENOMINATOR_TOLERANCE || !den.is_finite() || den.signum() != *sign {
                return Err(FlowError::DenominatorNearZero { step, component, last: last.to_vec() });
            }
            Ok(c.numer().eval_f64(p) / den)
        })
        .collect()
}

fn axpy(p: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    p.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// Classic fourth-order Runge–Kutta with `steps` equal steps over `[0, t]`.
pub fn flow_numeric(x: &VectorField, start: &[f64], t: f64, steps: usize) -> Result<Trajectory, FlowError> {
    if steps == 0 {
        return Err(FlowError::NoSteps);
    }
    let n = x.chart().dim();
    if start.len() != n {
        return Err(FlowError::Dimension { expected: n, got: start.len() });
    }
    let h = t / steps as f64;
    let mut points = Vec::with_capacity(steps + 1);
    points.push(start.to_vec());
    let mut p = start.to_vec();
    for step in 1..=steps {
        let signs: Vec<f64> = x.components().iter().map(|c| c.denom().eval_f64(&p).signum()).collect();
        let k1 = eval(x, &p, &signs, step, &p)?;
        let k2 = eval(x, &axpy(&p, h / 2.0, &k1), &signs, step, &p)?;
        let k3 = eval(x, &axpy(&p, h / 2.0, &k2), &signs, step, &p)?;
        let k4 = eval(x, &axpy(&p, h, &k3), &signs, step, &p)?;
        let next: Vec<f64> = (0..n).map(|i| p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
        eval(x, &next, &signs, step, &p)?;
        p = next;
        points.push(p.clone());
    }
    Ok(Trajectory { step: h, points })
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

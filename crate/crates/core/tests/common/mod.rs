//! Independent oracles shared by the integration tests: brute-force linear
//! algebra over ℚ, SO(3) quadrature and seeded random polynomial data.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use dirac_core::calculus::{OneForm, Section, VectorField};
use dirac_core::expr::{Chart, Monomial, Poly, Rat, RatFn};
use dirac_core::sampling::{random_rat, SampleRng};
use num_traits::{One, Zero};
use rand::Rng;

/// Row echelon form by plain Gaussian elimination; returns the nonzero rows.
pub fn echelon(mut rows: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    echelon(rows.to_vec()).len()
}

/// Basis of `{x : row · x = 0 for every row}` by back substitution.
pub fn nullspace(rows: &[Vec<Rat>], width: usize) -> Vec<Vec<Rat>> {
    let ech = echelon(rows.to_vec());
    let pivots: Vec<usize> = ech.iter().map(|r| r.iter().position(|x| !x.is_zero()).unwrap_or(width)).collect();
    (0..width)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rat::zero(); width];
            v[free] = Rat::one();
            for (row, &p) in ech.iter().zip(&pivots) {
                v[p] = -&row[free] / &row[p];
            }
            v
        })
        .collect()
}

pub fn same_span(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> bool {
    let ra = rank(a);
    ra == rank(b) && rank(&[a, b].concat()) == ra
}

/// `⟨(u,α),(v,β)⟩ = β(u) + α(v)` on vectors of length `2n`.
pub fn pairing(a: &[Rat], b: &[Rat]) -> Rat {
    let n = a.len() / 2;
    (0..n).fold(Rat::zero(), |acc, i| acc + &b[n + i] * &a[i] + &a[n + i] * &b[i])
}

/// The pairing-orthogonal of a span inside `ℚ^{2n}`.
pub fn orthogonal(span: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    let rows: Vec<Vec<Rat>> = span.iter().map(|v| v[n..].iter().chain(&v[..n]).cloned().collect()).collect();
    if rows.is_empty() {
        return (0..2 * n).map(|i| (0..2 * n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    }
    nullspace(&rows, 2 * n)
}

pub fn chart(names: &[&str]) -> Arc<Chart> {
    Chart::new("M", names).unwrap()
}

/// A polynomial with up to `terms` random monomials of degree `≤ max_degree`.
pub fn random_poly(nvars: usize, max_degree: u32, terms: usize, rng: &mut SampleRng) -> Poly {
    let mut out = Poly::zero(nvars);
    for _ in 0..terms {
        let degree = rng.gen_range(0..=max_degree);
        let mut exps = vec![0u32; nvars];
        for _ in 0..degree {
            exps[rng.gen_range(0..nvars)] += 1;
        }
        out = &out + &Poly::term(Monomial::new(exps), random_rat(rng));
    }
    out
}

pub fn random_field(chart: &Arc<Chart>, max_degree: u32, rng: &mut SampleRng) -> VectorField {
    let n = chart.dim();
    let comps = (0..n).map(|_| RatFn::from_poly(random_poly(n, max_degree, 3, rng))).collect();
    VectorField::new(chart.clone(), comps).unwrap()
}

pub fn random_form(chart: &Arc<Chart>, max_degree: u32, rng: &mut SampleRng) -> OneForm {
    let n = chart.dim();
    let comps = (0..n).map(|_| RatFn::from_poly(random_poly(n, max_degree, 3, rng))).collect();
    OneForm::new(chart.clone(), comps).unwrap()
}

pub fn section_value(s: &Section, p: &[Rat]) -> Vec<Rat> {
    s.eval(p).expect("polynomial section")
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                x -= p / dp;
                if (p / dp).abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite rule on `[a, b]` with `panels` equal panels.
pub fn composite(a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|k| {
            let lo = a + k as f64 * h;
            rule.iter().map(move |&(x, w)| (lo + (x + 1.0) * h / 2.0, w * h / 2.0))
        })
        .collect()
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn rz(t: f64) -> [[f64; 3]; 3] {
    [[t.cos(), -t.sin(), 0.0], [t.sin(), t.cos(), 0.0], [0.0, 0.0, 1.0]]
}

fn rx(t: f64) -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, t.cos(), -t.sin()], [0.0, t.sin(), t.cos()]]
}

/// `∫ g⁻¹·X(g·p) dg` over SO(3) acting diagonally on ℝ³ × ℝ³, with z-x-z
/// Euler angles and twelve-point Gauss–Legendre on four panels per angle.
pub fn so3_quadrature_average(x: &VectorField, p: &[f64]) -> Vec<f64> {
    let rule = gauss_legendre(12);
    let full = composite(0.0, 2.0 * PI, 4, &rule);
    let half = composite(0.0, PI, 4, &rule);
    let mut acc = vec![0.0; 6];
    for &(a, wa) in &full {
        for &(b, wb) in &half {
            let rab = mat_mul(&rz(a), &rx(b));
            for &(c, wc) in &full {
                let m = mat_mul(&rab, &rz(c));
                let w = wa * wb * wc * b.sin() / (8.0 * PI * PI);
                let mut gp = [0.0; 6];
                for blk in 0..2 {
                    for i in 0..3 {
                        gp[3 * blk + i] = (0..3).map(|j| m[i][j] * p[3 * blk + j]).sum();
                    }
                }
                let v = x.eval_f64(&gp);
                for blk in 0..2 {
                    for i in 0..3 {
                        acc[3 * blk + i] += w * (0..3).map(|j| m[j][i] * v[3 * blk + j]).sum::<f64>();
                    }
                }
            }
        }
    }
    acc
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

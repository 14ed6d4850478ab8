//! Exact linear algebra over ℚ and over the rational-function field ℚ(x).
//!
//! Function-field systems are cleared to polynomial rows and reduced with
//! fraction-free Bareiss elimination; solutions are read back over `RatFn`
//! with free unknowns set to zero.

use num_traits::{One, Zero};

use crate::expr::{lcm, Poly, Rat, RatFn};

/// Fraction-free row echelon form of a polynomial matrix.
#[derive(Debug, Clone)]
pub struct Echelon {
    /// Nonzero rows in echelon order.
    pub rows: Vec<Vec<Poly>>,
    /// Pivot column of each row.
    pub pivots: Vec<usize>,
    /// Original row index of each echelon row.
    pub origin: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// The last pivot: a maximal nonvanishing minor of the pivot columns.
    pub fn last_pivot(&self) -> Option<&Poly> {
        self.rows.last().zip(self.pivots.last()).map(|(r, &c)| &r[c])
    }
}

/// Clears denominators of a row of rational functions.
pub fn clear_row(row: &[RatFn], nvars: usize) -> Vec<Poly> {
    let mut l = Poly::one(nvars);
    for e in row {
        if !e.is_polynomial() {
            l = lcm(&l, e.denom());
        }
    }
    let mut out: Vec<Poly> = row
        .iter()
        .map(|e| if l.is_one() { e.numer().clone() } else { e.numer() * &l.div_exact(e.denom()).expect("lcm") })
        .collect();
    let mut content: Option<Rat> = None;
    for p in out.iter().filter(|p| !p.is_zero()) {
        let c = p.rational_content();
        content = Some(match content {
            None => c,
            Some(prev) => rat_gcd(&prev, &c),
        });
    }
    if let Some(c) = content {
        if !c.is_one() {
            let inv = c.recip();
            out = out.iter().map(|p| p.scale(&inv)).collect();
        }
    }
    out
}

fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    use num_integer::Integer;
    Rat::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

fn pivot_cost(p: &Poly) -> (usize, u32) {
    (p.nterms(), p.total_degree())
}

/// Bareiss elimination restricted to pivot columns `< pivot_cols`.
pub fn bareiss(m: Vec<Vec<Poly>>, pivot_cols: usize, nvars: usize) -> Echelon {
    bareiss_with_tail(m, pivot_cols, nvars).0
}

/// Outcome of solving `A x = b` over ℚ(x).
#[derive(Debug, Clone, PartialEq)]
pub enum Solve {
    Solution(Vec<RatFn>),
    /// No solution; `partial` solves the pivot rows alone.
    Inconsistent {
        partial: Vec<RatFn>,
    },
}

/// Solves `Σ_j cols[j] x_j = rhs` where `cols` are the columns of `A`.
/// Free unknowns are set to zero.
pub fn solve_columns(cols: &[Vec<RatFn>], rhs: &[RatFn], nvars: usize) -> Solve {
    let k = cols.len();
    let m = rhs.len();
    let rows: Vec<Vec<RatFn>> =
        (0..m).map(|i| cols.iter().map(|c| c[i].clone()).chain(std::iter::once(rhs[i].clone())).collect()).collect();
    let mat: Vec<Vec<Poly>> = rows.iter().map(|r| clear_row(r, nvars)).collect();
    let (ech, residual_rows) = bareiss_with_tail(mat, k, nvars);
    let x = back_substitute(&ech, k, nvars, |row| RatFn::from_poly(row[k].clone()));
    if residual_rows.iter().any(|row| !row[k].is_zero()) {
        return Solve::Inconsistent { partial: x };
    }
    Solve::Solution(x)
}

/// Like [`bareiss`] but also returns the eliminated rows below the rank.
fn bareiss_with_tail(m: Vec<Vec<Poly>>, pivot_cols: usize, nvars: usize) -> (Echelon, Vec<Vec<Poly>>) {
    let nrows = m.len();
    let ncols = m.first().map(Vec::len).unwrap_or(0);
    let mut m = m;
    let mut origin: Vec<usize> = (0..nrows).collect();
    let mut pivots = Vec::new();
    let mut prev = Poly::one(nvars);
    let mut r = 0;
    for c in 0..pivot_cols.min(ncols) {
        if r == nrows {
            break;
        }
        let best = (r..nrows).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| (pivot_cost(&m[i][c]), i));
        let Some(p) = best else { continue };
        m.swap(r, p);
        origin.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let prow = &top[r];
        let piv = &prow[c];
        for row in rest.iter_mut() {
            let lead = std::mem::replace(&mut row[c], Poly::zero(nvars));
            for j in c + 1..ncols {
                let t = if lead.is_zero() { piv * &row[j] } else { &(piv * &row[j]) - &(&lead * &prow[j]) };
                row[j] = if prev.is_one() { t } else { t.div_exact(&prev).expect("Bareiss division is exact") };
            }
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let tail = m.split_off(r);
    origin.truncate(r);
    (Echelon { rows: m, pivots, origin }, tail)
}

/// Back substitution on an echelon form with `k` unknowns; `rhs` gives the
/// right-hand side of each echelon row.
fn back_substitute(ech: &Echelon, k: usize, nvars: usize, rhs: impl Fn(&[Poly]) -> RatFn) -> Vec<RatFn> {
    let mut x = vec![RatFn::zero(nvars); k];
    for (row, &pc) in ech.rows.iter().zip(&ech.pivots).rev() {
        let mut acc = rhs(row);
        for j in pc + 1..k {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc = &acc - &x[j].mul_poly(&row[j]);
            }
        }
        x[pc] = acc.checked_div(&RatFn::from_poly(row[pc].clone())).expect("pivot is nonzero");
    }
    x
}

/// Rank over ℚ(x) of a list of vectors.
pub fn rank(vectors: &[Vec<RatFn>], nvars: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mat: Vec<Vec<Poly>> = vectors.iter().map(|r| clear_row(r, nvars)).collect();
    let w = mat[0].len();
    bareiss(mat, w, nvars).rank()
}

/// Echelon form of the row space of `vectors` (rows cleared to polynomials).
pub fn row_echelon(vectors: &[Vec<RatFn>], nvars: usize) -> Echelon {
    let mat: Vec<Vec<Poly>> = vectors.iter().map(|r| clear_row(r, nvars)).collect();
    let w = mat.first().map(Vec::len).unwrap_or(0);
    bareiss(mat, w, nvars)
}

/// Reduced row echelon basis of the row space over ℚ(x): pivots are 1 and
/// pivot columns are zero elsewhere.
pub fn reduced_row_basis(vectors: &[Vec<RatFn>], nvars: usize) -> (Vec<Vec<RatFn>>, Vec<usize>) {
    let ech = row_echelon(vectors, nvars);
    let mut rows: Vec<Vec<RatFn>> = ech
        .rows
        .iter()
        .zip(&ech.pivots)
        .map(|(r, &pc)| {
            let inv = RatFn::from_poly(r[pc].clone()).recip().expect("pivot is nonzero");
            r.iter().map(|e| if e.is_zero() { RatFn::zero(nvars) } else { &inv * &RatFn::from_poly(e.clone()) }).collect()
        })
        .collect();
    for i in (0..rows.len()).rev() {
        let pc = ech.pivots[i];
        for j in 0..i {
            let f = rows[j][pc].clone();
            if f.is_zero() {
                continue;
            }
            let (upper, lower) = rows.split_at_mut(i);
            for (a, b) in upper[j].iter_mut().zip(&lower[0]) {
                if !b.is_zero() {
                    *a = &*a - &(&f * b);
                }
            }
        }
    }
    (rows, ech.pivots)
}

/// Basis of the right kernel `{x : rows · x = 0}` over ℚ(x), each vector
/// cleared to polynomial entries.
pub fn kernel(rows: &[Vec<RatFn>], width: usize, nvars: usize) -> Vec<Vec<Poly>> {
    let mat: Vec<Vec<Poly>> = rows.iter().map(|r| clear_row(r, nvars)).collect();
    let ech = bareiss(mat, width, nvars);
    let free: Vec<usize> = (0..width).filter(|c| !ech.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = back_substitute(&ech, width, nvars, |row| -RatFn::from_poly(row[f].clone()));
            x[f] = RatFn::one(nvars);
            clear_row(&x, nvars)
        })
        .collect()
}

/// Basis of the intersection of two row spaces over ℚ.
pub fn intersection_q(a: &[Vec<Rat>], b: &[Vec<Rat>], width: usize) -> Vec<Vec<Rat>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Σ xᵢ aᵢ − Σ yⱼ bⱼ = 0, one row per coordinate
    let rows: Vec<Vec<Rat>> =
        (0..width).map(|c| a.iter().map(|v| v[c].clone()).chain(b.iter().map(|v| -v[c].clone())).collect()).collect();
    let combos = kernel_q(&rows, a.len() + b.len());
    let vecs: Vec<Vec<Rat>> = combos
        .iter()
        .map(|x| (0..width).map(|c| a.iter().zip(x).fold(Rat::zero(), |acc, (v, xi)| acc + &v[c] * xi)).collect())
        .collect();
    rref_q(vecs).0
}

/// Exact reduced row echelon form over ℚ; returns nonzero rows and pivots.
pub fn rref_q(mut rows: Vec<Vec<Rat>>) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let width = rows.first().map(Vec::len).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for e in rows[r].iter_mut() {
            *e *= &inv;
        }
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (a, b) in row.iter_mut().zip(&prow) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank_q(rows: &[Vec<Rat>]) -> usize {
    rref_q(rows.to_vec()).0.len()
}

/// Basis of the right kernel `{x : rows · x = 0}` over ℚ.
pub fn kernel_q(rows: &[Vec<Rat>], width: usize) -> Vec<Vec<Rat>> {
    let (red, pivots) = rref_q(rows.to_vec());
    (0..width)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut x = vec![Rat::zero(); width];
            x[f] = Rat::one();
            for (row, &pc) in red.iter().zip(&pivots) {
                x[pc] = -row[f].clone();
            }
            x
        })
        .collect()
}

/// Solves `Σ_j cols[j] x_j = rhs` over ℚ with free unknowns zero.
pub fn solve_q(cols: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let k = cols.len();
    let rows: Vec<Vec<Rat>> =
        (0..rhs.len()).map(|i| cols.iter().map(|c| c[i].clone()).chain(std::iter::once(rhs[i].clone())).collect()).collect();
    let (red, pivots) = rref_q(rows);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut x = vec![Rat::zero(); k];
    for (row, &pc) in red.iter().zip(&pivots) {
        x[pc] = row[k].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, rat, Chart};

    fn rf(s: &str) -> RatFn {
        let c = Chart::new("R", &["x", "y", "z"]).unwrap();
        parse_expr(s, &c).unwrap()
    }

    #[test]
    fn rational_system_solution() {
        let cols = vec![vec![rf("x"), rf("y")], vec![rf("1"), rf("1/x")]];
        let rhs = vec![rf("x^2 + 2"), rf("x*y + 2/x")];
        assert_eq!(solve_columns(&cols, &rhs, 3), Solve::Solution(vec![rf("x"), rf("2")]));
    }

    #[test]
    fn inconsistent_system() {
        let cols = vec![vec![rf("x"), rf("0")]];
        assert!(matches!(solve_columns(&cols, &[rf("0"), rf("y")], 3), Solve::Inconsistent { .. }));
    }

    #[test]
    fn kernel_of_rotation_field() {
        // -y a_x + x a_y = 0 has kernel spanned by (x, y, 0) and (0, 0, 1)
        let k = kernel(&[vec![rf("-y"), rf("x"), rf("0")]], 3, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot = &(&Poly::var(1, 3) * &v[0]).scale(&rat(-1)) + &(&Poly::var(0, 3) * &v[1]);
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn reduced_basis_normalizes_pivots() {
        let (rows, piv) = reduced_row_basis(&[vec![rf("x"), rf("x*y")], vec![rf("1"), rf("y + 1")]], 3);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(rows[0], vec![rf("1"), rf("0")]);
        assert_eq!(rows[1], vec![rf("0"), rf("1")]);
        assert_eq!(rank(&[vec![rf("x"), rf("x*y")], vec![rf("1"), rf("y")]], 3), 1);
    }

    #[test]
    fn rational_kernel_and_solve() {
        let rows = vec![vec![rat(1), rat(2), rat(3)], vec![rat(2), rat(4), rat(6)]];
        assert_eq!(rank_q(&rows), 1);
        assert_eq!(kernel_q(&rows, 3).len(), 2);
        let cols = vec![vec![rat(1), rat(0)], vec![rat(1), rat(1)]];
        assert_eq!(solve_q(&cols, &[rat(3), rat(1)]), Some(vec![rat(2), rat(1)]));
        assert_eq!(solve_q(&[vec![rat(1), rat(1)]], &[rat(1), rat(2)]), None);
        let a = vec![vec![rat(1), rat(0), rat(0)], vec![rat(0), rat(1), rat(0)]];
        let b = vec![vec![rat(0), rat(1), rat(1)], vec![rat(0), rat(0), rat(1)]];
        assert_eq!(intersection_q(&a, &b, 3), vec![vec![rat(0), rat(1), rat(0)]]);
    }
}

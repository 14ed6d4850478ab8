//! Admissible functions and implicit Hamiltonian systems `(X_f, 𝐝f) ∈ Γ(D)`,
//! upstairs and on reduced strata.

use std::sync::Arc;

use thiserror::Error;

use crate::actions::{average, is_invariant, ActionError, GroupAction};
use crate::calculus::{exterior_derivative_fn, CalculusError, OneForm, Section, VectorField};
use crate::dirac::{characteristic_distributions_of, DiracStructure};
use crate::distributions::{membership_in, DistError, Distribution, Membership};
use crate::expr::{Chart, ExprError, RatFn};
use crate::linalg::{self, Solve};
use crate::reduction::{pushforward_function, pushforward_vf, QuotientMap, ReducedDirac, ReductionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("function {function} is not invariant: residual {residual}")]
    NotInvariant { function: String, residual: String },
    #[error("function {function} is not admissible: residual {residual}")]
    NotAdmissible { function: String, residual: String },
    #[error("reduced pair is not a section of the reduced structure: residual {0}")]
    MembershipFailure(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

/// `X_f` with `(X_f, 𝐝f)` a section of `D`, and the gauge freedom `G₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSolution {
    pub f: RatFn,
    pub xf: VectorField,
    /// Coefficients of `(X_f, 𝐝f)` in the generator frame.
    pub coefficients: Vec<RatFn>,
    pub gauge: Distribution,
}

impl HamiltonianSolution {
    pub fn section(&self) -> Section {
        Section::new(self.xf.clone(), exterior_derivative_fn(&self.f, self.xf.chart())).expect("same chart")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Admissibility {
    Admissible(HamiltonianSolution),
    /// `𝐝f − Σ cᵢ αᵢ` for the best partial solution.
    NotAdmissible {
        residual: OneForm,
    },
}

impl Admissibility {
    pub fn solution(&self) -> Option<&HamiltonianSolution> {
        match self {
            Admissibility::Admissible(s) => Some(s),
            Admissibility::NotAdmissible { .. } => None,
        }
    }
}

/// Solves `Σ cᵢ αᵢ = 𝐝f` over the function field with free coefficients set
/// to zero, then takes `X_f = Σ cᵢ Xᵢ`.
pub fn solve_admissible_in(f: &RatFn, chart: &Arc<Chart>, generators: &[Section]) -> Admissibility {
    let n = chart.dim();
    let df = exterior_derivative_fn(f, chart);
    let cols: Vec<Vec<RatFn>> = generators.iter().map(|g| g.alpha.components().to_vec()).collect();
    let combine = |c: &[RatFn]| {
        let x = generators.iter().zip(c).fold(VectorField::zero(chart.clone()), |acc, (g, ci)| &acc + &g.x.scale(ci));
        let a = generators.iter().zip(c).fold(OneForm::zero(chart.clone()), |acc, (g, ci)| &acc + &g.alpha.scale(ci));
        (x, a)
    };
    let solved = if generators.is_empty() {
        if df.is_zero() {
            Solve::Solution(Vec::new())
        } else {
            Solve::Inconsistent { partial: Vec::new() }
        }
    } else {
        linalg::solve_columns(&cols, df.components(), n)
    };
    match solved {
        Solve::Solution(c) => {
            let (xf, _) = combine(&c);
            let gauge = characteristic_distributions_of(chart, generators).g0;
            Admissibility::Admissible(HamiltonianSolution { f: f.clone(), xf, coefficients: c, gauge })
        }
        Solve::Inconsistent { partial } => {
            let (_, a) = combine(&partial);
            Admissibility::NotAdmissible { residual: &df - &a }
        }
    }
}

pub fn solve_admissible(f: &RatFn, d: &DiracStructure) -> Admissibility {
    solve_admissible_in(f, d.chart(), d.generators())
}

/// Admissible solution with an invariant `X_f`, obtained by averaging.
pub fn invariant_hamiltonian(f: &RatFn, d: &DiracStructure, a: &GroupAction) -> Result<HamiltonianSolution, DynamicsError> {
    let names = d.chart().coords();
    let inv = is_invariant(f, a)?;
    if let Some((_, r)) = inv.residuals.first() {
        return Err(DynamicsError::NotInvariant {
            function: f.display(names).to_string(),
            residual: r.display(names).to_string(),
        });
    }
    let mut sol = match solve_admissible(f, d) {
        Admissibility::Admissible(s) => s,
        Admissibility::NotAdmissible { residual } => {
            return Err(DynamicsError::NotAdmissible { function: f.display(names).to_string(), residual: residual.to_string() })
        }
    };
    sol.xf = average(&sol.xf, a)?;
    match d.contains(&sol.section()).map_err(|e| match e {
        crate::dirac::DiracError::Distribution(e) => DynamicsError::Distribution(e),
        crate::dirac::DiracError::Calculus(e) => DynamicsError::Calculus(e),
        other => DynamicsError::MembershipFailure(other.to_string()),
    })? {
        Membership::Member(c) => sol.coefficients = c,
        Membership::NotMember(r) => return Err(DynamicsError::MembershipFailure(r.to_string())),
    }
    Ok(sol)
}

/// The reduced pair `(X_P̄, 𝐝f_P̄)` with its membership witness in the reduced
/// structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedHamiltonian {
    pub section: Section,
    pub f: RatFn,
    pub witness: Vec<RatFn>,
}

pub fn reduce_hamiltonian(
    sol: &HamiltonianSolution,
    q: &QuotientMap,
    r: &ReducedDirac,
    bound: u32,
) -> Result<ReducedHamiltonian, DynamicsError> {
    let st = &r.stratum;
    let xbar = pushforward_vf(&sol.xf, q, bound)?;
    let fbar = pushforward_function(&sol.f, q, bound)?;
    let lifted = Section::new(xbar, OneForm::zero(q.target().clone()))?;
    let restricted = crate::reduction::restrict_to_stratum(&lifted, st)?;
    let f_on = fbar.compose(st.embedding())?;
    let section = Section::new(restricted.x, exterior_derivative_fn(&f_on, st.params()))?;
    match membership_in(&section, &r.generators)? {
        Membership::Member(witness) => Ok(ReducedHamiltonian { section, f: f_on, witness }),
        Membership::NotMember(res) => Err(DynamicsError::MembershipFailure(res.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::new_dirac;
    use crate::expr::parse_expr;

    fn r3() -> Arc<Chart> {
        Chart::new("R3", &["x", "y", "z"]).unwrap()
    }

    fn s1_dirac(c: &Arc<Chart>) -> DiracStructure {
        let gens = vec![
            Section::parse(c, &["1", "0", "0"], &["0", "1", "0"]).unwrap(),
            Section::parse(c, &["0", "1", "0"], &["-1", "0", "0"]).unwrap(),
            Section::parse(c, &["0", "0", "1"], &["0", "0", "0"]).unwrap(),
        ];
        new_dirac(gens, &[]).unwrap()
    }

    #[test]
    fn rotation_energy_is_admissible_with_vertical_gauge() {
        let c = r3();
        let d = s1_dirac(&c);
        let f = parse_expr("x^2 + y^2", &c).unwrap();
        let sol = solve_admissible(&f, &d);
        let sol = sol.solution().unwrap();
        assert_eq!(sol.xf, VectorField::parse(&c, &["2*y", "-2*x", "0"]).unwrap());
        assert_eq!(sol.gauge.generic_rank(), 1);
        assert!(membership_in(&Section::tangent(VectorField::coordinate(c.clone(), 2)), sol.gauge.generators())
            .unwrap()
            .is_member());
        assert!(d.contains(&sol.section()).unwrap().is_member());
    }

    #[test]
    fn height_is_not_admissible() {
        let c = r3();
        let d = s1_dirac(&c);
        match solve_admissible(&parse_expr("z", &c).unwrap(), &d) {
            Admissibility::NotAdmissible { residual } => assert_eq!(residual, OneForm::coordinate(c, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constants_have_zero_hamiltonian_field() {
        let c = r3();
        let d = s1_dirac(&c);
        let sol = solve_admissible(&parse_expr("5", &c).unwrap(), &d);
        assert!(sol.solution().unwrap().xf.is_zero());
    }

    #[test]
    fn invariant_hamiltonian_averages() {
        let c = r3();
        let d = s1_dirac(&c);
        let a = GroupAction::torus(c.clone(), vec![VectorField::parse(&c, &["-y", "x", "0"]).unwrap()]).unwrap();
        let sol = invariant_hamiltonian(&parse_expr("x^2 + y^2", &c).unwrap(), &d, &a).unwrap();
        assert_eq!(sol.xf, VectorField::parse(&c, &["2*y", "-2*x", "0"]).unwrap());
        assert!(matches!(invariant_hamiltonian(&parse_expr("x", &c).unwrap(), &d, &a), Err(DynamicsError::NotInvariant { .. })));
        assert!(matches!(invariant_hamiltonian(&parse_expr("z", &c).unwrap(), &d, &a), Err(DynamicsError::NotAdmissible { .. })));
    }

    #[test]
    fn reduced_frame_rejects_height_on_the_axis() {
        let p1 = Chart::new("P1", &["zbar"]).unwrap();
        let gens = vec![Section::parse(&p1, &["1"], &["0"]).unwrap()];
        let sol = solve_admissible_in(&parse_expr("zbar", &p1).unwrap(), &p1, &gens);
        assert!(matches!(sol, Admissibility::NotAdmissible { .. }));
    }
}

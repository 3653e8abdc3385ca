//! Exact rational linear programming.
//!
//! [`LpModel`] holds variables (free or nonnegative), a linear objective
//! and `<=`/`=`/`>=` constraints with rational data. [`solve`] returns the
//! exact optimum at a basic feasible solution, or reports infeasibility or
//! unboundedness as an [`LpOutcome`]. [`SolvedLp`] keeps the final
//! dictionary so the optimal face can be probed with further objectives.
//!
//! Free variables are split as `x = x+ - x-`. Equalities become a pair of
//! opposite inequalities. The only presolve step is dropping duplicate rows.

mod rank;
mod simplex;

use std::collections::HashSet;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

pub use rank::{affine_rank, RowSpace};

use crate::rational::{format_rational, Rational};
use simplex::{PhaseEnd, Tableau};

pub type VarId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("coefficient references undeclared variable {0}")]
    UnknownVariable(VarId),
    #[error("optimal face requested but the model is {0}")]
    NoOptimum(LpStatus),
    #[error("probe is unbounded over the optimal face")]
    UnboundedProbe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Free,
    NonNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// A sparse linear form. Terms are kept sorted by variable with zero
/// coefficients removed, so structurally equal forms compare equal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LinExpr {
    terms: Vec<(VarId, Rational)>,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, var: VarId, coeff: Rational) -> Self {
        self.add(var, coeff);
        self
    }

    pub fn add(&mut self, var: VarId, coeff: Rational) {
        match self.terms.binary_search_by_key(&var, |(v, _)| *v) {
            Ok(i) => {
                self.terms[i].1 += coeff;
                if self.terms[i].1.is_zero() {
                    self.terms.remove(i);
                }
            }
            Err(i) => {
                if !coeff.is_zero() {
                    self.terms.insert(i, (var, coeff));
                }
            }
        }
    }

    pub fn terms(&self) -> &[(VarId, Rational)] {
        &self.terms
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (v, c)| acc + c * &point[*v])
    }

    /// Dense coefficient vector over `len` variables.
    pub fn dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (v, c) in &self.terms {
            out[*v] = c.clone();
        }
        out
    }
}

impl FromIterator<(VarId, Rational)> for LinExpr {
    fn from_iter<I: IntoIterator<Item = (VarId, Rational)>>(iter: I) -> Self {
        let mut expr = LinExpr::new();
        for (v, c) in iter {
            expr.add(v, c);
        }
        expr
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub expr: LinExpr,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn holds_at(&self, point: &[Rational]) -> bool {
        let lhs = self.expr.eval(point);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpModel {
    variables: Vec<Variable>,
    sense: Sense,
    objective: LinExpr,
    constraints: Vec<Constraint>,
}

impl LpModel {
    pub fn new(sense: Sense) -> Self {
        LpModel {
            variables: Vec::new(),
            sense,
            objective: LinExpr::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_variable(&mut self, name: impl Into<String>, kind: VarKind) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            kind,
        });
        self.variables.len() - 1
    }

    pub fn set_objective(&mut self, objective: LinExpr) {
        self.objective = objective;
    }

    pub fn add_constraint(&mut self, expr: LinExpr, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint {
            expr,
            relation,
            rhs,
        });
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.variables.len();
        let exprs =
            std::iter::once(&self.objective).chain(self.constraints.iter().map(|c| &c.expr));
        for expr in exprs {
            if let Some((v, _)) = expr.terms().iter().find(|(v, _)| *v >= n) {
                return Err(LpError::UnknownVariable(*v));
            }
        }
        Ok(())
    }

    /// True when `point` satisfies every constraint and sign restriction.
    pub fn is_feasible(&self, point: &[Rational]) -> bool {
        point.len() == self.variables.len()
            && self
                .variables
                .iter()
                .zip(point)
                .all(|(var, x)| var.kind == VarKind::Free || !x.is_negative())
            && self.constraints.iter().all(|c| c.holds_at(point))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub point: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal(sol) => Some(&sol.value),
            _ => None,
        }
    }

    pub fn solution(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }
}

impl fmt::Display for LpOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpOutcome::Optimal(sol) => write!(f, "optimal {}", format_rational(&sol.value)),
            other => write!(f, "{}", other.status()),
        }
    }
}

/// Internal columns backing one model variable.
#[derive(Debug, Clone, Copy)]
struct Split {
    plus: usize,
    minus: Option<usize>,
}

/// A solved model together with its final dictionary.
#[derive(Debug, Clone)]
pub struct SolvedLp {
    outcome: LpOutcome,
    tableau: Option<Tableau>,
    splits: Vec<Split>,
    structural: usize,
}

impl SolvedLp {
    pub fn new(model: &LpModel) -> Result<Self, LpError> {
        model.validate()?;

        let mut splits = Vec::with_capacity(model.variables.len());
        let mut structural = 0;
        for var in &model.variables {
            let plus = structural;
            structural += 1;
            let minus = match var.kind {
                VarKind::Free => {
                    structural += 1;
                    Some(structural - 1)
                }
                VarKind::NonNegative => None,
            };
            splits.push(Split { plus, minus });
        }
        let internal = |expr: &LinExpr, scale: &Rational| -> Vec<Rational> {
            let mut dense = vec![Rational::zero(); structural];
            for (v, c) in expr.terms() {
                let c = c * scale;
                let split = splits[*v];
                if let Some(m) = split.minus {
                    dense[m] = -c.clone();
                }
                dense[split.plus] = c;
            }
            dense
        };

        let one = Rational::from_integer(1.into());
        let minus_one = -one.clone();
        let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
        let mut seen = HashSet::new();
        let mut push = |coeffs: Vec<Rational>, rhs: Rational| {
            if seen.insert((coeffs.clone(), rhs.clone())) {
                rows.push((coeffs, rhs));
            }
        };
        for c in &model.constraints {
            if matches!(c.relation, Relation::Le | Relation::Eq) {
                push(internal(&c.expr, &one), c.rhs.clone());
            }
            if matches!(c.relation, Relation::Ge | Relation::Eq) {
                push(internal(&c.expr, &minus_one), -c.rhs.clone());
            }
        }

        let mut tableau = Tableau::from_rows(structural, &rows);
        let aux_id = structural + rows.len();
        if !tableau.make_feasible(aux_id) {
            return Ok(SolvedLp {
                outcome: LpOutcome::Infeasible,
                tableau: None,
                splits,
                structural,
            });
        }

        let scale = match model.sense {
            Sense::Maximize => one,
            Sense::Minimize => minus_one,
        };
        let objective = internal(&model.objective, &scale);
        tableau.set_objective(&objective.into_iter().enumerate().collect::<Vec<_>>());
        let mut solved = SolvedLp {
            outcome: LpOutcome::Unbounded,
            tableau: None,
            splits,
            structural,
        };
        if tableau.run() == PhaseEnd::Optimal {
            let mut value = tableau.obj[0].clone();
            if model.sense == Sense::Minimize {
                value = -value;
            }
            let point = solved.model_point(&tableau);
            solved.outcome = LpOutcome::Optimal(LpSolution { value, point });
            solved.tableau = Some(tableau);
        }
        Ok(solved)
    }

    pub fn outcome(&self) -> &LpOutcome {
        &self.outcome
    }

    pub fn into_outcome(self) -> LpOutcome {
        self.outcome
    }

    fn model_point(&self, tableau: &Tableau) -> Vec<Rational> {
        let vals = tableau.values(self.structural);
        self.splits
            .iter()
            .map(|s| match s.minus {
                Some(m) => &vals[s.plus] - &vals[m],
                None => vals[s.plus].clone(),
            })
            .collect()
    }

    /// Maximizes `probe` over the set of optimal solutions, returning the
    /// maximum and a maximizing vertex of the optimal face.
    pub fn face_maximizer(&self, probe: &LinExpr) -> Result<LpSolution, LpError> {
        let Some(optimal) = &self.tableau else {
            return Err(LpError::NoOptimum(self.outcome.status()));
        };
        let mut tableau = optimal.clone();
        // z = z* + sum gamma_k N_k with gamma <= 0, so z = z* exactly when
        // every column with gamma_k < 0 sits at zero.
        let off_face: Vec<usize> = (0..tableau.width())
            .filter(|&k| tableau.obj[k + 1].is_negative())
            .collect();
        tableau.drop_columns(&off_face);

        let mut coeffs = Vec::new();
        for (v, c) in probe.terms() {
            let split = self.splits.get(*v).ok_or(LpError::UnknownVariable(*v))?;
            coeffs.push((split.plus, c.clone()));
            if let Some(m) = split.minus {
                coeffs.push((m, -c.clone()));
            }
        }
        tableau.set_objective(&coeffs);
        match tableau.run() {
            PhaseEnd::Optimal => Ok(LpSolution {
                value: tableau.obj[0].clone(),
                point: self.model_point(&tableau),
            }),
            PhaseEnd::Unbounded => Err(LpError::UnboundedProbe),
        }
    }

    pub fn max_over_optimal_face(&self, probe: &LinExpr) -> Result<Rational, LpError> {
        self.face_maximizer(probe).map(|sol| sol.value)
    }
}

pub fn solve(model: &LpModel) -> Result<LpOutcome, LpError> {
    SolvedLp::new(model).map(SolvedLp::into_outcome)
}

/// Exact maximum of `probe` over the optimal solutions of `model`.
pub fn max_over_optimal_face(model: &LpModel, probe: &LinExpr) -> Result<Rational, LpError> {
    SolvedLp::new(model)?.max_over_optimal_face(probe)
}

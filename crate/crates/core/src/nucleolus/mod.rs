//! Nucleolus computation by a sequence of least-core linear programs.
//!
//! Round `l` maximizes `eps` subject to efficiency, the equalities fixed in
//! earlier rounds, individual rationality, and `x(S) - eps >= v(S)` for
//! every coalition of the family not yet fixed. A coalition is fixed at
//! `v(S) + eps` when `x(S)` takes that value on the whole optimal face.
//! Rounds stop once the fixed equalities pin a single point.

mod family;

use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

pub use family::{CoalitionFamily, Provenance};

use crate::bmatching::{matching_game, GameGraph, MatchingError, Side};
use crate::game::{Allocation, Coalition, Game, GameError};
use crate::lp::{
    LinExpr, LpError, LpModel, LpOutcome, LpStatus, Relation, RowSpace, Sense, SolvedLp, VarKind,
};
use crate::rational::{format_rational, Rational};

/// Largest game the full-family computation accepts.
pub const BRUTE_FORCE_MAX_PLAYERS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NucleolusError {
    #[error("invalid coalition family: {0}")]
    InvalidFamily(String),
    #[error("coalition family is empty")]
    EmptyFamily,
    #[error(
        "coalition family does not pin a unique point: residual dimension {residual_dimension}"
    )]
    FamilyTooWeak { residual_dimension: usize },
    #[error("round {0} fixed no coalition")]
    Stalled(usize),
    #[error("the game has no imputation")]
    NoImputation,
    #[error("brute force is limited to {cap} players, the game has {players}")]
    TooManyPlayers { players: usize, cap: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("linear program ended {0}")]
    UnexpectedStatus(LpStatus),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeRound {
    pub epsilon: Rational,
    /// Coalitions fixed in this round, in family order.
    pub fixed: Vec<Coalition>,
    /// The optimal point found by the round's linear program.
    pub point: Allocation,
    /// Face-maximization problems solved while deciding what to fix.
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeTrace {
    pub provenance: Provenance,
    pub family_size: usize,
    pub rounds: Vec<SchemeRound>,
    pub final_point: Allocation,
}

impl SchemeTrace {
    pub fn epsilons(&self) -> impl Iterator<Item = &Rational> {
        self.rounds.iter().map(|r| &r.epsilon)
    }

    /// Text report: one header line per round followed by its fixed
    /// coalitions, then the final allocation.
    pub fn report(&self, game: &Game) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "family: {} ({} coalitions)",
            self.provenance, self.family_size
        );
        for (i, round) in self.rounds.iter().enumerate() {
            let _ = writeln!(
                out,
                "round {}: epsilon = {}, fixed {}, probes {}",
                i + 1,
                format_rational(&round.epsilon),
                round.fixed.len(),
                round.probes
            );
            for &c in &round.fixed {
                let _ = writeln!(out, "  {}", game.format_coalition(c));
            }
        }
        let _ = writeln!(out, "final: {}", game.format_allocation(&self.final_point));
        out
    }
}

fn coalition_expr(c: Coalition) -> LinExpr {
    c.members()
        .map(|i| (i, Rational::from_integer(1.into())))
        .collect()
}

fn sum_over(point: &[Rational], c: Coalition) -> Rational {
    c.members().map(|i| &point[i]).sum()
}

/// Fixed equalities, efficiency and individual rationality over `x`.
fn base_model(game: &Game, fixed: &[(Coalition, Rational)], sense: Sense) -> LpModel {
    let n = game.player_count();
    let mut model = LpModel::new(sense);
    for name in game.names() {
        model.add_variable(format!("x[{name}]"), VarKind::Free);
    }
    model.add_constraint(
        coalition_expr(game.grand_coalition()),
        Relation::Eq,
        game.grand_value().clone(),
    );
    for (c, rhs) in fixed {
        model.add_constraint(coalition_expr(*c), Relation::Eq, rhs.clone());
    }
    for i in 0..n {
        let single = Coalition::singleton(i, n);
        model.add_constraint(coalition_expr(single), Relation::Ge, game.value(single));
    }
    model
}

/// Runs the scheme over `family`. The result does not depend on the order
/// of the family.
pub fn kopelowitz(game: &Game, family: &CoalitionFamily) -> Result<SchemeTrace, NucleolusError> {
    let n = game.player_count();
    if family.players() != n {
        return Err(GameError::PlayerCountMismatch {
            expected: n,
            found: family.players(),
        }
        .into());
    }
    if family.is_empty() && n > 1 {
        return Err(NucleolusError::EmptyFamily);
    }
    game.precompute(family.coalitions());

    let mut span = RowSpace::new(n);
    span.insert(&game.grand_coalition().indicator());
    let mut fixed: Vec<(Coalition, Rational)> = Vec::new();
    let mut unfixed: Vec<Coalition> = family.coalitions().to_vec();
    let mut rounds: Vec<SchemeRound> = Vec::new();
    let mut last_point: Option<Vec<Rational>> = (n == 1).then(|| vec![game.grand_value().clone()]);

    while span.rank() < n {
        if unfixed.is_empty() {
            last_point = Some(unique_point(game, &fixed, span.rank())?);
            break;
        }
        let eps_var = n;
        let mut model = base_model(game, &fixed, Sense::Maximize);
        model.add_variable("eps", VarKind::Free);
        model.set_objective(LinExpr::new().term(eps_var, Rational::from_integer(1.into())));
        for &c in &unfixed {
            let expr = coalition_expr(c).term(eps_var, Rational::from_integer((-1).into()));
            model.add_constraint(expr, Relation::Ge, game.value(c));
        }
        let solved = SolvedLp::new(&model)?;
        let solution = match solved.outcome() {
            LpOutcome::Optimal(s) => s.clone(),
            LpOutcome::Infeasible => return Err(NucleolusError::NoImputation),
            other => return Err(NucleolusError::UnexpectedStatus(other.status())),
        };
        let eps = solution.value.clone();
        let x_hat: Vec<Rational> = solution.point[..n].to_vec();

        // Points of the optimal face seen so far; any of them with slack on
        // S shows S is not fixed.
        let mut witnesses = vec![x_hat.clone()];
        let mut newly = Vec::new();
        let mut rest = Vec::new();
        let mut probes = 0;
        for c in unfixed {
            let target = game.value(c) + &eps;
            let row = c.indicator();
            let tight = witnesses.iter().all(|p| sum_over(p, c) == target);
            if !tight {
                rest.push(c);
            } else if span.contains(&row) {
                newly.push(c);
            } else {
                probes += 1;
                let best = solved.face_maximizer(&coalition_expr(c))?;
                if best.value == target {
                    span.insert(&row);
                    newly.push(c);
                } else {
                    witnesses.push(best.point[..n].to_vec());
                    rest.push(c);
                }
            }
        }
        if newly.is_empty() {
            return Err(NucleolusError::Stalled(rounds.len() + 1));
        }
        for &c in &newly {
            fixed.push((c, game.value(c) + &eps));
        }
        rounds.push(SchemeRound {
            epsilon: eps,
            fixed: newly,
            point: Allocation::new(x_hat.clone()),
            probes,
        });
        unfixed = rest;
        last_point = Some(x_hat);
    }

    Ok(SchemeTrace {
        provenance: family.provenance(),
        family_size: family.len(),
        rounds,
        final_point: Allocation::new(last_point.expect("at least one round ran")),
    })
}

/// With the family exhausted, the fixed equalities together with
/// individual rationality may still determine a single point.
fn unique_point(
    game: &Game,
    fixed: &[(Coalition, Rational)],
    rank: usize,
) -> Result<Vec<Rational>, NucleolusError> {
    let n = game.player_count();
    let too_weak = NucleolusError::FamilyTooWeak {
        residual_dimension: n - rank,
    };
    let mut point = Vec::with_capacity(n);
    for i in 0..n {
        let mut values = Vec::with_capacity(2);
        for sense in [Sense::Maximize, Sense::Minimize] {
            let mut model = base_model(game, fixed, sense);
            model.set_objective(coalition_expr(Coalition::singleton(i, n)));
            match SolvedLp::new(&model)?.into_outcome() {
                LpOutcome::Optimal(s) => values.push(s.value),
                _ => return Err(too_weak),
            }
        }
        if values[0] != values[1] {
            return Err(too_weak);
        }
        point.push(values.swap_remove(0));
    }
    Ok(point)
}

/// The nucleolus over the family of all proper coalitions.
pub fn nucleolus_bruteforce(game: &Game) -> Result<Allocation, NucleolusError> {
    Ok(bruteforce_trace(game)?.final_point)
}

pub fn bruteforce_trace(game: &Game) -> Result<SchemeTrace, NucleolusError> {
    let n = game.player_count();
    if n > BRUTE_FORCE_MAX_PLAYERS {
        return Err(NucleolusError::TooManyPlayers {
            players: n,
            cap: BRUTE_FORCE_MAX_PLAYERS,
        });
    }
    kopelowitz(game, &CoalitionFamily::full(n))
}

/// Smallest `k` for which the size-bounded family applies: the number of
/// side-B vertices with capacity 2.
pub fn charset_i_min_k(graph: &GameGraph) -> usize {
    graph
        .vertices()
        .iter()
        .filter(|v| v.side == Side::B && v.b == 2)
        .count()
}

/// Side A may carry any capacity up to 2: a side-A vertex with `b = 1`
/// only shortens matching components, so the size bound still holds.
pub fn check_charset_i(graph: &GameGraph, k: usize) -> Result<(), NucleolusError> {
    let fail = |msg: String| Err(NucleolusError::Precondition(msg));
    if !graph.is_side_labeled() {
        return fail("every vertex needs an A/B side label".into());
    }
    if !graph.is_bipartite() {
        return fail("graph is not bipartite".into());
    }
    if !graph.is_simple() {
        return fail("charset-i applies to the simple game only".into());
    }
    for v in graph.vertices() {
        if v.b > 2 {
            return fail(format!("vertex {} has b = {} > 2", v.name, v.b));
        }
    }
    let heavy = charset_i_min_k(graph);
    if heavy > k {
        return fail(format!(
            "{heavy} side-B vertices have b = 2, more than k = {k}"
        ));
    }
    Ok(())
}

pub fn charset_i_trace(graph: &GameGraph, k: usize) -> Result<(Game, SchemeTrace), NucleolusError> {
    check_charset_i(graph, k)?;
    let game = matching_game(graph)?;
    let trace = kopelowitz(&game, &CoalitionFamily::charset_i(game.player_count(), k))?;
    Ok((game, trace))
}

/// Nucleolus of the simple b-matching game from coalitions of size at most
/// `2k + 3`.
pub fn nucleolus_charset_i(graph: &GameGraph, k: usize) -> Result<Allocation, NucleolusError> {
    Ok(charset_i_trace(graph, k)?.1.final_point)
}

pub fn check_charset_ii(graph: &GameGraph) -> Result<(), NucleolusError> {
    let fail = |msg: String| Err(NucleolusError::Precondition(msg));
    if !graph.is_bipartite() {
        return fail("graph is not bipartite".into());
    }
    check_non_simple_two(graph)
}

fn check_non_simple_two(graph: &GameGraph) -> Result<(), NucleolusError> {
    if let Some(v) = graph.vertices().iter().find(|v| v.b != 2) {
        return Err(NucleolusError::Precondition(format!(
            "vertex {} has b = {} != 2",
            v.name, v.b
        )));
    }
    if !graph.is_non_simple() {
        return Err(NucleolusError::Precondition(
            "every edge must be repeatable".into(),
        ));
    }
    Ok(())
}

pub fn charset_ii_trace(graph: &GameGraph) -> Result<(Game, SchemeTrace), NucleolusError> {
    check_charset_ii(graph)?;
    let game = matching_game(graph)?;
    let trace = kopelowitz(&game, &CoalitionFamily::charset_ii(game.player_count()))?;
    Ok((game, trace))
}

/// Nucleolus of the non-simple game with `b = 2` from singletons and pairs.
pub fn nucleolus_charset_ii(graph: &GameGraph) -> Result<Allocation, NucleolusError> {
    Ok(charset_ii_trace(graph)?.1.final_point)
}

/// Exact comparison against the full-family nucleolus.
pub fn is_nucleolus(game: &Game, candidate: &Allocation) -> Result<bool, NucleolusError> {
    if candidate.len() != game.player_count() {
        return Err(GameError::PlayerCountMismatch {
            expected: game.player_count(),
            found: candidate.len(),
        }
        .into());
    }
    Ok(nucleolus_bruteforce(game)? == *candidate)
}

/// An optimal dual point `y` of the fractional matching relaxation and the
/// allocation `2y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCoreAllocation {
    pub dual: Vec<Rational>,
    pub allocation: Allocation,
}

/// Solves `min sum 2 y_v` subject to `y_u + y_v >= w(uv)` and `y >= 0`.
/// For the non-simple game with `b = 2` the doubled optimum is a core
/// allocation; bipartiteness is not needed.
pub fn dual_core_allocation(graph: &GameGraph) -> Result<DualCoreAllocation, NucleolusError> {
    check_non_simple_two(graph)?;
    let n = graph.vertex_count();
    let mut model = LpModel::new(Sense::Minimize);
    for v in graph.vertices() {
        model.add_variable(format!("y[{}]", v.name), VarKind::NonNegative);
    }
    let two = Rational::from_integer(2.into());
    model.set_objective((0..n).map(|v| (v, two.clone())).collect());
    for e in graph.edges() {
        if e.weight > Rational::zero() {
            let one = Rational::from_integer(1.into());
            model.add_constraint(
                LinExpr::new().term(e.u, one.clone()).term(e.v, one),
                Relation::Ge,
                e.weight.clone(),
            );
        }
    }
    let dual = match SolvedLp::new(&model)?.into_outcome() {
        LpOutcome::Optimal(s) => s.point,
        other => return Err(NucleolusError::UnexpectedStatus(other.status())),
    };
    let allocation = Allocation::new(dual.iter().map(|y| y * &two).collect());
    Ok(DualCoreAllocation { dual, allocation })
}

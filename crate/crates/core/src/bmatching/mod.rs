//! The b-matching value function.
//!
//! `v(S)` is the maximum weight of a b-matching in the induced subgraph
//! `G[S]`: edge multiplicities with at most `b_v` units at each vertex, and
//! at most one unit per edge unless the edge is marked repeatable. Values
//! are computed by exact branch-and-bound over multiplicity vectors, which
//! keeps one auditable code path for every game variant. Induced subgraphs
//! with more than [`DEFAULT_EDGE_CAP`] candidate edges are refused.

mod graph;
mod search;

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use num_traits::Zero;
use thiserror::Error;

pub use graph::{Edge, GameGraph, GraphError, Side, Vertex};

use crate::game::{Coalition, Game, GameError, MAX_PLAYERS};
use crate::rational::Rational;
use search::{Capacity, Instance, WeightFilter};

pub const DEFAULT_EDGE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("coalition is over {found} players but the graph has {expected} vertices")]
    CoalitionMismatch { expected: usize, found: usize },
    #[error("induced subgraph has {edges} candidate edges, above the cap of {cap}")]
    EdgeCapExceeded { edges: usize, cap: usize },
    #[error("more than {0} maximum matchings; refusing to enumerate further")]
    MatchingCapExceeded(usize),
    #[error("scaled edge weights overflow 128-bit integers")]
    WeightOverflow,
    #[error("infeasible matching: {0}")]
    Infeasible(String),
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("vertex `{0}` has b != 2")]
    NotUniformTwo(String),
    #[error("graph has single-use edges; a non-simple game is required")]
    NotNonSimple,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Edge multiplicities, keyed by edge index; zero entries are omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    multiplicities: BTreeMap<usize, u32>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, edge: usize, mult: u32) {
        if mult == 0 {
            self.multiplicities.remove(&edge);
        } else {
            self.multiplicities.insert(edge, mult);
        }
    }

    pub fn get(&self, edge: usize) -> u32 {
        self.multiplicities.get(&edge).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.multiplicities.iter().map(|(&e, &m)| (e, m))
    }

    pub fn is_empty(&self) -> bool {
        self.multiplicities.is_empty()
    }

    pub fn weight(&self, graph: &GameGraph) -> Rational {
        self.iter()
            .map(|(e, m)| &graph.edges()[e].weight * Rational::from_integer(m.into()))
            .sum()
    }

    /// Units of the matching at each vertex.
    pub fn degrees(&self, graph: &GameGraph) -> Vec<u32> {
        let mut deg = vec![0; graph.vertex_count()];
        for (e, m) in self.iter() {
            let edge = &graph.edges()[e];
            deg[edge.u] += m;
            deg[edge.v] += m;
        }
        deg
    }

    /// Checks degree bounds, edge reuse and that every edge lies in `G[S]`.
    pub fn validate(&self, graph: &GameGraph, coalition: Coalition) -> Result<(), MatchingError> {
        check_coalition(graph, coalition)?;
        for (e, m) in self.iter() {
            let edge = graph
                .edges()
                .get(e)
                .ok_or_else(|| MatchingError::Infeasible(format!("no edge #{e}")))?;
            if !coalition.contains(edge.u) || !coalition.contains(edge.v) {
                return Err(MatchingError::Infeasible(format!(
                    "edge {}-{} leaves the coalition",
                    graph.name(edge.u),
                    graph.name(edge.v)
                )));
            }
            if m > 1 && !edge.multi {
                return Err(MatchingError::Infeasible(format!(
                    "edge {}-{} used {m} times",
                    graph.name(edge.u),
                    graph.name(edge.v)
                )));
            }
        }
        for (v, d) in self.degrees(graph).into_iter().enumerate() {
            if d > graph.b(v) {
                return Err(MatchingError::Infeasible(format!(
                    "vertex {} has degree {d} > b = {}",
                    graph.name(v),
                    graph.b(v)
                )));
            }
        }
        Ok(())
    }
}

fn check_coalition(graph: &GameGraph, coalition: Coalition) -> Result<(), MatchingError> {
    if coalition.player_count() != graph.vertex_count() {
        return Err(MatchingError::CoalitionMismatch {
            expected: graph.vertex_count(),
            found: coalition.player_count(),
        });
    }
    Ok(())
}

/// Exhaustive b-matching solver with a cap on the induced edge count.
#[derive(Debug, Clone, Copy)]
pub struct MatchingSolver {
    pub edge_cap: usize,
}

impl Default for MatchingSolver {
    fn default() -> Self {
        MatchingSolver {
            edge_cap: DEFAULT_EDGE_CAP,
        }
    }
}

impl MatchingSolver {
    pub fn with_cap(edge_cap: usize) -> Self {
        MatchingSolver { edge_cap }
    }

    fn instance(
        &self,
        graph: &GameGraph,
        coalition: Coalition,
        capacity: Capacity,
        filter: WeightFilter,
    ) -> Result<Instance, MatchingError> {
        check_coalition(graph, coalition)?;
        Instance::build(graph, coalition, capacity, filter, self.edge_cap)
    }

    pub fn value(
        &self,
        graph: &GameGraph,
        coalition: Coalition,
    ) -> Result<Rational, MatchingError> {
        let inst = self.instance(graph, coalition, Capacity::Graph, WeightFilter::Positive)?;
        Ok(inst.to_rational(inst.best()))
    }

    /// A maximum matching; among optima the lexicographically smallest
    /// multiplicity vector in edge order.
    pub fn max_matching(
        &self,
        graph: &GameGraph,
        coalition: Coalition,
    ) -> Result<Matching, MatchingError> {
        let inst = self.instance(graph, coalition, Capacity::Graph, WeightFilter::Positive)?;
        let best = inst.best();
        Ok(inst.lex_first(best))
    }

    /// Twice the maximum weight of a 1-matching: the best matching that
    /// uses only doubled edges.
    pub fn parallel_edges_value(
        &self,
        graph: &GameGraph,
        coalition: Coalition,
    ) -> Result<Rational, MatchingError> {
        let inst = self.instance(graph, coalition, Capacity::One, WeightFilter::Positive)?;
        Ok(inst.to_rational(inst.best()) * Rational::from_integer(2.into()))
    }

    /// `v(S)` for bipartite non-simple games with `b = 2` everywhere, via a
    /// maximum 1-matching whose edges are doubled.
    pub fn nonsimple2_value_fast(
        &self,
        graph: &GameGraph,
        coalition: Coalition,
    ) -> Result<Rational, MatchingError> {
        require_bipartite_nonsimple_two(graph)?;
        self.parallel_edges_value(graph, coalition)
    }

    /// Whether `G[S][M]` spans `S` connectedly for every maximum matching
    /// `M`. An empty maximum matching on two or more vertices counts as
    /// disconnected. At most `cap` maximum matchings are examined.
    pub fn all_max_matchings_connected(
        &self,
        graph: &GameGraph,
        coalition: Coalition,
        cap: usize,
    ) -> Result<bool, MatchingError> {
        check_coalition(graph, coalition)?;
        if coalition.len() <= 1 {
            return Ok(true);
        }
        let target = self
            .instance(graph, coalition, Capacity::Graph, WeightFilter::Positive)?
            .best();
        let inst = self.instance(graph, coalition, Capacity::Graph, WeightFilter::NonNegative)?;
        let mut seen = 0usize;
        let mut connected = true;
        let mut over_cap = false;
        inst.for_each_optimum(target, |m| {
            seen += 1;
            if seen > cap {
                over_cap = true;
                return ControlFlow::Break(());
            }
            if !spans_connected(graph, coalition, m) {
                connected = false;
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if over_cap {
            return Err(MatchingError::MatchingCapExceeded(cap));
        }
        Ok(connected)
    }

    /// The b-matching game on `graph`. Fails up front when the grand
    /// coalition is beyond the solver's reach, so every later oracle query
    /// succeeds.
    pub fn game(&self, graph: &GameGraph) -> Result<Game, MatchingError> {
        let n = graph.vertex_count();
        if n > MAX_PLAYERS {
            return Err(GameError::TooManyPlayers(n).into());
        }
        let grand = Coalition::grand(n);
        self.instance(graph, grand, Capacity::Graph, WeightFilter::Positive)?;
        let solver = *self;
        let owned = graph.clone();
        let game = Game::new(graph.names(), move |c| {
            solver
                .value(&owned, c)
                .expect("sub-coalitions stay within the grand coalition's limits")
        })?;
        Ok(game)
    }
}

fn require_bipartite_nonsimple_two(graph: &GameGraph) -> Result<(), MatchingError> {
    if !graph.is_bipartite() {
        return Err(MatchingError::NotBipartite);
    }
    if let Some(v) = graph.vertices().iter().find(|v| v.b != 2) {
        return Err(MatchingError::NotUniformTwo(v.name.clone()));
    }
    if !graph.is_non_simple() {
        return Err(MatchingError::NotNonSimple);
    }
    Ok(())
}

fn spans_connected(graph: &GameGraph, coalition: Coalition, m: &Matching) -> bool {
    let comps = matching_components_unchecked(graph, m);
    comps.len() == 1 && comps[0] == coalition
}

fn matching_components_unchecked(graph: &GameGraph, m: &Matching) -> Vec<Coalition> {
    let n = graph.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut touched = vec![false; n];
    for (e, _) in m.iter() {
        let edge = &graph.edges()[e];
        touched[edge.u] = true;
        touched[edge.v] = true;
        let (a, b) = (find(&mut parent, edge.u), find(&mut parent, edge.v));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in (0..n).filter(|&v| touched[v]) {
        let root = find(&mut parent, v);
        groups.entry(root).or_default().push(v);
    }
    let mut comps: Vec<Coalition> = groups
        .into_values()
        .map(|members| Coalition::from_members(members, n).expect("vertex indices in range"))
        .collect();
    comps.sort_by_key(|c| c.members().next());
    comps
}

pub fn value(graph: &GameGraph, coalition: Coalition) -> Result<Rational, MatchingError> {
    MatchingSolver::default().value(graph, coalition)
}

pub fn max_matching(graph: &GameGraph, coalition: Coalition) -> Result<Matching, MatchingError> {
    MatchingSolver::default().max_matching(graph, coalition)
}

pub fn nonsimple2_value_fast(
    graph: &GameGraph,
    coalition: Coalition,
) -> Result<Rational, MatchingError> {
    MatchingSolver::default().nonsimple2_value_fast(graph, coalition)
}

pub fn parallel_edges_value(
    graph: &GameGraph,
    coalition: Coalition,
) -> Result<Rational, MatchingError> {
    MatchingSolver::default().parallel_edges_value(graph, coalition)
}

pub fn all_max_matchings_connected(
    graph: &GameGraph,
    coalition: Coalition,
    cap: usize,
) -> Result<bool, MatchingError> {
    MatchingSolver::default().all_max_matchings_connected(graph, coalition, cap)
}

/// Vertex sets of the connected components formed by edges of positive
/// multiplicity, ordered by smallest vertex. Untouched vertices are omitted.
pub fn matching_components(
    graph: &GameGraph,
    coalition: Coalition,
    matching: &Matching,
) -> Result<Vec<Coalition>, MatchingError> {
    matching.validate(graph, coalition)?;
    Ok(matching_components_unchecked(graph, matching))
}

pub fn matching_game(graph: &GameGraph) -> Result<Game, MatchingError> {
    MatchingSolver::default().game(graph)
}

/// True when every edge weight is zero or positive integral one; used for
/// the unweighted capacity bound.
pub fn is_unweighted(graph: &GameGraph) -> bool {
    let one = Rational::from_integer(1.into());
    graph
        .edges()
        .iter()
        .all(|e| e.weight == one || e.weight.is_zero())
}

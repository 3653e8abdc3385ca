use std::collections::BTreeMap;

use super::GadgetError;
use crate::bmatching::GameGraph;

pub const DEFAULT_DETECT_CAP: usize = 22;

/// An edge subset `H` with its degree profile. `special` lists the
/// vertices of degree 2, which a two-from-cubic subgraph has exactly two of.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphWitness {
    pub edges: Vec<usize>,
    pub degrees: BTreeMap<usize, usize>,
    pub special: Vec<usize>,
}

impl SubgraphWitness {
    pub fn from_edges(graph: &GameGraph, mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut degrees = BTreeMap::new();
        for &e in &edges {
            let edge = &graph.edges()[e];
            *degrees.entry(edge.u).or_insert(0) += 1;
            *degrees.entry(edge.v).or_insert(0) += 1;
        }
        let special = degrees
            .iter()
            .filter(|(_, &d)| d == 2)
            .map(|(&v, _)| v)
            .collect();
        SubgraphWitness {
            edges,
            degrees,
            special,
        }
    }

    pub fn is_cubic(&self) -> bool {
        !self.edges.is_empty() && self.degrees.values().all(|&d| d == 3)
    }

    pub fn is_two_from_cubic(&self) -> bool {
        self.special.len() == 2 && self.degrees.values().all(|&d| d == 2 || d == 3)
    }

    /// A two-from-cubic subgraph is trivial when an unused edge joins its
    /// two degree-2 vertices, so adding it gives a cubic subgraph.
    pub fn is_trivial(&self, graph: &GameGraph) -> bool {
        if !self.is_two_from_cubic() {
            return false;
        }
        let (a, b) = (self.special[0], self.special[1]);
        graph.edges().iter().enumerate().any(|(i, e)| {
            ((e.u == a && e.v == b) || (e.u == b && e.v == a))
                && self.edges.binary_search(&i).is_err()
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Target {
    Cubic,
    TwoFromCubic,
}

struct Search<'a> {
    graph: &'a GameGraph,
    order: Vec<usize>,
    target: Target,
    degree: Vec<usize>,
    remaining: Vec<usize>,
    closed_twos: usize,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn allowed_twos(&self) -> usize {
        match self.target {
            Target::Cubic => 0,
            Target::TwoFromCubic => 2,
        }
    }

    /// Whether vertex `x` can still end with an admissible degree.
    fn viable(&self, x: usize) -> bool {
        let (d, r) = (self.degree[x], self.remaining[x]);
        if d == 0 {
            return true;
        }
        match self.target {
            Target::Cubic => d + r >= 3,
            Target::TwoFromCubic => d + r >= 2,
        }
    }

    fn close(&mut self, x: usize) -> bool {
        if self.remaining[x] == 0 && self.degree[x] == 2 {
            self.closed_twos += 1;
        }
        self.closed_twos <= self.allowed_twos()
    }

    fn reopen(&mut self, x: usize) {
        if self.remaining[x] == 0 && self.degree[x] == 2 {
            self.closed_twos -= 1;
        }
    }

    fn run(&mut self, p: usize) -> bool {
        if p == self.order.len() {
            return !self.chosen.is_empty() && self.closed_twos == self.allowed_twos();
        }
        let e = self.order[p];
        let (u, v) = (self.graph.edges()[e].u, self.graph.edges()[e].v);
        for take in [true, false] {
            if take && (self.degree[u] == 3 || self.degree[v] == 3) {
                continue;
            }
            if take {
                self.degree[u] += 1;
                self.degree[v] += 1;
                self.chosen.push(e);
            }
            self.remaining[u] -= 1;
            self.remaining[v] -= 1;
            let ok_u = self.close(u);
            let ok_v = self.close(v);
            let found = ok_u && ok_v && self.viable(u) && self.viable(v) && self.run(p + 1);
            self.reopen(v);
            self.reopen(u);
            self.remaining[u] += 1;
            self.remaining[v] += 1;
            if found {
                return true;
            }
            if take {
                self.degree[u] -= 1;
                self.degree[v] -= 1;
                self.chosen.pop();
            }
        }
        false
    }
}

fn search(
    graph: &GameGraph,
    cap: usize,
    target: Target,
) -> Result<Option<SubgraphWitness>, GadgetError> {
    if graph.edge_count() > cap {
        return Err(GadgetError::DetectCapExceeded {
            edges: graph.edge_count(),
            cap,
        });
    }
    let mut order: Vec<usize> = (0..graph.edge_count()).collect();
    order.sort_by_key(|&e| {
        let edge = &graph.edges()[e];
        (edge.u.min(edge.v), edge.u.max(edge.v))
    });
    let n = graph.vertex_count();
    let mut remaining = vec![0; n];
    for e in graph.edges() {
        remaining[e.u] += 1;
        remaining[e.v] += 1;
    }
    let mut s = Search {
        graph,
        order,
        target,
        degree: vec![0; n],
        remaining,
        closed_twos: 0,
        chosen: Vec::new(),
    };
    Ok(s.run(0)
        .then(|| SubgraphWitness::from_edges(graph, s.chosen.clone())))
}

/// A nonempty subgraph with every vertex of degree exactly 3, by
/// exhaustive edge-subset search; refuses graphs above `cap` edges.
pub fn detect_cubic(graph: &GameGraph, cap: usize) -> Result<Option<SubgraphWitness>, GadgetError> {
    search(graph, cap, Target::Cubic)
}

/// A two-from-cubic subgraph. When a cubic subgraph exists the answer is
/// the trivial one obtained by deleting its first edge.
pub fn detect_2fc(graph: &GameGraph, cap: usize) -> Result<Option<SubgraphWitness>, GadgetError> {
    if let Some(cubic) = detect_cubic(graph, cap)? {
        let edges = cubic.edges[1..].to_vec();
        return Ok(Some(SubgraphWitness::from_edges(graph, edges)));
    }
    search(graph, cap, Target::TwoFromCubic)
}

/// 0 when a cubic subgraph exists, 1 when only a two-from-cubic subgraph
/// exists, `None` otherwise.
pub fn delta(graph: &GameGraph, cap: usize) -> Result<Option<u8>, GadgetError> {
    if detect_cubic(graph, cap)?.is_some() {
        return Ok(Some(0));
    }
    Ok(detect_2fc(graph, cap)?.map(|_| 1))
}

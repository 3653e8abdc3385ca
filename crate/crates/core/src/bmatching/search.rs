//! Branch-and-bound over edge multiplicities with integer-scaled weights.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::{GameGraph, Matching, MatchingError};
use crate::game::Coalition;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Capacity {
    /// Vertex capacities and edge reuse as given by the graph.
    Graph,
    /// Every vertex capacity and every edge multiplicity capped at one.
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WeightFilter {
    Positive,
    NonNegative,
}

#[derive(Debug, Clone)]
struct SearchEdge {
    id: usize,
    u: usize,
    v: usize,
    weight: i128,
    max_mult: u32,
}

/// A matching problem on `G[S]` with vertices renumbered locally.
#[derive(Debug, Clone)]
pub(crate) struct Instance {
    edges: Vec<SearchEdge>,
    capacity: Vec<u32>,
    scale: BigInt,
}

struct Scratch {
    residual: Vec<u32>,
    count: Vec<u32>,
    max_weight: Vec<i128>,
}

impl Instance {
    pub(crate) fn build(
        graph: &GameGraph,
        coalition: Coalition,
        capacity: Capacity,
        filter: WeightFilter,
        cap: usize,
    ) -> Result<Self, MatchingError> {
        let mut local = vec![usize::MAX; graph.vertex_count()];
        let mut caps = Vec::new();
        for v in coalition.members() {
            local[v] = caps.len();
            caps.push(match capacity {
                Capacity::Graph => graph.b(v),
                Capacity::One => graph.b(v).min(1),
            });
        }
        let chosen: Vec<usize> = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| coalition.contains(e.u) && coalition.contains(e.v))
            .filter(|(_, e)| match filter {
                WeightFilter::Positive => e.weight.is_positive(),
                WeightFilter::NonNegative => !e.weight.is_negative(),
            })
            .map(|(i, _)| i)
            .collect();
        if chosen.len() > cap {
            return Err(MatchingError::EdgeCapExceeded {
                edges: chosen.len(),
                cap,
            });
        }
        let scale = chosen.iter().fold(BigInt::one(), |acc, &i| {
            acc.lcm(graph.edges()[i].weight.denom())
        });
        let mut edges = Vec::with_capacity(chosen.len());
        let mut total: i128 = 0;
        for &i in &chosen {
            let e = &graph.edges()[i];
            let scaled = e.weight.numer() * (&scale / e.weight.denom());
            let weight = scaled.to_i128().ok_or(MatchingError::WeightOverflow)?;
            let (u, v) = (local[e.u], local[e.v]);
            let max_mult = match capacity {
                Capacity::One => 1,
                Capacity::Graph if e.multi => caps[u].min(caps[v]),
                Capacity::Graph => 1,
            }
            .min(caps[u])
            .min(caps[v]);
            total = weight
                .checked_mul(max_mult.into())
                .and_then(|w| total.checked_add(w))
                .ok_or(MatchingError::WeightOverflow)?;
            edges.push(SearchEdge {
                id: i,
                u,
                v,
                weight,
                max_mult,
            });
        }
        Ok(Instance {
            edges,
            capacity: caps,
            scale,
        })
    }

    pub(crate) fn to_rational(&self, scaled: i128) -> Rational {
        Rational::new(BigInt::from(scaled), self.scale.clone())
    }

    fn scratch(&self) -> Scratch {
        let n = self.capacity.len();
        Scratch {
            residual: self.capacity.clone(),
            count: vec![0; n],
            max_weight: vec![0; n],
        }
    }

    /// Upper bound on the weight still obtainable from `order[p..]`.
    fn bound(&self, order: &[usize], p: usize, s: &mut Scratch) -> i128 {
        s.count.iter_mut().for_each(|c| *c = 0);
        s.max_weight.iter_mut().for_each(|w| *w = 0);
        let mut by_edge = 0i128;
        for &q in &order[p..] {
            let e = &self.edges[q];
            let m = e.max_mult.min(s.residual[e.u]).min(s.residual[e.v]);
            if m == 0 || e.weight == 0 {
                continue;
            }
            by_edge += e.weight * i128::from(m);
            for x in [e.u, e.v] {
                s.count[x] += m;
                s.max_weight[x] = s.max_weight[x].max(e.weight);
            }
        }
        let by_vertex: i128 = (0..self.capacity.len())
            .map(|x| i128::from(s.count[x].min(s.residual[x])) * s.max_weight[x])
            .sum();
        by_edge.min(by_vertex / 2)
    }

    /// The optimum in scaled units.
    pub(crate) fn best(&self) -> i128 {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by(|&a, &b| {
            self.edges[b]
                .weight
                .cmp(&self.edges[a].weight)
                .then(a.cmp(&b))
        });
        let mut s = self.scratch();
        let mut best = 0;
        self.search_best(&order, 0, &mut s, 0, &mut best);
        best
    }

    fn search_best(
        &self,
        order: &[usize],
        p: usize,
        s: &mut Scratch,
        current: i128,
        best: &mut i128,
    ) {
        if current > *best {
            *best = current;
        }
        if p == order.len() || current + self.bound(order, p, s) <= *best {
            return;
        }
        let e = &self.edges[order[p]];
        let top = e.max_mult.min(s.residual[e.u]).min(s.residual[e.v]);
        for m in (0..=top).rev() {
            s.residual[e.u] -= m;
            s.residual[e.v] -= m;
            self.search_best(order, p + 1, s, current + e.weight * i128::from(m), best);
            s.residual[e.u] += m;
            s.residual[e.v] += m;
        }
    }

    /// The lexicographically smallest multiplicity vector (in edge order)
    /// reaching `target`.
    pub(crate) fn lex_first(&self, target: i128) -> Matching {
        let mut found = None;
        self.for_each_optimum(target, |m| {
            found = Some(m.clone());
            ControlFlow::Break(())
        });
        found.expect("the target is attained")
    }

    /// Visits every multiplicity vector of weight `target`, in
    /// lexicographic order of edge index.
    pub(crate) fn for_each_optimum<F>(&self, target: i128, mut visit: F)
    where
        F: FnMut(&Matching) -> ControlFlow<()>,
    {
        let order: Vec<usize> = (0..self.edges.len()).collect();
        let mut s = self.scratch();
        let mut mult = vec![0u32; self.edges.len()];
        let _ = self.search_all(&order, 0, &mut s, 0, target, &mut mult, &mut visit);
    }

    #[allow(clippy::too_many_arguments)]
    fn search_all<F>(
        &self,
        order: &[usize],
        p: usize,
        s: &mut Scratch,
        current: i128,
        target: i128,
        mult: &mut [u32],
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&Matching) -> ControlFlow<()>,
    {
        if p == order.len() {
            if current == target {
                let mut m = Matching::new();
                for (e, &k) in self.edges.iter().zip(mult.iter()) {
                    m.set(e.id, k);
                }
                return visit(&m);
            }
            return ControlFlow::Continue(());
        }
        if current + self.bound(order, p, s) < target {
            return ControlFlow::Continue(());
        }
        let q = order[p];
        let e = &self.edges[q];
        let top = e.max_mult.min(s.residual[e.u]).min(s.residual[e.v]);
        for m in 0..=top {
            s.residual[e.u] -= m;
            s.residual[e.v] -= m;
            mult[q] = m;
            let flow = self.search_all(
                order,
                p + 1,
                s,
                current + e.weight * i128::from(m),
                target,
                mult,
                visit,
            );
            s.residual[e.u] += m;
            s.residual[e.v] += m;
            mult[q] = 0;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

use std::collections::{BTreeSet, HashMap};

use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{GadgetError, GadgetGraph, OreKind, Role, SubgraphWitness};
use crate::bmatching::{GameGraph, Side};
use crate::rational::Rational;

/// Largest subset count [`x3c_bruteforce`] accepts.
pub const X3C_BRUTEFORCE_CAP: usize = 20;

/// An exact-cover instance: a ground set of `3k` named elements and a
/// sequence of 3-element subsets given by element index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3CInstance {
    k: usize,
    elements: Vec<String>,
    subsets: Vec<[usize; 3]>,
}

impl X3CInstance {
    pub fn new(
        k: usize,
        elements: Vec<String>,
        subsets: Vec<[usize; 3]>,
    ) -> Result<Self, GadgetError> {
        let invalid = |msg: String| Err(GadgetError::InvalidInstance(msg));
        if k == 0 {
            return invalid("k must be positive".into());
        }
        if elements.len() != 3 * k {
            return invalid(format!(
                "{} elements for k = {k}, expected {}",
                elements.len(),
                3 * k
            ));
        }
        if elements.iter().collect::<BTreeSet<_>>().len() != elements.len() {
            return invalid("duplicate element names".into());
        }
        for (j, s) in subsets.iter().enumerate() {
            if s.iter().any(|&a| a >= elements.len()) {
                return invalid(format!("subset {} names an unknown element", j + 1));
            }
            if s[0] == s[1] || s[1] == s[2] || s[0] == s[2] {
                return invalid(format!("subset {} repeats an element", j + 1));
            }
        }
        Ok(X3CInstance {
            k,
            elements,
            subsets,
        })
    }

    /// Elements named `a1 .. a{3k}`.
    pub fn with_default_names(k: usize, subsets: Vec<[usize; 3]>) -> Result<Self, GadgetError> {
        Self::new(k, (1..=3 * k).map(|i| format!("a{i}")).collect(), subsets)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn subsets(&self) -> &[[usize; 3]] {
        &self.subsets
    }

    /// Indices of the subsets containing element `i`, in subset order.
    pub fn occurrences(&self, i: usize) -> Vec<usize> {
        (0..self.subsets.len())
            .filter(|&j| self.subsets[j].contains(&i))
            .collect()
    }

    /// Every element lies in exactly three subsets.
    pub fn check_restricted(&self) -> Result<(), GadgetError> {
        for (i, name) in self.elements.iter().enumerate() {
            let count = self.occurrences(i).len();
            if count != 3 {
                return Err(GadgetError::Unrestricted {
                    element: name.clone(),
                    count,
                });
            }
        }
        Ok(())
    }

    pub fn check_cover(&self, cover: &[usize]) -> Result<(), GadgetError> {
        let mut hits = vec![0usize; self.elements.len()];
        for &j in cover {
            let s = self
                .subsets
                .get(j)
                .ok_or_else(|| GadgetError::InvalidCover(format!("no subset #{}", j + 1)))?;
            for &a in s {
                hits[a] += 1;
            }
        }
        for (i, &h) in hits.iter().enumerate() {
            if h != 1 {
                return Err(GadgetError::InvalidCover(format!(
                    "element {} is covered {h} times",
                    self.elements[i]
                )));
            }
        }
        Ok(())
    }
}

/// Exact search over subcollections: branch on the lowest uncovered
/// element. Returns subset indices in increasing order.
pub fn x3c_bruteforce(inst: &X3CInstance) -> Result<Option<Vec<usize>>, GadgetError> {
    if inst.subsets.len() > X3C_BRUTEFORCE_CAP {
        return Err(GadgetError::SearchCapExceeded {
            subsets: inst.subsets.len(),
            cap: X3C_BRUTEFORCE_CAP,
        });
    }
    let masks: Vec<u64> = inst
        .subsets
        .iter()
        .map(|s| s.iter().fold(0, |m, &a| m | 1 << a))
        .collect();
    let full = if inst.elements.len() == 64 {
        u64::MAX
    } else {
        (1u64 << inst.elements.len()) - 1
    };
    fn rec(masks: &[u64], covered: u64, full: u64, chosen: &mut Vec<usize>) -> bool {
        if covered == full {
            return true;
        }
        let lowest = (!covered).trailing_zeros();
        for (j, &m) in masks.iter().enumerate() {
            if m & (1 << lowest) != 0 && m & covered == 0 {
                chosen.push(j);
                if rec(masks, covered | m, full, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    if rec(&masks, 0, full, &mut chosen) {
        chosen.sort_unstable();
        Ok(Some(chosen))
    } else {
        Ok(None)
    }
}

/// A restricted instance whose subsets are three random partitions of the
/// ground set into triples, shuffled. Returns the instance and the indices
/// of the first partition, which is an exact cover.
pub fn planted_instance<R: Rng>(k: usize, rng: &mut R) -> (X3CInstance, Vec<usize>) {
    let mut tagged: Vec<([usize; 3], bool)> = Vec::with_capacity(3 * k);
    for round in 0..3 {
        let mut perm: Vec<usize> = (0..3 * k).collect();
        perm.shuffle(rng);
        for t in perm.chunks(3) {
            let mut s = [t[0], t[1], t[2]];
            s.sort_unstable();
            tagged.push((s, round == 0));
        }
    }
    tagged.shuffle(rng);
    let cover = (0..tagged.len()).filter(|&j| tagged[j].1).collect();
    let inst = X3CInstance::with_default_names(k, tagged.into_iter().map(|(s, _)| s).collect())
        .expect("partitions of a 3k-element ground set");
    (inst, cover)
}

/// The exact-cover graph together with its construction stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3CGraph {
    pub instance: X3CInstance,
    /// Elements and subsets with membership edges.
    pub g0: GadgetGraph,
    /// `g0` plus the `7k` block vertices `b1 .. b{7k}`.
    pub g1: GadgetGraph,
    /// One copy with every element replaced by its ore.
    pub g2: GadgetGraph,
    /// Two copies of `g2` joined by the `cu`–`cu'` and `cw`–`cw'` edges.
    pub graph: GadgetGraph,
}

struct Builder {
    graph: GameGraph,
    roles: Vec<Role>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            graph: GameGraph::new(),
            roles: Vec::new(),
        }
    }

    fn vertex(&mut self, name: String, role: Role) -> Result<usize, GadgetError> {
        let id = self.graph.add_vertex(name, Side::Unlabeled, 3)?;
        self.roles.push(role);
        Ok(id)
    }

    fn edge(&mut self, u: usize, v: usize) -> Result<(), GadgetError> {
        self.graph.add_edge(u, v, Rational::one(), false)?;
        Ok(())
    }

    fn finish(self) -> GadgetGraph {
        GadgetGraph {
            graph: self.graph,
            roles: self.roles,
        }
    }
}

fn primed(base: &str, copy: bool) -> String {
    if copy {
        format!("{base}'")
    } else {
        base.to_string()
    }
}

fn ore_name(kind: OreKind, i: usize, j: usize, copy: bool) -> String {
    format!("{}{}[{i},{j}]", kind.prefix(), if copy { "'" } else { "" })
}

/// Ore vertex indices of one copy, keyed by kind, element and slot.
struct CopyIndex {
    ore: HashMap<(OreKind, usize, usize), usize>,
}

fn add_sets(bld: &mut Builder, inst: &X3CInstance, copy: bool) -> Result<Vec<usize>, GadgetError> {
    (1..=inst.subsets.len())
        .map(|j| bld.vertex(primed(&format!("S{j}"), copy), Role::Set { index: j, copy }))
        .collect()
}

fn add_blocks(bld: &mut Builder, k: usize, copy: bool) -> Result<Vec<usize>, GadgetError> {
    let mut b = Vec::with_capacity(7 * k);
    for n in 1..=7 * k {
        let tier = if n <= 3 * k {
            1
        } else if n <= 6 * k {
            2
        } else {
            3
        };
        b.push(bld.vertex(
            primed(&format!("b{n}"), copy),
            Role::Block {
                tier,
                index: n,
                copy,
            },
        )?);
    }
    let bb = |n: usize| b[n - 1];
    for i in 1..=3 * k {
        bld.edge(bb(i), bb(3 * k + i))?;
        let prev = if i > 1 { 3 * k + i - 1 } else { 6 * k };
        bld.edge(bb(i), bb(prev))?;
    }
    for j in 1..=k {
        for off in [2, 1, 0] {
            bld.edge(bb(6 * k + j), bb(3 * k + 3 * j - off))?;
        }
    }
    Ok(b)
}

fn add_copy(bld: &mut Builder, inst: &X3CInstance, copy: bool) -> Result<CopyIndex, GadgetError> {
    let k = inst.k;
    let b = add_blocks(bld, k, copy)?;
    let sets = add_sets(bld, inst, copy)?;
    let mut ore = HashMap::new();
    for i in 1..=3 * k {
        let occurrences = inst.occurrences(i - 1);
        let mut prev_w = b[i - 1];
        for (j, &set) in (1..=3).zip(&occurrences) {
            for kind in OreKind::ALL {
                let role = Role::Ore {
                    kind,
                    element: i,
                    slot: j,
                    copy,
                };
                ore.insert((kind, i, j), bld.vertex(ore_name(kind, i, j, copy), role)?);
            }
            let at = |kind| ore[&(kind, i, j)];
            bld.edge(prev_w, at(OreKind::U))?;
            bld.edge(at(OreKind::U), at(OreKind::W))?;
            bld.edge(at(OreKind::W), sets[set])?;
            bld.edge(at(OreKind::U), at(OreKind::CU))?;
            bld.edge(at(OreKind::W), at(OreKind::CW))?;
            bld.edge(at(OreKind::CU), at(OreKind::CW))?;
            prev_w = at(OreKind::W);
        }
    }
    Ok(CopyIndex { ore })
}

/// Builds every stage of the reduction for a restricted instance. The
/// final graph has `92k` vertices and `144k` edges.
pub fn build_x3c_graph(inst: &X3CInstance) -> Result<X3CGraph, GadgetError> {
    inst.check_restricted()?;
    let k = inst.k;

    let mut g0 = Builder::new();
    let elements: Vec<usize> = (0..3 * k)
        .map(|i| g0.vertex(inst.elements[i].clone(), Role::Element { index: i + 1 }))
        .collect::<Result<_, _>>()?;
    let sets = add_sets(&mut g0, inst, false)?;
    for (i, &a) in elements.iter().enumerate() {
        for j in inst.occurrences(i) {
            g0.edge(a, sets[j])?;
        }
    }
    let g0 = g0.finish();

    let mut g1 = Builder {
        graph: g0.graph.clone(),
        roles: g0.roles.clone(),
    };
    let b = add_blocks(&mut g1, k, false)?;
    for (i, &a) in elements.iter().enumerate() {
        g1.edge(a, b[i])?;
    }
    let g1 = g1.finish();

    let mut g2 = Builder::new();
    add_copy(&mut g2, inst, false)?;
    let g2 = g2.finish();

    let mut full = Builder::new();
    let left = add_copy(&mut full, inst, false)?;
    let right = add_copy(&mut full, inst, true)?;
    for i in 1..=3 * k {
        for j in 1..=3 {
            for kind in [OreKind::CW, OreKind::CU] {
                full.edge(left.ore[&(kind, i, j)], right.ore[&(kind, i, j)])?;
            }
        }
    }
    Ok(X3CGraph {
        instance: inst.clone(),
        g0,
        g1,
        g2,
        graph: full.finish(),
    })
}

/// The cubic subgraph induced by the blocks, the chosen subsets and, for
/// every element, the ore cells up to the one wired to its covering
/// subset, in both copies. Every degree is checked to be 3.
pub fn cover_to_cubic(xg: &X3CGraph, cover: &[usize]) -> Result<SubgraphWitness, GadgetError> {
    let inst = &xg.instance;
    inst.check_cover(cover)?;
    let mut depth = vec![0usize; inst.elements.len() + 1];
    for i in 0..inst.elements.len() {
        let occurrences = inst.occurrences(i);
        let hit = occurrences
            .iter()
            .position(|j| cover.contains(j))
            .expect("an exact cover hits every element");
        depth[i + 1] = hit + 1;
    }
    let g = &xg.graph;
    let inside: Vec<bool> = g
        .roles
        .iter()
        .map(|&r| match r {
            Role::Block { .. } => true,
            Role::Set { index, .. } => cover.contains(&(index - 1)),
            Role::Ore { element, slot, .. } => slot <= depth[element],
            _ => false,
        })
        .collect();
    let witness = SubgraphWitness::from_edges(&g.graph, g.graph.induced_edges(&inside));
    for (v, _) in inside.iter().enumerate().filter(|(_, &b)| b) {
        let degree = witness.degrees.get(&v).copied().unwrap_or(0);
        if degree != 3 {
            return Err(GadgetError::DegreeCheck {
                vertex: g.graph.name(v).to_string(),
                degree,
            });
        }
    }
    Ok(witness)
}

use std::collections::BTreeMap;
use std::fmt;

use super::{gadget_owner_set, GadgetGraph, Role};
use crate::bmatching::GameGraph;

fn connected_without(adj: &[Vec<usize>], inside: &[bool], removed: Option<usize>) -> bool {
    let start = (0..adj.len()).find(|&v| inside[v] && Some(v) != removed);
    let Some(start) = start else {
        return true;
    };
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if inside[w] && Some(w) != removed && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..adj.len()).all(|v| !inside[v] || Some(v) == removed || seen[v])
}

/// Whether the induced subgraph on `vertices` has at least three vertices,
/// is connected, and stays connected after deleting any one vertex.
pub fn is_two_connected(graph: &GameGraph, vertices: &[usize]) -> bool {
    let mut inside = vec![false; graph.vertex_count()];
    for &v in vertices {
        inside[v] = true;
    }
    if inside.iter().filter(|&&b| b).count() < 3 {
        return false;
    }
    let adj = graph.adjacency();
    connected_without(&adj, &inside, None)
        && vertices
            .iter()
            .all(|&v| connected_without(&adj, &inside, Some(v)))
}

/// Bipartiteness, degree and role statistics, and named pass/fail checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralReport {
    pub vertices: usize,
    pub edges: usize,
    pub bipartite: bool,
    pub max_degree: usize,
    pub role_counts: BTreeMap<String, usize>,
    pub checks: Vec<(String, bool)>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.bipartite && self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .checks
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n.as_str())
            .collect();
        if !self.bipartite {
            out.insert(0, "bipartite");
        }
        out
    }
}

impl fmt::Display for StructuralReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.vertices)?;
        writeln!(f, "edges {}", self.edges)?;
        writeln!(f, "bipartite {}", self.bipartite)?;
        writeln!(f, "max-degree {}", self.max_degree)?;
        for (role, count) in &self.role_counts {
            writeln!(f, "role {role} {count}")?;
        }
        for (name, ok) in &self.checks {
            writeln!(f, "{} {}", if *ok { "ok" } else { "FAIL" }, name)?;
        }
        Ok(())
    }
}

pub fn structural_check(g: &GadgetGraph) -> StructuralReport {
    let graph = &g.graph;
    let mut role_counts = BTreeMap::new();
    for r in &g.roles {
        *role_counts.entry(r.to_string()).or_insert(0) += 1;
    }
    let mut checks = Vec::new();

    if g.is_nucleolus_gadget() {
        let originals = g.originals();
        let complete = originals.iter().all(|&u| {
            let members = gadget_owner_set(g, u);
            let mut inside = vec![false; graph.vertex_count()];
            members.iter().for_each(|&m| inside[m] = true);
            members.len() == 6 && graph.induced_edges(&inside).len() == 9
        });
        checks.push((
            format!("complete gadgets induce K3,3 ({})", originals.len()),
            complete,
        ));
    }

    for copy in [false, true] {
        let block = g.vertices_with(|r| matches!(r, Role::Block { copy: c, .. } if c == copy));
        if !block.is_empty() {
            let label = if copy {
                "G[B'] 2-connected"
            } else {
                "G[B] 2-connected"
            };
            checks.push((label.to_string(), is_two_connected(graph, &block)));
        }
    }
    let mut ores: BTreeMap<(usize, usize, bool), Vec<usize>> = BTreeMap::new();
    for (v, r) in g.roles.iter().enumerate() {
        if let Role::Ore {
            element,
            slot,
            copy,
            ..
        } = *r
        {
            ores.entry((element, slot, copy)).or_default().push(v);
        }
    }
    if !ores.is_empty() {
        let good = ores
            .values()
            .filter(|o| o.len() == 4 && is_two_connected(graph, o))
            .count();
        checks.push((
            format!("G[O_ij] 2-connected ({good}/{})", ores.len()),
            good == ores.len(),
        ));
    }

    StructuralReport {
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        bipartite: graph.is_bipartite(),
        max_degree: graph.max_degree(),
        role_counts,
        checks,
    }
}

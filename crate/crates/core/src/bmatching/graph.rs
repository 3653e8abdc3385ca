use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("loop at vertex `{0}`")]
    Loop(String),
    #[error("edge {0}-{1} joins two vertices on the same side")]
    SameSide(String, String),
    #[error("capacity of `{0}` must be a positive integer")]
    ZeroCapacity(String),
}

/// Bipartition label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
    Unlabeled,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
            Side::Unlabeled => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub side: Side,
    pub b: u32,
}

/// `multi` allows the edge to be used more than once in a matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Rational,
    pub multi: bool,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// An undirected weighted graph with vertex capacities `b`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GameGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
}

impl GameGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(
        &mut self,
        name: impl Into<String>,
        side: Side,
        b: u32,
    ) -> Result<usize, GraphError> {
        let name = name.into();
        if b == 0 {
            return Err(GraphError::ZeroCapacity(name));
        }
        if self.index.contains_key(&name) {
            return Err(GraphError::DuplicateVertex(name));
        }
        self.index.insert(name.clone(), self.vertices.len());
        self.vertices.push(Vertex { name, side, b });
        Ok(self.vertices.len() - 1)
    }

    pub fn add_edge(
        &mut self,
        u: usize,
        v: usize,
        weight: Rational,
        multi: bool,
    ) -> Result<usize, GraphError> {
        if u >= self.vertices.len() {
            return Err(GraphError::UnknownVertex(format!("#{u}")));
        }
        if v >= self.vertices.len() {
            return Err(GraphError::UnknownVertex(format!("#{v}")));
        }
        if u == v {
            return Err(GraphError::Loop(self.vertices[u].name.clone()));
        }
        let (su, sv) = (self.vertices[u].side, self.vertices[v].side);
        if su == sv && su != Side::Unlabeled {
            return Err(GraphError::SameSide(
                self.vertices[u].name.clone(),
                self.vertices[v].name.clone(),
            ));
        }
        self.edges.push(Edge {
            u,
            v,
            weight,
            multi,
        });
        Ok(self.edges.len() - 1)
    }

    pub fn add_edge_by_name(
        &mut self,
        u: &str,
        v: &str,
        weight: Rational,
        multi: bool,
    ) -> Result<usize, GraphError> {
        let u = self.index_of(u)?;
        let v = self.index_of(v)?;
        self.add_edge(u, v, weight, multi)
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn name(&self, v: usize) -> &str {
        &self.vertices[v].name
    }

    pub fn names(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.name.clone()).collect()
    }

    pub fn b(&self, v: usize) -> u32 {
        self.vertices[v].b
    }

    pub fn side(&self, v: usize) -> Side {
        self.vertices[v].side
    }

    pub fn set_b(&mut self, v: usize, b: u32) -> Result<(), GraphError> {
        if b == 0 {
            return Err(GraphError::ZeroCapacity(self.vertices[v].name.clone()));
        }
        self.vertices[v].b = b;
        Ok(())
    }

    pub fn set_uniform_b(&mut self, b: u32) -> Result<(), GraphError> {
        for v in 0..self.vertex_count() {
            self.set_b(v, b)?;
        }
        Ok(())
    }

    /// Marks every edge as repeatable (`true`) or single-use (`false`).
    pub fn set_all_multi(&mut self, multi: bool) {
        for e in &mut self.edges {
            e.multi = multi;
        }
    }

    /// No edge may be used twice.
    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|e| !e.multi)
    }

    /// Every edge may be repeated.
    pub fn is_non_simple(&self) -> bool {
        self.edges.iter().all(|e| e.multi)
    }

    pub fn incident_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.u == v || e.v == v)
            .map(|(i, _)| i)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    /// A proper 2-colouring (`true` for side B) when the graph is
    /// bipartite. Labelled vertices keep their side; components without
    /// labels start from side A at their smallest vertex.
    pub fn two_coloring(&self) -> Option<Vec<bool>> {
        let adj = self.adjacency();
        let n = self.vertex_count();
        let mut color: Vec<Option<bool>> = vec![None; n];
        let mut order: Vec<usize> = (0..n)
            .filter(|&v| self.side(v) != Side::Unlabeled)
            .collect();
        order.extend((0..n).filter(|&v| self.side(v) == Side::Unlabeled));
        for start in order {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(self.side(start) == Side::B);
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                let cx = color[x].expect("queued vertices are coloured");
                for &y in &adj[x] {
                    let want = !cx;
                    match color[y] {
                        Some(cy) if cy != want => return None,
                        Some(_) => {}
                        None => {
                            if self.side(y) != Side::Unlabeled && (self.side(y) == Side::B) != want
                            {
                                return None;
                            }
                            color[y] = Some(want);
                            queue.push_back(y);
                        }
                    }
                }
            }
        }
        Some(
            color
                .into_iter()
                .map(|c| c.expect("all coloured"))
                .collect(),
        )
    }

    pub fn is_bipartite(&self) -> bool {
        self.two_coloring().is_some()
    }

    /// Every vertex carries an A/B label.
    pub fn is_side_labeled(&self) -> bool {
        self.vertices.iter().all(|v| v.side != Side::Unlabeled)
    }

    /// Indices of edges with both ends inside `members`.
    pub fn induced_edges(&self, members: &[bool]) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| members[e.u] && members[e.v])
            .map(|(i, _)| i)
            .collect()
    }
}

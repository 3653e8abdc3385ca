//! Hardness constructions and their desk-scale verifiers.
//!
//! * [`build_nucleolus_gadget`]: attaches a `K_{3,3}` to every vertex of a
//!   bipartite graph, giving the unweighted 3-matching game on `G*`.
//! * [`build_x3c_graph`]: the bipartite maximum-degree-4 graph built from a
//!   restricted exact-cover instance, with its intermediate stages.
//! * [`detect_cubic`] / [`detect_2fc`]: exhaustive subgraph search under an
//!   edge cap.

mod detect;
mod nucleolus_gadget;
mod structure;
mod x3c;

use std::fmt;

use thiserror::Error;

pub use detect::{delta, detect_2fc, detect_cubic, SubgraphWitness, DEFAULT_DETECT_CAP};
pub use nucleolus_gadget::{
    build_nucleolus_gadget, excess_table, gadget_owner_set, make_xdelta, make_xstar,
    published_table, ExcessRow, Table,
};
pub use structure::{is_two_connected, structural_check, StructuralReport};
pub use x3c::{
    build_x3c_graph, cover_to_cubic, planted_instance, x3c_bruteforce, X3CGraph, X3CInstance,
    X3C_BRUTEFORCE_CAP,
};

use crate::bmatching::{GameGraph, GraphError, MatchingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("input graph is not bipartite")]
    NotBipartite,
    #[error("input graph has no edges")]
    NoEdges,
    #[error("delta must satisfy 0 < delta < 1/2, got {0}")]
    DeltaOutOfRange(String),
    #[error("graph was not produced by the nucleolus gadget construction")]
    NotNucleolusGadget,
    #[error("excess is not constant on shape class {0}")]
    NonConstantClass(String),
    #[error("invalid X3C instance: {0}")]
    InvalidInstance(String),
    #[error("every element must lie in exactly three subsets; {element} lies in {count}")]
    Unrestricted { element: String, count: usize },
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("construction produced vertex {vertex} with degree {degree}, expected 3")]
    DegreeCheck { vertex: String, degree: usize },
    #[error("graph has {edges} edges, above the detection cap of {cap}")]
    DetectCapExceeded { edges: usize, cap: usize },
    #[error("instance has {subsets} subsets, above the search cap of {cap}")]
    SearchCapExceeded { subsets: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// The five vertices added next to each original vertex `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetSlot {
    V,
    W,
    X,
    Y,
    Z,
}

impl GadgetSlot {
    pub const ALL: [GadgetSlot; 5] = [
        GadgetSlot::V,
        GadgetSlot::W,
        GadgetSlot::X,
        GadgetSlot::Y,
        GadgetSlot::Z,
    ];

    pub fn letter(self) -> char {
        match self {
            GadgetSlot::V => 'v',
            GadgetSlot::W => 'w',
            GadgetSlot::X => 'x',
            GadgetSlot::Y => 'y',
            GadgetSlot::Z => 'z',
        }
    }

    /// `v` and `w` sit on the side of `u`; `x`, `y`, `z` on the other.
    pub fn same_side_as_owner(self) -> bool {
        matches!(self, GadgetSlot::V | GadgetSlot::W)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OreKind {
    U,
    W,
    CU,
    CW,
}

impl OreKind {
    pub const ALL: [OreKind; 4] = [OreKind::U, OreKind::W, OreKind::CU, OreKind::CW];

    pub fn prefix(self) -> &'static str {
        match self {
            OreKind::U => "u",
            OreKind::W => "w",
            OreKind::CU => "cu",
            OreKind::CW => "cw",
        }
    }
}

/// What a vertex of a generated graph stands for. A gadget's `owner` is
/// the vertex index of its original vertex. In the exact-cover graph
/// `copy` marks the primed half and indices are 1-based as in the vertex
/// names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Original,
    Gadget {
        owner: usize,
        slot: GadgetSlot,
    },
    Element {
        index: usize,
    },
    Set {
        index: usize,
        copy: bool,
    },
    Block {
        tier: u8,
        index: usize,
        copy: bool,
    },
    Ore {
        kind: OreKind,
        element: usize,
        slot: usize,
        copy: bool,
    },
}

impl Role {
    pub fn is_copy(self) -> bool {
        match self {
            Role::Set { copy, .. } | Role::Block { copy, .. } | Role::Ore { copy, .. } => copy,
            _ => false,
        }
    }
}

/// The role as written in the `roles` section of a graph file.
impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prime = if self.is_copy() { "'" } else { "" };
        match self {
            Role::Original => write!(f, "original"),
            Role::Gadget { slot, .. } => write!(f, "gadget-{}", slot.letter()),
            Role::Element { .. } => write!(f, "element"),
            Role::Set { .. } => write!(f, "set{prime}"),
            Role::Block { tier, .. } => write!(f, "b{tier}{prime}"),
            Role::Ore { kind, .. } => write!(f, "ore-{}{prime}", kind.prefix()),
        }
    }
}

/// A generated graph with a role for every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetGraph {
    pub graph: GameGraph,
    pub roles: Vec<Role>,
}

impl GadgetGraph {
    pub fn role(&self, v: usize) -> Role {
        self.roles[v]
    }

    pub fn vertices_with(&self, pred: impl Fn(Role) -> bool) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&v| pred(self.roles[v]))
            .collect()
    }

    pub fn is_nucleolus_gadget(&self) -> bool {
        !self.roles.is_empty()
            && self
                .roles
                .iter()
                .all(|r| matches!(r, Role::Original | Role::Gadget { .. }))
    }

    pub fn originals(&self) -> Vec<usize> {
        self.vertices_with(|r| r == Role::Original)
    }
}

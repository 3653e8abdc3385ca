use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{GadgetError, GadgetGraph, GadgetSlot, Role};
use crate::bmatching::{value, GameGraph, Side};
use crate::game::{Allocation, Coalition};
use crate::rational::{format_rational, int, ratio, Rational};

fn opposite(side: Side) -> Side {
    match side {
        Side::A => Side::B,
        Side::B => Side::A,
        Side::Unlabeled => Side::Unlabeled,
    }
}

/// `G*`: every vertex `u` gets five new vertices `v@u .. z@u` and the
/// edges of `K_{3,3}` between `{u, v@u, w@u}` and `{x@u, y@u, z@u}`.
/// Capacities become 3 and weights 1. Original vertices and edges come
/// first, so `|E*| = |E| + 9|N|` and vertex `i` of `G` is vertex `i` of
/// `G*`. A `Gadget` role's `owner` is the index of `u`.
pub fn build_nucleolus_gadget(g: &GameGraph) -> Result<GadgetGraph, GadgetError> {
    if g.edge_count() == 0 {
        return Err(GadgetError::NoEdges);
    }
    let coloring = g.two_coloring().ok_or(GadgetError::NotBipartite)?;
    let n = g.vertex_count();
    let mut out = GameGraph::new();
    let mut roles = Vec::with_capacity(6 * n);
    for (i, v) in g.vertices().iter().enumerate() {
        let side = match v.side {
            Side::Unlabeled if coloring[i] => Side::B,
            Side::Unlabeled => Side::A,
            side => side,
        };
        out.add_vertex(v.name.clone(), side, 3)?;
        roles.push(Role::Original);
    }
    for e in g.edges() {
        out.add_edge(e.u, e.v, Rational::one(), false)?;
    }
    for u in 0..n {
        let owner_side = out.side(u);
        let mut left = vec![u];
        let mut right = Vec::new();
        for slot in GadgetSlot::ALL {
            let side = if slot.same_side_as_owner() {
                owner_side
            } else {
                opposite(owner_side)
            };
            let id = out.add_vertex(format!("{}@{}", slot.letter(), g.name(u)), side, 3)?;
            roles.push(Role::Gadget { owner: u, slot });
            if slot.same_side_as_owner() {
                left.push(id);
            } else {
                right.push(id);
            }
        }
        for &a in &left {
            for &c in &right {
                out.add_edge(a, c, Rational::one(), false)?;
            }
        }
    }
    Ok(GadgetGraph { graph: out, roles })
}

/// The complete gadget of original vertex `u`: `u, v@u, w@u, x@u, y@u, z@u`.
pub fn gadget_owner_set(g: &GadgetGraph, u: usize) -> Vec<usize> {
    let mut members = vec![u];
    for slot in GadgetSlot::ALL {
        members.extend(g.vertices_with(|r| r == Role::Gadget { owner: u, slot }));
    }
    members
}

/// The uniform allocation `3/2` on every vertex.
pub fn make_xstar(g: &GadgetGraph) -> Result<Allocation, GadgetError> {
    if !g.is_nucleolus_gadget() {
        return Err(GadgetError::NotNucleolusGadget);
    }
    Ok(Allocation::uniform(g.roles.len(), ratio(3, 2)))
}

fn check_delta(delta: &Rational) -> Result<(), GadgetError> {
    if *delta <= Rational::zero() || *delta >= ratio(1, 2) {
        return Err(GadgetError::DeltaOutOfRange(format_rational(delta)));
    }
    Ok(())
}

fn delta_entry(role: Role, delta: &Rational) -> Rational {
    match role {
        Role::Original => ratio(3, 2) + delta,
        _ => ratio(3, 2) - delta / int(5),
    }
}

/// `3/2 + delta` on original vertices and `3/2 - delta/5` on gadget
/// vertices; the total stays `9|N|`.
pub fn make_xdelta(g: &GadgetGraph, delta: &Rational) -> Result<Allocation, GadgetError> {
    check_delta(delta)?;
    if !g.is_nucleolus_gadget() {
        return Err(GadgetError::NotNucleolusGadget);
    }
    Ok(Allocation::new(
        g.roles.iter().map(|&r| delta_entry(r, delta)).collect(),
    ))
}

/// Which excess table to reproduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Table {
    /// Shapes `(|S ∩ {u,v,w}|, |S ∩ {x,y,z}|)` under the uniform allocation.
    One,
    /// Shapes `(|S ∩ {u}|, |S ∩ {v,w}|, |S ∩ {x,y,z}|)` under the tilted
    /// allocation.
    Two { delta: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcessRow {
    pub shape: Vec<usize>,
    pub value: Rational,
    pub excess: Rational,
    /// Number of coalitions in the class.
    pub class_size: usize,
    /// For reference rows whose printed excess is arithmetically wrong: the
    /// printed value. `excess` then holds the corrected value.
    pub printed_excess: Option<Rational>,
}

impl ExcessRow {
    pub fn shape_label(&self) -> String {
        let parts: Vec<String> = self.shape.iter().map(|s| s.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for ExcessRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} v={} excess={} count={}",
            self.shape_label(),
            format_rational(&self.value),
            format_rational(&self.excess),
            self.class_size
        )
    }
}

fn shape_of(table: &Table, local: u8) -> Vec<usize> {
    // Local vertex order: u, v, w, x, y, z.
    let count = |mask: u8| (local & mask).count_ones() as usize;
    match table {
        Table::One => vec![count(0b000111), count(0b111000)],
        Table::Two { .. } => vec![count(0b000001), count(0b000110), count(0b111000)],
    }
}

/// Enumerates every nonempty `S ⊊ V_u` for the first original vertex `u`,
/// groups coalitions by shape and checks that `v(S)` and the excess are
/// constant on each class. Rows come out in lexicographic shape order.
pub fn excess_table(g: &GadgetGraph, table: &Table) -> Result<Vec<ExcessRow>, GadgetError> {
    if !g.is_nucleolus_gadget() {
        return Err(GadgetError::NotNucleolusGadget);
    }
    if let Table::Two { delta } = table {
        check_delta(delta)?;
    }
    let u = g.originals()[0];
    let members = gadget_owner_set(g, u);
    let mut local = GameGraph::new();
    for &m in &members {
        local.add_vertex(g.graph.name(m), g.graph.side(m), g.graph.b(m))?;
    }
    for e in g.graph.edges() {
        if let (Some(a), Some(b)) = (
            members.iter().position(|&m| m == e.u),
            members.iter().position(|&m| m == e.v),
        ) {
            local.add_edge(a, b, e.weight.clone(), e.multi)?;
        }
    }
    let entries: Vec<Rational> = members
        .iter()
        .map(|&m| match table {
            Table::One => ratio(3, 2),
            Table::Two { delta } => delta_entry(g.role(m), delta),
        })
        .collect();

    let mut classes: BTreeMap<Vec<usize>, ExcessRow> = BTreeMap::new();
    for bits in 1u8..63 {
        let c = Coalition::new(bits.into(), 6).expect("six players");
        let v = value(&local, c)?;
        let x: Rational = c.members().map(|i| &entries[i]).sum();
        let excess = x - &v;
        let shape = shape_of(table, bits);
        let row = classes.entry(shape.clone()).or_insert_with(|| ExcessRow {
            shape: shape.clone(),
            value: v.clone(),
            excess: excess.clone(),
            class_size: 0,
            printed_excess: None,
        });
        if row.value != v || row.excess != excess {
            return Err(GadgetError::NonConstantClass(row.shape_label()));
        }
        row.class_size += 1;
    }
    Ok(classes.into_values().collect())
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// (shape, value, excess as a fraction).
const TABLE_ONE: [([usize; 2], i64, (i64, i64)); 14] = [
    ([0, 1], 0, (3, 2)),
    ([0, 2], 0, (3, 1)),
    ([0, 3], 0, (9, 2)),
    ([1, 0], 0, (3, 2)),
    ([1, 1], 1, (2, 1)),
    ([1, 2], 2, (5, 2)),
    ([1, 3], 3, (3, 1)),
    ([2, 0], 0, (3, 1)),
    ([2, 1], 2, (5, 2)),
    ([2, 2], 4, (2, 1)),
    ([2, 3], 6, (3, 2)),
    ([3, 0], 0, (9, 2)),
    ([3, 1], 3, (3, 1)),
    ([3, 2], 6, (3, 2)),
];

/// A fraction `p/q` as `(p, q)`.
type Frac = (i64, i64);

/// (shape, value, constant term, delta coefficient) with the excess read
/// as `constant + coefficient * delta`.
const TABLE_TWO: [([usize; 3], i64, Frac, Frac); 22] = [
    ([0, 0, 1], 0, (3, 2), (-1, 5)),
    ([0, 0, 2], 0, (3, 1), (-2, 5)),
    ([0, 0, 3], 0, (9, 2), (-3, 5)),
    ([0, 1, 0], 0, (3, 2), (-1, 5)),
    ([0, 1, 1], 1, (2, 1), (-2, 5)),
    ([0, 1, 2], 2, (5, 2), (-3, 5)),
    ([0, 1, 3], 3, (3, 1), (-4, 5)),
    ([0, 2, 0], 0, (3, 1), (-2, 5)),
    ([0, 2, 1], 2, (5, 2), (-2, 5)),
    ([0, 2, 2], 4, (2, 1), (-4, 5)),
    ([0, 2, 3], 6, (3, 2), (-1, 1)),
    ([1, 0, 0], 0, (3, 2), (1, 1)),
    ([1, 0, 1], 1, (2, 1), (4, 5)),
    ([1, 0, 2], 2, (5, 2), (3, 5)),
    ([1, 0, 3], 3, (3, 1), (2, 5)),
    ([1, 1, 0], 0, (3, 1), (4, 5)),
    ([1, 1, 1], 2, (5, 2), (3, 5)),
    ([1, 1, 2], 4, (2, 1), (2, 5)),
    ([1, 1, 3], 6, (3, 2), (1, 5)),
    ([1, 2, 0], 0, (9, 2), (3, 5)),
    ([1, 2, 1], 3, (3, 1), (2, 5)),
    ([1, 2, 2], 6, (3, 2), (1, 5)),
];

/// The printed `(0,2,1)` entry has delta coefficient `-2/5`. The class is
/// `{v, w, x}` with value 2 and three gadget vertices at `3/2 - delta/5`,
/// so the excess is `5/2 - 3 delta/5`.
const TABLE_TWO_CORRECTIONS: [([usize; 3], (i64, i64)); 1] = [([0, 2, 1], (-3, 5))];

/// The published reference rows. Rows with a known misprint carry the
/// corrected excess in `excess` and the printed one in `printed_excess`.
pub fn published_table(table: &Table) -> Vec<ExcessRow> {
    match table {
        Table::One => TABLE_ONE
            .iter()
            .map(|&(shape, v, (p, q))| ExcessRow {
                shape: shape.to_vec(),
                value: int(v),
                excess: ratio(p, q),
                class_size: binomial(3, shape[0]) * binomial(3, shape[1]),
                printed_excess: None,
            })
            .collect(),
        Table::Two { delta } => TABLE_TWO
            .iter()
            .map(|&(shape, v, (a, b), (c, d))| {
                let printed = ratio(a, b) + ratio(c, d) * delta;
                let corrected = TABLE_TWO_CORRECTIONS
                    .iter()
                    .find(|(s, _)| *s == shape)
                    .map(|&(_, (c, d))| ratio(a, b) + ratio(c, d) * delta);
                ExcessRow {
                    shape: shape.to_vec(),
                    value: int(v),
                    excess: corrected.clone().unwrap_or_else(|| printed.clone()),
                    class_size: binomial(1, shape[0])
                        * binomial(2, shape[1])
                        * binomial(3, shape[2]),
                    printed_excess: corrected.map(|_| printed),
                }
            })
            .collect(),
    }
}

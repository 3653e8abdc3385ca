//! Text formats.
//!
//! Graph files have `players`, `b` and `edges` sections and an optional
//! `roles` section; `#` starts a comment:
//!
//! ```text
//! players
//! u A
//! v B
//! b
//! u 2
//! v 2
//! edges
//! u v 3/2 multi
//! ```
//!
//! Player lines are `name side` with side `A`, `B` or `-`. Edge lines are
//! `u v weight [multi|simple]`. Players without a `b` line get `b = 1`.
//! X3C files start with `k` and list one subset per line as three element
//! names. Allocation files have one `name value` line per player.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::bmatching::{GameGraph, GraphError, Side};
use crate::gadgets::{GadgetError, Role, X3CInstance};
use crate::game::Allocation;
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing `{0}` section")]
    MissingSection(&'static str),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Parse {
        line,
        message: message.into(),
    })
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn is_identifier(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_graphic() && c != '#' && c != ',')
}

/// A parsed graph file. Roles are kept as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDocument {
    pub graph: GameGraph,
    pub roles: BTreeMap<String, String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Players,
    B,
    Edges,
    Roles,
}

pub fn parse_graph(text: &str) -> Result<GraphDocument, IoError> {
    let mut section = None;
    let mut players: Vec<(usize, String, Side)> = Vec::new();
    let mut caps: Vec<(usize, String, u32)> = Vec::new();
    let mut edges: Vec<(usize, String, String, Rational, bool)> = Vec::new();
    let mut roles = BTreeMap::new();
    let mut seen_players = false;
    for (line, tokens) in content_lines(text) {
        if tokens.len() == 1 {
            let next = match tokens[0] {
                "players" => Some(Section::Players),
                "b" => Some(Section::B),
                "edges" => Some(Section::Edges),
                "roles" => Some(Section::Roles),
                _ => None,
            };
            if let Some(s) = next {
                seen_players |= s == Section::Players;
                section = Some(s);
                continue;
            }
        }
        match section {
            None => return parse_err(line, "content before the first section header"),
            Some(Section::Players) => {
                let [name, side] = tokens[..] else {
                    return parse_err(line, "expected `name side`");
                };
                if !is_identifier(name) {
                    return parse_err(line, format!("invalid player name `{name}`"));
                }
                let side = match side {
                    "A" => Side::A,
                    "B" => Side::B,
                    "-" => Side::Unlabeled,
                    other => return parse_err(line, format!("unknown side `{other}`")),
                };
                players.push((line, name.to_string(), side));
            }
            Some(Section::B) => {
                let [name, b] = tokens[..] else {
                    return parse_err(line, "expected `name b`");
                };
                let Ok(b) = b.parse::<u32>() else {
                    return parse_err(line, format!("invalid capacity `{b}`"));
                };
                caps.push((line, name.to_string(), b));
            }
            Some(Section::Edges) => {
                let (u, v, w, multi) = match tokens[..] {
                    [u, v, w] => (u, v, w, false),
                    [u, v, w, flag] => {
                        let multi = match flag {
                            "multi" | "true" | "1" | "yes" => true,
                            "simple" | "false" | "0" | "no" => false,
                            other => {
                                return parse_err(line, format!("unknown edge flag `{other}`"))
                            }
                        };
                        (u, v, w, multi)
                    }
                    _ => return parse_err(line, "expected `u v weight [multi|simple]`"),
                };
                let weight = match parse_rational(w) {
                    Ok(w) => w,
                    Err(e) => return parse_err(line, e.to_string()),
                };
                edges.push((line, u.to_string(), v.to_string(), weight, multi));
            }
            Some(Section::Roles) => {
                let [name, role] = tokens[..] else {
                    return parse_err(line, "expected `name role`");
                };
                roles.insert(name.to_string(), role.to_string());
            }
        }
    }
    if !seen_players {
        return Err(IoError::MissingSection("players"));
    }

    let mut graph = GameGraph::new();
    for (line, name, side) in players {
        if let Err(e) = graph.add_vertex(name, side, 1) {
            return parse_err(line, e.to_string());
        }
    }
    let mut assigned = HashMap::new();
    for (line, name, b) in caps {
        let v = match graph.index_of(&name) {
            Ok(v) => v,
            Err(e) => return parse_err(line, e.to_string()),
        };
        if assigned.insert(v, ()).is_some() {
            return parse_err(line, format!("capacity of `{name}` given twice"));
        }
        if let Err(e) = graph.set_b(v, b) {
            return parse_err(line, e.to_string());
        }
    }
    for (line, u, v, w, multi) in edges {
        if let Err(e) = graph.add_edge_by_name(&u, &v, w, multi) {
            return parse_err(line, e.to_string());
        }
    }
    for name in roles.keys() {
        if graph.index_of(name).is_err() {
            return Err(IoError::Parse {
                line: 0,
                message: GraphError::UnknownVertex(name.clone()).to_string(),
            });
        }
    }
    Ok(GraphDocument { graph, roles })
}

pub fn write_graph(graph: &GameGraph, roles: Option<&[Role]>) -> String {
    let mut out = String::from("players\n");
    for v in graph.vertices() {
        let _ = writeln!(out, "{} {}", v.name, v.side);
    }
    out.push_str("b\n");
    for v in graph.vertices() {
        let _ = writeln!(out, "{} {}", v.name, v.b);
    }
    out.push_str("edges\n");
    for e in graph.edges() {
        let _ = writeln!(
            out,
            "{} {} {}{}",
            graph.name(e.u),
            graph.name(e.v),
            format_rational(&e.weight),
            if e.multi { " multi" } else { "" }
        );
    }
    if let Some(roles) = roles {
        out.push_str("roles\n");
        for (v, r) in roles.iter().enumerate() {
            let _ = writeln!(out, "{} {}", graph.name(v), r);
        }
    }
    out
}

/// Numeric suffix ordering, so `a2` sorts before `a10`.
fn natural_key(name: &str) -> (String, u64, String) {
    let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let number = name[split..].parse().unwrap_or(0);
    (name[..split].to_string(), number, name.to_string())
}

/// Elements are the distinct names in natural order and must number `3k`.
pub fn parse_x3c(text: &str) -> Result<X3CInstance, IoError> {
    let mut lines = content_lines(text);
    let Some((line, header)) = lines.next() else {
        return Err(IoError::MissingSection("k"));
    };
    let k = match header[..] {
        [k] => match k.parse::<usize>() {
            Ok(k) => k,
            Err(_) => return parse_err(line, format!("invalid k `{k}`")),
        },
        _ => return parse_err(line, "expected `k` on the first line"),
    };
    let mut raw: Vec<[String; 3]> = Vec::new();
    for (line, tokens) in lines {
        let [a, b, c] = tokens[..] else {
            return parse_err(line, "expected three element names");
        };
        raw.push([a.to_string(), b.to_string(), c.to_string()]);
    }
    let mut names: Vec<String> = raw.iter().flatten().cloned().collect();
    names.sort_by_key(|n| natural_key(n));
    names.dedup();
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let subsets = raw
        .iter()
        .map(|s| {
            [
                index[s[0].as_str()],
                index[s[1].as_str()],
                index[s[2].as_str()],
            ]
        })
        .collect();
    Ok(X3CInstance::new(k, names, subsets)?)
}

pub fn write_x3c(inst: &X3CInstance) -> String {
    let mut out = format!("{}\n", inst.k());
    for s in inst.subsets() {
        let e = inst.elements();
        let _ = writeln!(out, "{} {} {}", e[s[0]], e[s[1]], e[s[2]]);
    }
    out
}

/// One `name value` line per player, in any order.
pub fn parse_allocation(text: &str, names: &[String]) -> Result<Allocation, IoError> {
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut values: Vec<Option<Rational>> = vec![None; names.len()];
    for (line, tokens) in content_lines(text) {
        let [name, value] = tokens[..] else {
            return parse_err(line, "expected `name value`");
        };
        let Some(&i) = index.get(name) else {
            return parse_err(line, format!("unknown player `{name}`"));
        };
        let value = match parse_rational(value) {
            Ok(v) => v,
            Err(e) => return parse_err(line, e.to_string()),
        };
        if values[i].replace(value).is_some() {
            return parse_err(line, format!("player `{name}` listed twice"));
        }
    }
    let mut out = Vec::with_capacity(names.len());
    for (i, v) in values.into_iter().enumerate() {
        match v {
            Some(v) => out.push(v),
            None => return parse_err(0, format!("no value for player `{}`", names[i])),
        }
    }
    Ok(Allocation::new(out))
}

pub fn write_allocation(names: &[String], x: &Allocation) -> String {
    let mut out = String::new();
    for (name, v) in names.iter().zip(x.values()) {
        let _ = writeln!(out, "{name} {}", format_rational(v));
    }
    out
}

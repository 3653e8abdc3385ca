use std::collections::BTreeSet;
use std::fmt;

use crate::game::{coalitions_up_to, proper_coalitions, Coalition};

use super::NucleolusError;

/// How a coalition family was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Every proper nonempty coalition.
    Full,
    /// All coalitions with at most this many members.
    SizeBounded(usize),
    /// Coalitions of size at most `2k + 3` for the simple game with at most
    /// `k` capacity-2 vertices on side B.
    CharsetI(usize),
    /// Singletons and pairs, for the non-simple game with `b = 2`.
    CharsetII,
    /// Supplied by the caller.
    Custom,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Full => write!(f, "full"),
            Provenance::SizeBounded(m) => write!(f, "size<={m}"),
            Provenance::CharsetI(k) => write!(f, "charset-i(k={k})"),
            Provenance::CharsetII => write!(f, "charset-ii"),
            Provenance::Custom => write!(f, "custom"),
        }
    }
}

/// A deduplicated family of proper nonempty coalitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoalitionFamily {
    players: usize,
    coalitions: Vec<Coalition>,
    provenance: Provenance,
}

impl CoalitionFamily {
    /// Keeps the first occurrence of each coalition, preserving order.
    pub fn new(
        players: usize,
        coalitions: impl IntoIterator<Item = Coalition>,
        provenance: Provenance,
    ) -> Result<Self, NucleolusError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in coalitions {
            if c.player_count() != players {
                return Err(NucleolusError::InvalidFamily(format!(
                    "coalition over {} players in a {players}-player family",
                    c.player_count()
                )));
            }
            if !c.is_proper() {
                return Err(NucleolusError::InvalidFamily(
                    "family members must be proper and nonempty".into(),
                ));
            }
            if seen.insert(c) {
                out.push(c);
            }
        }
        Ok(CoalitionFamily {
            players,
            coalitions: out,
            provenance,
        })
    }

    pub fn full(players: usize) -> Self {
        CoalitionFamily {
            players,
            coalitions: proper_coalitions(players),
            provenance: Provenance::Full,
        }
    }

    pub fn size_bounded(players: usize, max_size: usize) -> Self {
        CoalitionFamily {
            players,
            coalitions: coalitions_up_to(players, max_size),
            provenance: Provenance::SizeBounded(max_size),
        }
    }

    pub fn charset_i(players: usize, k: usize) -> Self {
        CoalitionFamily {
            provenance: Provenance::CharsetI(k),
            ..Self::size_bounded(players, 2 * k + 3)
        }
    }

    pub fn charset_ii(players: usize) -> Self {
        CoalitionFamily {
            provenance: Provenance::CharsetII,
            ..Self::size_bounded(players, 2)
        }
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }

    /// The same family in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self, NucleolusError> {
        let mut seen = vec![false; self.len()];
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(NucleolusError::InvalidFamily("not a permutation".into()));
            }
        }
        if order.len() != self.len() {
            return Err(NucleolusError::InvalidFamily("not a permutation".into()));
        }
        Ok(CoalitionFamily {
            coalitions: order.iter().map(|&i| self.coalitions[i]).collect(),
            ..self.clone()
        })
    }
}

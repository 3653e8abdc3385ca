//! Seeded generators for test instances and random imputations.

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bmatching::{GameGraph, Side, DEFAULT_EDGE_CAP};
use crate::game::{Allocation, Coalition, Game};
use crate::rational::{int, Rational};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A side-labelled bipartite graph with `2..=max_players` vertices, each
/// cross pair an edge with probability 1/2 (at least one edge, at most
/// [`DEFAULT_EDGE_CAP`]), and integer weights in `1..=4`.
fn random_bipartite<R: Rng>(rng: &mut R, max_players: usize, b: u32, multi: bool) -> GameGraph {
    loop {
        let n = rng.gen_range(2..=max_players.max(2));
        let left = rng.gen_range(1..n);
        let mut g = GameGraph::new();
        for i in 0..n {
            let (name, side) = if i < left {
                (format!("a{}", i + 1), Side::A)
            } else {
                (format!("b{}", i - left + 1), Side::B)
            };
            g.add_vertex(name, side, b).expect("fresh names");
        }
        for i in 0..left {
            for j in left..n {
                if rng.gen_bool(0.5) {
                    g.add_edge(i, j, int(rng.gen_range(1..=4)), multi)
                        .expect("cross edge");
                }
            }
        }
        if (1..=DEFAULT_EDGE_CAP).contains(&g.edge_count()) {
            return g;
        }
    }
}

/// Simple game with `b <= 2`: side-A capacities in `{1, 2}`, and at most
/// `max_heavy` side-B vertices with capacity 2.
pub fn charset_i_instance<R: Rng>(rng: &mut R, max_players: usize, max_heavy: usize) -> GameGraph {
    let mut g = random_bipartite(rng, max_players, 1, false);
    let mut side_b = Vec::new();
    for v in 0..g.vertex_count() {
        match g.side(v) {
            Side::A => g.set_b(v, rng.gen_range(1..=2)).expect("positive"),
            _ => side_b.push(v),
        }
    }
    side_b.shuffle(rng);
    let heavy = rng.gen_range(0..=max_heavy.min(side_b.len()));
    for &v in &side_b[..heavy] {
        g.set_b(v, 2).expect("positive");
    }
    g
}

/// Non-simple game with `b = 2` everywhere.
pub fn charset_ii_instance<R: Rng>(rng: &mut R, max_players: usize) -> GameGraph {
    random_bipartite(rng, max_players, 2, true)
}

/// An imputation: each player gets their singleton value plus a random
/// share of the surplus `v(N) - sum v({i})`. `None` when no imputation
/// exists.
pub fn random_imputation<R: Rng>(game: &Game, rng: &mut R) -> Option<Allocation> {
    let n = game.player_count();
    let floors: Vec<Rational> = (0..n)
        .map(|i| game.value(Coalition::singleton(i, n)))
        .collect();
    let surplus = game.grand_value() - floors.iter().sum::<Rational>();
    if surplus.is_negative() {
        return None;
    }
    let mut weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=20)).collect();
    if weights.iter().all(|w| *w == 0) {
        weights[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = weights.iter().sum();
    let values = floors
        .into_iter()
        .zip(&weights)
        .map(|(f, &w)| {
            let share = if surplus.is_zero() {
                Rational::zero()
            } else {
                &surplus * Rational::new(w.into(), total.into())
            };
            f + share
        })
        .collect();
    Some(Allocation::new(values))
}

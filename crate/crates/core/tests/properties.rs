use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use bnucleolus::bmatching::{matching_game, value, GameGraph, Side};
use bnucleolus::gadgets::build_nucleolus_gadget;
use bnucleolus::game::{excess_vector, lex_compare, proper_coalitions, Coalition, Game};
use bnucleolus::nucleolus::{bruteforce_trace, kopelowitz, CoalitionFamily};
use bnucleolus::random::{charset_i_instance, charset_ii_instance, random_imputation, seeded};
use bnucleolus::rational::{int, Rational};

const SEED: u64 = 77;

fn desk_instances() -> Vec<GameGraph> {
    let mut rng = seeded(SEED);
    let mut out = Vec::new();
    for _ in 0..6 {
        out.push(charset_i_instance(&mut rng, 8, 2));
        out.push(charset_ii_instance(&mut rng, 8));
    }
    let mut k2 = GameGraph::new();
    k2.add_vertex("u", Side::A, 1).unwrap();
    k2.add_vertex("v", Side::B, 1).unwrap();
    k2.add_edge(0, 1, int(1), false).unwrap();
    out.push(build_nucleolus_gadget(&k2).unwrap().graph);
    out
}

#[test]
fn scheme_rounds_are_monotone_and_productive() {
    for g in desk_instances() {
        let game = matching_game(&g).unwrap();
        let trace = bruteforce_trace(&game).unwrap();
        let eps: Vec<&Rational> = trace.epsilons().collect();
        assert!(eps.windows(2).all(|w| w[0] <= w[1]));
        assert!(trace.rounds.iter().all(|r| !r.fixed.is_empty()));
        for r in &trace.rounds {
            for &c in &r.fixed {
                assert_eq!(trace.final_point.sum_over(c) - game.value(c), r.epsilon);
            }
        }
    }
}

#[test]
fn nucleolus_does_not_depend_on_family_order() {
    let mut rng = seeded(SEED + 1);
    for g in desk_instances() {
        let game = matching_game(&g).unwrap();
        let family = CoalitionFamily::full(game.player_count());
        let reference = kopelowitz(&game, &family).unwrap();
        for _ in 0..2 {
            let mut order: Vec<usize> = (0..family.len()).collect();
            order.shuffle(&mut rng);
            let shuffled = kopelowitz(&game, &family.permuted(&order).unwrap()).unwrap();
            assert_eq!(shuffled.final_point, reference.final_point);
            let fixed_sets = |t: &bnucleolus::nucleolus::SchemeTrace| {
                t.rounds
                    .iter()
                    .map(|r| {
                        let mut f = r.fixed.clone();
                        f.sort();
                        (r.epsilon.clone(), f)
                    })
                    .collect::<Vec<_>>()
            };
            assert_eq!(fixed_sets(&shuffled), fixed_sets(&reference));
        }
    }
}

fn assert_lex_dominates(game: &Game, seed: u64) {
    let z = bruteforce_trace(game).unwrap().final_point;
    let family = proper_coalitions(game.player_count());
    let theta_z = excess_vector(game, &z, &family).unwrap();
    let mut rng = seeded(seed);
    for _ in 0..100 {
        let x = random_imputation(game, &mut rng).unwrap();
        let theta_x = excess_vector(game, &x, &family).unwrap();
        assert_ne!(lex_compare(&theta_z, &theta_x).unwrap(), Ordering::Less);
    }
}

#[test]
fn nucleolus_lexicographically_dominates_random_imputations() {
    for (i, g) in desk_instances().into_iter().enumerate() {
        assert_lex_dominates(&matching_game(&g).unwrap(), SEED + i as u64);
    }
}

#[test]
fn values_are_monotone_and_capacity_bounded() {
    let mut rng = seeded(SEED + 2);
    for g in desk_instances() {
        let n = g.vertex_count();
        let unweighted = g.edges().iter().all(|e| e.weight == int(1));
        for _ in 0..100 {
            let big = Coalition::new(rng.gen_range(1..1u64 << n), n).unwrap();
            let small = Coalition::new(big.bits() & rng.gen::<u64>(), n).unwrap();
            assert!(value(&g, small).unwrap() <= value(&g, big).unwrap());
            if unweighted {
                let cap: u32 = big.members().map(|v| g.b(v)).sum();
                assert!(value(&g, big).unwrap() * int(2) <= int(cap.into()));
            }
        }
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, each with a wall-clock
//! budget. Exact rational comparisons throughout; the only tolerance is the
//! time budget.

use std::cmp::Ordering;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use bnucleolus::bmatching::{
    matching_game, nonsimple2_value_fast, parallel_edges_value, value, GameGraph, Side,
};
use bnucleolus::gadgets::{
    build_nucleolus_gadget, build_x3c_graph, cover_to_cubic, delta, gadget_owner_set, make_xstar,
    planted_instance, structural_check, X3CInstance, DEFAULT_DETECT_CAP,
};
use bnucleolus::game::{
    core_check, excess_vector, lex_compare, proper_coalitions, Coalition, Game,
};
use bnucleolus::nucleolus::{
    bruteforce_trace, charset_i_min_k, dual_core_allocation, kopelowitz, nucleolus_bruteforce,
    nucleolus_charset_i, nucleolus_charset_ii, CoalitionFamily, SchemeTrace,
};
use bnucleolus::random::{charset_i_instance, charset_ii_instance, random_imputation, seeded};
use bnucleolus::rational::{format_rational, int, ratio, Rational};

const ORACLE_SEED: u64 = 20240601;
const ORACLE_INSTANCES: usize = 20;
const PLANT_SEED: u64 = 5;
const PROPERTY_SEED: u64 = 77;

type Outcome = Result<String, String>;

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn bipartite(a: usize, b: usize, skip: &[(usize, usize)]) -> GameGraph {
    let mut g = GameGraph::new();
    for i in 0..a {
        g.add_vertex(format!("a{}", i + 1), Side::A, 1).unwrap();
    }
    for j in 0..b {
        g.add_vertex(format!("b{}", j + 1), Side::B, 1).unwrap();
    }
    for i in 0..a {
        for j in 0..b {
            if !skip.contains(&(i, j)) {
                g.add_edge(i, a + j, int(1), false).unwrap();
            }
        }
    }
    g
}

fn run_table(args: &[&str], rows: usize) -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_bnuc"))
        .args(["--format", "lines", "verify"])
        .args(args)
        .output()
        .map_err(err)?;
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let ok = text.lines().filter(|l| l.starts_with("ok ")).count();
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL ")).collect();
    ensure(
        out.status.success() && failed.is_empty() && ok == rows,
        || format!("{ok}/{rows} rows match; {}", failed.join("; ")),
    )?;
    let notes: Vec<&str> = text.lines().filter(|l| l.contains("misprint")).collect();
    let mut detail = format!("{ok}/{rows} rows exact");
    for n in notes {
        detail.push_str(&format!("; {}", n.trim_start_matches("ok ")));
    }
    Ok(detail)
}

fn table_one() -> Outcome {
    run_table(&["table1"], 14)
}

fn table_two() -> Outcome {
    run_table(&["table2", "--delta", "1/4"], 22)
}

fn single_edge_gadget_nucleolus() -> Outcome {
    let g = build_nucleolus_gadget(&bipartite(1, 1, &[])).map_err(err)?;
    let game = matching_game(&g.graph).map_err(err)?;
    let trace = bruteforce_trace(&game).map_err(err)?;
    ensure(trace.family_size == 4094, || {
        format!("family has {} coalitions", trace.family_size)
    })?;
    let three_halves = ratio(3, 2);
    ensure(
        trace
            .final_point
            .values()
            .iter()
            .all(|v| *v == three_halves),
        || format!("nucleolus {}", game.format_allocation(&trace.final_point)),
    )?;
    ensure(trace.final_point == make_xstar(&g).map_err(err)?, || {
        "differs from x*".into()
    })?;
    ensure(trace.rounds.len() >= 2, || {
        format!("{} rounds", trace.rounds.len())
    })?;
    let mut complete: Vec<Coalition> = g
        .originals()
        .into_iter()
        .map(|u| Coalition::from_members(gadget_owner_set(&g, u), 12).unwrap())
        .collect();
    complete.sort();
    let mut first = trace.rounds[0].fixed.clone();
    first.sort();
    ensure(
        trace.rounds[0].epsilon == int(0) && first == complete,
        || {
            format!(
                "round 1 epsilon {}",
                format_rational(&trace.rounds[0].epsilon)
            )
        },
    )?;
    ensure(trace.rounds[1].epsilon == three_halves, || {
        format!(
            "round 2 epsilon {}",
            format_rational(&trace.rounds[1].epsilon)
        )
    })?;
    Ok(format!(
        "x = 3/2 on all 12 players; epsilon 0 then 3/2; round 1 fixes the {} complete gadgets",
        complete.len()
    ))
}

fn original_coalition_excess() -> Outcome {
    let mut parts = Vec::new();
    for (label, skip) in [("K3,3", vec![]), ("K3,3-e", vec![(2, 2)])] {
        let source = bipartite(3, 3, &skip);
        let expected = delta(&source, DEFAULT_DETECT_CAP)
            .map_err(err)?
            .ok_or_else(|| format!("{label}: no cubic or two-from-cubic subgraph"))?;
        let g = build_nucleolus_gadget(&source).map_err(err)?;
        let originals =
            Coalition::from_members(g.originals(), g.graph.vertex_count()).map_err(err)?;
        let x = make_xstar(&g).map_err(err)?;
        let e = x.sum_over(originals) - value(&g.graph, originals).map_err(err)?;
        ensure(e == int(expected.into()), || {
            format!(
                "{label}: excess {} but detector gives {expected}",
                format_rational(&e)
            )
        })?;
        parts.push(format!("{label}: e = {} = delta", format_rational(&e)));
    }
    Ok(parts.join("; "))
}

fn charset_i_equivalence() -> Outcome {
    let mut rng = seeded(ORACLE_SEED);
    let mut max_players = 0;
    for i in 0..ORACLE_INSTANCES {
        let g = charset_i_instance(&mut rng, 10, 2);
        max_players = max_players.max(g.vertex_count());
        let brute = nucleolus_bruteforce(&matching_game(&g).map_err(err)?).map_err(err)?;
        let fast = nucleolus_charset_i(&g, charset_i_min_k(&g)).map_err(err)?;
        ensure(fast == brute, || format!("instance {} differs", i + 1))?;
    }
    Ok(format!(
        "{ORACLE_INSTANCES}/{ORACLE_INSTANCES} equal (seed {ORACLE_SEED}, up to {max_players} players)"
    ))
}

fn charset_ii_instances() -> Vec<GameGraph> {
    let mut rng = seeded(ORACLE_SEED + 1);
    (0..ORACLE_INSTANCES)
        .map(|_| charset_ii_instance(&mut rng, 10))
        .collect()
}

fn all_coalitions(n: usize) -> impl Iterator<Item = Coalition> {
    (1..=Coalition::grand(n).bits()).map(move |bits| Coalition::new(bits, n).unwrap())
}

fn charset_ii_equivalence() -> Outcome {
    let mut checked = 0usize;
    for (i, g) in charset_ii_instances().iter().enumerate() {
        let game = matching_game(g).map_err(err)?;
        let fast = nucleolus_charset_ii(g).map_err(err)?;
        ensure(fast == nucleolus_bruteforce(&game).map_err(err)?, || {
            format!("instance {} nucleolus differs", i + 1)
        })?;
        for c in all_coalitions(g.vertex_count()) {
            ensure(
                nonsimple2_value_fast(g, c).map_err(err)? == value(g, c).map_err(err)?,
                || {
                    format!(
                        "instance {} value differs on {}",
                        i + 1,
                        game.format_coalition(c)
                    )
                },
            )?;
            checked += 1;
        }
    }
    Ok(format!(
        "{ORACLE_INSTANCES}/{ORACLE_INSTANCES} equal (seed {}); fast value equal on {checked} coalitions",
        ORACLE_SEED + 1
    ))
}

fn triangle() -> GameGraph {
    let mut g = GameGraph::new();
    for name in ["a", "b", "c"] {
        g.add_vertex(name, Side::Unlabeled, 2).unwrap();
    }
    for (u, v) in [("a", "b"), ("b", "c"), ("a", "c")] {
        g.add_edge_by_name(u, v, int(1), true).unwrap();
    }
    g
}

fn dual_core_membership() -> Outcome {
    let mut graphs = charset_ii_instances();
    graphs.push(triangle());
    for (i, g) in graphs.iter().enumerate() {
        let game = matching_game(g).map_err(err)?;
        let dual = dual_core_allocation(g).map_err(err)?;
        let in_core = dual.allocation.total() == *game.grand_value()
            && core_check(
                &game,
                &dual.allocation,
                &proper_coalitions(g.vertex_count()),
            )
            .map_err(err)?
            .is_ok();
        ensure(in_core, || {
            format!("instance {} dual allocation not in core", i + 1)
        })?;
    }
    let t = triangle();
    let all = Coalition::grand(3);
    let non_simple = value(&t, all).map_err(err)?;
    let parallel = parallel_edges_value(&t, all).map_err(err)?;
    ensure(non_simple == int(3) && parallel == int(2), || {
        format!(
            "triangle values {} and {}",
            format_rational(&non_simple),
            format_rational(&parallel)
        )
    })?;
    Ok(format!(
        "{} allocations in core; triangle value 3 non-simple, 2 parallel edges only",
        graphs.len()
    ))
}

fn reduction_structure() -> Outcome {
    let fixed = X3CInstance::with_default_names(1, vec![[0, 1, 2]; 3]).map_err(err)?;
    let (planted, cover) = planted_instance(2, &mut seeded(PLANT_SEED));
    let mut parts = Vec::new();
    for (inst, cover) in [(fixed, vec![0]), (planted, cover)] {
        let k = inst.k();
        let xg = build_x3c_graph(&inst).map_err(err)?;
        let report = structural_check(&xg.graph);
        ensure(report.passed(), || {
            format!("k={k}: failed {}", report.failures().join(", "))
        })?;
        ensure(report.max_degree == 4, || {
            format!("k={k}: max degree {}", report.max_degree)
        })?;
        let w = cover_to_cubic(&xg, &cover).map_err(err)?;
        ensure(w.is_cubic() && w.degrees.values().all(|&d| d == 3), || {
            format!("k={k}: witness not cubic")
        })?;
        parts.push(format!(
            "k={k}: {} vertices, max degree 4, cubic witness on {} vertices",
            report.vertices,
            w.vertex_count()
        ));
    }
    let source = bipartite(4, 4, &[]);
    let g = build_nucleolus_gadget(&source).map_err(err)?;
    let maxdeg = g.graph.max_degree();
    ensure(source.max_degree() == 4 && maxdeg == 7, || {
        format!("gadget max degree {maxdeg}")
    })?;
    parts.push("K4,4 gadget max degree 7".into());
    Ok(parts.join("; "))
}

fn desk_instances() -> Vec<GameGraph> {
    let mut rng = seeded(PROPERTY_SEED);
    let mut out = Vec::new();
    for _ in 0..6 {
        out.push(charset_i_instance(&mut rng, 8, 2));
        out.push(charset_ii_instance(&mut rng, 8));
    }
    out.push(build_nucleolus_gadget(&bipartite(1, 1, &[])).unwrap().graph);
    out
}

fn fixed_sets(t: &SchemeTrace) -> Vec<(Rational, Vec<Coalition>)> {
    t.rounds
        .iter()
        .map(|r| {
            let mut f = r.fixed.clone();
            f.sort();
            (r.epsilon.clone(), f)
        })
        .collect()
}

fn check_properties(i: usize, g: &GameGraph, game: &Game) -> Result<(), String> {
    let family = CoalitionFamily::full(game.player_count());
    let trace = kopelowitz(game, &family).map_err(err)?;
    let eps: Vec<&Rational> = trace.epsilons().collect();
    ensure(eps.windows(2).all(|w| w[0] <= w[1]), || {
        format!("instance {i}: epsilon decreases")
    })?;
    ensure(trace.rounds.iter().all(|r| !r.fixed.is_empty()), || {
        format!("instance {i}: empty round")
    })?;

    let mut rng = seeded(PROPERTY_SEED + i as u64);
    for _ in 0..2 {
        let mut order: Vec<usize> = (0..family.len()).collect();
        order.shuffle(&mut rng);
        let shuffled = kopelowitz(game, &family.permuted(&order).map_err(err)?).map_err(err)?;
        ensure(
            shuffled.final_point == trace.final_point
                && fixed_sets(&shuffled) == fixed_sets(&trace),
            || format!("instance {i}: order dependence"),
        )?;
    }

    let coalitions = proper_coalitions(game.player_count());
    let theta_z = excess_vector(game, &trace.final_point, &coalitions).map_err(err)?;
    for _ in 0..100 {
        let x = random_imputation(game, &mut rng)
            .ok_or_else(|| format!("instance {i}: no imputation"))?;
        let theta_x = excess_vector(game, &x, &coalitions).map_err(err)?;
        ensure(
            lex_compare(&theta_z, &theta_x).map_err(err)? != Ordering::Less,
            || format!("instance {i}: dominated by {}", game.format_allocation(&x)),
        )?;
    }

    let n = g.vertex_count();
    let unweighted = g.edges().iter().all(|e| e.weight == int(1));
    for _ in 0..100 {
        let big = Coalition::new(rng.gen_range(1..1u64 << n), n).map_err(err)?;
        let small = Coalition::new(big.bits() & rng.gen::<u64>(), n).map_err(err)?;
        let (vb, vs) = (value(g, big).map_err(err)?, value(g, small).map_err(err)?);
        ensure(vs <= vb, || format!("instance {i}: value not monotone"))?;
        let cap: u32 = big.members().map(|v| g.b(v)).sum();
        ensure(!unweighted || vb * int(2) <= int(cap.into()), || {
            format!("instance {i}: value exceeds capacity bound")
        })?;
    }
    Ok(())
}

fn property_suites() -> Outcome {
    let graphs = desk_instances();
    for (i, g) in graphs.iter().enumerate() {
        let game = matching_game(g).map_err(err)?;
        check_properties(i + 1, g, &game)?;
    }
    Ok(format!(
        "{} instances (seed {PROPERTY_SEED}): monotone rounds, order independence, 100 imputations dominated, value bounds",
        graphs.len()
    ))
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        name: "uniform-allocation excess table",
        budget: secs(10),
        run: table_one,
    },
    Criterion {
        name: "tilted-allocation excess table at delta = 1/4",
        budget: secs(10),
        run: table_two,
    },
    Criterion {
        name: "brute-force nucleolus of the single-edge gadget graph",
        budget: secs(600),
        run: single_edge_gadget_nucleolus,
    },
    Criterion {
        name: "original-coalition excess equals delta",
        budget: secs(60),
        run: original_coalition_excess,
    },
    Criterion {
        name: "size-bounded family matches brute force",
        budget: secs(1800),
        run: charset_i_equivalence,
    },
    Criterion {
        name: "pair family and fast value match brute force",
        budget: secs(1800),
        run: charset_ii_equivalence,
    },
    Criterion {
        name: "dual-derived allocations lie in the core",
        budget: secs(300),
        run: dual_core_membership,
    },
    Criterion {
        name: "exact-cover reduction structure",
        budget: secs(60),
        run: reduction_structure,
    },
    Criterion {
        name: "scheme and value property suites",
        budget: secs(600),
        run: property_suites,
    },
];

fn main() -> ExitCode {
    let mut passed = 0;
    for (i, c) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let in_budget = elapsed <= c.budget;
        let ok = outcome.is_ok() && in_budget;
        passed += usize::from(ok);
        let detail = match &outcome {
            Ok(d) if in_budget => d.clone(),
            Ok(d) => format!("{d}; over budget"),
            Err(e) => e.clone(),
        };
        println!(
            "{} {} {}: {} [{:.2}s / {}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("acceptance: {passed}/{} criteria passed", CRITERIA.len());
    if passed == CRITERIA.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

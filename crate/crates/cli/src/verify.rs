use std::path::Path;

use anyhow::{bail, Result};
use bnucleolus::bmatching::{matching_game, nonsimple2_value_fast, value, GameGraph, Side};
use bnucleolus::gadgets::{
    build_nucleolus_gadget, excess_table, published_table, ExcessRow, Table,
};
use bnucleolus::game::{core_check, proper_coalitions, Coalition};
use bnucleolus::nucleolus::{
    charset_i_min_k, dual_core_allocation, is_nucleolus, nucleolus_bruteforce, nucleolus_charset_i,
    nucleolus_charset_ii, BRUTE_FORCE_MAX_PLAYERS,
};
use bnucleolus::random::{charset_i_instance, charset_ii_instance, seeded};
use bnucleolus::rational::{format_rational, int};

use crate::commands::{load_allocation, load_graph, print_allocation, report_core, trace_for};
use crate::output::Out;
use crate::{Mode, VerifyCheck};

fn single_edge() -> Result<GameGraph> {
    let mut g = GameGraph::new();
    g.add_vertex("u", Side::A, 1)?;
    g.add_vertex("v", Side::B, 1)?;
    g.add_edge_by_name("u", "v", int(1), false)?;
    Ok(g)
}

fn compare_tables(out: &Out, graph: Option<&Path>, table: Table) -> Result<bool> {
    let source = match graph {
        Some(p) => load_graph(p)?,
        None => single_edge()?,
    };
    let g = build_nucleolus_gadget(&source)?;
    let computed = excess_table(&g, &table)?;
    let reference = published_table(&table);
    let mut ok = computed.len() == reference.len();
    out.record(
        "rows",
        format!("computed {} reference {}", computed.len(), reference.len()),
    );
    for row in &computed {
        let expected: Option<&ExcessRow> = reference.iter().find(|r| r.shape == row.shape);
        let matches = expected.is_some_and(|r| {
            r.value == row.value && r.excess == row.excess && r.class_size == row.class_size
        });
        ok &= matches;
        let mut line = row.to_string();
        if let Some(printed) = expected.and_then(|r| r.printed_excess.as_ref()) {
            line.push_str(&format!(
                " (reference prints {}, a misprint)",
                format_rational(printed)
            ));
        }
        if !matches {
            if let Some(r) = expected {
                line.push_str(&format!(" (reference {r})"));
            } else {
                line.push_str(" (no reference row)");
            }
        }
        out.check(matches, line);
    }
    Ok(ok)
}

fn check_nucleolus(
    out: &Out,
    graph_path: &Path,
    alloc_path: &Path,
    mode: Mode,
    k: Option<usize>,
) -> Result<bool> {
    let graph = load_graph(graph_path)?;
    let names = graph.names();
    let x = load_allocation(alloc_path, &names)?;
    let ok = match mode {
        Mode::Brute => {
            if graph.vertex_count() > BRUTE_FORCE_MAX_PLAYERS {
                bail!(
                    "{} players; brute force is limited to {BRUTE_FORCE_MAX_PLAYERS}",
                    graph.vertex_count()
                );
            }
            is_nucleolus(&matching_game(&graph)?, &x)?
        }
        _ => {
            let (game, trace) = trace_for(&graph, mode, k)?;
            if trace.final_point != x {
                out.note("computed nucleolus:");
                print_allocation(out, game.names(), &trace.final_point);
            }
            trace.final_point == x
        }
    };
    out.record("nucleolus", if ok { "yes" } else { "no" });
    Ok(ok)
}

fn describe(g: &GameGraph) -> String {
    format!("players {} edges {}", g.vertex_count(), g.edge_count())
}

fn charset_i_suite(
    out: &Out,
    seed: u64,
    count: usize,
    max_players: usize,
    max_heavy: usize,
) -> Result<bool> {
    out.record("seed", seed);
    let mut rng = seeded(seed);
    let mut passed = 0;
    for i in 1..=count {
        let g = charset_i_instance(&mut rng, max_players, max_heavy);
        let k = charset_i_min_k(&g);
        let brute = nucleolus_bruteforce(&matching_game(&g)?)?;
        let fast = nucleolus_charset_i(&g, k)?;
        let ok = fast == brute;
        passed += usize::from(ok);
        out.check(ok, format!("instance {i} {} k {k}", describe(&g)));
    }
    out.record("passed", format!("{passed}/{count}"));
    Ok(passed == count)
}

fn charset_ii_suite(out: &Out, seed: u64, count: usize, max_players: usize) -> Result<bool> {
    out.record("seed", seed);
    let mut rng = seeded(seed);
    let mut passed = 0;
    for i in 1..=count {
        let g = charset_ii_instance(&mut rng, max_players);
        let game = matching_game(&g)?;
        let n = g.vertex_count();
        let same_nucleolus = nucleolus_charset_ii(&g)? == nucleolus_bruteforce(&game)?;
        let mut same_values = true;
        for bits in 1..=Coalition::grand(n).bits() {
            let c = Coalition::new(bits, n)?;
            same_values &= nonsimple2_value_fast(&g, c)? == value(&g, c)?;
        }
        let dual = dual_core_allocation(&g)?;
        let dual_in_core = dual.allocation.total() == *game.grand_value()
            && core_check(&game, &dual.allocation, &proper_coalitions(n))?.is_ok();
        let ok = same_nucleolus && same_values && dual_in_core;
        passed += usize::from(ok);
        out.check(
            ok,
            format!(
                "instance {i} {} nucleolus {} values {} dual-core {}",
                describe(&g),
                same_nucleolus,
                same_values,
                dual_in_core
            ),
        );
    }
    out.record("passed", format!("{passed}/{count}"));
    Ok(passed == count)
}

pub fn run(out: &Out, check: VerifyCheck) -> Result<bool> {
    match check {
        VerifyCheck::Table1 { graph } => compare_tables(out, graph.as_deref(), Table::One),
        VerifyCheck::Table2 { delta, graph } => {
            compare_tables(out, graph.as_deref(), Table::Two { delta })
        }
        VerifyCheck::Core { graph, allocation } => {
            let g = load_graph(&graph)?;
            let game = matching_game(&g)?;
            let x = match allocation {
                Some(p) => load_allocation(&p, game.names())?,
                None => {
                    let dual = dual_core_allocation(&g)?;
                    out.note("allocation from the doubled optimal dual:");
                    print_allocation(out, game.names(), &dual.allocation);
                    dual.allocation
                }
            };
            report_core(out, &game, &x)
        }
        VerifyCheck::IsNucleolus {
            graph,
            allocation,
            mode,
            k,
        } => check_nucleolus(out, &graph, &allocation, mode, k),
        VerifyCheck::CharsetI {
            seed,
            count,
            max_players,
            max_heavy,
        } => charset_i_suite(out, seed, count, max_players, max_heavy),
        VerifyCheck::CharsetIi {
            seed,
            count,
            max_players,
        } => charset_ii_suite(out, seed, count, max_players),
    }
}

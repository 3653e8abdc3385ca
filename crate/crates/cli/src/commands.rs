use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bnucleolus::bmatching::{matching_game, GameGraph, MatchingSolver};
use bnucleolus::gadgets::{
    build_nucleolus_gadget, build_x3c_graph, cover_to_cubic, detect_2fc, detect_cubic,
    planted_instance, structural_check, x3c_bruteforce, GadgetGraph, SubgraphWitness,
};
use bnucleolus::game::{
    core_check, is_imputation, proper_coalitions, Allocation, Coalition, CoreCheck, Game,
};
use bnucleolus::io::{
    parse_allocation, parse_graph, parse_x3c, write_allocation, write_graph, write_x3c,
};
use bnucleolus::nucleolus::{
    bruteforce_trace, charset_i_min_k, charset_i_trace, charset_ii_trace, SchemeTrace,
    BRUTE_FORCE_MAX_PLAYERS,
};
use bnucleolus::random::seeded;
use bnucleolus::rational::format_rational;

use crate::output::Out;
use crate::{GadgetKind, Mode, Stage, X3cAction};

/// Player limit for commands that enumerate every coalition.
pub const ENUMERATION_MAX_PLAYERS: usize = 20;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_graph(path: &Path) -> Result<GameGraph> {
    let doc = parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(doc.graph)
}

pub fn load_allocation(path: &Path, names: &[String]) -> Result<Allocation> {
    parse_allocation(&read(path)?, names).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_enumerable(players: usize) -> Result<()> {
    if players > ENUMERATION_MAX_PLAYERS {
        bail!(
            "{players} players; enumerating all coalitions is limited to {ENUMERATION_MAX_PLAYERS}"
        );
    }
    Ok(())
}

fn parse_coalition(graph: &GameGraph, text: &str) -> Result<Coalition> {
    let members = text
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|name| graph.index_of(name.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Coalition::from_members(members, graph.vertex_count())?)
}

fn format_members(graph: &GameGraph, c: Coalition) -> String {
    let names: Vec<&str> = c.members().map(|i| graph.name(i)).collect();
    format!("{{{}}}", names.join(","))
}

pub fn value(out: &Out, path: &Path, coalitions: &[String], cap: usize) -> Result<bool> {
    let graph = load_graph(path)?;
    let n = graph.vertex_count();
    let solver = MatchingSolver::with_cap(cap);
    let mut list = Vec::new();
    for text in coalitions {
        if text == "all" {
            check_enumerable(n)?;
            list.extend(
                (1..=Coalition::grand(n).bits())
                    .map(|bits| Coalition::new(bits, n).expect("in range")),
            );
        } else {
            list.push(parse_coalition(&graph, text)?);
        }
    }
    for c in list {
        let v = solver.value(&graph, c)?;
        out.record(
            &format!("value {}", format_members(&graph, c)),
            format_rational(&v),
        );
    }
    Ok(true)
}

pub fn trace_for(graph: &GameGraph, mode: Mode, k: Option<usize>) -> Result<(Game, SchemeTrace)> {
    Ok(match mode {
        Mode::Brute => {
            let game = matching_game(graph)?;
            let trace = bruteforce_trace(&game)?;
            (game, trace)
        }
        Mode::CharsetI => charset_i_trace(graph, k.unwrap_or_else(|| charset_i_min_k(graph)))?,
        Mode::CharsetIi => charset_ii_trace(graph)?,
    })
}

pub fn print_trace(out: &Out, game: &Game, trace: &SchemeTrace, fixed: bool) {
    out.record(
        "family",
        format!("{} {}", trace.provenance, trace.family_size),
    );
    for (i, round) in trace.rounds.iter().enumerate() {
        out.record(
            &format!("round {}", i + 1),
            format!(
                "epsilon {} fixed {} probes {}",
                format_rational(&round.epsilon),
                round.fixed.len(),
                round.probes
            ),
        );
        if fixed {
            for &c in &round.fixed {
                out.record(&format!("fixed {}", i + 1), game.format_coalition(c));
            }
        }
    }
    print_allocation(out, game.names(), &trace.final_point);
}

pub fn print_allocation(out: &Out, names: &[String], x: &Allocation) {
    for (name, v) in names.iter().zip(x.values()) {
        out.record(&format!("x {name}"), format_rational(v));
    }
}

pub fn nucleolus(
    out: &Out,
    path: &Path,
    mode: Mode,
    k: Option<usize>,
    fixed: bool,
    output: Option<&Path>,
) -> Result<bool> {
    let graph = load_graph(path)?;
    if mode == Mode::Brute && graph.vertex_count() > BRUTE_FORCE_MAX_PLAYERS {
        bail!(
            "{} players; brute force is limited to {BRUTE_FORCE_MAX_PLAYERS}",
            graph.vertex_count()
        );
    }
    let (game, trace) = trace_for(&graph, mode, k)?;
    print_trace(out, &game, &trace, fixed);
    if let Some(p) = output {
        emit(&write_allocation(game.names(), &trace.final_point), Some(p))?;
    }
    Ok(true)
}

/// Prints imputation status and the first violated coalition, if any.
pub fn report_core(out: &Out, game: &Game, x: &Allocation) -> Result<bool> {
    check_enumerable(game.player_count())?;
    let efficient = x.total() == *game.grand_value();
    let imputation = is_imputation(game, x);
    out.record("total", format_rational(&x.total()));
    out.record("grand-value", format_rational(game.grand_value()));
    out.check(efficient, "efficient");
    out.check(imputation, "imputation");
    let stable = match core_check(game, x, &proper_coalitions(game.player_count()))? {
        CoreCheck::Ok => true,
        CoreCheck::Violation { coalition, excess } => {
            out.record(
                "violation",
                format!(
                    "{} excess {}",
                    game.format_coalition(coalition),
                    format_rational(&excess)
                ),
            );
            false
        }
    };
    out.check(stable, "coalitional rationality");
    let ok = efficient && imputation && stable;
    out.record("core", if ok { "yes" } else { "no" });
    Ok(ok)
}

pub fn core_check_cmd(out: &Out, graph_path: &Path, alloc_path: &Path) -> Result<bool> {
    let graph = load_graph(graph_path)?;
    check_enumerable(graph.vertex_count())?;
    let game = matching_game(&graph)?;
    let x = load_allocation(alloc_path, game.names())?;
    report_core(out, &game, &x)
}

fn print_structure(out: &Out, g: &GadgetGraph) -> bool {
    let report = structural_check(g);
    out.record("vertices", report.vertices);
    out.record("edges", report.edges);
    out.record("bipartite", report.bipartite);
    out.record("max-degree", report.max_degree);
    for (role, count) in &report.role_counts {
        out.record(&format!("role {role}"), count);
    }
    for (name, ok) in &report.checks {
        out.check(*ok, name);
    }
    report.passed()
}

/// The structure report goes to stderr when the graph itself goes to stdout.
fn gadget_output(out: &Out, g: &GadgetGraph, output: Option<&Path>) -> Result<bool> {
    let text = write_graph(&g.graph, Some(&g.roles));
    match output {
        Some(p) => {
            emit(&text, Some(p))?;
            Ok(print_structure(out, g))
        }
        None => {
            print!("{text}");
            let report = structural_check(g);
            eprint!("{report}");
            Ok(report.passed())
        }
    }
}

pub fn gadget(out: &Out, kind: GadgetKind) -> Result<bool> {
    match kind {
        GadgetKind::Nucleolus { graph, output } => {
            let g = build_nucleolus_gadget(&load_graph(&graph)?)?;
            gadget_output(out, &g, output.as_deref())
        }
        GadgetKind::X3c {
            instance,
            stage,
            output,
        } => {
            let inst = parse_x3c(&read(&instance)?)
                .with_context(|| format!("parsing {}", instance.display()))?;
            let xg = build_x3c_graph(&inst)?;
            let g = match stage {
                Stage::G0 => &xg.g0,
                Stage::G1 => &xg.g1,
                Stage::G2 => &xg.g2,
                Stage::Full => &xg.graph,
            };
            gadget_output(out, g, output.as_deref())
        }
    }
}

fn describe_witness(graph: &GameGraph, w: &SubgraphWitness) -> String {
    let edges: Vec<String> = w
        .edges
        .iter()
        .map(|&e| {
            let edge = &graph.edges()[e];
            format!("{}-{}", graph.name(edge.u), graph.name(edge.v))
        })
        .collect();
    format!(
        "vertices {} edges {} [{}]",
        w.vertex_count(),
        w.edges.len(),
        edges.join(" ")
    )
}

pub fn detect(out: &Out, path: &Path, cap: usize) -> Result<bool> {
    let graph = load_graph(path)?;
    let cubic = detect_cubic(&graph, cap)?;
    match &cubic {
        Some(w) => out.record("cubic", format!("yes {}", describe_witness(&graph, w))),
        None => out.record("cubic", "no"),
    }
    let two = detect_2fc(&graph, cap)?;
    match &two {
        Some(w) => {
            let special: Vec<&str> = w.special.iter().map(|&v| graph.name(v)).collect();
            out.record(
                "2fc",
                format!(
                    "yes {} special {} trivial {}",
                    describe_witness(&graph, w),
                    special.join(","),
                    w.is_trivial(&graph)
                ),
            );
        }
        None => out.record("2fc", "no"),
    }
    let delta = match (&cubic, &two) {
        (Some(_), _) => "0",
        (None, Some(_)) => "1",
        (None, None) => "undefined",
    };
    out.record("delta", delta);
    Ok(true)
}

pub fn x3c(out: &Out, action: X3cAction) -> Result<bool> {
    match action {
        X3cAction::Solve { instance } => {
            let inst = parse_x3c(&read(&instance)?)
                .with_context(|| format!("parsing {}", instance.display()))?;
            out.record("k", inst.k());
            out.record("subsets", inst.subsets().len());
            let restricted = inst.check_restricted().is_ok();
            out.record("restricted", restricted);
            let cover = match x3c_bruteforce(&inst)? {
                Some(c) => c,
                None => {
                    out.record("cover", "none");
                    return Ok(true);
                }
            };
            let labels: Vec<String> = cover
                .iter()
                .map(|&j| {
                    let [a, b, c] = inst.subsets()[j];
                    let e = inst.elements();
                    format!("S{}={{{},{},{}}}", j + 1, e[a], e[b], e[c])
                })
                .collect();
            out.record("cover", labels.join(" "));
            if !restricted {
                return Ok(true);
            }
            let xg = build_x3c_graph(&inst)?;
            let w = cover_to_cubic(&xg, &cover)?;
            let induced = {
                let mut members = vec![false; xg.graph.graph.vertex_count()];
                for &v in w.degrees.keys() {
                    members[v] = true;
                }
                let mut induced = xg.graph.graph.induced_edges(&members);
                induced.sort_unstable();
                induced == w.edges
            };
            out.record("cubic-vertices", w.vertex_count());
            out.record("cubic-edges", w.edges.len());
            out.check(w.is_cubic(), "every degree is 3");
            out.check(induced, "subgraph is induced");
            Ok(w.is_cubic() && induced)
        }
        X3cAction::Plant { k, seed, output } => {
            if k == 0 {
                bail!("k must be positive");
            }
            let (inst, cover) = planted_instance(k, &mut seeded(seed));
            let names: Vec<String> = cover.iter().map(|j| format!("S{}", j + 1)).collect();
            match output.as_deref() {
                Some(p) => {
                    emit(&write_x3c(&inst), Some(p))?;
                    out.record("seed", seed);
                    out.record("planted", names.join(" "));
                }
                None => {
                    print!("{}", write_x3c(&inst));
                    eprintln!("seed {seed}");
                    eprintln!("planted {}", names.join(" "));
                }
            }
            Ok(true)
        }
    }
}

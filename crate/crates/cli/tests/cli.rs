use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn bnuc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bnuc"))
        .arg("--format")
        .arg("lines")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn has_line(out: &Output, line: &str) -> bool {
    stdout(out).lines().any(|l| l == line)
}

#[test]
fn value_of_named_coalitions() {
    let out = bnuc(&["value", &fixture("triangle.graph"), "a,b,c", "a,b"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "value {a,b,c} 3\nvalue {a,b} 2\n");
}

#[test]
fn value_all_lists_every_nonempty_coalition() {
    let out = bnuc(&["value", &fixture("k33.graph")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 63);
    assert!(has_line(&out, "value {a1,a2,a3,b1,b2,b3} 3"));
}

#[test]
fn unknown_player_is_an_error() {
    let out = bnuc(&["value", &fixture("k2.graph"), "u,zz"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zz"));
}

#[test]
fn path_nucleolus_with_trace() {
    let out = bnuc(&["nucleolus", &fixture("path.graph"), "--trace"]);
    assert!(out.status.success());
    for line in ["family full 6", "x a 0", "x b 1", "x c 0"] {
        assert!(has_line(&out, line), "missing {line}");
    }
    assert!(stdout(&out).lines().any(|l| l.starts_with("fixed 1 ")));
}

#[test]
fn charset_modes_agree_on_small_graphs() {
    let brute = stdout(&bnuc(&["nucleolus", &fixture("c4.graph")]));
    let fast = stdout(&bnuc(&[
        "nucleolus",
        &fixture("c4.graph"),
        "--mode",
        "charset-i",
    ]));
    let pick = |s: &str| {
        s.lines()
            .filter(|l| l.starts_with("x "))
            .map(String::from)
            .collect::<Vec<_>>()
    };
    assert_eq!(pick(&brute), pick(&fast));
    let brute = stdout(&bnuc(&["nucleolus", &fixture("c4_double.graph")]));
    let fast = stdout(&bnuc(&[
        "nucleolus",
        &fixture("c4_double.graph"),
        "--mode",
        "charset-ii",
    ]));
    assert_eq!(pick(&brute), pick(&fast));
}

#[test]
fn charset_i_rejects_unlabeled_graphs() {
    let out = bnuc(&[
        "nucleolus",
        &fixture("triangle.graph"),
        "--mode",
        "charset-i",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn is_nucleolus_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.alloc");
    let bad = dir.path().join("bad.alloc");
    fs::write(&good, "a 0\nb 1\nc 0\n").unwrap();
    fs::write(&bad, "a 1/2\nb 1/2\nc 0\n").unwrap();
    let graph = fixture("path.graph");
    let out = bnuc(&["verify", "is-nucleolus", &graph, good.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(has_line(&out, "nucleolus yes"));
    for mode in ["brute", "charset-i"] {
        let out = bnuc(&[
            "verify",
            "is-nucleolus",
            &graph,
            bad.to_str().unwrap(),
            "--mode",
            mode,
        ]);
        assert_eq!(out.status.code(), Some(1));
        assert!(has_line(&out, "nucleolus no"));
    }
}

#[test]
fn core_check_reports_violation() {
    let dir = tempfile::tempdir().unwrap();
    let alloc = dir.path().join("x.alloc");
    fs::write(&alloc, "a 1\nb 0\nc 0\nd 1\n").unwrap();
    let out = bnuc(&["core-check", &fixture("c4.graph"), alloc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(has_line(&out, "core no"));
    assert!(stdout(&out).lines().any(|l| l.starts_with("violation {")));
    fs::write(&alloc, "a 1/2\nb 1/2\nc 1/2\nd 1/2\n").unwrap();
    let out = bnuc(&["core-check", &fixture("c4.graph"), alloc.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(has_line(&out, "core yes"));
}

#[test]
fn dual_allocation_of_triangle_is_in_core() {
    let out = bnuc(&["verify", "core", &fixture("triangle.graph")]);
    assert!(out.status.success());
    for line in ["x a 1", "x b 1", "x c 1", "core yes"] {
        assert!(has_line(&out, line), "missing {line}");
    }
}

#[test]
fn detect_distinguishes_cubic_and_two_from_cubic() {
    let out = bnuc(&["detect", &fixture("k33.graph")]);
    assert!(has_line(&out, "delta 0"));
    let out = bnuc(&["detect", &fixture("k33_minus_edge.graph")]);
    assert!(stdout(&out).lines().any(|l| l.starts_with("cubic no")));
    assert!(stdout(&out)
        .lines()
        .any(|l| l.contains("special a3,b3 trivial false")));
    assert!(has_line(&out, "delta 1"));
    let out = bnuc(&["detect", &fixture("path.graph")]);
    assert!(has_line(&out, "delta undefined"));
}

#[test]
fn gadget_of_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gstar.graph");
    let out = bnuc(&[
        "gadget",
        "nucleolus",
        &fixture("k2.graph"),
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(has_line(&out, "vertices 12"));
    assert!(has_line(&out, "edges 19"));
    let out = bnuc(&[
        "value",
        path.to_str().unwrap(),
        "u,v,v@u,w@u,x@u,y@u,z@u,v@v,w@v,x@v,y@v,z@v",
    ]);
    assert!(stdout(&out).ends_with(" 18\n"));
}

#[test]
fn gadget_to_stdout_is_a_graph_file() {
    let out = bnuc(&["gadget", "nucleolus", &fixture("k2.graph")]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("players\n"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertices 12"));
}

#[test]
fn tables_match_reference() {
    let out = bnuc(&["verify", "table1"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out)
            .lines()
            .filter(|l| l.starts_with("ok "))
            .count(),
        14
    );
    let out = bnuc(&["verify", "table2", "--delta", "1/4"]);
    assert!(out.status.success());
    assert!(stdout(&out)
        .contains("(0,2,1) v=2 excess=47/20 count=3 (reference prints 12/5, a misprint)"));
    let out = bnuc(&["verify", "table2", "--delta", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn x3c_identical_triples() {
    let out = bnuc(&["x3c", "solve", &fixture("identical.x3c")]);
    assert!(out.status.success());
    for line in [
        "restricted true",
        "cover S1={a1,a2,a3}",
        "ok every degree is 3",
        "ok subgraph is induced",
    ] {
        assert!(has_line(&out, line), "missing {line}");
    }
    let out = bnuc(&[
        "gadget",
        "x3c",
        &fixture("identical.x3c"),
        "-o",
        "/dev/null",
    ]);
    assert!(out.status.success());
    assert!(has_line(&out, "vertices 92"));
    assert!(has_line(&out, "edges 144"));
}

#[test]
fn x3c_without_cover() {
    let out = bnuc(&["x3c", "solve", &fixture("no_cover.x3c")]);
    assert!(out.status.success());
    assert!(has_line(&out, "cover none"));
}

#[test]
fn planted_instances_are_deterministic_and_solvable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.x3c");
    let b = dir.path().join("b.x3c");
    let first = bnuc(&[
        "x3c",
        "plant",
        "--k",
        "2",
        "--seed",
        "11",
        "-o",
        a.to_str().unwrap(),
    ]);
    let second = bnuc(&[
        "x3c",
        "plant",
        "--k",
        "2",
        "--seed",
        "11",
        "-o",
        b.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&first), stdout(&second));
    assert!(has_line(&first, "seed 11"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let out = bnuc(&["x3c", "solve", a.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(has_line(&out, "ok every degree is 3"));
}

#[test]
fn random_suites_echo_seed() {
    let out = bnuc(&[
        "verify",
        "charset-ii",
        "--seed",
        "3",
        "--count",
        "3",
        "--max-players",
        "6",
    ]);
    assert!(out.status.success());
    assert!(has_line(&out, "seed 3"));
    assert!(has_line(&out, "passed 3/3"));
}

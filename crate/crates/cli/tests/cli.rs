use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output};

use tropical::arena::{NodeId, TreeGame};
use tropical::{Arena, Cost, Game, MinPlus, TropicalAlgebra, Turn};
use tropical_cli::{
    cmd_oracle_with, Format, LawRecord, OracleRecord, RunRecord, SuiteArgs, BENCH_INPUTS,
};

const WRONG: &str = "if if if true then true else false then 10 else (1+(2+)+3)";

fn grammar_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/examples/expr.grammar")
}

fn tropical(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropical"))
        .args(args)
        .output()
        .unwrap()
}

fn parse_json(args: &[&str]) -> (Output, Vec<RunRecord>) {
    let g = grammar_path();
    let mut all = vec![
        "parse",
        "--grammar",
        g.to_str().unwrap(),
        "--format",
        "json-lines",
    ];
    all.extend_from_slice(args);
    let out = tropical(&all);
    let records = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    (out, records)
}

#[test]
fn sum_parses_with_one_tree() {
    let (out, records) = parse_json(&["--input", "1 + 2 + 3", "--policy", "fm"]);
    assert!(out.status.success());
    assert_eq!(records.len(), 1);
    assert_eq!((records[0].cost, records[0].trees), (0, 1));
    assert_eq!(records[0].policy, "fm");
}

#[test]
fn wrong_input_reports_cost_and_spans() {
    let (out, records) = parse_json(&["--input", WRONG, "--policy", "am"]);
    assert!(out.status.success());
    let r = &records[0];
    assert_eq!(r.cost, 6);
    assert_eq!(r.trees, r.derivations.len());
    for spans in &r.error_spans {
        let excerpts: Vec<&str> = spans.iter().map(|s| s.excerpt.as_str()).collect();
        assert_eq!(excerpts, ["if true", ""]);
        assert_eq!((spans[0].char_start, spans[0].char_end), (6, 13));
        assert_eq!(spans[1].char_start, spans[1].char_end);
    }
}

#[test]
fn text_report_lists_trees_spans_and_stats() {
    let g = grammar_path();
    let out = tropical(&["parse", "--grammar", g.to_str().unwrap(), "--input", WRONG]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cost: 6"), "{text}");
    assert!(text.contains("tree 1: E.4[ if"), "{text}");
    assert!(text.contains("\"if true\" (6 chars)"), "{text}");
    assert!(text.contains("calls"), "{text}");
}

#[test]
fn option_flags_keep_the_cost() {
    for flags in [
        ["--prune", "--memo"],
        ["--no-prune", "--memo"],
        ["--prune", "--no-memo"],
        ["--no-prune", "--no-memo"],
    ] {
        for policy in ["fm", "am"] {
            let mut args = vec!["--input", WRONG, "--policy", policy];
            args.extend_from_slice(&flags);
            let (out, records) = parse_json(&args);
            assert!(out.status.success());
            assert_eq!(records[0].cost, 6);
            assert_eq!(records[0].prune, flags[0] == "--prune");
            assert_eq!(records[0].memo, flags[1] == "--memo");
        }
    }
}

#[test]
fn records_round_trip() {
    let (out, records) = parse_json(&["--input", WRONG, "--policy", "am"]);
    let line = String::from_utf8(out.stdout).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(serde_json::to_value(&records[0]).unwrap(), reparsed);
}

#[test]
fn input_file_parses_each_line() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "1 + 2\n\nlet x = 1 in x\n( 1").unwrap();
    let (out, records) = parse_json(&["--input-file", file.path().to_str().unwrap()]);
    assert!(out.status.success());
    let costs: Vec<u64> = records.iter().map(|r| r.cost).collect();
    assert_eq!(costs, [0, 0, 2]);
}

#[test]
fn missing_grammar_fails_with_a_diagnostic() {
    let out = tropical(&[
        "parse",
        "--grammar",
        "/nonexistent/expr.grammar",
        "--input",
        "1",
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("/nonexistent/expr.grammar"), "{err}");
}

#[test]
fn invalid_grammar_points_at_the_line() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# comment\nE ::= NUM\nE ::= F\nF ::= IDENT").unwrap();
    let out = tropical(&[
        "parse",
        "--grammar",
        file.path().to_str().unwrap(),
        "--input",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("E ::= F"), "{err}");
}

#[test]
fn parse_requires_an_input() {
    let g = grammar_path();
    let out = tropical(&["parse", "--grammar", g.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn bench_covers_every_configuration() {
    let g = grammar_path();
    let out = tropical(&[
        "bench",
        "--grammar",
        g.to_str().unwrap(),
        "--format",
        "json-lines",
    ]);
    assert!(out.status.success());
    let records: Vec<RunRecord> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 8 * BENCH_INPUTS.len());
    for (chunk, (input, _)) in records.chunks(8).zip(BENCH_INPUTS) {
        assert!(chunk
            .iter()
            .all(|r| r.input == input && r.cost == chunk[0].cost));
        let exhaustive = chunk
            .iter()
            .find(|r| r.policy == "fm" && !r.prune && !r.memo)
            .unwrap();
        let pruned = chunk
            .iter()
            .find(|r| r.policy == "fm" && r.prune && !r.memo)
            .unwrap();
        assert!(pruned.calls < exhaustive.calls);
    }
}

#[test]
fn bench_text_prints_reference_counts() {
    let g = grammar_path();
    let out = tropical(&[
        "bench",
        "--grammar",
        g.to_str().unwrap(),
        "--input",
        BENCH_INPUTS[0].0,
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("reference calls: exhaustive 28473"), "{text}");
    assert!(text.contains("reduction"), "{text}");
}

#[test]
fn laws_pass() {
    let out = tropical(&["laws", "--count", "10000", "--format", "json-lines"]);
    assert!(out.status.success());
    let records: Vec<LawRecord> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(records
        .iter()
        .any(|r| r.algebra == "min-plus" && r.checked == 10000));
    assert!(records.iter().all(|r| r.passed));
}

#[test]
fn oracle_passes_on_seed_42() {
    let out = tropical(&[
        "oracle",
        "--seed",
        "42",
        "--count",
        "1000",
        "--format",
        "json-lines",
    ]);
    assert!(out.status.success());
    let rec: OracleRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rec.passed);
    assert_eq!(rec.games, 1000);
}

/// Pruning with the cut guard inverted: the opponent stops as soon as its
/// partial product is still better than the threshold.
fn broken_pruning(game: &TreeGame<MinPlus>, pos: NodeId, alpha: Cost) -> Cost {
    let succ = game.successors(&pos);
    if succ.is_empty() {
        return game.payoff(&pos).unwrap();
    }
    match game.turn(&pos) {
        Turn::Player => succ.iter().fold(alpha, |best, c| {
            MinPlus.oplus(&best, &broken_pruning(game, *c, best))
        }),
        Turn::Opponent => {
            let mut acc = MinPlus.one().unwrap();
            for c in &succ {
                acc = MinPlus.otimes(&acc, &broken_pruning(game, *c, alpha));
                if MinPlus.oplus(&alpha, &acc) == acc {
                    break;
                }
            }
            acc
        }
    }
}

#[test]
fn oracle_catches_a_broken_cut_guard() {
    let args = SuiteArgs {
        seed: 42,
        count: Some(200),
        depth: 4,
        branching: 3,
        budget: 100_000,
        format: Format::JsonLines,
    };
    let mut out = Vec::new();
    let pruned = |g: &TreeGame<MinPlus>, root: NodeId| broken_pruning(g, root, Cost::Infinite);
    let passed = cmd_oracle_with(&args, &mut out, &pruned).unwrap();
    assert!(!passed);
    let rec: OracleRecord = serde_json::from_slice(&out).unwrap();
    let f = &rec.failures[0];
    assert_ne!(f.exhaustive, f.pruned);
    assert_eq!(f.exhaustive, f.small_step);
    // The counterexample is a complete game term.
    assert!(
        f.term
            .parse::<tropical::smallstep::Term<u32, Cost>>()
            .is_ok(),
        "{}",
        f.term
    );
}

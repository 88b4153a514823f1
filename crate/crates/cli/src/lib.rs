//! Commands behind the `tropical` binary. Each command writes its report to
//! the given writer and returns whether every asserted check held.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use tropical::algebra::{
    check_dual_rationality, check_insertion, check_laws, check_neutrals, check_rationality,
    random_quadruples, random_triples, LawReport, Quadruple, RandomValue,
};
use tropical::arena::{random_tree, NodeId, RandomTreeConfig, TreeGame, TurnPattern};
use tropical::evaluator::{eval_exhaustive, eval_tropical};
use tropical::parsegame::{
    best_parse, Grammar, GrammarError, ParseError, ParseOptions, ParseOutcome,
};
use tropical::smallstep::{normalize, RuleSet, Term};
use tropical::{Cost, MinMax, MinPlus, PathMinPlus, Policy, TropicalAlgebra, Turn};

/// The inputs benchmarked by default, with reference call counts
/// (exhaustive, pruned FM, pruned AM, memo only, memo + prune).
pub const BENCH_INPUTS: [(&str, [u64; 5]); 3] = [
    (
        "let x = 42 in x + if 84=42 then 55 else 77",
        [28473, 460, 671, 7295, 131],
    ),
    (
        "let x = 84 = 42 = 21 in 1 + 2 * 3",
        [61980, 260, 2148, 14443, 72],
    ),
    (
        "if if if true then true else false then 10 else (1+(2+)+3)",
        [494344, 9640, 13820, 36575, 1206],
    ),
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}\n  | {excerpt}", path.display())]
    Grammar {
        path: PathBuf,
        source: Box<GrammarError>,
        excerpt: String,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("writing output: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "tropical",
    version,
    about = "Game-tree search over tropical algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an input against a grammar, reporting cost, trees and error spans.
    Parse(ParseArgs),
    /// Check the algebra laws on random samples.
    Laws(SuiteArgs),
    /// Compare exhaustive, pruned and small-step values on random games.
    Oracle(SuiteArgs),
    /// Compare call counts across search options.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Fm,
    Am,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Policy {
        match p {
            PolicyArg::Fm => Policy::FirstMinimal,
            PolicyArg::Am => Policy::AllMinimals,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct GrammarArgs {
    /// Grammar file.
    #[arg(long)]
    pub grammar: PathBuf,
    /// Start nonterminal; defaults to the first one in the grammar.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Cap on the trees reported under AM.
    #[arg(long, default_value_t = 64)]
    pub max_trees: usize,
}

#[derive(Clone, Debug, Args)]
pub struct ParseArgs {
    #[command(flatten)]
    pub grammar: GrammarArgs,
    #[arg(
        long,
        conflicts_with = "input_file",
        required_unless_present = "input_file"
    )]
    pub input: Option<String>,
    /// Read the input from a file; one parse per non-empty line.
    #[arg(long)]
    pub input_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PolicyArg::Fm)]
    pub policy: PolicyArg,
    #[arg(long, overrides_with = "no_prune")]
    pub prune: bool,
    #[arg(long)]
    pub no_prune: bool,
    #[arg(long, overrides_with = "no_memo")]
    pub memo: bool,
    #[arg(long)]
    pub no_memo: bool,
}

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub grammar: GrammarArgs,
    /// Inputs to benchmark; defaults to three reference strings.
    #[arg(long)]
    pub input: Vec<String>,
    /// Read inputs from a file, one per non-empty line.
    #[arg(long)]
    pub input_file: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Samples per law, or games for the oracle.
    #[arg(long)]
    pub count: Option<usize>,
    /// Maximum depth of random games.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Maximum branching of random games.
    #[arg(long, default_value_t = 3)]
    pub branching: usize,
    /// Step budget for the small-step oracle.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// One search run, as emitted by `--format json-lines`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub input: String,
    pub policy: String,
    pub prune: bool,
    pub memo: bool,
    pub cost: u64,
    pub trees: usize,
    pub calls: u64,
    pub cuts: u64,
    pub memo_hits: u64,
    pub millis: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derivations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub error_spans: Vec<Vec<SpanRecord>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanRecord {
    pub nonterminal: String,
    pub char_start: usize,
    pub char_end: usize,
    pub excerpt: String,
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawRecord {
    pub algebra: String,
    pub law: String,
    pub checked: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub seed: u64,
    pub games: usize,
    pub passed: bool,
    pub failures: Vec<OracleFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleFailure {
    pub game: usize,
    pub term: String,
    pub exhaustive: String,
    pub pruned: String,
    pub small_step: String,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<bool, CliError> {
    match cli.command {
        Command::Parse(args) => cmd_parse(&args, out),
        Command::Laws(args) => cmd_laws(&args, out),
        Command::Oracle(args) => cmd_oracle(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
    }
}

pub fn load_grammar(path: &Path) -> Result<Grammar, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    Grammar::load(&text).map_err(|source| {
        let excerpt = source
            .line()
            .and_then(|l| text.lines().nth(l - 1))
            .unwrap_or("")
            .trim()
            .to_string();
        CliError::Grammar {
            path: path.into(),
            source: Box::new(source),
            excerpt,
        }
    })
}

fn read_lines(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect())
}

fn start_symbol(grammar: &Grammar, args: &GrammarArgs) -> String {
    args.start
        .clone()
        .unwrap_or_else(|| grammar.nonterminals()[grammar.default_start()].clone())
}

fn record(input: &str, options: &ParseOptions, out: &ParseOutcome, millis: f64) -> RunRecord {
    RunRecord {
        input: input.to_string(),
        policy: options.policy.to_string(),
        prune: options.prune,
        memo: options.memo,
        cost: out.cost,
        trees: out.trees.len(),
        calls: out.stats.recursive_calls,
        cuts: out.stats.cuts,
        memo_hits: out.stats.memo_hits,
        millis,
        derivations: Vec::new(),
        error_spans: Vec::new(),
    }
}

fn timed_parse(
    grammar: &Grammar,
    start: &str,
    input: &str,
    options: ParseOptions,
) -> Result<(ParseOutcome, f64), CliError> {
    let t = Instant::now();
    let out = best_parse(grammar, start, input, options)?;
    Ok((out, t.elapsed().as_secs_f64() * 1000.0))
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

pub fn cmd_parse(args: &ParseArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let grammar = load_grammar(&args.grammar.grammar)?;
    let start = start_symbol(&grammar, &args.grammar);
    let inputs = match (&args.input, &args.input_file) {
        (Some(input), _) => vec![input.clone()],
        (None, Some(path)) => read_lines(path)?,
        (None, None) => Vec::new(),
    };
    let options = ParseOptions {
        policy: args.policy.into(),
        prune: !args.no_prune,
        memo: !args.no_memo,
        max_trees: args.grammar.max_trees,
    };
    for input in &inputs {
        let (outcome, millis) = timed_parse(&grammar, &start, input, options)?;
        let mut rec = record(input, &options, &outcome, millis);
        rec.derivations = outcome
            .trees
            .iter()
            .map(|t| t.render(&grammar, &outcome.tokens))
            .collect();
        rec.error_spans = outcome
            .error_spans
            .iter()
            .map(|spans| {
                spans
                    .iter()
                    .map(|s| SpanRecord {
                        nonterminal: s.nonterminal.clone(),
                        char_start: s.char_start,
                        char_end: s.char_end,
                        excerpt: s.excerpt.clone(),
                        cost: s.cost,
                    })
                    .collect()
            })
            .collect();
        match args.grammar.format {
            Format::JsonLines => write_json(out, &rec)?,
            Format::Text => {
                writeln!(out, "input: {input}")?;
                let more = if outcome.overflow {
                    " (more exist)"
                } else {
                    ""
                };
                writeln!(out, "cost: {}", rec.cost)?;
                writeln!(out, "trees: {}{more}", rec.trees)?;
                for (i, (tree, spans)) in rec.derivations.iter().zip(&rec.error_spans).enumerate() {
                    writeln!(out, "tree {}: {tree}", i + 1)?;
                    for s in spans {
                        writeln!(
                            out,
                            "  error {} at chars {}..{}: {:?} ({} chars)",
                            s.nonterminal, s.char_start, s.char_end, s.excerpt, s.cost
                        )?;
                    }
                }
                writeln!(
                    out,
                    "stats: {} calls, {} cuts, {} memo hits, {:.2} ms",
                    rec.calls, rec.cuts, rec.memo_hits, rec.millis
                )?;
            }
        }
    }
    Ok(true)
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let grammar = load_grammar(&args.grammar.grammar)?;
    let start = start_symbol(&grammar, &args.grammar);
    let mut inputs = args.input.clone();
    if let Some(path) = &args.input_file {
        inputs.extend(read_lines(path)?);
    }
    if inputs.is_empty() {
        inputs = BENCH_INPUTS.iter().map(|(s, _)| s.to_string()).collect();
    }
    let mut ok = true;
    for input in &inputs {
        let mut records = Vec::new();
        for policy in [Policy::FirstMinimal, Policy::AllMinimals] {
            for memo in [false, true] {
                for prune in [false, true] {
                    let options = ParseOptions {
                        policy,
                        prune,
                        memo,
                        max_trees: args.grammar.max_trees,
                    };
                    let (outcome, millis) = timed_parse(&grammar, &start, input, options)?;
                    records.push(record(input, &options, &outcome, millis));
                }
            }
        }
        let agree = records.iter().all(|r| r.cost == records[0].cost);
        ok &= agree;
        match args.grammar.format {
            Format::JsonLines => {
                for r in &records {
                    write_json(out, r)?;
                }
            }
            Format::Text => {
                writeln!(out, "input: {input}")?;
                writeln!(
                    out,
                    "  {:<6} {:<6} {:<6} {:>6} {:>10} {:>10} {:>8} {:>10} {:>10}",
                    "policy",
                    "prune",
                    "memo",
                    "cost",
                    "calls",
                    "reduction",
                    "cuts",
                    "memo hits",
                    "ms"
                )?;
                for r in &records {
                    let exhaustive = records
                        .iter()
                        .find(|e| e.policy == r.policy && !e.prune && !e.memo)
                        .map_or(r.calls, |e| e.calls);
                    let reduction = 100.0 * (1.0 - r.calls as f64 / exhaustive.max(1) as f64);
                    writeln!(
                        out,
                        "  {:<6} {:<6} {:<6} {:>6} {:>10} {:>9.1}% {:>8} {:>10} {:>10.2}",
                        r.policy,
                        r.prune,
                        r.memo,
                        r.cost,
                        r.calls,
                        reduction,
                        r.cuts,
                        r.memo_hits,
                        r.millis
                    )?;
                }
                if let Some((_, reference)) = BENCH_INPUTS.iter().find(|(s, _)| s == input) {
                    writeln!(
                        out,
                        "  reference calls: exhaustive {}, pruned fm {}, pruned am {}, memo {}, memo + prune {}",
                        reference[0], reference[1], reference[2], reference[3], reference[4]
                    )?;
                }
                if !agree {
                    writeln!(out, "  FAIL: costs differ across options")?;
                }
            }
        }
    }
    Ok(ok)
}

fn law_records<V: std::fmt::Debug>(algebra: &str, report: &LawReport<V>) -> Vec<LawRecord> {
    report
        .checks
        .iter()
        .map(|c| LawRecord {
            algebra: algebra.to_string(),
            law: c.law.to_string(),
            checked: c.checked,
            passed: c.holds(),
            counterexample: c.counterexample.as_ref().map(|x| format!("{x:?}")),
        })
        .collect()
}

fn suite<A>(alg: &A, rng: &mut ChaCha8Rng, n: usize, dual: bool) -> LawReport<A::Value>
where
    A: TropicalAlgebra,
    A::Value: RandomValue,
{
    let triples: Vec<(A::Value, A::Value, A::Value)> = random_triples(rng, n);
    let quads: Vec<Quadruple<A::Value>> = random_quadruples(rng, n);
    let singles: Vec<A::Value> = triples.iter().map(|t| t.0.clone()).collect();
    let mut report = check_laws(alg, &triples)
        .merge(check_rationality(alg, &triples))
        .merge(check_insertion(alg, &quads))
        .merge(check_neutrals(alg, &singles));
    if dual {
        report = report.merge(check_dual_rationality(alg, &triples));
    }
    report
}

pub fn cmd_laws(args: &SuiteArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let n = args.count.unwrap_or(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut records = law_records("min-plus", &suite(&MinPlus, &mut rng, n, false));
    records.extend(law_records("min-max", &suite(&MinMax, &mut rng, n, true)));
    records.extend(law_records(
        "path-min-plus",
        &suite(&PathMinPlus, &mut rng, n, false),
    ));
    for r in &records {
        match args.format {
            Format::JsonLines => write_json(out, r)?,
            Format::Text => {
                let status = if r.passed { "ok" } else { "FAIL" };
                write!(
                    out,
                    "{:<14} {:<28} {:>6} samples  {status}",
                    r.algebra, r.law, r.checked
                )?;
                if let Some(c) = &r.counterexample {
                    write!(out, "  counterexample {c}")?;
                }
                writeln!(out)?;
            }
        }
    }
    let ok = records.iter().all(|r| r.passed);
    if args.format == Format::Text && !ok {
        writeln!(out, "rerun with --seed {} to reproduce", args.seed)?;
    }
    Ok(ok)
}

/// A pruned evaluator under test: maps a game to its claimed root value.
pub type PrunedEval<'a> = dyn Fn(&TreeGame<MinPlus>, NodeId) -> Cost + 'a;

pub fn cmd_oracle(args: &SuiteArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let pruned = |g: &TreeGame<MinPlus>, root: NodeId| {
        eval_tropical(g, &root, None)
            .map(|r| r.value)
            .unwrap_or(Cost::Infinite)
    };
    cmd_oracle_with(args, out, &pruned)
}

/// The oracle suite with an injectable pruned evaluator.
pub fn cmd_oracle_with(
    args: &SuiteArgs,
    out: &mut dyn Write,
    pruned: &PrunedEval<'_>,
) -> Result<bool, CliError> {
    let games = args.count.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let config = RandomTreeConfig::new(args.depth, args.branching)
        .with_turns(TurnPattern::Alternate(Turn::Player));
    let root = TreeGame::<MinPlus>::ROOT;
    let mut failures = Vec::new();
    for game in 0..games {
        let g = random_tree(MinPlus, &config, &mut rng, |r| {
            Cost::Finite(r.gen_range(0..=20))
        });
        let exhaustive = eval_exhaustive(&g, &root)
            .map(|r| r.value.to_string())
            .unwrap_or_else(|e| e.to_string());
        let pruned = pruned(&g, root).to_string();
        let small_step = normalize(&g, &Term::Position(root), &RuleSet::BASE, args.budget)
            .map(|v| v.to_string())
            .unwrap_or_else(|e| e.to_string());
        if exhaustive != pruned || exhaustive != small_step {
            failures.push(OracleFailure {
                game,
                term: g.to_term::<u32>(root).to_string(),
                exhaustive,
                pruned,
                small_step,
            });
        }
    }
    let rec = OracleRecord {
        seed: args.seed,
        games,
        passed: failures.is_empty(),
        failures,
    };
    match args.format {
        Format::JsonLines => write_json(out, &rec)?,
        Format::Text => {
            for f in &rec.failures {
                writeln!(
                    out,
                    "game {}: {}\n  exhaustive {}, pruned {}, small-step {}",
                    f.game, f.term, f.exhaustive, f.pruned, f.small_step
                )?;
            }
            if rec.passed {
                writeln!(
                    out,
                    "{games} games from seed {}: exhaustive = pruned = small-step",
                    rec.seed
                )?;
            } else {
                writeln!(
                    out,
                    "{} of {games} games disagree; rerun with --seed {}",
                    rec.failures.len(),
                    rec.seed
                )?;
            }
        }
    }
    Ok(rec.passed)
}

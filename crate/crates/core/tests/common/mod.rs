//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use tropical::arena::{random_tree, NodeId, RandomTreeConfig, TreeGame, TurnPattern};
use tropical::parsegame::{Grammar, ParseTree, Symbol, TokenKind, TokenString};
use tropical::{Cost, ExtInt, MinMax, MinPlus};

pub const ROOT: NodeId = NodeId(0);

/// The inputs used for the call-count comparisons, with the reference
/// counts (FM pruned, AM pruned, exhaustive, memo + prune, memo only).
pub const CANONICAL: [(&str, [u64; 5]); 3] = [
    (
        "let x = 42 in x + if 84=42 then 55 else 77",
        [460, 671, 28473, 131, 7295],
    ),
    (
        "let x = 84 = 42 = 21 in 1 + 2 * 3",
        [260, 2148, 61980, 72, 14443],
    ),
    (
        "if if if true then true else false then 10 else (1+(2+)+3)",
        [9640, 13820, 494344, 1206, 36575],
    ),
];

pub fn min_plus_game<R: Rng>(
    rng: &mut R,
    depth: usize,
    branching: usize,
    turns: TurnPattern,
) -> TreeGame<MinPlus> {
    let config = RandomTreeConfig::new(depth, branching).with_turns(turns);
    random_tree(MinPlus, &config, rng, |r| Cost::Finite(r.gen_range(0..=20)))
}

pub fn min_max_game<R: Rng>(
    rng: &mut R,
    depth: usize,
    branching: usize,
    turns: TurnPattern,
) -> TreeGame<MinMax> {
    let config = RandomTreeConfig::new(depth, branching).with_turns(turns);
    random_tree(MinMax, &config, rng, |r| {
        ExtInt::Finite(r.gen_range(0..=20))
    })
}

/// Random token sequences over the expression grammar's vocabulary.
pub fn random_expr_input<R: Rng>(rng: &mut R, max_tokens: usize) -> String {
    const WORDS: [&str; 13] = [
        "1", "2", "x", "+", "*", "=", "(", ")", "let", "in", "if", "then", "else",
    ];
    let n = rng.gen_range(1..=max_tokens);
    (0..n)
        .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

fn matches(tokens: &TokenString, at: usize, sym: &Symbol) -> bool {
    let t = &tokens.tokens[at];
    match sym {
        Symbol::Literal(l) => t.kind == TokenKind::Literal && t.text == *l,
        Symbol::Num => t.kind == TokenKind::Num,
        Symbol::Ident => t.kind == TokenKind::Ident,
        Symbol::Nonterminal(_) => false,
    }
}

/// Minimum-cost derivations by direct enumeration: every way of cutting a
/// span into one consecutive piece per right-hand-side symbol, terminals
/// taking exactly one matching token. A span with no such cut for any
/// production is left unmatched and costs its non-blank size.
pub struct BruteForce<'a> {
    grammar: &'a Grammar,
    tokens: &'a TokenString,
    table: HashMap<(usize, usize, usize), (u64, BTreeSet<ParseTree>)>,
}

impl<'a> BruteForce<'a> {
    pub fn new(grammar: &'a Grammar, tokens: &'a TokenString) -> Self {
        BruteForce {
            grammar,
            tokens,
            table: HashMap::new(),
        }
    }

    pub fn solve(&mut self, start: usize, end: usize, nt: usize) -> (u64, BTreeSet<ParseTree>) {
        if let Some(hit) = self.table.get(&(start, end, nt)) {
            return hit.clone();
        }
        let mut best: Option<(u64, BTreeSet<ParseTree>)> = None;
        let productions: Vec<(usize, Vec<Symbol>)> = self
            .grammar
            .productions()
            .iter()
            .enumerate()
            .filter(|(_, p)| p.lhs == nt)
            .map(|(i, p)| (i, p.rhs.clone()))
            .collect();
        for (index, rhs) in productions {
            let mut cuts = Vec::new();
            self.cuts(&rhs, start, end, &mut Vec::new(), &mut cuts);
            for pieces in cuts {
                let mut cost = 0;
                let mut child_sets = Vec::new();
                for (sym, &(s, e)) in rhs.iter().zip(&pieces) {
                    if let Symbol::Nonterminal(x) = sym {
                        let (c, trees) = self.solve(s, e, *x);
                        cost += c;
                        child_sets.push(trees);
                    }
                }
                let mut combos: Vec<Vec<ParseTree>> = vec![Vec::new()];
                for set in &child_sets {
                    combos = combos
                        .iter()
                        .flat_map(|prefix| {
                            set.iter().map(move |t| {
                                let mut v = prefix.clone();
                                v.push(t.clone());
                                v
                            })
                        })
                        .collect();
                }
                let trees: BTreeSet<ParseTree> = combos
                    .into_iter()
                    .map(|children| ParseTree::Node {
                        production: index,
                        start,
                        end,
                        children,
                    })
                    .collect();
                best = match best {
                    None => Some((cost, trees)),
                    Some((b, _)) if cost < b => Some((cost, trees)),
                    Some((b, mut set)) if cost == b => {
                        set.extend(trees);
                        Some((b, set))
                    }
                    keep => keep,
                };
            }
        }
        let result = best.unwrap_or_else(|| {
            (
                self.tokens.nonblank_size(start, end),
                BTreeSet::from([ParseTree::Unmatched { nt, start, end }]),
            )
        });
        self.table.insert((start, end, nt), result.clone());
        result
    }

    fn cuts(
        &self,
        rhs: &[Symbol],
        at: usize,
        end: usize,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some((sym, rest)) = rhs.split_first() else {
            if at == end {
                out.push(current.clone());
            }
            return;
        };
        if sym.is_terminal() {
            if at < end && matches(self.tokens, at, sym) {
                current.push((at, at + 1));
                self.cuts(rest, at + 1, end, current, out);
                current.pop();
            }
        } else {
            for stop in at..=end {
                current.push((at, stop));
                self.cuts(rest, stop, end, current, out);
                current.pop();
            }
        }
    }
}

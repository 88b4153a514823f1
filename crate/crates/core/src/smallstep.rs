//! Small-step rewrite semantics of games, used as an evaluation oracle.
//!
//! A [`Term`] is a partially evaluated game tree: unexpanded positions,
//! computed values, and player (`P[...]`) or opponent (`O[...]`) nodes over
//! non-empty term sequences. Rules:
//!
//! | rule      | rewrite                                                     |
//! |-----------|-------------------------------------------------------------|
//! | Payoff    | terminal `π` → `p(π)`                                        |
//! | P-expand  | player `π` → `P[succ(π)]`                                    |
//! | O-expand  | opponent `π` → `O[succ(π)]`                                  |
//! | P-reduce  | `P[.. v1 v2 ..]` → `P[.. v1⊕v2 ..]`                          |
//! | O-reduce  | `O[.. v1 v2 ..]` → `O[.. v1⊗v2 ..]`                          |
//! | Return    | `P[v]`, `O[v]` → `v`                                        |
//! | P-will    | `P[α O[β P[ts..] ..] ..]` → `P[α O[β P[α ts..] ..] ..]`       |
//! | O-will    | `O[β P[α O[ts..] ..] ..]` → `O[β P[α O[β ts..] ..] ..]`       |
//! | P-cut     | `P[α O[β ..] ts..]` → `P[α ts..]` when `α⊕β = α`             |
//! | O-cut     | `O[β P[α ..] ts..]` → `O[β ts..]` when `β⊗α = β`             |
//!
//! Every rule also applies inside any context.
//!
//! Text form: `P[ O[ 2 3 ] O[ 1 9 ] ]`. Values are written with their
//! `Display`/`FromStr` form, unexpanded positions as `@` followed by the
//! position's text, and node elements are separated by whitespace.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::TropicalAlgebra;
use crate::arena::{Game, Turn, Value};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term<P, V> {
    Position(P),
    Value(V),
    Player(Vec<Term<P, V>>),
    Opponent(Vec<Term<P, V>>),
}

impl<P, V> Term<P, V> {
    pub fn as_value(&self) -> Option<&V> {
        match self {
            Term::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Term::Value(_))
    }

    /// Number of constructors in the term.
    pub fn size(&self) -> usize {
        match self {
            Term::Position(_) | Term::Value(_) => 1,
            Term::Player(ts) | Term::Opponent(ts) => 1 + ts.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn children(&self) -> &[Term<P, V>] {
        match self {
            Term::Player(ts) | Term::Opponent(ts) => ts,
            _ => &[],
        }
    }

    /// The subterm at `path`, a sequence of child indices.
    pub fn subterm(&self, path: &[usize]) -> Option<&Term<P, V>> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.children().get(*i)?.subterm(rest),
        }
    }

    /// Replaces the subterm at `path`.
    pub fn replace(&self, path: &[usize], with: Term<P, V>) -> Option<Term<P, V>>
    where
        P: Clone,
        V: Clone,
    {
        match path.split_first() {
            None => Some(with),
            Some((i, rest)) => {
                let (mut ts, player) = match self {
                    Term::Player(ts) => (ts.clone(), true),
                    Term::Opponent(ts) => (ts.clone(), false),
                    _ => return None,
                };
                let child = ts.get(*i)?.replace(rest, with)?;
                ts[*i] = child;
                Some(if player {
                    Term::Player(ts)
                } else {
                    Term::Opponent(ts)
                })
            }
        }
    }

    /// Paths of every subterm, in pre-order.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        fn walk<P, V>(t: &Term<P, V>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            out.push(prefix.clone());
            for (i, c) in t.children().iter().enumerate() {
                prefix.push(i);
                walk(c, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }
}

impl<P: fmt::Display, V: fmt::Display> fmt::Display for Term<P, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Position(p) => write!(f, "@{p}"),
            Term::Value(v) => write!(f, "{v}"),
            Term::Player(ts) | Term::Opponent(ts) => {
                f.write_str(if matches!(self, Term::Player(_)) {
                    "P["
                } else {
                    "O["
                })?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                f.write_str(" ]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermParseError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected `{found}` at byte {offset}")]
    Unexpected { offset: usize, found: String },
    #[error("empty node at byte {offset}")]
    EmptyNode { offset: usize },
    #[error("invalid value `{text}` at byte {offset}")]
    BadValue { offset: usize, text: String },
    #[error("invalid position `{text}` at byte {offset}")]
    BadPosition { offset: usize, text: String },
    #[error("trailing input at byte {offset}")]
    Trailing { offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lexeme<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn lex(text: &str) -> Vec<(usize, Lexeme<'_>)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        let delimiter = c.is_whitespace() || c == '[' || c == ']';
        if delimiter {
            if let Some(s) = start.take() {
                out.push((s, Lexeme::Word(&text[s..i])));
            }
            match c {
                '[' => out.push((i, Lexeme::Open)),
                ']' => out.push((i, Lexeme::Close)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, Lexeme::Word(&text[s..])));
    }
    out
}

struct TermParser<'a> {
    lexemes: Vec<(usize, Lexeme<'a>)>,
    at: usize,
}

impl<'a> TermParser<'a> {
    fn term<P: FromStr, V: FromStr>(&mut self, depth: usize) -> Result<Term<P, V>, TermParseError> {
        let (offset, lexeme) = *self
            .lexemes
            .get(self.at)
            .ok_or(TermParseError::UnexpectedEnd)?;
        self.at += 1;
        // Deeply nested input would otherwise overflow the stack.
        if depth > 512 {
            return Err(TermParseError::Unexpected {
                offset,
                found: "nesting deeper than 512".into(),
            });
        }
        match lexeme {
            Lexeme::Word(w @ ("P" | "O"))
                if matches!(self.lexemes.get(self.at), Some((_, Lexeme::Open))) =>
            {
                self.at += 1;
                let mut ts = Vec::new();
                loop {
                    match self.lexemes.get(self.at) {
                        None => return Err(TermParseError::UnexpectedEnd),
                        Some((_, Lexeme::Close)) => {
                            self.at += 1;
                            break;
                        }
                        Some(_) => ts.push(self.term(depth + 1)?),
                    }
                }
                if ts.is_empty() {
                    return Err(TermParseError::EmptyNode { offset });
                }
                Ok(if w == "P" {
                    Term::Player(ts)
                } else {
                    Term::Opponent(ts)
                })
            }
            Lexeme::Word(w) if w.starts_with('@') => {
                w[1..]
                    .parse()
                    .map(Term::Position)
                    .map_err(|_| TermParseError::BadPosition {
                        offset,
                        text: w.to_string(),
                    })
            }
            Lexeme::Word(w) => w
                .parse()
                .map(Term::Value)
                .map_err(|_| TermParseError::BadValue {
                    offset,
                    text: w.to_string(),
                }),
            Lexeme::Open => Err(TermParseError::Unexpected {
                offset,
                found: "[".into(),
            }),
            Lexeme::Close => Err(TermParseError::Unexpected {
                offset,
                found: "]".into(),
            }),
        }
    }
}

impl<P: FromStr, V: FromStr> FromStr for Term<P, V> {
    type Err = TermParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = TermParser {
            lexemes: lex(s),
            at: 0,
        };
        let term = parser.term(0)?;
        if let Some((offset, _)) = parser.lexemes.get(parser.at) {
            return Err(TermParseError::Trailing { offset: *offset });
        }
        Ok(term)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Payoff,
    PExpand,
    OExpand,
    PReduce,
    OReduce,
    Return,
    PWill,
    OWill,
    PCut,
    OCut,
}

/// Which rules are enabled. Contextual application is always on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleSet {
    pub payoff: bool,
    pub p_expand: bool,
    pub o_expand: bool,
    pub p_reduce: bool,
    pub o_reduce: bool,
    pub ret: bool,
    pub p_will: bool,
    pub p_cut: bool,
    pub o_will: bool,
    pub o_cut: bool,
}

impl RuleSet {
    /// The seven evaluation rules, no pruning.
    pub const BASE: RuleSet = RuleSet {
        payoff: true,
        p_expand: true,
        o_expand: true,
        p_reduce: true,
        o_reduce: true,
        ret: true,
        p_will: false,
        p_cut: false,
        o_will: false,
        o_cut: false,
    };

    /// Base rules plus player-side pruning: tropical α-pruning.
    pub const TROPICAL: RuleSet = RuleSet {
        p_will: true,
        p_cut: true,
        ..RuleSet::BASE
    };

    /// Base rules plus pruning on both sides: α-β.
    pub const ALPHA_BETA: RuleSet = RuleSet {
        p_will: true,
        p_cut: true,
        o_will: true,
        o_cut: true,
        ..RuleSet::BASE
    };

    pub fn enables(&self, rule: Rule) -> bool {
        match rule {
            Rule::Payoff => self.payoff,
            Rule::PExpand => self.p_expand,
            Rule::OExpand => self.o_expand,
            Rule::PReduce => self.p_reduce,
            Rule::OReduce => self.o_reduce,
            Rule::Return => self.ret,
            Rule::PWill => self.p_will,
            Rule::PCut => self.p_cut,
            Rule::OWill => self.o_will,
            Rule::OCut => self.o_cut,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("payoff undefined at terminal position {0}")]
    PayoffUndefined(String),
    #[error("opponent-side pruning rules need a bi-tropical algebra")]
    NotBiTropical,
    #[error("player-side pruning rules need a rational algebra")]
    NotRational,
    #[error("no normal form within {0} steps")]
    BudgetExceeded(usize),
    #[error("no enabled rule applies to {0}")]
    Stuck(String),
}

type GTerm<G> = Term<<G as crate::arena::Arena>::Position, Value<G>>;

fn validate<G: Game>(game: &G, rules: &RuleSet) -> Result<(), RewriteError> {
    if (rules.o_will || rules.o_cut) && !game.algebra().is_bi_tropical() {
        return Err(RewriteError::NotBiTropical);
    }
    if (rules.p_will || rules.p_cut) && !game.algebra().is_rational() {
        return Err(RewriteError::NotRational);
    }
    Ok(())
}

fn with_kind<P, V>(player: bool, ts: Vec<Term<P, V>>) -> Term<P, V> {
    if player {
        Term::Player(ts)
    } else {
        Term::Opponent(ts)
    }
}

/// Rewrites that apply at the root of `term` itself, in a fixed order:
/// Payoff/expand, Return, reduces left to right, will, cut.
fn root_reducts<G: Game>(
    game: &G,
    rules: &RuleSet,
    term: &GTerm<G>,
) -> Result<Vec<(Rule, GTerm<G>)>, RewriteError> {
    let alg = game.algebra();
    let mut out = Vec::new();
    match term {
        Term::Value(_) => {}
        Term::Position(p) => {
            let succ = game.successors(p);
            if succ.is_empty() {
                if rules.payoff {
                    let v = game
                        .payoff(p)
                        .ok_or_else(|| RewriteError::PayoffUndefined(format!("{p:?}")))?;
                    out.push((Rule::Payoff, Term::Value(v)));
                }
            } else {
                let ts = succ.into_iter().map(Term::Position).collect();
                match game.turn(p) {
                    Turn::Player if rules.p_expand => out.push((Rule::PExpand, Term::Player(ts))),
                    Turn::Opponent if rules.o_expand => {
                        out.push((Rule::OExpand, Term::Opponent(ts)))
                    }
                    _ => {}
                }
            }
        }
        Term::Player(ts) | Term::Opponent(ts) => {
            let player = matches!(term, Term::Player(_));
            if rules.ret && ts.len() == 1 {
                if let Term::Value(v) = &ts[0] {
                    out.push((Rule::Return, Term::Value(v.clone())));
                }
            }
            let (reduce, enabled) = if player {
                (Rule::PReduce, rules.p_reduce)
            } else {
                (Rule::OReduce, rules.o_reduce)
            };
            if enabled {
                for i in 0..ts.len().saturating_sub(1) {
                    if let (Term::Value(a), Term::Value(b)) = (&ts[i], &ts[i + 1]) {
                        let v = if player {
                            alg.oplus(a, b)
                        } else {
                            alg.otimes(a, b)
                        };
                        let mut next = ts.clone();
                        next.splice(i..i + 2, [Term::Value(v)]);
                        out.push((reduce, with_kind(player, next)));
                    }
                }
            }
            if let Some(t) = will(game, rules, term) {
                out.push((if player { Rule::PWill } else { Rule::OWill }, t));
            }
            if let Some(t) = cut(game, rules, term) {
                out.push((if player { Rule::PCut } else { Rule::OCut }, t));
            }
        }
    }
    Ok(out)
}

/// The will rule at the root of `term`: hand the grandparent's accumulator to
/// the front of the grandchild `P[α O[β X[..] ..] ..]` (X the same kind as
/// the root).
fn will<G: Game>(game: &G, rules: &RuleSet, term: &GTerm<G>) -> Option<GTerm<G>> {
    let _ = game;
    let (player, ts) = match term {
        Term::Player(ts) if rules.p_will => (true, ts),
        Term::Opponent(ts) if rules.o_will => (false, ts),
        _ => return None,
    };
    let acc = ts.first()?.as_value()?;
    let middle = match (player, ts.get(1)?) {
        (true, Term::Opponent(ms)) | (false, Term::Player(ms)) => ms,
        _ => return None,
    };
    middle.first()?.as_value()?;
    let grand = match (player, middle.get(1)?) {
        (true, Term::Player(gs)) | (false, Term::Opponent(gs)) => gs,
        _ => return None,
    };
    let mut new_grand = Vec::with_capacity(grand.len() + 1);
    new_grand.push(Term::Value(acc.clone()));
    new_grand.extend(grand.iter().cloned());
    let mut new_middle = middle.clone();
    new_middle[1] = with_kind(player, new_grand);
    let mut new_ts = ts.clone();
    new_ts[1] = with_kind(!player, new_middle);
    Some(with_kind(player, new_ts))
}

/// The cut rule at the root of `term`: `P[α O[β ..] ts..]` → `P[α ts..]`
/// when `α ⊕ β = α`, and dually.
fn cut<G: Game>(game: &G, rules: &RuleSet, term: &GTerm<G>) -> Option<GTerm<G>> {
    let alg = game.algebra();
    let (player, ts) = match term {
        Term::Player(ts) if rules.p_cut => (true, ts),
        Term::Opponent(ts) if rules.o_cut => (false, ts),
        _ => return None,
    };
    let acc = ts.first()?.as_value()?;
    let middle = match (player, ts.get(1)?) {
        (true, Term::Opponent(ms)) | (false, Term::Player(ms)) => ms,
        _ => return None,
    };
    let inner = middle.first()?.as_value()?;
    let fires = if player {
        alg.oplus(acc, inner) == *acc
    } else {
        alg.otimes(inner, acc) == *acc
    };
    if !fires {
        return None;
    }
    let mut new_ts = Vec::with_capacity(ts.len() - 1);
    new_ts.push(Term::Value(acc.clone()));
    new_ts.extend(ts[2..].iter().cloned());
    Some(with_kind(player, new_ts))
}

fn collect_reducts<G: Game>(
    game: &G,
    rules: &RuleSet,
    term: &GTerm<G>,
    out: &mut Vec<(Rule, GTerm<G>)>,
) -> Result<(), RewriteError> {
    out.extend(root_reducts(game, rules, term)?);
    if let Term::Player(ts) | Term::Opponent(ts) = term {
        let player = matches!(term, Term::Player(_));
        for (i, child) in ts.iter().enumerate() {
            let mut inner = Vec::new();
            collect_reducts(game, rules, child, &mut inner)?;
            for (rule, reduct) in inner {
                let mut next = ts.clone();
                next[i] = reduct;
                out.push((rule, with_kind(player, next)));
            }
        }
    }
    Ok(())
}

/// Every term reachable from `term` in exactly one rewrite, at any context,
/// tagged with the rule that produced it. Order: reducts at the root first,
/// then those inside each child from left to right.
pub fn step_with_rules<G: Game>(
    game: &G,
    term: &GTerm<G>,
    rules: &RuleSet,
) -> Result<Vec<(Rule, GTerm<G>)>, RewriteError> {
    validate(game, rules)?;
    let mut out = Vec::new();
    collect_reducts(game, rules, term, &mut out)?;
    Ok(out)
}

/// Every one-step reduct of `term`.
pub fn step<G: Game>(
    game: &G,
    term: &GTerm<G>,
    rules: &RuleSet,
) -> Result<Vec<GTerm<G>>, RewriteError> {
    Ok(step_with_rules(game, term, rules)?
        .into_iter()
        .map(|(_, t)| t)
        .collect())
}

/// Outcome of [`normalize_traced`].
#[derive(Clone, Debug)]
pub struct Normalized<V> {
    pub value: V,
    pub steps: usize,
    /// How many times each pruning rule fired.
    pub cuts: usize,
    pub wills: usize,
}

/// Reduces `term` to a value with a fixed strategy:
///
/// 1. the leftmost-outermost enabled cut, if any;
/// 2. otherwise the leftmost-outermost enabled will whose grandchild does not
///    already start with a value the accumulator cannot improve (this keeps
///    the will rules from firing forever on their own output);
/// 3. otherwise a base rule, found by descending into the leftmost child that
///    is not yet a value and folding completed value prefixes as soon as two
///    values lead a node.
///
/// With only the base rules this is an innermost, left-to-right evaluation.
pub fn normalize<G: Game>(
    game: &G,
    term: &GTerm<G>,
    rules: &RuleSet,
    budget: usize,
) -> Result<Value<G>, RewriteError> {
    normalize_traced(game, term, rules, budget).map(|n| n.value)
}

pub fn normalize_traced<G: Game>(
    game: &G,
    term: &GTerm<G>,
    rules: &RuleSet,
    budget: usize,
) -> Result<Normalized<Value<G>>, RewriteError> {
    validate(game, rules)?;
    let mut t = term.clone();
    let mut steps = 0;
    let mut cuts = 0;
    let mut wills = 0;
    loop {
        if let Term::Value(v) = t {
            return Ok(Normalized {
                value: v,
                steps,
                cuts,
                wills,
            });
        }
        if steps >= budget {
            return Err(RewriteError::BudgetExceeded(budget));
        }
        steps += 1;
        if (rules.p_cut || rules.o_cut) && fire_first(&mut t, &mut |n| cut(game, rules, n)) {
            cuts += 1;
            continue;
        }
        if (rules.p_will || rules.o_will)
            && fire_first(&mut t, &mut |n| useful_will(game, rules, n))
        {
            wills += 1;
            continue;
        }
        if !fire_base(game, rules, &mut t)? {
            return Err(RewriteError::Stuck(format!("{t:?}")));
        }
    }
}

fn useful_will<G: Game>(game: &G, rules: &RuleSet, term: &GTerm<G>) -> Option<GTerm<G>> {
    let alg = game.algebra();
    let player = matches!(term, Term::Player(_));
    let ts = term.children();
    let acc = ts.first()?.as_value()?;
    let grand_first = ts.get(1)?.children().get(1)?.children().first();
    if let Some(Term::Value(x)) = grand_first {
        let absorbed = if player {
            alg.oplus(acc, x) == *x
        } else {
            alg.otimes(acc, x) == *x
        };
        if absorbed {
            return None;
        }
    }
    will(game, rules, term)
}

type Rewrite<'a, P, V> = dyn FnMut(&Term<P, V>) -> Option<Term<P, V>> + 'a;

/// Pre-order search for the first subterm where `rewrite` applies.
fn fire_first<P: Clone, V: Clone>(term: &mut Term<P, V>, rewrite: &mut Rewrite<'_, P, V>) -> bool {
    if let Some(next) = rewrite(term) {
        *term = next;
        return true;
    }
    match term {
        Term::Player(ts) | Term::Opponent(ts) => ts.iter_mut().any(|c| fire_first(c, rewrite)),
        _ => false,
    }
}

fn fire_base<G: Game>(
    game: &G,
    rules: &RuleSet,
    term: &mut GTerm<G>,
) -> Result<bool, RewriteError> {
    let alg = game.algebra();
    match term {
        Term::Value(_) => Ok(false),
        Term::Position(_) => match root_reducts(game, rules, term)?.into_iter().next() {
            Some((_, next)) => {
                *term = next;
                Ok(true)
            }
            None => Ok(false),
        },
        Term::Player(_) | Term::Opponent(_) => {
            let player = matches!(term, Term::Player(_));
            let ts = match term {
                Term::Player(ts) | Term::Opponent(ts) => ts,
                _ => unreachable!(),
            };
            let reduce_on = if player {
                rules.p_reduce
            } else {
                rules.o_reduce
            };
            if reduce_on && ts.len() >= 2 {
                if let (Term::Value(a), Term::Value(b)) = (&ts[0], &ts[1]) {
                    let v = if player {
                        alg.oplus(a, b)
                    } else {
                        alg.otimes(a, b)
                    };
                    ts.splice(0..2, [Term::Value(v)]);
                    return Ok(true);
                }
            }
            if let Some(child) = ts.iter_mut().find(|c| !c.is_value()) {
                if fire_base(game, rules, child)? {
                    return Ok(true);
                }
            }
            if rules.ret && ts.len() == 1 {
                if let Term::Value(v) = &ts[0] {
                    let v = v.clone();
                    *term = Term::Value(v);
                    return Ok(true);
                }
            }
            // A later pair may still be reducible when the leading elements
            // are stuck.
            if reduce_on {
                if let Some(i) = (0..ts.len().saturating_sub(1))
                    .find(|&i| ts[i].is_value() && ts[i + 1].is_value())
                {
                    let (a, b) = (ts[i].as_value().unwrap(), ts[i + 1].as_value().unwrap());
                    let v = if player {
                        alg.oplus(a, b)
                    } else {
                        alg.otimes(a, b)
                    };
                    ts.splice(i..i + 2, [Term::Value(v)]);
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// The closed reduction graph of a term, or a prefix of it.
#[derive(Clone, Debug)]
pub struct ReductionGraph<T> {
    pub terms: Vec<T>,
    /// `(from, to)` indices into `terms`, one per distinct reduct.
    pub edges: Vec<(usize, usize)>,
    /// Indices of terms without reducts.
    pub normal_forms: Vec<usize>,
    /// The node budget ran out; `normal_forms` may be incomplete.
    pub truncated: bool,
}

impl<T> ReductionGraph<T> {
    pub fn normal_form_terms(&self) -> impl Iterator<Item = &T> {
        self.normal_forms.iter().map(|&i| &self.terms[i])
    }
}

/// Explores every reduction sequence from `term`, visiting at most `budget`
/// distinct terms.
pub fn reduction_graph<G: Game>(
    game: &G,
    term: &GTerm<G>,
    rules: &RuleSet,
    budget: usize,
) -> Result<ReductionGraph<GTerm<G>>, RewriteError> {
    validate(game, rules)?;
    let mut index: HashMap<GTerm<G>, usize> = HashMap::new();
    let mut terms = vec![term.clone()];
    index.insert(term.clone(), 0);
    let mut edges = Vec::new();
    let mut normal_forms = Vec::new();
    let mut truncated = false;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let reducts = step(game, &terms[i], rules)?;
        if reducts.is_empty() {
            normal_forms.push(i);
            continue;
        }
        for r in reducts {
            let j = match index.get(&r) {
                Some(&j) => j,
                None => {
                    if terms.len() >= budget {
                        truncated = true;
                        continue;
                    }
                    let j = terms.len();
                    index.insert(r.clone(), j);
                    terms.push(r);
                    queue.push_back(j);
                    j
                }
            };
            if !edges.contains(&(i, j)) {
                edges.push((i, j));
            }
        }
    }
    normal_forms.sort_unstable();
    Ok(ReductionGraph {
        terms,
        edges,
        normal_forms,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Cost, ExtInt, MinMax, MinPlus};
    use crate::arena::{NodeId, TreeGame};

    type T = Term<NodeId, Cost>;

    fn t(text: &str) -> T {
        text.parse().unwrap()
    }

    fn c(n: u64) -> Cost {
        Cost::Finite(n)
    }

    #[test]
    fn values_are_normal_forms() {
        let g = TreeGame::parse(MinPlus, "1").unwrap();
        assert!(step(&g, &t("3"), &RuleSet::BASE).unwrap().is_empty());
        let graph = reduction_graph(&g, &t("3"), &RuleSet::BASE, 10).unwrap();
        assert_eq!(graph.terms.len(), 1);
        assert_eq!(graph.normal_forms, vec![0]);
    }

    #[test]
    fn player_reduce_then_return() {
        let g = TreeGame::parse(MinPlus, "1").unwrap();
        let reducts = step_with_rules(&g, &t("P[ 3 5 ]"), &RuleSet::BASE).unwrap();
        assert_eq!(reducts, vec![(Rule::PReduce, t("P[ 3 ]"))]);
        assert_eq!(
            step(&g, &t("P[ 3 ]"), &RuleSet::BASE).unwrap(),
            vec![t("3")]
        );
    }

    #[test]
    fn player_cut_drops_the_opponent_subtree() {
        let g = TreeGame::parse(MinPlus, "P[ 1 2 ]").unwrap();
        let term = t("P[ 2 O[ 3 @1 ] 7 ]");
        let reducts = step_with_rules(&g, &term, &RuleSet::TROPICAL).unwrap();
        assert!(
            reducts.contains(&(Rule::PCut, t("P[ 2 7 ]"))),
            "{reducts:?}"
        );
        // 2 ⊕ 1 ≠ 2: no cut.
        let reducts = step_with_rules(&g, &t("P[ 2 O[ 1 @1 ] ]"), &RuleSet::TROPICAL).unwrap();
        assert!(reducts.iter().all(|(r, _)| *r != Rule::PCut));
    }

    #[test]
    fn player_will_copies_the_accumulator() {
        let g = TreeGame::parse(MinPlus, "P[ 1 2 3 4 ]").unwrap();
        let reducts = step_with_rules(&g, &t("P[ 2 O[ 1 P[ @4 ] ] ]"), &RuleSet::TROPICAL).unwrap();
        assert!(
            reducts.contains(&(Rule::PWill, t("P[ 2 O[ 1 P[ 2 @4 ] ] ]"))),
            "{reducts:?}"
        );
    }

    #[test]
    fn opponent_rules_need_bi_tropical_algebra() {
        let g = TreeGame::parse(MinPlus, "1").unwrap();
        assert_eq!(
            step(&g, &t("3"), &RuleSet::ALPHA_BETA),
            Err(RewriteError::NotBiTropical)
        );
        let mm = TreeGame::parse(MinMax, "P[ 1 2 ]").unwrap();
        let term: Term<NodeId, ExtInt> = "O[ 5 P[ 3 @1 ] 9 ]".parse().unwrap();
        let reducts = step_with_rules(&mm, &term, &RuleSet::ALPHA_BETA).unwrap();
        // max(5, 3) = 5: the opponent already has something better.
        let expected: Term<NodeId, ExtInt> = "O[ 5 9 ]".parse().unwrap();
        assert!(reducts.contains(&(Rule::OCut, expected)));
    }

    #[test]
    fn normalize_positions() {
        let g = TreeGame::parse(MinPlus, "7").unwrap();
        assert_eq!(
            normalize(&g, &Term::Position(NodeId(0)), &RuleSet::BASE, 10).unwrap(),
            c(7)
        );

        let g = TreeGame::parse(MinPlus, "P[ O[ 2 3 ] O[ 1 9 ] ]").unwrap();
        let root = Term::Position(TreeGame::<MinPlus>::ROOT);
        assert_eq!(normalize(&g, &root, &RuleSet::BASE, 100).unwrap(), c(5));
        assert_eq!(normalize(&g, &root, &RuleSet::TROPICAL, 100).unwrap(), c(5));
    }

    #[test]
    fn cuts_fire_during_normalization() {
        let g = TreeGame::parse(MinPlus, "P[ O[ 2 3 ] O[ 9 1 ] ]").unwrap();
        let root = Term::Position(TreeGame::<MinPlus>::ROOT);
        let n = normalize_traced(&g, &root, &RuleSet::TROPICAL, 100).unwrap();
        assert_eq!(n.value, c(5));
        assert_eq!(n.cuts, 1);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let g = TreeGame::parse(MinPlus, "P[ O[ 2 3 ] O[ 1 9 ] ]").unwrap();
        let root = Term::Position(TreeGame::<MinPlus>::ROOT);
        assert_eq!(
            normalize(&g, &root, &RuleSet::BASE, 3),
            Err(RewriteError::BudgetExceeded(3))
        );
    }

    #[test]
    fn undefined_payoff_is_reported() {
        let g = TreeGame::parse(MinPlus, "P[ 1 2 ]").unwrap();
        // Node 9 does not exist in the tree: it has no successors and no payoff.
        let err = step(&g, &Term::Position(NodeId(9)), &RuleSet::BASE);
        assert!(matches!(err, Err(RewriteError::PayoffUndefined(_))));
    }

    #[test]
    fn associativity_fork_converges() {
        let g = TreeGame::parse(MinPlus, "1").unwrap();
        let graph = reduction_graph(&g, &t("P[ 4 2 6 ]"), &RuleSet::BASE, 100).unwrap();
        assert!(!graph.truncated);
        let nfs: Vec<_> = graph.normal_form_terms().cloned().collect();
        assert_eq!(nfs, vec![t("2")]);
        // Both orders of the fork appear.
        assert!(graph.terms.contains(&t("P[ 2 6 ]")));
        assert!(graph.terms.contains(&t("P[ 4 2 ]")));
    }

    #[test]
    fn text_form() {
        let term = t("P[ O[ 2 3 ] @4 inf ]");
        assert_eq!(term.to_string(), "P[ O[ 2 3 ] @4 inf ]");
        assert_eq!(t("P[O[2 3]@4 inf]"), term);
        assert!(matches!(
            "P[ ]".parse::<T>(),
            Err(TermParseError::EmptyNode { .. })
        ));
        assert!(matches!(
            "P[ 1".parse::<T>(),
            Err(TermParseError::UnexpectedEnd)
        ));
        assert!(matches!(
            "1 2".parse::<T>(),
            Err(TermParseError::Trailing { offset: 2 })
        ));
        assert!(matches!(
            "x".parse::<T>(),
            Err(TermParseError::BadValue { .. })
        ));
        assert!(matches!(
            "@x".parse::<T>(),
            Err(TermParseError::BadPosition { .. })
        ));
        assert!(matches!(
            "]".parse::<T>(),
            Err(TermParseError::Unexpected { .. })
        ));
    }

    #[test]
    fn replace_and_subterm() {
        let term = t("P[ O[ 2 3 ] 4 ]");
        assert_eq!(term.subterm(&[0, 1]), Some(&t("3")));
        assert_eq!(term.replace(&[0], t("5")), Some(t("P[ 5 4 ]")));
        assert_eq!(term.paths().len(), term.size());
    }
}

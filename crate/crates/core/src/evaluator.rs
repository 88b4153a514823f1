//! Game evaluation: exhaustive folds, tropical α-pruning, α-β on
//! bi-tropical algebras, memoization and strategy extraction.
//!
//! All evaluators fold successors strictly left to right, so only
//! associativity of `⊕` and `⊗` is relied upon.
//!
//! # Pruned results
//!
//! A first-minimal (FM) pruned call with threshold `α` returns some `r` with
//! `α ⊕ r = α ⊕ e`, where `e` is the exact value. Every inexact return is a
//! lower bound: `r ⊕ e = r`.
//!
//! An all-minimals (AM) pruned call keeps ties alive: it returns `e` exactly
//! when `e ⊕ α = e`, and otherwise some lower bound of `e` that is strictly
//! worse than `α`. Opponent nodes therefore cut only on a strictly worse
//! partial product.
//!
//! # Memoization
//!
//! An FM player entry is exact if its fold started from `0̄` (or from its own
//! first child when the algebra has no `0̄`), or if the algebra is selective
//! and the result differs from the inherited `α`. An FM opponent entry is
//! exact if no cut fired and all children were exact. Inexact entries are
//! bounds `b` and answer a later query `α` only when `α ⊕ b = α`; since `b` is
//! a lower bound of the exact value, the exact value is then irrelevant to
//! `α` as well. AM entries are exact iff the result is no worse than the
//! threshold, and AM bounds answer only queries they are strictly worse than.
//!
//! # Counting
//!
//! `recursive_calls` counts every entry into an evaluation function,
//! terminal positions and memo hits included.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::TropicalAlgebra;
pub use crate::arena::Strategy;
use crate::arena::{Game, Turn, Value};

/// Instrumentation counters for one evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalStats {
    pub recursive_calls: u64,
    pub cuts: u64,
    pub memo_hits: u64,
    pub memo_entries: u64,
    pub expanded_positions: u64,
}

/// Strategy extraction policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Policy {
    /// One optimal strategy, choosing the earliest optimal successor.
    #[default]
    FirstMinimal,
    /// Every strategy that is optimal at each reachable player position.
    AllMinimals,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::FirstMinimal => "fm",
            Policy::AllMinimals => "am",
        })
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fm" => Ok(Policy::FirstMinimal),
            "am" => Ok(Policy::AllMinimals),
            _ => Err(format!("unknown policy `{s}` (expected fm or am)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Tropical α-pruning.
    pub prune: bool,
    pub memo: bool,
    pub policy: Policy,
    /// Maximum recursion depth; `None` for unbounded.
    pub max_depth: Option<usize>,
    /// Cap on the number of strategies kept under [`Policy::AllMinimals`].
    pub max_strategies: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            prune: false,
            memo: false,
            policy: Policy::FirstMinimal,
            max_depth: None,
            max_strategies: 64,
        }
    }
}

impl SearchOptions {
    pub fn exhaustive() -> Self {
        Self::default()
    }

    pub fn pruned() -> Self {
        SearchOptions {
            prune: true,
            ..Self::default()
        }
    }

    pub fn with_memo(mut self, memo: bool) -> Self {
        self.memo = memo;
        self
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = Some(depth);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("depth budget of {budget} exceeded along {}", path.join(" -> "))]
    DepthExceeded { budget: usize, path: Vec<String> },
    #[error("payoff undefined at terminal position {0}")]
    PayoffUndefined(String),
    #[error("tropical pruning needs a rational algebra")]
    NotRational,
    #[error("α-β pruning needs a bi-tropical algebra with both neutral elements")]
    NotBiTropical,
    #[error("strategy has no valid choice at player position {0}")]
    StrategyIncomplete(String),
}

#[derive(Clone, Debug)]
pub struct EvalResult<P: Eq + std::hash::Hash, V> {
    pub value: V,
    /// False only when a caller-supplied threshold made the value a bound.
    pub exact: bool,
    /// One strategy under FM, all optimal ones (up to the cap) under AM.
    pub strategies: Vec<Strategy<P>>,
    pub stats: EvalStats,
    /// The AM strategy cap was hit somewhere.
    pub overflow: bool,
}

/// FM's strategy.
pub fn extract_fm<P: Eq + std::hash::Hash, V>(result: &EvalResult<P, V>) -> Option<&Strategy<P>> {
    result.strategies.first()
}

/// AM's strategies.
pub fn extract_am<P: Eq + std::hash::Hash, V>(result: &EvalResult<P, V>) -> &[Strategy<P>] {
    &result.strategies
}

/// A strategy fragment below one position.
#[derive(Debug)]
enum Plan<P> {
    Leaf,
    Choose {
        pos: P,
        index: usize,
        next: Rc<Plan<P>>,
    },
    All(Vec<Rc<Plan<P>>>),
}

fn plan_into<P: Clone + Eq + std::hash::Hash>(plan: &Plan<P>, out: &mut Strategy<P>) {
    let mut stack = vec![plan];
    while let Some(p) = stack.pop() {
        match p {
            Plan::Leaf => {}
            Plan::Choose { pos, index, next } => {
                out.choose(pos.clone(), *index);
                stack.push(next);
            }
            Plan::All(children) => stack.extend(children.iter().map(|c| &**c)),
        }
    }
}

struct Outcome<G: Game> {
    value: Value<G>,
    exact: bool,
    plans: Vec<Rc<Plan<G::Position>>>,
}

impl<G: Game> Clone for Outcome<G> {
    fn clone(&self) -> Self {
        Outcome {
            value: self.value.clone(),
            exact: self.exact,
            plans: self.plans.clone(),
        }
    }
}

fn with_trail<P: fmt::Debug>(err: EvalError, pos: &P) -> EvalError {
    match err {
        EvalError::DepthExceeded { budget, mut path } => {
            path.push(format!("{pos:?}"));
            EvalError::DepthExceeded { budget, path }
        }
        e => e,
    }
}

fn finish_trail(err: EvalError) -> EvalError {
    match err {
        EvalError::DepthExceeded { budget, mut path } => {
            path.reverse();
            EvalError::DepthExceeded { budget, path }
        }
        e => e,
    }
}

/// A reusable evaluator. The memo table persists across [`Evaluator::evaluate`]
/// calls; statistics are per call.
pub struct Evaluator<'g, G: Game> {
    game: &'g G,
    options: SearchOptions,
    memo: HashMap<G::Position, Outcome<G>>,
    stats: EvalStats,
    overflow: bool,
}

impl<'g, G: Game> Evaluator<'g, G> {
    pub fn new(game: &'g G, options: SearchOptions) -> Self {
        Evaluator {
            game,
            options,
            memo: HashMap::new(),
            stats: EvalStats::default(),
            overflow: false,
        }
    }

    pub fn options(&self) -> &SearchOptions {
        &self.options
    }

    pub fn clear_memo(&mut self) {
        self.memo.clear();
    }

    /// The game value of `pos`, with the root threshold `0̄` when pruning.
    pub fn evaluate(
        &mut self,
        pos: &G::Position,
    ) -> Result<EvalResult<G::Position, Value<G>>, EvalError> {
        let alpha = if self.options.prune {
            self.game.algebra().zero()
        } else {
            None
        };
        self.evaluate_from(pos, alpha)
    }

    /// Like [`Evaluator::evaluate`] with an explicit player threshold. With
    /// pruning off the threshold is ignored. The result is exact when the
    /// threshold is `None` or `0̄`.
    pub fn evaluate_from(
        &mut self,
        pos: &G::Position,
        alpha: Option<Value<G>>,
    ) -> Result<EvalResult<G::Position, Value<G>>, EvalError> {
        let alg = self.game.algebra();
        if self.options.prune && !alg.is_rational() {
            return Err(EvalError::NotRational);
        }
        self.stats = EvalStats::default();
        self.overflow = false;
        let outcome = match (self.options.prune, self.options.policy) {
            (false, _) => self.exhaustive(pos, 0),
            (true, Policy::FirstMinimal) => self.fm(pos, alpha, 0),
            (true, Policy::AllMinimals) => self.am(pos, alpha, 0),
        }
        .map_err(finish_trail)?;
        self.result(pos, outcome)
    }

    fn result(
        &mut self,
        pos: &G::Position,
        outcome: Outcome<G>,
    ) -> Result<EvalResult<G::Position, Value<G>>, EvalError> {
        let mut stats = self.stats;
        stats.memo_entries = self.memo.len() as u64;
        let mut strategies = to_strategies(&outcome.plans);
        let mut overflow = self.overflow;
        if outcome.exact && strategies.is_empty() {
            // Pruned plans can be missing when the value is 0̄ itself; recover
            // them without touching the reported statistics.
            let options = SearchOptions {
                prune: false,
                memo: true,
                ..self.options
            };
            let mut fallback = Evaluator::new(self.game, options);
            let again = fallback.exhaustive(pos, 0).map_err(finish_trail)?;
            strategies = to_strategies(&again.plans);
            overflow |= fallback.overflow;
        }
        Ok(EvalResult {
            value: outcome.value,
            exact: outcome.exact,
            strategies,
            stats,
            overflow,
        })
    }

    fn cap(&self) -> usize {
        match self.options.policy {
            Policy::FirstMinimal => 1,
            Policy::AllMinimals => self.options.max_strategies.max(1),
        }
    }

    fn enter(&mut self, pos: &G::Position, depth: usize) -> Result<(), EvalError> {
        self.stats.recursive_calls += 1;
        match self.options.max_depth {
            Some(budget) if depth > budget => Err(EvalError::DepthExceeded {
                budget,
                path: vec![format!("{pos:?}")],
            }),
            _ => Ok(()),
        }
    }

    fn lookup(
        &mut self,
        pos: &G::Position,
        accept: impl Fn(&Outcome<G>) -> bool,
    ) -> Option<Outcome<G>> {
        if !self.options.memo || !self.game.memoizable(pos) {
            return None;
        }
        let hit = self.memo.get(pos).filter(|e| accept(e)).cloned();
        if hit.is_some() {
            self.stats.memo_hits += 1;
        }
        hit
    }

    fn store(&mut self, pos: &G::Position, out: &Outcome<G>) {
        if !self.options.memo || !self.game.memoizable(pos) {
            return;
        }
        match self.memo.get(pos) {
            Some(old) if old.exact && !out.exact => {}
            _ => {
                self.memo.insert(pos.clone(), out.clone());
            }
        }
    }

    fn terminal(&self, pos: &G::Position) -> Result<Outcome<G>, EvalError> {
        let value = self
            .game
            .payoff(pos)
            .ok_or_else(|| EvalError::PayoffUndefined(format!("{pos:?}")))?;
        Ok(Outcome {
            value,
            exact: true,
            plans: vec![Rc::new(Plan::Leaf)],
        })
    }

    fn choose(
        &mut self,
        pos: &G::Position,
        index: usize,
        plans: &[Rc<Plan<G::Position>>],
        into: &mut Vec<Rc<Plan<G::Position>>>,
    ) {
        for p in plans {
            if into.len() >= self.cap() {
                if self.options.policy == Policy::AllMinimals {
                    self.overflow = true;
                }
                return;
            }
            into.push(Rc::new(Plan::Choose {
                pos: pos.clone(),
                index,
                next: p.clone(),
            }));
        }
    }

    /// All combinations of one plan per child, capped.
    fn product(&mut self, sets: &[&[Rc<Plan<G::Position>>]]) -> Vec<Rc<Plan<G::Position>>> {
        let cap = self.cap();
        let mut acc: Vec<Vec<Rc<Plan<G::Position>>>> = vec![Vec::new()];
        for set in sets {
            if set.is_empty() {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(acc.len().saturating_mul(set.len()).min(cap));
            'outer: for prefix in &acc {
                for p in set.iter() {
                    if next.len() >= cap {
                        if self.options.policy == Policy::AllMinimals {
                            self.overflow = true;
                        }
                        break 'outer;
                    }
                    let mut q = prefix.clone();
                    q.push(p.clone());
                    next.push(q);
                }
            }
            acc = next;
        }
        acc.into_iter()
            .map(|children| Rc::new(Plan::All(children)))
            .collect()
    }

    fn exhaustive(&mut self, pos: &G::Position, depth: usize) -> Result<Outcome<G>, EvalError> {
        self.enter(pos, depth)?;
        if let Some(hit) = self.lookup(pos, |e| e.exact) {
            return Ok(hit);
        }
        let succ = self.game.successors(pos);
        let out = if succ.is_empty() {
            self.terminal(pos)?
        } else {
            self.stats.expanded_positions += 1;
            let mut results = Vec::with_capacity(succ.len());
            for c in &succ {
                results.push(
                    self.exhaustive(c, depth + 1)
                        .map_err(|e| with_trail(e, pos))?,
                );
            }
            let alg = self.game.algebra();
            match self.game.turn(pos) {
                Turn::Player => {
                    let mut v = results[0].value.clone();
                    for r in &results[1..] {
                        v = alg.oplus(&v, &r.value);
                    }
                    let mut attaining: Vec<usize> = (0..results.len())
                        .filter(|&i| results[i].value == v)
                        .collect();
                    if attaining.is_empty() {
                        attaining.push(0);
                    }
                    if self.options.policy == Policy::FirstMinimal {
                        attaining.truncate(1);
                    }
                    let mut plans = Vec::new();
                    for i in attaining {
                        self.choose(pos, i, &results[i].plans, &mut plans);
                    }
                    Outcome {
                        value: v,
                        exact: true,
                        plans,
                    }
                }
                Turn::Opponent => {
                    let mut v = results[0].value.clone();
                    for r in &results[1..] {
                        v = alg.otimes(&v, &r.value);
                    }
                    let sets: Vec<&[Rc<Plan<G::Position>>]> =
                        results.iter().map(|r| &r.plans[..]).collect();
                    let plans = self.product(&sets);
                    Outcome {
                        value: v,
                        exact: true,
                        plans,
                    }
                }
            }
        };
        self.store(pos, &out);
        Ok(out)
    }

    /// Tropical α-pruning, first-minimal.
    fn fm(
        &mut self,
        pos: &G::Position,
        alpha: Option<Value<G>>,
        depth: usize,
    ) -> Result<Outcome<G>, EvalError> {
        self.enter(pos, depth)?;
        let game = self.game;
        let alg = game.algebra();
        if let Some(hit) = self.lookup(pos, |e| {
            e.exact || alpha.as_ref().is_some_and(|a| alg.oplus(a, &e.value) == *a)
        }) {
            return Ok(hit);
        }
        let succ = game.successors(pos);
        if succ.is_empty() {
            let out = self.terminal(pos)?;
            self.store(pos, &out);
            return Ok(out);
        }
        self.stats.expanded_positions += 1;
        let out = match game.turn(pos) {
            Turn::Player => {
                let clean = match &alpha {
                    None => true,
                    Some(a) => alg.zero().as_ref() == Some(a),
                };
                let (mut v, start, mut best) = match &alpha {
                    Some(a) => (a.clone(), 0, None),
                    None => {
                        let r = self
                            .fm(&succ[0], None, depth + 1)
                            .map_err(|e| with_trail(e, pos))?;
                        let best = r.plans.first().map(|p| (0, p.clone()));
                        (r.value, 1, best)
                    }
                };
                for (i, c) in succ.iter().enumerate().skip(start) {
                    let r = self
                        .fm(c, Some(v.clone()), depth + 1)
                        .map_err(|e| with_trail(e, pos))?;
                    let nv = alg.oplus(&v, &r.value);
                    if nv != v {
                        best = r.plans.first().map(|p| (i, p.clone()));
                    }
                    v = nv;
                }
                let exact = clean || (alg.is_selective() && alpha.as_ref() != Some(&v));
                let mut plans = Vec::new();
                if let (true, Some((i, p))) = (exact, best) {
                    self.choose(pos, i, &[p], &mut plans);
                }
                Outcome {
                    value: v,
                    exact,
                    plans,
                }
            }
            Turn::Opponent => {
                let r = self
                    .fm(&succ[0], alpha.clone(), depth + 1)
                    .map_err(|e| with_trail(e, pos))?;
                let mut v = r.value;
                let mut exact = r.exact;
                let mut child_plans = vec![r.plans.first().cloned()];
                for c in &succ[1..] {
                    if let Some(a) = &alpha {
                        if alg.oplus(a, &v) == *a {
                            self.stats.cuts += 1;
                            exact = false;
                            child_plans.push(None);
                            break;
                        }
                    }
                    let r = self
                        .fm(c, alpha.clone(), depth + 1)
                        .map_err(|e| with_trail(e, pos))?;
                    v = alg.otimes(&v, &r.value);
                    exact &= r.exact;
                    child_plans.push(r.plans.first().cloned());
                }
                let plans = match child_plans.into_iter().collect::<Option<Vec<_>>>() {
                    Some(children) if exact => vec![Rc::new(Plan::All(children))],
                    _ => Vec::new(),
                };
                Outcome {
                    value: v,
                    exact,
                    plans,
                }
            }
        };
        self.store(pos, &out);
        Ok(out)
    }

    /// Tropical α-pruning that keeps every optimal successor.
    fn am(
        &mut self,
        pos: &G::Position,
        alpha: Option<Value<G>>,
        depth: usize,
    ) -> Result<Outcome<G>, EvalError> {
        self.enter(pos, depth)?;
        let game = self.game;
        let alg = game.algebra();
        let strictly_worse = |b: &Value<G>, a: &Value<G>| alg.oplus(a, b) == *a && b != a;
        if let Some(hit) = self.lookup(pos, |e| {
            e.exact || alpha.as_ref().is_some_and(|a| strictly_worse(&e.value, a))
        }) {
            return Ok(hit);
        }
        let succ = game.successors(pos);
        if succ.is_empty() {
            let out = self.terminal(pos)?;
            self.store(pos, &out);
            return Ok(out);
        }
        self.stats.expanded_positions += 1;
        let out = match game.turn(pos) {
            Turn::Player => {
                let mut best: Option<Value<G>> = None;
                let mut plans = Vec::new();
                let mut fold: Option<Value<G>> = None;
                for (i, c) in succ.iter().enumerate() {
                    let t = match (&alpha, &best) {
                        (None, None) => None,
                        (Some(a), None) => Some(a.clone()),
                        (None, Some(b)) => Some(b.clone()),
                        (Some(a), Some(b)) => Some(alg.oplus(a, b)),
                    };
                    let r = self
                        .am(c, t.clone(), depth + 1)
                        .map_err(|e| with_trail(e, pos))?;
                    fold = Some(match fold {
                        None => r.value.clone(),
                        Some(f) => alg.oplus(&f, &r.value),
                    });
                    let within = t.as_ref().is_none_or(|t| alg.oplus(&r.value, t) == r.value);
                    if !within {
                        continue;
                    }
                    match &best {
                        Some(b) if *b == r.value => self.choose(pos, i, &r.plans, &mut plans),
                        Some(b) if alg.oplus(&r.value, b) != r.value => {}
                        _ => {
                            plans.clear();
                            self.choose(pos, i, &r.plans, &mut plans);
                            best = Some(r.value);
                        }
                    }
                }
                match best {
                    Some(v) => Outcome {
                        value: v,
                        exact: true,
                        plans,
                    },
                    None => Outcome {
                        value: fold.expect("non-empty successors"),
                        exact: false,
                        plans: Vec::new(),
                    },
                }
            }
            Turn::Opponent => {
                let r = self
                    .am(&succ[0], alpha.clone(), depth + 1)
                    .map_err(|e| with_trail(e, pos))?;
                let mut v = r.value;
                let mut sets = vec![r.plans];
                for c in &succ[1..] {
                    if let Some(a) = &alpha {
                        if strictly_worse(&v, a) {
                            self.stats.cuts += 1;
                            break;
                        }
                    }
                    let r = self
                        .am(c, alpha.clone(), depth + 1)
                        .map_err(|e| with_trail(e, pos))?;
                    v = alg.otimes(&v, &r.value);
                    sets.push(r.plans);
                }
                let exact = alpha.as_ref().is_none_or(|a| alg.oplus(&v, a) == v);
                let plans = if exact {
                    let refs: Vec<&[Rc<Plan<G::Position>>]> = sets.iter().map(|s| &s[..]).collect();
                    self.product(&refs)
                } else {
                    Vec::new()
                };
                Outcome {
                    value: v,
                    exact,
                    plans,
                }
            }
        };
        self.store(pos, &out);
        Ok(out)
    }

    /// α-β with window (`alpha`, `beta`): the player stops once its value
    /// is absorbed by `beta` under `⊗`, the opponent once its value is
    /// absorbed by `alpha` under `⊕`.
    fn alpha_beta(
        &mut self,
        pos: &G::Position,
        alpha: Value<G>,
        beta: Value<G>,
        depth: usize,
    ) -> Result<Outcome<G>, EvalError> {
        self.enter(pos, depth)?;
        let game = self.game;
        let alg = game.algebra();
        let succ = game.successors(pos);
        if succ.is_empty() {
            return self.terminal(pos);
        }
        self.stats.expanded_positions += 1;
        match game.turn(pos) {
            Turn::Player => {
                let mut v = alpha;
                let mut best = None;
                for (i, c) in succ.iter().enumerate() {
                    if alg.otimes(&beta, &v) == beta {
                        self.stats.cuts += 1;
                        break;
                    }
                    let r = self
                        .alpha_beta(c, v.clone(), beta.clone(), depth + 1)
                        .map_err(|e| with_trail(e, pos))?;
                    let nv = alg.oplus(&v, &r.value);
                    if nv != v {
                        best = r.plans.first().map(|p| (i, p.clone()));
                    }
                    v = nv;
                }
                let mut plans = Vec::new();
                if let Some((i, p)) = best {
                    self.choose(pos, i, &[p], &mut plans);
                }
                Ok(Outcome {
                    value: v,
                    exact: true,
                    plans,
                })
            }
            Turn::Opponent => {
                let mut v = beta;
                let mut children = Vec::with_capacity(succ.len());
                for c in &succ {
                    if alg.oplus(&alpha, &v) == alpha {
                        self.stats.cuts += 1;
                        children.push(None);
                        break;
                    }
                    let r = self
                        .alpha_beta(c, alpha.clone(), v.clone(), depth + 1)
                        .map_err(|e| with_trail(e, pos))?;
                    v = alg.otimes(&v, &r.value);
                    children.push(r.plans.first().cloned());
                }
                let plans = match children.into_iter().collect::<Option<Vec<_>>>() {
                    Some(children) => vec![Rc::new(Plan::All(children))],
                    None => Vec::new(),
                };
                Ok(Outcome {
                    value: v,
                    exact: true,
                    plans,
                })
            }
        }
    }
}

fn to_strategies<P: Clone + Eq + std::hash::Hash>(plans: &[Rc<Plan<P>>]) -> Vec<Strategy<P>> {
    let mut out: Vec<Strategy<P>> = Vec::with_capacity(plans.len());
    for plan in plans {
        let mut s = Strategy::new();
        plan_into(plan, &mut s);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// The game value by a full left-to-right fold, with FM extraction.
pub fn eval_exhaustive<G: Game>(
    game: &G,
    pos: &G::Position,
) -> Result<EvalResult<G::Position, Value<G>>, EvalError> {
    Evaluator::new(game, SearchOptions::exhaustive()).evaluate(pos)
}

/// Tropical α-pruning from threshold `alpha`; `None` means `0̄`, or an
/// unrolled first child when the algebra has no `0̄`.
pub fn eval_tropical<G: Game>(
    game: &G,
    pos: &G::Position,
    alpha: Option<Value<G>>,
) -> Result<EvalResult<G::Position, Value<G>>, EvalError> {
    let alpha = alpha.or_else(|| game.algebra().zero());
    Evaluator::new(game, SearchOptions::pruned()).evaluate_from(pos, alpha)
}

/// α-β search. `None` bounds default to the full window `(0̄, 1̄)`.
pub fn eval_alpha_beta<G: Game>(
    game: &G,
    pos: &G::Position,
    alpha: Option<Value<G>>,
    beta: Option<Value<G>>,
) -> Result<EvalResult<G::Position, Value<G>>, EvalError> {
    let alg = game.algebra();
    if !alg.is_bi_tropical() {
        return Err(EvalError::NotBiTropical);
    }
    let (Some(zero), Some(one)) = (alg.zero(), alg.one()) else {
        return Err(EvalError::NotBiTropical);
    };
    let full = alpha.is_none() && beta.is_none();
    let (alpha, beta) = (alpha.unwrap_or(zero), beta.unwrap_or(one));
    let mut ev = Evaluator::new(game, SearchOptions::default());
    let mut outcome = ev.alpha_beta(pos, alpha, beta, 0).map_err(finish_trail)?;
    outcome.exact = full;
    // α-β plans can skip the children a cut hid; keep them only if they
    // replay to the value.
    let plans = to_strategies(&outcome.plans);
    let verified = plans
        .first()
        .is_some_and(|s| replay(game, pos, s).ok().as_ref() == Some(&outcome.value));
    if full && !verified {
        outcome.plans.clear();
    }
    if !full {
        outcome.plans.clear();
        let mut stats = ev.stats;
        stats.memo_entries = 0;
        return Ok(EvalResult {
            value: outcome.value,
            exact: false,
            strategies: Vec::new(),
            stats,
            overflow: false,
        });
    }
    ev.result(pos, outcome)
}

/// Memoized evaluation, pruned or exhaustive, under `policy`.
pub fn eval_memo<G: Game>(
    game: &G,
    pos: &G::Position,
    prune: bool,
    policy: Policy,
) -> Result<EvalResult<G::Position, Value<G>>, EvalError> {
    let options = SearchOptions {
        prune,
        memo: true,
        policy,
        ..SearchOptions::default()
    };
    Evaluator::new(game, options).evaluate(pos)
}

/// The value of `pos` when the player follows `strategy` and every opponent
/// successor is kept.
pub fn replay<G: Game>(
    game: &G,
    pos: &G::Position,
    strategy: &Strategy<G::Position>,
) -> Result<Value<G>, EvalError> {
    let succ = game.successors(pos);
    if succ.is_empty() {
        return game
            .payoff(pos)
            .ok_or_else(|| EvalError::PayoffUndefined(format!("{pos:?}")));
    }
    match game.turn(pos) {
        Turn::Player => match strategy.choice(pos) {
            Some(i) if i < succ.len() => replay(game, &succ[i], strategy),
            _ => Err(EvalError::StrategyIncomplete(format!("{pos:?}"))),
        },
        Turn::Opponent => {
            let alg = game.algebra();
            let mut v = replay(game, &succ[0], strategy)?;
            for c in &succ[1..] {
                v = alg.otimes(&v, &replay(game, c, strategy)?);
            }
            Ok(v)
        }
    }
}

//! Combinatorial game search over tropical algebras.
//!
//! A game is an [`arena::Arena`] (positions, turns, successors) paired with a
//! [`algebra::TropicalAlgebra`] and a payoff on terminal positions. The
//! player folds successor values with `⊕`, the opponent with `⊗`.
//!
//! * [`evaluator`] computes game values exhaustively, with tropical
//!   α-pruning, or with classic α-β on bi-tropical algebras, optionally
//!   memoized, and extracts optimal strategies.
//! * [`smallstep`] is the rewrite-system semantics used as an independent
//!   oracle for the evaluators.
//! * [`parsegame`] casts error-tolerant parsing of a restricted class of
//!   context-free grammars as a min-plus game.

pub mod algebra;
pub mod arena;
pub mod evaluator;
pub mod parsegame;
pub mod smallstep;

pub use algebra::{Cost, ExtInt, MinMax, MinPlus, PathMinPlus, Traced, TropicalAlgebra};
pub use arena::{Arena, Game, Turn};
pub use evaluator::{EvalError, EvalResult, EvalStats, Policy, SearchOptions, Strategy};

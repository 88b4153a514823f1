//! Tropical algebras and executable law checks.
//!
//! An algebra is a carrier with two associative operations: `⊕` combines the
//! alternatives available to the player, `⊗` accumulates what the opponent
//! imposes. `⊗` distributes over `⊕` on both sides. Pruning additionally
//! needs *rationality*, `x ⊕ (y ⊗ x ⊗ z) = x`.
//!
//! Carriers are compared with exact equality; none of the built-in instances
//! use floating point.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

/// A carrier with a player operation `⊕` and an opponent operation `⊗`.
pub trait TropicalAlgebra {
    type Value: Clone + Eq + Hash + fmt::Debug;

    /// `⊕`, the player's choice.
    fn oplus(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    /// `⊗`, the opponent's accumulation.
    fn otimes(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    /// Neutral element of `⊕`, when the carrier has one.
    fn zero(&self) -> Option<Self::Value> {
        None
    }

    /// Neutral element of `⊗`, when the carrier has one.
    fn one(&self) -> Option<Self::Value> {
        None
    }

    /// Whether `x ⊕ (y ⊗ x ⊗ z) = x` holds on the whole carrier.
    /// Tropical α-pruning refuses to run otherwise.
    fn is_rational(&self) -> bool;

    /// Whether the dual algebra (operations swapped) is also rational
    /// tropical, which is what classic α-β needs.
    fn is_bi_tropical(&self) -> bool {
        false
    }

    /// Whether `a ⊕ b` is always one of `a`, `b`. The natural order
    /// `a ≤ b ⇔ a ⊕ b = a` is then total.
    fn is_selective(&self) -> bool {
        false
    }

    /// `a ≤ b` in the order induced by `⊕`.
    fn prefers(&self, a: &Self::Value, b: &Self::Value) -> bool {
        self.oplus(a, b) == *a
    }
}

/// Naturals extended with `+∞`. `Finite` orders below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cost {
    Finite(u64),
    Infinite,
}

impl Cost {
    pub fn finite(self) -> Option<u64> {
        match self {
            Cost::Finite(n) => Some(n),
            Cost::Infinite => None,
        }
    }
}

impl From<u64> for Cost {
    fn from(n: u64) -> Self {
        Cost::Finite(n)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(n) => write!(f, "{n}"),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid carrier value `{0}`")]
pub struct ValueParseError(pub String);

impl FromStr for Cost {
    type Err = ValueParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "+inf" => Ok(Cost::Infinite),
            _ => s
                .parse::<u64>()
                .map(Cost::Finite)
                .map_err(|_| ValueParseError(s.to_string())),
        }
    }
}

/// `(ℕ ∪ {+∞}, min, +)`. Addition saturates at `+∞`; overflow also lands on
/// `+∞`, which keeps `⊗` associative since every partial sum of naturals is
/// bounded by the total.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MinPlus;

impl TropicalAlgebra for MinPlus {
    type Value = Cost;

    fn oplus(&self, a: &Cost, b: &Cost) -> Cost {
        *a.min(b)
    }

    fn otimes(&self, a: &Cost, b: &Cost) -> Cost {
        match (a, b) {
            (Cost::Finite(x), Cost::Finite(y)) => {
                x.checked_add(*y).map_or(Cost::Infinite, Cost::Finite)
            }
            _ => Cost::Infinite,
        }
    }

    fn zero(&self) -> Option<Cost> {
        Some(Cost::Infinite)
    }

    fn one(&self) -> Option<Cost> {
        Some(Cost::Finite(0))
    }

    fn is_rational(&self) -> bool {
        true
    }

    fn is_selective(&self) -> bool {
        true
    }
}

/// Integers extended with `-∞` and `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtInt {
    NegInf,
    Finite(i64),
    PosInf,
}

impl From<i64> for ExtInt {
    fn from(n: i64) -> Self {
        ExtInt::Finite(n)
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => f.write_str("-inf"),
            ExtInt::Finite(n) => write!(f, "{n}"),
            ExtInt::PosInf => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtInt {
    type Err = ValueParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "-inf" => Ok(ExtInt::NegInf),
            "inf" | "+inf" => Ok(ExtInt::PosInf),
            _ => s
                .parse::<i64>()
                .map(ExtInt::Finite)
                .map_err(|_| ValueParseError(s.to_string())),
        }
    }
}

/// `(ℤ ∪ {±∞}, min, max)`: the classic minimax algebra. Both it and its dual
/// are rational, so it is bi-tropical.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MinMax;

impl TropicalAlgebra for MinMax {
    type Value = ExtInt;

    fn oplus(&self, a: &ExtInt, b: &ExtInt) -> ExtInt {
        *a.min(b)
    }

    fn otimes(&self, a: &ExtInt, b: &ExtInt) -> ExtInt {
        *a.max(b)
    }

    fn zero(&self) -> Option<ExtInt> {
        Some(ExtInt::PosInf)
    }

    fn one(&self) -> Option<ExtInt> {
        Some(ExtInt::NegInf)
    }

    fn is_rational(&self) -> bool {
        true
    }

    fn is_bi_tropical(&self) -> bool {
        true
    }

    fn is_selective(&self) -> bool {
        true
    }
}

/// A min-plus cost carrying the sequence of leaf labels that produced it.
///
/// `⊗` adds costs and concatenates trails, so it is associative but not
/// commutative; `⊕` keeps the smaller value, comparing cost, then trail
/// length, then trail lexicographically. An evaluator that folds siblings
/// out of order produces a different trail.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Traced {
    Finite { cost: u64, trail: Vec<u32> },
    Infinite,
}

impl Traced {
    pub fn new(cost: u64, trail: impl Into<Vec<u32>>) -> Self {
        Traced::Finite {
            cost,
            trail: trail.into(),
        }
    }

    fn key(&self) -> Option<(u64, usize, &[u32])> {
        match self {
            Traced::Finite { cost, trail } => Some((*cost, trail.len(), trail)),
            Traced::Infinite => None,
        }
    }
}

impl PartialOrd for Traced {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Traced {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self.key(), other.key()) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Less,
            (None, Some(_)) => Greater,
            (None, None) => Equal,
        }
    }
}

impl fmt::Display for Traced {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Traced::Infinite => f.write_str("inf"),
            Traced::Finite { cost, trail } if trail.is_empty() => write!(f, "{cost}"),
            Traced::Finite { cost, trail } => {
                write!(f, "{cost}/")?;
                for (i, label) in trail.iter().enumerate() {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    write!(f, "{label}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Traced {
    type Err = ValueParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ValueParseError(s.to_string());
        if s == "inf" {
            return Ok(Traced::Infinite);
        }
        let (cost, trail) = match s.split_once('/') {
            Some((c, t)) => (c, Some(t)),
            None => (s, None),
        };
        let cost = cost.parse::<u64>().map_err(|_| bad())?;
        let trail = match trail {
            None => Vec::new(),
            Some(t) => t
                .split('.')
                .map(|l| l.parse::<u32>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?,
        };
        Ok(Traced::Finite { cost, trail })
    }
}

/// Min-plus over [`Traced`] values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PathMinPlus;

impl TropicalAlgebra for PathMinPlus {
    type Value = Traced;

    fn oplus(&self, a: &Traced, b: &Traced) -> Traced {
        a.min(b).clone()
    }

    fn otimes(&self, a: &Traced, b: &Traced) -> Traced {
        match (a, b) {
            (Traced::Finite { cost: x, trail: s }, Traced::Finite { cost: y, trail: t }) => {
                match x.checked_add(*y) {
                    Some(cost) => {
                        let mut trail = Vec::with_capacity(s.len() + t.len());
                        trail.extend_from_slice(s);
                        trail.extend_from_slice(t);
                        Traced::Finite { cost, trail }
                    }
                    None => Traced::Infinite,
                }
            }
            _ => Traced::Infinite,
        }
    }

    fn zero(&self) -> Option<Traced> {
        Some(Traced::Infinite)
    }

    fn one(&self) -> Option<Traced> {
        Some(Traced::Finite {
            cost: 0,
            trail: Vec::new(),
        })
    }

    fn is_rational(&self) -> bool {
        true
    }

    fn is_selective(&self) -> bool {
        true
    }
}

/// The dual algebra: `⊕` and `⊗` swapped, neutral elements swapped with them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Swapped<A>(pub A);

impl<A: TropicalAlgebra> TropicalAlgebra for Swapped<A> {
    type Value = A::Value;

    fn oplus(&self, a: &A::Value, b: &A::Value) -> A::Value {
        self.0.otimes(a, b)
    }

    fn otimes(&self, a: &A::Value, b: &A::Value) -> A::Value {
        self.0.oplus(a, b)
    }

    fn zero(&self) -> Option<A::Value> {
        self.0.one()
    }

    fn one(&self) -> Option<A::Value> {
        self.0.zero()
    }

    fn is_rational(&self) -> bool {
        self.0.is_bi_tropical()
    }

    fn is_bi_tropical(&self) -> bool {
        self.0.is_bi_tropical()
    }

    fn is_selective(&self) -> bool {
        // Only the bi-tropical instances have a selective ⊗.
        self.0.is_bi_tropical() && self.0.is_selective()
    }
}

/// Values that can be drawn at random for law sampling and random games.
pub trait RandomValue: Sized {
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl RandomValue for Cost {
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen_ratio(1, 10) {
            Cost::Infinite
        } else {
            Cost::Finite(rng.gen_range(0..=50))
        }
    }
}

impl RandomValue for ExtInt {
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        match rng.gen_range(0..20) {
            0 => ExtInt::NegInf,
            1 => ExtInt::PosInf,
            _ => ExtInt::Finite(rng.gen_range(-50..=50)),
        }
    }
}

impl RandomValue for Traced {
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.gen_ratio(1, 10) {
            return Traced::Infinite;
        }
        let len = rng.gen_range(0..=3);
        Traced::Finite {
            cost: rng.gen_range(0..=4),
            trail: (0..len).map(|_| rng.gen_range(0..3)).collect(),
        }
    }
}

/// The identities an algebra can be checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Law {
    /// `a ⊕ (b ⊕ c) = (a ⊕ b) ⊕ c`
    OplusAssociative,
    /// `a ⊗ (b ⊗ c) = (a ⊗ b) ⊗ c`
    OtimesAssociative,
    /// `a ⊗ (b ⊕ c) = (a ⊗ b) ⊕ (a ⊗ c)`
    LeftDistributive,
    /// `(a ⊕ b) ⊗ c = (a ⊗ c) ⊕ (b ⊗ c)`
    RightDistributive,
    /// `x ⊕ (y ⊗ x ⊗ z) = x`
    Rationality,
    /// `x ⊗ (y ⊕ x ⊕ z) = x`
    DualRationality,
    /// `α ⊕ (β ⊗ x ⊗ y) = α ⊕ (β ⊗ (α ⊕ x) ⊗ y)`
    Insertion,
    /// `0̄ ⊕ x = x ⊕ 0̄ = x`
    OplusNeutral,
    /// `1̄ ⊗ x = x ⊗ 1̄ = x`
    OtimesNeutral,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Law::OplusAssociative => "associativity of oplus",
            Law::OtimesAssociative => "associativity of otimes",
            Law::LeftDistributive => "left distributivity",
            Law::RightDistributive => "right distributivity",
            Law::Rationality => "rationality",
            Law::DualRationality => "dual rationality",
            Law::Insertion => "insertion",
            Law::OplusNeutral => "oplus neutral element",
            Law::OtimesNeutral => "otimes neutral element",
        };
        f.write_str(name)
    }
}

/// Outcome of checking one law over a sample set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck<V> {
    pub law: Law,
    pub checked: usize,
    /// The first sample that violated the law, in sample order.
    pub counterexample: Option<Vec<V>>,
}

impl<V> LawCheck<V> {
    /// Holds on every sample, and at least one sample was checked.
    pub fn holds(&self) -> bool {
        self.checked > 0 && self.counterexample.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport<V> {
    pub checks: Vec<LawCheck<V>>,
}

impl<V> LawReport<V> {
    pub fn holds(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(LawCheck::holds)
    }

    pub fn get(&self, law: Law) -> Option<&LawCheck<V>> {
        self.checks.iter().find(|c| c.law == law)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck<V>> {
        self.checks.iter().filter(|c| !c.holds())
    }

    pub fn merge(mut self, other: LawReport<V>) -> Self {
        self.checks.extend(other.checks);
        self
    }
}

fn check_law<'s, V, S, F>(
    law: Law,
    samples: &'s [S],
    as_vec: impl Fn(&'s S) -> Vec<V>,
    holds: F,
) -> LawCheck<V>
where
    F: Fn(&'s S) -> bool,
{
    let counterexample = samples.iter().find(|s| !holds(s)).map(as_vec);
    LawCheck {
        law,
        checked: samples.len(),
        counterexample,
    }
}

fn triple<V: Clone>(t: &(V, V, V)) -> Vec<V> {
    vec![t.0.clone(), t.1.clone(), t.2.clone()]
}

/// Checks associativity of both operations and both distributive laws on
/// every sampled triple `(a, b, c)`.
pub fn check_laws<A: TropicalAlgebra>(
    alg: &A,
    samples: &[(A::Value, A::Value, A::Value)],
) -> LawReport<A::Value> {
    let p = |x: &A::Value, y: &A::Value| alg.oplus(x, y);
    let t = |x: &A::Value, y: &A::Value| alg.otimes(x, y);
    LawReport {
        checks: vec![
            check_law(Law::OplusAssociative, samples, triple, |(a, b, c)| {
                p(a, &p(b, c)) == p(&p(a, b), c)
            }),
            check_law(Law::OtimesAssociative, samples, triple, |(a, b, c)| {
                t(a, &t(b, c)) == t(&t(a, b), c)
            }),
            check_law(Law::LeftDistributive, samples, triple, |(a, b, c)| {
                t(a, &p(b, c)) == p(&t(a, b), &t(a, c))
            }),
            check_law(Law::RightDistributive, samples, triple, |(a, b, c)| {
                t(&p(a, b), c) == p(&t(a, c), &t(b, c))
            }),
        ],
    }
}

/// Checks `x ⊕ (y ⊗ x ⊗ z) = x` on every sampled `(x, y, z)`.
pub fn check_rationality<A: TropicalAlgebra>(
    alg: &A,
    samples: &[(A::Value, A::Value, A::Value)],
) -> LawReport<A::Value> {
    LawReport {
        checks: vec![check_law(Law::Rationality, samples, triple, |(x, y, z)| {
            alg.oplus(x, &alg.otimes(&alg.otimes(y, x), z)) == *x
        })],
    }
}

/// Checks `x ⊗ (y ⊕ x ⊕ z) = x`, the rationality of the dual algebra.
pub fn check_dual_rationality<A: TropicalAlgebra>(
    alg: &A,
    samples: &[(A::Value, A::Value, A::Value)],
) -> LawReport<A::Value> {
    LawReport {
        checks: vec![check_law(
            Law::DualRationality,
            samples,
            triple,
            |(x, y, z)| alg.otimes(x, &alg.oplus(&alg.oplus(y, x), z)) == *x,
        )],
    }
}

/// A sampled `(x, y, α, β)`.
pub type Quadruple<V> = (V, V, V, V);

/// Checks `α ⊕ (β ⊗ x ⊗ y) = α ⊕ (β ⊗ (α ⊕ x) ⊗ y)` on every sampled
/// `(x, y, α, β)`.
pub fn check_insertion<A: TropicalAlgebra>(
    alg: &A,
    samples: &[Quadruple<A::Value>],
) -> LawReport<A::Value> {
    let quad = |q: &Quadruple<A::Value>| vec![q.0.clone(), q.1.clone(), q.2.clone(), q.3.clone()];
    LawReport {
        checks: vec![check_law(
            Law::Insertion,
            samples,
            quad,
            |(x, y, alpha, beta)| {
                let lhs = alg.oplus(alpha, &alg.otimes(&alg.otimes(beta, x), y));
                let rhs = alg.oplus(
                    alpha,
                    &alg.otimes(&alg.otimes(beta, &alg.oplus(alpha, x)), y),
                );
                lhs == rhs
            },
        )],
    }
}

/// Checks the neutral elements the algebra declares. An algebra without
/// neutral elements yields an empty report.
pub fn check_neutrals<A: TropicalAlgebra>(alg: &A, samples: &[A::Value]) -> LawReport<A::Value> {
    let single = |v: &A::Value| vec![v.clone()];
    let mut checks = Vec::new();
    if let Some(zero) = alg.zero() {
        checks.push(check_law(Law::OplusNeutral, samples, single, |x| {
            alg.oplus(&zero, x) == *x && alg.oplus(x, &zero) == *x
        }));
    }
    if let Some(one) = alg.one() {
        checks.push(check_law(Law::OtimesNeutral, samples, single, |x| {
            alg.otimes(&one, x) == *x && alg.otimes(x, &one) == *x
        }));
    }
    LawReport { checks }
}

/// `x` is player-irrelevant with respect to `α` and `β` when
/// `α ⊕ (β ⊗ x) = α`: whatever the opponent subtree is worth, the player's
/// current choice stands.
pub fn is_irrelevant<A: TropicalAlgebra>(
    alg: &A,
    alpha: &A::Value,
    beta: &A::Value,
    x: &A::Value,
) -> bool {
    alg.oplus(alpha, &alg.otimes(beta, x)) == *alpha
}

/// Draws `n` random triples.
pub fn random_triples<V: RandomValue, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<(V, V, V)> {
    (0..n)
        .map(|_| (V::random(rng), V::random(rng), V::random(rng)))
        .collect()
}

/// Draws `n` random quadruples.
pub fn random_quadruples<V: RandomValue, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
) -> Vec<(V, V, V, V)> {
    (0..n)
        .map(|_| {
            (
                V::random(rng),
                V::random(rng),
                V::random(rng),
                V::random(rng),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Integers under (min, −). Subtraction is not associative.
    struct MinMinus;

    impl TropicalAlgebra for MinMinus {
        type Value = i64;
        fn oplus(&self, a: &i64, b: &i64) -> i64 {
            *a.min(b)
        }
        fn otimes(&self, a: &i64, b: &i64) -> i64 {
            a - b
        }
        fn is_rational(&self) -> bool {
            false
        }
    }

    fn inf() -> Cost {
        Cost::Infinite
    }

    fn c(n: u64) -> Cost {
        Cost::Finite(n)
    }

    #[test]
    fn min_plus_laws_on_fixed_triples() {
        let samples = [(c(1), c(2), c(3)), (c(0), inf(), c(5))];
        let report = check_laws(&MinPlus, &samples);
        assert!(report.holds(), "{report:?}");
        assert_eq!(report.checks.len(), 4);
    }

    #[test]
    fn min_max_laws_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<(ExtInt, ExtInt, ExtInt)> = random_triples(&mut rng, 500);
        assert!(check_laws(&MinMax, &samples).holds());
        assert!(check_laws(&Swapped(MinMax), &samples).holds());
    }

    #[test]
    fn subtraction_breaks_otimes_associativity() {
        let report = check_laws(&MinMinus, &[(1, 2, 3)]);
        let assoc = report.get(Law::OtimesAssociative).unwrap();
        assert_eq!(assoc.counterexample, Some(vec![1, 2, 3]));
        assert!(report.get(Law::OplusAssociative).unwrap().holds());
        assert!(!report.holds());
    }

    #[test]
    fn rationality_examples() {
        assert!(check_rationality(&MinPlus, &[(c(2), c(1), c(3))]).holds());
        assert!(check_rationality(&MinPlus, &[(c(0), c(0), c(0))]).holds());
        let mm = [(ExtInt::Finite(5), ExtInt::Finite(1), ExtInt::Finite(2))];
        assert!(check_rationality(&MinMax, &mm).holds());
    }

    #[test]
    fn dual_rationality_holds_for_min_max_but_not_min_plus() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mm: Vec<(ExtInt, ExtInt, ExtInt)> = random_triples(&mut rng, 500);
        assert!(check_dual_rationality(&MinMax, &mm).holds());
        // 2 + min(1, 2, 3) = 3 ≠ 2
        let report = check_dual_rationality(&MinPlus, &[(c(2), c(1), c(3))]);
        assert!(!report.holds());
    }

    #[test]
    fn insertion_examples() {
        assert!(check_insertion(&MinPlus, &[(c(4), c(1), c(2), c(0))]).holds());
        assert!(check_insertion(&MinPlus, &[(c(0), c(0), inf(), c(0))]).holds());
    }

    #[test]
    fn insertion_exhaustive_on_four_element_min_max_carrier() {
        let carrier = [
            ExtInt::NegInf,
            ExtInt::Finite(0),
            ExtInt::Finite(1),
            ExtInt::PosInf,
        ];
        let mut quads = Vec::new();
        for x in carrier {
            for y in carrier {
                for a in carrier {
                    for b in carrier {
                        quads.push((x, y, a, b));
                    }
                }
            }
        }
        let report = check_insertion(&MinMax, &quads);
        assert_eq!(report.checks[0].checked, 256);
        assert!(report.holds());
    }

    #[test]
    fn irrelevance_examples() {
        assert!(is_irrelevant(&MinPlus, &c(2), &c(3), &c(0)));
        assert!(!is_irrelevant(&MinPlus, &c(5), &c(1), &c(0)));
        // α ⊕ β = α with α = β = 2: every x is irrelevant.
        for x in 0..=100 {
            assert!(is_irrelevant(&MinPlus, &c(2), &c(2), &c(x)));
        }
        assert!(is_irrelevant(&MinPlus, &c(2), &c(2), &inf()));
    }

    #[test]
    fn neutral_elements() {
        let samples = [c(0), c(3), inf()];
        assert!(check_neutrals(&MinPlus, &samples).holds());
        assert_eq!(check_neutrals(&MinMinus, &[1]).checks.len(), 0);
        assert!(!check_neutrals(&MinMinus, &[1]).holds());
    }

    #[test]
    fn empty_samples_do_not_count_as_passing() {
        let report = check_rationality(&MinPlus, &[]);
        assert_eq!(report.checks[0].checked, 0);
        assert!(!report.holds());
    }

    #[test]
    fn min_plus_saturates() {
        assert_eq!(MinPlus.otimes(&c(u64::MAX), &c(1)), inf());
        assert_eq!(MinPlus.otimes(&inf(), &c(0)), inf());
        assert_eq!(MinPlus.oplus(&inf(), &c(4)), c(4));
    }

    #[test]
    fn traced_otimes_is_not_commutative() {
        let a = Traced::new(1, [1]);
        let b = Traced::new(1, [2]);
        assert_ne!(PathMinPlus.otimes(&a, &b), PathMinPlus.otimes(&b, &a));
        assert_eq!(PathMinPlus.otimes(&a, &b), Traced::new(2, [1, 2]));
    }

    #[test]
    fn value_text_round_trips() {
        for s in ["0", "17", "inf"] {
            assert_eq!(s.parse::<Cost>().unwrap().to_string(), s);
        }
        for s in ["-inf", "-3", "inf"] {
            assert_eq!(s.parse::<ExtInt>().unwrap().to_string(), s);
        }
        for s in ["4", "4/1.0.2", "inf"] {
            assert_eq!(s.parse::<Traced>().unwrap().to_string(), s);
        }
        assert!("x".parse::<Cost>().is_err());
        assert!("3/".parse::<Traced>().is_err());
    }
}

//! Game syntax: positions, turns and successors.
//!
//! Arenas are intensional. Nothing here materializes a position graph except
//! [`TreeGame`], the explicit trees used for hand-built and random test games.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::algebra::{Swapped, TropicalAlgebra};
use crate::smallstep::{Term, TermParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Turn {
    Player,
    Opponent,
}

impl Turn {
    pub fn flip(self) -> Turn {
        match self {
            Turn::Player => Turn::Opponent,
            Turn::Opponent => Turn::Player,
        }
    }
}

/// Positions, the turn function and the successor function.
///
/// `successors` must be pure and returns an ordered sequence; a position is
/// terminal exactly when it has no successors.
pub trait Arena {
    type Position: Clone + Eq + Hash + fmt::Debug;

    fn turn(&self, pos: &Self::Position) -> Turn;

    fn successors(&self, pos: &Self::Position) -> Vec<Self::Position>;

    fn is_terminal(&self, pos: &Self::Position) -> bool {
        self.successors(pos).is_empty()
    }
}

/// An arena with an algebra and a payoff on terminal positions.
pub trait Game: Arena {
    type Algebra: TropicalAlgebra;

    fn algebra(&self) -> &Self::Algebra;

    /// Payoff of a terminal position. Evaluators never ask for the payoff of
    /// a non-terminal position; `None` means the payoff is undefined.
    fn payoff(&self, pos: &Self::Position) -> Option<Value<Self>>;

    /// Whether evaluators may cache the value of `pos`.
    fn memoizable(&self, _pos: &Self::Position) -> bool {
        true
    }
}

/// The carrier type of a game's algebra.
pub type Value<G> = <<G as Game>::Algebra as TropicalAlgebra>::Value;

impl<A: Arena + ?Sized> Arena for &A {
    type Position = A::Position;

    fn turn(&self, pos: &Self::Position) -> Turn {
        (**self).turn(pos)
    }

    fn successors(&self, pos: &Self::Position) -> Vec<Self::Position> {
        (**self).successors(pos)
    }

    fn is_terminal(&self, pos: &Self::Position) -> bool {
        (**self).is_terminal(pos)
    }
}

impl<G: Game + ?Sized> Game for &G {
    type Algebra = G::Algebra;

    fn algebra(&self) -> &Self::Algebra {
        (**self).algebra()
    }

    fn payoff(&self, pos: &Self::Position) -> Option<Value<Self>> {
        (**self).payoff(pos)
    }

    fn memoizable(&self, pos: &Self::Position) -> bool {
        (**self).memoizable(pos)
    }
}

/// An arena, an algebra and a payoff function glued together.
pub struct GameInstance<Ar, Alg, F> {
    pub arena: Ar,
    pub algebra: Alg,
    pub payoff: F,
}

impl<Ar, Alg, F> GameInstance<Ar, Alg, F> {
    pub fn new(arena: Ar, algebra: Alg, payoff: F) -> Self {
        GameInstance {
            arena,
            algebra,
            payoff,
        }
    }
}

impl<Ar: Arena, Alg, F> Arena for GameInstance<Ar, Alg, F> {
    type Position = Ar::Position;

    fn turn(&self, pos: &Ar::Position) -> Turn {
        self.arena.turn(pos)
    }

    fn successors(&self, pos: &Ar::Position) -> Vec<Ar::Position> {
        self.arena.successors(pos)
    }

    fn is_terminal(&self, pos: &Ar::Position) -> bool {
        self.arena.is_terminal(pos)
    }
}

impl<Ar, Alg, F> Game for GameInstance<Ar, Alg, F>
where
    Ar: Arena,
    Alg: TropicalAlgebra,
    F: Fn(&Ar::Position) -> Option<Alg::Value>,
{
    type Algebra = Alg;

    fn algebra(&self) -> &Alg {
        &self.algebra
    }

    fn payoff(&self, pos: &Ar::Position) -> Option<Alg::Value> {
        (self.payoff)(pos)
    }
}

pub fn is_terminal<A: Arena>(arena: &A, pos: &A::Position) -> bool {
    arena.is_terminal(pos)
}

/// The dual arena: same positions and successors, every turn flipped.
#[derive(Clone, Debug)]
pub struct Dual<A>(pub A);

pub fn dual<A: Arena>(arena: A) -> Dual<A> {
    Dual(arena)
}

impl<A: Arena> Arena for Dual<A> {
    type Position = A::Position;

    fn turn(&self, pos: &A::Position) -> Turn {
        self.0.turn(pos).flip()
    }

    fn successors(&self, pos: &A::Position) -> Vec<A::Position> {
        self.0.successors(pos)
    }

    fn is_terminal(&self, pos: &A::Position) -> bool {
        self.0.is_terminal(pos)
    }
}

/// The dual game: dual arena, swapped algebra, same payoff.
pub struct DualGame<G: Game> {
    inner: G,
    algebra: Swapped<G::Algebra>,
}

impl<G: Game> DualGame<G>
where
    G::Algebra: Clone,
{
    pub fn new(inner: G) -> Self {
        let algebra = Swapped(inner.algebra().clone());
        DualGame { inner, algebra }
    }
}

impl<G: Game> Arena for DualGame<G> {
    type Position = G::Position;

    fn turn(&self, pos: &G::Position) -> Turn {
        self.inner.turn(pos).flip()
    }

    fn successors(&self, pos: &G::Position) -> Vec<G::Position> {
        self.inner.successors(pos)
    }

    fn is_terminal(&self, pos: &G::Position) -> bool {
        self.inner.is_terminal(pos)
    }
}

impl<G: Game> Game for DualGame<G> {
    type Algebra = Swapped<G::Algebra>;

    fn algebra(&self) -> &Self::Algebra {
        &self.algebra
    }

    fn payoff(&self, pos: &G::Position) -> Option<Value<Self>> {
        self.inner.payoff(pos)
    }

    fn memoizable(&self, pos: &G::Position) -> bool {
        self.inner.memoizable(pos)
    }
}

/// Positions reachable from a start position, in breadth-first order.
#[derive(Clone, Debug)]
pub struct Reachability<P> {
    pub positions: Vec<P>,
    /// The node budget ran out before the closure was complete.
    pub truncated: bool,
}

/// Reflexive-transitive closure of `succ` from `pos`, visiting at most
/// `bound` distinct positions.
pub fn reachable<A: Arena>(
    arena: &A,
    pos: &A::Position,
    bound: usize,
) -> Reachability<A::Position> {
    let bound = bound.max(1);
    let mut seen = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(pos.clone());
    queue.push_back(pos.clone());
    let mut truncated = false;
    while let Some(p) = queue.pop_front() {
        order.push(p.clone());
        for s in arena.successors(&p) {
            if seen.contains(&s) {
                continue;
            }
            if seen.len() >= bound {
                truncated = true;
                continue;
            }
            seen.insert(s.clone());
            queue.push_back(s);
        }
    }
    Reachability {
        positions: order,
        truncated,
    }
}

/// Whether every edge among the first `bound` reachable positions joins
/// positions of different turns.
pub fn is_alternate_turn<A: Arena>(arena: &A, pos: &A::Position, bound: usize) -> bool {
    let region = reachable(arena, pos, bound);
    region.positions.iter().all(|p| {
        let t = arena.turn(p);
        arena.successors(p).iter().all(|s| arena.turn(s) != t)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("collapsing same-turn moves from {position} exceeded the depth budget of {budget}")]
    CollapseBudgetExceeded { position: String, budget: usize },
}

/// A position of an [`AlternateTurn`] arena: the original position with the
/// turn it plays in the collapsed arena. Non-terminal positions keep their
/// own turn; terminal ones take the turn opposite to their parent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Collapsed<P> {
    pub pos: P,
    pub turn: Turn,
}

/// An arena where runs of consecutive same-turn moves are collapsed into
/// single moves, so that every move changes the turn.
///
/// The successors of a position are its own successors, left to right, with
/// every non-terminal same-turn successor replaced in place by its own
/// (recursively collapsed) successors. Since `⊕` and `⊗` are associative
/// this leaves game values unchanged.
#[derive(Clone, Debug)]
pub struct AlternateTurn<A> {
    inner: A,
    depth_budget: usize,
}

/// Collapses same-turn move chains of `arena`, failing on chains deeper than
/// `depth_budget`.
pub fn alternate_turn_transform<A: Arena>(arena: A, depth_budget: usize) -> AlternateTurn<A> {
    AlternateTurn {
        inner: arena,
        depth_budget,
    }
}

impl<A: Arena> AlternateTurn<A> {
    pub fn inner(&self) -> &A {
        &self.inner
    }

    /// The collapsed counterpart of an original position.
    pub fn root(&self, pos: A::Position) -> Collapsed<A::Position> {
        let turn = self.inner.turn(&pos);
        Collapsed { pos, turn }
    }

    pub fn try_successors(
        &self,
        c: &Collapsed<A::Position>,
    ) -> Result<Vec<Collapsed<A::Position>>, ArenaError> {
        let mut out = Vec::new();
        if !self.inner.is_terminal(&c.pos) {
            self.collect(&c.pos, c.turn, 0, &mut out)?;
        }
        Ok(out)
    }

    fn collect(
        &self,
        pos: &A::Position,
        turn: Turn,
        depth: usize,
        out: &mut Vec<Collapsed<A::Position>>,
    ) -> Result<(), ArenaError> {
        for child in self.inner.successors(pos) {
            if self.inner.is_terminal(&child) {
                out.push(Collapsed {
                    pos: child,
                    turn: turn.flip(),
                });
            } else if self.inner.turn(&child) != turn {
                let t = self.inner.turn(&child);
                out.push(Collapsed {
                    pos: child,
                    turn: t,
                });
            } else {
                if depth + 1 > self.depth_budget {
                    return Err(ArenaError::CollapseBudgetExceeded {
                        position: format!("{child:?}"),
                        budget: self.depth_budget,
                    });
                }
                self.collect(&child, turn, depth + 1, out)?;
            }
        }
        Ok(())
    }

    /// Collapses every position reachable from `root` (up to `node_budget`
    /// positions), reporting the first chain that exceeds the depth budget.
    pub fn check(
        &self,
        root: &Collapsed<A::Position>,
        node_budget: usize,
    ) -> Result<(), ArenaError> {
        let mut seen = HashSet::new();
        let mut stack = vec![root.clone()];
        while let Some(c) = stack.pop() {
            if seen.len() >= node_budget || !seen.insert(c.clone()) {
                continue;
            }
            stack.extend(self.try_successors(&c)?);
        }
        Ok(())
    }
}

impl<A: Arena> Arena for AlternateTurn<A> {
    type Position = Collapsed<A::Position>;

    fn turn(&self, pos: &Self::Position) -> Turn {
        pos.turn
    }

    /// # Panics
    ///
    /// Panics when a same-turn chain is deeper than the depth budget; use
    /// [`AlternateTurn::check`] or [`AlternateTurn::try_successors`] to
    /// detect that without panicking.
    fn successors(&self, pos: &Self::Position) -> Vec<Self::Position> {
        self.try_successors(pos).unwrap_or_else(|e| panic!("{e}"))
    }

    fn is_terminal(&self, pos: &Self::Position) -> bool {
        self.inner.is_terminal(&pos.pos)
    }
}

impl<G: Game> Game for AlternateTurn<G> {
    type Algebra = G::Algebra;

    fn algebra(&self) -> &G::Algebra {
        self.inner.algebra()
    }

    fn payoff(&self, pos: &Self::Position) -> Option<Value<G>> {
        self.inner.payoff(&pos.pos)
    }

    fn memoizable(&self, pos: &Self::Position) -> bool {
        self.inner.memoizable(&pos.pos)
    }
}

/// A choice of successor index at player positions.
///
/// Opponent positions carry no entry: all of their successors are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy<P: Eq + Hash> {
    choices: HashMap<P, usize>,
}

impl<P: Eq + Hash> Default for Strategy<P> {
    fn default() -> Self {
        Strategy {
            choices: HashMap::new(),
        }
    }
}

impl<P: Clone + Eq + Hash> Strategy<P> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records the choice at `pos`. Returns the previous choice, if any.
    pub fn choose(&mut self, pos: P, index: usize) -> Option<usize> {
        self.choices.insert(pos, index)
    }

    pub fn choice(&self, pos: &P) -> Option<usize> {
        self.choices.get(pos).copied()
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, usize)> {
        self.choices.iter().map(|(p, i)| (p, *i))
    }

    /// Whether this is a strategy for `root`: exactly one valid successor
    /// chosen at every reachable player position and no choice at reachable
    /// opponent positions. Gives up (returning `false`) after `bound`
    /// positions.
    pub fn is_valid_for<A: Arena<Position = P>>(&self, arena: &A, root: &P, bound: usize) -> bool {
        let mut stack = vec![root.clone()];
        let mut visited = 0usize;
        while let Some(p) = stack.pop() {
            visited += 1;
            if visited > bound {
                return false;
            }
            let succ = arena.successors(&p);
            if succ.is_empty() {
                continue;
            }
            match arena.turn(&p) {
                Turn::Player => match self.choice(&p) {
                    Some(i) if i < succ.len() => stack.push(succ[i].clone()),
                    _ => return false,
                },
                Turn::Opponent => {
                    if self.choice(&p).is_some() {
                        return false;
                    }
                    stack.extend(succ);
                }
            }
        }
        true
    }
}

/// Node index of a [`TreeGame`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for NodeId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(NodeId)
    }
}

#[derive(Clone, Debug)]
enum TreeNode<V> {
    Leaf(V),
    Inner(Vec<NodeId>),
}

/// An explicit finite game tree. The root is [`TreeGame::ROOT`]. Leaves take
/// the turn opposite to their parent so that alternation is decided by the
/// inner nodes alone.
#[derive(Clone, Debug)]
pub struct TreeGame<A: TropicalAlgebra> {
    algebra: A,
    nodes: Vec<(Turn, TreeNode<A::Value>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Syntax(#[from] TermParseError),
    #[error("game trees cannot contain unexpanded positions")]
    UnexpandedPosition,
}

impl<A: TropicalAlgebra> TreeGame<A> {
    pub const ROOT: NodeId = NodeId(0);

    /// Builds a tree from a term made of values and player/opponent nodes.
    pub fn from_term<P>(algebra: A, term: &Term<P, A::Value>) -> Result<Self, TreeError> {
        let mut game = TreeGame {
            algebra,
            nodes: Vec::new(),
        };
        game.push_term(term, Turn::Opponent)?;
        Ok(game)
    }

    /// Parses the bracketed text form, e.g. `P[ O[ 2 3 ] O[ 1 9 ] ]`.
    pub fn parse(algebra: A, text: &str) -> Result<Self, TreeError>
    where
        A::Value: FromStr,
    {
        let term: Term<NodeId, A::Value> = text.parse()?;
        Self::from_term(algebra, &term)
    }

    fn push_term<P>(
        &mut self,
        term: &Term<P, A::Value>,
        parent: Turn,
    ) -> Result<NodeId, TreeError> {
        let id = NodeId(self.nodes.len() as u32);
        match term {
            Term::Value(v) => self.nodes.push((parent.flip(), TreeNode::Leaf(v.clone()))),
            Term::Player(ts) | Term::Opponent(ts) => {
                let turn = if matches!(term, Term::Player(_)) {
                    Turn::Player
                } else {
                    Turn::Opponent
                };
                self.nodes.push((turn, TreeNode::Inner(Vec::new())));
                let mut children = Vec::with_capacity(ts.len());
                for t in ts {
                    children.push(self.push_term(t, turn)?);
                }
                self.nodes[id.0 as usize].1 = TreeNode::Inner(children);
            }
            Term::Position(_) => return Err(TreeError::UnexpandedPosition),
        }
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The fully expanded term rooted at `node`.
    pub fn to_term<P>(&self, node: NodeId) -> Term<P, A::Value> {
        let (turn, n) = &self.nodes[node.0 as usize];
        match n {
            TreeNode::Leaf(v) => Term::Value(v.clone()),
            TreeNode::Inner(children) => {
                let ts = children.iter().map(|c| self.to_term(*c)).collect();
                match turn {
                    Turn::Player => Term::Player(ts),
                    Turn::Opponent => Term::Opponent(ts),
                }
            }
        }
    }

    /// Overrides the turn of a node. Used to build non-alternating games.
    pub fn set_turn(&mut self, node: NodeId, turn: Turn) {
        self.nodes[node.0 as usize].0 = turn;
    }
}

impl<A: TropicalAlgebra> Arena for TreeGame<A> {
    type Position = NodeId;

    /// Unknown nodes are terminal player positions without a payoff.
    fn turn(&self, pos: &NodeId) -> Turn {
        self.nodes.get(pos.0 as usize).map_or(Turn::Player, |n| n.0)
    }

    fn successors(&self, pos: &NodeId) -> Vec<NodeId> {
        match self.nodes.get(pos.0 as usize).map(|n| &n.1) {
            Some(TreeNode::Inner(c)) => c.clone(),
            _ => Vec::new(),
        }
    }

    fn is_terminal(&self, pos: &NodeId) -> bool {
        !matches!(
            self.nodes.get(pos.0 as usize).map(|n| &n.1),
            Some(TreeNode::Inner(_))
        )
    }
}

impl<A: TropicalAlgebra> Game for TreeGame<A> {
    type Algebra = A;

    fn algebra(&self) -> &A {
        &self.algebra
    }

    fn payoff(&self, pos: &NodeId) -> Option<A::Value> {
        match &self.nodes.get(pos.0 as usize)?.1 {
            TreeNode::Leaf(v) => Some(v.clone()),
            TreeNode::Inner(_) => None,
        }
    }
}

/// How inner nodes of a random tree get their turns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TurnPattern {
    /// Turns alternate, starting with the given root turn.
    Alternate(Turn),
    /// Every inner node flips a coin.
    Random,
}

/// Shape parameters for [`random_tree`].
#[derive(Clone, Debug)]
pub struct RandomTreeConfig {
    /// Longest root-to-leaf path, in moves.
    pub max_depth: usize,
    /// Each inner node gets between 1 and `max_branching` successors.
    pub max_branching: usize,
    /// Chance that a non-root node above the depth limit is a leaf.
    pub leaf_probability: f64,
    pub turns: TurnPattern,
}

impl RandomTreeConfig {
    pub fn new(max_depth: usize, max_branching: usize) -> Self {
        RandomTreeConfig {
            max_depth,
            max_branching,
            leaf_probability: 0.25,
            turns: TurnPattern::Alternate(Turn::Player),
        }
    }

    pub fn with_turns(mut self, turns: TurnPattern) -> Self {
        self.turns = turns;
        self
    }
}

/// Generates a random finite game tree; leaf payoffs come from `payoff`.
pub fn random_tree<A, R, F>(
    algebra: A,
    config: &RandomTreeConfig,
    rng: &mut R,
    mut payoff: F,
) -> TreeGame<A>
where
    A: TropicalAlgebra,
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> A::Value,
{
    fn grow<V, R: Rng + ?Sized>(
        rng: &mut R,
        config: &RandomTreeConfig,
        depth: usize,
        turn: Turn,
        payoff: &mut dyn FnMut(&mut R) -> V,
    ) -> Term<NodeId, V> {
        let leaf = depth >= config.max_depth
            || config.max_branching == 0
            || (depth > 0 && rng.gen_bool(config.leaf_probability));
        if leaf {
            return Term::Value(payoff(rng));
        }
        let n = rng.gen_range(1..=config.max_branching);
        let children = (0..n)
            .map(|_| {
                let next = match config.turns {
                    TurnPattern::Alternate(_) => turn.flip(),
                    TurnPattern::Random => {
                        if rng.gen_bool(0.5) {
                            Turn::Player
                        } else {
                            Turn::Opponent
                        }
                    }
                };
                grow(rng, config, depth + 1, next, payoff)
            })
            .collect();
        match turn {
            Turn::Player => Term::Player(children),
            Turn::Opponent => Term::Opponent(children),
        }
    }

    let root_turn = match config.turns {
        TurnPattern::Alternate(t) => t,
        TurnPattern::Random => {
            if rng.gen_bool(0.5) {
                Turn::Player
            } else {
                Turn::Opponent
            }
        }
    };
    let term = grow(rng, config, 0, root_turn, &mut payoff);
    TreeGame::from_term(algebra, &term).expect("generated trees contain no positions")
}

//! Error-tolerant parsing as a min-plus game.
//!
//! The player proves that a token span derives a nonterminal by picking a
//! production and a placement of its terminals; the opponent then challenges
//! every nonterminal sub-span between them. A player span that no production
//! can match is terminal and costs its number of non-blank characters, so the
//! game value is the size of the smallest set of unexplained input.
//!
//! Grammars are restricted: every right-hand side has at least one terminal,
//! no two nonterminals are adjacent and no right-hand side is a lone
//! nonterminal. Each move therefore consumes a token and the game is finite.
//!
//! Grammar file format, one production per line:
//!
//! ```text
//! # comment
//! E ::= NUM
//! E ::= '(' E ')'
//! E ::= 'let' IDENT '=' E 'in' E
//! ```
//!
//! `'...'` is a literal token (escapes `\'` and `\\`), `NUM` and `IDENT`
//! match any number or identifier token, and other bare UPPERCASE words are
//! nonterminals.

use std::collections::{HashMap, HashSet};
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::algebra::{Cost, MinPlus};
use crate::arena::{Arena, Game, Turn};
use crate::evaluator::{EvalError, EvalStats, Evaluator, Policy, SearchOptions, Strategy};

/// The example expression grammar shipped with the crate.
pub const EXPR_GRAMMAR: &str = include_str!("../examples/expr.grammar");

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Literal(String),
    Num,
    Ident,
    Nonterminal(usize),
}

impl Symbol {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, Symbol::Nonterminal(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<Symbol>,
    /// 1-based line in the grammar text.
    pub line: usize,
    /// Index among the productions of `lhs`, in file order.
    pub alternative: usize,
    leading: bool,
    trailing: bool,
    /// Maximal runs of terminals, in order.
    groups: Vec<Vec<Symbol>>,
    /// Nonterminals in order.
    nonterminals: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Grammar {
    nonterminals: Vec<String>,
    productions: Vec<Production>,
    by_lhs: Vec<Vec<usize>>,
    literals: HashSet<String>,
    /// Punctuation literals, longest first, for maximal munch.
    punctuation: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: empty right-hand side for {lhs}")]
    Empty { line: usize, lhs: String },
    #[error("line {line}: right-hand side of {lhs} is the lone nonterminal {name}")]
    LoneNonterminal {
        line: usize,
        lhs: String,
        name: String,
    },
    #[error("line {line}: consecutive nonterminals {first} {second} in a production of {lhs}")]
    ConsecutiveNonterminals {
        line: usize,
        lhs: String,
        first: String,
        second: String,
    },
    #[error("line {line}: production of {lhs} has no terminal")]
    NoTerminal { line: usize, lhs: String },
    #[error("line {line}: literal '{literal}' is not a single token")]
    BadLiteral { line: usize, literal: String },
    #[error("line {line}: unknown nonterminal {name}")]
    UnknownNonterminal { line: usize, name: String },
    #[error("grammar has no productions")]
    NoProductions,
}

impl GrammarError {
    /// The 1-based grammar line the error refers to, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            GrammarError::Syntax { line, .. }
            | GrammarError::Empty { line, .. }
            | GrammarError::LoneNonterminal { line, .. }
            | GrammarError::ConsecutiveNonterminals { line, .. }
            | GrammarError::NoTerminal { line, .. }
            | GrammarError::BadLiteral { line, .. }
            | GrammarError::UnknownNonterminal { line, .. } => Some(*line),
            GrammarError::NoProductions => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Item {
    Literal(String),
    Word(String),
}

fn is_nonterminal_name(w: &str) -> bool {
    let mut chars = w.chars();
    chars.next().is_some_and(|c| c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_punctuation(c: char) -> bool {
    !c.is_whitespace() && !is_ident_continue(c)
}

/// Whether a literal lexes as exactly one token of its own.
fn is_token_shaped(lit: &str) -> bool {
    let mut chars = lit.chars();
    match chars.next() {
        None => false,
        Some(c) if c.is_ascii_digit() => lit.chars().all(|c| c.is_ascii_digit()),
        Some(c) if is_ident_start(c) => chars.all(is_ident_continue),
        Some(_) => lit.chars().all(is_punctuation),
    }
}

fn split_line(line: &str, number: usize) -> Result<Vec<Item>, GrammarError> {
    let mut items = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            break;
        } else if c == '\'' {
            chars.next();
            let mut lit = String::new();
            loop {
                match chars.next() {
                    None => {
                        return Err(GrammarError::Syntax {
                            line: number,
                            message: "unterminated literal".into(),
                        })
                    }
                    Some('\'') => break,
                    Some('\\') => match chars.next() {
                        Some(e @ ('\'' | '\\')) => lit.push(e),
                        other => {
                            let message = match other {
                                Some(e) => format!("unknown escape \\{e}"),
                                None => "unterminated literal".into(),
                            };
                            return Err(GrammarError::Syntax {
                                line: number,
                                message,
                            });
                        }
                    },
                    Some(ch) => lit.push(ch),
                }
            }
            items.push(Item::Literal(lit));
        } else {
            let mut word = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || ch == '\'' || ch == '#' {
                    break;
                }
                word.push(ch);
                chars.next();
            }
            items.push(Item::Word(word));
        }
    }
    Ok(items)
}

impl Grammar {
    /// Parses and validates a grammar. Structural errors are reported per
    /// line in file order; unknown nonterminals are reported after the whole
    /// file has been read.
    pub fn load(text: &str) -> Result<Grammar, GrammarError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut defined: HashSet<usize> = HashSet::new();
        let mut first_use: Vec<usize> = Vec::new();
        let mut raw: Vec<(usize, usize, Vec<Symbol>)> = Vec::new();
        let mut intern =
            |name: &str, line: usize, names: &mut Vec<String>, first_use: &mut Vec<usize>| {
                *index.entry(name.to_string()).or_insert_with(|| {
                    names.push(name.to_string());
                    first_use.push(line);
                    names.len() - 1
                })
            };

        for (i, line) in text.lines().enumerate() {
            let number = i + 1;
            let items = split_line(line, number)?;
            if items.is_empty() {
                continue;
            }
            let lhs = match &items[0] {
                Item::Word(w) if is_nonterminal_name(w) && w != "NUM" && w != "IDENT" => w.clone(),
                Item::Word(w) => {
                    return Err(GrammarError::Syntax {
                        line: number,
                        message: format!("`{w}` is not a nonterminal name"),
                    })
                }
                Item::Literal(_) => {
                    return Err(GrammarError::Syntax {
                        line: number,
                        message: "a production must start with a nonterminal".into(),
                    })
                }
            };
            if items.get(1) != Some(&Item::Word("::=".into())) {
                return Err(GrammarError::Syntax {
                    line: number,
                    message: "expected `::=` after the nonterminal".into(),
                });
            }
            let lhs_id = intern(&lhs, number, &mut names, &mut first_use);
            defined.insert(lhs_id);
            let mut rhs = Vec::new();
            for item in &items[2..] {
                let sym = match item {
                    Item::Literal(l) => {
                        if !is_token_shaped(l) {
                            return Err(GrammarError::BadLiteral {
                                line: number,
                                literal: l.clone(),
                            });
                        }
                        Symbol::Literal(l.clone())
                    }
                    Item::Word(w) if w == "NUM" => Symbol::Num,
                    Item::Word(w) if w == "IDENT" => Symbol::Ident,
                    Item::Word(w) if is_nonterminal_name(w) => {
                        Symbol::Nonterminal(intern(w, number, &mut names, &mut first_use))
                    }
                    Item::Word(w) => {
                        return Err(GrammarError::Syntax {
                            line: number,
                            message: format!("unexpected `{w}`"),
                        })
                    }
                };
                rhs.push(sym);
            }
            if rhs.is_empty() {
                return Err(GrammarError::Empty { line: number, lhs });
            }
            if let [Symbol::Nonterminal(n)] = rhs[..] {
                return Err(GrammarError::LoneNonterminal {
                    line: number,
                    lhs,
                    name: names[n].clone(),
                });
            }
            for pair in rhs.windows(2) {
                if let [Symbol::Nonterminal(a), Symbol::Nonterminal(b)] = pair {
                    return Err(GrammarError::ConsecutiveNonterminals {
                        line: number,
                        lhs,
                        first: names[*a].clone(),
                        second: names[*b].clone(),
                    });
                }
            }
            if !rhs.iter().any(Symbol::is_terminal) {
                return Err(GrammarError::NoTerminal { line: number, lhs });
            }
            raw.push((number, lhs_id, rhs));
        }

        if raw.is_empty() {
            return Err(GrammarError::NoProductions);
        }
        // Unknown references, in order of first mention.
        for (id, name) in names.iter().enumerate() {
            if !defined.contains(&id) {
                return Err(GrammarError::UnknownNonterminal {
                    line: first_use[id],
                    name: name.clone(),
                });
            }
        }

        let mut by_lhs = vec![Vec::new(); names.len()];
        let mut literals = HashSet::new();
        let mut productions = Vec::with_capacity(raw.len());
        for (line, lhs, rhs) in raw {
            for s in &rhs {
                if let Symbol::Literal(l) = s {
                    literals.insert(l.clone());
                }
            }
            let mut groups: Vec<Vec<Symbol>> = Vec::new();
            let mut nonterminals = Vec::new();
            let mut in_group = false;
            for s in &rhs {
                match s {
                    Symbol::Nonterminal(n) => {
                        nonterminals.push(*n);
                        in_group = false;
                    }
                    t => {
                        if !in_group {
                            groups.push(Vec::new());
                            in_group = true;
                        }
                        groups.last_mut().unwrap().push(t.clone());
                    }
                }
            }
            let alternative = by_lhs[lhs].len();
            by_lhs[lhs].push(productions.len());
            productions.push(Production {
                lhs,
                leading: rhs[0].is_terminal(),
                trailing: rhs[rhs.len() - 1].is_terminal(),
                rhs,
                line,
                alternative,
                groups,
                nonterminals,
            });
        }
        let mut punctuation: Vec<String> = literals
            .iter()
            .filter(|l| l.chars().next().is_some_and(is_punctuation))
            .cloned()
            .collect();
        punctuation.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok(Grammar {
            nonterminals: names,
            productions,
            by_lhs,
            literals,
            punctuation,
        })
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn nonterminal(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|n| n == name)
    }

    /// The first nonterminal defined in the file.
    pub fn default_start(&self) -> usize {
        self.productions[0].lhs
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn productions_of(&self, nt: usize) -> impl Iterator<Item = &Production> {
        self.by_lhs[nt].iter().map(|&i| &self.productions[i])
    }

    pub fn literals(&self) -> &HashSet<String> {
        &self.literals
    }

    /// `E.3`: the nonterminal and the production's alternative index.
    pub fn label(&self, production: usize) -> String {
        let p = &self.productions[production];
        format!("{}.{}", self.nonterminals[p.lhs], p.alternative)
    }

    pub fn display_production(&self, production: usize) -> String {
        let p = &self.productions[production];
        let mut out = format!("{} ::=", self.nonterminals[p.lhs]);
        for s in &p.rhs {
            out.push(' ');
            match s {
                Symbol::Literal(l) => {
                    out.push('\'');
                    out.push_str(&l.replace('\\', "\\\\").replace('\'', "\\'"));
                    out.push('\'');
                }
                Symbol::Num => out.push_str("NUM"),
                Symbol::Ident => out.push_str("IDENT"),
                Symbol::Nonterminal(n) => out.push_str(&self.nonterminals[*n]),
            }
        }
        out
    }

    /// Splits `input` into tokens: digit runs are numbers, identifier-shaped
    /// words are identifiers, and punctuation takes the longest grammar
    /// literal that matches or else a single character. Numbers and words
    /// equal to a grammar literal are that literal.
    pub fn tokenize(&self, input: &str) -> TokenString {
        let mut tokens = Vec::new();
        let mut chars = input.char_indices().peekable();
        let mut char_pos = 0usize;
        while let Some(&(start, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                char_pos += 1;
                continue;
            }
            let char_start = char_pos;
            let (kind, end) = if c.is_ascii_digit() || is_ident_start(c) {
                let digits = c.is_ascii_digit();
                let mut end = start;
                while let Some(&(i, ch)) = chars.peek() {
                    let more = if digits {
                        ch.is_ascii_digit()
                    } else {
                        is_ident_continue(ch)
                    };
                    if !more {
                        break;
                    }
                    end = i + ch.len_utf8();
                    chars.next();
                    char_pos += 1;
                }
                let text = &input[start..end];
                let kind = if self.literals.contains(text) {
                    TokenKind::Literal
                } else if digits {
                    TokenKind::Num
                } else {
                    TokenKind::Ident
                };
                (kind, end)
            } else {
                let rest = &input[start..];
                let len = self
                    .punctuation
                    .iter()
                    .find(|l| rest.starts_with(l.as_str()))
                    .map_or(c.len_utf8(), |l| l.len());
                let end = start + len;
                while chars.peek().is_some_and(|&(i, _)| i < end) {
                    chars.next();
                    char_pos += 1;
                }
                (TokenKind::Literal, end)
            };
            tokens.push(Token {
                kind,
                text: input[start..end].to_string(),
                byte_start: start,
                byte_end: end,
                char_start,
                char_end: char_pos,
            });
        }
        let mut nonblank_prefix = Vec::with_capacity(tokens.len() + 1);
        nonblank_prefix.push(0);
        let mut sum = 0;
        for t in &tokens {
            sum += (t.char_end - t.char_start) as u64;
            nonblank_prefix.push(sum);
        }
        TokenString {
            source: input.to_string(),
            char_len: char_pos,
            tokens,
            nonblank_prefix,
        }
    }
}

impl std::str::FromStr for Grammar {
    type Err = GrammarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Grammar::load(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Literal,
    Num,
    Ident,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub byte_start: usize,
    pub byte_end: usize,
    pub char_start: usize,
    pub char_end: usize,
}

impl Token {
    fn matches(&self, sym: &Symbol) -> bool {
        match sym {
            Symbol::Literal(l) => self.kind == TokenKind::Literal && self.text == *l,
            Symbol::Num => self.kind == TokenKind::Num,
            Symbol::Ident => self.kind == TokenKind::Ident,
            Symbol::Nonterminal(_) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenString {
    pub source: String,
    pub tokens: Vec<Token>,
    /// Length of `source` in characters.
    pub char_len: usize,
    nonblank_prefix: Vec<u64>,
}

impl TokenString {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Non-blank characters covered by tokens `start..end`.
    pub fn nonblank_size(&self, start: usize, end: usize) -> u64 {
        self.nonblank_prefix[end] - self.nonblank_prefix[start]
    }

    /// Character range of tokens `start..end`. An empty range is the point
    /// just before token `start`, or the end of the input.
    pub fn char_range(&self, start: usize, end: usize) -> (usize, usize) {
        if start < end {
            (self.tokens[start].char_start, self.tokens[end - 1].char_end)
        } else {
            let at = self.tokens.get(start).map_or(self.char_len, |t| t.char_start);
            (at, at)
        }
    }

    /// The source text of tokens `start..end`, inner whitespace included.
    pub fn excerpt(&self, start: usize, end: usize) -> &str {
        if start < end {
            &self.source[self.tokens[start].byte_start..self.tokens[end - 1].byte_end]
        } else {
            ""
        }
    }
}

/// A nonterminal over the token span `start..end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: u32,
    pub end: u32,
    pub nt: u32,
}

/// Positions of the parsing game. Opponent positions also record the
/// production and parent span that produced them, so distinct moves are
/// distinct positions and trees can be rebuilt from a strategy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ParsePos {
    Player(Span),
    Opponent {
        production: u32,
        parent: Span,
        children: SmallVec<[Span; 3]>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unknown start symbol {0}")]
    UnknownStart(String),
    #[error("payoff requested at non-terminal position {0:?}")]
    NotTerminal(ParsePos),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The game for one grammar and one token string.
pub struct ParseGame<'a> {
    grammar: &'a Grammar,
    tokens: &'a TokenString,
}

impl<'a> ParseGame<'a> {
    pub fn new(grammar: &'a Grammar, tokens: &'a TokenString) -> Self {
        ParseGame { grammar, tokens }
    }

    pub fn root(&self, start: usize) -> ParsePos {
        ParsePos::Player(Span {
            start: 0,
            end: self.tokens.len() as u32,
            nt: start as u32,
        })
    }

    fn group_matches(&self, group: &[Symbol], at: usize) -> bool {
        group
            .iter()
            .enumerate()
            .all(|(k, s)| self.tokens.tokens.get(at + k).is_some_and(|t| t.matches(s)))
    }

    /// Every placement of `p`'s terminals over `start..end`, as the spans
    /// left for its nonterminals. Leading and trailing terminals are anchored
    /// to the span boundaries; interior terminal groups float left to right.
    fn placements(
        &self,
        p: &Production,
        start: usize,
        end: usize,
    ) -> Vec<SmallVec<[(usize, usize); 3]>> {
        let mut out = Vec::new();
        let mut groups = &p.groups[..];
        let mut pos = start;
        if p.leading {
            let g = &groups[0];
            if pos + g.len() > end || !self.group_matches(g, pos) {
                return out;
            }
            pos += g.len();
            groups = &groups[1..];
        }
        if p.nonterminals.is_empty() {
            if pos == end {
                out.push(SmallVec::new());
            }
            return out;
        }
        let trailing = if p.trailing {
            let g = groups.last().unwrap();
            if end < pos + g.len() || !self.group_matches(g, end - g.len()) {
                return out;
            }
            groups = &groups[..groups.len() - 1];
            g.len()
        } else {
            0
        };
        let mut current = SmallVec::new();
        self.place_interior(groups, pos, end - trailing, &mut current, &mut out);
        out
    }

    fn place_interior(
        &self,
        groups: &[Vec<Symbol>],
        pos: usize,
        end: usize,
        current: &mut SmallVec<[(usize, usize); 3]>,
        out: &mut Vec<SmallVec<[(usize, usize); 3]>>,
    ) {
        let Some((g, rest)) = groups.split_first() else {
            current.push((pos, end));
            out.push(current.clone());
            current.pop();
            return;
        };
        let needed: usize = rest.iter().map(Vec::len).sum::<usize>() + g.len();
        let mut q = pos;
        while q + needed <= end {
            if self.group_matches(g, q) {
                current.push((pos, q));
                self.place_interior(rest, q + g.len(), end, current, out);
                current.pop();
            }
            q += 1;
        }
    }

    /// The payoff of a terminal position, or an error for any other.
    pub fn checked_payoff(&self, pos: &ParsePos) -> Result<Cost, ParseError> {
        if !self.successors(pos).is_empty() {
            return Err(ParseError::NotTerminal(pos.clone()));
        }
        Ok(self.payoff(pos).expect("terminal positions have payoffs"))
    }
}

impl Arena for ParseGame<'_> {
    type Position = ParsePos;

    fn turn(&self, pos: &ParsePos) -> Turn {
        match pos {
            ParsePos::Player(_) => Turn::Player,
            ParsePos::Opponent { .. } => Turn::Opponent,
        }
    }

    fn successors(&self, pos: &ParsePos) -> Vec<ParsePos> {
        match pos {
            ParsePos::Player(span) => {
                let mut out = Vec::new();
                for &pi in &self.grammar.by_lhs[span.nt as usize] {
                    let p = &self.grammar.productions[pi];
                    for placement in self.placements(p, span.start as usize, span.end as usize) {
                        let children = placement
                            .iter()
                            .zip(&p.nonterminals)
                            .map(|(&(s, e), &nt)| Span {
                                start: s as u32,
                                end: e as u32,
                                nt: nt as u32,
                            })
                            .collect();
                        out.push(ParsePos::Opponent {
                            production: pi as u32,
                            parent: *span,
                            children,
                        });
                    }
                }
                out
            }
            ParsePos::Opponent { children, .. } => {
                children.iter().map(|&s| ParsePos::Player(s)).collect()
            }
        }
    }

    fn is_terminal(&self, pos: &ParsePos) -> bool {
        match pos {
            ParsePos::Player(_) => self.successors(pos).is_empty(),
            ParsePos::Opponent { children, .. } => children.is_empty(),
        }
    }
}

impl Game for ParseGame<'_> {
    type Algebra = MinPlus;

    fn algebra(&self) -> &MinPlus {
        &MinPlus
    }

    fn payoff(&self, pos: &ParsePos) -> Option<Cost> {
        match pos {
            ParsePos::Player(s) => Some(Cost::Finite(
                self.tokens.nonblank_size(s.start as usize, s.end as usize),
            )),
            ParsePos::Opponent { children, .. } if children.is_empty() => Some(Cost::Finite(0)),
            ParsePos::Opponent { .. } => None,
        }
    }

    fn memoizable(&self, pos: &ParsePos) -> bool {
        matches!(pos, ParsePos::Player(_))
    }
}

/// A derivation with unmatched leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParseTree {
    Node {
        production: usize,
        start: usize,
        end: usize,
        children: Vec<ParseTree>,
    },
    Unmatched {
        nt: usize,
        start: usize,
        end: usize,
    },
}

impl ParseTree {
    pub fn span(&self) -> (usize, usize) {
        match self {
            ParseTree::Node { start, end, .. } | ParseTree::Unmatched { start, end, .. } => {
                (*start, *end)
            }
        }
    }

    /// Unmatched leaves, left to right.
    pub fn unmatched(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        fn walk(t: &ParseTree, out: &mut Vec<(usize, usize, usize)>) {
            match t {
                ParseTree::Node { children, .. } => children.iter().for_each(|c| walk(c, out)),
                ParseTree::Unmatched { nt, start, end } => out.push((*nt, *start, *end)),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Bracketed text: `E.2[ ( E.0[ 1 ] ) ]`, with unmatched spans written
    /// `E?{if true}`.
    pub fn render(&self, grammar: &Grammar, tokens: &TokenString) -> String {
        let mut out = String::new();
        self.render_into(grammar, tokens, &mut out);
        out
    }

    fn render_into(&self, grammar: &Grammar, tokens: &TokenString, out: &mut String) {
        match self {
            ParseTree::Unmatched { nt, start, end } => {
                let words: Vec<&str> = tokens.tokens[*start..*end]
                    .iter()
                    .map(|t| t.text.as_str())
                    .collect();
                out.push_str(&format!(
                    "{}?{{{}}}",
                    grammar.nonterminals[*nt],
                    words.join(" ")
                ));
            }
            ParseTree::Node {
                production,
                start,
                end,
                children,
            } => {
                out.push_str(&grammar.label(*production));
                out.push('[');
                let p = &grammar.productions[*production];
                let mut children = children.iter();
                let mut at = *start;
                for s in &p.rhs {
                    out.push(' ');
                    if s.is_terminal() {
                        out.push_str(&tokens.tokens[at].text);
                        at += 1;
                    } else {
                        let child = children.next().expect("one child per nonterminal");
                        child.render_into(grammar, tokens, out);
                        at = child.span().1;
                    }
                }
                debug_assert_eq!(at, *end);
                out.push_str(" ]");
            }
        }
    }
}

/// An unexplained part of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorSpan {
    pub nonterminal: String,
    pub char_start: usize,
    pub char_end: usize,
    pub excerpt: String,
    /// Non-blank characters in the span.
    pub cost: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    pub policy: Policy,
    pub prune: bool,
    pub memo: bool,
    /// Cap on the number of trees reported under AM.
    pub max_trees: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            policy: Policy::FirstMinimal,
            prune: true,
            memo: true,
            max_trees: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParseOutcome {
    pub cost: u64,
    pub tokens: TokenString,
    pub trees: Vec<ParseTree>,
    /// Error spans of each tree, in the same order as `trees`.
    pub error_spans: Vec<Vec<ErrorSpan>>,
    pub strategies: Vec<Strategy<ParsePos>>,
    pub stats: EvalStats,
    /// More optimal trees exist than were reported.
    pub overflow: bool,
}

/// Rebuilds the derivation a strategy picks below `pos`.
pub fn tree_of(
    game: &ParseGame<'_>,
    pos: &ParsePos,
    strategy: &Strategy<ParsePos>,
) -> Result<ParseTree, ParseError> {
    let ParsePos::Player(span) = pos else {
        return Err(ParseError::Eval(EvalError::StrategyIncomplete(format!(
            "{pos:?} is not a player position"
        ))));
    };
    let succ = game.successors(pos);
    if succ.is_empty() {
        return Ok(ParseTree::Unmatched {
            nt: span.nt as usize,
            start: span.start as usize,
            end: span.end as usize,
        });
    }
    let choice = strategy
        .choice(pos)
        .filter(|&i| i < succ.len())
        .ok_or_else(|| EvalError::StrategyIncomplete(format!("{pos:?}")))?;
    let ParsePos::Opponent {
        production,
        children,
        ..
    } = &succ[choice]
    else {
        unreachable!("player successors are opponent positions")
    };
    let children = children
        .iter()
        .map(|&c| tree_of(game, &ParsePos::Player(c), strategy))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ParseTree::Node {
        production: *production as usize,
        start: span.start as usize,
        end: span.end as usize,
        children,
    })
}

/// Error spans of a tree.
pub fn error_spans(grammar: &Grammar, tokens: &TokenString, tree: &ParseTree) -> Vec<ErrorSpan> {
    tree.unmatched()
        .into_iter()
        .map(|(nt, start, end)| {
            let (char_start, char_end) = tokens.char_range(start, end);
            ErrorSpan {
                nonterminal: grammar.nonterminals[nt].clone(),
                char_start,
                char_end,
                excerpt: tokens.excerpt(start, end).to_string(),
                cost: tokens.nonblank_size(start, end),
            }
        })
        .collect()
}

/// The cheapest explanation of `input` as `start`.
pub fn best_parse(
    grammar: &Grammar,
    start: &str,
    input: &str,
    options: ParseOptions,
) -> Result<ParseOutcome, ParseError> {
    let start = grammar
        .nonterminal(start)
        .ok_or_else(|| ParseError::UnknownStart(start.to_string()))?;
    let tokens = grammar.tokenize(input);
    let game = ParseGame::new(grammar, &tokens);
    let root = game.root(start);
    let search = SearchOptions {
        prune: options.prune,
        memo: options.memo,
        policy: options.policy,
        max_depth: None,
        max_strategies: options.max_trees.max(1),
    };
    let result = Evaluator::new(&game, search).evaluate(&root)?;
    let cost = result.value.finite().expect("parse costs are finite");
    let mut trees = Vec::with_capacity(result.strategies.len());
    for s in &result.strategies {
        let tree = tree_of(&game, &root, s)?;
        if !trees.contains(&tree) {
            trees.push(tree);
        }
    }
    let error_spans = trees
        .iter()
        .map(|t| error_spans(grammar, &tokens, t))
        .collect();
    Ok(ParseOutcome {
        cost,
        trees,
        error_spans,
        strategies: result.strategies,
        stats: result.stats,
        overflow: result.overflow,
        tokens: tokens.clone(),
    })
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.productions.len() {
            writeln!(f, "{}", self.display_production(i))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::eval_exhaustive;

    fn expr() -> Grammar {
        Grammar::load(EXPR_GRAMMAR).unwrap()
    }

    fn kinds(ts: &TokenString) -> Vec<(TokenKind, &str)> {
        ts.tokens
            .iter()
            .map(|t| (t.kind, t.text.as_str()))
            .collect()
    }

    #[test]
    fn expression_grammar_loads() {
        let g = expr();
        assert_eq!(g.nonterminals(), ["E"]);
        assert_eq!(g.productions().len(), 8);
        assert_eq!(g.display_production(3), "E ::= 'let' IDENT '=' E 'in' E");
        let again = Grammar::load(&g.to_string()).unwrap();
        let rhs = |g: &Grammar| {
            g.productions()
                .iter()
                .map(|p| p.rhs.clone())
                .collect::<Vec<_>>()
        };
        assert_eq!(rhs(&again), rhs(&g));
    }

    #[test]
    fn restrictions_are_enforced() {
        let err = |t: &str| Grammar::load(t).unwrap_err();
        assert!(matches!(
            err("E ::= F\nF ::= 'x'"),
            GrammarError::LoneNonterminal { line: 1, .. }
        ));
        assert!(matches!(
            err("E ::= E F\nF ::= 'x'"),
            GrammarError::ConsecutiveNonterminals { line: 1, .. }
        ));
        assert!(matches!(err("E ::="), GrammarError::Empty { line: 1, .. }));
        assert!(matches!(
            err("E ::= 'x' F"),
            GrammarError::UnknownNonterminal { line: 1, .. }
        ));
        assert!(matches!(
            err("E ::= 'a b'"),
            GrammarError::BadLiteral { .. }
        ));
        assert!(matches!(err("E ::= 'a+'"), GrammarError::BadLiteral { .. }));
        assert!(matches!(err("E ::= ''"), GrammarError::BadLiteral { .. }));
        assert!(matches!(err("E ::= 'x"), GrammarError::Syntax { .. }));
        assert!(matches!(err("E = 'x'"), GrammarError::Syntax { .. }));
        assert!(matches!(err("e ::= 'x'"), GrammarError::Syntax { .. }));
        assert!(matches!(err("# nothing\n"), GrammarError::NoProductions));
        // Structural problems win over unknown references on later lines.
        assert!(matches!(
            err("E ::= 'x' F\nE ::= E E"),
            GrammarError::ConsecutiveNonterminals { line: 2, .. }
        ));
    }

    #[test]
    fn literal_escapes_and_comments() {
        let g = Grammar::load("S ::= '\\'' S '#' # trailing\nS ::= '\\\\'").unwrap();
        assert_eq!(g.productions()[0].rhs[0], Symbol::Literal("'".into()));
        assert_eq!(g.productions()[0].rhs[2], Symbol::Literal("#".into()));
        assert_eq!(g.productions()[1].rhs[0], Symbol::Literal("\\".into()));
        assert_eq!(g.display_production(0), "S ::= '\\'' S '#'");
    }

    #[test]
    fn tokenizer() {
        let g = expr();
        let ts = g.tokenize("1 + 2 + 3");
        assert_eq!(
            kinds(&ts),
            vec![
                (TokenKind::Num, "1"),
                (TokenKind::Literal, "+"),
                (TokenKind::Num, "2"),
                (TokenKind::Literal, "+"),
                (TokenKind::Num, "3")
            ]
        );
        assert_eq!(ts.nonblank_size(0, 5), 5);
        let ts = g.tokenize("if true");
        assert_eq!(
            kinds(&ts),
            vec![(TokenKind::Literal, "if"), (TokenKind::Ident, "true")]
        );
        assert_eq!(ts.nonblank_size(0, 2), 6);
        let ts = g.tokenize("");
        assert!(ts.is_empty());
        assert_eq!(ts.nonblank_size(0, 0), 0);
        let ts = g.tokenize("84=42 é?");
        assert_eq!(kinds(&ts)[3], (TokenKind::Ident, "é"));
        assert_eq!(kinds(&ts)[4], (TokenKind::Literal, "?"));
        assert_eq!((ts.tokens[4].char_start, ts.tokens[4].char_end), (7, 8));
    }

    #[test]
    fn longest_literal_wins() {
        let g = Grammar::load("S ::= NUM '==' NUM\nS ::= NUM '=' NUM").unwrap();
        let ts = g.tokenize("1===2");
        assert_eq!(
            kinds(&ts)[1..3],
            [(TokenKind::Literal, "=="), (TokenKind::Literal, "=")]
        );
    }

    #[test]
    fn player_successors_follow_production_then_placement_order() {
        let g = expr();
        let ts = g.tokenize("1+2+3");
        let game = ParseGame::new(&g, &ts);
        let succ = game.successors(&game.root(0));
        let spans: Vec<Vec<(u32, u32)>> = succ
            .iter()
            .map(|p| match p {
                ParsePos::Opponent { children, .. } => {
                    children.iter().map(|s| (s.start, s.end)).collect()
                }
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(spans, vec![vec![(0, 1), (2, 5)], vec![(0, 3), (4, 5)]]);
    }

    #[test]
    fn single_token_and_empty_span() {
        let g = expr();
        let ts = g.tokenize("1");
        let game = ParseGame::new(&g, &ts);
        let succ = game.successors(&game.root(0));
        assert_eq!(succ.len(), 1);
        assert!(game.successors(&succ[0]).is_empty());
        assert_eq!(game.checked_payoff(&succ[0]).unwrap(), Cost::Finite(0));
        let empty = ParsePos::Player(Span {
            start: 1,
            end: 1,
            nt: 0,
        });
        assert!(game.successors(&empty).is_empty());
        assert_eq!(game.checked_payoff(&empty).unwrap(), Cost::Finite(0));
        assert!(matches!(
            game.checked_payoff(&game.root(0)),
            Err(ParseError::NotTerminal(_))
        ));
    }

    #[test]
    fn unmatched_span_pays_its_size() {
        let g = expr();
        let ts = g.tokenize("if true");
        let game = ParseGame::new(&g, &ts);
        let root = game.root(0);
        assert_eq!(game.checked_payoff(&root).unwrap(), Cost::Finite(6));
        assert_eq!(
            eval_exhaustive(&game, &root).unwrap().value,
            Cost::Finite(6)
        );
    }

    #[test]
    fn ambiguous_sum_has_two_trees() {
        let g = expr();
        let options = ParseOptions {
            policy: Policy::AllMinimals,
            ..Default::default()
        };
        let out = best_parse(&g, "E", "1 + 2 + 3", options).unwrap();
        assert_eq!(out.cost, 0);
        assert_eq!(out.trees.len(), 2);
        let rendered: Vec<String> = out
            .trees
            .iter()
            .map(|t| t.render(&g, &out.tokens))
            .collect();
        assert!(rendered.contains(&"E.6[ E.0[ 1 ] + E.6[ E.0[ 2 ] + E.0[ 3 ] ] ]".to_string()));
    }

    #[test]
    fn error_spans_and_rendering() {
        let g = expr();
        let out = best_parse(&g, "E", "(1+)", ParseOptions::default()).unwrap();
        assert_eq!(out.cost, 0);
        assert_eq!(
            out.trees[0].render(&g, &out.tokens),
            "E.2[ ( E.6[ E.0[ 1 ] + E?{} ] ) ]"
        );
        let spans = &out.error_spans[0];
        assert_eq!(spans.len(), 1);
        assert_eq!(
            (
                spans[0].char_start,
                spans[0].char_end,
                spans[0].excerpt.as_str()
            ),
            (3, 3, "")
        );

        let out = best_parse(&g, "E", "1 +  if x", ParseOptions::default()).unwrap();
        assert_eq!(out.cost, 3);
        assert_eq!(out.error_spans[0][0].excerpt, "if x");
        assert_eq!(
            (
                out.error_spans[0][0].char_start,
                out.error_spans[0][0].char_end
            ),
            (5, 9)
        );
    }

    #[test]
    fn unknown_start_symbol() {
        assert!(matches!(
            best_parse(&expr(), "X", "1", ParseOptions::default()),
            Err(ParseError::UnknownStart(_))
        ));
    }
}

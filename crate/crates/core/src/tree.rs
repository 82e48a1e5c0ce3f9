//! Finitely described well-founded trees and the limsup rank.
//!
//! A [`TreeSchema`] node lists finitely many subtrees `T_0..T_{k-1}` and a
//! [`Tail`] describing every `T_n` with `n ≥ k`. Two tail forms exist:
//!
//! * `Repeat(S)`: `T_n = S` for all `n ≥ k`.
//! * `Ladder(S)`: `T_{k+j} = wrap^j(S)`, where `wrap(S)` is a root whose
//!   subtrees are all `S`. Ranks along a ladder increase by one per rung,
//!   which is what makes `ω+1`, `ω+2`, … reachable.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalSeqSchema};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    Repeat(Box<TreeSchema>),
    Ladder(Box<TreeSchema>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TreeSchema {
    Empty,
    Node { children: Vec<TreeSchema>, tail: Tail },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("the empty tree has no subtrees")]
    EmptyTree,
    #[error("tree syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("no schema of rank {0}: ranks must be successor ordinals below w^2")]
    UnreachableRank(Ordinal),
}

impl TreeSchema {
    /// A single root.
    pub fn root() -> Self {
        Self::node(vec![], TreeSchema::Empty)
    }

    pub fn node(children: Vec<TreeSchema>, tail: TreeSchema) -> Self {
        TreeSchema::Node { children, tail: Tail::Repeat(Box::new(tail)) }
    }

    pub fn ladder(children: Vec<TreeSchema>, seed: TreeSchema) -> Self {
        TreeSchema::Node { children, tail: Tail::Ladder(Box::new(seed)) }
    }

    /// A root with ω copies of `s`.
    pub fn wrap(s: TreeSchema) -> Self {
        Self::node(vec![], s)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, TreeSchema::Empty)
    }

    /// `T_n`.
    pub fn nth_subtree(&self, n: usize) -> Result<TreeSchema, TreeError> {
        match self {
            TreeSchema::Empty => Err(TreeError::EmptyTree),
            TreeSchema::Node { children, tail } => {
                if let Some(c) = children.get(n) {
                    return Ok(c.clone());
                }
                let j = n - children.len();
                Ok(match tail {
                    Tail::Repeat(s) => (**s).clone(),
                    Tail::Ladder(seed) => {
                        (0..j).fold((**seed).clone(), |acc, _| TreeSchema::wrap(acc))
                    }
                })
            }
        }
    }

    /// The ranks `⟨|T_n|_ls⟩` as a finitely described sequence.
    pub fn child_ranks(&self) -> Option<OrdinalSeqSchema> {
        match self {
            TreeSchema::Empty => None,
            TreeSchema::Node { children, tail } => {
                let prefix = children.iter().map(limsup_rank).collect();
                Some(match tail {
                    Tail::Repeat(s) => OrdinalSeqSchema::constant(prefix, limsup_rank(s)),
                    Tail::Ladder(seed) => OrdinalSeqSchema::ascending(prefix, limsup_rank(seed)),
                })
            }
        }
    }

    /// Number of nodes on the longest branch; `None` when a ladder makes
    /// branch lengths unbounded.
    pub fn height(&self) -> Option<usize> {
        match self {
            TreeSchema::Empty => Some(0),
            TreeSchema::Node { children, tail } => {
                let t = match tail {
                    Tail::Repeat(s) => s.height()?,
                    Tail::Ladder(_) => return None,
                };
                let mut h = t;
                for c in children {
                    h = h.max(c.height()?);
                }
                Some(h + 1)
            }
        }
    }

    /// Same tree with the finite children list reordered by `perm`.
    pub fn permute_children(&self, perm: &[usize]) -> TreeSchema {
        match self {
            TreeSchema::Empty => TreeSchema::Empty,
            TreeSchema::Node { children, tail } => {
                assert_eq!(perm.len(), children.len(), "permutation length");
                TreeSchema::Node {
                    children: perm.iter().map(|&i| children[i].clone()).collect(),
                    tail: tail.clone(),
                }
            }
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            TreeSchema::Empty => out.push('0'),
            TreeSchema::Node { children, tail } => {
                out.push('(');
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    c.write(out);
                }
                let (mark, s) = match tail {
                    Tail::Repeat(s) => ('~', s),
                    Tail::Ladder(s) => ('^', s),
                };
                if mark == '^' || !s.is_empty() {
                    if !children.is_empty() {
                        out.push(' ');
                    }
                    out.push(mark);
                    s.write(out);
                }
                out.push(')');
            }
        }
    }
}

/// Borrowed view of the subtree `wrap^wraps(tree)`, so that ladder rungs
/// far down a tail are never materialized. `wraps == u64::MAX` stands for
/// a rung deeper than anything an evaluation will reach.
#[derive(Clone, Copy, Debug)]
pub struct SubtreeRef<'a> {
    pub tree: &'a TreeSchema,
    pub wraps: u64,
}

impl<'a> SubtreeRef<'a> {
    pub fn new(tree: &'a TreeSchema) -> Self {
        SubtreeRef { tree, wraps: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.wraps == 0 && self.tree.is_empty()
    }

    /// Every subtree is empty (a single root).
    pub fn is_leaf(&self) -> bool {
        match (self.wraps, self.tree) {
            (0, TreeSchema::Node { children, tail: Tail::Repeat(t) }) => {
                t.is_empty() && children.iter().all(TreeSchema::is_empty)
            }
            (1, TreeSchema::Empty) => true,
            _ => false,
        }
    }

    /// `T_n`; `None` stands for an index beyond `u64`.
    pub fn child(&self, n: Option<u64>) -> SubtreeRef<'a> {
        if self.wraps > 0 {
            let wraps = if self.wraps == u64::MAX { u64::MAX } else { self.wraps - 1 };
            return SubtreeRef { tree: self.tree, wraps };
        }
        match self.tree {
            TreeSchema::Empty => *self,
            TreeSchema::Node { children, tail } => {
                if let Some(c) = n.and_then(|i| usize::try_from(i).ok()).and_then(|i| children.get(i)) {
                    return SubtreeRef::new(c);
                }
                match tail {
                    Tail::Repeat(s) => SubtreeRef::new(s),
                    Tail::Ladder(seed) => {
                        let k = children.len() as u64;
                        let wraps = n.map_or(u64::MAX, |i| i - k);
                        SubtreeRef { tree: seed, wraps }
                    }
                }
            }
        }
    }
}

/// `|T|_ls`: 0 for the empty tree, otherwise
/// `max(sup_n |T_n|_ls, limsup_n |T_n|_ls + 1)`.
pub fn limsup_rank(t: &TreeSchema) -> Ordinal {
    match t.child_ranks() {
        None => Ordinal::zero(),
        Some(seq) => {
            let (sup, limsup) = seq.sup_limsup();
            sup.max(limsup.successor())
        }
    }
}

/// A schema whose limsup rank is exactly `alpha`.
///
/// Reachable ranks are 0 and the successors below `ω^2`.
pub fn tree_of_rank(alpha: &Ordinal) -> Result<TreeSchema, TreeError> {
    if alpha.is_zero() {
        return Ok(TreeSchema::Empty);
    }
    let unreachable = || TreeError::UnreachableRank(alpha.clone());
    let beta = alpha.predecessor().ok_or_else(unreachable)?;
    if beta.is_zero() {
        return Ok(TreeSchema::root());
    }
    if beta.is_successor() {
        return Ok(TreeSchema::wrap(tree_of_rank(&beta)?));
    }
    // beta = mu + ω with mu a multiple of ω; a ladder seeded at rank mu+1
    // has limsup (mu+1)+ω = beta.
    if beta.degree() != Some(1) {
        return Err(unreachable());
    }
    let c = beta.coefficient(1);
    let mu = if c > 1 {
        Ordinal::from_terms(&[(1, c - 1)]).expect("normal form")
    } else {
        Ordinal::zero()
    };
    Ok(TreeSchema::ladder(vec![], tree_of_rank(&mu.successor())?))
}

/// Random schema of bounded height and width, with occasional ladders.
pub fn random_tree<R: Rng>(rng: &mut R, max_height: usize) -> TreeSchema {
    if max_height == 0 || rng.gen_ratio(1, 5) {
        return TreeSchema::Empty;
    }
    let k = rng.gen_range(0..=3);
    let children = (0..k).map(|_| random_tree(rng, max_height - 1)).collect();
    let tail = random_tree(rng, max_height - 1);
    if max_height >= 2 && rng.gen_ratio(1, 8) {
        TreeSchema::ladder(children, tail)
    } else {
        TreeSchema::node(children, tail)
    }
}

/// Random nonempty schema.
pub fn random_nonempty_tree<R: Rng>(rng: &mut R, max_height: usize) -> TreeSchema {
    loop {
        let t = random_tree(rng, max_height.max(1));
        if !t.is_empty() {
            return t;
        }
    }
}

impl fmt::Display for TreeSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(&mut s);
        f.write_str(&s)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> TreeError {
        TreeError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    // Iterative would be nicer for adversarial input; nesting depth is
    // bounded by the input length and CLI inputs are small.
    fn tree(&mut self) -> Result<TreeSchema, TreeError> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(TreeSchema::Empty)
            }
            Some(b'(') => {
                self.pos += 1;
                let mut children = Vec::new();
                loop {
                    match self.peek() {
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(TreeSchema::node(children, TreeSchema::Empty));
                        }
                        Some(m @ (b'~' | b'^')) => {
                            self.pos += 1;
                            let t = self.tree()?;
                            if self.peek() != Some(b')') {
                                return Err(self.err("expected ')' after tail"));
                            }
                            self.pos += 1;
                            return Ok(if m == b'~' {
                                TreeSchema::node(children, t)
                            } else {
                                TreeSchema::ladder(children, t)
                            });
                        }
                        None => return Err(self.err("unexpected end of input, expected ')'")),
                        _ => children.push(self.tree()?),
                    }
                }
            }
            None => Err(self.err("unexpected end of input")),
            Some(_) => Err(self.err("expected '0' or '('")),
        }
    }
}

impl FromStr for TreeSchema {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let t = p.tree()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

#[derive(Serialize)]
struct NodeOut<'a> {
    children: &'a [TreeSchema],
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<&'a TreeSchema>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ladder: Option<&'a TreeSchema>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TreeIn {
    Text(String),
    Node {
        #[serde(default)]
        children: Vec<TreeSchema>,
        #[serde(default)]
        tail: Option<TreeSchema>,
        #[serde(default)]
        ladder: Option<TreeSchema>,
    },
}

impl Serialize for TreeSchema {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TreeSchema::Empty => s.serialize_none(),
            TreeSchema::Node { children, tail } => {
                let (tail, ladder) = match tail {
                    Tail::Repeat(t) => (Some(&**t), None),
                    Tail::Ladder(t) => (None, Some(&**t)),
                };
                NodeOut { children, tail, ladder }.serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for TreeSchema {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match Option::<TreeIn>::deserialize(d)? {
            None => Ok(TreeSchema::Empty),
            Some(TreeIn::Text(s)) => s.parse().map_err(D::Error::custom),
            Some(TreeIn::Node { children, tail, ladder }) => match (tail, ladder) {
                (Some(_), Some(_)) => Err(D::Error::custom("a node has either a tail or a ladder")),
                (_, Some(seed)) => Ok(TreeSchema::ladder(children, seed)),
                (tail, None) => Ok(TreeSchema::node(children, tail.unwrap_or(TreeSchema::Empty))),
            },
        }
    }
}

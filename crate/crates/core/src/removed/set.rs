//! Closed subsets of `[0, 1]` in a small structural algebra.
//!
//! Stage sets of tree sums are infinite unions of scaled copies, so they
//! are kept lazily as [`SymbolicSet::TreeStage`] and unfolded on demand.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::RemovedError;
use crate::func::cantor::{cantor_interval, gap_bounds, gap_index, locate, Location, MAX_TERNARY_STEPS};
use crate::func::westrick::{locate_westrick, westrick_interval};
use crate::ordinal::Ordinal;
use crate::rigor::{int, rat, Rational};
use crate::tree::{limsup_rank, Tail, TreeSchema};

/// Which tree-sum construction a lazy stage belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Cantor,
    Westrick,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolicSet {
    EmptySet,
    /// Closed interval `[a, b]`.
    Interval { a: Rational, b: Rational },
    Points(Vec<Rational>),
    /// Affine image of the middle-thirds Cantor set onto `[a, b]`.
    CantorSet { a: Rational, b: Rational },
    Union(Vec<SymbolicSet>),
    /// `{a + (b − a)·u : u ∈ inner}`.
    ScaledCopy { a: Rational, b: Rational, inner: Box<SymbolicSet> },
    /// Stage `stage` of the removed sequence of the tree sum over
    /// `wrap^wraps(tree)`.
    TreeStage { family: Family, tree: TreeSchema, wraps: u64, stage: Ordinal },
}

/// A node `wrap^wraps(tree)` of a schema, owned.
#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub tree: TreeSchema,
    pub wraps: u64,
}

/// Rungs this deep stand in for "beyond every tracked index".
const DEEP_RUNG: u64 = 1 << 62;

impl Node {
    pub fn new(tree: TreeSchema) -> Self {
        Node { tree, wraps: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.wraps == 0 && self.tree.is_empty()
    }

    /// Children listed explicitly (a wrapped node has none).
    pub fn finite_children(&self) -> &[TreeSchema] {
        match (&self.tree, self.wraps) {
            (TreeSchema::Node { children, .. }, 0) => children,
            _ => &[],
        }
    }

    /// `limsup_n |T_n|_ls` over the tail.
    pub fn tail_limsup(&self) -> Ordinal {
        if self.wraps > 0 {
            return limsup_rank(&self.tree).add_finite(self.wraps - 1);
        }
        match &self.tree {
            TreeSchema::Empty => Ordinal::zero(),
            TreeSchema::Node { tail: Tail::Repeat(s), .. } => limsup_rank(s),
            TreeSchema::Node { tail: Tail::Ladder(seed), .. } => limsup_rank(seed).add(&Ordinal::omega()),
        }
    }

    /// Infinitely many subtrees are nonempty.
    pub fn tail_nonempty(&self) -> bool {
        !self.tail_limsup().is_zero()
    }

    /// `T_n`, with `None` meaning an index too large to track.
    pub fn child(&self, n: Option<u64>) -> Node {
        if self.wraps > 0 {
            return Node { tree: self.tree.clone(), wraps: self.wraps - 1 };
        }
        match &self.tree {
            TreeSchema::Empty => self.clone(),
            TreeSchema::Node { children, tail } => {
                let k = children.len() as u64;
                match n {
                    Some(i) if i < k => Node::new(children[i as usize].clone()),
                    _ => match tail {
                        Tail::Repeat(s) => Node::new((**s).clone()),
                        Tail::Ladder(seed) => {
                            let wraps = n.map_or(DEEP_RUNG, |i| (i - k).min(DEEP_RUNG));
                            Node { tree: (**seed).clone(), wraps }
                        }
                    },
                }
            }
        }
    }

    pub fn stage_set(&self, family: Family, stage: &Ordinal) -> SymbolicSet {
        SymbolicSet::TreeStage { family, tree: self.tree.clone(), wraps: self.wraps, stage: stage.clone() }
    }
}

/// Stage rules for `y_T`, `γ ≥ 1`, with `M` the tail limsup:
/// the Cantor set survives while `γ ≤ M`, its ends `{0, 1}` one stage
/// longer, and each gap carries the scaled stage of its subtree.
pub(crate) fn cantor_has_c(node: &Node, stage: &Ordinal) -> bool {
    !node.is_empty() && stage <= &node.tail_limsup()
}

pub(crate) fn cantor_has_ends(node: &Node, stage: &Ordinal) -> bool {
    !node.is_empty() && stage <= &node.tail_limsup().successor()
}

/// Nonemptiness of stage `stage` for the tree sum over `node`.
pub(crate) fn stage_nonempty(family: Family, node: &Node, stage: &Ordinal) -> bool {
    if stage.is_zero() {
        return true;
    }
    if node.is_empty() {
        return false;
    }
    match family {
        Family::Cantor => {
            cantor_has_ends(node, stage)
                || node.finite_children().iter().any(|c| stage_nonempty(family, &Node::new(c.clone()), stage))
        }
        Family::Westrick => {
            stage == &Ordinal::finite(1)
                && (node.tail_nonempty()
                    || node.finite_children().iter().any(|c| stage_nonempty(family, &Node::new(c.clone()), stage)))
        }
    }
}

/// `(level, position)` of the gap having `x` as an endpoint.
fn gap_endpoint(x: &Rational) -> Option<(u32, BigInt)> {
    let mut d = x.denom().clone();
    let mut e: u32 = 0;
    while (&d % 3u32).is_zero() {
        d /= 3u32;
        e += 1;
    }
    if !d.is_one() || e == 0 {
        return None;
    }
    let mut digits = Vec::with_capacity(e as usize);
    let mut c = x.numer().clone();
    for _ in 0..e {
        digits.push((&c % 3u32).to_u8().expect("digit"));
        c /= 3u32;
    }
    digits.reverse();
    let (_, lead) = digits.split_last()?;
    let mut pos = BigInt::zero();
    for &dg in lead {
        match dg {
            0 => pos <<= 1,
            2 => pos = (pos << 1) + 1,
            _ => return None,
        }
    }
    Some((e - 1, pos))
}

fn undecided(x: &Rational) -> RemovedError {
    RemovedError::Undecided(format!("Cantor membership of {x} within {MAX_TERNARY_STEPS} digits"))
}

fn in_cantor_strict(x: &Rational) -> Result<bool, RemovedError> {
    if x.is_negative() || x > &int(1) {
        return Ok(false);
    }
    match locate(x, MAX_TERNARY_STEPS) {
        Location::Cantor => Ok(true),
        Location::Gap { .. } => Ok(false),
        Location::Unresolved { .. } => Err(undecided(x)),
    }
}

fn cantor_stage_contains(mut node: Node, stage: &Ordinal, x: &Rational) -> Result<bool, RemovedError> {
    let mut x = x.clone();
    loop {
        if node.is_empty() {
            return Ok(false);
        }
        if x.is_zero() || x == int(1) {
            return Ok(cantor_has_ends(&node, stage));
        }
        if cantor_has_c(&node, stage) && in_cantor_strict(&x)? {
            return Ok(true);
        }
        if let Some((level, pos)) = gap_endpoint(&x) {
            // only the subtree of the adjacent gap can reach this point
            let child = node.child(gap_index(level, &pos));
            return Ok(cantor_has_ends(&child, stage));
        }
        match locate(&x, MAX_TERNARY_STEPS) {
            Location::Cantor => return Ok(false),
            Location::Unresolved { .. } => return Err(undecided(&x)),
            loc @ Location::Gap { .. } => {
                let idx = loc.index();
                let Location::Gap { u, .. } = loc else { unreachable!() };
                node = node.child(idx);
                x = u;
            }
        }
    }
}

fn westrick_stage_contains(mut node: Node, x: &Rational) -> bool {
    let mut x = x.clone();
    loop {
        if node.is_empty() {
            return false;
        }
        if x == rat(1, 4) {
            return node.tail_nonempty();
        }
        match locate_westrick(&x) {
            Some((n, u)) => {
                node = node.child(Some(u64::from(n)));
                x = u;
            }
            None => return false,
        }
    }
}

/// Whether a closed Cantor set on `[0, 1]` meets `[lo, hi]`.
fn cantor_meets(lo: &Rational, hi: &Rational) -> Result<bool, RemovedError> {
    let (mut s, mut t) = (int(0), int(1));
    if hi < &s || lo > &t {
        return Ok(false);
    }
    if lo == hi {
        return in_cantor_strict(lo);
    }
    for _ in 0..MAX_TERNARY_STEPS {
        if (lo <= &s && &s <= hi) || (lo <= &t && &t <= hi) {
            return Ok(true);
        }
        if hi < &s || lo > &t {
            return Ok(false);
        }
        let third = (&t - &s) / int(3);
        let g0 = &s + &third;
        let g1 = &g0 + &third;
        if lo > &g0 && hi < &g1 {
            return Ok(false);
        }
        if hi <= &g0 {
            t = g0;
        } else if lo >= &g1 {
            s = g1;
        } else {
            return Ok(true);
        }
    }
    Err(undecided(lo))
}

impl SymbolicSet {
    pub fn unit() -> Self {
        SymbolicSet::Interval { a: int(0), b: int(1) }
    }

    pub fn points(mut ps: Vec<Rational>) -> Self {
        ps.sort();
        ps.dedup();
        if ps.is_empty() {
            SymbolicSet::EmptySet
        } else {
            SymbolicSet::Points(ps)
        }
    }

    pub fn scaled(a: Rational, b: Rational, inner: SymbolicSet) -> Self {
        if inner.is_empty() {
            SymbolicSet::EmptySet
        } else {
            SymbolicSet::ScaledCopy { a, b, inner: Box::new(inner) }
        }
    }

    pub fn union(parts: Vec<SymbolicSet>) -> Self {
        let mut parts: Vec<_> = parts.into_iter().filter(|p| !p.is_empty()).collect();
        match parts.len() {
            0 => SymbolicSet::EmptySet,
            1 => parts.pop().expect("one part"),
            _ => SymbolicSet::Union(parts),
        }
    }

    /// Emptiness, decided by structure.
    pub fn is_empty(&self) -> bool {
        match self {
            SymbolicSet::EmptySet => true,
            SymbolicSet::Interval { a, b } | SymbolicSet::CantorSet { a, b } => a > b,
            SymbolicSet::Points(ps) => ps.is_empty(),
            SymbolicSet::Union(parts) => parts.iter().all(SymbolicSet::is_empty),
            SymbolicSet::ScaledCopy { inner, .. } => inner.is_empty(),
            SymbolicSet::TreeStage { family, tree, wraps, stage } => {
                !stage_nonempty(*family, &Node { tree: tree.clone(), wraps: *wraps }, stage)
            }
        }
    }

    /// Exact membership of a rational point.
    pub fn contains(&self, x: &Rational) -> Result<bool, RemovedError> {
        Ok(match self {
            SymbolicSet::EmptySet => false,
            SymbolicSet::Interval { a, b } => a <= x && x <= b,
            SymbolicSet::Points(ps) => ps.contains(x),
            SymbolicSet::CantorSet { a, b } => {
                a <= x && x <= b && (a == b || in_cantor_strict(&((x - a) / (b - a)))?)
            }
            SymbolicSet::Union(parts) => {
                for p in parts {
                    if p.contains(x)? {
                        return Ok(true);
                    }
                }
                false
            }
            SymbolicSet::ScaledCopy { a, b, inner } => a <= x && x <= b && inner.contains(&((x - a) / (b - a)))?,
            SymbolicSet::TreeStage { family, tree, wraps, stage } => {
                if x.is_negative() || x > &int(1) {
                    return Ok(false);
                }
                let node = Node { tree: tree.clone(), wraps: *wraps };
                if stage.is_zero() {
                    return Ok(true);
                }
                match family {
                    Family::Cantor => cantor_stage_contains(node, stage, x)?,
                    Family::Westrick => stage == &Ordinal::finite(1) && westrick_stage_contains(node, x),
                }
            }
        })
    }

    /// Whether the set meets the closed interval `[lo, hi]`.
    pub fn meets(&self, lo: &Rational, hi: &Rational) -> Result<bool, RemovedError> {
        if lo > hi {
            return Ok(false);
        }
        Ok(match self {
            SymbolicSet::EmptySet => false,
            SymbolicSet::Interval { a, b } => a <= hi && lo <= b,
            SymbolicSet::Points(ps) => ps.iter().any(|p| lo <= p && p <= hi),
            SymbolicSet::CantorSet { a, b } => {
                if a == b {
                    lo <= a && a <= hi
                } else {
                    let w = b - a;
                    cantor_meets(&((lo - a) / &w), &((hi - a) / &w))?
                }
            }
            SymbolicSet::Union(parts) => {
                for p in parts {
                    if p.meets(lo, hi)? {
                        return Ok(true);
                    }
                }
                false
            }
            SymbolicSet::ScaledCopy { a, b, inner } => {
                let w = b - a;
                let l = ((lo - a) / &w).max(int(0));
                let h = ((hi - a) / &w).min(int(1));
                l <= h && inner.meets(&l, &h)?
            }
            SymbolicSet::TreeStage { family, tree, wraps, stage } => {
                let node = Node { tree: tree.clone(), wraps: *wraps };
                tree_stage_meets(*family, &node, stage, lo, hi)?
            }
        })
    }

    /// One level of structure for a lazy stage; other variants unchanged.
    pub fn unfold(&self) -> SymbolicSet {
        let SymbolicSet::TreeStage { family, tree, wraps, stage } = self else {
            return self.clone();
        };
        let node = Node { tree: tree.clone(), wraps: *wraps };
        if stage.is_zero() {
            return SymbolicSet::unit();
        }
        if node.is_empty() {
            return SymbolicSet::EmptySet;
        }
        let mut parts = Vec::new();
        match family {
            Family::Cantor => {
                if cantor_has_c(&node, stage) {
                    parts.push(SymbolicSet::CantorSet { a: int(0), b: int(1) });
                } else if cantor_has_ends(&node, stage) {
                    parts.push(SymbolicSet::points(vec![int(0), int(1)]));
                }
                for (n, c) in node.finite_children().iter().enumerate() {
                    let (a, b) = cantor_interval(n as u64);
                    let inner = Node::new(c.clone()).stage_set(*family, stage);
                    parts.push(SymbolicSet::scaled(a, b, inner));
                }
            }
            Family::Westrick => {
                if stage == &Ordinal::finite(1) {
                    if node.tail_nonempty() {
                        parts.push(SymbolicSet::points(vec![rat(1, 4)]));
                    }
                    for (n, c) in node.finite_children().iter().enumerate() {
                        let (a, b) = westrick_interval(n as u32);
                        let inner = Node::new(c.clone()).stage_set(*family, stage);
                        parts.push(SymbolicSet::scaled(a, b, inner));
                    }
                }
            }
        }
        SymbolicSet::union(parts)
    }

    /// JSON description; lazy stages are unfolded `depth` levels and their
    /// infinitely many tail copies are summarized.
    pub fn to_json(&self, depth: usize) -> Value {
        match self {
            SymbolicSet::EmptySet => json!({"kind": "empty"}),
            SymbolicSet::Interval { a, b } => json!({"kind": "interval", "a": a.to_string(), "b": b.to_string()}),
            SymbolicSet::Points(ps) => {
                json!({"kind": "points", "points": ps.iter().map(ToString::to_string).collect::<Vec<_>>()})
            }
            SymbolicSet::CantorSet { a, b } => json!({"kind": "cantor", "a": a.to_string(), "b": b.to_string()}),
            SymbolicSet::Union(parts) => {
                json!({"kind": "union", "parts": parts.iter().map(|p| p.to_json(depth)).collect::<Vec<_>>()})
            }
            SymbolicSet::ScaledCopy { a, b, inner } => json!({
                "kind": "scaled_copy", "a": a.to_string(), "b": b.to_string(), "inner": inner.to_json(depth)
            }),
            SymbolicSet::TreeStage { family, tree, wraps, stage } => {
                let mut v = json!({
                    "kind": "tree_stage",
                    "family": match family { Family::Cantor => "cantor", Family::Westrick => "westrick" },
                    "tree": tree.to_string(),
                    "wraps": wraps,
                    "stage": stage.to_string(),
                });
                if depth > 0 {
                    let node = Node { tree: tree.clone(), wraps: *wraps };
                    v["unfolded"] = self.unfold().to_json(depth - 1);
                    let tail_live = match family {
                        Family::Cantor => cantor_has_c(&node, stage),
                        Family::Westrick => stage == &Ordinal::finite(1) && node.tail_nonempty(),
                    };
                    if tail_live {
                        v["tail_copies_from"] = json!(node.finite_children().len());
                    }
                }
                v
            }
        }
    }
}

fn tree_stage_meets(
    family: Family,
    node: &Node,
    stage: &Ordinal,
    lo: &Rational,
    hi: &Rational,
) -> Result<bool, RemovedError> {
    let lo = lo.clone().max(int(0));
    let hi = hi.clone().min(int(1));
    if lo > hi || !stage_nonempty(family, node, stage) {
        return Ok(false);
    }
    if stage.is_zero() {
        return Ok(true);
    }
    match family {
        Family::Cantor => {
            if cantor_has_c(node, stage) {
                if cantor_meets(&lo, &hi)? {
                    return Ok(true);
                }
                // the window misses C, so it sits inside a single gap
                let Location::Gap { level, pos, .. } = locate(&lo, MAX_TERNARY_STEPS) else {
                    return Ok(false);
                };
                let (a, b) = match &pos {
                    Some(p) => gap_bounds(level, p),
                    None => return Ok(false),
                };
                let child = node.child(pos.as_ref().and_then(|p| gap_index(level, p)));
                let w = &b - &a;
                return tree_stage_meets(family, &child, stage, &((&lo - &a) / &w), &((&hi - &a) / &w));
            }
            if cantor_has_ends(node, stage) && ((lo.is_zero()) || hi == int(1)) {
                return Ok(true);
            }
            // the tail is dead at this stage: only listed children matter
            for (n, c) in node.finite_children().iter().enumerate() {
                let (a, b) = cantor_interval(n as u64);
                let w = &b - &a;
                let (l, h) = ((&lo - &a) / &w, (&hi - &a) / &w);
                if tree_stage_meets(family, &Node::new(c.clone()), stage, &l, &h)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Family::Westrick => {
            if node.tail_nonempty() {
                let q = rat(1, 4);
                if lo <= q && q <= hi {
                    return Ok(true);
                }
                if hi < q {
                    return Ok(false);
                }
                // a window away from 1/4 meets finitely many intervals
                let mut n = 0u32;
                loop {
                    let (a, b) = westrick_interval(n);
                    if b < lo {
                        break;
                    }
                    if a <= hi {
                        let w = &b - &a;
                        let child = node.child(Some(u64::from(n)));
                        if tree_stage_meets(family, &child, stage, &((&lo - &a) / &w), &((&hi - &a) / &w))? {
                            return Ok(true);
                        }
                    }
                    n += 1;
                }
                return Ok(false);
            }
            for (n, c) in node.finite_children().iter().enumerate() {
                let (a, b) = westrick_interval(n as u32);
                let w = &b - &a;
                if tree_stage_meets(family, &Node::new(c.clone()), stage, &((&lo - &a) / &w), &((&hi - &a) / &w))? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

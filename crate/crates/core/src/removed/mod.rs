//! Removed sets `E_0 ⊇ E_1 ⊇ …` of derivatives and the solvable rank.
//!
//! `E_0 = [0, 1]`, `E_{γ+1}` is the discontinuity set of `y'` restricted to
//! `E_γ`, and limit stages intersect. Stages are produced by structural
//! rules over [`FuncExpr`]; shapes without a rule are rejected.

mod probe;
mod set;

use serde_json::{json, Value};
use thiserror::Error;

use crate::func::{FuncError, FuncExpr};
use crate::ordinal::Ordinal;
use crate::rigor::{int, Rational};

pub use probe::{numeric_discontinuity_probe, ProbeConfig};
pub use set::{Family, SymbolicSet};
use set::{stage_nonempty, Node};

/// Environment variable overriding [`default_cap`].
pub const CAP_ENV: &str = "SOLVRANK_ORDINAL_CAP";

/// Stages listed per `ω`-block by [`removed_sequence`] for transfinite ranks.
pub const STAGE_WINDOW: u64 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RemovedError {
    #[error("unsupported structure: {0}")]
    Unsupported(String),
    #[error("no empty stage at or below the cap {0}")]
    CapExceeded(Ordinal),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error(transparent)]
    Func(#[from] FuncError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedStage {
    pub index: Ordinal,
    pub set: SymbolicSet,
}

/// `ω·10`.
pub fn default_cap() -> Ordinal {
    Ordinal::from_terms(&[(1, 10)]).expect("normal form")
}

/// The cap from [`CAP_ENV`] if set and parseable, else [`default_cap`].
pub fn cap_from_env() -> Ordinal {
    std::env::var(CAP_ENV).ok().and_then(|s| s.parse().ok()).unwrap_or_else(default_cap)
}

fn omega_times(c: u64) -> Ordinal {
    if c == 0 {
        Ordinal::zero()
    } else {
        Ordinal::from_terms(&[(1, c)]).expect("normal form")
    }
}

/// `E_stage` for the removed sequence of `y'` on `[0, 1]`.
pub fn stage(y: &FuncExpr, stage: &Ordinal) -> Result<SymbolicSet, RemovedError> {
    if stage.is_zero() {
        return Ok(SymbolicSet::unit());
    }
    let first = stage == &Ordinal::finite(1);
    Ok(match y {
        FuncExpr::Zero | FuncExpr::BaseR | FuncExpr::Poly { .. } => SymbolicSet::EmptySet,
        // p' = 2x sin(1/x) − cos(1/x) oscillates at both ends
        FuncExpr::BaseP if first => SymbolicSet::points(vec![int(0), int(1)]),
        FuncExpr::SinSqExample if first => SymbolicSet::points(vec![int(0)]),
        FuncExpr::BaseP | FuncExpr::SinSqExample => SymbolicSet::EmptySet,
        FuncExpr::TreeSumCantor { tree } => lazy(Family::Cantor, tree, stage),
        FuncExpr::TreeSumWestrick { tree } => lazy(Family::Westrick, tree, stage),
        FuncExpr::Scaled { a, b, factor, inner } => {
            if factor == &int(0) {
                SymbolicSet::EmptySet
            } else if !inner.vanishes_at_ends() {
                return Err(RemovedError::Unsupported(
                    "scaled copy of a function not vanishing to first order at 0 and 1".into(),
                ));
            } else {
                SymbolicSet::scaled(a.clone(), b.clone(), self::stage(inner, stage)?)
            }
        }
        FuncExpr::Sum { terms } => {
            let live = rough_terms(terms)?;
            let parts = live.iter().map(|t| self::stage(t, stage)).collect::<Result<Vec<_>, _>>()?;
            SymbolicSet::union(parts)
        }
    })
}

fn lazy(family: Family, tree: &crate::tree::TreeSchema, stage: &Ordinal) -> SymbolicSet {
    let node = Node::new(tree.clone());
    if stage_nonempty(family, &node, stage) {
        node.stage_set(family, stage)
    } else {
        SymbolicSet::EmptySet
    }
}

/// Terms of a sum whose derivative is not continuous. Continuous
/// derivatives do not move discontinuities, so they are dropped; the rest
/// must be one term or scaled copies with disjoint open supports.
fn rough_terms(terms: &[FuncExpr]) -> Result<Vec<&FuncExpr>, RemovedError> {
    let mut live = Vec::new();
    for t in terms {
        if stage(t, &Ordinal::finite(1))?.is_empty() {
            continue;
        }
        live.push(t);
    }
    if live.len() <= 1 {
        return Ok(live);
    }
    let mut supports = Vec::new();
    for t in &live {
        match t {
            FuncExpr::Scaled { a, b, .. } => supports.push((a.clone(), b.clone())),
            _ => {
                return Err(RemovedError::Unsupported(
                    "sum of several terms with discontinuous derivatives that are not disjoint scaled copies".into(),
                ))
            }
        }
    }
    supports.sort();
    if supports.windows(2).any(|w| w[0].1 > w[1].0) {
        return Err(RemovedError::Unsupported("scaled copies in a sum overlap".into()));
    }
    Ok(live)
}

fn ordinals_in(set: &SymbolicSet, out: &mut Vec<Ordinal>) {
    match set {
        SymbolicSet::TreeStage { stage, .. } => out.push(stage.clone()),
        SymbolicSet::Union(parts) => parts.iter().for_each(|p| ordinals_in(p, out)),
        SymbolicSet::ScaledCopy { inner, .. } => ordinals_in(inner, out),
        _ => {}
    }
}

/// `D` of `y'` restricted to `s`, for `s` one of the stages of `y`: the
/// next stage.
pub fn discontinuity_set(y: &FuncExpr, s: &SymbolicSet) -> Result<SymbolicSet, RemovedError> {
    let mut candidates = vec![Ordinal::zero(), Ordinal::finite(1)];
    ordinals_in(s, &mut candidates);
    for g in candidates {
        if &stage(y, &g)? == s {
            return stage(y, &g.successor());
        }
    }
    if s.is_empty() {
        return Ok(SymbolicSet::EmptySet);
    }
    Err(RemovedError::Unsupported("the set is not a removed stage of this function".into()))
}

fn nonempty(y: &FuncExpr, g: &Ordinal) -> Result<bool, RemovedError> {
    Ok(!stage(y, g)?.is_empty())
}

/// `|y|_SV`: least `γ` with `E_γ = ∅`, found by searching the stages.
pub fn solvable_rank_capped(y: &FuncExpr, cap: &Ordinal) -> Result<Ordinal, RemovedError> {
    // Stages decrease, so first find the last ω-multiple with a nonempty
    // stage, then the finite offset by doubling and bisection.
    let mut c = 0u64;
    loop {
        let next = omega_times(c + 1);
        if &next > cap || !nonempty(y, &next)? {
            break;
        }
        c += 1;
    }
    let base = omega_times(c);
    let mut hi = 1u64;
    while nonempty(y, &base.add_finite(hi))? {
        if base.add_finite(hi) > *cap {
            return Err(RemovedError::CapExceeded(cap.clone()));
        }
        hi *= 2;
    }
    let mut lo = hi / 2; // nonempty at base + lo (lo = 0 is E_base ≠ ∅)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if nonempty(y, &base.add_finite(mid))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rank = base.add_finite(hi);
    if &rank > cap {
        return Err(RemovedError::CapExceeded(cap.clone()));
    }
    Ok(rank)
}

/// [`solvable_rank_capped`] with the cap from the environment.
pub fn solvable_rank(y: &FuncExpr) -> Result<Ordinal, RemovedError> {
    solvable_rank_capped(y, &cap_from_env())
}

/// Stage indices listed for a sequence ending (first empty) at `rank`.
pub fn stage_indices(rank: &Ordinal) -> Vec<Ordinal> {
    let (lim, b) = rank.split_finite();
    let a = lim.coefficient(1);
    let mut out = Vec::new();
    for c in 0..a {
        out.extend((0..STAGE_WINDOW).map(|n| omega_times(c).add_finite(n)));
    }
    out.extend((0..=b).map(|n| omega_times(a).add_finite(n)));
    out
}

/// The removed stages up to and including the first empty one. For
/// transfinite ranks only the first [`STAGE_WINDOW`] stages of each
/// `ω`-block are listed.
pub fn removed_sequence(y: &FuncExpr, max_stage: &Ordinal) -> Result<Vec<RankedStage>, RemovedError> {
    let rank = solvable_rank_capped(y, max_stage)?;
    stage_indices(&rank)
        .into_iter()
        .map(|index| Ok(RankedStage { set: stage(y, &index)?, index }))
        .collect()
}

/// Stage dump with a `format_version` field.
pub fn stages_json(rank: &Ordinal, stages: &[RankedStage], depth: usize) -> Value {
    json!({
        "format_version": 1,
        "solvable_rank": rank.to_string(),
        "stages": stages
            .iter()
            .map(|s| json!({"index": s.index.to_string(), "set": s.set.to_json(depth)}))
            .collect::<Vec<_>>(),
    })
}

/// Membership of `x` in `E_stage`, straight from the stage rules.
pub fn stage_contains(y: &FuncExpr, g: &Ordinal, x: &Rational) -> Result<bool, RemovedError> {
    stage(y, g)?.contains(x)
}

#[cfg(test)]
mod tests;

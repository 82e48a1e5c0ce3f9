use std::collections::BTreeMap;

use serde::Serialize;

use super::{covered_by_union, MonkeyTuple, OpenBox, StratifiedRHS};
use crate::exec::Exec;
use crate::ordinal::Ordinal;
use crate::rigor::{int, pow2, RInterval};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub condition: u8,
    pub passed: bool,
    pub checked: usize,
    pub first_violation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Whether the initial enclosure lies in `⋃ X_{0,β,j}`.
    pub initial_covered: bool,
    /// Tuples whose layer, step size or dimension is malformed.
    pub malformed: Option<String>,
    pub conditions: Vec<ConditionReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.initial_covered && self.malformed.is_none() && self.conditions.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<String> {
        if !self.initial_covered {
            return Some("initial value not covered by step 0".into());
        }
        if let Some(m) = &self.malformed {
            return Some(m.clone());
        }
        self.conditions
            .iter()
            .find(|c| !c.passed)
            .map(|c| format!("condition {}: {}", c.condition, c.first_violation.clone().unwrap_or_default()))
    }
}

fn label(t: &MonkeyTuple) -> String {
    format!("tuple (i={}, beta={}, j={})", t.step, t.layer, t.j)
}

/// Conditions 1–4 for one tuple; `Err((condition, message))` on the first
/// violation.
fn check_tuple(rhs: &StratifiedRHS, t: &MonkeyTuple) -> Result<(), (u8, String)> {
    let cl_b = t.b.closure();
    let next = t.layer.successor();
    if !t.b.is_empty() {
        if !rhs.meets_stratum(&t.layer, &cl_b) {
            return Err((1, format!("{}: cl B misses E_{}", label(t), t.layer)));
        }
        if rhs.meets_stratum(&next, &cl_b) {
            return Err((1, format!("{}: cl B meets E_{}", label(t), next)));
        }
        let range = rhs.range_enclosure(&t.layer, &cl_b).map_err(|e| (2, format!("{}: {e}", label(t))))?;
        if t.c.is_empty() || !t.c.contains_closed(&range) {
            return Err((2, format!("{}: f(cl B ∩ E_β) ⊄ C", label(t))));
        }
    }
    if !(t.x.subset_of(&t.b) && t.y.subset_of(&t.b)) {
        return Err((3, format!("{}: X ∪ Y ⊄ B", label(t))));
    }
    if !t.x.is_empty() && !t.x.plus_scaled(&t.h, &t.c).subset_of(&t.y) {
        return Err((4, format!("{}: X + hC ⊄ Y", label(t))));
    }
    Ok(())
}

/// Re-checks every condition from scratch. Condition 5 is checked for each
/// step that has a successor; the union inclusion uses exact coordinate
/// compression.
pub fn validate_tuples(
    rhs: &StratifiedRHS,
    alpha: &Ordinal,
    y0: &[RInterval],
    tuples: &[MonkeyTuple],
    exec: Exec,
) -> ValidationReport {
    let dim = rhs.dim();
    let malformed = tuples.iter().find_map(|t| {
        if &t.layer >= alpha {
            Some(format!("{}: layer not below {alpha}", label(t)))
        } else if t.h <= int(0) {
            Some(format!("{}: step size not positive", label(t)))
        } else if [&t.x, &t.b, &t.c, &t.y].iter().any(|b| b.dim() != dim) {
            Some(format!("{}: dimension mismatch", label(t)))
        } else {
            None
        }
    });
    if malformed.is_some() {
        return ValidationReport { initial_covered: false, malformed, conditions: Vec::new() };
    }

    let results = exec.map(tuples, |t| check_tuple(rhs, t));
    let mut conditions: Vec<ConditionReport> = (1..=5)
        .map(|c| ConditionReport { condition: c, passed: true, checked: 0, first_violation: None })
        .collect();
    for r in &results {
        // a tuple failing condition k was checked against 1..=k
        let reached = match r {
            Ok(()) => 4,
            Err((k, _)) => *k,
        };
        for c in conditions.iter_mut().take(reached as usize) {
            c.checked += 1;
        }
        if let Err((k, msg)) = r {
            let c = &mut conditions[*k as usize - 1];
            if c.passed {
                c.passed = false;
                c.first_violation = Some(msg.clone());
            }
        }
    }

    let mut by_step: BTreeMap<usize, Vec<&MonkeyTuple>> = BTreeMap::new();
    for t in tuples {
        by_step.entry(t.step).or_default().push(t);
    }
    let last = by_step.keys().next_back().copied();
    let steps: Vec<usize> = by_step.keys().copied().filter(|&i| Some(i) != last).collect();
    let chain = exec.map(&steps, |&i| {
        let next: Vec<OpenBox> =
            by_step.get(&(i + 1)).map(|v| v.iter().map(|t| t.x.clone()).collect()).unwrap_or_default();
        by_step[&i]
            .iter()
            .find(|t| !covered_by_union(&t.y, &next))
            .map(|t| format!("{}: Y ⊄ ⋃ X at step {}", label(t), i + 1))
    });
    let c5 = &mut conditions[4];
    c5.checked = steps.len();
    if let Some(msg) = chain.into_iter().flatten().next() {
        c5.passed = false;
        c5.first_violation = Some(msg);
    }

    let initial_covered = by_step.get(&0).is_some_and(|first| {
        let xs: Vec<OpenBox> = first.iter().map(|t| t.x.clone()).collect();
        // covering a slightly larger open box covers the closed enclosure
        let grown = OpenBox::from_intervals(&y0.iter().map(|i| i.inflate(&pow2(-200))).collect::<Vec<_>>());
        xs.iter().any(|x| x.contains_closed(y0)) || covered_by_union(&grown, &xs)
    });
    ValidationReport { initial_covered, malformed: None, conditions }
}

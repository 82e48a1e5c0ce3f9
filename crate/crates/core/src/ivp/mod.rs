//! Validated enclosures for `y' = f(y)` with a stratified, discontinuous
//! right-hand side.
//!
//! A step is a tuple `(X, h, B, C, Y)` of open rational boxes attached to a
//! layer `β`: `B` meets `E_β` but not `E_{β+1}`, `C` contains the range of
//! `f↾E_β` over `cl B`, `X ∪ Y ⊆ B` and `X + hC ⊆ Y`. Consecutive steps
//! chain through `⋃ Y_i ⊆ ⋃ X_{i+1}`.

mod boxes;
mod construct;
mod rhs;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::func::base::h_point;
use crate::ordinal::Ordinal;
use crate::rigor::{int, pow2, ser, to_decimal, Rational, RInterval};

pub use boxes::{covered_by_union, OpenBox};
pub use construct::{construct_enclosure, default_window, Cover, Enclosure, EnclosureConfig};
pub use rhs::{example1_rhs, Field, StratifiedRHS, Stratum};
pub use validate::{validate_tuples, ConditionReport, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IvpError {
    #[error("closed box does not meet stratum E_{0}")]
    EmptyIntersection(String),
    #[error("step {step} failed: {reason}")]
    StepFailure { step: usize, reason: String },
    #[error("enclosure width {width} exceeds the bound at step {step}")]
    WidthBlowUp { step: usize, width: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonkeyTuple {
    pub step: usize,
    pub layer: Ordinal,
    pub j: usize,
    pub x: OpenBox,
    #[serde(with = "ser::rational")]
    pub h: Rational,
    pub b: OpenBox,
    pub c: OpenBox,
    pub y: OpenBox,
}

/// Start time of the worked example.
pub fn example1_t0() -> Rational {
    int(-2)
}

/// Closed enclosure of the exact solution `(t − 1, h(t − 1))` at time `t`,
/// which also encloses the initial value at `t = −2`.
pub fn example1_solution(t: &Rational) -> Vec<RInterval> {
    let x = t - int(1);
    vec![RInterval::point(x.clone()), h_point(&x, &pow2(-80))]
}

/// CSV of the per-step cover hulls.
pub fn covers_csv(covers: &[Cover]) -> String {
    let mut out = String::from("# format_version: 1\nt,x_lo,x_hi,z_lo,z_hi\n");
    for c in covers {
        let hull = c.hull();
        out.push_str(&to_decimal(&c.t, 10, true));
        for d in 0..hull.dim() {
            out.push(',');
            out.push_str(&to_decimal(&hull.lo[d], 12, true));
            out.push(',');
            out.push_str(&to_decimal(&hull.hi[d], 12, false));
        }
        out.push('\n');
    }
    out
}

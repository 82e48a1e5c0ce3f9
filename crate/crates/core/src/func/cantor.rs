//! Middle-thirds gaps in breadth-first, left-to-right order, and location
//! of a rational point relative to them.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::rigor::{int, Rational};

/// Default bound on ternary digits examined before giving up.
pub const MAX_TERNARY_STEPS: u64 = 1 << 22;

/// Gap positions are kept only this deep; beyond, indices exceed any
/// finite children list anyway.
pub const POS_TRACK_LEVELS: u32 = 128;

/// Gap `I_n = (a, b)`. Level `ℓ` holds indices `2^ℓ − 1 .. 2^{ℓ+1} − 2`.
pub fn cantor_interval(n: u64) -> (Rational, Rational) {
    let level = 63 - (n + 1).leading_zeros();
    let pos = n + 1 - (1u64 << level);
    gap_bounds(level, &BigInt::from(pos))
}

/// Bounds of the `pos`-th gap (left to right) at `level`.
pub fn gap_bounds(level: u32, pos: &BigInt) -> (Rational, Rational) {
    // The left end of the surviving interval has ternary digits 2·(bits of pos).
    let mut left = BigInt::zero();
    for i in (0..level).rev() {
        left = left * 3 + if pos.bit(i as u64) { 2 } else { 0 };
    }
    let den = num_traits::pow(BigInt::from(3), level as usize + 1);
    let a = Rational::new(&left * 3 + 1, den.clone());
    let b = Rational::new(&left * 3 + 2, den);
    (a, b)
}

/// Index of a gap from its level and left-to-right position, or `None` when
/// it does not fit in a `u64`.
pub fn gap_index(level: u32, pos: &BigInt) -> Option<u64> {
    if level >= 63 {
        return None;
    }
    pos.to_u64().map(|p| (1u64 << level) - 1 + p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    /// Inside the open gap at `level`, position `pos` (tracked only for
    /// levels below [`POS_TRACK_LEVELS`]); `u` is the point in the gap's
    /// own coordinates `(x − a)/(b − a) ∈ (0, 1)`.
    Gap { level: u32, pos: Option<BigInt>, u: Rational },
    /// In the Cantor set (including gap endpoints).
    Cantor,
    /// No gap within the step budget and no cycle detected yet; the point
    /// is within `3^{-steps}` of the Cantor set.
    Unresolved { steps: u64 },
}

impl Location {
    pub fn index(&self) -> Option<u64> {
        match self {
            Location::Gap { level, pos: Some(pos), .. } => gap_index(*level, pos),
            _ => None,
        }
    }
}

/// Finds the gap containing `x ∈ [0, 1]` by reading ternary digits, with
/// cycle detection to certify membership in the Cantor set.
pub fn locate(x: &Rational, max_steps: u64) -> Location {
    assert!(!x.is_negative() && x <= &int(1), "point outside [0, 1]");
    let q = x.denom().clone();
    let mut p = x.numer().clone();
    let mut pos = Some(BigInt::zero());
    let mut level: u32 = 0;
    // Brent-style cycle detection on the numerator (denominator is fixed).
    let mut saved = p.clone();
    let mut power: u64 = 1;
    let mut since: u64 = 0;
    let q2 = &q * 2;
    for _ in 0..max_steps {
        if p.is_zero() || p == q {
            return Location::Cantor;
        }
        let p3 = &p * 3;
        if p3 > q && p3 < q2 {
            let u = Rational::new(p3 - &q, q);
            return Location::Gap { level, pos, u };
        }
        let right = p3 > q;
        p = if right { p3 - &q2 } else { p3 };
        level += 1;
        pos = match pos {
            Some(v) if level < POS_TRACK_LEVELS => Some((v << 1) + u8::from(right)),
            _ => None,
        };
        since += 1;
        if p == saved {
            return Location::Cantor;
        }
        if since == power {
            saved = p.clone();
            power *= 2;
            since = 0;
        }
    }
    Location::Unresolved { steps: max_steps }
}

/// Membership in the (standard) Cantor set, `None` if undecided within the
/// step budget.
pub fn in_cantor(x: &Rational, max_steps: u64) -> Option<bool> {
    if x.is_negative() || x > &int(1) {
        return Some(false);
    }
    match locate(x, max_steps) {
        Location::Cantor => Some(true),
        Location::Gap { .. } => Some(false),
        Location::Unresolved { .. } => None,
    }
}

/// Level of gap index `n`.
pub fn level_of(n: u64) -> u32 {
    63 - (n + 1).leading_zeros()
}

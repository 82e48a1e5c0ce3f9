//! Stratified right-hand sides: a vector field on a closed box `E` with a
//! decreasing sequence of closed strata `E_0 = E ⊇ E_1 ⊇ …`, each carrying
//! the restriction of the field to it.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{IvpError, OpenBox};
use crate::func::base::{h_range, hprime_range};
use crate::ordinal::Ordinal;
use crate::rigor::{int, pow2, ser, Rational, RInterval};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stratum {
    /// All of `E`.
    Whole,
    /// `E ∩ {y_dim = value}`.
    Hyperplane {
        dim: usize,
        #[serde(with = "ser::rational")]
        value: Rational,
    },
}

/// The planar field `(x, z) ↦ (1, h'(x))` with `h(x) = x² sin(1/x)`,
/// discontinuous on the line `x = 0` where it equals `(1, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    HprimeShear,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratifiedRHS {
    pub field: Field,
    /// The closed domain `E`, one interval per coordinate.
    pub domain: Vec<RInterval>,
    /// `strata[β]` describes `E_β`; strata past the end are empty.
    pub strata: Vec<Stratum>,
}

/// Tolerance for the sine enclosures behind range bounds.
const RANGE_TOL_BITS: i64 = 40;

/// `y' = (1, h'(x))` on `[−5, 5] × [−15, 15]`, with `E_1` the line `x = 0`.
pub fn example1_rhs() -> StratifiedRHS {
    StratifiedRHS {
        field: Field::HprimeShear,
        domain: vec![RInterval { lo: int(-5), hi: int(5) }, RInterval { lo: int(-15), hi: int(15) }],
        strata: vec![Stratum::Whole, Stratum::Hyperplane { dim: 0, value: int(0) }],
    }
}

impl StratifiedRHS {
    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    fn stratum(&self, beta: &Ordinal) -> Option<&Stratum> {
        beta.as_finite().and_then(|b| self.strata.get(b as usize))
    }

    /// Whether the closed box meets `E_β`.
    pub fn meets_stratum(&self, beta: &Ordinal, closed: &[RInterval]) -> bool {
        self.restrict(beta, closed).is_some()
    }

    /// `closed ∩ E_β` as a box (every stratum here is a box), or `None`.
    fn restrict(&self, beta: &Ordinal, closed: &[RInterval]) -> Option<Vec<RInterval>> {
        let mut out = Vec::with_capacity(closed.len());
        for (c, e) in closed.iter().zip(&self.domain) {
            out.push(c.intersect(e)?);
        }
        match self.stratum(beta)? {
            Stratum::Whole => {}
            Stratum::Hyperplane { dim, value } => {
                if !out[*dim].contains(value) {
                    return None;
                }
                out[*dim] = RInterval::point(value.clone());
            }
        }
        Some(out)
    }

    /// Closed box certified to contain `f↾E_β (cl B ∩ E_β)`, where
    /// `closed` is `cl B`.
    pub fn range_enclosure(&self, beta: &Ordinal, closed: &[RInterval]) -> Result<Vec<RInterval>, IvpError> {
        let part = self.restrict(beta, closed).ok_or_else(|| IvpError::EmptyIntersection(beta.to_string()))?;
        match self.field {
            Field::HprimeShear => {
                let x = &part[0];
                let dz = if x.is_point() && x.lo.is_zero() {
                    RInterval::zero()
                } else {
                    // h'(0) = 0 is covered by the crude bound when 0 ∈ X
                    hprime_range(x, &pow2(-RANGE_TOL_BITS))
                };
                Ok(vec![RInterval::point(int(1)), dz])
            }
        }
    }

    /// Conserved quantity along trajectories away from the singular
    /// stratum, when one is known: for the shear field `z − h(x)`.
    pub(crate) fn invariant(&self, closed: &[RInterval]) -> RInterval {
        match self.field {
            Field::HprimeShear => &closed[1] - &h_range(&closed[0], &pow2(-RANGE_TOL_BITS)),
        }
    }

    /// Range of the `z` coordinate on the level sets `invariant ∈ k` for
    /// `x ∈ xs`.
    pub(crate) fn level_set(&self, k: &RInterval, xs: &RInterval) -> RInterval {
        match self.field {
            Field::HprimeShear => k + &h_range(xs, &pow2(-RANGE_TOL_BITS)),
        }
    }

    /// Whether an open box lies in the closed domain.
    pub fn box_in_domain(&self, b: &OpenBox) -> bool {
        b.closure().iter().zip(&self.domain).all(|(c, e)| c.subset_of(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::rat;

    fn iv(a: Rational, b: Rational) -> RInterval {
        RInterval { lo: a, hi: b }
    }

    #[test]
    fn layer_one_range_is_the_constant_field() {
        let rhs = example1_rhs();
        let b = [iv(rat(-1, 10), rat(1, 10)), iv(int(0), int(1))];
        let c = rhs.range_enclosure(&Ordinal::finite(1), &b).unwrap();
        assert_eq!(c, vec![RInterval::point(int(1)), RInterval::zero()]);
        let off = [iv(rat(1, 10), rat(2, 10)), iv(int(0), int(1))];
        assert!(matches!(rhs.range_enclosure(&Ordinal::finite(1), &off), Err(IvpError::EmptyIntersection(_))));
        assert!(rhs.range_enclosure(&Ordinal::finite(2), &b).is_err());
    }

    #[test]
    fn layer_zero_range_encloses_samples() {
        let rhs = example1_rhs();
        let b = [iv(rat(-3, 10), rat(-2, 10)), iv(int(0), int(1))];
        let c = rhs.range_enclosure(&Ordinal::zero(), &b).unwrap();
        assert_eq!(c[0], RInterval::point(int(1)));
        for i in 0..=50 {
            let x = -0.3 + 0.1 * f64::from(i) / 50.0;
            let v = 2.0 * x * (1.0 / x).sin() - (1.0 / x).cos();
            let (lo, hi) = c[1].to_f64_pair();
            assert!(lo - 1e-12 <= v && v <= hi + 1e-12, "x = {x}");
        }
        // straddling the line falls back to |h'| <= 2|x| + 1
        let s = rhs.range_enclosure(&Ordinal::zero(), &[iv(rat(-1, 10), rat(1, 10)), iv(int(0), int(1))]).unwrap();
        assert_eq!(s[1], iv(rat(-6, 5), rat(6, 5)));
    }
}

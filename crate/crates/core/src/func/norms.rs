//! Certified sup-norm bounds for functions and their derivatives, following
//! the recursive estimates `‖y_T‖ ≤ ‖p‖ + (1/12)·max_n ‖y_{T_n}‖` and
//! `‖y_T'‖ ≤ ‖p'‖ + (1/4)·max_n ‖y_{T_n}'‖`.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_traits::Signed;

use super::base::{poly_derivative, poly_sup_bound, r_coefficients};
use super::{FuncError, FuncExpr};
use crate::rigor::{int, rat, round_up, xbar_fine, Rational};
use crate::tree::{Tail, TreeSchema};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormCertificate {
    /// Upper bound on `sup |f|` over `[0, 1]`.
    pub sup: Rational,
    /// Upper bound on `sup |f'|` over `[0, 1]`.
    pub deriv: Rational,
}

/// `(‖p‖, ‖p'‖)` bounds: `|x² sin(1/x)| ≤ x̄²` and `|2x sin(1/x) − cos(1/x)| ≤ 2x̄ + 1`
/// on `(0, x̄]`, with `p` constant or mirrored elsewhere.
fn p_bounds() -> (Rational, Rational) {
    let hi = &xbar_fine().hi;
    (hi * hi, hi * int(2) + int(1))
}

fn r_bounds() -> &'static (Rational, Rational) {
    static R: OnceLock<(Rational, Rational)> = OnceLock::new();
    R.get_or_init(|| {
        let c = r_coefficients();
        let sup = round_up(&poly_sup_bound(&c, 1024), 20);
        let der = round_up(&poly_sup_bound(&poly_derivative(&c), 1024), 20);
        (sup, der)
    })
}

/// Bounds valid for every `y_T` at once: the fixed points
/// `s = ‖p‖ + s/12` and `d = ‖p'‖ + d/4`, rounded up to `(1/8, 2)`.
pub fn universal_cantor_bounds() -> (Rational, Rational) {
    let (p, dp) = p_bounds();
    let s = p * rat(12, 11);
    let d = dp * rat(4, 3);
    debug_assert!(s <= rat(1, 8) && d < int(2));
    (rat(1, 8), int(2))
}

fn cantor_bounds(t: &TreeSchema, memo: &mut HashMap<TreeSchema, (Rational, Rational)>) -> (Rational, Rational) {
    let TreeSchema::Node { children, tail } = t else {
        return (int(0), int(0));
    };
    if let Some(b) = memo.get(t) {
        return b.clone();
    }
    let mut sup = int(0);
    let mut der = int(0);
    let mut absorb = |(s, d): (Rational, Rational)| {
        sup = sup.clone().max(s);
        der = der.clone().max(d);
    };
    for c in children {
        absorb(cantor_bounds(c, memo));
    }
    match tail {
        Tail::Repeat(s) => absorb(cantor_bounds(s, memo)),
        Tail::Ladder(_) => {
            let (p, dp) = p_bounds();
            absorb((p * rat(12, 11), dp * rat(4, 3)));
        }
    }
    let (p, dp) = p_bounds();
    let out = (p + sup * rat(1, 12), dp + der * rat(1, 4));
    memo.insert(t.clone(), out.clone());
    out
}

fn westrick_bounds(t: &TreeSchema) -> Result<(Rational, Rational), FuncError> {
    let TreeSchema::Node { children, tail } = t else {
        return Ok((int(0), int(0)));
    };
    let Tail::Repeat(s) = tail else {
        return Err(FuncError::Unsupported(
            "norm bounds for g_T need a tree of finite height (no ladder tails)".into(),
        ));
    };
    let mut sup = int(0);
    let mut der = int(0);
    for c in children.iter().chain(std::iter::once(&**s)) {
        let (cs, cd) = westrick_bounds(c)?;
        sup = sup.max(cs);
        der = der.max(cd);
    }
    let (r, dr) = r_bounds().clone();
    // the longest interval is [a_0, b_0] of length 1/100
    Ok((r + sup * rat(1, 100), dr + der))
}

fn bounds(f: &FuncExpr) -> Result<(Rational, Rational), FuncError> {
    Ok(match f {
        FuncExpr::Zero => (int(0), int(0)),
        FuncExpr::BaseP => p_bounds(),
        FuncExpr::BaseR => r_bounds().clone(),
        FuncExpr::SinSqExample => (int(1), int(3)),
        FuncExpr::Poly { coeffs } => {
            (poly_sup_bound(coeffs, 256), poly_sup_bound(&poly_derivative(coeffs), 256))
        }
        FuncExpr::Scaled { a, b, factor, inner } => {
            let (s, d) = bounds(inner)?;
            let f = factor.abs();
            (&f * (b - a) * s, f * d)
        }
        FuncExpr::Sum { terms } => {
            let mut s = int(0);
            let mut d = int(0);
            for t in terms {
                let (ts, td) = bounds(t)?;
                s += ts;
                d += td;
            }
            (s, d)
        }
        FuncExpr::TreeSumCantor { tree } => cantor_bounds(tree, &mut HashMap::new()),
        FuncExpr::TreeSumWestrick { tree } => westrick_bounds(tree)?,
    })
}

/// Certified `(‖f‖, ‖f'‖)` upper bounds.
pub fn norm_certificates(f: &FuncExpr) -> Result<NormCertificate, FuncError> {
    let (sup, deriv) = bounds(f)?;
    Ok(NormCertificate { sup, deriv })
}

//! The building blocks `h(x) = x²·sin(1/x)`, the plateau function `p`, and
//! the polynomial `r`.

use std::sync::OnceLock;

use num_traits::{Signed, Zero};

use crate::rigor::{
    int, pow2, rat, sin_cos_enclosure, sin_cos_point, sin_enclosure, xbar_fine, Rational, RInterval,
};

/// `h(x) = x² sin(1/x)` at a rational `x ≠ 0`, width at most `tol`.
pub fn h_point(x: &Rational, tol: &Rational) -> RInterval {
    if x.is_zero() {
        return RInterval::zero();
    }
    let x2 = x * x;
    if x2 <= tol / int(2) {
        return RInterval::ball(&Rational::zero(), &x2);
    }
    let (s, _) = sin_cos_point(&x.recip(), &(tol / &x2 / int(2)));
    s.scale(&x2)
}

/// `h'(x) = 2x sin(1/x) − cos(1/x)` at a rational `x ≠ 0`, width at most
/// `tol`. At `x = 0` returns `0`, the derivative of the extension by zero.
pub fn hprime_point(x: &Rational, tol: &Rational) -> RInterval {
    if x.is_zero() {
        return RInterval::zero();
    }
    let (s, c) = sin_cos_point(&x.recip(), &(tol / int(4)));
    s.scale(&(x * int(2))) - c
}

/// Range of `h` over `X` (zero included, where `h(0) = 0`).
pub fn h_range(x: &RInterval, tol: &Rational) -> RInterval {
    if x.is_point() {
        return h_point(&x.lo, tol);
    }
    let x2 = x.powi(2);
    if x.contains_zero() {
        return RInterval { lo: -&x2.hi, hi: x2.hi };
    }
    let s = sin_enclosure(&x.recip().expect("0 excluded"), tol);
    let v = &x2 * &s;
    v.intersect(&RInterval { lo: -&x2.hi, hi: x2.hi.clone() }).unwrap_or(v)
}

/// Range of `h'` over `X`, using `|h'| ≤ 2|x| + 1` when `0 ∈ X`.
pub fn hprime_range(x: &RInterval, tol: &Rational) -> RInterval {
    if x.is_point() {
        return hprime_point(&x.lo, tol);
    }
    let bound = x.mag() * int(2) + int(1);
    let crude = RInterval { lo: -&bound, hi: bound };
    if x.contains_zero() {
        return crude;
    }
    let u = x.recip().expect("0 excluded");
    let (s, c) = sin_cos_enclosure(&u, tol);
    let v = &(&x.scale(&int(2)) * &s) - &c;
    v.intersect(&crude).unwrap_or(v)
}

/// The constant value `h(x̄)` of `p` on `[x̄, 1−x̄]`.
pub fn plateau() -> &'static RInterval {
    static PLATEAU: OnceLock<RInterval> = OnceLock::new();
    PLATEAU.get_or_init(|| h_range(xbar_fine(), &pow2(-112)))
}

enum Piece {
    Left,
    Plateau,
    Ambiguous,
}

/// Folds `x` into `[0, 1/2]` and classifies it against x̄.
fn piece(x: &Rational) -> (Rational, bool, Piece) {
    let half = rat(1, 2);
    let (y, mirrored) = if x > &half { (int(1) - x, true) } else { (x.clone(), false) };
    let xb = xbar_fine();
    let which = if y < xb.lo {
        Piece::Left
    } else if y > xb.hi {
        Piece::Plateau
    } else {
        Piece::Ambiguous
    };
    (y, mirrored, which)
}

/// `p(x)`; zero at and outside the endpoints of `[0, 1]`.
pub fn p_point(x: &Rational, tol: &Rational) -> RInterval {
    if !x.is_positive() || x >= &int(1) {
        return RInterval::zero();
    }
    let (y, _, which) = piece(x);
    match which {
        Piece::Left => h_point(&y, tol),
        Piece::Plateau => plateau().clone(),
        // p(y) is one of the two formulas; both are enclosed.
        Piece::Ambiguous => h_point(&y, tol).hull(plateau()),
    }
}

/// `p'(x)`; zero at and outside the endpoints of `[0, 1]`.
pub fn pprime_point(x: &Rational, tol: &Rational) -> RInterval {
    if !x.is_positive() || x >= &int(1) {
        return RInterval::zero();
    }
    let (y, mirrored, which) = piece(x);
    let v = match which {
        Piece::Left => hprime_point(&y, tol),
        Piece::Plateau => RInterval::zero(),
        Piece::Ambiguous => hprime_point(&y, tol).hull(&RInterval::zero()),
    };
    if mirrored {
        -v
    } else {
        v
    }
}

/// Ascending coefficients of
/// `r(x) = x²(1−x)²·(14247/512 − 27959/256·x − 139x² + 1434x³ − 2341x⁴ + 1171x⁵)`,
/// chosen so that `r(0)=r(1)=r'(0)=r'(1)=0`, `r(1/2)=1/2` and `r'(1/4)=0`.
pub fn r_coefficients() -> Vec<Rational> {
    vec![
        int(0),
        int(0),
        rat(14247, 512),
        rat(-21103, 128),
        rat(54915, 512),
        rat(410313, 256),
        int(-5348),
        int(7287),
        int(-4683),
        int(1171),
    ]
}

/// Exact polynomial value (Horner).
pub fn poly_eval(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

pub fn poly_derivative(coeffs: &[Rational]) -> Vec<Rational> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect()
}

/// Interval Horner evaluation.
pub fn poly_range(coeffs: &[Rational], x: &RInterval) -> RInterval {
    coeffs
        .iter()
        .rev()
        .fold(RInterval::zero(), |acc, c| (&acc * x).shift(c))
}

/// Certified `max |q|` over `[0, 1]` on `pieces` equal subintervals, using
/// the mean-value form `q(m) + q'(X)·(X − m)`; plain Horner overestimates
/// badly when coefficients are large and alternate in sign.
pub fn poly_sup_bound(coeffs: &[Rational], pieces: i64) -> Rational {
    let d = poly_derivative(coeffs);
    (0..pieces)
        .map(|i| {
            let x = RInterval { lo: rat(i, pieces), hi: rat(i + 1, pieces) };
            let m = x.mid();
            let slope = poly_range(&d, &x).mag();
            let mv = poly_eval(coeffs, &m).abs() + slope * x.rad();
            mv.min(poly_range(coeffs, &x).mag())
        })
        .max()
        .unwrap_or_else(Rational::zero)
}

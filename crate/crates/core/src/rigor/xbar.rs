//! x̄: the largest root of `F(x) = 2x·sin(1/x) − cos(1/x)` below 1/2.

use std::sync::OnceLock;

use num_traits::Signed;

use super::{
    int, pow2, rat, sin_cos_enclosure, sin_cos_point, Cancel, Rational, RInterval,
    RigorError,
};

const SCAN_STEP: i64 = 256;
const MAX_SPLIT_DEPTH: u32 = 24;

/// Evidence that the bracket isolates the largest root below 1/2.
#[derive(Clone, Debug)]
pub struct XbarCertificate {
    /// `F(lo) < 0 < F(hi)` and `F' > 0` on the whole bracket.
    pub bracket: RInterval,
    /// Certified lower bound of `F'` on the bracket.
    pub deriv_lower: Rational,
    /// `F > 0` was certified on `[bracket.hi, 1/2]` using this many pieces.
    pub positive_pieces: usize,
}

/// `F` at a rational point, to absolute width about `3·tol`.
pub fn f_point(x: &Rational, tol: &Rational) -> RInterval {
    let u = x.recip();
    let (s, c) = sin_cos_point(&u, tol);
    s.scale(&(x * int(2))) - c
}

/// Range enclosure of `F` over `X ⊂ (0, ∞)`.
pub fn f_range(x: &RInterval, tol: &Rational) -> RInterval {
    let u = x.recip().expect("x > 0");
    let (s, c) = sin_cos_enclosure(&u, tol);
    &(&x.scale(&int(2)) * &s) - &c
}

/// Range enclosure of `F'(x) = 2 sin(1/x) − (2/x) cos(1/x) − sin(1/x)/x²`.
pub fn f_deriv_range(x: &RInterval, tol: &Rational) -> RInterval {
    let u = x.recip().expect("x > 0");
    let (s, c) = sin_cos_enclosure(&u, tol);
    &(&s.scale(&int(2)) - &(&u.scale(&int(2)) * &c)) - &(&u.powi(2) * &s)
}

/// Certifies `pred` on `[a, b]` by bisection, returning the piece count.
fn certify_on(
    a: &Rational,
    b: &Rational,
    depth: u32,
    cancel: &Cancel,
    pred: &dyn Fn(&RInterval) -> bool,
) -> Result<Option<usize>, RigorError> {
    cancel.check()?;
    let iv = RInterval { lo: a.clone(), hi: b.clone() };
    if pred(&iv) {
        return Ok(Some(1));
    }
    if depth == 0 {
        return Ok(None);
    }
    let m = iv.mid();
    let Some(l) = certify_on(a, &m, depth - 1, cancel, pred)? else { return Ok(None) };
    let Some(r) = certify_on(&m, b, depth - 1, cancel, pred)? else { return Ok(None) };
    Ok(Some(l + r))
}

/// Sign of `F(x)` certified by tightening the tolerance; `None` if even
/// `2^{-300}` cannot separate it from zero.
fn f_sign(x: &Rational, cancel: &Cancel) -> Result<Option<bool>, RigorError> {
    let mut k = 24;
    while k <= 300 {
        cancel.check()?;
        let v = f_point(x, &pow2(-k));
        if v.lo.is_positive() {
            return Ok(Some(true));
        }
        if v.hi.is_negative() {
            return Ok(Some(false));
        }
        k += 24;
    }
    Ok(None)
}

fn build_certificate(cancel: &Cancel) -> Result<XbarCertificate, RigorError> {
    let tol = pow2(-40);
    let half = rat(1, 2);
    // Walk down from 1/2 until the first certified negative value.
    let mut k = SCAN_STEP / 2 - 1;
    let lo = loop {
        assert!(k > SCAN_STEP / 5, "no sign change of F found above 1/5");
        let g = rat(k, SCAN_STEP);
        if f_sign(&g, cancel)? == Some(false) {
            break g;
        }
        k -= 1;
    };
    let hi = &lo + rat(1, SCAN_STEP);
    let positive = |iv: &RInterval| f_range(iv, &tol).lo.is_positive();
    let positive_pieces = certify_on(&hi, &half, MAX_SPLIT_DEPTH, cancel, &positive)?
        .expect("F > 0 on [bracket, 1/2] could not be certified");
    assert_eq!(f_sign(&hi, cancel)?, Some(true), "F(bracket.hi) must be positive");
    let bracket = RInterval { lo, hi };
    let dpieces = certify_on(
        &bracket.lo,
        &bracket.hi,
        MAX_SPLIT_DEPTH,
        cancel,
        &|iv| f_deriv_range(iv, &tol).lo.is_positive(),
    )?;
    assert!(dpieces.is_some(), "F' could not be separated from zero on the bracket");
    let deriv_lower = f_deriv_range(&bracket, &tol).lo.max(pow2(-64));
    Ok(XbarCertificate { bracket, deriv_lower, positive_pieces })
}

/// The isolation certificate (computed once).
pub fn xbar_certificate() -> &'static XbarCertificate {
    static CERT: OnceLock<XbarCertificate> = OnceLock::new();
    CERT.get_or_init(|| build_certificate(&Cancel::new()).expect("not cancelled"))
}

/// Interval of width at most `precision` containing x̄. Successive calls
/// with smaller `precision` return nested intervals.
pub fn xbar(precision: &Rational) -> RInterval {
    xbar_cancellable(precision, &Cancel::new()).expect("not cancelled")
}

pub fn xbar_cancellable(precision: &Rational, cancel: &Cancel) -> Result<RInterval, RigorError> {
    assert!(precision.is_positive(), "precision must be positive");
    let mut iv = xbar_certificate().bracket.clone();
    while &iv.width() > precision {
        cancel.check()?;
        let m = iv.mid();
        match f_sign(&m, cancel)? {
            Some(true) => iv.hi = m,
            Some(false) => iv.lo = m,
            None => {
                // |F(m)| < 2^{-290}: the root is within that over F'_min.
                let r = pow2(-290) / &xbar_certificate().deriv_lower;
                let tight = RInterval::ball(&m, &r).intersect(&iv).expect("root inside");
                return Ok(tight);
            }
        }
    }
    Ok(iv)
}

/// x̄ to `2^{-120}`, shared by the function evaluators.
pub fn xbar_fine() -> &'static RInterval {
    static FINE: OnceLock<RInterval> = OnceLock::new();
    FINE.get_or_init(|| xbar(&pow2(-120)))
}

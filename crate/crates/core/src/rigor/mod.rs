//! Exact rationals, outward-rounded intervals and rigorous enclosures of
//! π, sin/cos and the constant x̄.

mod interval;
mod pi;
pub mod ser;
mod sin;
mod xbar;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use interval::RInterval;
pub use pi::{half_pi, pi};
pub use sin::{cos_enclosure, cos_point, sin_cos_enclosure, sin_cos_point, sin_enclosure, sin_point};
pub use xbar::{
    f_deriv_range, f_point, f_range, xbar, xbar_cancellable, xbar_certificate, xbar_fine,
    XbarCertificate,
};

/// Arbitrary-precision rational in lowest terms.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RigorError {
    #[error("division by an interval containing zero: {0}")]
    DivisionByZero(String),
    #[error("computation cancelled")]
    Cancelled,
    #[error("invalid interval: lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: String, hi: String },
}

/// Cooperative cancellation flag shared between a caller and long-running
/// evaluations.
#[derive(Clone, Debug, Default)]
pub struct Cancel(Arc<AtomicBool>);

impl Cancel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }

    pub fn check(&self) -> Result<(), RigorError> {
        if self.is_cancelled() {
            Err(RigorError::Cancelled)
        } else {
            Ok(())
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Largest dyadic `m / 2^bits` not above `q`.
pub fn round_down(q: &Rational, bits: u32) -> Rational {
    let scaled = q * pow2(bits as i64);
    Rational::new(scaled.floor().to_integer(), BigInt::one() << bits)
}

/// Smallest dyadic `m / 2^bits` not below `q`.
pub fn round_up(q: &Rational, bits: u32) -> Rational {
    let scaled = q * pow2(bits as i64);
    Rational::new(scaled.ceil().to_integer(), BigInt::one() << bits)
}

/// Number of bits `b` with `2^{-b} ≤ eps` (at least 1).
pub fn bits_for(eps: &Rational) -> u32 {
    assert!(eps.is_positive(), "tolerance must be positive");
    // smallest b ≥ 1 with n·2^b ≥ d, for eps = n/d
    let (n, d) = (eps.numer(), eps.denom());
    let mut b = (d.bits() as i64 - n.bits() as i64).max(1) as u32;
    while (n << b) < *d {
        b += 1;
    }
    while b > 1 && (n << (b - 1)) >= *d {
        b -= 1;
    }
    b
}

pub fn to_f64(q: &Rational) -> f64 {
    // BigRational::to_f64 handles huge numerators/denominators.
    q.to_f64().unwrap_or_else(|| {
        let (n, d) = (q.numer(), q.denom());
        let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
        let n = (n >> shift).to_f64().unwrap_or(0.0);
        let d = (d >> shift).to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact conversion of a finite `f64`.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

/// Round-half-up integer nearest to `q`.
pub fn nearest_int(q: &Rational) -> BigInt {
    (q + rat(1, 2)).floor().to_integer()
}

/// Parses `p/q`, an integer, a finite decimal such as `0.375`, or a power
/// of two `2^k`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some(k) = s.strip_prefix("2^") {
        let k: i64 = k.trim().parse().ok()?;
        return (k.abs() <= 1 << 20).then(|| pow2(k));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_abs.is_empty() { BigInt::zero() } else { ip_abs.parse().ok()? };
        let frac: BigInt = fp.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let v = Rational::new(whole * &den + frac, den);
        return Some(if neg { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Decimal rendering with `digits` fractional digits, truncated toward
/// negative infinity when `down` and toward positive infinity otherwise.
pub fn to_decimal(q: &Rational, digits: usize, down: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = q * Rational::from_integer(scale.clone());
    let n = if down { scaled.floor() } else { scaled.ceil() }.to_integer();
    let neg = n.is_negative();
    let (ip, fp) = n.abs().div_rem(&scale);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&ip.to_string());
    if digits > 0 {
        out.push('.');
        out.push_str(&format!("{:0>width$}", fp.to_string(), width = digits));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_rounding_brackets() {
        let q = rat(1, 3);
        let lo = round_down(&q, 10);
        let hi = round_up(&q, 10);
        assert!(lo <= q && q <= hi);
        assert_eq!(&hi - &lo, pow2(-10));
        assert_eq!(round_down(&rat(3, 4), 4), rat(3, 4));
        assert_eq!(round_down(&rat(-1, 3), 2), rat(-1, 2));
    }

    #[test]
    fn bits_for_is_tight() {
        assert_eq!(bits_for(&rat(1, 2)), 1);
        assert_eq!(bits_for(&rat(1, 1024)), 10);
        assert_eq!(bits_for(&rat(1, 1000)), 10);
        assert_eq!(bits_for(&rat(1, 1025)), 11);
    }

    #[test]
    fn parse_and_render() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("2^-3"), Some(rat(1, 8)));
        assert_eq!(parse_rational("2^4"), Some(int(16)));
        assert_eq!(parse_rational("2^x"), None);
        assert_eq!(to_decimal(&rat(1, 3), 4, true), "0.3333");
        assert_eq!(to_decimal(&rat(1, 3), 4, false), "0.3334");
        assert_eq!(to_decimal(&rat(-1, 3), 2, true), "-0.34");
    }

    #[test]
    fn cancel_token() {
        let c = Cancel::new();
        assert!(c.check().is_ok());
        c.clone().cancel();
        assert_eq!(c.check(), Err(RigorError::Cancelled));
    }
}

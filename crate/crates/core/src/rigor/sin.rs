use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use std::sync::OnceLock;

use super::{bits_for, half_pi, int, nearest_int, pow2, round_down, to_f64, Rational, RInterval};

/// `(sin r, cos r)` for `r` in a narrow interval with `|r| ≤ 1`, each with
/// absolute error about `2^{-bits}`.
fn sin_cos_small(r: &RInterval, bits: u32) -> (RInterval, RInterval) {
    let guard = bits + 16;
    let m = round_down(&r.mid(), guard);
    // sin and cos are 1-Lipschitz, so moving to the dyadic centre costs at
    // most its distance to the far endpoint.
    let spread = (&r.hi - &m).abs().max((&r.lo - &m).abs());
    // Fixed point with `guard` fractional bits: m = mm / 2^guard.
    let mm = (&m * pow2(guard as i64)).to_integer();
    let m2 = &mm * &mm;
    let one = BigInt::one() << guard;
    let shift = 2 * guard;
    let tol = BigInt::one() << 12; // 2^{-(bits+4)} in units of 2^{-guard}

    // sum_k (-1)^k m^{2k+offset}/(2k+offset)!; each floored division adds
    // at most one unit, and earlier errors shrink since m^2 < a(a+1).
    let series = |first: BigInt, offset: i64| -> (BigInt, BigInt) {
        let mut term = first;
        let mut sum = BigInt::zero();
        let mut term_err = BigInt::zero();
        let mut total_err = BigInt::zero();
        let mut k: i64 = 0;
        loop {
            if term.abs() < tol {
                // alternating series with decreasing terms; |m| < 1
                total_err += term.abs() + &term_err + 1;
                return (sum, total_err);
            }
            sum += &term;
            total_err += &term_err;
            let a = 2 * k + offset + 1;
            let den = BigInt::from(a * (a + 1)) << shift;
            term = (-(&term * &m2)).div_floor(&den);
            term_err += 1;
            k += 1;
        }
    };
    let (s, es) = series(mm.clone(), 1);
    let (c, ec) = series(one, 0);
    let unit = pow2(-(guard as i64));
    let to_ball = |v: BigInt, e: BigInt| {
        RInterval::ball(&(Rational::from_integer(v) * &unit), &(Rational::from_integer(e) * &unit + &spread))
    };
    let clip = |v: RInterval| {
        let unit_iv = RInterval { lo: int(-1), hi: int(1) };
        v.intersect(&unit_iv).unwrap_or(unit_iv)
    };
    let out_bits = bits + 2;
    (clip(to_ball(s, es).round_out(out_bits)), clip(to_ball(c, ec).round_out(out_bits)))
}

/// Outward dyadic roundings of π/2 at 32, 64, …, 256 bits; short
/// denominators keep the reduction cheap.
fn half_pi_at(bits: u32) -> &'static RInterval {
    static TABLE: OnceLock<Vec<RInterval>> = OnceLock::new();
    let table = TABLE.get_or_init(|| (1..=8).map(|i| half_pi().round_out(32 * i)).collect());
    let i = (bits.div_ceil(32) as usize).clamp(1, 8);
    &table[i - 1]
}

/// Writes `x = k·π/2 + r` with `|r| ≲ π/4`, `r` enclosed to about
/// `2^{-bits}`.
fn reduce(x: &Rational, bits: u32) -> (BigInt, RInterval) {
    let k = match to_f64(x) {
        f if f.abs() < 1e12 => BigInt::from((f / std::f64::consts::FRAC_PI_2).round() as i64),
        _ => nearest_int(&(x / half_pi().mid())),
    };
    let hp = half_pi_at(bits + 8 + k.bits() as u32);
    let r = RInterval::point(x.clone()) - hp.scale(&Rational::from_integer(k.clone()));
    (k, r)
}

/// Enclosures of `(sin x, cos x)` at a rational point, each of width at
/// most `eps` for moderate `|x|` (the π enclosure limits `|x| ≲ 2^{100}`).
pub fn sin_cos_point(x: &Rational, eps: &Rational) -> (RInterval, RInterval) {
    if x.is_zero() {
        return (RInterval::zero(), RInterval::point(int(1)));
    }
    let bits = bits_for(eps) + 2;
    let (k, r) = reduce(x, bits);
    let (s, c) = sin_cos_small(&r, bits);
    match k.mod_floor(&BigInt::from(4)).to_u8().expect("residue") {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

pub fn sin_point(x: &Rational, eps: &Rational) -> RInterval {
    sin_cos_point(x, eps).0
}

pub fn cos_point(x: &Rational, eps: &Rational) -> RInterval {
    sin_cos_point(x, eps).1
}

/// Enclosures of `(sin X, cos X)`. For point input each width is at most
/// `eps`; otherwise the endpoint error is at most `eps` on top of the true
/// range.
pub fn sin_cos_enclosure(x: &RInterval, eps: &Rational) -> (RInterval, RInterval) {
    let (s_lo, c_lo) = sin_cos_point(&x.lo, eps);
    if x.is_point() {
        return (s_lo, c_lo);
    }
    let full = RInterval { lo: int(-1), hi: int(1) };
    if x.width() >= int(7) {
        return (full.clone(), full);
    }
    let (s_hi, c_hi) = sin_cos_point(&x.hi, eps);
    let mut sin = s_lo.hull(&s_hi);
    let mut cos = c_lo.hull(&c_hi);
    // Extrema sit at n·π/2: sin peaks at n ≡ 1, dips at n ≡ 3 (mod 4);
    // cos peaks at n ≡ 0, dips at n ≡ 2. A coarse enclosure of π/2 only
    // risks flagging an extremum too many.
    let hp = half_pi_at(64);
    let n_lo: BigInt = (&x.lo / &hp.hi).floor().to_integer() - 1;
    let n_hi: BigInt = (&x.hi / &hp.lo).ceil().to_integer() + 1;
    let mut n = n_lo;
    while n <= n_hi {
        let crit = hp.scale(&Rational::from_integer(n.clone()));
        if crit.intersects(x) {
            match n.mod_floor(&BigInt::from(4)).to_u8().expect("residue") {
                0 => cos.hi = int(1),
                1 => sin.hi = int(1),
                2 => cos.lo = int(-1),
                _ => sin.lo = int(-1),
            }
        }
        n += 1;
    }
    let clip = |v: RInterval| v.intersect(&full).unwrap_or_else(|| full.clone());
    (clip(sin), clip(cos))
}

/// Enclosure of `sin(X)`, see [`sin_cos_enclosure`].
pub fn sin_enclosure(x: &RInterval, eps: &Rational) -> RInterval {
    sin_cos_enclosure(x, eps).0
}

pub fn cos_enclosure(x: &RInterval, eps: &Rational) -> RInterval {
    sin_cos_enclosure(x, eps).1
}

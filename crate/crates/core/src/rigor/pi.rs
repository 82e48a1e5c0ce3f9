use std::sync::OnceLock;

use num_bigint::BigInt;

use super::{int, pow2, Rational, RInterval};

const PI_BITS: u32 = 256;

/// Enclosure of `atan(1/k)` from the alternating series, stopping once the
/// first omitted term is below `2^{-bits}`.
fn atan_inv(k: i64, bits: u32) -> RInterval {
    let tol = pow2(-(bits as i64));
    let k2 = BigInt::from(k * k);
    let mut power = BigInt::from(k); // k^{2n+1}
    let mut sum = Rational::from_integer(0.into());
    let mut n: i64 = 0;
    loop {
        let term = Rational::new(1.into(), &power * BigInt::from(2 * n + 1));
        if term < tol {
            // Alternating with decreasing terms: the tail lies between 0
            // and the next term, with the next term's sign.
            return if n % 2 == 0 {
                RInterval { lo: sum.clone(), hi: sum + term }
            } else {
                RInterval { lo: &sum - term, hi: sum }
            };
        }
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &k2;
        n += 1;
    }
}

/// Enclosure of π of width at most `2^{-128}` (Machin's formula).
pub fn pi() -> &'static RInterval {
    static PI: OnceLock<RInterval> = OnceLock::new();
    PI.get_or_init(|| {
        let a = atan_inv(5, PI_BITS).scale(&int(16));
        let b = atan_inv(239, PI_BITS).scale(&int(4));
        (&a - &b).round_out(PI_BITS)
    })
}

pub fn half_pi() -> &'static RInterval {
    static HALF: OnceLock<RInterval> = OnceLock::new();
    HALF.get_or_init(|| pi().scale(&super::rat(1, 2)))
}

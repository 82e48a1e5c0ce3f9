//! The intervals `[a_n, b_n] ⊂ (1/4, 1/2)` accumulating at 1/4.

use num_traits::Signed;

use crate::rigor::{int, rat, Rational};

/// `a_n = 1/4 + (1/5)·4^{-n}`, `b_n = a_n + (1/4)(a_n − 1/4)²`.
pub fn westrick_interval(n: u32) -> (Rational, Rational) {
    let t = rat(1, 5) / num_traits::pow(int(4), n as usize);
    let a = rat(1, 4) + &t;
    let b = &a + &t * &t / int(4);
    (a, b)
}

/// The `n` with `x ∈ [a_n, b_n]`, and `x` in that interval's coordinates.
pub fn locate_westrick(x: &Rational) -> Option<(u32, Rational)> {
    let d = x - rat(1, 4);
    if !d.is_positive() {
        return None;
    }
    let mut t = rat(1, 5);
    let mut n = 0u32;
    while t > d {
        t /= int(4);
        n += 1;
    }
    let (a, b) = westrick_interval(n);
    (x <= &b).then(|| (n, (x - &a) / (&b - &a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_interval() {
        assert_eq!(westrick_interval(0), (rat(9, 20), rat(23, 50)));
    }

    #[test]
    fn interval_conditions_hold_for_first_hundred() {
        for n in 0..=100 {
            let (a, b) = westrick_interval(n);
            let (a1, b1) = westrick_interval(n + 1);
            assert!(rat(1, 4) < a && b < rat(1, 2));
            assert!(b1 < a && a < b);
            assert!(&b - &a < (&a - rat(1, 4)) * (&a - rat(1, 4)));
            assert!(a1 < a);
        }
        // a_n − 1/4 = 4^{-n}/5 → 0
        let (a, _) = westrick_interval(60);
        assert!(&a - rat(1, 4) < rat(1, 1 << 62) * int(2));
    }

    #[test]
    fn locate_round_trips() {
        for n in 0..12 {
            let (a, b) = westrick_interval(n);
            for (num, den) in [(0, 1), (1, 3), (1, 1)] {
                let x = &a + (&b - &a) * rat(num, den);
                assert_eq!(locate_westrick(&x), Some((n, rat(num, den))));
            }
            let (a_next, _) = westrick_interval(n);
            let gap = (&a_next + westrick_interval(n + 1).1) / int(2);
            assert_eq!(locate_westrick(&gap), None);
        }
        assert_eq!(locate_westrick(&rat(1, 4)), None);
        assert_eq!(locate_westrick(&rat(1, 2)), None);
        assert_eq!(locate_westrick(&rat(1, 8)), None);
    }
}

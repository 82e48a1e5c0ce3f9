use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{round_down, round_up, to_f64, Rational, RigorError};

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RInterval {
    #[serde(with = "super::ser::rational")]
    pub lo: Rational,
    #[serde(with = "super::ser::rational")]
    pub hi: Rational,
}

impl RInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, RigorError> {
        if lo > hi {
            return Err(RigorError::Inverted { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(RInterval { lo, hi })
    }

    /// Builds from two endpoints in either order.
    pub fn span(a: Rational, b: Rational) -> Self {
        if a <= b {
            RInterval { lo: a, hi: b }
        } else {
            RInterval { lo: b, hi: a }
        }
    }

    pub fn point(x: Rational) -> Self {
        RInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    /// `[c - r, c + r]`.
    pub fn ball(c: &Rational, r: &Rational) -> Self {
        let r = r.abs();
        RInterval { lo: c - &r, hi: c + &r }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn rad(&self) -> Rational {
        self.width() / Rational::from_integer(2.into())
    }

    /// `max |x|` over the interval.
    pub fn mag(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    /// `min |x|` over the interval.
    pub fn mig(&self) -> Rational {
        if self.contains_zero() {
            Rational::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }

    pub fn subset_of(&self, other: &RInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strict containment in the open interval `(other.lo, other.hi)`.
    pub fn interior_subset_of(&self, other: &RInterval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersects(&self, other: &RInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &RInterval) -> Option<RInterval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(RInterval { lo, hi })
    }

    pub fn hull(&self, other: &RInterval) -> RInterval {
        RInterval {
            lo: (&self.lo).min(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
        }
    }

    pub fn hull_point(&self, x: &Rational) -> RInterval {
        self.hull(&RInterval::point(x.clone()))
    }

    /// Widens by `r` on both sides.
    pub fn inflate(&self, r: &Rational) -> RInterval {
        RInterval { lo: &self.lo - r, hi: &self.hi + r }
    }

    pub fn scale(&self, c: &Rational) -> RInterval {
        RInterval::span(&self.lo * c, &self.hi * c)
    }

    pub fn shift(&self, c: &Rational) -> RInterval {
        RInterval { lo: &self.lo + c, hi: &self.hi + c }
    }

    pub fn recip(&self) -> Result<RInterval, RigorError> {
        if self.contains_zero() {
            return Err(RigorError::DivisionByZero(self.to_string()));
        }
        Ok(RInterval::span(self.hi.recip(), self.lo.recip()))
    }

    pub fn div(&self, other: &RInterval) -> Result<RInterval, RigorError> {
        Ok(self * &other.recip()?)
    }

    pub fn abs(&self) -> RInterval {
        RInterval { lo: self.mig(), hi: self.mag() }
    }

    /// `x^n` with the exact range for even powers straddling zero.
    pub fn powi(&self, n: u32) -> RInterval {
        if n == 0 {
            return RInterval::point(Rational::one());
        }
        let a = num_traits::pow(self.lo.clone(), n as usize);
        let b = num_traits::pow(self.hi.clone(), n as usize);
        if n % 2 == 1 {
            RInterval { lo: a, hi: b }
        } else if self.contains_zero() {
            RInterval { lo: Rational::zero(), hi: a.max(b) }
        } else {
            RInterval::span(a, b)
        }
    }

    /// Outward rounding of both endpoints to multiples of `2^{-bits}`.
    pub fn round_out(&self, bits: u32) -> RInterval {
        RInterval { lo: round_down(&self.lo, bits), hi: round_up(&self.hi, bits) }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl fmt::Display for RInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for &RInterval {
    type Output = RInterval;
    fn add(self, o: &RInterval) -> RInterval {
        RInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }
}

impl Sub for &RInterval {
    type Output = RInterval;
    fn sub(self, o: &RInterval) -> RInterval {
        RInterval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }
}

impl Mul for &RInterval {
    type Output = RInterval;
    fn mul(self, o: &RInterval) -> RInterval {
        if self.is_point() {
            return o.scale(&self.lo);
        }
        if o.is_point() {
            return self.scale(&o.lo);
        }
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().expect("nonempty").clone();
        let hi = c.iter().max().expect("nonempty").clone();
        RInterval { lo, hi }
    }
}

impl Neg for &RInterval {
    type Output = RInterval;
    fn neg(self) -> RInterval {
        RInterval { lo: -&self.hi, hi: -&self.lo }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RInterval {
            type Output = RInterval;
            fn $m(self, o: RInterval) -> RInterval {
                (&self).$m(&o)
            }
        }
        impl $tr<&RInterval> for RInterval {
            type Output = RInterval;
            fn $m(self, o: &RInterval) -> RInterval {
                (&self).$m(o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RInterval {
    type Output = RInterval;
    fn neg(self) -> RInterval {
        -&self
    }
}

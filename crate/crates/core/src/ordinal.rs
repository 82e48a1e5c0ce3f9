//! Ordinals below ω^ω in Cantor normal form.
//!
//! An [`Ordinal`] is a finite, strictly descending list of terms `ω^e·c`
//! with `c ≥ 1`. Zero is the empty list. The derived lexicographic order on
//! the term list coincides with the ordinal order, so `Ord` is derived.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One `ω^exponent · coefficient` summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub exponent: u32,
    pub coefficient: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("invalid ordinal syntax at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("terms are not in Cantor normal form (exponents must strictly decrease)")]
    NotNormal,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![Term { exponent: 0, coefficient: n }] }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(1)
    }

    /// `ω^e`.
    pub fn omega_pow(e: u32) -> Self {
        Ordinal { terms: vec![Term { exponent: e, coefficient: 1 }] }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs, rejecting
    /// anything that is not already in normal form.
    pub fn from_terms(pairs: &[(u32, u64)]) -> Result<Self, OrdinalError> {
        let mut terms = Vec::with_capacity(pairs.len());
        for &(exponent, coefficient) in pairs {
            if coefficient == 0 {
                return Err(OrdinalError::NotNormal);
            }
            if let Some(last) = terms.last() {
                let last: &Term = last;
                if last.exponent <= exponent {
                    return Err(OrdinalError::NotNormal);
                }
            }
            terms.push(Term { exponent, coefficient });
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero with a nonzero finite part.
    pub fn is_successor(&self) -> bool {
        matches!(self.terms.last(), Some(t) if t.exponent == 0)
    }

    /// Nonzero with no finite part.
    pub fn is_limit(&self) -> bool {
        matches!(self.terms.last(), Some(t) if t.exponent > 0)
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent == 0 => Some(t.coefficient),
            _ => None,
        }
    }

    /// The coefficient of `ω^0`.
    pub fn finite_part(&self) -> u64 {
        match self.terms.last() {
            Some(t) if t.exponent == 0 => t.coefficient,
            _ => 0,
        }
    }

    /// Largest exponent with a nonzero coefficient; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|t| t.exponent)
    }

    /// Coefficient of `ω^e` (zero when absent).
    pub fn coefficient(&self, e: u32) -> u64 {
        self.terms.iter().find(|t| t.exponent == e).map_or(0, |t| t.coefficient)
    }

    pub fn successor(&self) -> Self {
        self.add(&Ordinal::finite(1))
    }

    /// `a` for a successor ordinal `a + 1`.
    pub fn predecessor(&self) -> Option<Self> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a finite term");
        if last.coefficient == 1 {
            terms.pop();
        } else {
            last.coefficient -= 1;
        }
        Some(Ordinal { terms })
    }

    /// Ordinal (non-commutative) addition.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> =
            self.terms.iter().copied().take_while(|t| t.exponent >= lead.exponent).collect();
        let mut rest = other.terms.iter().copied();
        if let Some(last) = terms.last_mut() {
            if last.exponent == lead.exponent {
                last.coefficient += lead.coefficient;
                rest.next();
            }
        }
        terms.extend(rest);
        Ordinal { terms }
    }

    /// `self + n` for a natural `n`.
    pub fn add_finite(&self, n: u64) -> Ordinal {
        self.add(&Ordinal::finite(n))
    }

    /// Splits a limit or successor into `(limit_part, finite_part)`.
    pub fn split_finite(&self) -> (Ordinal, u64) {
        let n = self.finite_part();
        let mut terms = self.terms.clone();
        if n > 0 {
            terms.pop();
        }
        (Ordinal { terms }, n)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match (t.exponent, t.coefficient) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> OrdinalError {
        OrdinalError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn number(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| OrdinalError::Syntax { pos: start, msg: "number out of range".into() })
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Result<Term, OrdinalError> {
        self.skip_ws();
        if self.eat(b'w') {
            let exponent = if self.eat(b'^') {
                u32::try_from(self.number()?).map_err(|_| self.err("exponent out of range"))?
            } else {
                1
            };
            let coefficient = if self.eat(b'*') { self.number()? } else { 1 };
            Ok(Term { exponent, coefficient })
        } else {
            Ok(Term { exponent: 0, coefficient: self.number()? })
        }
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    /// Parses `w^2*3 + w + 4`. `0` is zero; `w` stands for ω.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cur = Cursor { s: s.as_bytes(), pos: 0 };
        let mut pairs = Vec::new();
        loop {
            let t = cur.term()?;
            pairs.push((t.exponent, t.coefficient));
            cur.skip_ws();
            if cur.peek().is_none() {
                break;
            }
            if !cur.eat(b'+') {
                return Err(cur.err("expected '+'"));
            }
        }
        if pairs == [(0, 0)] {
            return Ok(Ordinal::zero());
        }
        Ordinal::from_terms(&pairs)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How an ordinal sequence continues after its finite prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeqTail {
    /// Every later entry equals this value.
    Constant(Ordinal),
    /// Entries `start, start+1, start+2, …`.
    Ascending(Ordinal),
}

/// A finitely described ω-sequence of ordinals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinalSeqSchema {
    pub prefix: Vec<Ordinal>,
    pub tail: SeqTail,
}

impl OrdinalSeqSchema {
    pub fn constant(prefix: Vec<Ordinal>, tail: Ordinal) -> Self {
        OrdinalSeqSchema { prefix, tail: SeqTail::Constant(tail) }
    }

    pub fn ascending(prefix: Vec<Ordinal>, start: Ordinal) -> Self {
        OrdinalSeqSchema { prefix, tail: SeqTail::Ascending(start) }
    }

    /// `(sup, limsup)` of the described sequence.
    pub fn sup_limsup(&self) -> (Ordinal, Ordinal) {
        let limsup = match &self.tail {
            SeqTail::Constant(v) => v.clone(),
            SeqTail::Ascending(start) => start.add(&Ordinal::omega()),
        };
        let sup = self.prefix.iter().fold(limsup.clone(), |acc, o| acc.max(o.clone()));
        (sup, limsup)
    }
}

/// Free-function form of [`OrdinalSeqSchema::sup_limsup`].
pub fn sup_limsup(seq: &OrdinalSeqSchema) -> (Ordinal, Ordinal) {
    seq.sup_limsup()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    /// Every CNF ordinal with exponents ≤ 3 and coefficients ≤ 3.
    fn universe() -> Vec<Ordinal> {
        let mut out = vec![Ordinal::zero()];
        for mask in 1u32..16 {
            let exps: Vec<u32> = (0..4).rev().filter(|e| mask & (1 << e) != 0).collect();
            let mut partial: Vec<Vec<(u32, u64)>> = vec![vec![]];
            for &e in &exps {
                partial = partial
                    .into_iter()
                    .flat_map(|p| {
                        (1..=3).map(move |c| {
                            let mut q = p.clone();
                            q.push((e, c));
                            q
                        })
                    })
                    .collect();
            }
            out.extend(partial.iter().map(|p| Ordinal::from_terms(p).unwrap()));
        }
        out
    }

    #[test]
    fn compare_examples() {
        assert_eq!(o("w").cmp(&o("3")), Ordering::Greater);
        assert_eq!(o("w + 1").cmp(&o("w")), Ordering::Greater);
        assert_eq!(o("w*2").cmp(&o("w + 5")), Ordering::Greater);
    }

    #[test]
    fn successor_examples() {
        assert_eq!(Ordinal::zero().successor(), o("1"));
        assert_eq!(o("w").successor(), o("w + 1"));
        assert_eq!(o("w*2 + 3").successor(), o("w*2 + 4"));
    }

    #[test]
    fn sup_limsup_examples() {
        let s = OrdinalSeqSchema::constant(vec![o("3"), o("1")], o("0"));
        assert_eq!(s.sup_limsup(), (o("3"), o("0")));
        let s = OrdinalSeqSchema::constant(vec![], o("1"));
        assert_eq!(s.sup_limsup(), (o("1"), o("1")));
        let s = OrdinalSeqSchema::constant(vec![o("w")], o("2"));
        assert_eq!(s.sup_limsup(), (o("w"), o("2")));
        let s = OrdinalSeqSchema::ascending(vec![], o("1"));
        assert_eq!(s.sup_limsup(), (o("w"), o("w")));
        let s = OrdinalSeqSchema::ascending(vec![o("w*5")], o("w + 1"));
        assert_eq!(s.sup_limsup(), (o("w*5"), o("w*2")));
    }

    #[test]
    fn total_order_on_universe() {
        let u = universe();
        assert_eq!(u.len(), 1 + 255);
        for a in &u {
            assert!(Ordinal::zero() <= *a);
            for b in &u {
                let ab = a.cmp(b);
                assert_eq!(ab, b.cmp(a).reverse());
                if ab == Ordering::Equal {
                    assert_eq!(a, b);
                }
            }
        }
        // transitivity via sorting consistency
        let mut sorted = u.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                assert!(sorted[i] < sorted[j]);
            }
        }
    }

    #[test]
    fn successor_is_immediate() {
        let u = universe();
        for a in &u {
            let s = a.successor();
            assert!(s > *a);
            assert!(s.is_successor());
            assert_eq!(s.predecessor().as_ref(), Some(a));
            assert!(!u.iter().any(|b| b > a && *b < s));
        }
    }

    #[test]
    fn addition_absorbs_lower_terms() {
        assert_eq!(o("3").add(&o("w")), o("w"));
        assert_eq!(o("w*2 + 3").add(&o("w")), o("w*3"));
        assert_eq!(o("w^2 + w").add(&o("w^2*2 + 1")), o("w^2*3 + 1"));
        assert_eq!(o("w").add(&o("0")), o("w"));
    }

    #[test]
    fn render_parse() {
        for s in ["0", "1", "w", "w + 4", "w^2*3 + w + 4", "w^3 + w*2"] {
            assert_eq!(o(s).to_string(), s);
        }
        assert_eq!(o(" w^2 * 3+w+4 "), o("w^2*3 + w + 4"));
        assert!("w + w".parse::<Ordinal>().is_err());
        assert!("3 + w".parse::<Ordinal>().is_err());
        assert!("w^".parse::<Ordinal>().is_err());
        assert!("".parse::<Ordinal>().is_err());
        for a in universe() {
            assert_eq!(a.to_string().parse::<Ordinal>().unwrap(), a);
        }
    }

    #[test]
    fn classification() {
        assert!(o("w").is_limit());
        assert!(!o("w").is_successor());
        assert!(o("w + 2").is_successor());
        assert!(!Ordinal::zero().is_limit() && !Ordinal::zero().is_successor());
        assert_eq!(o("w*2 + 3").split_finite(), (o("w*2"), 3));
    }
}

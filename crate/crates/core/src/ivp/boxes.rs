//! Open rational boxes `(a_1, b_1) × … × (a_r, b_r)`.

use serde::{Deserialize, Serialize};

use crate::rigor::{int, ser, Rational, RInterval};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenBox {
    #[serde(with = "ser::rational_vec")]
    pub lo: Vec<Rational>,
    #[serde(with = "ser::rational_vec")]
    pub hi: Vec<Rational>,
}

impl OpenBox {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Self {
        assert_eq!(lo.len(), hi.len(), "dimension mismatch");
        OpenBox { lo, hi }
    }

    /// The empty box in `dim` dimensions.
    pub fn empty(dim: usize) -> Self {
        OpenBox { lo: vec![int(0); dim], hi: vec![int(0); dim] }
    }

    /// Interior of a product of closed intervals.
    pub fn from_intervals(ivs: &[RInterval]) -> Self {
        OpenBox { lo: ivs.iter().map(|i| i.lo.clone()).collect(), hi: ivs.iter().map(|i| i.hi.clone()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a >= b)
    }

    /// The closure, one closed interval per dimension.
    pub fn closure(&self) -> Vec<RInterval> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| RInterval { lo: a.clone(), hi: b.clone() }).collect()
    }

    pub fn side(&self, d: usize) -> RInterval {
        RInterval { lo: self.lo[d].clone(), hi: self.hi[d].clone() }
    }

    pub fn width(&self, d: usize) -> Rational {
        &self.hi[d] - &self.lo[d]
    }

    pub fn max_width(&self) -> Rational {
        (0..self.dim()).map(|d| self.width(d)).max().unwrap_or_else(|| int(0))
    }

    /// `self ⊆ other` (empty boxes are contained in everything).
    pub fn subset_of(&self, other: &OpenBox) -> bool {
        self.is_empty()
            || (!other.is_empty()
                && (0..self.dim()).all(|d| other.lo[d] <= self.lo[d] && self.hi[d] <= other.hi[d]))
    }

    /// Whether a closed box lies inside this open box.
    pub fn contains_closed(&self, ivs: &[RInterval]) -> bool {
        ivs.iter().enumerate().all(|(d, iv)| self.lo[d] < iv.lo && iv.hi < self.hi[d])
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &OpenBox) -> OpenBox {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        OpenBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(b).clone()).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(b).clone()).collect(),
        }
    }

    /// Exact Minkowski sum `self + h·c`.
    pub fn plus_scaled(&self, h: &Rational, c: &OpenBox) -> OpenBox {
        OpenBox {
            lo: (0..self.dim()).map(|d| &self.lo[d] + h * &c.lo[d]).collect(),
            hi: (0..self.dim()).map(|d| &self.hi[d] + h * &c.hi[d]).collect(),
        }
    }

    /// Widens each side about its centre by `factor` and then by `pad`.
    pub fn inflate(&self, factor: &Rational, pad: &Rational) -> OpenBox {
        let mut out = self.clone();
        for d in 0..self.dim() {
            let c = (&self.lo[d] + &self.hi[d]) / int(2);
            let r = self.width(d) / int(2) * factor + pad;
            out.lo[d] = &c - &r;
            out.hi[d] = c + r;
        }
        out
    }

    /// Outward rounding to `bits`-bit dyadics.
    pub fn round_out(&self, bits: u32) -> OpenBox {
        OpenBox::from_intervals(&self.closure().iter().map(|iv| iv.round_out(bits)).collect::<Vec<_>>())
    }
}

/// Whether `target ⊆ ⋃ parts` for open boxes, by coordinate compression:
/// every elementary cell of `target` (open gaps between breakpoints and
/// the breakpoints themselves) must lie in a single part.
pub fn covered_by_union(target: &OpenBox, parts: &[OpenBox]) -> bool {
    if target.is_empty() {
        return true;
    }
    let parts: Vec<&OpenBox> = parts.iter().filter(|p| !p.is_empty()).collect();
    let dim = target.dim();
    // per dimension: the elementary pieces inside (lo, hi)
    let mut pieces: Vec<Vec<(Rational, Rational)>> = Vec::with_capacity(dim);
    for d in 0..dim {
        let mut cuts: Vec<Rational> = parts
            .iter()
            .flat_map(|p| [p.lo[d].clone(), p.hi[d].clone()])
            .filter(|c| &target.lo[d] < c && c < &target.hi[d])
            .collect();
        cuts.push(target.lo[d].clone());
        cuts.push(target.hi[d].clone());
        cuts.sort();
        cuts.dedup();
        let mut ps = Vec::new();
        for w in cuts.windows(2) {
            ps.push((w[0].clone(), w[1].clone()));
            if w[1] < target.hi[d] {
                ps.push((w[1].clone(), w[1].clone()));
            }
        }
        pieces.push(ps);
    }
    let piece_in = |p: &OpenBox, d: usize, (a, b): &(Rational, Rational)| {
        if a == b {
            &p.lo[d] < a && a < &p.hi[d]
        } else {
            &p.lo[d] <= a && b <= &p.hi[d]
        }
    };
    let mut idx = vec![0usize; dim];
    loop {
        let ok = parts.iter().any(|p| (0..dim).all(|d| piece_in(p, d, &pieces[d][idx[d]])));
        if !ok {
            return false;
        }
        let mut d = 0;
        loop {
            if d == dim {
                return true;
            }
            idx[d] += 1;
            if idx[d] < pieces[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

//! Fixed-step construction of validated tuples.
//!
//! Away from the singular stratum a step is interval Euler with an inflated
//! a-priori box. Inside a window `|x − v| ≤ w` around the hyperplane
//! `E_1 = {x = v}` the step is placed on layer 1: `B` is stretched to touch
//! the hyperplane, so only `f↾E_1` needs enclosing, and `Y` comes from the
//! conserved quantity fixed at window entry.

use serde::Serialize;

use super::{IvpError, MonkeyTuple, OpenBox, StratifiedRHS, Stratum};
use crate::ordinal::Ordinal;
use crate::rigor::{bits_for, int, pow2, rat, Rational, RInterval};

/// Dyadic precision boxes are rounded out to.
const BOX_BITS: u32 = 64;
/// Strict gap between a range enclosure and the open box `C`.
const RANGE_MARGIN: i64 = -30;
/// Absolute padding when inflating a-priori boxes.
const PAD: i64 = -40;
const APRIORI_ATTEMPTS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnclosureConfig {
    pub h: Rational,
    /// Relative growth factor of the a-priori box, at least 1.
    pub inflation: Rational,
    /// Half-width of the crossing window; `None` picks [`default_window`].
    pub window: Option<Rational>,
    /// A cover wider than this aborts the run.
    pub max_width: Rational,
}

impl EnclosureConfig {
    pub fn new(h: Rational) -> Self {
        EnclosureConfig { h, inflation: rat(11, 10), window: None, max_width: int(10) }
    }
}

/// Balances the Euler growth outside the window (about `h/w`) against
/// the oscillation swept inside it (about `w²`): `w ≈ (h/4)^{1/3}`,
/// rounded to a power of two.
pub fn default_window(h: &Rational) -> Rational {
    let k = bits_for(h) as f64;
    pow2(-(((k + 2.0) / 3.0).round() as i64))
}

/// The boxes covering the solution at time `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cover {
    #[serde(with = "crate::rigor::ser::rational")]
    pub t: Rational,
    pub boxes: Vec<OpenBox>,
}

impl Cover {
    pub fn hull(&self) -> OpenBox {
        self.boxes.iter().fold(OpenBox::empty(self.boxes.first().map_or(0, OpenBox::dim)), |a, b| a.hull(b))
    }

    pub fn max_width(&self) -> Rational {
        self.hull().max_width()
    }

    /// Whether some box strictly contains the closed enclosure `p`.
    pub fn contains(&self, p: &[RInterval]) -> bool {
        self.boxes.iter().any(|b| b.contains_closed(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Enclosure {
    pub tuples: Vec<MonkeyTuple>,
    /// `covers[i]` is the cover at `t_i`; one more than the step count.
    pub covers: Vec<Cover>,
}

impl Enclosure {
    pub fn max_width(&self) -> Rational {
        self.covers.iter().map(Cover::max_width).max().unwrap_or_else(|| int(0))
    }

    pub fn final_width(&self) -> Rational {
        self.covers.last().map(Cover::max_width).unwrap_or_else(|| int(0))
    }

    /// Largest cover width over steps with `t ≤ t_max`.
    pub fn max_width_until(&self, t_max: &Rational) -> Rational {
        self.covers.iter().filter(|c| &c.t <= t_max).map(Cover::max_width).max().unwrap_or_else(|| int(0))
    }

    /// Index of the first cover not containing `solution(t)`.
    pub fn first_miss(&self, solution: impl Fn(&Rational) -> Vec<RInterval>) -> Option<usize> {
        self.covers.iter().position(|c| !c.contains(&solution(&c.t)))
    }
}

fn closed(b: &OpenBox) -> Vec<RInterval> {
    b.closure()
}

/// Open box strictly containing a closed one.
fn strictly_around(ivs: &[RInterval]) -> OpenBox {
    let m = pow2(RANGE_MARGIN);
    OpenBox::from_intervals(&ivs.iter().map(|i| i.inflate(&m)).collect::<Vec<_>>()).round_out(BOX_BITS)
}

struct Singular {
    dim: usize,
    value: Rational,
}

fn singular_hyperplane(rhs: &StratifiedRHS) -> Option<Singular> {
    match rhs.strata.get(1) {
        Some(Stratum::Hyperplane { dim, value }) => Some(Singular { dim: *dim, value: value.clone() }),
        _ => None,
    }
}

/// Layer-0 Euler step; grows `B` until the a-priori inclusion closes.
fn euler_step(
    rhs: &StratifiedRHS,
    x: &OpenBox,
    h: &Rational,
    inflation: &Rational,
) -> Result<(OpenBox, OpenBox, OpenBox), String> {
    let zero = Ordinal::zero();
    let one = Ordinal::finite(1);
    let pad = pow2(PAD);
    let guess = rhs.range_enclosure(&zero, &closed(x)).map_err(|e| e.to_string())?;
    let mut b = x.hull(&x.plus_scaled(h, &strictly_around(&guess))).inflate(inflation, &pad).round_out(BOX_BITS);
    for _ in 0..APRIORI_ATTEMPTS {
        if !rhs.box_in_domain(&b) {
            return Err("a-priori box leaves the domain".into());
        }
        if rhs.meets_stratum(&one, &closed(&b)) {
            return Err("a-priori box reaches the singular stratum".into());
        }
        let c = strictly_around(&rhs.range_enclosure(&zero, &closed(&b)).map_err(|e| e.to_string())?);
        let y = x.plus_scaled(h, &c).round_out(BOX_BITS);
        if y.subset_of(&b) {
            return Ok((b, c, y));
        }
        b = x.hull(&y).inflate(inflation, &pad).round_out(BOX_BITS);
    }
    Err("a-priori enclosure did not close".into())
}

/// Layer-1 step inside the crossing window, `k` the conserved-quantity
/// enclosure from window entry.
fn window_step(
    rhs: &StratifiedRHS,
    sing: &Singular,
    x: &OpenBox,
    h: &Rational,
    k: &RInterval,
) -> Result<(OpenBox, OpenBox, OpenBox), String> {
    // any box touching the hyperplane sees the stratum's constant field
    let mut on_plane = closed(x);
    on_plane[sing.dim] = RInterval::point(sing.value.clone());
    let range = rhs.range_enclosure(&Ordinal::finite(1), &on_plane).map_err(|e| e.to_string())?;
    let c_flow = strictly_around(&range);
    // the transported coordinate moves with the constant field, the other
    // one is read off the level set
    let moved = x.plus_scaled(h, &c_flow);
    let mut y = moved.clone();
    let other = 1 - sing.dim;
    let swept = rhs.level_set(k, &moved.side(sing.dim));
    let m = pow2(RANGE_MARGIN);
    y.lo[other] = (&x.lo[other]).min(&swept.lo).clone() - &m;
    y.hi[other] = (&x.hi[other]).max(&swept.hi).clone() + &m;
    let y = y.round_out(BOX_BITS);
    let mut c = c_flow;
    c.lo[other] = (&y.lo[other] - &x.lo[other]) / h;
    c.hi[other] = (&y.hi[other] - &x.hi[other]) / h;
    let mut b = x.hull(&y);
    b.lo[sing.dim] = (&b.lo[sing.dim]).min(&sing.value).clone();
    b.hi[sing.dim] = (&b.hi[sing.dim]).max(&sing.value).clone();
    if !rhs.box_in_domain(&b) {
        return Err("window box leaves the domain".into());
    }
    Ok((b, c, y))
}

/// Fixed-step enclosure from the closed initial box `y0` at `t0` to `t1`.
/// The last step is shortened to land on `t1`.
pub fn construct_enclosure(
    rhs: &StratifiedRHS,
    y0: &[RInterval],
    t0: &Rational,
    t1: &Rational,
    cfg: &EnclosureConfig,
) -> Result<Enclosure, IvpError> {
    if cfg.h <= int(0) {
        return Err(IvpError::InvalidInput("step size must be positive".into()));
    }
    if t1 < t0 {
        return Err(IvpError::InvalidInput("t1 precedes t0".into()));
    }
    if cfg.inflation < int(1) {
        return Err(IvpError::InvalidInput("inflation below 1".into()));
    }
    if y0.len() != rhs.dim() || rhs.dim() != 2 {
        return Err(IvpError::InvalidInput(format!("expected a planar initial value, got {}", y0.len())));
    }
    let sing = singular_hyperplane(rhs)
        .ok_or_else(|| IvpError::InvalidInput("right-hand side has no singular hyperplane".into()))?;
    let w = cfg.window.clone().unwrap_or_else(|| default_window(&cfg.h));
    let window = RInterval { lo: &sing.value - &w, hi: &sing.value + &w };

    let mut x = strictly_around(y0);
    let mut t = t0.clone();
    let mut tuples = Vec::new();
    let mut covers = vec![Cover { t: t.clone(), boxes: vec![x.clone()] }];
    let mut k: Option<RInterval> = None;
    let mut step = 0usize;
    while &t < t1 {
        let h = (t1 - &t).min(cfg.h.clone());
        let reach = x.side(sing.dim).hull(&x.side(sing.dim).shift(&(&h * rat(2, 1))));
        let (layer, (b, c, y)) = if reach.intersects(&window) {
            let kk = k.get_or_insert_with(|| rhs.invariant(&closed(&x))).clone();
            (1, window_step(rhs, &sing, &x, &h, &kk).map_err(|reason| IvpError::StepFailure { step, reason })?)
        } else {
            k = None;
            (0, euler_step(rhs, &x, &h, &cfg.inflation).map_err(|reason| IvpError::StepFailure { step, reason })?)
        };
        let width = y.max_width();
        if width > cfg.max_width {
            return Err(IvpError::WidthBlowUp { step, width: crate::rigor::to_decimal(&width, 6, false) });
        }
        tuples.push(MonkeyTuple { step, layer: Ordinal::finite(layer), j: 0, x: x.clone(), h: h.clone(), b, c, y: y.clone() });
        t += &h;
        covers.push(Cover { t: t.clone(), boxes: vec![y.clone()] });
        x = y;
        step += 1;
    }
    Ok(Enclosure { tuples, covers })
}

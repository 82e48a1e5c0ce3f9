//! Numeric corroboration of discontinuity sets by sampled oscillation of
//! the derivative. Never used to define stages.

use num_traits::ToPrimitive;

use super::{RemovedError, SymbolicSet};
use crate::exec::Exec;
use crate::func::{eval_deriv, FuncExpr};
use crate::rigor::{int, pow2, Rational};

#[derive(Clone, Debug)]
pub struct ProbeConfig {
    pub grid_step: Rational,
    pub osc_threshold: Rational,
    /// Window radii `grid_step · 2^{-k}` for `k < scales`.
    pub scales: u32,
    /// Lattice points per window side.
    pub samples: u32,
    pub eps: Rational,
}

impl ProbeConfig {
    pub fn new(grid_step: Rational, osc_threshold: Rational) -> Self {
        ProbeConfig { grid_step, osc_threshold, scales: 16, samples: 8, eps: pow2(-16) }
    }
}

/// Whether the certified oscillation of `y'` over the lattice points of
/// `s` within `radius` of `x` reaches the threshold.
fn oscillates(
    y: &FuncExpr,
    s: &SymbolicSet,
    x: &Rational,
    radius: &Rational,
    cfg: &ProbeConfig,
) -> Result<bool, RemovedError> {
    let spacing = radius / int(i64::from(cfg.samples));
    let mut max_lo: Option<Rational> = None;
    let mut min_hi: Option<Rational> = None;
    let n = i64::from(cfg.samples);
    for j in -n..=n {
        let z = x + &spacing * int(j);
        if z < int(0) || z > int(1) || !s.contains(&z)? {
            continue;
        }
        let d = eval_deriv(y, &z, &cfg.eps)?;
        if max_lo.as_ref().is_none_or(|m| &d.lo > m) {
            max_lo = Some(d.lo.clone());
        }
        if min_hi.as_ref().is_none_or(|m| &d.hi < m) {
            min_hi = Some(d.hi);
        }
        if let (Some(a), Some(b)) = (&max_lo, &min_hi) {
            if a - b >= cfg.osc_threshold {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Grid points of `s` where the sampled oscillation of `y'` reaches the
/// threshold on every window scale.
pub fn numeric_discontinuity_probe(
    y: &FuncExpr,
    s: &SymbolicSet,
    cfg: &ProbeConfig,
    exec: Exec,
) -> Result<Vec<Rational>, RemovedError> {
    let count = (int(1) / &cfg.grid_step).floor().to_integer().to_usize().unwrap_or(0);
    let flags = exec.map_range(count + 1, |j| -> Result<Option<Rational>, RemovedError> {
        let x = &cfg.grid_step * int(j as i64);
        if !s.contains(&x)? {
            return Ok(None);
        }
        let mut radius = cfg.grid_step.clone();
        for _ in 0..cfg.scales {
            if !oscillates(y, s, &x, &radius, cfg)? {
                return Ok(None);
            }
            radius /= int(2);
        }
        Ok(Some(x))
    });
    flags.into_iter().filter_map(Result::transpose).collect()
}

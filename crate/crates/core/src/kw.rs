//! Grid estimator for the Kechris–Woodin ε-derivative stages.
//!
//! `x` survives a step when, for every `δ` in the schedule, two rational
//! segments inside `B(x, δ)` whose overlap meets the current set have
//! difference quotients at least `ε` apart. Witnesses are searched on a
//! dyadic lattice: a short segment starting or ending at a lattice point
//! (a point of the set after stage 0) against the whole ball.

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::func::{eval, eval_deriv, FuncError, FuncExpr};
use crate::rigor::{int, pow2, ser, Rational, RInterval};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KwError {
    #[error("difference quotient needs two distinct points, got {0} twice")]
    EqualPoints(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Func(#[from] FuncError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KWGridConfig {
    #[serde(with = "ser::rational_vec")]
    pub epsilons: Vec<Rational>,
    #[serde(with = "ser::rational_vec")]
    pub delta_schedule: Vec<Rational>,
    #[serde(with = "ser::rational")]
    pub grid_step: Rational,
    pub max_stage: usize,
    /// Lattice spacing is `min(grid_step, δ) / 2^refine`.
    #[serde(default = "default_refine")]
    pub refine: u32,
}

fn default_refine() -> u32 {
    4
}

impl Default for KWGridConfig {
    fn default() -> Self {
        KWGridConfig {
            epsilons: vec![pow2(-1), pow2(-3)],
            delta_schedule: (3..=24).map(|k| pow2(-k)).collect(),
            grid_step: pow2(-8),
            max_stage: 4,
            refine: default_refine(),
        }
    }
}

impl KWGridConfig {
    pub fn validate(&self) -> Result<(), KwError> {
        let positive = |v: &[Rational]| v.iter().all(Rational::is_positive);
        let descending = |v: &[Rational]| v.windows(2).all(|w| w[0] > w[1]);
        if self.epsilons.is_empty() || !positive(&self.epsilons) || !descending(&self.epsilons) {
            return Err(KwError::Config("epsilons must be positive and strictly descending".into()));
        }
        if self.delta_schedule.is_empty() || !positive(&self.delta_schedule) || !descending(&self.delta_schedule) {
            return Err(KwError::Config("delta_schedule must be positive and strictly descending".into()));
        }
        if !self.grid_step.is_positive() || self.grid_step > int(1) {
            return Err(KwError::Config("grid_step must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, KwError> {
        let cfg: KWGridConfig = serde_json::from_str(s).map_err(|e| KwError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The grid `{0, h, 2h, …} ∩ [0, 1]`.
    pub fn grid(&self) -> Vec<Rational> {
        let n = (int(1) / &self.grid_step).floor().to_integer().to_usize().unwrap_or(0);
        (0..=n).map(|j| &self.grid_step * int(j as i64)).collect()
    }
}

/// A finite stand-in for a stage set. `dense` marks stage 0, which is all
/// of `[0, 1]` rather than just its grid points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSet {
    pub points: Vec<Rational>,
    pub dense: bool,
}

impl GridSet {
    pub fn full(cfg: &KWGridConfig) -> Self {
        GridSet { points: cfg.grid(), dense: true }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether `[lo, hi]` meets the set.
    fn meets(&self, lo: &Rational, hi: &Rational) -> bool {
        if self.dense {
            return lo <= &int(1) && hi >= &int(0);
        }
        let i = self.points.partition_point(|p| p < lo);
        self.points.get(i).is_some_and(|p| p <= hi)
    }
}

/// Two segments with certified `|Δ(p,q) − Δ(r,s)| ≥ ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub p: Rational,
    pub q: Rational,
    pub r: Rational,
    pub s: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retained {
    pub x: Rational,
    pub witness: Witness,
}

/// Enclosure of `(y(x) − y(z)) / (x − z)`, with `y` evaluated to `eps`.
pub fn diff_quotient(y: &FuncExpr, x: &Rational, z: &Rational, eps: &Rational) -> Result<RInterval, KwError> {
    if x == z {
        return Err(KwError::EqualPoints(x.to_string()));
    }
    let num = eval(y, x, eps)? - eval(y, z, eps)?;
    Ok(num.scale(&(x - z).recip()))
}

/// `Δ` over `[a, b]` with enclosure width well below `eps`.
fn quotient(y: &FuncExpr, a: &Rational, b: &Rational, eps: &Rational) -> Result<RInterval, KwError> {
    // evaluation error 2·tol/(b − a) is kept under eps/8
    let tol = eps * (b - a) / int(16);
    diff_quotient(y, b, a, &tol)
}

fn apart(u: &RInterval, v: &RInterval, eps: &Rational) -> bool {
    &u.lo - &v.hi >= *eps || &v.lo - &u.hi >= *eps
}

/// Short segment lengths tried at a candidate point, as powers of two
/// below the lattice spacing.
const SHORT_SCALES: [i64; 5] = [8, 16, 24, 32, 40];

/// Searches `B(x, δ)` for a short segment `[z, z ± ℓ]` whose quotient is
/// certified `ε`-far from the quotient over the whole ball. Lattice points
/// are screened by `y'(z)`, the limit of the short quotients; only
/// promising points are certified, which loses witnesses but never
/// invents one.
fn witness_in_ball(
    y: &FuncExpr,
    p: &GridSet,
    x: &Rational,
    delta: &Rational,
    eps: &Rational,
    cfg: &KWGridConfig,
) -> Result<Option<Witness>, KwError> {
    let lo = (x - delta).max(int(0));
    let hi = (x + delta).min(int(1));
    if lo >= hi {
        return Ok(None);
    }
    let big = quotient(y, &lo, &hi, eps)?;
    let screen_tol = eps / int(8);
    let eta = cfg.grid_step.clone().min(delta.clone()) * pow2(-i64::from(cfg.refine));
    let steps = (delta / &eta).floor().to_integer().to_i64().unwrap_or(0);
    for i in -steps..=steps {
        let z = x + &eta * int(i);
        if z < lo || z > hi || !p.meets(&z, &z) {
            continue;
        }
        if !apart(&eval_deriv(y, &z, &screen_tol)?, &big, eps) {
            continue;
        }
        for k in SHORT_SCALES {
            let len = &eta * pow2(-k);
            let right = (&z + &len <= hi).then(|| (z.clone(), &z + &len));
            let left = (&z - &len >= lo).then(|| (&z - &len, z.clone()));
            for (a, b) in [right, left].into_iter().flatten() {
                if apart(&quotient(y, &a, &b, eps)?, &big, eps) {
                    return Ok(Some(Witness { p: a, q: b, r: lo, s: hi }));
                }
            }
        }
    }
    Ok(None)
}

/// Witness for `x` valid for every `δ` in the schedule: a pair inside the
/// smallest ball lies inside all of them.
fn retain(
    y: &FuncExpr,
    p: &GridSet,
    x: &Rational,
    eps: &Rational,
    cfg: &KWGridConfig,
) -> Result<Option<Witness>, KwError> {
    let delta = cfg.delta_schedule.iter().min().expect("validated schedule");
    witness_in_ball(y, p, x, delta, eps, cfg)
}

/// One ε-derivative step on the grid.
pub fn kw_step(
    y: &FuncExpr,
    p: &GridSet,
    eps: &Rational,
    cfg: &KWGridConfig,
    exec: Exec,
) -> Result<(GridSet, Vec<Retained>), KwError> {
    let found = exec.map(&p.points, |x| retain(y, p, x, eps, cfg).map(|w| w.map(|witness| Retained { x: x.clone(), witness })));
    let mut kept = Vec::new();
    for r in found {
        if let Some(r) = r? {
            kept.push(r);
        }
    }
    let points = kept.iter().map(|r| r.x.clone()).collect();
    Ok((GridSet { points, dense: false }, kept))
}

/// One estimator run for a single ε: retained points per stage.
#[derive(Clone, Debug)]
pub struct KwRun {
    pub eps: Rational,
    /// `stages[a]` holds the points of stage `a + 1`.
    pub stages: Vec<Vec<Retained>>,
}

impl KwRun {
    /// Number of nonempty stages, counting stage 0.
    pub fn nonempty_stages(&self) -> usize {
        1 + self.stages.iter().take_while(|s| !s.is_empty()).count()
    }
}

pub fn kw_run(y: &FuncExpr, eps: &Rational, cfg: &KWGridConfig, exec: Exec) -> Result<KwRun, KwError> {
    let mut p = GridSet::full(cfg);
    let mut stages = Vec::new();
    while stages.len() < cfg.max_stage && !p.is_empty() {
        let (next, kept) = kw_step(y, &p, eps, cfg, exec)?;
        stages.push(kept);
        p = next;
    }
    Ok(KwRun { eps: eps.clone(), stages })
}

/// All runs of the estimator: each configured ε and its half.
pub fn kw_runs(y: &FuncExpr, cfg: &KWGridConfig, exec: Exec) -> Result<Vec<KwRun>, KwError> {
    cfg.validate()?;
    let mut eps: Vec<Rational> = cfg.epsilons.iter().flat_map(|e| [e.clone(), e / int(2)]).collect();
    eps.sort_by(|a, b| b.cmp(a));
    eps.dedup();
    eps.iter().map(|e| kw_run(y, e, cfg, exec)).collect()
}

/// Lower-bound estimate of `|y|_KW` over finite stages: the largest number
/// of nonempty grid stages over the ε list (and halves). Stages only grow
/// as ε shrinks, so the smallest ε attains the maximum.
pub fn kw_rank_lower_bound(y: &FuncExpr, cfg: &KWGridConfig, exec: Exec) -> Result<usize, KwError> {
    cfg.validate()?;
    let smallest = cfg.epsilons.iter().min().expect("validated") / int(2);
    Ok(kw_run(y, &smallest, cfg, exec)?.nonempty_stages())
}

/// CSV of retained points: `eps,stage,x,p,q,r,s`.
pub fn runs_csv(runs: &[KwRun]) -> String {
    let mut out = String::from("# format_version: 1\neps,stage,x,p,q,r,s\n");
    for run in runs {
        for (i, stage) in run.stages.iter().enumerate() {
            for r in stage {
                let w = &r.witness;
                out.push_str(&format!("{},{},{},{},{},{},{}\n", run.eps, i + 1, r.x, w.p, w.q, w.r, w.s));
            }
        }
    }
    out
}

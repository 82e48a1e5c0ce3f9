//! Structural function expressions on `[0, 1]` and their rigorous
//! evaluation.
//!
//! * `p`: `x² sin(1/x)` up to x̄, constant on `[x̄, 1−x̄]`, mirrored after.
//! * `y_T = p + ¼ Σ y_{T_n}[I_n]` over the middle-thirds gaps `I_n`.
//! * `g_T = r + Σ g_{T_n}[a_n, b_n]` over intervals accumulating at 1/4.
//! * `f[a, b](x) = (b − a)·f((x − a)/(b − a))` on `[a, b]`, zero elsewhere.

pub mod base;
pub mod cantor;
mod eval;
mod norms;
pub mod westrick;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rigor::{int, ser, Rational};
use crate::tree::TreeSchema;

pub use cantor::cantor_interval;
pub use eval::{eval, eval_deriv, min_eps, MIN_EPS_BITS};
pub use norms::{norm_certificates, universal_cantor_bounds, NormCertificate};
pub use westrick::westrick_interval;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FuncExpr {
    Zero,
    BaseP,
    BaseR,
    /// `x ↦ x² sin(1/x)`, `0 ↦ 0`.
    SinSqExample,
    /// Polynomial with ascending coefficients.
    Poly {
        #[serde(with = "ser::rational_vec")]
        coeffs: Vec<Rational>,
    },
    /// `factor · inner[a, b]`.
    Scaled {
        #[serde(with = "ser::rational")]
        a: Rational,
        #[serde(with = "ser::rational")]
        b: Rational,
        #[serde(with = "ser::rational")]
        factor: Rational,
        inner: Box<FuncExpr>,
    },
    TreeSumCantor {
        tree: TreeSchema,
    },
    TreeSumWestrick {
        tree: TreeSchema,
    },
    Sum {
        terms: Vec<FuncExpr>,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuncError {
    #[error("point {0} lies outside [0, 1]")]
    OutOfDomain(String),
    #[error("invalid interval [{a}, {b}]: need 0 <= a < b <= 1")]
    InvalidInterval { a: String, b: String },
    #[error("unsupported expression: {0}")]
    Unsupported(String),
    #[error("could not resolve {0} within the digit budget")]
    Unresolved(String),
}

/// The structural node `factor · f[a, b]`.
pub fn scale(f: FuncExpr, a: Rational, b: Rational, factor: Rational) -> Result<FuncExpr, FuncError> {
    if !(int(0) <= a && a < b && b <= int(1)) {
        return Err(FuncError::InvalidInterval { a: a.to_string(), b: b.to_string() });
    }
    Ok(FuncExpr::Scaled { a, b, factor, inner: Box::new(f) })
}

impl FuncExpr {
    pub fn cantor(tree: TreeSchema) -> Self {
        FuncExpr::TreeSumCantor { tree }
    }

    pub fn westrick(tree: TreeSchema) -> Self {
        FuncExpr::TreeSumWestrick { tree }
    }

    pub fn poly(coeffs: Vec<Rational>) -> Self {
        FuncExpr::Poly { coeffs }
    }

    /// `x ↦ x²`.
    pub fn square() -> Self {
        Self::poly(vec![int(0), int(0), int(1)])
    }

    /// `x ↦ x`.
    pub fn identity() -> Self {
        Self::poly(vec![int(0), int(1)])
    }

    /// Whether `f(0) = f(1) = f'(0) = f'(1) = 0` holds structurally, the
    /// hypothesis under which scaled copies glue smoothly.
    pub fn vanishes_at_ends(&self) -> bool {
        use base::{poly_derivative, poly_eval};
        match self {
            FuncExpr::Zero
            | FuncExpr::BaseP
            | FuncExpr::BaseR
            | FuncExpr::TreeSumCantor { .. }
            | FuncExpr::TreeSumWestrick { .. } => true,
            FuncExpr::SinSqExample => false,
            FuncExpr::Poly { coeffs } => {
                let d = poly_derivative(coeffs);
                [poly_eval(coeffs, &int(0)), poly_eval(coeffs, &int(1)), poly_eval(&d, &int(0)), poly_eval(&d, &int(1))]
                    .iter()
                    .all(|v| v == &int(0))
            }
            FuncExpr::Scaled { inner, .. } => inner.vanishes_at_ends(),
            FuncExpr::Sum { terms } => terms.iter().all(FuncExpr::vanishes_at_ends),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

//! Partial sums of `μ = Σ 2^{-h(i)}` for one-to-one enumerations `h` with
//! positive values.

use std::collections::HashMap;

use thiserror::Error;

use crate::rigor::{int, pow2, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("enumeration is not one-to-one: h({first}) = h({second}) = {value}")]
    NotInjective { first: u64, second: u64, value: u64 },
    #[error("h({index}) = 0, values must be positive")]
    NonPositive { index: u64 },
    #[error("enumerator defines only {available} values, h({index}) requested")]
    Exhausted { index: u64, available: u64 },
    #[error("bad enumerator table: {0}")]
    Parse(String),
}

/// One instruction of a two-counter machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instr {
    Inc { reg: usize, next: usize },
    /// Decrement and go to `next` if positive, else go to `zero`.
    DecJz { reg: usize, next: usize, zero: usize },
    Halt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    pub program: Vec<Instr>,
    pub input: u64,
}

impl Machine {
    /// Steps until `Halt`, or `None` if still running after `budget`.
    pub fn halting_time(&self, budget: u64) -> Option<u64> {
        let mut regs = [self.input, 0, 0];
        let mut pc = 0;
        for step in 0..=budget {
            match self.program[pc] {
                Instr::Halt => return Some(step),
                Instr::Inc { reg, next } => {
                    regs[reg] += 1;
                    pc = next;
                }
                Instr::DecJz { reg, next, zero } => {
                    if regs[reg] > 0 {
                        regs[reg] -= 1;
                        pc = next;
                    } else {
                        pc = zero;
                    }
                }
            }
        }
        None
    }
}

/// Moves `2·n` units from r0 into r1, then halts after `3n + 1` steps.
fn doubler(n: u64) -> Machine {
    use Instr::*;
    Machine {
        program: vec![
            DecJz { reg: 0, next: 1, zero: 3 },
            Inc { reg: 1, next: 2 },
            Inc { reg: 1, next: 0 },
            Halt,
        ],
        input: n,
    }
}

/// Shuttles the input between r0 and r1 forever.
fn shuttle(n: u64) -> Machine {
    use Instr::*;
    Machine {
        program: vec![
            DecJz { reg: 0, next: 1, zero: 2 },
            Inc { reg: 1, next: 0 },
            DecJz { reg: 1, next: 3, zero: 0 },
            Inc { reg: 0, next: 2 },
            Halt,
        ],
        input: n,
    }
}

/// Counts up forever.
fn runaway() -> Machine {
    Machine { program: vec![Instr::Inc { reg: 2, next: 0 }], input: 0 }
}

/// The fixed sixteen-machine catalog behind [`Enumerator::Halting`].
pub fn toy_machines() -> Vec<Machine> {
    (0..16u64)
        .map(|k| match k {
            3 | 11 => runaway(),
            7 | 14 => shuttle(k),
            // scrambled inputs so halting order differs from index order
            _ => doubler((k * 37) % 23),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumerator {
    /// `h(i) = i + 1`.
    IdentitySuccessor,
    /// `h(i) = table[i]`, undefined past the end.
    Table(Vec<u64>),
    /// `h(i) = k + 1` for the `i`-th machine `k` of [`toy_machines`] to
    /// halt within `budget` steps (ties by index).
    Halting { budget: u64 },
}

pub const DEFAULT_HALTING_BUDGET: u64 = 10_000;

impl Enumerator {
    /// Built-in names `identity` and `halting`; anything else is `None`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "identity" | "identity-successor" => Some(Enumerator::IdentitySuccessor),
            "halting" => Some(Enumerator::Halting { budget: DEFAULT_HALTING_BUDGET }),
            _ => None,
        }
    }

    /// Table from whitespace- or comma-separated naturals; `#` starts a
    /// comment.
    pub fn parse_table(text: &str) -> Result<Self, EncodeError> {
        let mut out = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                out.push(tok.parse::<u64>().map_err(|e| EncodeError::Parse(format!("{tok:?}: {e}")))?);
            }
        }
        Ok(Enumerator::Table(out))
    }

    /// `h(0), …, h(n−1)`.
    pub fn values(&self, n: u64) -> Result<Vec<u64>, EncodeError> {
        match self {
            Enumerator::IdentitySuccessor => Ok((1..=n).collect()),
            Enumerator::Table(t) => {
                if n > t.len() as u64 {
                    return Err(EncodeError::Exhausted { index: t.len() as u64, available: t.len() as u64 });
                }
                Ok(t[..n as usize].to_vec())
            }
            Enumerator::Halting { budget } => {
                let mut halted: Vec<(u64, u64)> = toy_machines()
                    .iter()
                    .enumerate()
                    .filter_map(|(k, m)| m.halting_time(*budget).map(|s| (s, k as u64)))
                    .collect();
                halted.sort();
                if n > halted.len() as u64 {
                    return Err(EncodeError::Exhausted { index: halted.len() as u64, available: halted.len() as u64 });
                }
                Ok(halted[..n as usize].iter().map(|&(_, k)| k + 1).collect())
            }
        }
    }
}

/// Exact `Σ_{i<n} 2^{-h(i)}`, checking positivity and injectivity on the
/// evaluated prefix.
pub fn mu_partial(h: &Enumerator, n: u64) -> Result<Rational, EncodeError> {
    let vals = h.values(n)?;
    let mut seen: HashMap<u64, u64> = HashMap::with_capacity(vals.len());
    let mut sum = int(0);
    for (i, &v) in vals.iter().enumerate() {
        let i = i as u64;
        if v == 0 {
            return Err(EncodeError::NonPositive { index: i });
        }
        if let Some(&first) = seen.get(&v) {
            return Err(EncodeError::NotInjective { first, second: i, value: v });
        }
        seen.insert(v, i);
        sum += pow2(-(v as i64));
    }
    Ok(sum)
}

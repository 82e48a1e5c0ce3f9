//! Limsup ranks of well-founded trees, the tree-driven function families
//! `y_T` and `g_T`, removed-set stages and the solvable rank, a grid
//! estimator for Kechris-Woodin stages, validated enclosures for a
//! discontinuous IVP, and `Σ 2^{-h(i)}` encodings.

pub mod catalog;
pub mod encode;
pub mod exec;
pub mod func;
pub mod ivp;
pub mod removed;
pub mod rigor;
pub mod kw;
pub mod ordinal;
pub mod tree;

pub use exec::Exec;
pub use ordinal::{Ordinal, OrdinalSeqSchema};
pub use tree::{limsup_rank, tree_of_rank, TreeSchema};

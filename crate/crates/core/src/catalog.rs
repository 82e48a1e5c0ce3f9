//! Reference functions with their known ranks, used by the acceptance
//! suite and the CLI.

use serde::Serialize;

use crate::func::{scale, FuncExpr};
use crate::ordinal::Ordinal;
use crate::rigor::{int, rat};
use crate::tree::{tree_of_rank, TreeSchema};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Stated outright in the literature.
    Paper,
    /// Immediate from the definitions.
    Trivial,
    /// Follows from a stated identity applied to this input.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub value: Ordinal,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub func: FuncExpr,
    /// The driving tree, for tree-sum families.
    pub tree: Option<TreeSchema>,
    pub limsup_rank: Option<Expected>,
    pub solvable_rank: Expected,
    pub kw_rank: Option<Expected>,
}

fn fin(n: u64, provenance: Provenance) -> Expected {
    Expected { value: Ordinal::finite(n), provenance }
}

fn tree(s: &str) -> TreeSchema {
    s.parse().expect("catalog tree parses")
}

fn cantor(name: &'static str, t: TreeSchema, ls: Ordinal, p: Provenance) -> CatalogEntry {
    CatalogEntry {
        name,
        func: FuncExpr::cantor(t.clone()),
        tree: Some(t),
        limsup_rank: Some(Expected { value: ls.clone(), provenance: Provenance::Trivial }),
        solvable_rank: Expected { value: ls.successor(), provenance: p },
        kw_rank: None,
    }
}

/// The full catalog, in a fixed order.
pub fn catalog() -> Vec<CatalogEntry> {
    use Provenance::*;
    let w = Ordinal::omega();
    let mut out = vec![
        CatalogEntry {
            name: "x_squared",
            func: FuncExpr::square(),
            tree: None,
            limsup_rank: None,
            solvable_rank: fin(1, Trivial),
            kw_rank: Some(fin(1, Trivial)),
        },
        CatalogEntry {
            name: "base_r",
            func: FuncExpr::BaseR,
            tree: None,
            limsup_rank: None,
            solvable_rank: fin(1, Trivial),
            kw_rank: Some(fin(1, Trivial)),
        },
        CatalogEntry {
            name: "sin_sq",
            func: FuncExpr::SinSqExample,
            tree: None,
            limsup_rank: None,
            solvable_rank: fin(2, Paper),
            kw_rank: Some(fin(2, Paper)),
        },
        CatalogEntry {
            name: "cantor_empty",
            func: FuncExpr::cantor(TreeSchema::Empty),
            tree: Some(TreeSchema::Empty),
            limsup_rank: Some(fin(0, Paper)),
            solvable_rank: fin(1, Trivial),
            kw_rank: Some(fin(1, Trivial)),
        },
        cantor("cantor_root", TreeSchema::root(), Ordinal::finite(1), Derived),
        cantor("cantor_wrap_root", tree("(~())"), Ordinal::finite(2), Paper),
        cantor("cantor_wrap2_root", tree("(~(~()))"), Ordinal::finite(3), Derived),
        cantor("cantor_mixed", tree("(() (~()) ~0)"), Ordinal::finite(2), Derived),
        cantor("cantor_rank4", tree_of_rank(&Ordinal::finite(4)).expect("rank 4"), Ordinal::finite(4), Derived),
        cantor("cantor_w_plus_1", tree_of_rank(&w.add_finite(1)).expect("w+1"), w.add_finite(1), Derived),
        cantor("cantor_w_plus_2", tree_of_rank(&w.add_finite(2)).expect("w+2"), w.add_finite(2), Derived),
        CatalogEntry {
            name: "westrick_wrap_root",
            func: FuncExpr::westrick(tree("(~())")),
            tree: Some(tree("(~())")),
            limsup_rank: Some(fin(2, Trivial)),
            solvable_rank: fin(2, Paper),
            kw_rank: None,
        },
        CatalogEntry {
            name: "westrick_wrap2_root",
            func: FuncExpr::westrick(tree("(~(~()))")),
            tree: Some(tree("(~(~()))")),
            limsup_rank: Some(fin(3, Trivial)),
            solvable_rank: fin(2, Paper),
            kw_rank: None,
        },
        CatalogEntry {
            name: "quarter_scaled_wrap_root",
            func: scale(FuncExpr::cantor(tree("(~())")), rat(1, 3), rat(2, 3), rat(1, 4)).expect("valid interval"),
            tree: Some(tree("(~())")),
            limsup_rank: Some(fin(2, Trivial)),
            solvable_rank: fin(3, Paper),
            kw_rank: None,
        },
        CatalogEntry {
            name: "scaled_sum",
            func: FuncExpr::Sum {
                terms: vec![
                    FuncExpr::square(),
                    scale(FuncExpr::cantor(TreeSchema::root()), int(0), rat(1, 2), rat(1, 4)).expect("valid"),
                    scale(FuncExpr::cantor(tree("(~())")), rat(1, 2), int(1), rat(1, 4)).expect("valid"),
                ],
            },
            tree: None,
            limsup_rank: None,
            solvable_rank: fin(3, Derived),
            kw_rank: None,
        },
    ];
    out.sort_by_key(|e| e.name);
    out
}

pub fn lookup(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

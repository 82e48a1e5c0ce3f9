use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::exec::Exec;
use crate::func::scale;
use crate::rigor::{pow2, rat};
use crate::tree::{limsup_rank, random_nonempty_tree, tree_of_rank, TreeSchema};

fn t(s: &str) -> TreeSchema {
    s.parse().unwrap()
}

fn y(s: &str) -> FuncExpr {
    FuncExpr::cantor(t(s))
}

fn ord(s: &str) -> Ordinal {
    s.parse().unwrap()
}

#[test]
fn empty_tree_has_one_stage() {
    let seq = removed_sequence(&FuncExpr::cantor(TreeSchema::Empty), &default_cap()).unwrap();
    assert_eq!(seq.len(), 2);
    assert_eq!(seq[0].set, SymbolicSet::unit());
    assert!(seq[1].set.is_empty());
}

#[test]
fn sin_sq_profile() {
    let seq = removed_sequence(&FuncExpr::SinSqExample, &default_cap()).unwrap();
    let sets: Vec<_> = seq.iter().map(|s| s.set.clone()).collect();
    assert_eq!(sets, vec![SymbolicSet::unit(), SymbolicSet::points(vec![int(0)]), SymbolicSet::EmptySet]);
    assert_eq!(solvable_rank(&FuncExpr::SinSqExample).unwrap(), Ordinal::finite(2));
}

#[test]
fn c1_functions_rank_one() {
    for f in [FuncExpr::Zero, FuncExpr::BaseR, FuncExpr::square(), FuncExpr::identity()] {
        assert_eq!(solvable_rank(&f).unwrap(), Ordinal::finite(1));
    }
}

#[test]
fn omega_leaves_profile() {
    let f = y("(~())");
    let e1 = stage(&f, &Ordinal::finite(1)).unwrap();
    for x in [int(0), int(1), rat(1, 4), rat(2, 3), rat(1, 9), rat(3, 4)] {
        assert!(e1.contains(&x).unwrap(), "{x}");
    }
    assert!(!e1.contains(&rat(1, 2)).unwrap());
    let e2 = stage(&f, &Ordinal::finite(2)).unwrap();
    assert!(e2.contains(&int(0)).unwrap() && e2.contains(&int(1)).unwrap());
    assert!(!e2.contains(&rat(1, 4)).unwrap() && !e2.contains(&rat(1, 3)).unwrap());
    assert!(stage(&f, &Ordinal::finite(3)).unwrap().is_empty());
    assert_eq!(solvable_rank(&f).unwrap(), Ordinal::finite(3));
    assert_eq!(discontinuity_set(&f, &SymbolicSet::unit()).unwrap(), e1);
    assert_eq!(discontinuity_set(&f, &e1).unwrap(), e2);
}

#[test]
fn discontinuity_set_examples() {
    let d = discontinuity_set(&FuncExpr::SinSqExample, &SymbolicSet::unit()).unwrap();
    assert_eq!(d, SymbolicSet::points(vec![int(0)]));
    assert!(discontinuity_set(&FuncExpr::cantor(TreeSchema::Empty), &SymbolicSet::unit()).unwrap().is_empty());
    let odd = SymbolicSet::points(vec![rat(1, 7)]);
    assert!(matches!(discontinuity_set(&y("(~())"), &odd), Err(RemovedError::Unsupported(_))));
}

#[test]
fn finite_children_put_gap_ends_in_stage_one() {
    let f = y("(())");
    let e1 = stage(&f, &Ordinal::finite(1)).unwrap();
    for x in [int(0), int(1), rat(1, 3), rat(2, 3)] {
        assert!(e1.contains(&x).unwrap(), "{x}");
    }
    assert!(!e1.contains(&rat(1, 9)).unwrap());
    assert!(!e1.contains(&rat(1, 4)).unwrap());
    assert_eq!(solvable_rank(&f).unwrap(), Ordinal::finite(2));
}

#[test]
fn rank_identity_on_tower() {
    for r in ["0", "1", "2", "3", "4", "w+1", "w+2", "w*2+1", "w*3+4"] {
        let tree = tree_of_rank(&ord(r)).unwrap();
        let sv = solvable_rank(&FuncExpr::cantor(tree.clone())).unwrap();
        assert_eq!(sv, limsup_rank(&tree).successor(), "{tree}");
    }
}

#[test]
fn rank_identity_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let tree = random_nonempty_tree(&mut rng, 4);
        let sv = solvable_rank(&FuncExpr::cantor(tree.clone())).unwrap();
        assert_eq!(sv, limsup_rank(&tree).successor(), "{tree}");
    }
}

#[test]
fn cap_is_enforced() {
    let f = FuncExpr::cantor(tree_of_rank(&ord("w+2")).unwrap());
    assert_eq!(solvable_rank_capped(&f, &ord("w+1")), Err(RemovedError::CapExceeded(ord("w+1"))));
    assert!(removed_sequence(&y("(~())"), &Ordinal::finite(2)).is_err());
    assert_eq!(removed_sequence(&y("(~())"), &Ordinal::finite(3)).unwrap().len(), 4);
}

#[test]
fn transfinite_sequence_lists_windows() {
    let f = FuncExpr::cantor(tree_of_rank(&ord("w+1")).unwrap());
    let seq = removed_sequence(&f, &default_cap()).unwrap();
    let idx: Vec<String> = seq.iter().map(|s| s.index.to_string()).collect();
    assert_eq!(idx, ["0", "1", "2", "3", "w", "w + 1", "w + 2"]);
    let last = &seq[seq.len() - 1];
    assert!(last.set.is_empty());
    let at_omega = &seq[4].set;
    assert!(at_omega.contains(&rat(1, 4)).unwrap());
    assert!(seq[5].set.contains(&int(0)).unwrap());
    assert!(!seq[5].set.contains(&rat(1, 4)).unwrap());
}

#[test]
fn westrick_collapse() {
    assert_eq!(solvable_rank(&FuncExpr::westrick(TreeSchema::Empty)).unwrap(), Ordinal::finite(1));
    assert_eq!(solvable_rank(&FuncExpr::westrick(TreeSchema::root())).unwrap(), Ordinal::finite(1));
    for s in ["(~())", "(() ~(~()))", "(~(~(~())))", "(^())", "((~()))"] {
        let tree = t(s);
        assert!(limsup_rank(&tree) >= Ordinal::finite(2));
        assert_eq!(solvable_rank(&FuncExpr::westrick(tree)).unwrap(), Ordinal::finite(2), "{s}");
    }
    let e1 = stage(&FuncExpr::westrick(t("((~()))")), &Ordinal::finite(1)).unwrap();
    let (a, b) = crate::func::westrick_interval(0);
    let inner = &a + (&b - &a) * rat(1, 4);
    assert!(e1.contains(&inner).unwrap());
    assert!(!e1.contains(&rat(1, 4)).unwrap());
}

#[test]
fn scaling_keeps_rank() {
    for s in ["()", "(~())", "(() ~(()))", "(^())"] {
        let f = y(s);
        let g = scale(f.clone(), rat(1, 3), rat(2, 3), rat(1, 4)).unwrap();
        assert_eq!(solvable_rank(&g).unwrap(), solvable_rank(&f).unwrap(), "{s}");
    }
    let bad = scale(FuncExpr::SinSqExample, int(0), rat(1, 2), int(1)).unwrap();
    assert!(matches!(solvable_rank(&bad), Err(RemovedError::Unsupported(_))));
}

#[test]
fn sums() {
    let f = FuncExpr::Sum { terms: vec![y("(~())"), FuncExpr::square()] };
    assert_eq!(solvable_rank(&f).unwrap(), Ordinal::finite(3));
    let halves = FuncExpr::Sum {
        terms: vec![
            scale(y("(~())"), int(0), rat(1, 2), int(1)).unwrap(),
            scale(y("(~(~()))"), rat(1, 2), int(1), int(1)).unwrap(),
        ],
    };
    assert_eq!(solvable_rank(&halves).unwrap(), Ordinal::finite(4));
    let clash = FuncExpr::Sum { terms: vec![y("()"), y("(~())")] };
    assert!(matches!(solvable_rank(&clash), Err(RemovedError::Unsupported(_))));
}

#[test]
fn meets_windows() {
    let c = SymbolicSet::CantorSet { a: int(0), b: int(1) };
    assert!(!c.meets(&rat(2, 5), &rat(3, 5)).unwrap());
    assert!(c.meets(&rat(3, 10), &rat(34, 100)).unwrap());
    assert!(!c.meets(&rat(12, 100), &rat(21, 100)).unwrap());
    assert!(c.meets(&rat(11, 100), &rat(21, 100)).unwrap());
    let e1 = stage(&y("(~(~()))"), &Ordinal::finite(1)).unwrap();
    // inside I_0 the tail subtree contributes its own Cantor set
    assert!(e1.meets(&rat(2, 5), &rat(3, 5)).unwrap());
    let e2 = stage(&y("(~(~()))"), &Ordinal::finite(2)).unwrap();
    assert!(!e2.meets(&rat(2, 5), &rat(3, 5)).unwrap());
    assert!(e2.meets(&rat(1, 9), &rat(1, 9)).unwrap());
    let e3 = stage(&y("(~(~()))"), &Ordinal::finite(3)).unwrap();
    assert!(!e3.meets(&rat(2, 5), &rat(3, 5)).unwrap());
    assert!(e3.meets(&int(0), &rat(1, 100)).unwrap());
}

#[test]
fn json_dump() {
    let f = y("(() ~())");
    let seq = removed_sequence(&f, &default_cap()).unwrap();
    let v = stages_json(&solvable_rank(&f).unwrap(), &seq, 2);
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["solvable_rank"], "3");
    assert_eq!(v["stages"][1]["set"]["kind"], "tree_stage");
    assert_eq!(v["stages"][1]["set"]["tail_copies_from"], 1);
}

#[test]
fn probe_on_sin_sq_clusters_at_zero() {
    let cfg = ProbeConfig::new(pow2(-10), rat(1, 2));
    let pts = numeric_discontinuity_probe(&FuncExpr::SinSqExample, &SymbolicSet::unit(), &cfg, Exec::Parallel).unwrap();
    assert!(!pts.is_empty());
    assert!(pts.iter().all(|x| x <= &pow2(-10)), "{pts:?}");
}

#[test]
fn probe_on_root_and_empty() {
    let cfg = ProbeConfig::new(pow2(-6), rat(1, 2));
    let none = numeric_discontinuity_probe(&y("0"), &SymbolicSet::unit(), &cfg, Exec::Parallel).unwrap();
    assert!(none.is_empty());
    let pts = numeric_discontinuity_probe(&y("()"), &SymbolicSet::unit(), &cfg, Exec::Parallel).unwrap();
    assert!(pts.contains(&int(0)) && pts.contains(&int(1)));
    assert!(pts.iter().all(|x| x <= &pow2(-6) || x >= &(int(1) - pow2(-6))), "{pts:?}");
}

#[test]
fn probe_points_lie_near_stage_one() {
    let cfg = ProbeConfig::new(pow2(-5), rat(1, 4));
    for s in ["(~())", "(())", "(0 ~(()))"] {
        let f = y(s);
        let e1 = stage(&f, &Ordinal::finite(1)).unwrap();
        let pts = numeric_discontinuity_probe(&f, &SymbolicSet::unit(), &cfg, Exec::Parallel).unwrap();
        for x in pts {
            assert!(e1.meets(&(&x - &cfg.grid_step), &(&x + &cfg.grid_step)).unwrap(), "{s}: {x}");
        }
    }
}

fn probe_point() -> impl Strategy<Value = Rational> {
    (0i64..=1000, 1i64..=1000).prop_map(|(n, d)| rat(n.min(d), d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stages_decrease(x in probe_point(), which in 0usize..5) {
        let trees = ["(~())", "(() ~(~()))", "(^())", "(~(0 ()))", "((~()) ^(()))"];
        let f = y(trees[which]);
        let seq = removed_sequence(&f, &default_cap()).unwrap();
        let member: Vec<bool> = seq.iter().map(|s| s.set.contains(&x).unwrap()).collect();
        for w in member.windows(2) {
            prop_assert!(w[0] || !w[1]);
        }
    }
}

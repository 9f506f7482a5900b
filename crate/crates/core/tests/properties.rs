use pivotree_core::gen::{gen_random_sense, Sense};
use pivotree_core::mcts::{e_soft, TreeNode};
use pivotree_core::{
    phase_one, pivot, run_simplex, select_entering, RuleKind, RunStatus, SimplexState,
    StandardFormLP,
};
use proptest::prelude::*;

fn instance(m: usize, n: usize, seed: u64) -> (StandardFormLP, SimplexState) {
    let lp = gen_random_sense(m, n, seed, Sense::Maximize).unwrap();
    let init = phase_one(&lp).unwrap().state;
    (lp, init)
}

/// Improving columns with a bounded ratio test, in index order.
fn bounded_candidates(lp: &StandardFormLP, s: &SimplexState) -> Vec<usize> {
    let rc = s.reduced_costs();
    s.nonbasic()
        .filter(|&j| rc[j] < -1e-7 && pivot(s, lp, j).is_ok())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pivots_stay_feasible_and_accurate(
        m in 2usize..8, n in 2usize..10, seed in any::<u64>(), picks in prop::collection::vec(any::<u16>(), 1..50)
    ) {
        let (lp, mut s) = instance(m, n, seed);
        for p in picks {
            let cands = bounded_candidates(&lp, &s);
            if cands.is_empty() {
                break;
            }
            s = pivot(&s, &lp, cands[p as usize % cands.len()]).unwrap();
            prop_assert!(s.is_primal_feasible());
            let (rc, x, obj) = s.drift(&lp).unwrap();
            prop_assert!(rc < 1e-7 && x < 1e-7 && obj < 1e-7, "drift {rc} {x} {obj}");
        }
    }

    #[test]
    fn pivot_back_restores_basis(m in 2usize..7, n in 2usize..9, seed in any::<u64>(), pick in any::<u16>()) {
        let (lp, s) = instance(m, n, seed);
        let cands = bounded_candidates(&lp, &s);
        prop_assume!(!cands.is_empty());
        let q = cands[pick as usize % cands.len()];
        let mut t = s.clone();
        let step = t.pivot_in_place(&lp, q).unwrap();
        t.pivot_at_row(&lp, step.leaving, step.row).unwrap();
        prop_assert_eq!(t.basis(), s.basis());
        for (a, b) in t.x_basic().iter().zip(s.x_basic()) {
            prop_assert!((a - b).abs() < 1e-7);
        }
        prop_assert!((t.objective() - s.objective()).abs() < 1e-7);
    }

    #[test]
    fn every_rule_enters_an_improving_column(m in 1usize..7, n in 1usize..9, seed in any::<u64>()) {
        let (lp, s) = instance(m, n, seed);
        for rule in RuleKind::ALL {
            if let Some(j) = select_entering(rule, &s, &lp, None) {
                prop_assert!(!s.is_basic(j));
                prop_assert!(s.reduced_costs()[j] < 0.0);
            }
        }
    }

    #[test]
    fn bland_terminates(m in 1usize..10, n in 1usize..12, seed in any::<u64>()) {
        let (lp, s) = instance(m, n, seed);
        let run = run_simplex(&lp, &s, RuleKind::Bland, 1000).unwrap();
        prop_assert!(matches!(run.status, RunStatus::Optimal | RunStatus::Unbounded));
    }

    #[test]
    fn e_soft_lies_between_extremes(scores in prop::collection::vec(-1e6f64..1e6, 1..20), alpha in 0.0f64..=1.0) {
        let lo = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ulp = 1e-12 * (hi - lo).max(1.0);
        let t = e_soft(&scores, alpha);
        prop_assert!(lo <= t && t <= hi + ulp);
        prop_assert_eq!(e_soft(&scores, 0.0), lo);
        prop_assert!((e_soft(&scores, 1.0) - hi).abs() <= ulp);
    }

    #[test]
    fn node_mean_is_running_average(gs in prop::collection::vec(-1e3f64..1e3, 1..200)) {
        let (_, s) = instance(1, 1, 0);
        let mut node = TreeNode::root(s, 0);
        for &g in &gs {
            node.update_stats(g);
        }
        let sum: f64 = gs.iter().sum();
        prop_assert_eq!(node.visits, gs.len() as u64);
        prop_assert_eq!(node.mean(), Some(sum / gs.len() as f64));
    }
}

use proptest::prelude::*;
use rmab_core::chain::OrderedChainModel;
use rmab_core::ucb::run_block;
use rmab_core::{
    generalized_tail_bounds, hoeffding_tail_bound, run_algorithm1, Algorithm1Config, BlockSchedule,
    CircularOrder, DriftBoundParams, GTable, MetaPolicyState, PolicyKind, TransitionMatrix,
};

fn permutation(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    (2..=max_len).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn q_rows_sum_to_one(p01 in 0.0..=1.0f64, p11 in 0.0..=1.0f64, n in 2usize..=6, pi2 in any::<bool>()) {
        let p = TransitionMatrix::new(p01, p11).unwrap();
        let kind = if pi2 { PolicyKind::Pi2 } else { PolicyKind::Pi1 };
        let m = OrderedChainModel::build(&p, n, kind).unwrap();
        prop_assert!(m.max_row_sum_error() < 1e-12);
    }

    #[test]
    fn stationary_prob_is_a_fixed_point(p01 in 0.01..=1.0f64, p11 in 0.0..0.99f64) {
        let p = TransitionMatrix::new(p01, p11).unwrap();
        let w = p.stationary_prob().unwrap();
        prop_assert!((p.propagate_belief(w) - w).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&w));
    }

    #[test]
    fn circular_order_laws(order in permutation(9)) {
        let k = CircularOrder::new(order.clone()).unwrap();
        let n = order.len();
        prop_assert_eq!(k.reverse().reverse(), k.clone());
        for &c in &order {
            let mut x = c;
            for _ in 0..n {
                x = k.next(x);
            }
            prop_assert_eq!(x, c);
            prop_assert_eq!(k.prev(k.next(c)), c);
            prop_assert_eq!(k.reverse().next(c), k.prev(c));
        }
    }

    #[test]
    fn algorithm_accounting(
        lengths in prop::collection::vec(1u64..40, 1..6),
        extra in 0u64..2000,
        feed in prop::collection::vec(any::<bool>(), 1..64),
    ) {
        let mut sorted = lengths;
        sorted.sort_unstable();
        let schedule = BlockSchedule::Table { values: sorted };
        let horizon = schedule.k(1) + schedule.k(2) + extra;
        let config = Algorithm1Config { schedule, exploration: 3.0, horizon };
        let mut slot = 0usize;
        let mut source = |arm: PolicyKind| {
            slot += 1;
            u8::from(feed[(slot + arm.index() * 7) % feed.len()])
        };
        let run = run_algorithm1(&config, &mut source).unwrap();
        let s = &run.state;
        prop_assert_eq!(s.elapsed(), run.blocks.iter().map(|b| b.length).sum::<u64>());
        prop_assert_eq!(s.elapsed(), run.rewards.len() as u64);
        prop_assert!(s.elapsed() >= horizon);
        prop_assert_eq!(s.count(PolicyKind::Pi1) + s.count(PolicyKind::Pi2), s.completed_blocks());
        prop_assert_eq!(s.completed_blocks(), run.blocks.len() as u64);
        for arm in PolicyKind::ALL {
            let m = s.empirical_mean(arm).unwrap();
            prop_assert!((0.0..=1.0).contains(&m));
        }
    }

    #[test]
    fn block_mean_is_reward_average(k in 1u64..300, bits in prop::collection::vec(any::<bool>(), 300)) {
        let mut state = MetaPolicyState::new(3.0).unwrap();
        let mut i = 0;
        let mut source = |_arm: PolicyKind| { i += 1; u8::from(bits[i - 1]) };
        let mut seen = Vec::new();
        let rec = run_block(&mut state, PolicyKind::Pi2, k, &mut source, |y| seen.push(y));
        let sum: u64 = seen.iter().map(|&y| u64::from(y)).sum();
        prop_assert_eq!(rec.mean, sum as f64 / k as f64);
        prop_assert_eq!(state.elapsed(), k);
    }

    #[test]
    fn g_table_matches_block_ends(first in 1u64..50, step in 0u64..5, n in 1u64..20_000) {
        let schedule = BlockSchedule::Linear { first, step };
        let table = GTable::new(&schedule, 20_000);
        prop_assert_eq!(table.g(n), schedule.g_of_n(n));
        if n > 1 {
            prop_assert!(table.g(n - 1) <= table.g(n));
        }
    }

    #[test]
    fn affine_log_schedules_are_non_decreasing(offset in 1.0..200.0f64, scale in 0.0..5.0f64, depth in 0u32..=3, i in 1u64..100_000) {
        let s = BlockSchedule::affine_log(offset, scale, depth);
        prop_assert!(s.k(i) >= 1);
        prop_assert!(s.k(i + 1) >= s.k(i));
    }

    #[test]
    fn tail_bounds_order(n in 1u64..5000, a in 0.0..100.0f64, mu in 0.05..0.95f64, frac in 0.01..0.99f64, b in 0.5..3.0f64) {
        let c = mu * frac;
        let params = DriftBoundParams { n, a, mu, c, b };
        let (upper, lower) = generalized_tail_bounds(&params).unwrap();
        prop_assert!((0.0..=1.0).contains(&upper));
        prop_assert!((0.0..=1.0).contains(&lower));
        prop_assert!(upper >= lower);
        let (upper2, _) = generalized_tail_bounds(&DriftBoundParams { a: a + 1.0, ..params }).unwrap();
        prop_assert!(upper2 <= upper);
        prop_assert!(hoeffding_tail_bound(n, a + 1.0) <= hoeffding_tail_bound(n, a));
    }
}

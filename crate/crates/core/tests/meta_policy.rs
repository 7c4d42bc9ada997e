use rmab_core::channel::{replicate_stream, sample_initial, ChannelPath};
use rmab_core::harness::PathRewardSource;
use rmab_core::ucb::{run_block, BlockRecord};
use rmab_core::{
    run_algorithm1, Algorithm1Config, BeliefVector, BlockSchedule, DeviationMethod,
    MetaPolicyState, MyopicPolicy, PolicyKind, SteadyConstants, TransitionMatrix,
};

#[test]
fn degenerate_channels_give_constant_block_means() {
    for (p, expect) in [(1.0, 1.0), (0.0, 0.0)] {
        let bank = TransitionMatrix::new(p, p).unwrap();
        let belief = BeliefVector::new(vec![p; 3]).unwrap();
        let mut rng = replicate_stream(1, 0);
        let initial = sample_initial(&belief, &mut rng);
        let path = ChannelPath::sample(&bank, &initial, 400, &mut rng);
        let mut source = PathRewardSource::new(&path, &belief);
        let mut state = MetaPolicyState::new(3.0).unwrap();
        for (arm, k) in [(PolicyKind::Pi1, 57), (PolicyKind::Pi2, 102)] {
            let record = run_block(&mut state, arm, k, &mut source, |_| {});
            assert_eq!(record.mean, expect);
        }
    }
}

/// One block of 102 slots of the first policy on P(0.3, 0.7): the expected
/// block mean lies within `U1 +- C1/102` for any starting state.
#[test]
fn block_mean_within_deviation_band() {
    let p = TransitionMatrix::new(0.3, 0.7).unwrap();
    let steady = SteadyConstants::compute(&p, 2, DeviationMethod::TruncatedSeries).unwrap();
    let k = 102u64;
    let belief = BeliefVector::stationary(&p, 2).unwrap();
    let blocks = 10_000u64;
    let means: Vec<f64> = (0..blocks)
        .map(|b| {
            let mut rng = replicate_stream(99, b);
            let initial = sample_initial(&belief, &mut rng);
            let path = ChannelPath::sample(&p, &initial, k as usize, &mut rng);
            let mut source = PathRewardSource::new(&path, &belief);
            let mut state = MetaPolicyState::new(3.0).unwrap();
            run_block(&mut state, PolicyKind::Pi1, k, &mut source, |_| {}).mean
        })
        .collect();
    let mean = means.iter().sum::<f64>() / blocks as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (blocks - 1) as f64;
    let se = (var / blocks as f64).sqrt();
    let half_width = steady.c1 / k as f64;
    assert!(
        (mean - steady.u1).abs() <= half_width + 3.0 * se,
        "block mean {mean} vs {} +- {half_width} (se {se})",
        steady.u1
    );
}

/// Constant feeds: the first arm always pays 1, the second 0. The log term
/// still forces the second arm to be played again after block 1000.
#[test]
fn inferior_arm_is_revisited_late() {
    let schedule = BlockSchedule::k1();
    let mut state = MetaPolicyState::new(3.0).unwrap();
    let mut feed = |arm: PolicyKind| u8::from(arm == PolicyKind::Pi1);
    let mut late_revisit = None;
    while state.block_index() <= 100_000 {
        let i = state.block_index();
        let arm = state.select_arm();
        run_block(&mut state, arm, schedule.k(i), &mut feed, |_| {});
        if arm == PolicyKind::Pi2 && i > 1000 {
            late_revisit = Some(i);
            break;
        }
    }
    assert!(
        late_revisit.is_some(),
        "second arm never played after block 1000"
    );
}

#[test]
fn inferior_block_count_keeps_growing() {
    let mut feed = |arm: PolicyKind| u8::from(arm == PolicyKind::Pi1);
    let mut previous = 0;
    for horizon in [10_000u64, 100_000, 1_000_000, 10_000_000] {
        let config = Algorithm1Config {
            schedule: BlockSchedule::Table { values: vec![10] },
            exploration: 3.0,
            horizon,
        };
        let run = run_algorithm1(&config, &mut feed).unwrap();
        let inferior = run.state.count(PolicyKind::Pi2);
        assert!(
            inferior > previous,
            "{inferior} <= {previous} at horizon {horizon}"
        );
        previous = inferior;
    }
}

fn check_accounting(blocks: &[BlockRecord], state: &MetaPolicyState, rewards: &[u8]) {
    let consumed: u64 = blocks.iter().map(|b| b.length).sum();
    assert_eq!(state.elapsed(), consumed);
    assert_eq!(rewards.len() as u64, consumed);
    assert_eq!(
        state.count(PolicyKind::Pi1) + state.count(PolicyKind::Pi2),
        state.completed_blocks()
    );
    let total: u64 = rewards.iter().map(|&y| u64::from(y)).sum();
    assert_eq!(
        total,
        blocks.iter().map(BlockRecord::total_reward).sum::<u64>()
    );
    for arm in PolicyKind::ALL {
        let m = state.empirical_mean(arm).unwrap();
        assert!((0.0..=1.0).contains(&m));
    }
}

#[test]
fn accounting_on_a_real_channel() {
    let p = TransitionMatrix::new(0.3, 0.7).unwrap();
    let belief = BeliefVector::stationary(&p, 3).unwrap();
    let config = Algorithm1Config {
        schedule: BlockSchedule::k1(),
        exploration: 3.0,
        horizon: 20_000,
    };
    let mut rng = replicate_stream(5, 0);
    let initial = sample_initial(&belief, &mut rng);
    let path = ChannelPath::sample(&p, &initial, config.max_slots() as usize, &mut rng);
    let mut source = PathRewardSource::new(&path, &belief);
    let run = run_algorithm1(&config, &mut source).unwrap();
    check_accounting(&run.blocks, &run.state, &run.rewards);
    assert!(run.state.elapsed() >= config.horizon);
    assert!(run.state.elapsed() < config.horizon + config.schedule.k(run.state.block_index()));
    // blocks tile the slot axis
    let mut start = 0;
    for b in &run.blocks {
        assert_eq!(b.start, start);
        start += b.length;
    }
}

/// The learner's automata keep their state between blocks: replaying the
/// block log through fresh automata reproduces every reward.
#[test]
fn automata_resume_across_blocks() {
    let p = TransitionMatrix::new(0.7, 0.3).unwrap();
    let belief = BeliefVector::stationary(&p, 4).unwrap();
    let config = Algorithm1Config {
        schedule: BlockSchedule::k2(),
        exploration: 3.0,
        horizon: 5_000,
    };
    let mut rng = replicate_stream(11, 3);
    let initial = sample_initial(&belief, &mut rng);
    let path = ChannelPath::sample(&p, &initial, config.max_slots() as usize, &mut rng);
    let run = run_algorithm1(&config, &mut PathRewardSource::new(&path, &belief)).unwrap();

    let mut automata = PolicyKind::ALL.map(|k| MyopicPolicy::from_belief(k, Some(&belief), 4));
    let mut slot = 0usize;
    for b in &run.blocks {
        let policy = &mut automata[b.arm.index()];
        for _ in 0..b.length {
            let y = path.state(slot, policy.current());
            assert_eq!(y, run.rewards[slot]);
            policy.observe(y);
            slot += 1;
        }
    }
}

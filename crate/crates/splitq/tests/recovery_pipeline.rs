//! End-to-end expert generation and profile identification.

use splitq::env::risky::{RISKY, SAFE};
use splitq::{
    fit_profile, fit_profile_multi, generate_expert, BiasProfile, ChainEnv, LearningConfig,
    RiskyPathEnv,
};

fn cfg(seed: u64) -> LearningConfig {
    LearningConfig {
        alpha: 0.1,
        gamma: 0.9,
        epsilon: 1.0,
        epsilon_end: Some(0.0),
        alpha_end: None,
        episodes: 400,
        max_steps: 60,
        seed,
    }
}

/// Risky-path regime where the short branch is worth the expected penalties.
fn mild_regime() -> RiskyPathEnv {
    RiskyPathEnv::new(6, 2, 0.2, 1.0, 10.0).unwrap()
}

/// Regime where penalties overwhelm the shortcut.
fn harsh_regime() -> RiskyPathEnv {
    RiskyPathEnv::new(6, 2, 0.9, 4.0, 10.0).unwrap()
}

#[test]
fn chain_expert_walks_the_unique_optimal_path() {
    let mut env = ChainEnv::new(3).unwrap();
    let trajs = generate_expert(&mut env, &BiasProfile::standard(), &cfg(5), 4).unwrap();
    assert_eq!(trajs.len(), 4);
    for t in &trajs {
        let state_actions: Vec<(usize, usize)> =
            t.steps.iter().map(|&(s, a, _)| (s, a)).collect();
        assert_eq!(state_actions, vec![(0, 0), (1, 0)]);
    }
}

#[test]
fn zero_trajectories_gives_empty_list() {
    let mut env = ChainEnv::new(3).unwrap();
    let trajs = generate_expert(&mut env, &BiasProfile::standard(), &cfg(5), 0).unwrap();
    assert!(trajs.is_empty());
}

#[test]
fn pd_experts_take_the_safe_branch_more_often() {
    // Paired comparison over seeds on the branch each greedy expert commits
    // to at the fork.
    let mut pd_safe = 0;
    let mut std_safe = 0;
    let seeds = 30;
    for seed in 0..seeds {
        for (label, counter) in [("PD", &mut pd_safe), ("standard", &mut std_safe)] {
            let mut env = RiskyPathEnv::new(6, 2, 0.5, 2.0, 10.0).unwrap();
            let profile = BiasProfile::preset(label).unwrap();
            let trajs = generate_expert(&mut env, &profile, &cfg(7000 + seed), 1).unwrap();
            let fork_action = trajs[0].steps[0].1;
            if fork_action == SAFE {
                *counter += 1;
            }
        }
    }
    assert!(
        pd_safe > std_safe,
        "PD safe count {pd_safe} not above standard {std_safe} over {seeds} seeds"
    );
}

#[test]
fn single_candidate_is_returned_with_its_distance() {
    let env = ChainEnv::new(4).unwrap();
    let mut expert_env = env.clone();
    let expert =
        generate_expert(&mut expert_env, &BiasProfile::standard(), &cfg(3), 3).unwrap();
    let result = fit_profile(
        &expert,
        &env,
        &[BiasProfile::preset("ADHD").unwrap()],
        &cfg(3),
        0.9,
        2,
    )
    .unwrap();
    assert_eq!(result.best.label, "ADHD");
    assert_eq!(result.distances.len(), 1);
    assert!(result.distances[0].1.is_finite());
}

#[test]
fn identical_seed_gives_zero_distance() {
    // Candidate evaluation with the same seed and trajectory count replays
    // the expert bit for bit.
    let env = ChainEnv::new(5).unwrap();
    let mut expert_env = env.clone();
    let expert =
        generate_expert(&mut expert_env, &BiasProfile::standard(), &cfg(11), 2).unwrap();
    let result = fit_profile(
        &expert,
        &env,
        &[BiasProfile::standard()],
        &cfg(11),
        0.9,
        1,
    )
    .unwrap();
    assert!(result.distances[0].1 < 1e-12, "distance {}", result.distances[0].1);
}

#[test]
fn two_regime_fit_separates_the_trio() {
    // One reward regime cannot tell apart profiles that commit to the same
    // branch; two regimes give each preset a distinct joint signature:
    // standard = (risky, safe), PD = (safe, safe), bvFTD = (risky, risky).
    let candidates = vec![
        BiasProfile::standard(),
        BiasProfile::preset("PD").unwrap(),
        BiasProfile::preset("bvFTD").unwrap(),
    ];
    for (i, truth) in ["standard", "PD", "bvFTD"].iter().enumerate() {
        let true_profile = BiasProfile::preset(truth).unwrap();
        let expert_cfg = cfg(40_000 + i as u64 * 131);
        let mut mild = mild_regime();
        let mut harsh = harsh_regime();
        let expert_mild = generate_expert(&mut mild, &true_profile, &expert_cfg, 3).unwrap();
        let expert_harsh = generate_expert(&mut harsh, &true_profile, &expert_cfg, 3).unwrap();
        let fit = fit_profile_multi(
            &[&expert_mild, &expert_harsh],
            &[mild_regime(), harsh_regime()],
            &candidates,
            &cfg(50_000 + i as u64 * 17),
            0.9,
            2,
        )
        .unwrap();
        assert_eq!(&fit.best.label, truth, "distances: {:?}", fit.distances);
    }
}

#[test]
fn single_regime_identifies_the_uniquely_behaving_preset() {
    // In the mild regime only PD flees to the safe branch, so a PD expert is
    // identifiable from that regime alone.
    let candidates = vec![
        BiasProfile::standard(),
        BiasProfile::preset("PD").unwrap(),
        BiasProfile::preset("bvFTD").unwrap(),
    ];
    let mut env = mild_regime();
    let expert =
        generate_expert(&mut env, &BiasProfile::preset("PD").unwrap(), &cfg(601), 3).unwrap();
    assert_eq!(expert[0].steps[0].1, SAFE);
    let fit = fit_profile(&expert, &mild_regime(), &candidates, &cfg(707), 0.9, 2).unwrap();
    assert_eq!(fit.best.label, "PD", "distances: {:?}", fit.distances);
    // And the other two keep taking the short branch there.
    let expert_std =
        generate_expert(&mut mild_regime(), &BiasProfile::standard(), &cfg(602), 1).unwrap();
    assert_eq!(expert_std[0].steps[0].1, RISKY);
}

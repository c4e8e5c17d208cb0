//! Executes batches of (profile, repetition) training runs. Runs are
//! independent jobs fanned out over the worker pool and gathered back in job
//! order, so outputs never depend on scheduling.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use splitq::exec::par_map;
use splitq::{BiasProfile, EpisodeRecord, LearningConfig, MarkovEnv, SqlAgent};

use crate::config::{with_built_env, EnvVisitor, ExperimentConfig};
use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOutput {
    pub label: String,
    pub repetition: usize,
    pub seed: u64,
    /// The exact weights used (post perturbation sampling).
    pub profile_used: BiasProfile,
    pub records: Vec<EpisodeRecord>,
    pub duration_secs: f64,
}

/// Runs every configured profile for every repetition on the configured
/// environment, applying `config.transform` when present. Repetition `k`
/// uses seed `base_seed + k`; the same seeds recur across profiles so
/// comparisons stay paired.
pub fn execute_runs(config: &ExperimentConfig) -> Result<Vec<RunOutput>> {
    execute_runs_with(config, config.transform.as_ref())
}

/// As [`execute_runs`] but with an explicit transform (used by sweeps).
pub fn execute_runs_with(
    config: &ExperimentConfig,
    transform: Option<&splitq::RewardTransform>,
) -> Result<Vec<RunOutput>> {
    with_built_env(&config.environment, transform, RunBatch { config })
}

struct RunBatch<'a> {
    config: &'a ExperimentConfig,
}

impl EnvVisitor<Vec<RunOutput>> for RunBatch<'_> {
    fn visit<E: MarkovEnv + Clone + Send + Sync + 'static>(self, env: E) -> Result<Vec<RunOutput>> {
        let profiles = self.config.resolved_profiles()?;
        let mut jobs = Vec::new();
        for profile in profiles {
            for rep in 0..self.config.repetitions {
                jobs.push((profile.clone(), rep));
            }
        }
        let learning = &self.config.learning;
        let deterministic = self.config.deterministic_profiles;
        let results = par_map(jobs, |(preset, rep)| {
            run_single(&env, preset, rep, learning, deterministic)
        });
        results.into_iter().collect()
    }
}

fn run_single<E: MarkovEnv + Clone>(
    env: &E,
    preset: BiasProfile,
    repetition: usize,
    learning: &LearningConfig,
    deterministic_profiles: bool,
) -> Result<RunOutput> {
    let seed = learning.seed.wrapping_add(repetition as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Perturbation is sampled once, before training, from the run's stream.
    let profile_used = if deterministic_profiles {
        preset.clone()
    } else {
        preset.sample(&mut rng)
    };
    let mut cfg = learning.clone();
    cfg.seed = seed;
    let mut env = env.clone();
    let start = Instant::now();
    let mut agent = SqlAgent::new(profile_used.clone(), cfg, &env)?;
    let records = agent.train(&mut env, &mut rng)?;
    Ok(RunOutput {
        label: preset.label,
        repetition,
        seed,
        profile_used,
        records,
        duration_secs: start.elapsed().as_secs_f64(),
    })
}

//! Two-stream Q-learning agent and episode training loop.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::MarkovEnv;
use crate::error::{Error, Result};
use crate::profile::BiasProfile;
use crate::qtable::{split_reward, SplitQTable};

/// Training hyperparameters. `epsilon_end`/`alpha_end` switch on linear
/// decay across episodes; both default to constant schedules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_end: Option<f64>,
    pub episodes: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl LearningConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be in [0, 1), got {}",
                self.gamma
            )));
        }
        for (name, eps) in [("epsilon", Some(self.epsilon)), ("epsilon_end", self.epsilon_end)] {
            if let Some(e) = eps {
                if !(0.0..=1.0).contains(&e) {
                    return Err(Error::InvalidConfig(format!(
                        "{name} must be in [0, 1], got {e}"
                    )));
                }
            }
        }
        if let Some(a) = self.alpha_end {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "alpha_end must be in (0, 1], got {a}"
                )));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be >= 1".into()));
        }
        Ok(())
    }

    /// Linear interpolation from `start` to `end` over the episode range;
    /// constant when no end value is set.
    fn schedule(start: f64, end: Option<f64>, episode: usize, episodes: usize) -> f64 {
        match end {
            None => start,
            Some(_) if episodes <= 1 => start,
            Some(end) => {
                let t = episode as f64 / (episodes - 1) as f64;
                start + (end - start) * t
            }
        }
    }

    pub fn epsilon_at(&self, episode: usize) -> f64 {
        Self::schedule(self.epsilon, self.epsilon_end, episode, self.episodes)
    }

    pub fn alpha_at(&self, episode: usize) -> f64 {
        Self::schedule(self.alpha, self.alpha_end, episode, self.episodes)
    }
}

/// Everything one training episode produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub total_reward: f64,
    pub total_pos: f64,
    pub total_neg: f64,
    pub steps: usize,
    pub epsilon: f64,
    /// Ordered (state, action, reward) triples.
    pub trajectory: Vec<(usize, usize, f64)>,
}

/// A bias profile bound to its split Q tables and hyperparameters.
#[derive(Debug, Clone)]
pub struct SqlAgent {
    profile: BiasProfile,
    cfg: LearningConfig,
    table: SplitQTable,
}

impl SqlAgent {
    pub fn new(profile: BiasProfile, cfg: LearningConfig, env: &dyn MarkovEnv) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            profile,
            cfg,
            table: SplitQTable::new(env.num_states(), env.num_actions()),
        })
    }

    pub fn profile(&self) -> &BiasProfile {
        &self.profile
    }

    pub fn config(&self) -> &LearningConfig {
        &self.cfg
    }

    pub fn table(&self) -> &SplitQTable {
        &self.table
    }

    /// Greedy action per state under the combined values.
    pub fn greedy_policy(&self) -> Result<Vec<usize>> {
        (0..self.table.num_states())
            .map(|s| self.table.greedy_action(&self.profile, s))
            .collect()
    }

    /// Runs one learning episode: select, step, update until the environment
    /// reports done or `max_steps` is hit.
    pub fn run_episode<E: MarkovEnv>(
        &mut self,
        env: &mut E,
        episode: usize,
        epsilon: f64,
        alpha: f64,
        rng: &mut dyn RngCore,
    ) -> Result<EpisodeRecord> {
        let mut record = EpisodeRecord {
            episode,
            total_reward: 0.0,
            total_pos: 0.0,
            total_neg: 0.0,
            steps: 0,
            epsilon,
            trajectory: Vec::new(),
        };
        let mut state = env.reset(rng);
        for _ in 0..self.cfg.max_steps {
            let action = self.table.select_action(&self.profile, state, epsilon, rng)?;
            let out = env.step(action, rng)?;
            self.table.update_streams(
                &self.profile,
                alpha,
                self.cfg.gamma,
                state,
                action,
                out.reward,
                out.next_state,
                out.done,
            )?;
            let (pos, neg) = split_reward(out.reward)?;
            record.total_reward += out.reward;
            record.total_pos += pos;
            record.total_neg += neg;
            record.steps += 1;
            record.trajectory.push((state, action, out.reward));
            state = out.next_state;
            if out.done {
                break;
            }
        }
        Ok(record)
    }

    /// Full training loop over `cfg.episodes` episodes with the configured
    /// epsilon/alpha schedules, consuming the given RNG stream.
    pub fn train<E: MarkovEnv>(
        &mut self,
        env: &mut E,
        rng: &mut dyn RngCore,
    ) -> Result<Vec<EpisodeRecord>> {
        let mut records = Vec::with_capacity(self.cfg.episodes);
        for episode in 0..self.cfg.episodes {
            let epsilon = self.cfg.epsilon_at(episode);
            let alpha = self.cfg.alpha_at(episode);
            records.push(self.run_episode(env, episode, epsilon, alpha, rng)?);
        }
        Ok(records)
    }

    /// `train` with a fresh RNG seeded from `cfg.seed`.
    pub fn train_seeded<E: MarkovEnv>(&mut self, env: &mut E) -> Result<Vec<EpisodeRecord>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        self.train(env, &mut rng)
    }

    /// Greedy evaluation rollout: no exploration, no updates. `rng` only
    /// feeds environment stochasticity.
    pub fn rollout<E: MarkovEnv>(
        &self,
        env: &mut E,
        rng: &mut dyn RngCore,
    ) -> Result<EpisodeRecord> {
        let mut record = EpisodeRecord {
            episode: 0,
            total_reward: 0.0,
            total_pos: 0.0,
            total_neg: 0.0,
            steps: 0,
            epsilon: 0.0,
            trajectory: Vec::new(),
        };
        let mut state = env.reset(rng);
        for _ in 0..self.cfg.max_steps {
            let action = self.table.greedy_action(&self.profile, state)?;
            let out = env.step(action, rng)?;
            let (pos, neg) = split_reward(out.reward)?;
            record.total_reward += out.reward;
            record.total_pos += pos;
            record.total_neg += neg;
            record.steps += 1;
            record.trajectory.push((state, action, out.reward));
            state = out.next_state;
            if out.done {
                break;
            }
        }
        Ok(record)
    }
}

/// Mean total reward over the final `fraction` of the records (at least one
/// episode). This is the post-learning performance figure used throughout.
pub fn final_fraction_mean(records: &[EpisodeRecord], fraction: f64) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let n = ((records.len() as f64 * fraction).ceil() as usize).clamp(1, records.len());
    let tail = &records[records.len() - n..];
    tail.iter().map(|r| r.total_reward).sum::<f64>() / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{value_iteration, ChainEnv};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(episodes: usize) -> LearningConfig {
        LearningConfig {
            alpha: 0.5,
            gamma: 0.9,
            epsilon: 0.2,
            epsilon_end: None,
            alpha_end: None,
            episodes,
            max_steps: 50,
            seed: 17,
        }
    }

    #[test]
    fn validates_ranges() {
        let mut c = cfg(10);
        c.alpha = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg(10);
        c.gamma = 1.0;
        assert!(c.validate().is_err());
        let mut c = cfg(10);
        c.epsilon = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn deterministic_chain_episode() {
        // Fresh tables tie everywhere; the lowest action index is "right",
        // so the greedy episode walks straight to the goal.
        let mut env = ChainEnv::new(3).unwrap();
        let mut agent = SqlAgent::new(BiasProfile::standard(), cfg(1), &env).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = agent.run_episode(&mut env, 0, 0.0, 0.5, &mut rng).unwrap();
        assert_eq!(rec.trajectory, vec![(0, 0, 0.0), (1, 0, 1.0)]);
        assert_eq!(rec.total_reward, 1.0);
        assert_eq!(rec.steps, 2);
    }

    #[test]
    fn zero_episodes_trains_nothing() {
        let mut env = ChainEnv::new(3).unwrap();
        let mut agent = SqlAgent::new(BiasProfile::standard(), cfg(0), &env).unwrap();
        assert!(agent.train_seeded(&mut env).unwrap().is_empty());
    }

    #[test]
    fn training_matches_value_iteration_policy() {
        let mut env = ChainEnv::new(5).unwrap();
        let mut config = cfg(500);
        config.epsilon = 1.0;
        config.epsilon_end = Some(0.0);
        let mut agent = SqlAgent::new(BiasProfile::standard(), config, &env).unwrap();
        agent.train_seeded(&mut env).unwrap();
        let oracle = value_iteration(&env.model(), 0.9, 1e-10).unwrap();
        let learned = agent.greedy_policy().unwrap();
        for (s, (have, want)) in learned.iter().zip(&oracle.policy).enumerate().take(4) {
            assert_eq!(have, want, "policy mismatch at state {s}");
        }
    }

    #[test]
    fn identical_seeds_identical_records() {
        let run = || {
            let mut env = ChainEnv::new(4).unwrap();
            let mut agent = SqlAgent::new(BiasProfile::preset("PD").unwrap(), cfg(50), &env).unwrap();
            agent.train_seeded(&mut env).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn epsilon_schedule_endpoints() {
        let mut c = cfg(101);
        c.epsilon = 1.0;
        c.epsilon_end = Some(0.0);
        assert_eq!(c.epsilon_at(0), 1.0);
        assert_eq!(c.epsilon_at(100), 0.0);
        assert!((c.epsilon_at(50) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn final_fraction_mean_tail() {
        let recs: Vec<EpisodeRecord> = (0..10)
            .map(|i| EpisodeRecord {
                episode: i,
                total_reward: i as f64,
                total_pos: 0.0,
                total_neg: 0.0,
                steps: 1,
                epsilon: 0.0,
                trajectory: vec![],
            })
            .collect();
        // Final 20% of 10 episodes = last 2: mean of 8 and 9.
        assert_eq!(final_fraction_mean(&recs, 0.2), 8.5);
        assert_eq!(final_fraction_mean(&recs[..1], 0.2), 0.0);
        assert_eq!(final_fraction_mean(&[], 0.2), 0.0);
    }
}

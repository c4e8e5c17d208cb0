//! Reward rescaling/thinning wrapper for stationary and scheduled
//! non-stationary reward experiments.

use rand::Rng;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::env::{MarkovEnv, StepOutcome};
use crate::error::{Error, Result};
use crate::qtable::split_reward;

/// Per-stream multipliers and drop probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamScaling {
    pub pos_scale: f64,
    pub neg_scale: f64,
    #[serde(default)]
    pub pos_drop_prob: f64,
    #[serde(default)]
    pub neg_drop_prob: f64,
}

impl StreamScaling {
    pub fn identity() -> Self {
        Self {
            pos_scale: 1.0,
            neg_scale: 1.0,
            pos_drop_prob: 0.0,
            neg_drop_prob: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("pos_scale", self.pos_scale), ("neg_scale", self.neg_scale)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        for (name, p) in [
            ("pos_drop_prob", self.pos_drop_prob),
            ("neg_drop_prob", self.neg_drop_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be in [0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Reward transform with an optional scheduled switch: episodes before
/// `switch_episode` use `phase`, episodes from it onward use `switched_phase`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardTransform {
    pub phase: StreamScaling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_episode: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switched_phase: Option<StreamScaling>,
}

impl RewardTransform {
    pub fn stationary(phase: StreamScaling) -> Self {
        Self {
            phase,
            switch_episode: None,
            switched_phase: None,
        }
    }

    pub fn identity() -> Self {
        Self::stationary(StreamScaling::identity())
    }

    pub fn validate(&self) -> Result<()> {
        self.phase.validate()?;
        if let Some(p) = &self.switched_phase {
            p.validate()?;
        }
        if self.switch_episode.is_some() != self.switched_phase.is_some() {
            return Err(Error::InvalidConfig(
                "switch_episode and switched_phase must be given together".into(),
            ));
        }
        Ok(())
    }

    /// Scaling in effect during episode index `episode` (0-based).
    pub fn phase_at(&self, episode: usize) -> StreamScaling {
        match (self.switch_episode, self.switched_phase) {
            (Some(at), Some(next)) if episode >= at => next,
            _ => self.phase,
        }
    }
}

/// Wraps an environment so emitted rewards are split into streams, scaled and
/// stochastically dropped per stream, then re-summed. Transitions and
/// termination pass through untouched. The wrapper counts its own resets to
/// track the episode index for scheduled switches.
#[derive(Debug, Clone)]
pub struct RewardWrapper<E> {
    inner: E,
    transform: RewardTransform,
    episode: usize,
    resets: usize,
}

/// Applies `transform` to `env`'s reward stream.
pub fn wrap_rewards<E: MarkovEnv>(env: E, transform: RewardTransform) -> Result<RewardWrapper<E>> {
    transform.validate()?;
    Ok(RewardWrapper {
        inner: env,
        transform,
        episode: 0,
        resets: 0,
    })
}

impl<E> RewardWrapper<E> {
    pub fn into_inner(self) -> E {
        self.inner
    }

    /// Overrides the episode counter (normally advanced by `reset`).
    pub fn set_episode(&mut self, episode: usize) {
        self.episode = episode;
    }
}

impl<E: MarkovEnv> MarkovEnv for RewardWrapper<E> {
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }

    fn num_actions(&self) -> usize {
        self.inner.num_actions()
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> usize {
        self.episode = self.resets;
        self.resets += 1;
        self.inner.reset(rng)
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<StepOutcome> {
        let out = self.inner.step(action, rng)?;
        let scaling = self.transform.phase_at(self.episode);
        let (mut pos, mut neg) = split_reward(out.reward)?;
        pos *= scaling.pos_scale;
        neg *= scaling.neg_scale;
        // Draw thinning only for nonzero drop probabilities so an identity
        // transform consumes no randomness.
        if scaling.pos_drop_prob > 0.0 && rng.gen::<f64>() < scaling.pos_drop_prob {
            pos = 0.0;
        }
        if scaling.neg_drop_prob > 0.0 && rng.gen::<f64>() < scaling.neg_drop_prob {
            neg = 0.0;
        }
        Ok(StepOutcome {
            next_state: out.next_state,
            reward: pos + neg,
            done: out.done,
        })
    }

    fn horizon(&self) -> usize {
        self.inner.horizon()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ChainEnv, RiskyPathEnv};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_matches_raw_step_for_step() {
        let mut raw = RiskyPathEnv::new(4, 2, 0.5, 2.0, 10.0).unwrap();
        let mut wrapped =
            wrap_rewards(RiskyPathEnv::new(4, 2, 0.5, 2.0, 10.0).unwrap(), RewardTransform::identity())
                .unwrap();
        let mut rng_a = ChaCha8Rng::seed_from_u64(5);
        let mut rng_b = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            assert_eq!(raw.reset(&mut rng_a), wrapped.reset(&mut rng_b));
            loop {
                let a = raw.step(1, &mut rng_a).unwrap();
                let b = wrapped.step(1, &mut rng_b).unwrap();
                assert_eq!(a, b);
                if a.done {
                    break;
                }
            }
        }
    }

    #[test]
    fn positive_only_zeroes_negatives() {
        let transform = RewardTransform::stationary(StreamScaling {
            pos_scale: 1.0,
            neg_scale: 0.0,
            pos_drop_prob: 0.0,
            neg_drop_prob: 0.0,
        });
        let mut env = wrap_rewards(RiskyPathEnv::new(4, 2, 1.0, 5.0, 10.0).unwrap(), transform).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            env.reset(&mut rng);
            loop {
                let out = env.step(1, &mut rng).unwrap();
                assert!(out.reward >= 0.0);
                if out.done {
                    break;
                }
            }
        }
    }

    #[test]
    fn scheduled_switch_applies_from_episode() {
        let transform = RewardTransform {
            phase: StreamScaling::identity(),
            switch_episode: Some(100),
            switched_phase: Some(StreamScaling {
                pos_scale: 0.0,
                neg_scale: 1.0,
                pos_drop_prob: 0.0,
                neg_drop_prob: 0.0,
            }),
        };
        let mut env = wrap_rewards(ChainEnv::new(2).unwrap(), transform).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        env.reset(&mut rng);
        env.set_episode(150);
        let out = env.step(0, &mut rng).unwrap();
        assert_eq!(out.reward, 0.0, "positive reward zeroed after the switch");

        env.set_episode(50);
        env.inner.reset(&mut rng);
        let out = env.step(0, &mut rng).unwrap();
        assert_eq!(out.reward, 1.0, "pre-switch episodes keep the first phase");
    }

    #[test]
    fn switch_requires_both_fields() {
        let t = RewardTransform {
            phase: StreamScaling::identity(),
            switch_episode: Some(10),
            switched_phase: None,
        };
        assert!(t.validate().is_err());
    }

    #[test]
    fn drop_probability_thins_stream() {
        let transform = RewardTransform::stationary(StreamScaling {
            pos_scale: 1.0,
            neg_scale: 1.0,
            pos_drop_prob: 0.5,
            neg_drop_prob: 0.0,
        });
        let mut env = wrap_rewards(ChainEnv::new(2).unwrap(), transform).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut kept = 0;
        let n = 4000;
        for _ in 0..n {
            env.reset(&mut rng);
            if env.step(0, &mut rng).unwrap().reward > 0.0 {
                kept += 1;
            }
        }
        let freq = kept as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.03, "kept fraction {freq} far from 0.5");
    }
}

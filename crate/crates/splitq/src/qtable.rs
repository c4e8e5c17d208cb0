//! Paired positive/negative action-value tables and their update rule.

use rand::Rng;

use crate::error::{Error, Result};
use crate::profile::BiasProfile;

/// Splits a scalar reward into its nonnegative and nonpositive parts,
/// `(max(r, 0), min(r, 0))`, so that the parts always sum back to `r`.
pub fn split_reward(r: f64) -> Result<(f64, f64)> {
    if !r.is_finite() {
        return Err(Error::NonFiniteReward(r));
    }
    Ok((r.max(0.0), r.min(0.0)))
}

/// Dense pair of action-value tables, one accumulating positive feedback
/// and one accumulating negative feedback. Zero-initialized.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitQTable {
    q_pos: Vec<f64>,
    q_neg: Vec<f64>,
    num_states: usize,
    num_actions: usize,
}

impl SplitQTable {
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        Self {
            q_pos: vec![0.0; num_states * num_actions],
            q_neg: vec![0.0; num_states * num_actions],
            num_states,
            num_actions,
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn check_state(&self, s: usize) -> Result<()> {
        if s >= self.num_states {
            return Err(Error::StateOutOfRange {
                index: s,
                limit: self.num_states,
            });
        }
        Ok(())
    }

    fn check_action(&self, a: usize) -> Result<()> {
        if a >= self.num_actions {
            return Err(Error::ActionOutOfRange {
                index: a,
                limit: self.num_actions,
            });
        }
        Ok(())
    }

    fn idx(&self, s: usize, a: usize) -> usize {
        s * self.num_actions + a
    }

    pub fn q_pos(&self, s: usize, a: usize) -> f64 {
        self.q_pos[self.idx(s, a)]
    }

    pub fn q_neg(&self, s: usize, a: usize) -> f64 {
        self.q_neg[self.idx(s, a)]
    }

    /// Sum of both streams for one entry; under the unit profile this tracks
    /// a classical single-table Q value.
    pub fn entry_sum(&self, s: usize, a: usize) -> f64 {
        self.q_pos(s, a) + self.q_neg(s, a)
    }

    /// Combined action values at `s`: `phi2 * q_pos + phi4 * q_neg` per action.
    pub fn combined_q(&self, profile: &BiasProfile, s: usize) -> Result<Vec<f64>> {
        self.check_state(s)?;
        Ok((0..self.num_actions)
            .map(|a| profile.phi2 * self.q_pos(s, a) + profile.phi4 * self.q_neg(s, a))
            .collect())
    }

    /// Greedy action at `s` under the combined values, lowest index on ties.
    pub fn greedy_action(&self, profile: &BiasProfile, s: usize) -> Result<usize> {
        let values = self.combined_q(profile, s)?;
        Ok(argmax_lowest_index(&values))
    }

    /// Epsilon-greedy selection. One uniform draw decides exploration; an
    /// exploring step draws one more uniform action index. The draw order is
    /// fixed so seeded runs can be replayed step for step.
    pub fn select_action<R: Rng + ?Sized>(
        &self,
        profile: &BiasProfile,
        s: usize,
        epsilon: f64,
        rng: &mut R,
    ) -> Result<usize> {
        self.check_state(s)?;
        if rng.gen::<f64>() < epsilon {
            return Ok(rng.gen_range(0..self.num_actions));
        }
        self.greedy_action(profile, s)
    }

    /// Applies one two-stream update for the transition `(s, a, r, s_next)`:
    ///
    /// ```text
    /// q_pos[s,a] <- phi1 * q_pos[s,a] + alpha * (r_pos + gamma * v_pos - q_pos[s,a])
    /// q_neg[s,a] <- phi3 * q_neg[s,a] + alpha * (r_neg + gamma * v_neg - q_neg[s,a])
    /// ```
    ///
    /// Both bootstrap values are read at the single next-state action that
    /// maximizes the combined value (pre-update), so the unit profile reduces
    /// exactly to classical Q-learning on `q_pos + q_neg`. Terminal
    /// transitions bootstrap zero.
    #[allow(clippy::too_many_arguments)]
    pub fn update_streams(
        &mut self,
        profile: &BiasProfile,
        alpha: f64,
        gamma: f64,
        s: usize,
        a: usize,
        r: f64,
        s_next: usize,
        done: bool,
    ) -> Result<()> {
        self.check_state(s)?;
        self.check_action(a)?;
        let (r_pos, r_neg) = split_reward(r)?;

        let (v_pos, v_neg) = if done {
            (0.0, 0.0)
        } else {
            self.check_state(s_next)?;
            let next_best = self.greedy_action(profile, s_next)?;
            (self.q_pos(s_next, next_best), self.q_neg(s_next, next_best))
        };

        let i = self.idx(s, a);
        let old_pos = self.q_pos[i];
        let old_neg = self.q_neg[i];
        let new_pos = profile.phi1 * old_pos + alpha * (r_pos + gamma * v_pos - old_pos);
        let new_neg = profile.phi3 * old_neg + alpha * (r_neg + gamma * v_neg - old_neg);

        if !new_pos.is_finite() {
            return Err(Error::NumericOverflow {
                stream: "positive",
                state: s,
                action: a,
            });
        }
        if !new_neg.is_finite() {
            return Err(Error::NumericOverflow {
                stream: "negative",
                state: s,
                action: a,
            });
        }
        self.q_pos[i] = new_pos;
        self.q_neg[i] = new_neg;
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn set_entry(&mut self, s: usize, a: usize, pos: f64, neg: f64) {
        let i = self.idx(s, a);
        self.q_pos[i] = pos;
        self.q_neg[i] = neg;
    }
}

/// Index of the maximum value, lowest index on ties.
pub fn argmax_lowest_index(values: &[f64]) -> usize {
    debug_assert!(!values.is_empty());
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

//! Two-branch fork testbed: a short corridor with stochastic penalties
//! against a longer penalty-free corridor to the same goal.

use rand::Rng;
use rand::RngCore;

use crate::env::{MarkovEnv, StepOutcome, TabularModel};
use crate::error::{Error, Result};

/// Fork action entering the safe branch; inside a corridor it advances.
pub const SAFE: usize = 0;
/// Fork action entering the risky branch; inside a corridor it retreats.
pub const RISKY: usize = 1;

/// Fork state 0 splits into a safe corridor of `safe_len` cells and a risky
/// corridor of `risky_len` cells (`risky_len < safe_len`), both ending at a
/// shared terminal goal worth `goal_reward`. Every step that enters a risky
/// cell independently pays `-penalty` with probability `penalty_prob`. Seen
/// from the fork, the goal lies `risky_len + 1` steps down the short branch
/// and `safe_len + 1` steps down the long one.
#[derive(Debug, Clone)]
pub struct RiskyPathEnv {
    safe_len: usize,
    risky_len: usize,
    penalty_prob: f64,
    penalty: f64,
    goal_reward: f64,
    state: usize,
    steps: usize,
}

impl RiskyPathEnv {
    pub fn new(
        safe_len: usize,
        risky_len: usize,
        penalty_prob: f64,
        penalty: f64,
        goal_reward: f64,
    ) -> Result<Self> {
        if risky_len < 1 || risky_len >= safe_len {
            return Err(Error::InvalidGeometry(format!(
                "need 1 <= risky_len < safe_len, got risky_len={risky_len}, safe_len={safe_len}"
            )));
        }
        if !(0.0..=1.0).contains(&penalty_prob) {
            return Err(Error::InvalidGeometry(format!(
                "penalty_prob must be in [0, 1], got {penalty_prob}"
            )));
        }
        if !penalty.is_finite() || penalty < 0.0 || !goal_reward.is_finite() {
            return Err(Error::InvalidGeometry(
                "penalty must be finite and >= 0, goal_reward finite".into(),
            ));
        }
        Ok(Self {
            safe_len,
            risky_len,
            penalty_prob,
            penalty,
            goal_reward,
            state: 0,
            steps: 0,
        })
    }

    pub fn fork_state(&self) -> usize {
        0
    }

    pub fn goal_state(&self) -> usize {
        1 + self.safe_len + self.risky_len
    }

    fn is_safe_cell(&self, s: usize) -> bool {
        (1..=self.safe_len).contains(&s)
    }

    fn is_risky_cell(&self, s: usize) -> bool {
        s > self.safe_len && s < self.goal_state()
    }

    /// Destination of `action` from `s` (deterministic topology).
    fn dest(&self, s: usize, action: usize) -> usize {
        if s == self.fork_state() {
            return match action {
                SAFE => 1,
                _ => self.safe_len + 1,
            };
        }
        if self.is_safe_cell(s) {
            return match action {
                SAFE => {
                    if s == self.safe_len {
                        self.goal_state()
                    } else {
                        s + 1
                    }
                }
                _ => s - 1, // safe cell 1 retreats to the fork
            };
        }
        debug_assert!(self.is_risky_cell(s));
        match action {
            SAFE => {
                if s == self.goal_state() - 1 {
                    self.goal_state()
                } else {
                    s + 1
                }
            }
            _ => {
                if s == self.safe_len + 1 {
                    self.fork_state()
                } else {
                    s - 1
                }
            }
        }
    }

    /// Expected-reward model for the exact oracle: entering a risky cell is
    /// worth `-penalty_prob * penalty` in expectation.
    pub fn model(&self) -> TabularModel {
        let n = self.goal_state() + 1;
        let mut model = TabularModel::new(n, 2);
        for s in 0..n - 1 {
            for action in 0..2 {
                let next = self.dest(s, action);
                let reward = if next == self.goal_state() {
                    self.goal_reward
                } else if self.is_risky_cell(next) {
                    -self.penalty_prob * self.penalty
                } else {
                    0.0
                };
                model.add_transition(s, action, next, 1.0, reward);
            }
        }
        model.set_terminal(self.goal_state());
        model
    }
}

impl MarkovEnv for RiskyPathEnv {
    fn num_states(&self) -> usize {
        self.goal_state() + 1
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.state = 0;
        self.steps = 0;
        self.state
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<StepOutcome> {
        if action >= 2 {
            return Err(Error::ActionOutOfRange { index: action, limit: 2 });
        }
        self.steps += 1;
        let next = self.dest(self.state, action);
        let mut reward = 0.0;
        if next == self.goal_state() {
            reward += self.goal_reward;
        } else if self.is_risky_cell(next)
            && self.penalty_prob > 0.0
            && rng.gen::<f64>() < self.penalty_prob
        {
            reward -= self.penalty;
        }
        self.state = next;
        let done = next == self.goal_state() || self.steps >= self.horizon();
        Ok(StepOutcome {
            next_state: next,
            reward,
            done,
        })
    }

    fn horizon(&self) -> usize {
        8 * (self.safe_len + self.risky_len + 2)
    }
}

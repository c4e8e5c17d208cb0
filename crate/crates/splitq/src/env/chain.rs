//! Linear corridor testbed.

use rand::RngCore;

use crate::env::{MarkovEnv, StepOutcome, TabularModel};
use crate::error::{Error, Result};

pub const RIGHT: usize = 0;
pub const LEFT: usize = 1;

/// `n`-state chain `s0 .. s(n-1)`. Action 0 moves right, action 1 moves left
/// (floored at `s0`). Entering the terminal right end pays +1; every other
/// step pays 0.
#[derive(Debug, Clone)]
pub struct ChainEnv {
    n: usize,
    state: usize,
    steps: usize,
    done: bool,
}

impl ChainEnv {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGeometry(format!(
                "chain needs at least 2 states, got {n}"
            )));
        }
        Ok(Self {
            n,
            state: 0,
            steps: 0,
            done: true,
        })
    }

    /// Exact model of the same dynamics, for the dynamic-programming oracle.
    pub fn model(&self) -> TabularModel {
        let n = self.n;
        let mut model = TabularModel::new(n, 2);
        for s in 0..n - 1 {
            let right = s + 1;
            let reward = if right == n - 1 { 1.0 } else { 0.0 };
            model.add_transition(s, RIGHT, right, 1.0, reward);
            model.add_transition(s, LEFT, s.saturating_sub(1), 1.0, 0.0);
        }
        model.set_terminal(n - 1);
        model
    }
}

impl MarkovEnv for ChainEnv {
    fn num_states(&self) -> usize {
        self.n
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.state = 0;
        self.steps = 0;
        self.done = false;
        self.state
    }

    fn step(&mut self, action: usize, _rng: &mut dyn RngCore) -> Result<StepOutcome> {
        if action >= 2 {
            return Err(Error::ActionOutOfRange { index: action, limit: 2 });
        }
        debug_assert!(!self.done, "step called on finished episode");
        self.steps += 1;
        self.state = match action {
            RIGHT => self.state + 1,
            _ => self.state.saturating_sub(1),
        };
        let reached_goal = self.state == self.n - 1;
        let reward = if reached_goal { 1.0 } else { 0.0 };
        self.done = reached_goal || self.steps >= self.horizon();
        Ok(StepOutcome {
            next_state: self.state,
            reward,
            done: self.done,
        })
    }

    fn horizon(&self) -> usize {
        4 * self.n + 4
    }
}

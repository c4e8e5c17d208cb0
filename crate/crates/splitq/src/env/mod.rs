//! Tabular episodic environments, reward-transform wrappers, and an exact
//! dynamic-programming oracle.

pub mod chain;
pub mod grid;
mod model;
pub mod risky;
mod wrapper;

pub use chain::ChainEnv;
pub use grid::GridPacmanEnv;
pub use model::{value_iteration, TabularModel, ValueIterationResult};
pub use risky::RiskyPathEnv;
pub use wrapper::{wrap_rewards, RewardTransform, RewardWrapper, StreamScaling};

use rand::RngCore;

use crate::error::Result;

/// One transition result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next_state: usize,
    pub reward: f64,
    pub done: bool,
}

/// Tabular episodic environment contract. States and actions are dense
/// `0..n` ids. Environments hold the current state between `reset` and
/// `step` calls and terminate on their own within `horizon()` steps, so no
/// caller can hang on an episode.
pub trait MarkovEnv {
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;

    /// Starts a new episode and returns the initial state.
    fn reset(&mut self, rng: &mut dyn RngCore) -> usize;

    /// Advances one step. `rng` feeds any stochastic rewards or transitions.
    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<StepOutcome>;

    /// Declared episode-length bound; `step` reports `done` at the latest
    /// after this many steps.
    fn horizon(&self) -> usize;
}

impl<E: MarkovEnv + ?Sized> MarkovEnv for &mut E {
    fn num_states(&self) -> usize {
        (**self).num_states()
    }
    fn num_actions(&self) -> usize {
        (**self).num_actions()
    }
    fn reset(&mut self, rng: &mut dyn RngCore) -> usize {
        (**self).reset(rng)
    }
    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<StepOutcome> {
        (**self).step(action, rng)
    }
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
}

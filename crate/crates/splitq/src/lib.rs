//! Two-stream (split) Q-learning laboratory.
//!
//! The crate keeps separate action-value tables for positive and negative
//! reward, combined and decayed through a four-weight bias profile. Around
//! that core it provides:
//!
//! - small tabular environments plus an exact value-iteration oracle,
//! - reward rescaling/thinning wrappers with scheduled regime switches,
//! - a Gaussian-process UCB loop that tunes the four weights online,
//! - recovery of the generating profile from observed trajectories via
//!   discounted feature-expectation matching.
//!
//! Batch work (candidate scoring, multi-seed evaluations) runs on rayon when
//! the default `parallel` feature is enabled and sequentially otherwise;
//! results are identical either way.

pub mod agent;
pub mod env;
pub mod error;
pub mod exec;
pub mod gp;
pub mod profile;
pub mod qtable;
pub mod recovery;

pub use agent::{final_fraction_mean, EpisodeRecord, LearningConfig, SqlAgent};
pub use env::{
    value_iteration, wrap_rewards, ChainEnv, GridPacmanEnv, MarkovEnv, RewardTransform,
    RewardWrapper, RiskyPathEnv, StepOutcome, StreamScaling, TabularModel,
};
pub use error::{Error, Result};
pub use gp::{
    adapt_loop, optimize_on_grid, propose_next, AdaptRound, CandidateGrid, GpConfig, GpState,
};
pub use profile::BiasProfile;
pub use qtable::{split_reward, SplitQTable};
pub use recovery::{
    feature_expectations, fit_profile, fit_profile_multi, generate_expert, FeatureExpectation,
    FitResult, Trajectory,
};

//! Versioned JSON experiment configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};
use splitq::{
    wrap_rewards, BiasProfile, ChainEnv, GridPacmanEnv, LearningConfig, MarkovEnv,
    RewardTransform, RiskyPathEnv,
};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub environment: EnvSpec,
    pub profiles: Vec<ProfileSpec>,
    pub learning: LearningConfig,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Output directory; the CLI `--out` flag takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    /// Use preset means as-is instead of sampling inside the ± ranges.
    #[serde(default)]
    pub deterministic_profiles: bool,
    /// Optional transform applied by `train`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<RewardTransform>,
    /// Named transform variants crossed with profiles by `sweep`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variants: Vec<NamedTransform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adapt: Option<AdaptSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recover: Option<RecoverSpec>,
}

fn default_repetitions() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvSpec {
    Chain {
        n: usize,
    },
    GridPacman {
        width: usize,
        height: usize,
        pellet_reward: f64,
        ghost_penalty: f64,
        #[serde(default)]
        ghost_cells: Vec<(usize, usize)>,
        pellet_cells: Vec<(usize, usize)>,
        #[serde(default)]
        start: (usize, usize),
    },
    RiskyPath {
        safe_len: usize,
        risky_len: usize,
        penalty_prob: f64,
        penalty: f64,
        goal_reward: f64,
    },
}

/// Built environment, dispatched once so downstream code stays generic.
pub enum BuiltEnv {
    Chain(ChainEnv),
    Grid(GridPacmanEnv),
    Risky(RiskyPathEnv),
}

impl EnvSpec {
    pub fn build(&self) -> Result<BuiltEnv> {
        let built = match self {
            EnvSpec::Chain { n } => BuiltEnv::Chain(ChainEnv::new(*n)?),
            EnvSpec::GridPacman {
                width,
                height,
                pellet_reward,
                ghost_penalty,
                ghost_cells,
                pellet_cells,
                start,
            } => BuiltEnv::Grid(GridPacmanEnv::new(
                *width,
                *height,
                *pellet_reward,
                *ghost_penalty,
                ghost_cells,
                pellet_cells,
                *start,
            )?),
            EnvSpec::RiskyPath {
                safe_len,
                risky_len,
                penalty_prob,
                penalty,
                goal_reward,
            } => BuiltEnv::Risky(RiskyPathEnv::new(
                *safe_len,
                *risky_len,
                *penalty_prob,
                *penalty,
                *goal_reward,
            )?),
        };
        Ok(built)
    }
}

/// Runs `f` on the concrete environment type, optionally wrapped in a
/// reward transform.
pub fn with_built_env<T>(
    spec: &EnvSpec,
    transform: Option<&RewardTransform>,
    f: impl EnvVisitor<T>,
) -> Result<T> {
    match spec.build()? {
        BuiltEnv::Chain(env) => dispatch_transform(env, transform, f),
        BuiltEnv::Grid(env) => dispatch_transform(env, transform, f),
        BuiltEnv::Risky(env) => dispatch_transform(env, transform, f),
    }
}

fn dispatch_transform<E, T>(
    env: E,
    transform: Option<&RewardTransform>,
    f: impl EnvVisitor<T>,
) -> Result<T>
where
    E: MarkovEnv + Clone + Send + Sync + 'static,
{
    match transform {
        Some(t) => f.visit(wrap_rewards(env, t.clone())?),
        None => f.visit(env),
    }
}

/// Generic continuation over a concrete environment type.
pub trait EnvVisitor<T> {
    fn visit<E: MarkovEnv + Clone + Send + Sync + 'static>(self, env: E) -> Result<T>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    /// A preset label from the built-in table.
    Label(String),
    /// Fully explicit weights.
    Custom {
        label: String,
        phi: [f64; 4],
        #[serde(default)]
        ranges: [f64; 4],
    },
}

impl ProfileSpec {
    pub fn resolve(&self) -> Result<BiasProfile> {
        match self {
            ProfileSpec::Label(label) => BiasProfile::preset(label).ok_or_else(|| {
                HarnessError::Config(format!(
                    "profiles: unknown preset '{label}' (run list-profiles for the table)"
                ))
            }),
            ProfileSpec::Custom { label, phi, ranges } => {
                Ok(BiasProfile::new(label.clone(), *phi, *ranges)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedTransform {
    pub name: String,
    pub transform: RewardTransform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptSpec {
    /// Per-weight candidate values; the Cartesian product is searched.
    pub grid: [Vec<f64>; 4],
    pub rounds: usize,
    pub episodes_per_round: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub gp: GpSpec,
}

fn default_beta() -> f64 {
    splitq::gp::DEFAULT_BETA
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpSpec {
    pub kernel_lengthscale: f64,
    pub kernel_variance: f64,
    pub noise_variance: f64,
    #[serde(default = "default_jitter")]
    pub jitter: f64,
}

fn default_jitter() -> f64 {
    splitq::gp::DEFAULT_JITTER
}

impl Default for GpSpec {
    fn default() -> Self {
        let d = splitq::GpConfig::default();
        Self {
            kernel_lengthscale: d.kernel_lengthscale,
            kernel_variance: d.kernel_variance,
            noise_variance: d.noise_variance,
            jitter: d.jitter,
        }
    }
}

impl GpSpec {
    pub fn to_config(self) -> splitq::GpConfig {
        splitq::GpConfig {
            kernel_lengthscale: self.kernel_lengthscale,
            kernel_variance: self.kernel_variance,
            noise_variance: self.noise_variance,
            jitter: self.jitter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverSpec {
    pub candidates: Vec<ProfileSpec>,
    pub seeds_per_candidate: usize,
    /// Discount for feature expectations; defaults to the learning gamma.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        if self.profiles.is_empty() {
            return Err(HarnessError::Config("profiles: at least one required".into()));
        }
        for p in &self.profiles {
            p.resolve()?;
        }
        if self.repetitions < 1 {
            return Err(HarnessError::Config("repetitions: must be >= 1".into()));
        }
        self.learning.validate()?;
        self.environment.build()?;
        if let Some(t) = &self.transform {
            t.validate()?;
        }
        let mut seen = std::collections::HashSet::new();
        for v in &self.variants {
            v.transform.validate()?;
            if !seen.insert(v.name.clone()) {
                return Err(HarnessError::Config(format!(
                    "variants: duplicate name '{}'",
                    v.name
                )));
            }
        }
        if let Some(a) = &self.adapt {
            if a.rounds < 1 || a.episodes_per_round < 1 {
                return Err(HarnessError::Config(
                    "adapt: rounds and episodes_per_round must be >= 1".into(),
                ));
            }
            splitq::CandidateGrid::new(a.grid.clone())?;
        }
        if let Some(r) = &self.recover {
            if r.candidates.is_empty() {
                return Err(HarnessError::Config("recover.candidates: at least one required".into()));
            }
            for c in &r.candidates {
                c.resolve()?;
            }
            if r.seeds_per_candidate < 1 {
                return Err(HarnessError::Config("recover.seeds_per_candidate: must be >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn resolved_profiles(&self) -> Result<Vec<BiasProfile>> {
        self.profiles.iter().map(ProfileSpec::resolve).collect()
    }
}

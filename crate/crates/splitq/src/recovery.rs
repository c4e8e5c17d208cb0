//! Recovering the bias profile behind observed behavior by matching
//! discounted state-action visitation between expert trajectories and
//! candidate-profile rollouts.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::SqlAgent;
use crate::agent::LearningConfig;
use crate::env::MarkovEnv;
use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::profile::BiasProfile;

/// One episode's ordered (state, action, reward) records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<(usize, usize, f64)>,
}

/// Discounted state-action visitation, indexed by `state * num_actions +
/// action`, averaged over the trajectories that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureExpectation {
    pub values: Vec<f64>,
    pub gamma: f64,
    pub num_actions: usize,
}

impl FeatureExpectation {
    pub fn entry(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.num_actions + action]
    }

    /// Euclidean distance between two expectation vectors.
    pub fn distance(&self, other: &FeatureExpectation) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Mean over trajectories of `sum_t gamma^t * indicator(s_t, a_t)`, with `t`
/// starting at 0 in every trajectory.
pub fn feature_expectations(
    trajectories: &[Trajectory],
    gamma: f64,
    num_states: usize,
    num_actions: usize,
) -> Result<FeatureExpectation> {
    if trajectories.is_empty() {
        return Err(Error::EmptyInput("feature_expectations needs at least one trajectory"));
    }
    let mut values = vec![0.0; num_states * num_actions];
    for traj in trajectories {
        let mut discount = 1.0;
        for &(state, action, _) in &traj.steps {
            if state >= num_states {
                return Err(Error::StateOutOfRange { index: state, limit: num_states });
            }
            if action >= num_actions {
                return Err(Error::ActionOutOfRange { index: action, limit: num_actions });
            }
            values[state * num_actions + action] += discount;
            discount *= gamma;
        }
    }
    let n = trajectories.len() as f64;
    for v in &mut values {
        *v /= n;
    }
    Ok(FeatureExpectation {
        values,
        gamma,
        num_actions,
    })
}

/// Trains an agent with `profile` under `cfg`, then returns
/// `n_trajectories` greedy rollouts of the learned policy. Rollouts do not
/// explore and do not update, so they reflect the converged behavior.
pub fn generate_expert<E: MarkovEnv>(
    env: &mut E,
    profile: &BiasProfile,
    cfg: &LearningConfig,
    n_trajectories: usize,
) -> Result<Vec<Trajectory>> {
    let mut agent = SqlAgent::new(profile.clone(), cfg.clone(), &*env)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    agent.train(&mut *env, &mut rng)?;
    let mut out = Vec::with_capacity(n_trajectories);
    for _ in 0..n_trajectories {
        let record = agent.rollout(&mut *env, &mut rng)?;
        out.push(Trajectory {
            steps: record.trajectory,
        });
    }
    Ok(out)
}

/// Distance table produced by a profile fit, in candidate order.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub best: BiasProfile,
    pub best_index: usize,
    /// (candidate label, distance) per candidate, in input order.
    pub distances: Vec<(String, f64)>,
}

/// Matches expert trajectories against every candidate preset: each
/// candidate trains `seeds_per_candidate` experts (seeds `cfg.seed + k`),
/// their feature expectations are averaged, and the candidate closest to the
/// expert's expectations (Euclidean distance, first on ties) wins. Candidate
/// evaluations are independent and fan out in parallel, each on its own
/// cloned environment and RNG stream.
pub fn fit_profile<E: MarkovEnv + Clone + Send + Sync>(
    expert_trajectories: &[Trajectory],
    env: &E,
    candidates: &[BiasProfile],
    cfg: &LearningConfig,
    gamma: f64,
    seeds_per_candidate: usize,
) -> Result<FitResult> {
    let tables = candidate_expectations(
        expert_trajectories,
        env,
        candidates,
        cfg,
        gamma,
        seeds_per_candidate,
    )?;
    rank_candidates(candidates, &[tables])
}

/// Multi-environment variant: expert and candidate behavior are compared in
/// several reward regimes at once and per-regime squared distances add up.
/// Profiles whose policies coincide in one regime often separate in another,
/// which is what makes the full set identifiable.
pub fn fit_profile_multi<E: MarkovEnv + Clone + Send + Sync>(
    expert_sets: &[&[Trajectory]],
    envs: &[E],
    candidates: &[BiasProfile],
    cfg: &LearningConfig,
    gamma: f64,
    seeds_per_candidate: usize,
) -> Result<FitResult> {
    if expert_sets.len() != envs.len() || envs.is_empty() {
        return Err(Error::InvalidConfig(
            "fit_profile_multi needs matching, non-empty expert/env lists".into(),
        ));
    }
    let mut all = Vec::with_capacity(envs.len());
    for (expert, env) in expert_sets.iter().zip(envs) {
        all.push(candidate_expectations(
            expert,
            env,
            candidates,
            cfg,
            gamma,
            seeds_per_candidate,
        )?);
    }
    rank_candidates(candidates, &all)
}

/// Per-candidate (expert distance components) for one environment.
struct RegimeDistances {
    labels: Vec<String>,
    squared: Vec<f64>,
}

fn candidate_expectations<E: MarkovEnv + Clone + Send + Sync>(
    expert_trajectories: &[Trajectory],
    env: &E,
    candidates: &[BiasProfile],
    cfg: &LearningConfig,
    gamma: f64,
    seeds_per_candidate: usize,
) -> Result<RegimeDistances> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput("fit_profile needs at least one candidate"));
    }
    if seeds_per_candidate == 0 {
        return Err(Error::InvalidConfig("seeds_per_candidate must be >= 1".into()));
    }
    let expert_mu =
        feature_expectations(expert_trajectories, gamma, env.num_states(), env.num_actions())?;
    let n_traj = expert_trajectories.len();

    let jobs: Vec<BiasProfile> = candidates.to_vec();
    let results = par_map(jobs, |candidate| -> Result<f64> {
        let mut sum = vec![0.0; env.num_states() * env.num_actions()];
        for k in 0..seeds_per_candidate {
            let mut cfg_k = cfg.clone();
            cfg_k.seed = cfg.seed.wrapping_add(k as u64);
            let mut env_k = env.clone();
            let trajs = generate_expert(&mut env_k, &candidate, &cfg_k, n_traj)?;
            let mu = feature_expectations(&trajs, gamma, env.num_states(), env.num_actions())?;
            for (acc, v) in sum.iter_mut().zip(&mu.values) {
                *acc += v;
            }
        }
        let mean = FeatureExpectation {
            values: sum.iter().map(|v| v / seeds_per_candidate as f64).collect(),
            gamma,
            num_actions: env.num_actions(),
        };
        Ok(expert_mu.distance(&mean))
    });

    let mut squared = Vec::with_capacity(candidates.len());
    for r in results {
        let d = r?;
        squared.push(d * d);
    }
    Ok(RegimeDistances {
        labels: candidates.iter().map(|c| c.label.clone()).collect(),
        squared,
    })
}

fn rank_candidates(candidates: &[BiasProfile], regimes: &[RegimeDistances]) -> Result<FitResult> {
    let n = candidates.len();
    let mut totals = vec![0.0; n];
    for regime in regimes {
        for (t, s) in totals.iter_mut().zip(&regime.squared) {
            *t += s;
        }
    }
    let distances: Vec<(String, f64)> = regimes[0]
        .labels
        .iter()
        .cloned()
        .zip(totals.iter().map(|t| t.sqrt()))
        .collect();
    let mut best = 0;
    for i in 1..n {
        if distances[i].1 < distances[best].1 {
            best = i;
        }
    }
    Ok(FitResult {
        best: candidates[best].clone(),
        best_index: best,
        distances,
    })
}

pub const TRAJECTORY_CSV_HEADER: &str = "episode_id,t,state,action,reward";

/// Writes trajectories as line-delimited CSV records
/// `episode_id,t,state,action,reward`.
pub fn write_trajectories_csv<W: Write>(out: &mut W, trajectories: &[Trajectory]) -> Result<()> {
    writeln!(out, "{TRAJECTORY_CSV_HEADER}")?;
    for (episode_id, traj) in trajectories.iter().enumerate() {
        for (t, &(state, action, reward)) in traj.steps.iter().enumerate() {
            writeln!(out, "{episode_id},{t},{state},{action},{reward}")?;
        }
    }
    Ok(())
}

pub fn save_trajectories_csv(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    write_trajectories_csv(&mut file, trajectories)
}

/// Parses the trajectory CSV format; errors carry the 1-based line number.
pub fn read_trajectories_csv<R: Read>(input: R) -> Result<Vec<Trajectory>> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => {
            return Err(Error::TrajectoryParse {
                line: 1,
                msg: "empty file".into(),
            })
        }
    };
    if header.trim() != TRAJECTORY_CSV_HEADER {
        return Err(Error::TrajectoryParse {
            line: 1,
            msg: format!("expected header '{TRAJECTORY_CSV_HEADER}', got '{header}'"),
        });
    }
    let mut trajectories: Vec<Trajectory> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::TrajectoryParse {
                line: line_no,
                msg: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let parse_usize = |field: &str, name: &str| -> Result<usize> {
            field.trim().parse().map_err(|_| Error::TrajectoryParse {
                line: line_no,
                msg: format!("invalid {name} '{field}'"),
            })
        };
        let episode_id = parse_usize(fields[0], "episode_id")?;
        let t = parse_usize(fields[1], "t")?;
        let state = parse_usize(fields[2], "state")?;
        let action = parse_usize(fields[3], "action")?;
        let reward: f64 = fields[4].trim().parse().map_err(|_| Error::TrajectoryParse {
            line: line_no,
            msg: format!("invalid reward '{}'", fields[4]),
        })?;
        if episode_id > trajectories.len() {
            return Err(Error::TrajectoryParse {
                line: line_no,
                msg: format!("episode_id {episode_id} skips ahead (expected <= {})", trajectories.len()),
            });
        }
        if episode_id == trajectories.len() {
            trajectories.push(Trajectory { steps: Vec::new() });
        }
        let steps = &mut trajectories[episode_id].steps;
        if t != steps.len() {
            return Err(Error::TrajectoryParse {
                line: line_no,
                msg: format!("step index {t} out of order (expected {})", steps.len()),
            });
        }
        steps.push((state, action, reward));
    }
    if trajectories.is_empty() {
        return Err(Error::TrajectoryParse {
            line: 1,
            msg: "file holds no trajectory records".into(),
        });
    }
    Ok(trajectories)
}

pub fn load_trajectories_csv(path: &Path) -> Result<Vec<Trajectory>> {
    read_trajectories_csv(std::fs::File::open(path)?)
}

//! `recover`: identify the bias profile behind a trajectory file.

use std::path::{Path, PathBuf};

use splitq::recovery::load_trajectories_csv;
use splitq::{fit_profile, BiasProfile, MarkovEnv, Trajectory};

use crate::config::{with_built_env, EnvVisitor, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::metrics::{ensure_dir, write_text};

pub struct RecoverSummary {
    pub report_path: PathBuf,
    pub best_label: String,
    /// Candidates sorted by ascending distance.
    pub ranked: Vec<(String, f64)>,
}

pub fn cmd_recover(
    trajectories_path: &Path,
    config: &ExperimentConfig,
    out: &Path,
) -> Result<RecoverSummary> {
    let spec = config
        .recover
        .as_ref()
        .ok_or_else(|| HarnessError::Config("recover requires a 'recover' section".into()))?;
    ensure_dir(out)?;
    let trajectories = load_trajectories_csv(trajectories_path)?;
    let candidates: Vec<BiasProfile> = spec
        .candidates
        .iter()
        .map(|c| c.resolve())
        .collect::<Result<_>>()?;
    let gamma = spec.gamma.unwrap_or(config.learning.gamma);

    struct Fit<'a> {
        trajectories: &'a [Trajectory],
        candidates: &'a [BiasProfile],
        config: &'a ExperimentConfig,
        gamma: f64,
        seeds: usize,
    }
    impl EnvVisitor<splitq::FitResult> for Fit<'_> {
        fn visit<E: MarkovEnv + Clone + Send + Sync + 'static>(
            self,
            env: E,
        ) -> Result<splitq::FitResult> {
            Ok(fit_profile(
                self.trajectories,
                &env,
                self.candidates,
                &self.config.learning,
                self.gamma,
                self.seeds,
            )?)
        }
    }

    let fit = with_built_env(
        &config.environment,
        config.transform.as_ref(),
        Fit {
            trajectories: &trajectories,
            candidates: &candidates,
            config,
            gamma,
            seeds: spec.seeds_per_candidate,
        },
    )?;

    let mut ranked = fit.distances.clone();
    ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"));

    let mut report = String::from("rank,label,distance\n");
    for (rank, (label, distance)) in ranked.iter().enumerate() {
        report.push_str(&format!("{},{label},{distance}\n", rank + 1));
    }
    let report_path = out.join("recovery_report.csv");
    write_text(&report_path, &report)?;

    Ok(RecoverSummary {
        report_path,
        best_label: fit.best.label,
        ranked,
    })
}

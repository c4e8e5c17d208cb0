//! Metric CSV and run-record persistence.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use splitq::EpisodeRecord;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::runs::RunOutput;

pub const METRIC_CSV_HEADER: &str = "episode,total_reward,total_pos,total_neg,steps,epsilon";

/// Writes one run's per-episode metrics. The format is the reproducibility
/// surface: identical runs must yield identical bytes.
pub fn metrics_csv(records: &[EpisodeRecord]) -> String {
    let mut out = String::from(METRIC_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.episode, r.total_reward, r.total_pos, r.total_neg, r.steps, r.epsilon
        ));
    }
    out
}

pub fn write_metrics_csv(path: &Path, records: &[EpisodeRecord]) -> Result<()> {
    write_text(path, &metrics_csv(records))
}

/// Wide aggregate: one row per episode, a mean and standard-error column per
/// profile, profiles in first-seen order.
pub fn aggregate_csv(runs: &[RunOutput], episodes: usize) -> String {
    let mut labels: Vec<&str> = Vec::new();
    for run in runs {
        if !labels.contains(&run.label.as_str()) {
            labels.push(&run.label);
        }
    }
    let mut out = String::from("episode");
    for label in &labels {
        out.push_str(&format!(",{label}_mean,{label}_stderr"));
    }
    out.push('\n');
    for episode in 0..episodes {
        out.push_str(&episode.to_string());
        for label in &labels {
            let values: Vec<f64> = runs
                .iter()
                .filter(|r| r.label == *label)
                .filter_map(|r| r.records.get(episode).map(|rec| rec.total_reward))
                .collect();
            let (mean, stderr) = mean_stderr(&values);
            out.push_str(&format!(",{mean},{stderr}"));
        }
        out.push('\n');
    }
    out
}

pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Trailing moving average with the given window (shorter at the start).
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for i in 0..values.len() {
        sum += values[i];
        if i >= window {
            sum -= values[i - window];
        }
        let len = (i + 1).min(window) as f64;
        out.push(sum / len);
    }
    out
}

/// Everything needed to re-execute and audit one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    /// Full experiment configuration this run was part of.
    pub config: ExperimentConfig,
    pub label: String,
    pub repetition: usize,
    pub seed: u64,
    pub profile_used: splitq::BiasProfile,
    pub duration_secs: f64,
    pub metrics: Vec<EpisodeMetric>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetric {
    pub episode: usize,
    pub total_reward: f64,
    pub total_pos: f64,
    pub total_neg: f64,
    pub steps: usize,
    pub epsilon: f64,
}

impl RunRecord {
    pub fn from_run(config: &ExperimentConfig, run: &RunOutput) -> Self {
        Self {
            schema_version: crate::config::SCHEMA_VERSION,
            config: config.clone(),
            label: run.label.clone(),
            repetition: run.repetition,
            seed: run.seed,
            profile_used: run.profile_used.clone(),
            duration_secs: run.duration_secs,
            metrics: run
                .records
                .iter()
                .map(|r| EpisodeMetric {
                    episode: r.episode,
                    total_reward: r.total_reward,
                    total_pos: r.total_pos,
                    total_neg: r.total_neg,
                    steps: r.steps,
                    epsilon: r.epsilon,
                })
                .collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        write_text(path, &json)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io(format!("cannot read {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| HarnessError::Io(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(text.as_bytes())
        .map_err(|e| HarnessError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| HarnessError::Io(format!("cannot create directory {}: {e}", path.display())))
}

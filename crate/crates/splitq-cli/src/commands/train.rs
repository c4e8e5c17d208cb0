//! `train`: run every configured profile for every repetition, persist
//! per-run metrics and records, and emit the aggregate curve chart.

use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::metrics::{
    aggregate_csv, ensure_dir, metrics_csv, write_metrics_csv, write_text, RunRecord,
};
use crate::runs::{execute_runs, RunOutput};
use crate::svg;

pub struct TrainSummary {
    pub runs: Vec<RunOutput>,
    pub csv_paths: Vec<PathBuf>,
    pub aggregate_path: PathBuf,
    pub svg_path: PathBuf,
}

pub fn cmd_train(config: &ExperimentConfig, out: &Path) -> Result<TrainSummary> {
    ensure_dir(out)?;
    let runs = execute_runs(config)?;
    let mut csv_paths = Vec::with_capacity(runs.len());
    for run in &runs {
        let stem = format!("{}_rep{}", run.label, run.repetition);
        let csv_path = out.join(format!("{stem}.csv"));
        write_metrics_csv(&csv_path, &run.records)?;
        RunRecord::from_run(config, run).save(&out.join(format!("{stem}.run.json")))?;
        csv_paths.push(csv_path);
    }
    let aggregate = aggregate_csv(&runs, config.learning.episodes);
    let aggregate_path = out.join("aggregate.csv");
    write_text(&aggregate_path, &aggregate)?;
    let svg_path = out.join("learning_curves.svg");
    write_text(&svg_path, &svg::learning_curves_svg(&aggregate)?)?;
    Ok(TrainSummary {
        runs,
        csv_paths,
        aggregate_path,
        svg_path,
    })
}

/// Re-executes the run described by a saved record and returns the metric
/// CSV it produces; byte-equality against the original file is the
/// reproducibility check.
pub fn replay_metrics(record: &RunRecord) -> Result<String> {
    let mut config = record.config.clone();
    config.profiles = config
        .profiles
        .iter()
        .filter(|spec| {
            spec.resolve()
                .map(|p| p.label == record.label)
                .unwrap_or(false)
        })
        .cloned()
        .collect();
    if config.profiles.is_empty() {
        return Err(HarnessError::Config(format!(
            "run record references profile '{}' absent from its own config",
            record.label
        )));
    }
    let runs = execute_runs(&config)?;
    let run = runs
        .iter()
        .find(|r| r.repetition == record.repetition)
        .ok_or_else(|| {
            HarnessError::Config(format!(
                "run record repetition {} exceeds configured repetitions",
                record.repetition
            ))
        })?;
    Ok(metrics_csv(&run.records))
}

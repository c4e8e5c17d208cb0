//! `sweep`: cross every profile with every reward-transform variant, emit
//! the comparison matrix, per-variant rankings, and non-stationarity flags.

use std::path::{Path, PathBuf};

use splitq::final_fraction_mean;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::metrics::{aggregate_csv, ensure_dir, mean_stderr, write_metrics_csv, write_text};
use crate::runs::{execute_runs_with, RunOutput};

const FLAG_WINDOW: usize = 20;

pub struct SweepSummary {
    pub matrix_path: PathBuf,
    pub ranking_path: PathBuf,
    pub flags_path: Option<PathBuf>,
    /// (variant, runs) in variant order.
    pub variants: Vec<(String, Vec<RunOutput>)>,
}

pub fn cmd_sweep(config: &ExperimentConfig, out: &Path) -> Result<SweepSummary> {
    if config.variants.is_empty() {
        return Err(HarnessError::Config(
            "sweep requires at least one entry under 'variants'".into(),
        ));
    }
    ensure_dir(out)?;
    let labels: Vec<String> = config
        .resolved_profiles()?
        .into_iter()
        .map(|p| p.label)
        .collect();

    let mut variants: Vec<(String, Vec<RunOutput>)> = Vec::new();
    for variant in &config.variants {
        let dir = out.join(&variant.name);
        ensure_dir(&dir)?;
        let runs = execute_runs_with(config, Some(&variant.transform))?;
        for run in &runs {
            write_metrics_csv(
                &dir.join(format!("{}_rep{}.csv", run.label, run.repetition)),
                &run.records,
            )?;
        }
        write_text(
            &dir.join("aggregate.csv"),
            &aggregate_csv(&runs, config.learning.episodes),
        )?;
        variants.push((variant.name.clone(), runs));
    }

    // Mean final return (last 20% of episodes, averaged over repetitions).
    let cell = |runs: &[RunOutput], label: &str| -> f64 {
        let finals: Vec<f64> = runs
            .iter()
            .filter(|r| r.label == label)
            .map(|r| final_fraction_mean(&r.records, 0.2))
            .collect();
        mean_stderr(&finals).0
    };

    let mut matrix = String::from("profile");
    for (name, _) in &variants {
        matrix.push_str(&format!(",{name}"));
    }
    matrix.push('\n');
    for label in &labels {
        matrix.push_str(label);
        for (_, runs) in &variants {
            matrix.push_str(&format!(",{}", cell(runs, label)));
        }
        matrix.push('\n');
    }
    let matrix_path = out.join("sweep_matrix.csv");
    write_text(&matrix_path, &matrix)?;

    let mut ranking = String::from("variant,rank,profile,mean_final_return\n");
    for (name, runs) in &variants {
        let mut scored: Vec<(String, f64)> =
            labels.iter().map(|l| (l.clone(), cell(runs, l))).collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite means"));
        for (rank, (label, mean)) in scored.iter().enumerate() {
            ranking.push_str(&format!("{name},{},{label},{mean}\n", rank + 1));
        }
    }
    let ranking_path = out.join("sweep_ranking.csv");
    write_text(&ranking_path, &ranking)?;

    // Scheduled switches: compare the moving average just before and just
    // after the switch episode in every run's own metric series.
    let mut flags = String::from(
        "variant,profile,repetition,switch_episode,ma_before,ma_after,delta,stderr_before,flagged\n",
    );
    let mut any_switch = false;
    for (variant_cfg, (name, runs)) in config.variants.iter().zip(&variants) {
        let Some(switch) = variant_cfg.transform.switch_episode else {
            continue;
        };
        any_switch = true;
        for run in runs {
            if let Some(row) = discontinuity_row(run, switch) {
                flags.push_str(&format!("{name},{row}\n"));
            }
        }
    }
    let flags_path = if any_switch {
        let path = out.join("sweep_flags.csv");
        write_text(&path, &flags)?;
        Some(path)
    } else {
        None
    };

    Ok(SweepSummary {
        matrix_path,
        ranking_path,
        flags_path,
        variants,
    })
}

fn discontinuity_row(run: &RunOutput, switch: usize) -> Option<String> {
    let returns: Vec<f64> = run.records.iter().map(|r| r.total_reward).collect();
    if switch == 0 || switch >= returns.len() {
        return None;
    }
    let before = &returns[switch.saturating_sub(FLAG_WINDOW)..switch];
    let after = &returns[switch..(switch + FLAG_WINDOW).min(returns.len())];
    let (ma_before, stderr_before) = mean_stderr(before);
    let (ma_after, _) = mean_stderr(after);
    let delta = ma_after - ma_before;
    let flagged = delta.abs() > 3.0 * stderr_before + 1e-9;
    Some(format!(
        "{},{},{switch},{ma_before},{ma_after},{delta},{stderr_before},{flagged}",
        run.label, run.repetition
    ))
}

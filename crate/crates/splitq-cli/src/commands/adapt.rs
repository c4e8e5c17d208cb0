//! `adapt`: tune the four bias weights online with the surrogate UCB loop.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use splitq::gp::{adapt_loop, AdaptRound, CandidateGrid, GpState};
use splitq::MarkovEnv;

use crate::config::{with_built_env, EnvVisitor, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::metrics::{ensure_dir, write_text};

pub struct AdaptSummary {
    pub history_path: PathBuf,
    pub report_path: PathBuf,
    pub history: Vec<AdaptRound>,
}

#[derive(Serialize)]
struct AdaptReport<'a> {
    rounds: usize,
    incumbent_phi: [f64; 4],
    incumbent_value: f64,
    history_csv: &'a str,
}

pub fn cmd_adapt(config: &ExperimentConfig, out: &Path) -> Result<AdaptSummary> {
    config
        .adapt
        .as_ref()
        .ok_or_else(|| HarnessError::Config("adapt requires an 'adapt' section".into()))?;
    ensure_dir(out)?;

    struct Loop<'a> {
        config: &'a ExperimentConfig,
    }
    impl EnvVisitor<Vec<AdaptRound>> for Loop<'_> {
        fn visit<E: MarkovEnv + Clone + Send + Sync + 'static>(
            self,
            mut env: E,
        ) -> Result<Vec<AdaptRound>> {
            let spec = self.config.adapt.as_ref().expect("checked by caller");
            let mut gp = GpState::new(spec.gp.to_config())?;
            let grid = CandidateGrid::new(spec.grid.clone())?;
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.learning.seed);
            Ok(adapt_loop(
                &mut env,
                &self.config.learning,
                &mut gp,
                &grid,
                spec.beta,
                spec.rounds,
                spec.episodes_per_round,
                &mut rng,
            )?)
        }
    }

    let history = with_built_env(&config.environment, config.transform.as_ref(), Loop { config })?;

    let mut csv = String::from(
        "round,phi1,phi2,phi3,phi4,mean_return,incumbent_phi1,incumbent_phi2,incumbent_phi3,incumbent_phi4,incumbent_value\n",
    );
    for r in &history {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.round,
            r.phi[0],
            r.phi[1],
            r.phi[2],
            r.phi[3],
            r.value,
            r.incumbent_phi[0],
            r.incumbent_phi[1],
            r.incumbent_phi[2],
            r.incumbent_phi[3],
            r.incumbent_value,
        ));
    }
    let history_path = out.join("adapt_history.csv");
    write_text(&history_path, &csv)?;

    let last = history.last().expect("rounds >= 1 validated");
    let report = AdaptReport {
        rounds: history.len(),
        incumbent_phi: last.incumbent_phi,
        incumbent_value: last.incumbent_value,
        history_csv: "adapt_history.csv",
    };
    let report_path = out.join("adapt_report.json");
    write_text(&report_path, &serde_json::to_string_pretty(&report)?)?;

    Ok(AdaptSummary {
        history_path,
        report_path,
        history,
    })
}

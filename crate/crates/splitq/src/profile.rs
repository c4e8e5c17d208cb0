//! Reward-processing bias profiles.
//!
//! A profile is a four-weight vector: `phi1`/`phi3` decay the memory of the
//! positive/negative value tables on every update, `phi2`/`phi4` weight the
//! two tables when action values are combined at selection time. Eight named
//! presets ship with the crate; each carries a per-weight half-width so that
//! perturbed variants can be drawn around the preset means.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A four-weight reward-processing bias profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasProfile {
    pub label: String,
    /// Memory weight of the positive stream.
    pub phi1: f64,
    /// Positive-stream weight at action selection.
    pub phi2: f64,
    /// Memory weight of the negative stream.
    pub phi3: f64,
    /// Negative-stream weight at action selection.
    pub phi4: f64,
    /// Per-weight half-widths for perturbation sampling.
    #[serde(default)]
    pub ranges: [f64; 4],
}

impl BiasProfile {
    /// Builds a profile after validating that all weights are finite and
    /// nonnegative and all half-widths are finite and nonnegative.
    pub fn new(label: impl Into<String>, weights: [f64; 4], ranges: [f64; 4]) -> Result<Self> {
        let label = label.into();
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "profile '{label}': phi{} must be finite and >= 0, got {w}",
                    i + 1
                )));
            }
        }
        for (i, &r) in ranges.iter().enumerate() {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "profile '{label}': range for phi{} must be finite and >= 0, got {r}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            label,
            phi1: weights[0],
            phi2: weights[1],
            phi3: weights[2],
            phi4: weights[3],
            ranges,
        })
    }

    /// The unbiased baseline: all four weights 1, no perturbation ranges.
    pub fn standard() -> Self {
        Self::preset("standard").expect("standard preset exists")
    }

    /// All eight built-in presets in table order.
    pub fn presets() -> Vec<Self> {
        PRESETS
            .iter()
            .map(|(label, _, weights, ranges)| {
                Self::new(*label, *weights, *ranges).expect("preset weights are valid")
            })
            .collect()
    }

    /// Looks up a preset by label (case-sensitive).
    pub fn preset(label: &str) -> Option<Self> {
        PRESETS
            .iter()
            .find(|(l, _, _, _)| *l == label)
            .map(|(l, _, weights, ranges)| {
                Self::new(*l, *weights, *ranges).expect("preset weights are valid")
            })
    }

    /// Long-form name of a preset label, if it is one of the built-ins.
    pub fn preset_description(label: &str) -> Option<&'static str> {
        PRESETS
            .iter()
            .find(|(l, _, _, _)| *l == label)
            .map(|(_, d, _, _)| *d)
    }

    /// Draws a perturbed copy: each weight uniform on
    /// `[mean - half_width, mean + half_width]`, clamped below at 0.
    /// Zero half-widths return the means unchanged (no RNG draw).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut out = self.clone();
        let means = self.weights();
        let mut sampled = [0.0; 4];
        for i in 0..4 {
            let hw = self.ranges[i];
            sampled[i] = if hw > 0.0 {
                rng.gen_range(means[i] - hw..=means[i] + hw).max(0.0)
            } else {
                means[i]
            };
        }
        out.phi1 = sampled[0];
        out.phi2 = sampled[1];
        out.phi3 = sampled[2];
        out.phi4 = sampled[3];
        out
    }

    pub fn weights(&self) -> [f64; 4] {
        [self.phi1, self.phi2, self.phi3, self.phi4]
    }
}

/// (label, description, weight means, half-widths)
const PRESETS: [(&str, &str, [f64; 4], [f64; 4]); 8] = [
    ("AD", "addiction", [1.0, 1.0, 0.5, 1.0], [0.1, 0.1, 0.1, 0.1]),
    (
        "ADHD",
        "attention-deficit/hyperactivity",
        [0.2, 1.0, 0.2, 1.0],
        [0.1, 0.1, 0.1, 0.1],
    ),
    ("AZ", "Alzheimer's", [0.1, 1.0, 0.1, 1.0], [0.1, 0.1, 0.1, 0.1]),
    ("CP", "chronic pain", [0.5, 0.5, 1.0, 1.0], [0.1, 0.1, 0.1, 0.1]),
    (
        "bvFTD",
        "behavioral-variant frontotemporal dementia",
        [0.5, 100.0, 0.5, 1.0],
        [0.1, 10.0, 0.1, 0.1],
    ),
    ("PD", "Parkinson's", [0.5, 1.0, 0.5, 100.0], [0.1, 0.1, 0.1, 10.0]),
    ("M", "moderate", [0.5, 1.0, 0.5, 1.0], [0.1, 0.1, 0.1, 0.1]),
    ("standard", "baseline", [1.0, 1.0, 1.0, 1.0], [0.0, 0.0, 0.0, 0.0]),
];

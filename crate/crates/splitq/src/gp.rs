//! Gaussian-process surrogate over four-weight bias vectors and the
//! upper-confidence-bound loop that tunes them online.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::{final_fraction_mean, LearningConfig, SqlAgent};
use crate::env::MarkovEnv;
use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::profile::BiasProfile;

pub const DEFAULT_JITTER: f64 = 1e-8;
pub const DEFAULT_BETA: f64 = 4.0;

/// Squared-exponential kernel hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    pub kernel_lengthscale: f64,
    pub kernel_variance: f64,
    pub noise_variance: f64,
    /// Diagonal stabilizer added alongside the noise term.
    #[serde(default = "default_jitter")]
    pub jitter: f64,
}

fn default_jitter() -> f64 {
    DEFAULT_JITTER
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            kernel_lengthscale: 1.0,
            kernel_variance: 1.0,
            noise_variance: 1e-4,
            jitter: DEFAULT_JITTER,
        }
    }
}

impl GpConfig {
    fn validate(&self) -> Result<()> {
        if !self.kernel_lengthscale.is_finite() || self.kernel_lengthscale <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "kernel_lengthscale must be finite and > 0, got {}",
                self.kernel_lengthscale
            )));
        }
        if !self.kernel_variance.is_finite() || self.kernel_variance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "kernel_variance must be finite and > 0, got {}",
                self.kernel_variance
            )));
        }
        if !self.noise_variance.is_finite() || self.noise_variance < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise_variance must be finite and >= 0, got {}",
                self.noise_variance
            )));
        }
        if !self.jitter.is_finite() || self.jitter < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "jitter must be finite and >= 0, got {}",
                self.jitter
            )));
        }
        Ok(())
    }

    fn kernel(&self, a: &[f64; 4], b: &[f64; 4]) -> f64 {
        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        self.kernel_variance * (-d2 / (2.0 * self.kernel_lengthscale * self.kernel_lengthscale)).exp()
    }
}

/// Observed (weight vector, value) pairs plus kernel hyperparameters.
#[derive(Debug, Clone)]
pub struct GpState {
    cfg: GpConfig,
    points: Vec<([f64; 4], f64)>,
}

impl GpState {
    pub fn new(cfg: GpConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            points: Vec::new(),
        })
    }

    pub fn config(&self) -> &GpConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[([f64; 4], f64)] {
        &self.points
    }

    /// Records one observation after checking finiteness.
    pub fn observe(&mut self, x: [f64; 4], y: f64) -> Result<()> {
        if x.iter().any(|v| !v.is_finite()) || !y.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "observation must be finite, got x={x:?}, y={y}"
            )));
        }
        self.points.push((x, y));
        Ok(())
    }

    /// Exact posterior (mean, stddev) at `x` given the observations under
    /// additive `noise_variance`. With no observations this is the prior:
    /// mean 0, stddev `sqrt(kernel_variance)`.
    pub fn posterior(&self, x: &[f64; 4]) -> Result<(f64, f64)> {
        Ok(self.factorize()?.posterior(x))
    }

    /// Upper confidence bound `mean + sqrt(beta) * stddev`.
    pub fn ucb_score(&self, x: &[f64; 4], beta: f64) -> Result<f64> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidConfig(format!("beta must be >= 0, got {beta}")));
        }
        let (mean, stddev) = self.posterior(x)?;
        Ok(mean + beta.sqrt() * stddev)
    }

    /// Factors the kernel matrix once so many query points can share it.
    pub fn factorize(&self) -> Result<GpPosterior<'_>> {
        let n = self.points.len();
        if n == 0 {
            return Ok(GpPosterior {
                gp: self,
                chol: Vec::new(),
                weights: Vec::new(),
            });
        }
        let diag = self.cfg.noise_variance + self.cfg.jitter;
        let mut k = vec![vec![0.0; n]; n];
        for (i, row) in k.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.cfg.kernel(&self.points[i].0, &self.points[j].0);
                if i == j {
                    *cell += diag;
                }
            }
        }
        let chol = cholesky(&k).ok_or(Error::SingularKernel)?;
        let y: Vec<f64> = self.points.iter().map(|(_, y)| *y).collect();
        let weights = cholesky_solve(&chol, &y);
        Ok(GpPosterior {
            gp: self,
            chol,
            weights,
        })
    }
}

/// One factorization of a [`GpState`], reusable across query points.
pub struct GpPosterior<'a> {
    gp: &'a GpState,
    chol: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl GpPosterior<'_> {
    pub fn posterior(&self, x: &[f64; 4]) -> (f64, f64) {
        let cfg = &self.gp.cfg;
        let n = self.gp.points.len();
        if n == 0 {
            return (0.0, cfg.kernel_variance.sqrt());
        }
        let k_star: Vec<f64> = self
            .gp
            .points
            .iter()
            .map(|(xi, _)| cfg.kernel(xi, x))
            .collect();
        let mean: f64 = k_star.iter().zip(&self.weights).map(|(k, w)| k * w).sum();
        // var = k(x, x) - || L^-1 k_star ||^2
        let v = forward_substitute(&self.chol, &k_star);
        let var = cfg.kernel(x, x) - v.iter().map(|t| t * t).sum::<f64>();
        (mean, var.max(0.0).sqrt())
    }

    pub fn ucb(&self, x: &[f64; 4], beta: f64) -> f64 {
        let (mean, stddev) = self.posterior(x);
        mean + beta.sqrt() * stddev
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix;
/// `None` when the matrix is not numerically positive definite.
fn cholesky(k: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = k.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = k[i][j];
            for (a, b) in l[i][..j].iter().zip(&l[j][..j]) {
                sum -= a * b;
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

fn forward_substitute(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for j in 0..i {
            sum -= l[i][j] * x[j];
        }
        x[i] = sum / l[i][i];
    }
    x
}

fn back_substitute(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = b[i];
        for j in i + 1..n {
            sum -= l[j][i] * x[j];
        }
        x[i] = sum / l[i][i];
    }
    x
}

/// Solves `K x = b` given the Cholesky factor `L` of `K`.
fn cholesky_solve(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    back_substitute(l, &forward_substitute(l, b))
}

/// Finite candidate set: the Cartesian product of four per-weight value
/// lists. Axes are sorted and deduplicated so enumeration order equals
/// lexicographic order of the vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateGrid {
    axes: [Vec<f64>; 4],
}

impl CandidateGrid {
    pub fn new(mut axes: [Vec<f64>; 4]) -> Result<Self> {
        for (i, axis) in axes.iter_mut().enumerate() {
            if axis.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "candidate grid axis {} is empty",
                    i + 1
                )));
            }
            if axis.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "candidate grid axis {} must hold finite values >= 0",
                    i + 1
                )));
            }
            axis.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
            axis.dedup();
        }
        Ok(Self { axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decodes index `i` into a grid point; index order is lexicographic.
    pub fn point(&self, mut i: usize) -> [f64; 4] {
        let mut out = [0.0; 4];
        for d in (0..4).rev() {
            let len = self.axes[d].len();
            out[d] = self.axes[d][i % len];
            i /= len;
        }
        out
    }

    pub fn points(&self) -> Vec<[f64; 4]> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// Grid point with the maximal UCB score; earlier (lexicographically
/// smaller) points win ties. Scoring fans out over the candidate set.
pub fn propose_next(gp: &GpState, grid: &CandidateGrid, beta: f64) -> Result<[f64; 4]> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidConfig(format!("beta must be >= 0, got {beta}")));
    }
    let factored = gp.factorize()?;
    let scores = par_map((0..grid.len()).collect::<Vec<_>>(), |i| {
        factored.ucb(&grid.point(i), beta)
    });
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(grid.point(best))
}

/// One round of the adaptive loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptRound {
    pub round: usize,
    pub phi: [f64; 4],
    pub value: f64,
    pub incumbent_phi: [f64; 4],
    pub incumbent_value: f64,
}

/// Propose/evaluate/observe loop against an arbitrary objective. The
/// incumbent tracks the best observed value and never decreases.
pub fn optimize_on_grid<F>(
    gp: &mut GpState,
    grid: &CandidateGrid,
    beta: f64,
    rounds: usize,
    mut objective: F,
) -> Result<Vec<AdaptRound>>
where
    F: FnMut(&[f64; 4]) -> Result<f64>,
{
    if rounds < 1 {
        return Err(Error::InvalidConfig("rounds must be >= 1".into()));
    }
    let mut history = Vec::with_capacity(rounds);
    let mut incumbent: Option<([f64; 4], f64)> = None;
    for round in 0..rounds {
        let phi = propose_next(gp, grid, beta)?;
        let value = objective(&phi)?;
        gp.observe(phi, value)?;
        let better = match incumbent {
            Some((_, best)) => value > best,
            None => true,
        };
        if better {
            incumbent = Some((phi, value));
        }
        let (inc_phi, inc_value) = incumbent.expect("set on first round");
        history.push(AdaptRound {
            round,
            phi,
            value,
            incumbent_phi: inc_phi,
            incumbent_value: inc_value,
        });
    }
    Ok(history)
}

/// Adaptive bias tuning: each round proposes a weight vector, trains a fresh
/// agent with it for `episodes_per_round` episodes, and feeds back the mean
/// return over the final 20% of those episodes. Per-round seeds are drawn
/// from `rng`, so the whole loop replays from one seed.
#[allow(clippy::too_many_arguments)]
pub fn adapt_loop<E: MarkovEnv>(
    env: &mut E,
    base_cfg: &LearningConfig,
    gp: &mut GpState,
    grid: &CandidateGrid,
    beta: f64,
    rounds: usize,
    episodes_per_round: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<AdaptRound>> {
    base_cfg.validate()?;
    if episodes_per_round < 1 {
        return Err(Error::InvalidConfig("episodes_per_round must be >= 1".into()));
    }
    let mut seeds = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        seeds.push(rng.next_u64());
    }
    let mut round_index = 0;
    optimize_on_grid(gp, grid, beta, rounds, |phi| {
        let mut cfg = base_cfg.clone();
        cfg.episodes = episodes_per_round;
        cfg.seed = seeds[round_index];
        round_index += 1;
        let profile = BiasProfile::new("adaptive", *phi, [0.0; 4])?;
        let mut agent = SqlAgent::new(profile, cfg.clone(), &*env)?;
        let mut agent_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let records = agent.train(&mut *env, &mut agent_rng)?;
        Ok(final_fraction_mean(&records, 0.2))
    })
}

//! Exact tabular MDP description and value-iteration oracle.

use crate::error::{Error, Result};
use crate::qtable::argmax_lowest_index;

const MAX_SWEEPS: usize = 1_000_000;

/// Explicit transition/reward model. Each `(state, action)` row is a sparse
/// list of `(next_state, probability, reward)` entries; terminal states have
/// value 0 and no outgoing rows.
#[derive(Debug, Clone)]
pub struct TabularModel {
    num_states: usize,
    num_actions: usize,
    rows: Vec<Vec<(usize, f64, f64)>>,
    terminal: Vec<bool>,
}

impl TabularModel {
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        Self {
            num_states,
            num_actions,
            rows: vec![Vec::new(); num_states * num_actions],
            terminal: vec![false; num_states],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn add_transition(&mut self, s: usize, a: usize, next: usize, prob: f64, reward: f64) {
        self.rows[s * self.num_actions + a].push((next, prob, reward));
    }

    pub fn set_terminal(&mut self, s: usize) {
        self.terminal[s] = true;
    }

    pub fn is_terminal(&self, s: usize) -> bool {
        self.terminal[s]
    }

    pub fn transitions(&self, s: usize, a: usize) -> &[(usize, f64, f64)] {
        &self.rows[s * self.num_actions + a]
    }

    /// Checks that every non-terminal row is a probability distribution
    /// (sums to 1 within 1e-9) with finite rewards.
    pub fn validate(&self) -> Result<()> {
        for s in 0..self.num_states {
            if self.terminal[s] {
                continue;
            }
            for a in 0..self.num_actions {
                let row = self.transitions(s, a);
                if row.is_empty() {
                    return Err(Error::InvalidGeometry(format!(
                        "non-terminal state {s} has no transitions for action {a}"
                    )));
                }
                let total: f64 = row.iter().map(|&(_, p, _)| p).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidGeometry(format!(
                        "transition row ({s}, {a}) sums to {total}, expected 1"
                    )));
                }
                for &(next, p, r) in row {
                    if next >= self.num_states || p < 0.0 || !p.is_finite() || !r.is_finite() {
                        return Err(Error::InvalidGeometry(format!(
                            "bad transition entry ({s}, {a}) -> {next} with p={p}, r={r}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Expected one-step backup of action `a` in state `s` under values `v`.
    pub fn q_backup(&self, s: usize, a: usize, gamma: f64, v: &[f64]) -> f64 {
        self.transitions(s, a)
            .iter()
            .map(|&(next, p, r)| p * (r + gamma * v[next]))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct ValueIterationResult {
    pub values: Vec<f64>,
    pub policy: Vec<usize>,
    pub sweeps: usize,
    /// Sup-norm change per sweep, in order.
    pub residuals: Vec<f64>,
}

/// Iterates Bellman optimality backups until the sup-norm change drops below
/// `tol`, then extracts the greedy policy (lowest action index on ties).
/// Terminal states keep value 0.
pub fn value_iteration(model: &TabularModel, gamma: f64, tol: f64) -> Result<ValueIterationResult> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidConfig(format!(
            "gamma must be in [0, 1), got {gamma}"
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidConfig(format!("tol must be > 0, got {tol}")));
    }
    model.validate()?;

    let n = model.num_states();
    let mut values = vec![0.0; n];
    let mut residuals = Vec::new();
    for sweep in 1..=MAX_SWEEPS {
        let mut next = vec![0.0; n];
        let mut delta = 0.0_f64;
        for s in 0..n {
            if model.is_terminal(s) {
                continue;
            }
            let best = (0..model.num_actions())
                .map(|a| model.q_backup(s, a, gamma, &values))
                .fold(f64::NEG_INFINITY, f64::max);
            next[s] = best;
            delta = delta.max((best - values[s]).abs());
        }
        values = next;
        residuals.push(delta);
        if delta < tol {
            let policy = (0..n)
                .map(|s| {
                    let qs: Vec<f64> = (0..model.num_actions())
                        .map(|a| {
                            if model.is_terminal(s) {
                                0.0
                            } else {
                                model.q_backup(s, a, gamma, &values)
                            }
                        })
                        .collect();
                    argmax_lowest_index(&qs)
                })
                .collect();
            return Ok(ValueIterationResult {
                values,
                policy,
                sweeps: sweep,
                residuals,
            });
        }
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

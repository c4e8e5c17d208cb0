//! Pellet-collection gridworld with static hazard tiles.

use rand::RngCore;

use crate::env::{MarkovEnv, StepOutcome, TabularModel};
use crate::error::{Error, Result};

pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const LEFT: usize = 2;
pub const RIGHT: usize = 3;

const MAX_PELLETS: usize = 10;

/// 4-directional gridworld: entering a pellet cell pays `pellet_reward` once,
/// entering a ghost cell pays `-ghost_penalty` and ends the episode, and
/// collecting the last pellet ends the episode. Walls bump (the move is lost).
/// Ghosts are static tiles. The tabular state encodes (cell, remaining-pellet
/// bitmask), so the exact model stays small enough for the
/// dynamic-programming oracle.
#[derive(Debug, Clone)]
pub struct GridPacmanEnv {
    width: usize,
    height: usize,
    pellet_reward: f64,
    ghost_penalty: f64,
    ghosts: Vec<usize>,
    pellets: Vec<usize>,
    start_cell: usize,
    // episode state
    cell: usize,
    mask: u32,
    steps: usize,
}

impl GridPacmanEnv {
    pub fn new(
        width: usize,
        height: usize,
        pellet_reward: f64,
        ghost_penalty: f64,
        ghost_cells: &[(usize, usize)],
        pellet_cells: &[(usize, usize)],
        start: (usize, usize),
    ) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidGeometry(format!(
                "grid must be at least 2x2, got {width}x{height}"
            )));
        }
        if !pellet_reward.is_finite() || !ghost_penalty.is_finite() {
            return Err(Error::InvalidGeometry(
                "pellet_reward and ghost_penalty must be finite".into(),
            ));
        }
        let cell_of = |&(x, y): &(usize, usize)| -> Result<usize> {
            if x >= width || y >= height {
                return Err(Error::InvalidGeometry(format!(
                    "cell ({x}, {y}) outside {width}x{height} grid"
                )));
            }
            Ok(y * width + x)
        };
        let ghosts: Vec<usize> = ghost_cells.iter().map(cell_of).collect::<Result<_>>()?;
        let pellets: Vec<usize> = pellet_cells.iter().map(cell_of).collect::<Result<_>>()?;
        let start_cell = cell_of(&start)?;
        if pellets.is_empty() {
            return Err(Error::InvalidGeometry("at least one pellet cell required".into()));
        }
        if pellets.len() > MAX_PELLETS {
            return Err(Error::InvalidGeometry(format!(
                "at most {MAX_PELLETS} pellets supported, got {}",
                pellets.len()
            )));
        }
        let mut sorted = pellets.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != pellets.len() {
            return Err(Error::InvalidGeometry("duplicate pellet cells".into()));
        }
        if pellets.iter().any(|c| ghosts.contains(c)) {
            return Err(Error::InvalidGeometry("pellet cell coincides with ghost cell".into()));
        }
        if pellets.contains(&start_cell) {
            return Err(Error::InvalidGeometry("start cell must not hold a pellet".into()));
        }
        Ok(Self {
            width,
            height,
            pellet_reward,
            ghost_penalty,
            ghosts,
            pellets,
            start_cell,
            cell: start_cell,
            mask: 0,
            steps: 0,
        })
    }

    fn full_mask(&self) -> u32 {
        (1u32 << self.pellets.len()) - 1
    }

    fn encode(&self, cell: usize, mask: u32) -> usize {
        (cell << self.pellets.len()) | mask as usize
    }

    /// State id the environment starts every episode in.
    pub fn start_state(&self) -> usize {
        self.encode(self.start_cell, self.full_mask())
    }

    fn dest_cell(&self, cell: usize, action: usize) -> usize {
        let (x, y) = (cell % self.width, cell / self.width);
        let (nx, ny) = match action {
            UP => (x, (y + 1).min(self.height - 1)),
            DOWN => (x, y.saturating_sub(1)),
            LEFT => (x.saturating_sub(1), y),
            RIGHT => ((x + 1).min(self.width - 1), y),
            _ => unreachable!(),
        };
        ny * self.width + nx
    }

    fn pellet_bit(&self, cell: usize) -> Option<u32> {
        self.pellets.iter().position(|&c| c == cell).map(|i| 1u32 << i)
    }

    /// Exact model over (cell, mask) states for the oracle. Ghost cells and
    /// all-collected masks are terminal.
    pub fn model(&self) -> TabularModel {
        let num_states = (self.width * self.height) << self.pellets.len();
        let mut model = TabularModel::new(num_states, 4);
        for cell in 0..self.width * self.height {
            for mask in 0..=self.full_mask() {
                let s = self.encode(cell, mask);
                if self.ghosts.contains(&cell) || mask == 0 {
                    model.set_terminal(s);
                    continue;
                }
                for action in 0..4 {
                    let dest = self.dest_cell(cell, action);
                    let (next_mask, mut reward) = match self.pellet_bit(dest) {
                        Some(bit) if mask & bit != 0 => (mask & !bit, self.pellet_reward),
                        _ => (mask, 0.0),
                    };
                    if self.ghosts.contains(&dest) {
                        reward = -self.ghost_penalty;
                        model.add_transition(s, action, self.encode(dest, mask), 1.0, reward);
                    } else {
                        model.add_transition(s, action, self.encode(dest, next_mask), 1.0, reward);
                    }
                }
            }
        }
        model
    }
}

impl MarkovEnv for GridPacmanEnv {
    fn num_states(&self) -> usize {
        (self.width * self.height) << self.pellets.len()
    }

    fn num_actions(&self) -> usize {
        4
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> usize {
        self.cell = self.start_cell;
        self.mask = self.full_mask();
        self.steps = 0;
        self.start_state()
    }

    fn step(&mut self, action: usize, _rng: &mut dyn RngCore) -> Result<StepOutcome> {
        if action >= 4 {
            return Err(Error::ActionOutOfRange { index: action, limit: 4 });
        }
        self.steps += 1;
        // Degenerate start on a hazard tile: the first step ends the episode.
        if self.ghosts.contains(&self.cell) {
            return Ok(StepOutcome {
                next_state: self.encode(self.cell, self.mask),
                reward: -self.ghost_penalty,
                done: true,
            });
        }
        let dest = self.dest_cell(self.cell, action);
        self.cell = dest;
        if self.ghosts.contains(&dest) {
            return Ok(StepOutcome {
                next_state: self.encode(dest, self.mask),
                reward: -self.ghost_penalty,
                done: true,
            });
        }
        let mut reward = 0.0;
        if let Some(bit) = self.pellet_bit(dest) {
            if self.mask & bit != 0 {
                self.mask &= !bit;
                reward = self.pellet_reward;
            }
        }
        let done = self.mask == 0 || self.steps >= self.horizon();
        Ok(StepOutcome {
            next_state: self.encode(dest, self.mask),
            reward,
            done,
        })
    }

    fn horizon(&self) -> usize {
        8 * self.width * self.height * self.pellets.len()
    }
}

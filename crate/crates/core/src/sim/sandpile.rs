//! Two-dimensional abelian sandpile with open boundaries.
//!
//! Seed protocol: a single `ChaCha8Rng` seeded with `seed_from_u64(seed)`.
//! Each drop draws one `gen_range(0..width*height)` and adds the grain at
//! that row-major cell index. Nothing else consumes randomness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AvalancheRecord, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Grains pushed off the edge leave the system.
    #[default]
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandpileConfig {
    pub width: usize,
    pub height: usize,
    #[serde(default = "default_threshold")]
    pub threshold: u32,
    pub drops: usize,
    pub seed: u64,
    #[serde(default)]
    pub boundary: Boundary,
}

fn default_threshold() -> u32 {
    4
}

impl SandpileConfig {
    pub fn new(width: usize, height: usize, drops: usize, seed: u64) -> Self {
        Self { width, height, threshold: default_threshold(), drops, seed, boundary: Boundary::Open }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.width < 2 || self.height < 2 {
            return Err(SimError::InvalidConfig("grid must be at least 2×2".into()));
        }
        // A toppling hands one grain to each of up to 4 neighbours; below 4
        // it would create grains and relaxation need not terminate.
        if self.threshold < 4 {
            return Err(SimError::InvalidConfig("threshold must be at least 4".into()));
        }
        Ok(())
    }
}

/// Grid state plus grain bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sandpile {
    width: usize,
    height: usize,
    threshold: u32,
    heights: Vec<u32>,
    added: u64,
    lost: u64,
    queue: Vec<usize>,
}

impl Sandpile {
    pub fn new(width: usize, height: usize, threshold: u32) -> Self {
        assert!(threshold >= 4);
        Self { width, height, threshold, heights: vec![0; width * height], added: 0, lost: 0, queue: Vec::new() }
    }

    /// Starts from the given heights (row-major). Preloaded grains count as
    /// added so that conservation holds from the start.
    pub fn from_heights(width: usize, height: usize, threshold: u32, heights: Vec<u32>) -> Self {
        assert_eq!(heights.len(), width * height);
        assert!(threshold >= 4);
        let added = heights.iter().map(|&h| h as u64).sum();
        Self { width, height, threshold, heights, added, lost: 0, queue: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    pub fn grains_added(&self) -> u64 {
        self.added
    }

    pub fn grains_lost(&self) -> u64 {
        self.lost
    }

    pub fn grains_on_grid(&self) -> u64 {
        self.heights.iter().map(|&h| h as u64).sum()
    }

    pub fn is_unstable(&self, cell: usize) -> bool {
        self.heights[cell] >= self.threshold
    }

    pub fn unstable_cells(&self) -> Vec<usize> {
        (0..self.heights.len()).filter(|&c| self.is_unstable(c)).collect()
    }

    /// Von Neumann neighbours inside the grid.
    pub fn neighbours(&self, cell: usize) -> impl Iterator<Item = usize> {
        let (nbrs, count) = self.neighbour_array(cell);
        nbrs.into_iter().take(count)
    }

    fn neighbour_array(&self, cell: usize) -> ([usize; 4], usize) {
        let (w, h) = (self.width, self.height);
        let (x, y) = (cell % w, cell / w);
        let mut out = [0; 4];
        let mut k = 0;
        for (ok, n) in
            [(x > 0, cell.wrapping_sub(1)), (x + 1 < w, cell + 1), (y > 0, cell.wrapping_sub(w)), (y + 1 < h, cell + w)]
        {
            if ok {
                out[k] = n;
                k += 1;
            }
        }
        (out, k)
    }

    /// Topples one unstable cell once. Returns false if the cell was stable.
    pub fn topple(&mut self, cell: usize) -> bool {
        if !self.is_unstable(cell) {
            return false;
        }
        self.heights[cell] -= self.threshold;
        let (nbrs, count) = self.neighbour_array(cell);
        for &n in &nbrs[..count] {
            self.heights[n] += 1;
        }
        // Shares beyond the in-grid neighbours leave the system.
        self.lost += (self.threshold - count as u32) as u64;
        true
    }

    /// Adds a grain and relaxes in parallel rounds. Size counts topplings;
    /// duration counts rounds with at least one toppling.
    pub fn drop_grain(&mut self, cell: usize, step: usize) -> AvalancheRecord {
        self.heights[cell] += 1;
        self.added += 1;
        let mut size = 0u64;
        let mut duration = 0u64;
        self.queue.clear();
        if self.is_unstable(cell) {
            self.queue.push(cell);
        }
        let mut next = Vec::new();
        while !self.queue.is_empty() {
            duration += 1;
            next.clear();
            let current = std::mem::take(&mut self.queue);
            for &c in &current {
                while self.topple(c) {
                    size += 1;
                    let (nbrs, count) = self.neighbour_array(c);
                    next.extend_from_slice(&nbrs[..count]);
                }
            }
            next.sort_unstable();
            next.dedup();
            next.retain(|&c| self.heights[c] >= self.threshold);
            self.queue = std::mem::take(&mut next);
            next = current;
        }
        AvalancheRecord { start_step: step, size, duration }
    }
}

/// Drives a fresh sandpile for `config.drops` grains.
pub fn run_sandpile(config: &SandpileConfig) -> Result<Vec<AvalancheRecord>, SimError> {
    run_sandpile_with_state(config).map(|(records, _)| records)
}

/// Like [`run_sandpile`] but also returns the final pile.
pub fn run_sandpile_with_state(config: &SandpileConfig) -> Result<(Vec<AvalancheRecord>, Sandpile), SimError> {
    config.validate()?;
    let mut pile = Sandpile::new(config.width, config.height, config.threshold);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let cells = config.width * config.height;
    let records = (0..config.drops)
        .map(|step| {
            let cell = rng.gen_range(0..cells);
            pile.drop_grain(cell, step)
        })
        .collect();
    Ok((records, pile))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_drop_on_empty_grid() {
        let mut p = Sandpile::new(3, 3, 4);
        let r = p.drop_grain(4, 0);
        assert_eq!(r.size, 0);
        assert_eq!(r.duration, 0);
    }

    #[test]
    fn one_topple_feeds_four_neighbours() {
        let mut h = vec![0; 9];
        h[4] = 3;
        let mut p = Sandpile::from_heights(3, 3, 4, h);
        let r = p.drop_grain(4, 0);
        assert_eq!(r.size, 1);
        assert_eq!(r.duration, 1);
        assert_eq!(p.heights(), &[0, 1, 0, 1, 0, 1, 0, 1, 0]);
        assert_eq!(p.grains_lost(), 0);
    }

    #[test]
    fn corner_topple_loses_two() {
        let mut p = Sandpile::from_heights(2, 2, 4, vec![3, 0, 0, 0]);
        p.drop_grain(0, 0);
        assert_eq!(p.heights(), &[0, 1, 1, 0]);
        assert_eq!(p.grains_lost(), 2);
        assert_eq!(p.grains_added(), p.grains_on_grid() + p.grains_lost());
    }

    #[test]
    fn invalid_configs() {
        assert!(run_sandpile(&SandpileConfig::new(1, 5, 10, 0)).is_err());
        let mut c = SandpileConfig::new(5, 5, 10, 0);
        c.threshold = 3;
        assert!(run_sandpile(&c).is_err());
    }

    #[test]
    fn deterministic() {
        let c = SandpileConfig::new(8, 8, 2000, 42);
        assert_eq!(run_sandpile(&c).unwrap(), run_sandpile(&c).unwrap());
        let other = SandpileConfig { seed: 43, ..c.clone() };
        assert_ne!(run_sandpile(&c).unwrap(), run_sandpile(&other).unwrap());
    }

    #[test]
    fn stable_after_every_drop() {
        let c = SandpileConfig::new(6, 4, 3000, 7);
        let (_, pile) = run_sandpile_with_state(&c).unwrap();
        assert!(pile.unstable_cells().is_empty());
        assert_eq!(pile.grains_added(), 3000);
        assert_eq!(pile.grains_added(), pile.grains_on_grid() + pile.grains_lost());
    }
}

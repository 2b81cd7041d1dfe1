//! Threshold adoption on a network.
//!
//! Seed protocol: one `ChaCha8Rng::seed_from_u64(seed)`. Graph generation
//! consumes it first. Then each step draws `u = gen::<f64>()`; if
//! `u < innovation_rate` and non-adopters remain, one more draw
//! `gen_range(0..k)` picks the innovator among the `k` non-adopters in
//! ascending node order. Cascades are deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::{self, Graph, Topology};
use super::{AvalancheRecord, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdoptionConfig {
    pub topology: Topology,
    pub n_nodes: usize,
    /// Fraction of a node's neighbours that must have adopted before it
    /// follows. At least one adopted neighbour is always required.
    pub threshold_fraction: f64,
    /// Per-step probability of one spontaneous adoption.
    pub innovation_rate: f64,
    pub steps: usize,
    pub seed: u64,
}

impl AdoptionConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.threshold_fraction) {
            return Err(SimError::InvalidConfig(format!(
                "threshold_fraction {} outside [0, 1]",
                self.threshold_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.innovation_rate) {
            return Err(SimError::InvalidConfig(format!("innovation_rate {} outside [0, 1]", self.innovation_rate)));
        }
        if self.steps == 0 {
            return Err(SimError::InvalidConfig("steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdoptionTrace {
    pub n_nodes: usize,
    /// Adopters after each step.
    pub cumulative: Vec<usize>,
    /// Adoptions in each step, innovation included.
    pub new_adoptions: Vec<usize>,
    /// Adoptions in each step caused by neighbours.
    pub cascade_adoptions: Vec<usize>,
    /// Maximal runs of steps with cascade adoptions. Size sums the cascade
    /// adoptions over the run; duration is its length in steps.
    pub avalanches: Vec<AvalancheRecord>,
}

impl AdoptionTrace {
    /// `(step, adopted fraction)` with steps numbered from 1.
    pub fn adoption_curve(&self) -> Vec<(f64, f64)> {
        self.cumulative.iter().enumerate().map(|(i, &c)| ((i + 1) as f64, c as f64 / self.n_nodes as f64)).collect()
    }
}

pub fn run_adoption(config: &AdoptionConfig) -> Result<AdoptionTrace, SimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let graph = graph::generate(&config.topology, config.n_nodes, &mut rng)?;
    Ok(simulate(&graph, config, &mut rng))
}

fn simulate(graph: &Graph, config: &AdoptionConfig, rng: &mut ChaCha8Rng) -> AdoptionTrace {
    let n = graph.len();
    let mut adopted = vec![false; n];
    let mut total = 0usize;
    let mut trace = AdoptionTrace {
        n_nodes: n,
        cumulative: Vec::with_capacity(config.steps),
        new_adoptions: Vec::with_capacity(config.steps),
        cascade_adoptions: Vec::with_capacity(config.steps),
        avalanches: Vec::new(),
    };
    let mut frontier = Vec::new();

    for _ in 0..config.steps {
        frontier.clear();
        let u: f64 = rng.gen();
        let mut innovated = 0;
        if u < config.innovation_rate && total < n {
            let k = rng.gen_range(0..n - total);
            let node = (0..n).filter(|&v| !adopted[v]).nth(k).expect("k < non-adopters");
            adopted[node] = true;
            total += 1;
            innovated = 1;
            frontier.push(node);
        }
        let cascaded = cascade(graph, &mut adopted, &mut frontier, config.threshold_fraction);
        total += cascaded;
        trace.cumulative.push(total);
        trace.new_adoptions.push(innovated + cascaded);
        trace.cascade_adoptions.push(cascaded);
    }
    trace.avalanches = runs(&trace.cascade_adoptions);
    trace
}

/// Synchronous rounds: every non-adopter next to a fresh adopter is checked
/// against the adoption state at the start of the round.
fn cascade(graph: &Graph, adopted: &mut [bool], frontier: &mut Vec<usize>, threshold: f64) -> usize {
    let mut count = 0;
    let mut candidates = Vec::new();
    while !frontier.is_empty() {
        candidates.clear();
        candidates.extend(frontier.iter().flat_map(|&v| graph.neighbors(v)).copied().filter(|&u| !adopted[u]));
        candidates.sort_unstable();
        candidates.dedup();
        let joined: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&u| {
                let nbrs = graph.neighbors(u);
                let on = nbrs.iter().filter(|&&w| adopted[w]).count();
                on >= 1 && on as f64 >= threshold * nbrs.len() as f64
            })
            .collect();
        for &u in &joined {
            adopted[u] = true;
        }
        count += joined.len();
        *frontier = joined;
    }
    count
}

fn runs(per_step: &[usize]) -> Vec<AvalancheRecord> {
    let mut out = Vec::new();
    let mut current: Option<AvalancheRecord> = None;
    for (step, &c) in per_step.iter().enumerate() {
        match (&mut current, c) {
            (Some(rec), c) if c > 0 => {
                rec.size += c as u64;
                rec.duration += 1;
            }
            (None, c) if c > 0 => {
                current = Some(AvalancheRecord { start_step: step, size: c as u64, duration: 1 });
            }
            (_, _) => {
                if let Some(rec) = current.take() {
                    out.push(rec);
                }
            }
        }
    }
    out.extend(current);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(topology: Topology, threshold: f64) -> AdoptionConfig {
        AdoptionConfig {
            topology,
            n_nodes: 100,
            threshold_fraction: threshold,
            innovation_rate: 0.05,
            steps: 300,
            seed: 11,
        }
    }

    #[test]
    fn zero_threshold_floods_on_first_innovation() {
        let t = run_adoption(&config(Topology::Grid, 0.0)).unwrap();
        let first = t.new_adoptions.iter().position(|&a| a > 0).unwrap();
        assert_eq!(t.cumulative[first], 100);
        assert_eq!(t.avalanches.len(), 1);
        assert_eq!(t.avalanches[0].size, 99);
        assert_eq!(t.avalanches[0].start_step, first);
    }

    #[test]
    fn full_threshold_on_ring_only_fills_gaps() {
        // On a ring every node needs both neighbours, so cascades only close
        // single-node gaps.
        let cfg = config(Topology::SmallWorld { neighbors: 2, rewire: 0.0 }, 1.0);
        let t = run_adoption(&cfg).unwrap();
        assert!(t.cascade_adoptions.iter().all(|&c| c <= 1));
    }

    #[test]
    fn cumulative_is_monotone_and_consistent() {
        let cfg = config(Topology::SmallWorld { neighbors: 6, rewire: 0.1 }, 0.25);
        let t = run_adoption(&cfg).unwrap();
        assert_eq!(t.cumulative.len(), 300);
        let mut running = 0;
        for (i, &a) in t.new_adoptions.iter().enumerate() {
            running += a;
            assert_eq!(t.cumulative[i], running);
            assert!(t.cascade_adoptions[i] <= a);
        }
        let cascade_total: usize = t.cascade_adoptions.iter().sum();
        assert_eq!(t.avalanches.iter().map(|r| r.size as usize).sum::<usize>(), cascade_total);
        assert!(*t.cumulative.last().unwrap() <= 100);
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = config(Topology::ScaleFree { attachment: 2 }, 0.3);
        assert_eq!(run_adoption(&cfg).unwrap(), run_adoption(&cfg).unwrap());
    }

    #[test]
    fn run_segmentation() {
        let r = runs(&[0, 2, 3, 0, 0, 1, 0, 4]);
        assert_eq!(
            r,
            vec![
                AvalancheRecord { start_step: 1, size: 5, duration: 2 },
                AvalancheRecord { start_step: 5, size: 1, duration: 1 },
                AvalancheRecord { start_step: 7, size: 4, duration: 1 },
            ]
        );
        assert!(runs(&[0, 0]).is_empty());
    }

    #[test]
    fn rejects_bad_rates() {
        let mut cfg = config(Topology::Grid, 0.5);
        cfg.innovation_rate = 1.5;
        assert!(run_adoption(&cfg).is_err());
        cfg.innovation_rate = 0.1;
        cfg.threshold_fraction = -0.1;
        assert!(run_adoption(&cfg).is_err());
    }
}

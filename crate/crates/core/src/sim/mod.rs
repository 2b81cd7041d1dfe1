//! Self-organized criticality simulators: an abelian sandpile and a
//! threshold-adoption cascade on networks.

pub mod adoption;
pub mod graph;
pub mod sandpile;

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fit::PointSet;

pub use adoption::{run_adoption, AdoptionConfig, AdoptionTrace};
pub use graph::{Graph, Topology};
pub use sandpile::{run_sandpile, run_sandpile_with_state, Boundary, Sandpile, SandpileConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("generated graph is disconnected")]
    DisconnectedGraph,
    #[error("no avalanches of positive size")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvalancheRecord {
    pub start_step: usize,
    pub size: u64,
    pub duration: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binning {
    #[default]
    Linear,
    /// Sizes in `[2^k, 2^(k+1))` share a bin. The count is divided by the
    /// bin width and placed at the geometric mean of the bin's smallest and
    /// largest size.
    Log2,
}

/// One log2 bin: sizes `lo..=hi` with `hi = 2·lo − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Log2Bin {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    /// Geometric mean of `lo` and `hi`.
    pub x: f64,
    /// `count / (hi − lo + 1)`.
    pub density: f64,
}

/// Non-empty log2 bins of the positive avalanche sizes, smallest first.
pub fn log2_bins(records: &[AvalancheRecord]) -> Result<Vec<Log2Bin>, SimError> {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for r in records.iter().filter(|r| r.size > 0) {
        *counts.entry(63 - r.size.leading_zeros()).or_default() += 1;
    }
    if counts.is_empty() {
        return Err(SimError::EmptyInput);
    }
    Ok(counts
        .into_iter()
        .map(|(k, count)| {
            let lo = 1u64 << k;
            let hi = 2 * lo - 1;
            Log2Bin { lo, hi, count, x: (lo as f64 * hi as f64).sqrt(), density: count as f64 / lo as f64 }
        })
        .collect())
}

/// Histogram of positive avalanche sizes. Empty bins are left out.
pub fn avalanche_distribution(records: &[AvalancheRecord], binning: Binning) -> Result<PointSet, SimError> {
    let points: Vec<(f64, f64)> = match binning {
        Binning::Linear => {
            let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
            for r in records.iter().filter(|r| r.size > 0) {
                *counts.entry(r.size).or_default() += 1;
            }
            counts.into_iter().map(|(s, c)| (s as f64, c as f64)).collect()
        }
        Binning::Log2 => log2_bins(records)?.into_iter().map(|b| (b.x, b.density)).collect(),
    };
    if points.is_empty() {
        return Err(SimError::EmptyInput);
    }
    Ok(PointSet::new(points).expect("histogram values are finite"))
}

/// Minimum avalanches per bin for [`power_law_body`].
pub const DEFAULT_BODY_MIN_COUNT: u64 = 10;

/// Log2 histogram restricted to bins holding at least `min_count`
/// avalanches, which trims the sparsely sampled finite-size tail.
pub fn power_law_body(records: &[AvalancheRecord], min_count: u64) -> Result<PointSet, SimError> {
    let points: Vec<(f64, f64)> =
        log2_bins(records)?.into_iter().filter(|b| b.count >= min_count).map(|b| (b.x, b.density)).collect();
    if points.is_empty() {
        return Err(SimError::EmptyInput);
    }
    Ok(PointSet::new(points).expect("histogram values are finite"))
}

/// `start_step,size,duration` rows.
pub fn write_avalanches_csv<W: Write>(records: &[AvalancheRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["start_step", "size", "duration"])?;
    for r in records {
        w.serialize((r.start_step, r.size, r.duration))?;
    }
    w.flush()?;
    Ok(())
}

/// `step,cumulative_adopters,new_adoptions,cascade_adoptions`, steps from 1.
pub fn write_trace_csv<W: Write>(trace: &AdoptionTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "cumulative_adopters", "new_adoptions", "cascade_adoptions"])?;
    for (i, ((c, n), k)) in trace.cumulative.iter().zip(&trace.new_adoptions).zip(&trace.cascade_adoptions).enumerate()
    {
        w.serialize((i + 1, c, n, k))?;
    }
    w.flush()?;
    Ok(())
}

/// `x,y` rows of a histogram.
pub fn write_histogram_csv<W: Write>(hist: &PointSet, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"])?;
    for &(x, y) in hist.points() {
        w.serialize((x, y))?;
    }
    w.flush()?;
    Ok(())
}

//! Rank-frequency preparation, Pearson correlation, and batch fit summaries.

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::MetaphorProfile;
use crate::fit::{fit_power_law, FitError, PointSet, PowerLawFit, PowerLawMethod};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooFewObservations(usize),
    #[error("variable {0:?} has zero variance")]
    ZeroVariance(String),
    #[error("profile {0:?} has no constructions")]
    EmptyProfile(String),
}

/// `(rank, frequency)` with rank 1 for the most frequent construction.
/// Ranks follow the profile's own construction order, which already sorts
/// by descending frequency with deterministic tie-breaks.
pub fn rank_frequency(profile: &MetaphorProfile) -> Result<PointSet, StatsError> {
    if profile.constructions.is_empty() {
        return Err(StatsError::EmptyProfile(profile.lemma.clone()));
    }
    let points = profile.constructions.iter().enumerate().map(|(i, c)| ((i + 1) as f64, c.frequency as f64)).collect();
    Ok(PointSet::new(points).expect("ranks and counts are finite"))
}

/// Sample Pearson correlation, computed from centered sums.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    pearson_named(xs, ys, "x", "y")
}

fn pearson_named(xs: &[f64], ys: &[f64], x_name: &str, y_name: &str) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewObservations(xs.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if xs.iter().all(|x| *x == xs[0]) || sxx == 0.0 {
        return Err(StatsError::ZeroVariance(x_name.to_string()));
    }
    if ys.iter().all(|y| *y == ys[0]) || syy == 0.0 {
        return Err(StatsError::ZeroVariance(y_name.to_string()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// One metaphor's exponent, first-occurrence year and instance count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaphorRow {
    pub lemma: String,
    pub b: f64,
    pub foy: i32,
    pub frequency: u64,
}

impl MetaphorRow {
    pub fn from_profile(profile: &MetaphorProfile, fit: &PowerLawFit) -> Option<Self> {
        Some(Self {
            lemma: profile.lemma.clone(),
            b: fit.exponent,
            foy: profile.first_occurrence_year()?,
            frequency: profile.total_instances as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    pub r: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.variables.iter().position(|v| v == a)?;
        let j = self.variables.iter().position(|v| v == b)?;
        Some(self.r[i][j])
    }

    /// Square CSV with a leading label column.
    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec![String::new()];
        header.extend(self.variables.iter().cloned());
        wtr.write_record(&header)?;
        for (name, row) in self.variables.iter().zip(&self.r) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|v| format!("{v:.9}")));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Pairwise correlations of `(b, foy, frequency)`.
pub fn correlation_matrix(rows: &[MetaphorRow]) -> Result<CorrelationMatrix, StatsError> {
    if rows.len() < 2 {
        return Err(StatsError::TooFewObservations(rows.len()));
    }
    let names = ["b", "foy", "frequency"];
    let cols: [Vec<f64>; 3] = [
        rows.iter().map(|r| r.b).collect(),
        rows.iter().map(|r| r.foy as f64).collect(),
        rows.iter().map(|r| r.frequency as f64).collect(),
    ];
    let mut r = vec![vec![1.0; 3]; 3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let v = pearson_named(&cols[i], &cols[j], names[i], names[j])?;
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    Ok(CorrelationMatrix { variables: names.iter().map(|s| s.to_string()).collect(), r })
}

/// Reads `lemma,b,foy,frequency` rows.
pub fn read_metaphor_rows<R: io::Read>(r: R) -> csv::Result<Vec<MetaphorRow>> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r).deserialize().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaFit {
    pub lemma: String,
    pub fit: Option<PowerLawFit>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R2Aggregate {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub fits: Vec<LemmaFit>,
    /// `None` when no profile could be fitted.
    pub aggregate: Option<R2Aggregate>,
}

/// Fits each profile's rank-frequency curve. Failures are recorded per
/// lemma and left out of the R² aggregate.
pub fn batch_fit_summary(profiles: &[MetaphorProfile]) -> BatchSummary {
    let fits: Vec<LemmaFit> = profiles
        .iter()
        .map(|p| {
            let result = rank_frequency(p)
                .map_err(|e| e.to_string())
                .and_then(|pts| fit_power_law(&pts, PowerLawMethod::Nls).map_err(|e: FitError| e.to_string()));
            match result {
                Ok(fit) => LemmaFit { lemma: p.lemma.clone(), fit: Some(fit), error: None },
                Err(e) => LemmaFit { lemma: p.lemma.clone(), fit: None, error: Some(e) },
            }
        })
        .collect();
    let r2: Vec<f64> = fits.iter().filter_map(|f| f.fit.map(|f| f.quality.r_squared)).collect();
    let aggregate = (!r2.is_empty()).then(|| R2Aggregate {
        count: r2.len(),
        mean: r2.iter().sum::<f64>() / r2.len() as f64,
        min: r2.iter().copied().fold(f64::INFINITY, f64::min),
        max: r2.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    });
    BatchSummary { fits, aggregate }
}

//! Least-squares fitting of the power law `y = a·x^(−b)`, the
//! Menzerath-Altmann law `y = A·x^b·e^(−c·x)` (full and truncated), and the
//! logistic S-curve `y = L / (1 + e^(−k·(x − x0)))`.
//!
//! All fits minimize squared error on the raw scale and report R² about the
//! mean of y on the raw scale. Log-log OLS is used as an initializer and is
//! also available as a fitting method for the power law.

mod lm;
mod logistic;
mod power;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use logistic::fit_logistic;
pub use power::{fit_ma_law, fit_power_law, loglog_line, loglog_ols, LogLogLine};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("x must be positive for this model (found {0})")]
    NonPositiveX(f64),
    #[error("log-log fitting needs positive y (found {0})")]
    NonPositiveY(f64),
    #[error("logistic fitting needs nonnegative y (found {0})")]
    NegativeY(f64),
    #[error("all x values are equal; the exponent is unidentifiable")]
    DegenerateAbscissa,
    #[error("non-finite coordinate in point set")]
    NonFinite,
    #[error("no abscissae to sample")]
    EmptyAbscissae,
    #[error("fit did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
}

/// A set of `(x, y)` observations with finite coordinates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<(f64, f64)>,
}

impl PointSet {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, FitError> {
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(FitError::NonFinite);
        }
        Ok(Self { points })
    }

    pub fn from_xy(xs: &[f64], ys: &[f64]) -> Result<Self, FitError> {
        Self::new(xs.iter().copied().zip(ys.iter().copied()).collect())
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub(crate) fn require_len(&self, needed: usize) -> Result<(), FitError> {
        if self.len() < needed {
            return Err(FitError::TooFewPoints { needed, got: self.len() });
        }
        Ok(())
    }

    pub(crate) fn require_positive_x(&self) -> Result<(), FitError> {
        match self.points.iter().find(|(x, _)| *x <= 0.0) {
            Some((x, _)) => Err(FitError::NonPositiveX(*x)),
            None => Ok(()),
        }
    }

    pub(crate) fn require_distinct_x(&self) -> Result<(), FitError> {
        let x0 = self.points[0].0;
        if self.points.iter().all(|(x, _)| *x == x0) {
            return Err(FitError::DegenerateAbscissa);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitQuality {
    pub r_squared: f64,
    pub sse: f64,
    pub n: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Total sum of squares about the mean. Exactly zero when all y are equal.
pub fn total_sum_of_squares(ys: &[f64]) -> f64 {
    if ys.is_empty() || ys.iter().all(|y| *y == ys[0]) {
        return 0.0;
    }
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    ys.iter().map(|y| (y - mean).powi(2)).sum()
}

/// `1 − sse/sst`; 0 when the data have no variance.
pub fn r_squared(sse: f64, ys: &[f64]) -> f64 {
    let sst = total_sum_of_squares(ys);
    if sst == 0.0 {
        0.0
    } else {
        1.0 - sse / sst
    }
}

pub(crate) fn quality_of<M: CurveModel + ?Sized>(
    model: &M,
    data: &PointSet,
    iterations: usize,
    converged: bool,
) -> FitQuality {
    let sse = data.points().iter().map(|&(x, y)| (y - model.eval(x)).powi(2)).sum();
    FitQuality { r_squared: r_squared(sse, &data.ys()), sse, n: data.len(), iterations, converged }
}

/// Anything that can be evaluated pointwise.
pub trait CurveModel {
    fn eval(&self, x: f64) -> f64;

    /// Power-type models are undefined at x ≤ 0.
    fn requires_positive_x(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerLawMethod {
    /// Damped Gauss-Newton on the raw scale, started from the log-log fit.
    #[default]
    Nls,
    /// Ordinary least squares on `(ln x, ln y)`.
    Loglog,
}

/// `y = scale · x^(−exponent)`; the exponent is positive for decaying data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub scale: f64,
    pub exponent: f64,
    pub quality: FitQuality,
}

impl CurveModel for PowerLawFit {
    fn eval(&self, x: f64) -> f64 {
        self.scale * x.powf(-self.exponent)
    }
}

/// `y = scale · x^exponent · e^(−decay·x)`. The exponent follows the
/// Menzerath-Altmann orientation: negative for decaying data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaLawFit {
    pub scale: f64,
    pub exponent: f64,
    pub decay: f64,
    /// Decay pinned to zero.
    pub truncated: bool,
    pub quality: FitQuality,
}

impl CurveModel for MaLawFit {
    fn eval(&self, x: f64) -> f64 {
        self.scale * x.powf(self.exponent) * (-self.decay * x).exp()
    }
}

impl From<PowerLawFit> for MaLawFit {
    fn from(p: PowerLawFit) -> Self {
        MaLawFit { scale: p.scale, exponent: -p.exponent, decay: 0.0, truncated: true, quality: p.quality }
    }
}

/// `y = capacity / (1 + e^(−rate·(x − midpoint)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub capacity: f64,
    pub rate: f64,
    pub midpoint: f64,
    pub quality: FitQuality,
}

impl CurveModel for LogisticFit {
    fn eval(&self, x: f64) -> f64 {
        self.capacity * logistic::sigmoid(self.rate * (x - self.midpoint))
    }

    fn requires_positive_x(&self) -> bool {
        false
    }
}

/// Evaluates a model at each abscissa.
pub fn sample_curve<M: CurveModel + ?Sized>(model: &M, xs: &[f64]) -> Result<Vec<(f64, f64)>, FitError> {
    if xs.is_empty() {
        return Err(FitError::EmptyAbscissae);
    }
    if model.requires_positive_x() {
        if let Some(x) = xs.iter().find(|x| **x <= 0.0) {
            return Err(FitError::NonPositiveX(*x));
        }
    }
    Ok(xs.iter().map(|&x| (x, model.eval(x))).collect())
}

/// One of the supported fits, for code that handles them uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AnyFit {
    Power(PowerLawFit),
    Ma(MaLawFit),
    Logistic(LogisticFit),
}

impl AnyFit {
    pub fn quality(&self) -> &FitQuality {
        match self {
            AnyFit::Power(f) => &f.quality,
            AnyFit::Ma(f) => &f.quality,
            AnyFit::Logistic(f) => &f.quality,
        }
    }

    /// Fails with [`FitError::NoConvergence`] when the solver gave up.
    pub fn ensure_converged(&self) -> Result<&Self, FitError> {
        let q = self.quality();
        if q.converged {
            Ok(self)
        } else {
            Err(FitError::NoConvergence { iterations: q.iterations })
        }
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            AnyFit::Power(_) => "power",
            AnyFit::Ma(f) if f.truncated => "ma",
            AnyFit::Ma(_) => "ma_full",
            AnyFit::Logistic(_) => "logistic",
        }
    }

    pub fn report(&self) -> FitReport {
        let params: BTreeMap<String, f64> = match self {
            AnyFit::Power(f) => [("a", f.scale), ("b", f.exponent)].into_iter().map(|(k, v)| (k.into(), v)).collect(),
            AnyFit::Ma(f) => {
                [("A", f.scale), ("b", f.exponent), ("c", f.decay)].into_iter().map(|(k, v)| (k.into(), v)).collect()
            }
            AnyFit::Logistic(f) => {
                [("L", f.capacity), ("k", f.rate), ("x0", f.midpoint)].into_iter().map(|(k, v)| (k.into(), v)).collect()
            }
        };
        let q = self.quality();
        FitReport {
            model: self.model_name().to_string(),
            params,
            r_squared: q.r_squared,
            sse: q.sse,
            n: q.n,
            converged: q.converged,
            iterations: q.iterations,
        }
    }
}

impl CurveModel for AnyFit {
    fn eval(&self, x: f64) -> f64 {
        match self {
            AnyFit::Power(f) => f.eval(x),
            AnyFit::Ma(f) => f.eval(x),
            AnyFit::Logistic(f) => f.eval(x),
        }
    }

    fn requires_positive_x(&self) -> bool {
        !matches!(self, AnyFit::Logistic(_))
    }
}

/// Flat JSON shape of a fit: `{model, <params>, r_squared, sse, n, converged, iterations}`,
/// e.g. `{"model": "power", "a": 2.0, "b": 1.0, ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: String,
    #[serde(flatten)]
    pub params: BTreeMap<String, f64>,
    pub r_squared: f64,
    pub sse: f64,
    pub n: usize,
    pub converged: bool,
    pub iterations: usize,
}

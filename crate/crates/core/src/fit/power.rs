use serde::{Deserialize, Serialize};

use super::lm::{self, Problem, Settings};
use super::{quality_of, FitError, MaLawFit, PointSet, PowerLawFit, PowerLawMethod};

/// Straight line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogLine {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination in log space; 0 when all ln y agree.
    pub r_squared: f64,
}

/// OLS on `(ln x, ln y)`. Requires positive x and y and at least two
/// distinct x.
pub fn loglog_line(data: &PointSet) -> Result<LogLogLine, FitError> {
    data.require_positive_x()?;
    if let Some((_, y)) = data.points().iter().find(|(_, y)| *y <= 0.0) {
        return Err(FitError::NonPositiveY(*y));
    }
    data.require_distinct_x()?;
    let lx: Vec<f64> = data.points().iter().map(|(x, _)| x.ln()).collect();
    let ly: Vec<f64> = data.points().iter().map(|(_, y)| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 0.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LogLogLine { slope, intercept: my - slope * mx, r_squared })
}

/// `(scale, exponent)` of `y = scale·x^(−exponent)` from [`loglog_line`].
pub fn loglog_ols(data: &PointSet) -> Result<(f64, f64), FitError> {
    let line = loglog_line(data)?;
    Ok((line.intercept.exp(), -line.slope))
}

struct PowerProblem<'a> {
    data: &'a PointSet,
}

impl Problem for PowerProblem<'_> {
    fn n_params(&self) -> usize {
        2
    }
    fn n_residuals(&self) -> usize {
        self.data.len()
    }
    fn residuals(&self, p: &[f64], out: &mut [f64]) -> bool {
        for (r, &(x, y)) in out.iter_mut().zip(self.data.points()) {
            *r = p[0] * x.powf(-p[1]) - y;
        }
        p[0] > 0.0
    }
    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        for (row, &(x, _)) in out.chunks_exact_mut(2).zip(self.data.points()) {
            let f = x.powf(-p[1]);
            row[0] = f;
            row[1] = -p[0] * x.ln() * f;
        }
    }
}

pub fn fit_power_law(data: &PointSet, method: PowerLawMethod) -> Result<PowerLawFit, FitError> {
    data.require_len(3)?;
    data.require_positive_x()?;
    data.require_distinct_x()?;

    let start = match loglog_ols(data) {
        Ok(p) => p,
        Err(e @ FitError::NonPositiveY(_)) => {
            if method == PowerLawMethod::Loglog {
                return Err(e);
            }
            let max_y = data.ys().into_iter().fold(f64::NEG_INFINITY, f64::max);
            if max_y <= 0.0 {
                return Err(e);
            }
            (max_y, 1.0)
        }
        Err(e) => return Err(e),
    };

    let (scale, exponent, iterations, converged) = match method {
        PowerLawMethod::Loglog => (start.0, start.1, 0, true),
        PowerLawMethod::Nls => {
            let out = lm::minimize(&PowerProblem { data }, &[start.0, start.1], Settings::default());
            (out.params[0], out.params[1], out.iterations, out.converged)
        }
    };
    let mut fit = PowerLawFit {
        scale,
        exponent,
        quality: super::FitQuality { r_squared: 0.0, sse: 0.0, n: 0, iterations: 0, converged: false },
    };
    fit.quality = quality_of(&fit, data, iterations, converged);
    Ok(fit)
}

struct MaProblem<'a> {
    data: &'a PointSet,
}

impl Problem for MaProblem<'_> {
    fn n_params(&self) -> usize {
        3
    }
    fn n_residuals(&self) -> usize {
        self.data.len()
    }
    fn residuals(&self, p: &[f64], out: &mut [f64]) -> bool {
        for (r, &(x, y)) in out.iter_mut().zip(self.data.points()) {
            *r = p[0] * x.powf(p[1]) * (-p[2] * x).exp() - y;
        }
        p[0] > 0.0
    }
    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        for (row, &(x, _)) in out.chunks_exact_mut(3).zip(self.data.points()) {
            let g = x.powf(p[1]) * (-p[2] * x).exp();
            row[0] = g;
            row[1] = p[0] * g * x.ln();
            row[2] = -p[0] * g * x;
        }
    }
}

/// Linear least squares on `ln y = ln A + b·ln x − c·x`.
fn ma_log_linear_start(data: &PointSet) -> Option<[f64; 3]> {
    if data.points().iter().any(|(_, y)| *y <= 0.0) {
        return None;
    }
    let mut ata = [0.0; 9];
    let mut aty = [0.0; 3];
    for &(x, y) in data.points() {
        let row = [1.0, x.ln(), -x];
        let ly = y.ln();
        for i in 0..3 {
            aty[i] += row[i] * ly;
            for j in 0..3 {
                ata[i * 3 + j] += row[i] * row[j];
            }
        }
    }
    if !lm::solve_in_place(&mut ata, &mut aty, 3) {
        return None;
    }
    Some([aty[0].exp(), aty[1], aty[2]])
}

/// Fits the Menzerath-Altmann law. With `truncated` the decay is pinned to
/// zero and the fit is exactly the power-law fit with the exponent negated.
pub fn fit_ma_law(data: &PointSet, truncated: bool) -> Result<MaLawFit, FitError> {
    if truncated {
        return fit_power_law(data, PowerLawMethod::Nls).map(MaLawFit::from);
    }
    data.require_len(3)?;
    data.require_positive_x()?;
    data.require_distinct_x()?;

    let start = match ma_log_linear_start(data) {
        Some(s) if s.iter().all(|v| v.is_finite()) && s[0] > 0.0 => s,
        _ => match loglog_ols(data) {
            Ok((a, b)) => [a, -b, 0.0],
            Err(_) => {
                let max_y = data.ys().into_iter().fold(f64::NEG_INFINITY, f64::max);
                if max_y <= 0.0 {
                    return Err(FitError::NonPositiveY(max_y));
                }
                [max_y, 0.0, 0.0]
            }
        },
    };
    let out = lm::minimize(&MaProblem { data }, &start, Settings::default());
    let mut fit = MaLawFit {
        scale: out.params[0],
        exponent: out.params[1],
        decay: out.params[2],
        truncated: false,
        quality: super::FitQuality { r_squared: 0.0, sse: 0.0, n: 0, iterations: 0, converged: false },
    };
    fit.quality = quality_of(&fit, data, out.iterations, out.converged);
    Ok(fit)
}

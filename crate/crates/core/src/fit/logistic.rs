use super::lm::{self, Problem, Settings};
use super::{quality_of, FitError, FitQuality, LogisticFit, PointSet};

/// Overflow-free `1 / (1 + e^(−z))`.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

struct LogisticProblem<'a> {
    data: &'a PointSet,
}

impl Problem for LogisticProblem<'_> {
    fn n_params(&self) -> usize {
        3
    }
    fn n_residuals(&self) -> usize {
        self.data.len()
    }
    fn residuals(&self, p: &[f64], out: &mut [f64]) -> bool {
        for (r, &(x, y)) in out.iter_mut().zip(self.data.points()) {
            *r = p[0] * sigmoid(p[1] * (x - p[2])) - y;
        }
        p[0] > 0.0
    }
    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        let (cap, rate, mid) = (p[0], p[1], p[2]);
        for (row, &(x, _)) in out.chunks_exact_mut(3).zip(self.data.points()) {
            let s = sigmoid(rate * (x - mid));
            let ds = s * (1.0 - s);
            row[0] = s;
            row[1] = cap * (x - mid) * ds;
            row[2] = -cap * rate * ds;
        }
    }
}

fn sse_at(problem: &LogisticProblem, p: &[f64]) -> f64 {
    let mut r = vec![0.0; problem.n_residuals()];
    if problem.residuals(p, &mut r) {
        lm::sum_sq(&r)
    } else {
        f64::INFINITY
    }
}

/// Start from the quarter and three-quarter capacity crossings, which sit
/// `2·ln 3 / rate` apart.
fn quartile_start(sorted: &[(f64, f64)], capacity: f64) -> [f64; 3] {
    let rising = sorted[sorted.len() - 1].1 >= sorted[0].1;
    let crossing = |frac: f64| {
        let level = frac * capacity;
        let hit = |p: &&(f64, f64)| p.1 >= level;
        if rising {
            sorted.iter().find(hit).map_or(sorted[sorted.len() - 1].0, |p| p.0)
        } else {
            sorted.iter().rev().find(hit).map_or(sorted[0].0, |p| p.0)
        }
    };
    let (q1, mid, q3) = (crossing(0.25), crossing(0.5), crossing(0.75));
    let spread = (q3 - q1).abs().max((sorted[1].0 - sorted[0].0).abs());
    let rate = 2.0 * 3f64.ln() / spread;
    [capacity, if rising { rate } else { -rate }, mid]
}

/// Fits a logistic curve. Capacity starts at max y; two starting guesses for
/// rate and midpoint (quartile crossings, and the local slope at half
/// capacity) are refined and the lower SSE wins.
///
/// A series without any variation has no sigmoid to find; it comes back
/// with rate 0 and `converged = false`.
pub fn fit_logistic(data: &PointSet) -> Result<LogisticFit, FitError> {
    data.require_len(4)?;
    if let Some((_, y)) = data.points().iter().find(|(_, y)| *y < 0.0) {
        return Err(FitError::NegativeY(*y));
    }
    data.require_distinct_x()?;

    let mut sorted = data.points().to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let capacity = sorted.iter().map(|p| p.1).fold(0.0, f64::max);
    let y0 = sorted[0].1;
    let flat = sorted.iter().all(|p| p.1 == y0);

    if flat || capacity == 0.0 {
        let mean_x = sorted.iter().map(|p| p.0).sum::<f64>() / sorted.len() as f64;
        let mut fit = LogisticFit {
            capacity: if capacity > 0.0 { 2.0 * y0 } else { 0.0 },
            rate: 0.0,
            midpoint: mean_x,
            quality: FitQuality { r_squared: 0.0, sse: 0.0, n: 0, iterations: 0, converged: false },
        };
        fit.quality = quality_of(&fit, data, 0, false);
        return Ok(fit);
    }

    let half = capacity / 2.0;
    let mid_idx =
        (0..sorted.len()).min_by(|&i, &j| (sorted[i].1 - half).abs().total_cmp(&(sorted[j].1 - half).abs())).unwrap();
    let span = sorted[sorted.len() - 1].0 - sorted[0].0;
    let mut starts = vec![quartile_start(&sorted, capacity)];
    let lo = mid_idx.saturating_sub(1);
    let hi = (mid_idx + 1).min(sorted.len() - 1);
    let slope = (sorted[hi].1 - sorted[lo].1) / (sorted[hi].0 - sorted[lo].0);
    let mut rate = 4.0 * slope / capacity;
    if !rate.is_finite() || rate == 0.0 {
        rate = 4.0 / span;
    }
    starts.push([capacity, rate, sorted[mid_idx].0]);

    let problem = LogisticProblem { data };
    let out = starts
        .iter()
        .map(|s| lm::minimize(&problem, s, Settings::default()))
        .min_by(|a, b| sse_at(&problem, &a.params).total_cmp(&sse_at(&problem, &b.params)))
        .unwrap();
    let converged = out.converged && out.params[1].abs() > 1e-12;
    let mut fit = LogisticFit {
        capacity: out.params[0],
        rate: out.params[1],
        midpoint: out.params[2],
        quality: FitQuality { r_squared: 0.0, sse: 0.0, n: 0, iterations: 0, converged: false },
    };
    fit.quality = quality_of(&fit, data, out.iterations, converged);
    Ok(fit)
}

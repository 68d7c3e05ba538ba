//! Summary statistics over replicate outcomes: normal confidence
//! intervals, empirical CDFs with censoring deficits, stochastic dominance
//! and log-log regression slopes.

use serde::Serialize;

use crate::error::{Error, Result};

/// Sample mean and 95% normal CI half-width (`1.96 * sd / sqrt(count)`).
pub fn mean_ci(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::UndefinedCi {
            uncensored: values.len(),
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, 1.96 * var.sqrt() / n.sqrt()))
}

/// Percentile bootstrap CI half-width around the sample mean; alternative
/// to the normal interval for heavily skewed spread times.
pub fn bootstrap_ci_half_width<R: rand::Rng + ?Sized>(
    values: &[f64],
    iterations: usize,
    rng: &mut R,
) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::UndefinedCi {
            uncensored: values.len(),
        });
    }
    let mut means = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let total: f64 = (0..values.len())
            .map(|_| values[rng.gen_range(0..values.len())])
            .sum();
        means.push(total / values.len() as f64);
    }
    means.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = means[(0.025 * (iterations - 1) as f64).round() as usize];
    let hi = means[(0.975 * (iterations - 1) as f64).round() as usize];
    Ok((hi - lo) / 2.0)
}

/// Right-continuous empirical CDF of spread times. Censored replicates
/// contribute no mass below the censoring point; the CDF tops out at
/// `1 - deficit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ecdf {
    /// Distinct sample values, ascending, paired with cumulative
    /// probability at and above that value.
    pub points: Vec<(f64, f64)>,
    pub total: usize,
    pub censored: usize,
}

impl Ecdf {
    /// Build from uncensored sample values and a censored count.
    pub fn from_samples(uncensored: &[f64], censored: usize) -> Ecdf {
        let total = uncensored.len() + censored;
        let mut sorted = uncensored.to_vec();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let mut points: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in sorted.iter().enumerate() {
            let cum = (i + 1) as f64 / total as f64;
            match points.last_mut() {
                Some(last) if last.0 == v => last.1 = cum,
                _ => points.push((v, cum)),
            }
        }
        Ecdf {
            points,
            total,
            censored,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self
            .points
            .partition_point(|&(v, _)| v <= t)
            .checked_sub(1)
        {
            Some(i) => self.points[i].1,
            None => 0.0,
        }
    }

    /// Probability mass never observed below the censoring point.
    pub fn deficit(&self) -> f64 {
        self.censored as f64 / self.total as f64
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|&(v, _)| v)
    }
}

/// True iff `fast` is everywhere at least `slow` over the sample points of
/// either, with strict inequality somewhere: the spread time under `fast`
/// stochastically dominates (is faster than) `slow`.
pub fn ecdf_dominates(fast: &Ecdf, slow: &Ecdf) -> bool {
    let mut strict = false;
    for t in fast.breakpoints().chain(slow.breakpoints()) {
        let (f, s) = (fast.eval(t), slow.eval(t));
        if f < s {
            return false;
        }
        if f > s {
            strict = true;
        }
    }
    strict
}

/// Ordinary least-squares slope of `log(y)` on `log(x)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 || points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::BadRegressionInput);
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

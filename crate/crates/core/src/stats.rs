//! Aggregation of per-shot results into rate and fidelity estimates.

use serde::Serialize;

/// Rate is per unit time; stderr values are standard errors of the mean
/// (the rate's by the delta method on 1/mean duration).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimates {
    pub rate_mean: f64,
    pub rate_stderr: f64,
    pub fidelity_mean: f64,
    pub fidelity_stderr: f64,
    pub shots: usize,
}

/// Sample mean and standard error, accumulated in slice order.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

impl Estimates {
    /// `durations` are in time units, one per delivered state.
    pub fn from_samples(durations: &[f64], fidelities: &[f64]) -> Self {
        let (t_mean, t_err) = mean_stderr(durations);
        let (f_mean, f_err) = mean_stderr(fidelities);
        Self {
            rate_mean: 1.0 / t_mean,
            rate_stderr: t_err / (t_mean * t_mean),
            fidelity_mean: f_mean,
            fidelity_stderr: f_err,
            shots: durations.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_durations_have_zero_error() {
        let e = Estimates::from_samples(&[2.0; 10], &[0.5; 10]);
        assert_eq!(e.rate_mean, 0.5);
        assert_eq!(e.rate_stderr, 0.0);
        assert_eq!(e.fidelity_stderr, 0.0);
    }

    #[test]
    fn stderr_formula() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }
}

use serde::{Deserialize, Serialize};

use super::numerics::pow_complement;
use super::rate::check_q;
use crate::error::{domain, Result};

/// A tracked subset of the `n_total` link successes, given by the ranks at
/// which they occur and the per-round loss rate of each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSpec {
    pub n_total: usize,
    /// Strictly increasing ranks in `1..=n_total`.
    pub positions: Vec<usize>,
    /// Loss probability per stored round, one per position.
    pub rates: Vec<f64>,
}

impl GSpec {
    pub fn new(n_total: usize, positions: Vec<usize>, rates: Vec<f64>) -> Result<Self> {
        let spec = Self { n_total, positions, rates };
        spec.validate()?;
        Ok(spec)
    }

    /// Positions taken from the set bits of `mask`, bit `k − 1` for rank `k`,
    /// all with the same rate.
    pub fn from_mask(n_total: usize, mask: u64, rate: f64) -> Result<Self> {
        let positions: Vec<usize> = (1..=n_total).filter(|k| mask >> (k - 1) & 1 == 1).collect();
        let rates = vec![rate; positions.len()];
        Self::new(n_total, positions, rates)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_total < 1 {
            return domain("GSpec needs at least one link");
        }
        if self.positions.len() != self.rates.len() {
            return domain("one rate per position required");
        }
        if self.positions.len() > self.n_total {
            return domain("more positions than links");
        }
        for w in self.positions.windows(2) {
            if w[0] >= w[1] {
                return domain("positions must be strictly increasing");
            }
        }
        if let (Some(&first), Some(&last)) = (self.positions.first(), self.positions.last()) {
            if first < 1 || last > self.n_total {
                return domain(format!("positions must lie in 1..={}", self.n_total));
            }
        }
        if let Some(r) = self.rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return domain(format!("rate {r} outside [0, 1]"));
        }
        Ok(())
    }

    /// Loss accumulated per round while waiting for success number `k`:
    /// the sum and the survival product over positions below `k`.
    fn stored_before(&self, k: usize) -> (f64, f64) {
        self.positions
            .iter()
            .zip(&self.rates)
            .filter(|(&c, _)| c < k)
            .fold((0.0, 1.0), |(s, p), (_, &r)| (s + r, p * (1.0 - r)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GMode {
    Leading,
    LowerBound,
}

/// Expected survival E[∏ (1 − r_i)^{Δm_i}], where Δm_i counts the rounds
/// between the success at rank `c_i` and the last success.
pub fn g_value(spec: &GSpec, q: f64, mode: GMode) -> Result<f64> {
    spec.validate()?;
    check_q(q)?;
    let n = spec.n_total;
    Ok((1..=n)
        .map(|k| {
            let remaining = (n + 1 - k) as f64;
            let (loss, survival) = spec.stored_before(k);
            match mode {
                GMode::Leading => remaining * q / (loss + remaining * q),
                GMode::LowerBound => {
                    let single = remaining * q * pow_complement(q, remaining - 1.0);
                    single * survival / (1.0 - pow_complement(q, remaining) * survival)
                }
            }
        })
        .product())
}

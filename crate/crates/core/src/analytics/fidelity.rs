use serde::Serialize;

use super::g::{g_value, GMode, GSpec};
use crate::error::{domain, Result};
use crate::model::SimParams;

/// Largest N accepted by the subset sums below.
pub const MAX_SUBSET_NODES: usize = 24;

/// Weight of a subset of `u_size` ranks in the averaged fidelity, excluding
/// memory decoherence.
pub fn fidelity_coefficient(u_size: usize, n: usize, p_link: f64, p_bsm: f64) -> Result<f64> {
    if u_size > n {
        return domain(format!("subset size {u_size} exceeds {n}"));
    }
    let base = (p_link * p_bsm * p_bsm).powi(u_size as i32);
    let full = if u_size == n { 0.5 } else { 0.0 };
    Ok(if u_size.is_multiple_of(2) {
        base * (0.5f64.powi(n as i32) + full)
    } else {
        base * full
    })
}

fn check_params(p_ghz: f64, p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return domain(format!("need at least 2 qubits, got {}", p.len()));
    }
    if p.len() > MAX_SUBSET_NODES {
        return domain(format!("{} qubits exceed the subset-sum cap of {MAX_SUBSET_NODES}", p.len()));
    }
    if let Some(x) = std::iter::once(&p_ghz).chain(p).find(|x| !(0.0..=1.0).contains(*x)) {
        return domain(format!("parameter {x} outside [0, 1]"));
    }
    Ok(())
}

/// Σ_U 2^{[U=∅] + [U=all] − 1} ∏_{i∈U} (1 − p_i)/2 ∏_{j∉U} p_j.
fn depolarized_overlap(p: &[f64], skew: f64) -> f64 {
    let n = p.len();
    let full = (1usize << n) - 1;
    (0..=full)
        .map(|u| {
            let weight = if u == 0 || u == full { 1.0 } else { 0.5 };
            let prod: f64 = (0..n)
                .map(|i| if u >> i & 1 == 1 { (1.0 - p[i]) / 2.0 } else { p[i] })
                .product();
            (weight + if u == 0 { skew } else { 0.0 }) * prod
        })
        .sum()
}

/// GHZ fidelity after joint depolarization `p_ghz` followed by per-qubit
/// depolarization `p[i]`.
pub fn f_rand(p_ghz: f64, p: &[f64]) -> Result<f64> {
    check_params(p_ghz, p)?;
    let n = p.len();
    Ok((1.0 - p_ghz) * 0.5f64.powi(n as i32) + p_ghz * depolarized_overlap(p, 0.0))
}

fn b_coefficient(u_size: usize, n: usize) -> f64 {
    let parity = if u_size.is_multiple_of(2) { 2.0 } else { 0.0 };
    0.5f64.powi(n as i32 + 1) * parity + if u_size == n { 0.5 } else { 0.0 }
}

/// Largest discrepancy, over the given parameter vectors, between the direct
/// subset expansion of the depolarized overlap and its re-expansion in
/// monomials ∏_{i∈U} p_i with the derived coefficients.
pub fn coefficient_identity_check(n: usize, samples: &[Vec<f64>]) -> Result<f64> {
    coefficient_identity_check_with_skew(n, samples, 0.0)
}

/// [`coefficient_identity_check`] with one expansion coefficient shifted by
/// `skew`, as a negative control.
#[doc(hidden)]
pub fn coefficient_identity_check_with_skew(n: usize, samples: &[Vec<f64>], skew: f64) -> Result<f64> {
    if !(1..=8).contains(&n) {
        return domain(format!("identity check supports 1..=8 qubits, got {n}"));
    }
    let full = (1usize << n) - 1;
    let mut worst = 0.0f64;
    for p in samples {
        if p.len() != n {
            return domain("sample length differs from n");
        }
        let direct = depolarized_overlap(p, skew);
        let monomial: f64 = (0..=full)
            .map(|u| {
                let prod: f64 = (0..n).filter(|i| u >> i & 1 == 1).map(|i| p[i]).product();
                b_coefficient(u.count_ones() as usize, n) * prod
            })
            .sum();
        worst = worst.max((direct - monomial).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityBreakdown {
    pub value: f64,
    /// Per-subset terms A_|U| · E[∏_{i∈U} p_mem^{2Δn_i}], indexed by bitmask
    /// with bit k − 1 set for rank k.
    pub contributions: Vec<f64>,
}

/// Averaged factory-node fidelity from the subset expansion, with the
/// memory term evaluated by [`g_value`] in the given mode.
pub fn fidelity_closed_form(params: &SimParams, mode: GMode) -> Result<FidelityBreakdown> {
    let n = params.n_end_nodes;
    params.validate()?;
    if n > MAX_SUBSET_NODES {
        return domain(format!("{n} end nodes exceed the subset-sum cap of {MAX_SUBSET_NODES}"));
    }
    let rate = 1.0 - params.p_mem * params.p_mem;
    let coeffs: Vec<f64> = (0..=n)
        .map(|u| fidelity_coefficient(u, n, params.p_link, params.p_bsm))
        .collect::<Result<_>>()?;
    let mut contributions = vec![0.0; 1 << n];
    let mut sum = 0.0;
    for (mask, slot) in contributions.iter_mut().enumerate() {
        let a = coeffs[(mask as u64).count_ones() as usize];
        if a == 0.0 {
            continue;
        }
        let g = g_value(&GSpec::from_mask(n, mask as u64, rate)?, params.q_link, mode)?;
        *slot = a * g;
        sum += *slot;
    }
    let value = (1.0 - params.p_ghz) * 0.5f64.powi(n as i32) + params.p_ghz * sum;
    Ok(FidelityBreakdown { value, contributions })
}

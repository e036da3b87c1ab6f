//! Brute-force references for the closed forms and the fast engines:
//! exhaustive round enumeration, direct sampling of the memory-survival
//! expectation, and a full density-matrix replay of the factory protocol.

use rand::Rng;
use serde::Serialize;

use crate::analytics::GSpec;
use crate::dm::{self, BsmOutcome, DensityMatrix, QubitId};
use crate::error::{config, domain, Error, Result};
use crate::model::{sample_geometric, SimParams};
use crate::stats::mean_stderr;

/// Largest residual probability accepted by [`enumerate_waiting_times`].
pub const MAX_RESIDUAL_MASS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaitingTable {
    /// Entry `i − 1` is the expected round of the `i`-th success.
    pub expectations: Vec<f64>,
    /// Probability that all links finished within the horizon.
    pub captured_mass: f64,
}

/// Horizon at which the probability of an unfinished link drops far below
/// [`MAX_RESIDUAL_MASS`].
pub fn default_horizon(n: usize, q: f64) -> usize {
    if q >= 1.0 {
        return 1;
    }
    let target = 1e-16 * q / n.max(1) as f64;
    (target.ln() / (-q).ln_1p()).ceil() as usize + 1
}

/// Exact expectations of the order statistics of `n` geometric waiting
/// times, by propagating the distribution of the number of finished links
/// round by round. E[n_i] = Σ_t P(fewer than i finished after t rounds).
pub fn enumerate_waiting_times(n: usize, q: f64, horizon: usize) -> Result<WaitingTable> {
    if n < 1 || !(q > 0.0 && q <= 1.0) {
        return domain("enumeration needs n >= 1 and q in (0, 1]");
    }
    // binomial(k, j) q^j (1-q)^(k-j) for k unfinished links
    let step: Vec<Vec<f64>> = (0..=n)
        .map(|k| {
            (0..=k)
                .map(|j| {
                    let c = (0..j).fold(1.0, |acc, t| acc * (k - t) as f64 / (t + 1) as f64);
                    c * q.powi(j as i32) * (1.0 - q).powi((k - j) as i32)
                })
                .collect()
        })
        .collect();
    let mut finished = vec![0.0; n + 1];
    finished[0] = 1.0;
    let mut expectations = vec![0.0; n];
    for _ in 0..horizon {
        let mut below = 0.0;
        for (i, e) in expectations.iter_mut().enumerate() {
            below += finished[i];
            *e += below;
        }
        let mut next = vec![0.0; n + 1];
        for (done, &p) in finished.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (j, &w) in step[n - done].iter().enumerate() {
                next[done + j] += p * w;
            }
        }
        finished = next;
    }
    let residual = 1.0 - finished[n];
    if residual > MAX_RESIDUAL_MASS {
        return config(format!(
            "horizon {horizon} leaves probability {residual:e} unfinished; need <= {MAX_RESIDUAL_MASS:e}"
        ));
    }
    Ok(WaitingTable { expectations, captured_mass: finished[n] })
}

/// Sample estimate of E[∏ (1 − r_i)^{Δm_i}] from `samples` independent sets
/// of `n_total` geometric waiting times.
pub fn mc_g<R: Rng + ?Sized>(spec: &GSpec, q: f64, samples: usize, rng: &mut R) -> Result<(f64, f64)> {
    spec.validate()?;
    if samples < 2 {
        return domain("need at least 2 samples");
    }
    let mut rounds = vec![0u64; spec.n_total];
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        for r in rounds.iter_mut() {
            *r = sample_geometric(rng, q)?;
        }
        rounds.sort_unstable();
        let last = rounds[spec.n_total - 1];
        let v: f64 = spec
            .positions
            .iter()
            .zip(&spec.rates)
            .map(|(&c, &r)| (1.0 - r).powf((last - rounds[c - 1]) as f64))
            .product();
        values.push(v);
    }
    Ok(mean_stderr(&values))
}

/// Random inputs fixed for one factory-protocol replay.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoryDraws {
    pub success_rounds: Vec<u64>,
    pub outcomes: Vec<BsmOutcome>,
}

pub const REPLAY_MAX_NODES: usize = 3;

fn central(i: usize) -> QubitId {
    QubitId::new(0, i)
}

fn central_link(n: usize, i: usize) -> QubitId {
    QubitId::new(0, n + i)
}

fn remote(i: usize) -> QubitId {
    QubitId::new(i, 0)
}

/// The state before any BSM: noisy GHZ on the central node tensored with
/// every noisy, memory-aged Bell pair, with BSM noise already applied.
fn replay_register(params: &SimParams, success_rounds: &[u64]) -> Result<DensityMatrix> {
    let n = params.n_end_nodes;
    if n > REPLAY_MAX_NODES {
        return config(format!("replay supports at most {REPLAY_MAX_NODES} end nodes"));
    }
    if success_rounds.len() != n {
        return domain("one success round per end node required");
    }
    let n_all = success_rounds.iter().copied().max().unwrap_or(0);
    let a: Vec<QubitId> = (1..=n).map(central).collect();
    let mut register = dm::depolarize(&dm::make_ghz(&a)?, &a, params.p_ghz)?;
    for i in 1..=n {
        let (b, c) = (central_link(n, i), remote(i));
        let mut pair = dm::make_bell(b, c)?;
        pair = dm::depolarize(&pair, &[b, c], params.p_link)?;
        for _ in 0..(n_all - success_rounds[i - 1]) {
            pair = dm::depolarize(&pair, &[b], params.p_mem)?;
            pair = dm::depolarize(&pair, &[c], params.p_mem)?;
        }
        register = dm::tensor(&register, &pair)?;
    }
    for i in 1..=n {
        register = dm::depolarize(&register, &[central(i)], params.p_bsm)?;
        register = dm::depolarize(&register, &[central_link(n, i)], params.p_bsm)?;
    }
    Ok(register)
}

fn replay_branch(
    params: &SimParams,
    register: &DensityMatrix,
    outcomes: &[BsmOutcome],
) -> Result<(f64, DensityMatrix)> {
    let n = params.n_end_nodes;
    let mut state = register.clone();
    let mut prob = 1.0;
    for i in 1..=n {
        let (p, post) = dm::bell_branch(&state, central(i), central_link(n, i), outcomes[i - 1])?;
        let post = post.ok_or_else(|| Error::Internal("replayed a zero-probability branch".into()))?;
        prob *= p;
        state = dm::pauli_correct(&post, remote(i), outcomes[i - 1])?;
    }
    Ok((prob, state.permuted(&(1..=n).map(remote).collect::<Vec<_>>())?))
}

/// End-node GHZ fidelity of the factory protocol for fixed draws, built on
/// the full register.
pub fn replay_factory_dm(params: &SimParams, draws: &FactoryDraws) -> Result<f64> {
    if draws.outcomes.len() != params.n_end_nodes {
        return domain("one BSM outcome per end node required");
    }
    let register = replay_register(params, &draws.success_rounds)?;
    let (_, state) = replay_branch(params, &register, &draws.outcomes)?;
    Ok(dm::fidelity_to_ghz(&state))
}

/// All 4^n patterns of successful BSM outcomes.
pub fn outcome_patterns(n: usize) -> Vec<Vec<BsmOutcome>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<BsmOutcome>| {
                BsmOutcome::all().into_iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect();
    }
    out
}

/// Every outcome pattern with its probability and corrected end-node state.
pub fn factory_branches(
    params: &SimParams,
    success_rounds: &[u64],
) -> Result<Vec<(Vec<BsmOutcome>, f64, DensityMatrix)>> {
    let register = replay_register(params, success_rounds)?;
    outcome_patterns(params.n_end_nodes)
        .into_iter()
        .map(|pattern| {
            let (p, s) = replay_branch(params, &register, &pattern)?;
            Ok((pattern, p, s))
        })
        .collect()
}

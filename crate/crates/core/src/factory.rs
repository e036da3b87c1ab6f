//! Monte Carlo engine for the factory-node protocol: the central node prepares
//! a GHZ state and teleports one qubit to each end node once every link holds
//! a Bell pair.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::f_rand;
use crate::dm::{self, DensityMatrix, QubitId};
use crate::error::{config, Result};
use crate::model::{rng_stream, sample_geometric, tag, RngStream, SimParams};
use crate::stats::Estimates;

/// Largest N accepted by the density-matrix path.
pub const DM_MAX_NODES: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShotRecord {
    pub teleport_attempts: u64,
    /// Round in which each link succeeded, for the final attempt.
    pub success_rounds: Vec<u64>,
    pub n_all: u64,
    /// Rounds each Bell pair of the final attempt spent in memory.
    pub delta_n: Vec<u64>,
    /// Rounds over all attempts.
    pub duration_rounds: u64,
    pub fidelity: f64,
}

/// The per-shot random streams: link successes, BSM success coins and
/// measurement outcomes.
pub struct ShotStreams {
    pub link: RngStream,
    pub coin: RngStream,
    pub outcome: RngStream,
}

impl ShotStreams {
    pub fn new(seed: u64, shot: u64) -> Self {
        Self {
            link: rng_stream(seed, shot, tag::LINK),
            coin: rng_stream(seed, shot, tag::COIN),
            outcome: rng_stream(seed, shot, tag::OUTCOME),
        }
    }
}

fn draw_links(params: &SimParams, rng: &mut RngStream) -> Result<(Vec<u64>, u64)> {
    let rounds = (0..params.n_end_nodes)
        .map(|_| sample_geometric(rng, params.q_link))
        .collect::<Result<Vec<_>>>()?;
    let n_all = rounds.iter().copied().max().unwrap_or(0);
    Ok((rounds, n_all))
}

fn finish(
    params: &SimParams,
    attempts: u64,
    duration: u64,
    rounds: Vec<u64>,
    n_all: u64,
    fidelity: Option<f64>,
) -> Result<ShotRecord> {
    let delta_n: Vec<u64> = rounds.iter().map(|&n| n_all - n).collect();
    let fidelity = match fidelity {
        Some(f) => f,
        None => {
            let p: Vec<f64> = delta_n.iter().map(|&d| params.factory_qubit_parameter(d)).collect();
            f_rand(params.p_ghz, &p)?
        }
    };
    Ok(ShotRecord {
        teleport_attempts: attempts,
        success_rounds: rounds,
        n_all,
        delta_n,
        duration_rounds: duration,
        fidelity,
    })
}

/// One execution using the closed-form fidelity of the delivered state.
/// All N teleportations succeed together with probability q_bsm^N.
pub fn run_shot_fast(params: &SimParams, streams: &mut ShotStreams) -> Result<ShotRecord> {
    params.validate()?;
    let all_succeed = params.q_bsm.powi(params.n_end_nodes as i32);
    let mut attempts = 0;
    let mut duration = 0;
    loop {
        attempts += 1;
        let (rounds, n_all) = draw_links(params, &mut streams.link)?;
        duration += n_all;
        if streams.coin.gen::<f64>() < all_succeed {
            return finish(params, attempts, duration, rounds, n_all, None);
        }
    }
}

/// Central-node GHZ qubit sent to end node `i`.
pub fn ghz_qubit(i: usize) -> QubitId {
    QubitId::new(0, i)
}

/// Central-node half of the Bell pair shared with end node `i`.
pub fn link_qubit(n: usize, i: usize) -> QubitId {
    QubitId::new(0, n + i)
}

/// End-node half of the Bell pair shared with end node `i`.
pub fn end_qubit(i: usize) -> QubitId {
    QubitId::new(i, 0)
}

/// Teleports the noisy GHZ state through freshly built noisy Bell pairs one
/// link at a time. Returns `None` as soon as a BSM fails.
fn teleport_state(
    params: &SimParams,
    delta_n: &[u64],
    streams: &mut ShotStreams,
) -> Result<Option<DensityMatrix>> {
    let n = params.n_end_nodes;
    let ghz_labels: Vec<QubitId> = (1..=n).map(ghz_qubit).collect();
    let mut state = dm::depolarize(&dm::make_ghz(&ghz_labels)?, &ghz_labels, params.p_ghz)?;
    for i in 1..=n {
        let (a, b, c) = (ghz_qubit(i), link_qubit(n, i), end_qubit(i));
        let mut pair = dm::depolarize(&dm::make_bell(b, c)?, &[b, c], params.p_link)?;
        let stored = params.p_mem.powf(delta_n[i - 1] as f64);
        pair = dm::depolarize(&pair, &[b], stored)?;
        pair = dm::depolarize(&pair, &[c], stored)?;
        state = dm::tensor(&state, &pair)?;
        state = dm::depolarize(&state, &[a], params.p_bsm)?;
        state = dm::depolarize(&state, &[b], params.p_bsm)?;
        if streams.coin.gen::<f64>() >= params.q_bsm {
            return Ok(None);
        }
        let (outcome, post) = dm::bsm(&state, a, b, 1.0, &mut streams.outcome)?;
        debug_assert!(outcome.succeeded);
        state = dm::pauli_correct(&post, c, outcome)?;
    }
    Ok(Some(state))
}

/// One execution simulated on explicit density matrices, with one BSM coin
/// per link and a full restart after any failure.
pub fn run_shot_dm(params: &SimParams, streams: &mut ShotStreams) -> Result<ShotRecord> {
    params.validate()?;
    if params.n_end_nodes > DM_MAX_NODES {
        return config(format!(
            "density-matrix path supports at most {DM_MAX_NODES} end nodes, got {}",
            params.n_end_nodes
        ));
    }
    let mut attempts = 0;
    let mut duration = 0;
    loop {
        attempts += 1;
        let (rounds, n_all) = draw_links(params, &mut streams.link)?;
        duration += n_all;
        let delta_n: Vec<u64> = rounds.iter().map(|&r| n_all - r).collect();
        if let Some(state) = teleport_state(params, &delta_n, streams)? {
            let f = dm::fidelity_to_ghz(&state);
            return finish(params, attempts, duration, rounds, n_all, Some(f));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Fast,
    DensityMatrix,
}

/// Runs `params.shots` independent executions in parallel and reduces them in
/// shot order.
pub fn estimate_with(params: &SimParams, engine: Engine) -> Result<Estimates> {
    params.validate()?;
    if params.shots < 2 {
        return config("estimates need at least 2 shots");
    }
    let records = (0..params.shots as u64)
        .into_par_iter()
        .map(|shot| {
            let mut streams = ShotStreams::new(params.seed, shot);
            match engine {
                Engine::Fast => run_shot_fast(params, &mut streams),
                Engine::DensityMatrix => run_shot_dm(params, &mut streams),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let durations: Vec<f64> =
        records.iter().map(|r| r.duration_rounds as f64 * params.dt).collect();
    let fidelities: Vec<f64> = records.iter().map(|r| r.fidelity).collect();
    Ok(Estimates::from_samples(&durations, &fidelities))
}

pub fn estimate(params: &SimParams) -> Result<Estimates> {
    estimate_with(params, Engine::Fast)
}

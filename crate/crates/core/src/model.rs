//! Simulation parameters and reproducible per-shot randomness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{config, domain, Result};

/// Protocol and noise parameters shared by both engines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimParams {
    pub n_end_nodes: usize,
    /// Per-round success probability of one Bell-state distribution attempt.
    pub q_link: f64,
    pub q_bsm: f64,
    /// Depolarizing parameter applied to every freshly distributed Bell pair.
    pub p_link: f64,
    /// Depolarizing parameter applied to each stored qubit once per round.
    pub p_mem: f64,
    /// Depolarizing parameter applied to both qubits entering a BSM.
    pub p_bsm: f64,
    /// Joint depolarizing parameter of the locally prepared GHZ state.
    pub p_ghz: f64,
    pub dt: f64,
    /// Classical communication time. Only zero is supported.
    pub t_cl: f64,
    pub shots: usize,
    pub seed: u64,
}

pub const DEFAULT_SHOTS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 20_240_101;

impl SimParams {
    /// Noiseless parameters with deterministic BSMs.
    pub fn new(n_end_nodes: usize, q_link: f64) -> Self {
        Self {
            n_end_nodes,
            q_link,
            q_bsm: 1.0,
            p_link: 1.0,
            p_mem: 1.0,
            p_bsm: 1.0,
            p_ghz: 1.0,
            dt: 1.0,
            t_cl: 0.0,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_end_nodes < 2 {
            return config(format!("n_end_nodes = {} must be at least 2", self.n_end_nodes));
        }
        for (name, v) in [("q_link", self.q_link), ("q_bsm", self.q_bsm)] {
            if !(v > 0.0 && v <= 1.0) {
                return config(format!("{name} = {v} must lie in (0, 1]"));
            }
        }
        for (name, v) in [
            ("p_link", self.p_link),
            ("p_mem", self.p_mem),
            ("p_bsm", self.p_bsm),
            ("p_ghz", self.p_ghz),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return config(format!("{name} = {v} must lie in [0, 1]"));
            }
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return config(format!("dt = {} must be positive", self.dt));
        }
        if self.t_cl != 0.0 {
            return config(format!("t_cl = {} is not supported; only 0 is", self.t_cl));
        }
        if self.shots == 0 {
            return config("shots must be at least 1");
        }
        Ok(())
    }

    /// Per-qubit depolarizing parameter of end node `i` after the factory
    /// protocol, given how many rounds its Bell pair waited.
    pub fn factory_qubit_parameter(&self, waited_rounds: u64) -> f64 {
        self.p_link * self.p_bsm * self.p_bsm * self.p_mem.powf(2.0 * waited_rounds as f64)
    }
}

/// Independent random stream for one shot and purpose.
pub type RngStream = ChaCha8Rng;

/// Stream tags. Distinct tags never share draws for the same shot.
pub mod tag {
    pub const LINK: u64 = 1;
    pub const COIN: u64 = 2;
    pub const OUTCOME: u64 = 3;
    pub const SWITCH: u64 = 4;
}

/// The stream keyed by `(seed, index, tag)`; identical keys give identical
/// draws irrespective of scheduling.
pub fn rng_stream(seed: u64, index: u64, tag: u64) -> RngStream {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(&tag.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Largest value returned by [`sample_geometric`].
pub const GEOMETRIC_CAP: u64 = 1 << 31;

/// Number of trials up to and including the first success, by inverse CDF.
pub fn sample_geometric<R: Rng + ?Sized>(rng: &mut R, q: f64) -> Result<u64> {
    if !(q > 0.0 && q <= 1.0) {
        return domain(format!("success probability {q} must lie in (0, 1]"));
    }
    if q == 1.0 {
        return Ok(1);
    }
    // u in (0, 1]
    let u = 1.0 - rng.gen::<f64>();
    let n = (u.ln() / (-q).ln_1p()).ceil();
    Ok(if n < 1.0 {
        1
    } else if n >= GEOMETRIC_CAP as f64 {
        GEOMETRIC_CAP
    } else {
        n as u64
    })
}

/// Depolarizing parameter that gives GHZ fidelity `fidelity` on `n` qubits:
/// the inverse of F = p + (1 − p)/2^n.
pub fn derive_p_ghz(fidelity: f64, n: usize) -> Result<f64> {
    if n < 1 {
        return domain("qubit count must be positive");
    }
    let floor = 0.5f64.powi(n as i32);
    if !(fidelity >= floor - 1e-15 && fidelity <= 1.0) {
        return domain(format!("fidelity {fidelity} outside [{floor}, 1]"));
    }
    Ok(((fidelity - floor) / (1.0 - floor)).clamp(0.0, 1.0))
}

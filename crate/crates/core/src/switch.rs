//! Round-based Monte Carlo engine for GHZ distribution through a 2-switch.
//!
//! The switch holds one qubit per connection and can only perform Bell-state
//! measurements between pairs of them. End nodes hold two qubits and grow GHZ
//! states by fusing. The network state persists between deliveries, so
//! leftover Bell pairs are reused by the next execution.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dm::{self, DensityMatrix, Pauli, QubitId, MAX_QUBITS};
use crate::error::{config, Error, Result};
use crate::model::{rng_stream, tag, RngStream, SimParams};
use crate::stats::Estimates;

/// Switch-side qubit of connection `i` (1-based).
pub fn switch_qubit(i: usize) -> QubitId {
    QubitId::new(0, i)
}

/// Memory slot `slot` (0 or 1) of end node `i`.
pub fn node_qubit(i: usize, slot: usize) -> QubitId {
    QubitId::new(i, slot)
}

/// A set of qubits whose joint state is tracked as one density matrix.
#[derive(Clone, Debug)]
pub struct Component {
    dm: DensityMatrix,
}

impl Component {
    pub fn dm(&self) -> &DensityMatrix {
        &self.dm
    }

    pub fn members(&self) -> &[QubitId] {
        self.dm.labels()
    }

    /// True when no qubit lives at the switch.
    pub fn is_end_node_only(&self) -> bool {
        self.members().iter().all(|q| q.node != 0)
    }

    pub fn end_nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.members().iter().filter(|q| q.node != 0).map(|q| q.node).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Event {
    LinkCreated { node: usize },
    BsmSucceeded { nodes: (usize, usize), bits: (u8, u8) },
    BsmFailed { nodes: (usize, usize) },
    Fusion { node: usize, bit: u8 },
}

/// Persistent network state: slot occupancy, entangled components, the round
/// clock and memory decoherence not yet applied to the stored qubits.
#[derive(Clone, Debug)]
pub struct NetworkState {
    n: usize,
    round: u64,
    switch_slots: Vec<Option<u64>>,
    node_slots: Vec<[Option<u64>; 2]>,
    components: BTreeMap<u64, Component>,
    // depolarizing factor owed by each stored qubit
    pending: BTreeMap<QubitId, f64>,
    next_id: u64,
}

impl NetworkState {
    pub fn new(n_end_nodes: usize) -> Self {
        Self {
            n: n_end_nodes,
            round: 0,
            switch_slots: vec![None; n_end_nodes],
            node_slots: vec![[None, None]; n_end_nodes],
            components: BTreeMap::new(),
            pending: BTreeMap::new(),
            next_id: 0,
        }
    }

    pub fn n_end_nodes(&self) -> usize {
        self.n
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.components.values()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Occupancy of the switch slot of connection `i`.
    pub fn switch_occupied(&self, i: usize) -> bool {
        self.switch_slots[i - 1].is_some()
    }

    /// Number of occupied memory slots at end node `i`.
    pub fn node_occupancy(&self, i: usize) -> usize {
        self.node_slots[i - 1].iter().filter(|s| s.is_some()).count()
    }

    fn slot(&mut self, q: QubitId) -> &mut Option<u64> {
        if q.node == 0 {
            &mut self.switch_slots[q.slot - 1]
        } else {
            &mut self.node_slots[q.node - 1][q.slot]
        }
    }

    fn slot_value(&self, q: QubitId) -> Option<u64> {
        if q.node == 0 {
            self.switch_slots[q.slot - 1]
        } else {
            self.node_slots[q.node - 1][q.slot]
        }
    }

    fn insert(&mut self, dm: DensityMatrix) -> Result<u64> {
        if dm.num_qubits() > MAX_QUBITS {
            return Err(Error::Internal("component exceeds register cap".into()));
        }
        let id = self.next_id;
        self.next_id += 1;
        for &q in dm.labels() {
            let s = self.slot(q);
            if s.is_some() {
                return Err(Error::Internal(format!("slot of {q} already occupied")));
            }
            *s = Some(id);
            self.pending.entry(q).or_insert(1.0);
        }
        self.components.insert(id, Component { dm });
        Ok(id)
    }

    /// Removes a component, applying its owed memory noise first.
    fn take(&mut self, id: u64) -> Result<DensityMatrix> {
        self.flush(id)?;
        let comp = self
            .components
            .remove(&id)
            .ok_or_else(|| Error::Internal(format!("unknown component {id}")))?;
        for &q in comp.dm.labels() {
            *self.slot(q) = None;
            self.pending.remove(&q);
        }
        Ok(comp.dm)
    }

    /// Applies owed memory noise to every qubit of component `id`.
    fn flush(&mut self, id: u64) -> Result<()> {
        let comp = self
            .components
            .get_mut(&id)
            .ok_or_else(|| Error::Internal(format!("unknown component {id}")))?;
        for &q in comp.dm.labels().to_vec().iter() {
            let owed = self.pending.get_mut(&q).expect("stored qubit without memory entry");
            if *owed < 1.0 {
                comp.dm = dm::depolarize(&comp.dm, &[q], *owed)?;
                *owed = 1.0;
            }
        }
        Ok(())
    }

    fn free_node_slot(&self, i: usize) -> Option<usize> {
        self.node_slots[i - 1].iter().position(|s| s.is_none())
    }

    /// End-node qubits of node `i` that belong to end-node-only components.
    fn node_group_qubits(&self, i: usize) -> Vec<(QubitId, u64)> {
        (0..2)
            .filter_map(|s| {
                let id = self.node_slots[i - 1][s]?;
                self.components[&id].is_end_node_only().then_some((node_qubit(i, s), id))
            })
            .collect()
    }

    /// Representative per end node of the connectivity induced by end-node-only components.
    fn connectivity(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for comp in self.components.values().filter(|c| c.is_end_node_only()) {
            let nodes = comp.end_nodes();
            for w in nodes.windows(2) {
                let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        (0..=self.n).map(|x| root(&mut parent, x)).collect()
    }

    /// Switch connections eligible for a BSM together: both occupied and
    /// their end nodes not already connected.
    pub fn valid_pairs(&self) -> Vec<(usize, usize)> {
        let conn = self.connectivity();
        let occupied: Vec<usize> = (1..=self.n).filter(|&i| self.switch_occupied(i)).collect();
        let mut pairs = Vec::new();
        for (k, &i) in occupied.iter().enumerate() {
            for &j in &occupied[k + 1..] {
                if conn[i] != conn[j] {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// The end-node qubit entangled with switch connection `i`.
    fn partner(&self, i: usize) -> Result<QubitId> {
        let id = self.switch_slots[i - 1]
            .ok_or_else(|| Error::Internal(format!("switch slot {i} is empty")))?;
        self.components[&id]
            .members()
            .iter()
            .copied()
            .find(|q| q.node != 0)
            .ok_or_else(|| Error::Internal(format!("switch qubit {i} has no partner")))
    }

    /// Slot bookkeeping agrees with component membership, and every
    /// component is a valid state.
    pub fn check_invariants(&self) -> Result<()> {
        let mut seen = 0;
        for (&id, comp) in &self.components {
            comp.dm.check()?;
            for &q in comp.members() {
                if self.slot_value(q) != Some(id) {
                    return Err(Error::Internal(format!("{q} not registered to its component")));
                }
                if !self.pending.contains_key(&q) {
                    return Err(Error::Internal(format!("{q} has no memory entry")));
                }
                seen += 1;
            }
        }
        let occupied = self.switch_slots.iter().flatten().count()
            + self.node_slots.iter().flat_map(|s| s.iter().flatten()).count();
        if occupied != seen || self.pending.len() != seen {
            return Err(Error::Internal("slot occupancy does not match components".into()));
        }
        Ok(())
    }

    /// Adds an explicit component, for tests and examples that set up states by hand.
    pub fn add_component(&mut self, dm: DensityMatrix) -> Result<()> {
        for &q in dm.labels() {
            let in_range = if q.node == 0 {
                (1..=self.n).contains(&q.slot)
            } else {
                q.node <= self.n && q.slot < 2
            };
            if !in_range {
                return config(format!("qubit {q} does not exist in this network"));
            }
        }
        self.insert(dm).map(|_| ())
    }

    /// The component holding qubit `q`, if any.
    pub fn component_of(&self, q: QubitId) -> Option<&Component> {
        self.slot_value(q).map(|id| &self.components[&id])
    }

    /// The density matrix of `q`'s component with owed memory noise applied.
    pub fn settled_state(&self, q: QubitId) -> Option<Result<DensityMatrix>> {
        let comp = self.component_of(q)?;
        let mut out = comp.dm.clone();
        for &m in comp.members() {
            let owed = self.pending[&m];
            if owed < 1.0 {
                match dm::depolarize(&out, &[m], owed) {
                    Ok(d) => out = d,
                    Err(e) => return Some(Err(e)),
                }
            }
        }
        Some(Ok(out))
    }
}

/// One round of link generation: stored qubits decohere, then every
/// connection with a free switch slot and a free end-node slot attempts to
/// distribute a Bell pair.
pub fn advance_round<R: Rng + ?Sized>(
    state: &mut NetworkState,
    params: &SimParams,
    rng: &mut R,
) -> Result<Vec<Event>> {
    if params.p_mem < 1.0 {
        for owed in state.pending.values_mut() {
            *owed *= params.p_mem;
        }
    }
    let mut events = Vec::new();
    for i in 1..=state.n {
        if state.switch_occupied(i) {
            continue;
        }
        let Some(slot) = state.free_node_slot(i) else { continue };
        if rng.gen::<f64>() < params.q_link {
            let (s, e) = (switch_qubit(i), node_qubit(i, slot));
            let pair = dm::depolarize(&dm::make_bell(s, e)?, &[s, e], params.p_link)?;
            state.insert(pair)?;
            events.push(Event::LinkCreated { node: i });
        }
    }
    state.round += 1;
    Ok(events)
}

/// Bell-state measurements at the switch between uniformly chosen valid pairs
/// until none remain. A failed BSM discards both Bell pairs.
pub fn do_switch_bsms<R: Rng + ?Sized>(
    state: &mut NetworkState,
    params: &SimParams,
    rng: &mut R,
) -> Result<Vec<Event>> {
    let mut events = Vec::new();
    loop {
        let pairs = state.valid_pairs();
        if pairs.is_empty() {
            return Ok(events);
        }
        let (i, j) = pairs[rng.gen_range(0..pairs.len())];
        let far = state.partner(j)?;
        let id_i = state.switch_slots[i - 1].expect("occupied");
        let id_j = state.switch_slots[j - 1].expect("occupied");
        let joint = dm::tensor(&state.take(id_i)?, &state.take(id_j)?)?;
        if rng.gen::<f64>() >= params.q_bsm {
            events.push(Event::BsmFailed { nodes: (i, j) });
            continue;
        }
        let (si, sj) = (switch_qubit(i), switch_qubit(j));
        let noisy = dm::depolarize(&dm::depolarize(&joint, &[si], params.p_bsm)?, &[sj], params.p_bsm)?;
        let (outcome, post) = dm::bsm(&noisy, si, sj, 1.0, rng)?;
        let fixed = dm::pauli_correct(&post, far, outcome)?;
        state.insert(fixed)?;
        events.push(Event::BsmSucceeded { nodes: (i, j), bits: outcome.bits });
    }
}

/// Fuses, at every end node holding two end-node qubits, the two GHZ-like
/// states they belong to, in ascending node order.
pub fn do_fusions<R: Rng + ?Sized>(
    state: &mut NetworkState,
    _params: &SimParams,
    rng: &mut R,
) -> Result<Vec<Event>> {
    let mut events = Vec::new();
    for node in 1..=state.n {
        let held = state.node_group_qubits(node);
        if held.len() < 2 {
            continue;
        }
        let (a, b) = (held[0], held[1]);
        if a.1 == b.1 {
            return Err(Error::Internal(format!("node {node} holds two qubits of one component")));
        }
        let size = |id: u64| state.components[&id].members().len();
        let (control, target) = if size(b.1) > size(a.1) { (b, a) } else { (a, b) };
        let detached: Vec<QubitId> =
            state.components[&target.1].members().iter().copied().filter(|&q| q != target.0).collect();
        let joint = dm::tensor(&state.take(control.1)?, &state.take(target.1)?)?;
        let (bit, mut fused) = dm::fuse(&joint, control.0, target.0, rng)?;
        if bit == 1 {
            for &q in &detached {
                fused = dm::apply_pauli(&fused, q, Pauli::X)?;
            }
        }
        state.insert(fused)?;
        events.push(Event::Fusion { node, bit });
    }
    Ok(events)
}

/// Outcome of one delivery through the switch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExecutionRecord {
    /// Rounds from the start of this execution to delivery.
    pub duration_rounds: u64,
    pub fidelity: f64,
    pub links_created: u64,
    pub bsm_attempts: u64,
    pub bsm_failures: u64,
    pub fusions: u64,
}

impl ExecutionRecord {
    /// Link-level Bell pairs consumed by successful BSMs.
    pub fn link_pairs_consumed(&self) -> u64 {
        2 * (self.bsm_attempts - self.bsm_failures)
    }
}

fn finished_component(state: &NetworkState) -> Option<u64> {
    state
        .components
        .iter()
        .find(|(_, c)| c.is_end_node_only() && c.end_nodes().len() == state.n)
        .map(|(&id, _)| id)
}

/// Runs the protocol until all end nodes share a GHZ state, removes that
/// state from the network and reports it. Leftover entanglement stays.
pub fn run_to_ghz<R: Rng + ?Sized>(
    state: &mut NetworkState,
    params: &SimParams,
    rng: &mut R,
) -> Result<ExecutionRecord> {
    if state.n != params.n_end_nodes {
        return config("network size differs from n_end_nodes");
    }
    let start = state.round;
    let mut rec = ExecutionRecord {
        duration_rounds: 0,
        fidelity: 0.0,
        links_created: 0,
        bsm_attempts: 0,
        bsm_failures: 0,
        fusions: 0,
    };
    // A state completed by manual stepping is delivered without further rounds.
    let mut done = finished_component(state);
    loop {
        if let Some(id) = done {
            let ghz = state.take(id)?;
            rec.fidelity = dm::fidelity_to_ghz(&ghz);
            rec.duration_rounds = state.round - start;
            return Ok(rec);
        }
        rec.links_created += advance_round(state, params, rng)?.len() as u64;
        let bsms = do_switch_bsms(state, params, rng)?;
        if bsms.is_empty() {
            continue;
        }
        rec.bsm_attempts += bsms.len() as u64;
        rec.bsm_failures += bsms.iter().filter(|e| matches!(e, Event::BsmFailed { .. })).count() as u64;
        rec.fusions += do_fusions(state, params, rng)?.len() as u64;
        debug_assert!(state.check_invariants().is_ok());
        done = finished_component(state);
    }
}

/// Warm-up executions discarded by [`estimate_switch`].
pub const WARMUP_EXECUTIONS: usize = 1;

fn run_stream(params: &SimParams, stream: u64, executions: usize) -> Result<Vec<ExecutionRecord>> {
    let mut rng: RngStream = rng_stream(params.seed, stream, tag::SWITCH);
    let mut state = NetworkState::new(params.n_end_nodes);
    for _ in 0..WARMUP_EXECUTIONS {
        run_to_ghz(&mut state, params, &mut rng)?;
    }
    (0..executions).map(|_| run_to_ghz(&mut state, params, &mut rng)).collect()
}

fn summarize(params: &SimParams, records: &[ExecutionRecord]) -> Estimates {
    let durations: Vec<f64> = records.iter().map(|r| r.duration_rounds as f64 * params.dt).collect();
    let fidelities: Vec<f64> = records.iter().map(|r| r.fidelity).collect();
    Estimates::from_samples(&durations, &fidelities)
}

/// `params.shots` consecutive executions on one persistent network, after
/// the warm-up.
pub fn estimate_switch(params: &SimParams) -> Result<Estimates> {
    params.validate()?;
    if params.shots < 2 {
        return config("estimates need at least 2 shots");
    }
    Ok(summarize(params, &run_stream(params, 0, params.shots)?))
}

/// Like [`estimate_switch`] but split over `replicas` independent networks
/// run in parallel, each with its own random stream and warm-up. Results
/// are merged in replica order.
pub fn estimate_switch_replicated(params: &SimParams, replicas: usize) -> Result<Estimates> {
    params.validate()?;
    if replicas == 0 || params.shots < 2 * replicas {
        return config("need at least one replica and two shots per replica");
    }
    let per = params.shots / replicas;
    let extra = params.shots % replicas;
    let parts = (0..replicas)
        .into_par_iter()
        .map(|r| run_stream(params, r as u64, per + usize::from(r < extra)))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<ExecutionRecord> = parts.into_iter().flatten().collect();
    Ok(summarize(params, &all))
}

//! Every example runs to completion.

#[allow(dead_code)]
mod analytic_rates {
    include!("../examples/analytic_rates.rs");
}

#[test]
fn analytic_rates_runs() {
    analytic_rates::run_example().unwrap();
}

#[allow(dead_code)]
mod config_file {
    include!("../examples/config_file.rs");
}

#[test]
fn config_file_runs() {
    config_file::run_example().unwrap();
}

#[allow(dead_code)]
mod factory_simulation {
    include!("../examples/factory_simulation.rs");
}

#[test]
fn factory_simulation_runs() {
    factory_simulation::run_example().unwrap();
}

#[allow(dead_code)]
mod fidelity_sweep {
    include!("../examples/fidelity_sweep.rs");
}

#[test]
fn fidelity_sweep_runs() {
    fidelity_sweep::run_example().unwrap();
}

#[allow(dead_code)]
mod memory_survival {
    include!("../examples/memory_survival.rs");
}

#[test]
fn memory_survival_runs() {
    memory_survival::run_example().unwrap();
}

#[allow(dead_code)]
mod noisy_ghz_state {
    include!("../examples/noisy_ghz_state.rs");
}

#[test]
fn noisy_ghz_state_runs() {
    noisy_ghz_state::run_example().unwrap();
}

#[allow(dead_code)]
mod order_statistics {
    include!("../examples/order_statistics.rs");
}

#[test]
fn order_statistics_runs() {
    order_statistics::run_example().unwrap();
}

#[allow(dead_code)]
mod protocol_comparison {
    include!("../examples/protocol_comparison.rs");
}

#[test]
fn protocol_comparison_runs() {
    protocol_comparison::run_example().unwrap();
}

#[allow(dead_code)]
mod switch_simulation {
    include!("../examples/switch_simulation.rs");
}

#[test]
fn switch_simulation_runs() {
    switch_simulation::run_example().unwrap();
}

#[allow(dead_code)]
mod teleportation {
    include!("../examples/teleportation.rs");
}

#[test]
fn teleportation_runs() {
    teleportation::run_example().unwrap();
}

#[allow(dead_code)]
mod verify_oracles {
    include!("../examples/verify_oracles.rs");
}

#[test]
fn verify_oracles_runs() {
    verify_oracles::run_example().unwrap();
}

//! Closed-form rates, order statistics, memory-survival expectations and
//! fidelities of the factory-node protocol.

mod fidelity;
mod g;
mod numerics;
mod order_stats;
mod rate;

pub use fidelity::{
    coefficient_identity_check, coefficient_identity_check_with_skew, f_rand, fidelity_closed_form,
    fidelity_coefficient, FidelityBreakdown, MAX_SUBSET_NODES,
};
pub use g::{g_value, GMode, GSpec};
pub use order_stats::{expected_order_stat, OrderStatMode};
pub use rate::{expected_n_all_exact, expected_n_all_upper_bound, harmonic, rate_exact, rate_leading};

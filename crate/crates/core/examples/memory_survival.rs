// Survival of stored qubits while the remaining links finish, closed form
// against sampling, for a few subsets of tracked links.

use ghz_star::analytics::{g_value, GMode, GSpec};
use ghz_star::model::rng_stream;
use ghz_star::oracles::mc_g;

pub fn run_example() -> ghz_star::Result<()> {
    let mut rng = rng_stream(3, 0, 0);
    for q in [0.01, 0.1, 0.5] {
        for mask in [0b00001u64, 0b01010, 0b11111] {
            let spec = GSpec::from_mask(5, mask, 2e-3)?;
            let (m, s) = mc_g(&spec, q, 100_000, &mut rng)?;
            println!("q={q:<5} ranks {:?}: sampled {m:.5} +- {s:.1e}, leading {:.5}, lower bound {:.5}",
                spec.positions, g_value(&spec, q, GMode::Leading)?, g_value(&spec, q, GMode::LowerBound)?);
        }
    }
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

// Monte Carlo rate and fidelity of the factory node next to the closed forms,
// with both engines.

use ghz_star::analytics::{fidelity_closed_form, rate_exact, rate_leading, GMode};
use ghz_star::factory::{self, Engine, ShotStreams};
use ghz_star::model::derive_p_ghz;
use ghz_star::SimParams;

pub fn run_example() -> ghz_star::Result<()> {
    let params = SimParams {
        q_bsm: 0.95,
        p_link: 0.99,
        p_bsm: 0.99,
        p_mem: 1.0 - 1e-4,
        p_ghz: derive_p_ghz(0.9, 5)?,
        shots: 4000,
        ..SimParams::new(5, 0.01)
    };

    let shot = factory::run_shot_fast(&params, &mut ShotStreams::new(params.seed, 0))?;
    println!("first shot: links done in rounds {:?}, {} attempt(s), fidelity {:.4}",
        shot.success_rounds, shot.teleport_attempts, shot.fidelity);

    let est = factory::estimate(&params)?;
    println!("rate     MC {:.4e} +- {:.1e}   exact {:.4e}   leading {:.4e}",
        est.rate_mean, est.rate_stderr,
        rate_exact(5, params.q_link, params.q_bsm, params.dt)?,
        rate_leading(5, params.q_link, params.q_bsm, params.dt)?);
    println!("fidelity MC {:.4} +- {:.1e}   leading {:.4}   lower bound {:.4}",
        est.fidelity_mean, est.fidelity_stderr,
        fidelity_closed_form(&params, GMode::Leading)?.value,
        fidelity_closed_form(&params, GMode::LowerBound)?.value);

    let small = SimParams { n_end_nodes: 3, shots: 300, ..params };
    let fast = factory::estimate_with(&small, Engine::Fast)?;
    let full = factory::estimate_with(&small, Engine::DensityMatrix)?;
    println!("N=3 fidelity: closed form per shot {:.4}, density matrices {:.4}", fast.fidelity_mean, full.fidelity_mean);
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

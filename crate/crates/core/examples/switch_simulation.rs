// Steps the 2-switch protocol round by round and then estimates its rate and
// fidelity over many deliveries.

use ghz_star::model::{rng_stream, tag};
use ghz_star::switch::{self, NetworkState};
use ghz_star::SimParams;

pub fn run_example() -> ghz_star::Result<()> {
    let params = SimParams { p_mem: 0.999, p_link: 0.98, ..SimParams::new(4, 0.3) };
    let mut state = NetworkState::new(4);
    let mut rng = rng_stream(params.seed, 0, tag::SWITCH);

    for _ in 0..6 {
        let mut events = switch::advance_round(&mut state, &params, &mut rng)?;
        events.extend(switch::do_switch_bsms(&mut state, &params, &mut rng)?);
        events.extend(switch::do_fusions(&mut state, &params, &mut rng)?);
        println!("round {}: {} component(s) {:?}", state.round(), state.num_components(), events);
    }

    let rec = switch::run_to_ghz(&mut state, &params, &mut rng)?;
    println!("delivered after {} more rounds with fidelity {:.4}, {} link pairs used",
        rec.duration_rounds, rec.fidelity, rec.link_pairs_consumed());

    let est = switch::estimate_switch(&SimParams { shots: 3000, ..params.clone() })?;
    println!("rate {:.4} +- {:.1e}, fidelity {:.4} +- {:.1e}",
        est.rate_mean, est.rate_stderr, est.fidelity_mean, est.fidelity_stderr);
    let est = switch::estimate_switch_replicated(&SimParams { shots: 3000, ..params }, 4)?;
    println!("4 networks: rate {:.4}, fidelity {:.4}", est.rate_mean, est.fidelity_mean);
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

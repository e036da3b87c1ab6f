// Builds a noisy delivered GHZ state two ways, by applying channels and from
// the closed form, and compares their fidelities.

use ghz_star::analytics::f_rand;
use ghz_star::dm;
use ghz_star::model::derive_p_ghz;

pub fn run_example() -> ghz_star::Result<()> {
    let n = 4;
    let labels = dm::end_node_labels(n);
    let p_ghz = derive_p_ghz(0.95, n)?;
    let per_qubit = [0.99, 0.97, 0.95, 0.9];

    let mut built = dm::depolarize(&dm::make_ghz(&labels)?, &labels, p_ghz)?;
    for (q, &p) in labels.iter().zip(&per_qubit) {
        built = dm::depolarize(&built, &[*q], p)?;
    }
    let closed = dm::structured_state(p_ghz, &per_qubit, &labels)?;

    println!("p_ghz for local fidelity 0.95: {p_ghz:.6}");
    println!("trace distance channels vs closed form: {:.1e}", built.trace_distance(&closed)?);
    println!("fidelity from matrix: {:.6}", dm::fidelity_to_ghz(&built));
    println!("fidelity from formula: {:.6}", f_rand(p_ghz, &per_qubit)?);
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

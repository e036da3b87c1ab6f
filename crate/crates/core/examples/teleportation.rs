// Teleports a random qubit through a Bell pair, swaps entanglement across a
// switch, and fuses two Bell pairs into a three-qubit GHZ state.

use ghz_star::dm::{self, BsmOutcome, DensityMatrix, QubitId};
use ghz_star::model::rng_stream;

pub fn run_example() -> ghz_star::Result<()> {
    let mut rng = rng_stream(1, 0, 0);
    let (input, half, far) = (QubitId::new(0, 0), QubitId::new(0, 1), QubitId::new(1, 0));

    let state = DensityMatrix::random(vec![input], &mut rng)?;
    let joint = dm::tensor(&state, &dm::make_bell(half, far)?)?;
    for outcome in BsmOutcome::all() {
        let (p, post) = dm::bell_branch(&joint, input, half, outcome)?;
        let moved = dm::pauli_correct(&post.expect("branch"), far, outcome)?;
        let target = DensityMatrix::from_matrix(vec![far], state.matrix().clone())?;
        println!("outcome {:?}: probability {p:.3}, trace distance {:.1e}", outcome.bits, moved.trace_distance(&target)?);
    }

    // Two links meet at a switch; a BSM there leaves the end nodes entangled.
    let (s1, s2, a, b) = (QubitId::new(0, 1), QubitId::new(0, 2), QubitId::new(1, 0), QubitId::new(2, 0));
    let links = dm::tensor(
        &dm::depolarize(&dm::make_bell(s1, a)?, &[s1, a], 0.95)?,
        &dm::depolarize(&dm::make_bell(s2, b)?, &[s2, b], 0.95)?,
    )?;
    let (outcome, post) = dm::bsm(&links, s1, s2, 1.0, &mut rng)?;
    let swapped = dm::pauli_correct(&post, b, outcome)?;
    println!("swapped pair fidelity {:.4}", dm::fidelity_to_ghz(&swapped.permuted(&[a, b])?));

    // Node 2 holds a second qubit entangled with node 3; fusing at node 2 gives GHZ.
    let (b2, c) = (QubitId::new(2, 1), QubitId::new(3, 0));
    let pairs = dm::tensor(&dm::make_bell(a, b)?, &dm::make_bell(b2, c)?)?;
    let (bit, mut ghz) = dm::fuse(&pairs, b, b2, &mut rng)?;
    if bit == 1 {
        ghz = dm::apply_pauli(&ghz, c, dm::Pauli::X)?;
    }
    println!("fusion bit {bit}, GHZ fidelity {:.6}", dm::fidelity_to_ghz(&ghz.permuted(&[a, b, c])?));
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

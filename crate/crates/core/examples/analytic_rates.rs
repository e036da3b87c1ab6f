// Exact and leading-order factory rates as the network grows.

use ghz_star::analytics::{expected_n_all_exact, expected_n_all_upper_bound, harmonic, rate_exact, rate_leading};

pub fn run_example() -> ghz_star::Result<()> {
    let (q_bsm, dt) = (0.95, 1.0);
    for q in [0.01, 0.1, 1.0] {
        println!("q_link = {q}");
        for n in [2, 3, 5, 8] {
            let exact = rate_exact(n, q, q_bsm, dt)?;
            let lead = rate_leading(n, q, q_bsm, dt)?;
            println!("  N={n}: E[rounds] {:>9.3} (bound {:>9.3})  rate {exact:.4e}  leading {lead:.4e}  ratio {:.3}",
                expected_n_all_exact(n, q)?, expected_n_all_upper_bound(n, q)?, exact / lead);
        }
    }
    println!("H_5 = {:.4}", harmonic(5)?);
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

// Factory node against 2-switch under one noise source at a time.

use ghz_star::{factory, switch, SimParams};

pub fn run_example() -> ghz_star::Result<()> {
    let base = SimParams { shots: 2000, ..SimParams::new(5, 0.01) };
    let cases = [
        ("noiseless, perfect links", SimParams { q_link: 1.0, ..base.clone() }),
        ("memory only", SimParams { p_mem: 1.0 - 1e-4, ..base.clone() }),
        ("link only", SimParams { p_link: 0.95, ..base.clone() }),
        ("BSM noise only", SimParams { p_bsm: 0.95, ..base.clone() }),
        ("lossy BSM", SimParams { q_bsm: 0.8, ..base.clone() }),
    ];
    println!("{:<26}{:>12}{:>12}{:>10}{:>10}", "case", "rate fac", "rate sw", "F fac", "F sw");
    for (name, p) in cases {
        let f = factory::estimate(&p)?;
        let s = switch::estimate_switch(&p)?;
        println!("{name:<26}{:>12.3e}{:>12.3e}{:>10.4}{:>10.4}", f.rate_mean, s.rate_mean, f.fidelity_mean, s.fidelity_mean);
    }
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

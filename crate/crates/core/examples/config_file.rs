// Reads a parameter file, applies command-line style overrides and writes
// the result back out.

use ghz_star::config::{apply_override, params_from_table, parse_config, to_config_text};

pub fn run_example() -> ghz_star::Result<()> {
    let mut table = parse_config("n_end_nodes = 5\nq_link = 0.01\np_mem = 0.9999 # per round\n")?;
    apply_override(&mut table, "q_bsm=0.95")?;
    let params = params_from_table(&table)?;
    print!("{}", to_config_text(&params));

    let broken = parse_config("n_end_nodes = 5\nq_lnk = 0.01\n");
    println!("typo: {}", broken.unwrap_err());
    let missing = params_from_table(&parse_config("p_mem = 0.9\n")?);
    println!("missing: {}", missing.unwrap_err());
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

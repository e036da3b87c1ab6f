// Sweeps the link success probability and writes the same CSV and SVG chart
// as `ghz-star sweep`.

use ghz_star::cli::{evaluate, sweep_chart, write_csv, Protocol};
use ghz_star::factory::Engine;
use ghz_star::model::derive_p_ghz;
use ghz_star::SimParams;

pub fn run_example() -> ghz_star::Result<()> {
    let base = SimParams {
        q_bsm: 0.95,
        p_link: 0.99,
        p_bsm: 0.99,
        p_mem: 1.0 - 1e-4,
        p_ghz: derive_p_ghz(0.9, 5)?,
        shots: 2000,
        ..SimParams::new(5, 0.01)
    };
    let mut rows = Vec::new();
    for q in [0.001, 0.003, 0.01, 0.03, 0.1, 0.5] {
        let mut row = evaluate(Protocol::Factory, &SimParams { q_link: q, ..base.clone() }, Engine::Fast, 1)?;
        row.sweep_param = Some("q_link".into());
        row.sweep_value = Some(q);
        rows.push(row);
    }
    let dir = std::env::temp_dir().join("ghz-star-example");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("fidelity_sweep.csv"), write_csv(&rows, Protocol::Factory, false)?)?;
    std::fs::write(dir.join("fidelity_sweep.svg"), sweep_chart(&rows, Protocol::Factory, "q_link"))?;
    for r in &rows {
        println!("q_link {:<6} F {:.4} +- {:.1e}  leading {:.4}  bound {:.4}", r.sweep_value.unwrap(),
            r.fid_mean, r.fid_stderr, r.analytic_fid_leading.unwrap(), r.analytic_fid_lower_bound.unwrap());
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

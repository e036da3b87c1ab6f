// Expected round of the i-th link success, three ways, checked against a
// direct enumeration of waiting times.

use ghz_star::analytics::{expected_order_stat, OrderStatMode};
use ghz_star::oracles::{default_horizon, enumerate_waiting_times};

pub fn run_example() -> ghz_star::Result<()> {
    let (n, q) = (4, 0.2);
    let table = enumerate_waiting_times(n, q, default_horizon(n, q))?;
    println!("{:>3}{:>12}{:>12}{:>12}{:>12}", "i", "exact", "leading", "upper", "enumerated");
    for i in 1..=n {
        println!("{i:>3}{:>12.6}{:>12.6}{:>12.6}{:>12.6}",
            expected_order_stat(i, n, q, OrderStatMode::Exact)?,
            expected_order_stat(i, n, q, OrderStatMode::Leading)?,
            expected_order_stat(i, n, q, OrderStatMode::UpperBound)?,
            table.expectations[i - 1]);
    }
    println!("probability mass covered by enumeration: {:.3e}", 1.0 - table.captured_mass);
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

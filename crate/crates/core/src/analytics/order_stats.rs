use serde::{Deserialize, Serialize};

use super::numerics::{binomial, one_minus_pow_complement, pow_complement};
use super::rate::check_q;
use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStatMode {
    Exact,
    Leading,
    UpperBound,
}

/// The recursion weights T_0..T_{n−1}, with T_0 = 1.
fn t_weights(n: usize, q: f64) -> Vec<f64> {
    let mut t = vec![1.0];
    for k in 1..n {
        let waiting = pow_complement(q, (n - k) as f64);
        let tk = (1..=k)
            .map(|l| {
                binomial(n - k + l, l) * q.powi(l as i32) * waiting
                    / one_minus_pow_complement(q, (n - k + l) as f64)
                    * t[k - l]
            })
            .sum();
        t.push(tk);
    }
    t
}

/// Expected round in which the `i`-th of `n` independent links first succeeds.
pub fn expected_order_stat(i: usize, n: usize, q: f64, mode: OrderStatMode) -> Result<f64> {
    if i < 1 || i > n {
        return domain(format!("order index {i} outside 1..={n}"));
    }
    check_q(q)?;
    let tail = n + 1 - i..=n;
    Ok(match mode {
        OrderStatMode::Leading => tail.map(|k| 1.0 / k as f64).sum::<f64>() / q,
        OrderStatMode::UpperBound => {
            tail.map(|k| 1.0 / one_minus_pow_complement(q, k as f64)).sum()
        }
        OrderStatMode::Exact => {
            let t = t_weights(n, q);
            1.0 / one_minus_pow_complement(q, n as f64)
                + (1..i)
                    .map(|k| t[k] / one_minus_pow_complement(q, (n - k) as f64))
                    .sum::<f64>()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::expected_n_all_exact;

    #[test]
    fn two_links_half() {
        let e1 = expected_order_stat(1, 2, 0.5, OrderStatMode::Exact).unwrap();
        let e2 = expected_order_stat(2, 2, 0.5, OrderStatMode::Exact).unwrap();
        assert!((e1 - 4.0 / 3.0).abs() < 1e-12);
        assert!((e2 - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn last_order_stat_is_maximum() {
        for n in 1..=6 {
            for q in [0.1, 0.5, 0.9] {
                let a = expected_order_stat(n, n, q, OrderStatMode::Exact).unwrap();
                let b = expected_n_all_exact(n, q).unwrap();
                assert!((a - b).abs() < 1e-10, "n={n} q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn leading_is_accurate_for_small_q() {
        let lead = expected_order_stat(5, 5, 0.001, OrderStatMode::Leading).unwrap();
        let exact = expected_order_stat(5, 5, 0.001, OrderStatMode::Exact).unwrap();
        assert!(((lead - exact) / exact).abs() < 0.01);
    }

    #[test]
    fn monotone_and_bounded() {
        for n in 2..=6 {
            for q in [0.05, 0.3, 0.7] {
                let mut prev = 0.0;
                for i in 1..=n {
                    let e = expected_order_stat(i, n, q, OrderStatMode::Exact).unwrap();
                    assert!(e > prev);
                    assert!(e <= expected_order_stat(i, n, q, OrderStatMode::UpperBound).unwrap() + 1e-12);
                    assert!(e < expected_order_stat(i, n, q * 0.9, OrderStatMode::Exact).unwrap());
                    prev = e;
                }
            }
        }
    }

    #[test]
    fn index_range() {
        assert!(expected_order_stat(0, 3, 0.5, OrderStatMode::Exact).is_err());
        assert!(expected_order_stat(4, 3, 0.5, OrderStatMode::Exact).is_err());
        assert_eq!(expected_order_stat(3, 3, 1.0, OrderStatMode::Exact).unwrap(), 1.0);
    }
}

use super::numerics::{binomial, one_minus_pow_complement};
use crate::error::{domain, Result};

pub(crate) fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return domain(format!("success probability {q} must lie in (0, 1]"));
    }
    Ok(())
}

/// The partial sum 1 + 1/2 + ... + 1/n.
pub fn harmonic(n: usize) -> Result<f64> {
    if n < 1 {
        return domain("harmonic number needs n >= 1");
    }
    Ok((1..=n).map(|k| 1.0 / k as f64).sum())
}

/// Expected maximum of `n` i.i.d. geometric variables with success probability `q`.
pub fn expected_n_all_exact(n: usize, q: f64) -> Result<f64> {
    if n < 1 {
        return domain("need at least one link");
    }
    check_q(q)?;
    Ok((1..=n)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign * binomial(n, j) / one_minus_pow_complement(q, j as f64)
        })
        .sum())
}

/// 1 + H_n / (−ln(1 − q)), which is 1 at q = 1.
pub fn expected_n_all_upper_bound(n: usize, q: f64) -> Result<f64> {
    let h = harmonic(n)?;
    check_q(q)?;
    if q == 1.0 {
        return Ok(1.0);
    }
    Ok(1.0 + h / -(-q).ln_1p())
}

fn check_rate_args(q_bsm: f64, dt: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q_bsm) {
        return domain(format!("q_bsm = {q_bsm} outside [0, 1]"));
    }
    if dt.is_nan() || dt <= 0.0 {
        return domain(format!("dt = {dt} must be positive"));
    }
    Ok(())
}

/// Factory-node rate to leading order in `q_link`: q_bsm^n q_link / (H_n dt).
pub fn rate_leading(n: usize, q_link: f64, q_bsm: f64, dt: f64) -> Result<f64> {
    check_rate_args(q_bsm, dt)?;
    check_q(q_link)?;
    Ok(q_bsm.powi(n as i32) * q_link / (harmonic(n)? * dt))
}

/// Exact factory-node rate: q_bsm^n / (E[n_all] dt).
pub fn rate_exact(n: usize, q_link: f64, q_bsm: f64, dt: f64) -> Result<f64> {
    check_rate_args(q_bsm, dt)?;
    Ok(q_bsm.powi(n as i32) / (expected_n_all_exact(n, q_link)? * dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1).unwrap(), 1.0);
        assert_eq!(harmonic(2).unwrap(), 1.5);
        assert!((harmonic(5).unwrap() - 137.0 / 60.0).abs() < 1e-15);
        assert!(harmonic(0).is_err());
    }

    #[test]
    fn n_all_values() {
        assert!((expected_n_all_exact(1, 0.3).unwrap() - 1.0 / 0.3).abs() < 1e-12);
        assert!((expected_n_all_exact(2, 0.5).unwrap() - 8.0 / 3.0).abs() < 1e-12);
        for n in 1..8 {
            assert!((expected_n_all_exact(n, 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(expected_n_all_exact(3, 0.0).is_err());
        assert!(expected_n_all_exact(3, 1.2).is_err());
    }

    #[test]
    fn upper_bound_dominates() {
        assert!(expected_n_all_upper_bound(5, 0.01).unwrap() > expected_n_all_exact(5, 0.01).unwrap());
        let b = expected_n_all_upper_bound(1, 0.5).unwrap();
        assert!((b - (1.0 + 1.0 / 2f64.ln())).abs() < 1e-12);
        assert!((b - 2.4427).abs() < 1e-4);
        assert_eq!(expected_n_all_upper_bound(4, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn rates() {
        assert!((rate_exact(1, 0.5, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        let lead = rate_leading(5, 0.01, 0.95, 1.0).unwrap();
        assert!((lead - 0.95f64.powi(5) * 0.01 / (137.0 / 60.0)).abs() < 1e-15);
        assert!((lead - 0.003389).abs() < 5e-7);
        for q in [0.001, 0.01, 0.1, 0.5, 0.9, 1.0] {
            assert!(rate_leading(5, q, 1.0, 1.0).unwrap() <= rate_exact(5, q, 1.0, 1.0).unwrap());
        }
    }
}

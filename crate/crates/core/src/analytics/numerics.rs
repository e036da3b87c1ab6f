//! Powers of (1 − q) that stay accurate for small q and large exponents.

/// (1 − q)^k, with 0^0 = 1.
pub(crate) fn pow_complement(q: f64, k: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else if q >= 1.0 {
        0.0
    } else {
        (k * (-q).ln_1p()).exp()
    }
}

/// 1 − (1 − q)^k.
pub(crate) fn one_minus_pow_complement(q: f64, k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else if q >= 1.0 {
        1.0
    } else {
        -(k * (-q).ln_1p()).exp_m1()
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers() {
        assert_eq!(pow_complement(1.0, 0.0), 1.0);
        assert_eq!(pow_complement(1.0, 3.0), 0.0);
        assert!((pow_complement(0.5, 3.0) - 0.125).abs() < 1e-15);
        assert!((one_minus_pow_complement(1e-12, 2.0) / 2e-12 - 1.0).abs() < 1e-11);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(6, 0), 1.0);
        assert_eq!(binomial(2, 3), 0.0);
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_labels, spread, with_matrix, with_parts, DensityMatrix, QubitId, ZERO};
use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

fn check_parameter(p: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("{what} = {p} outside [0, 1]"));
    }
    Ok(())
}

/// Joint depolarizing channel on `targets`:
/// ρ ↦ pρ + (1−p) Tr_T(ρ) ⊗ 𝟙/2^|T|.
pub fn depolarize(dm: &DensityMatrix, targets: &[QubitId], p: f64) -> Result<DensityMatrix> {
    check_parameter(p, "depolarizing parameter")?;
    let pos = dm.positions(targets)?;
    if p == 1.0 || pos.is_empty() {
        return Ok(dm.clone());
    }
    let n = dm.num_qubits();
    let offsets = spread(&pos, n);
    let tmask = offsets[offsets.len() - 1];
    let mix = (1.0 - p) / offsets.len() as f64;
    let m = dm.matrix();
    let d = dm.dim();
    let out = DMatrix::from_fn(d, d, |r, c| {
        let mut v = m[(r, c)] * p;
        if (r ^ c) & tmask == 0 {
            let (r0, c0) = (r & !tmask, c & !tmask);
            let s: Complex64 = offsets.iter().map(|&x| m[(r0 | x, c0 | x)]).sum();
            v += s * mix;
        }
        v
    });
    Ok(with_matrix(dm, out))
}

/// Conjugates the register by a single-qubit Pauli operator.
pub fn apply_pauli(dm: &DensityMatrix, q: QubitId, pauli: Pauli) -> Result<DensityMatrix> {
    let bit = 1usize << dm.shift(dm.position(q)?);
    let m = dm.matrix();
    let d = dm.dim();
    let sign = |r: usize, c: usize| if ((r ^ c) & bit) != 0 { -1.0 } else { 1.0 };
    let out = match pauli {
        Pauli::X => DMatrix::from_fn(d, d, |r, c| m[(r ^ bit, c ^ bit)]),
        Pauli::Z => DMatrix::from_fn(d, d, |r, c| m[(r, c)] * sign(r, c)),
        // YρY = XZρZX
        Pauli::Y => DMatrix::from_fn(d, d, |r, c| m[(r ^ bit, c ^ bit)] * sign(r, c)),
    };
    Ok(with_matrix(dm, out))
}

pub fn apply_cnot(dm: &DensityMatrix, control: QubitId, target: QubitId) -> Result<DensityMatrix> {
    if control == target {
        return domain("CNOT control and target coincide");
    }
    let cb = 1usize << dm.shift(dm.position(control)?);
    let tb = 1usize << dm.shift(dm.position(target)?);
    let perm = |i: usize| if i & cb != 0 { i ^ tb } else { i };
    let m = dm.matrix();
    let d = dm.dim();
    Ok(with_matrix(dm, DMatrix::from_fn(d, d, |r, c| m[(perm(r), perm(c))])))
}

/// The closed-form state obtained by depolarizing a GHZ state jointly with
/// `p_ghz` and then each qubit `i` with `p[i]`, written as the explicit sum
/// over subsets of depolarized qubits.
pub fn structured_state(p_ghz: f64, p: &[f64], labels: &[QubitId]) -> Result<DensityMatrix> {
    let n = p.len();
    if n < 2 {
        return domain(format!("need at least 2 qubits, got {n}"));
    }
    if labels.len() != n {
        return domain("one label per qubit parameter required");
    }
    check_labels(labels)?;
    check_parameter(p_ghz, "p_ghz")?;
    for &pi in p {
        check_parameter(pi, "per-qubit parameter")?;
    }
    let d = 1usize << n;
    let full = d - 1;
    let mut diag = vec![(1.0 - p_ghz) / d as f64; d];
    let mut mat = DMatrix::from_element(d, d, ZERO);

    // subset weights ∏_U (1−p_i)/2 · ∏_{not U} p_j, with bit (n−1−i) marking qubit i
    let weight = |u: usize| -> f64 {
        (0..n)
            .map(|i| if u >> (n - 1 - i) & 1 == 1 { (1.0 - p[i]) / 2.0 } else { p[i] })
            .product()
    };

    let all_kept = weight(0);
    let all_mixed = weight(full);
    for v in diag.iter_mut() {
        *v += p_ghz * all_mixed;
    }
    for u in 1..full {
        let w = 0.5 * p_ghz * weight(u);
        if w == 0.0 {
            continue;
        }
        let rest = full & !u;
        for (idx, v) in diag.iter_mut().enumerate() {
            let bits = idx & rest;
            if bits == 0 || bits == rest {
                *v += w;
            }
        }
    }
    for (idx, v) in diag.into_iter().enumerate() {
        mat[(idx, idx)] = Complex64::new(v, 0.0);
    }
    let g = Complex64::new(0.5 * p_ghz * all_kept, 0.0);
    for &r in &[0, full] {
        for &c in &[0, full] {
            mat[(r, c)] += g;
        }
    }
    Ok(with_parts(labels.to_vec(), mat))
}

//! Dense density matrices over labelled qubit registers.
//!
//! The register order is the label order, and the first label is the most
//! significant bit of a basis index. `tensor` appends the second operand's
//! labels after the first's.

mod channels;
mod measure;

pub use channels::{apply_cnot, apply_pauli, depolarize, structured_state, Pauli};
pub use measure::{
    bell_branch, bell_vector, bsm, fuse, fuse_branch, pauli_correct, project_out, BsmOutcome,
};

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{domain, Error, Result};

/// Allowed deviation of the trace from one, and of entrywise equality checks.
pub const TRACE_TOL: f64 = 1e-10;
/// Allowed entrywise deviation from Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as non-negative.
pub const PSD_TOL: f64 = 1e-10;
/// Largest register the engine will build.
pub const MAX_QUBITS: usize = 12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A qubit addressed by its node (0 is the central node) and memory slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId {
    pub node: usize,
    pub slot: usize,
}

impl QubitId {
    pub const fn new(node: usize, slot: usize) -> Self {
        Self { node, slot }
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}.{}", self.node, self.slot)
    }
}

/// Labels `(i, 0)` for end nodes `i = 1..=n`.
pub fn end_node_labels(n: usize) -> Vec<QubitId> {
    (1..=n).map(|i| QubitId::new(i, 0)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<QubitId>,
    mat: DMatrix<Complex64>,
}

fn check_labels(labels: &[QubitId]) -> Result<()> {
    if labels.len() > MAX_QUBITS {
        return domain(format!(
            "register of {} qubits exceeds the {MAX_QUBITS}-qubit cap",
            labels.len()
        ));
    }
    for (k, q) in labels.iter().enumerate() {
        if labels[..k].contains(q) {
            return domain(format!("duplicate qubit label {q}"));
        }
    }
    Ok(())
}

impl DensityMatrix {
    /// Wraps a matrix without checking the state invariants; use [`Self::check`].
    pub fn from_matrix(labels: Vec<QubitId>, mat: DMatrix<Complex64>) -> Result<Self> {
        check_labels(&labels)?;
        let dim = 1usize << labels.len();
        if mat.nrows() != dim || mat.ncols() != dim {
            return domain(format!(
                "matrix is {}x{}, register needs {dim}x{dim}",
                mat.nrows(),
                mat.ncols()
            ));
        }
        Ok(Self { labels, mat })
    }

    /// The projector onto a pure state; `amplitudes` are normalized first.
    pub fn from_pure(labels: Vec<QubitId>, amplitudes: &[Complex64]) -> Result<Self> {
        check_labels(&labels)?;
        let dim = 1usize << labels.len();
        if amplitudes.len() != dim {
            return domain(format!("expected {dim} amplitudes, got {}", amplitudes.len()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return domain("zero state vector");
        }
        let v: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        let mat = DMatrix::from_fn(dim, dim, |r, c| v[r] * v[c].conj());
        Ok(Self { labels, mat })
    }

    pub fn maximally_mixed(labels: Vec<QubitId>) -> Result<Self> {
        check_labels(&labels)?;
        let dim = 1usize << labels.len();
        let mat = DMatrix::from_diagonal_element(dim, dim, ONE / dim as f64);
        Ok(Self { labels, mat })
    }

    /// A random full-rank state, for tests and verification runs.
    pub fn random<R: Rng + ?Sized>(labels: Vec<QubitId>, rng: &mut R) -> Result<Self> {
        check_labels(&labels)?;
        let dim = 1usize << labels.len();
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let mut mat = &g * g.adjoint();
        let tr = mat.trace();
        mat /= tr;
        Ok(Self { labels, mat })
    }

    pub fn labels(&self) -> &[QubitId] {
        &self.labels
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.labels.contains(&q)
    }

    pub fn position(&self, q: QubitId) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| *l == q)
            .ok_or_else(|| Error::Domain(format!("qubit {q} is not in the register")))
    }

    pub(crate) fn positions(&self, qs: &[QubitId]) -> Result<Vec<usize>> {
        let pos = qs.iter().map(|&q| self.position(q)).collect::<Result<Vec<_>>>()?;
        for (k, p) in pos.iter().enumerate() {
            if pos[..k].contains(p) {
                return domain(format!("qubit {} listed twice", self.labels[*p]));
            }
        }
        Ok(pos)
    }

    pub(crate) fn shift(&self, pos: usize) -> usize {
        self.labels.len() - 1 - pos
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Checks trace and Hermiticity.
    pub fn check(&self) -> Result<()> {
        let tr = self.mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Internal(format!("trace {tr} deviates from 1")));
        }
        let dev = self.hermiticity_error();
        if dev > HERMITIAN_TOL {
            return Err(Error::Internal(format!("Hermiticity violated by {dev:e}")));
        }
        Ok(())
    }

    /// [`Self::check`] plus positivity of the spectrum.
    pub fn check_psd(&self) -> Result<()> {
        self.check()?;
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::Internal(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.mat[(r, c)] - self.mat[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().collect()
    }

    /// The same state with the register reordered to `order`.
    pub fn permuted(&self, order: &[QubitId]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return domain("permutation must list every qubit exactly once");
        }
        let pos = self.positions(order)?;
        let n = self.labels.len();
        let dim = self.dim();
        let map: Vec<usize> = (0..dim)
            .map(|idx| {
                let mut old = 0;
                for (k, &p) in pos.iter().enumerate() {
                    if idx >> (n - 1 - k) & 1 == 1 {
                        old |= 1 << (n - 1 - p);
                    }
                }
                old
            })
            .collect();
        let mat = DMatrix::from_fn(dim, dim, |r, c| self.mat[(map[r], map[c])]);
        Ok(Self { labels: order.to_vec(), mat })
    }

    fn aligned(&self, other: &Self) -> Result<Self> {
        if self.labels == other.labels {
            Ok(other.clone())
        } else {
            other.permuted(&self.labels)
        }
    }

    /// Largest entrywise difference; `other` is reordered to this register first.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let o = self.aligned(other)?;
        Ok((&self.mat - &o.mat).iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        let o = self.aligned(other)?;
        let diff = &self.mat - &o.mat;
        let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(0.5 * herm.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>())
    }
}

/// Full basis indices for every assignment of the qubits at `positions`,
/// enumerated with the first position as the most significant bit.
pub(crate) fn spread(positions: &[usize], n: usize) -> Vec<usize> {
    let m = positions.len();
    (0..1usize << m)
        .map(|a| {
            let mut full = 0;
            for (j, &p) in positions.iter().enumerate() {
                if a >> (m - 1 - j) & 1 == 1 {
                    full |= 1 << (n - 1 - p);
                }
            }
            full
        })
        .collect()
}

pub(crate) fn complement(n: usize, positions: &[usize]) -> Vec<usize> {
    (0..n).filter(|p| !positions.contains(p)).collect()
}

/// The pure state |φ00⟩ on `(a, b)`.
pub fn make_bell(a: QubitId, b: QubitId) -> Result<DensityMatrix> {
    make_ghz(&[a, b])
}

/// The pure GHZ state on the given register.
pub fn make_ghz(labels: &[QubitId]) -> Result<DensityMatrix> {
    if labels.len() < 2 {
        return domain(format!("GHZ state needs at least 2 qubits, got {}", labels.len()));
    }
    check_labels(labels)?;
    let dim = 1usize << labels.len();
    let mut mat = DMatrix::from_element(dim, dim, ZERO);
    let half = Complex64::new(0.5, 0.0);
    for &r in &[0, dim - 1] {
        for &c in &[0, dim - 1] {
            mat[(r, c)] = half;
        }
    }
    Ok(DensityMatrix { labels: labels.to_vec(), mat })
}

pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    if let Some(q) = b.labels.iter().find(|q| a.labels.contains(q)) {
        return domain(format!("qubit {q} appears in both registers"));
    }
    let mut labels = a.labels.clone();
    labels.extend_from_slice(&b.labels);
    check_labels(&labels)?;
    Ok(DensityMatrix { labels, mat: a.mat.kronecker(&b.mat) })
}

/// Traces out `targets`, keeping the remaining qubits in register order.
pub fn partial_trace(dm: &DensityMatrix, targets: &[QubitId]) -> Result<DensityMatrix> {
    let n = dm.num_qubits();
    let tpos = dm.positions(targets)?;
    let kpos = complement(n, &tpos);
    let keep = spread(&kpos, n);
    let traced = spread(&tpos, n);
    let dk = keep.len();
    let mat = DMatrix::from_fn(dk, dk, |a, b| {
        traced.iter().map(|&x| dm.mat[(keep[a] | x, keep[b] | x)]).sum()
    });
    let labels = kpos.iter().map(|&p| dm.labels[p]).collect();
    Ok(DensityMatrix { labels, mat })
}

/// Reduced state of `qubits`, in the order given.
pub fn reduced(dm: &DensityMatrix, qubits: &[QubitId]) -> Result<DensityMatrix> {
    let others: Vec<QubitId> =
        dm.labels.iter().copied().filter(|q| !qubits.contains(q)).collect();
    partial_trace(dm, &others)?.permuted(qubits)
}

/// ⟨GHZ|ρ|GHZ⟩ for the GHZ state on the full register.
///
/// # Panics
/// If the register has fewer than two qubits or the overlap has a
/// non-negligible imaginary part.
pub fn fidelity_to_ghz(dm: &DensityMatrix) -> f64 {
    assert!(dm.num_qubits() >= 2, "GHZ fidelity needs at least 2 qubits");
    let last = dm.dim() - 1;
    let f = (dm.mat[(0, 0)] + dm.mat[(0, last)] + dm.mat[(last, 0)] + dm.mat[(last, last)]) * 0.5;
    assert!(f.im.abs() < 1e-10, "GHZ overlap has imaginary part {}", f.im);
    f.re
}

pub(crate) fn with_matrix(dm: &DensityMatrix, mat: DMatrix<Complex64>) -> DensityMatrix {
    DensityMatrix { labels: dm.labels.clone(), mat }
}

pub(crate) fn with_parts(labels: Vec<QubitId>, mat: DMatrix<Complex64>) -> DensityMatrix {
    DensityMatrix { labels, mat }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: usize) -> QubitId {
        QubitId::new(n, 0)
    }

    #[test]
    fn bell_is_pure_and_normalized() {
        let b = make_bell(q(1), q(2)).unwrap();
        assert!((b.trace() - 1.0).abs() < 1e-15);
        assert!((fidelity_to_ghz(&b) - 1.0).abs() < 1e-15);
        assert_eq!(b, make_ghz(&[q(1), q(2)]).unwrap());
    }

    #[test]
    fn ghz_rejects_single_qubit() {
        assert!(matches!(make_ghz(&[q(1)]), Err(Error::Domain(_))));
    }

    #[test]
    fn ghz_five_has_unit_trace() {
        let g = make_ghz(&end_node_labels(5)).unwrap();
        assert!((g.trace() - 1.0).abs() < 1e-15);
        g.check_psd().unwrap();
    }

    #[test]
    fn maximally_mixed_fidelity() {
        let m = DensityMatrix::maximally_mixed(end_node_labels(5)).unwrap();
        assert!((fidelity_to_ghz(&m) - 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_then_trace_recovers_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DensityMatrix::random(vec![q(1), q(2)], &mut rng).unwrap();
        let b = DensityMatrix::random(vec![q(3)], &mut rng).unwrap();
        let t = tensor(&a, &b).unwrap();
        assert!((t.trace() - 1.0).abs() < 1e-12);
        let back = partial_trace(&t, &[q(3)]).unwrap();
        assert!(a.max_abs_diff(&back).unwrap() < 1e-12);
        let other = partial_trace(&t, &[q(1), q(2)]).unwrap();
        assert!(b.max_abs_diff(&other).unwrap() < 1e-12);
    }

    #[test]
    fn tensor_rejects_collision() {
        let a = make_bell(q(1), q(2)).unwrap();
        assert!(tensor(&a, &a).is_err());
    }

    #[test]
    fn ghz_marginal_is_classically_correlated() {
        let g = make_ghz(&[q(1), q(2), q(3)]).unwrap();
        let r = partial_trace(&g, &[q(2)]).unwrap();
        assert_eq!(r.labels(), &[q(1), q(3)]);
        for row in 0..4 {
            for col in 0..4 {
                let want = if row == col && (row == 0 || row == 3) { 0.5 } else { 0.0 };
                assert!((r.entry(row, col) - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn permutation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = DensityMatrix::random(vec![q(1), q(2), q(3)], &mut rng).unwrap();
        let p = a.permuted(&[q(3), q(1), q(2)]).unwrap();
        let back = p.permuted(&[q(1), q(2), q(3)]).unwrap();
        assert_eq!(a.max_abs_diff(&back).unwrap(), 0.0);
        assert!(a.max_abs_diff(&p).unwrap() < 1e-15);
        let r = reduced(&a, &[q(3), q(1)]).unwrap();
        let r2 = partial_trace(&a, &[q(2)]).unwrap();
        assert!(r.max_abs_diff(&r2).unwrap() < 1e-15);
    }

    #[test]
    fn random_state_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = DensityMatrix::random(end_node_labels(3), &mut rng).unwrap();
        a.check_psd().unwrap();
    }

    #[test]
    fn cap_is_enforced() {
        assert!(DensityMatrix::maximally_mixed(end_node_labels(13)).is_err());
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::channels::{apply_cnot, apply_pauli, Pauli};
use super::{complement, reduced, spread, with_parts, DensityMatrix, QubitId, ONE, ZERO};
use crate::error::{domain, Error, Result};

/// Branches below this probability are treated as impossible.
const BRANCH_EPS: f64 = 1e-14;

/// Result of a Bell-state measurement. `bits = (i, j)` names the projector
/// onto |φ_ij⟩ = (𝟙 ⊗ X^i Z^j)|φ00⟩ and is meaningful only on success.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BsmOutcome {
    pub bits: (u8, u8),
    pub succeeded: bool,
}

impl BsmOutcome {
    pub const FAILED: Self = Self { bits: (0, 0), succeeded: false };

    pub fn success(i: u8, j: u8) -> Self {
        Self { bits: (i & 1, j & 1), succeeded: true }
    }

    /// All four successful outcomes, in index order.
    pub fn all() -> [Self; 4] {
        [Self::success(0, 0), Self::success(0, 1), Self::success(1, 0), Self::success(1, 1)]
    }
}

/// Amplitudes of |φ_ij⟩ over the basis |00⟩, |01⟩, |10⟩, |11⟩.
pub fn bell_vector(i: u8, j: u8) -> [Complex64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = [ZERO; 4];
    let second = (i & 1) as usize;
    v[second] = Complex64::new(h, 0.0);
    v[2 | (1 - second)] = Complex64::new(if j & 1 == 1 { -h } else { h }, 0.0);
    v
}

/// Projects `qubits` onto the pure state `vector` and removes them.
///
/// Returns the branch probability and, when it is non-negligible, the
/// renormalized post-measurement state.
pub fn project_out(
    dm: &DensityMatrix,
    qubits: &[QubitId],
    vector: &[Complex64],
) -> Result<(f64, Option<DensityMatrix>)> {
    let n = dm.num_qubits();
    let pos = dm.positions(qubits)?;
    if vector.len() != 1 << pos.len() {
        return domain("projector vector does not match the measured qubits");
    }
    let kpos = complement(n, &pos);
    let keep = spread(&kpos, n);
    let meas = spread(&pos, n);
    let m = dm.matrix();
    let dk = keep.len();
    let support: Vec<(usize, Complex64)> = meas
        .iter()
        .zip(vector)
        .filter(|(_, v)| v.norm_sqr() > 0.0)
        .map(|(&x, &v)| (x, v))
        .collect();
    let mut out = DMatrix::from_fn(dk, dk, |a, b| {
        let mut s = ZERO;
        for &(x, vx) in &support {
            for &(y, vy) in &support {
                s += vx.conj() * m[(keep[a] | x, keep[b] | y)] * vy;
            }
        }
        s
    });
    let prob = out.trace().re;
    if prob <= BRANCH_EPS {
        return Ok((prob.max(0.0), None));
    }
    out /= Complex64::new(prob, 0.0);
    let labels = kpos.iter().map(|&p| dm.labels()[p]).collect();
    Ok((prob, Some(with_parts(labels, out))))
}

fn distinct_pair(dm: &DensityMatrix, a: QubitId, b: QubitId) -> Result<()> {
    if a == b {
        return domain(format!("measurement needs two distinct qubits, got {a} twice"));
    }
    dm.position(a)?;
    dm.position(b)?;
    Ok(())
}

/// One successful BSM branch: its probability and post-measurement state.
pub fn bell_branch(
    dm: &DensityMatrix,
    qa: QubitId,
    qb: QubitId,
    outcome: BsmOutcome,
) -> Result<(f64, Option<DensityMatrix>)> {
    distinct_pair(dm, qa, qb)?;
    if !outcome.succeeded {
        return domain("a failed outcome has no measurement branch");
    }
    project_out(dm, &[qa, qb], &bell_vector(outcome.bits.0, outcome.bits.1))
}

/// Noiseless Bell-state measurement of `qa, qb` that succeeds with probability
/// `q_bsm`. On failure the input state is returned unchanged.
pub fn bsm<R: Rng + ?Sized>(
    dm: &DensityMatrix,
    qa: QubitId,
    qb: QubitId,
    q_bsm: f64,
    rng: &mut R,
) -> Result<(BsmOutcome, DensityMatrix)> {
    distinct_pair(dm, qa, qb)?;
    if !(0.0..=1.0).contains(&q_bsm) {
        return domain(format!("q_bsm = {q_bsm} outside [0, 1]"));
    }
    if rng.gen::<f64>() >= q_bsm {
        return Ok((BsmOutcome::FAILED, dm.clone()));
    }
    let pair = reduced(dm, &[qa, qb])?;
    let probs: Vec<f64> = BsmOutcome::all()
        .iter()
        .map(|o| {
            let v = bell_vector(o.bits.0, o.bits.1);
            let mut s = ZERO;
            for x in 0..4 {
                for y in 0..4 {
                    s += v[x].conj() * pair.entry(x, y) * v[y];
                }
            }
            s.re.max(0.0)
        })
        .collect();
    let outcome = BsmOutcome::all()[sample_index(&probs, rng.gen())];
    let (_, state) = bell_branch(dm, qa, qb, outcome)?;
    let state = state.ok_or_else(|| Error::Internal("sampled a zero-probability branch".into()))?;
    Ok((outcome, state))
}

/// Index drawn from unnormalized weights by inverse CDF on `u ∈ [0, 1)`,
/// never selecting a zero-weight entry.
fn sample_index(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &w) in weights.iter().enumerate() {
        if w <= BRANCH_EPS {
            continue;
        }
        last = k;
        acc += w;
        if target < acc {
            return k;
        }
    }
    last
}

/// Undoes the teleportation byproduct of `outcome` at `q` by applying Z^j X^i.
pub fn pauli_correct(dm: &DensityMatrix, q: QubitId, outcome: BsmOutcome) -> Result<DensityMatrix> {
    if !outcome.succeeded {
        return domain("cannot correct after a failed BSM");
    }
    dm.position(q)?;
    let mut out = dm.clone();
    if outcome.bits.0 == 1 {
        out = apply_pauli(&out, q, Pauli::X)?;
    }
    if outcome.bits.1 == 1 {
        out = apply_pauli(&out, q, Pauli::Z)?;
    }
    Ok(out)
}

/// One branch of a fusion: CNOT then projection of `target` onto |bit⟩.
pub fn fuse_branch(
    dm: &DensityMatrix,
    control: QubitId,
    target: QubitId,
    bit: u8,
) -> Result<(f64, Option<DensityMatrix>)> {
    distinct_pair(dm, control, target)?;
    let after = apply_cnot(dm, control, target)?;
    let v = if bit & 1 == 0 { [ONE, ZERO] } else { [ZERO, ONE] };
    project_out(&after, &[target], &v)
}

/// CNOT from `control` to `target`, then a Z measurement of `target` by the
/// Born rule. The target is removed; outcome-dependent corrections are left
/// to the caller.
pub fn fuse<R: Rng + ?Sized>(
    dm: &DensityMatrix,
    control: QubitId,
    target: QubitId,
    rng: &mut R,
) -> Result<(u8, DensityMatrix)> {
    distinct_pair(dm, control, target)?;
    let after = apply_cnot(dm, control, target)?;
    let tb = 1usize << after.shift(after.position(target)?);
    let p1: f64 = (0..after.dim()).filter(|i| i & tb != 0).map(|i| after.entry(i, i).re).sum();
    let bit = sample_index(&[(1.0 - p1).max(0.0), p1.max(0.0)], rng.gen()) as u8;
    let v = if bit == 0 { [ONE, ZERO] } else { [ZERO, ONE] };
    let (_, state) = project_out(&after, &[target], &v)?;
    let state = state.ok_or_else(|| Error::Internal("sampled a zero-probability branch".into()))?;
    Ok((bit, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dm::{depolarize, fidelity_to_ghz, make_bell, make_ghz, tensor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: usize, s: usize) -> QubitId {
        QubitId::new(n, s)
    }

    fn ket0() -> DensityMatrix {
        DensityMatrix::from_pure(vec![q(0, 0)], &[ONE, ZERO]).unwrap()
    }

    #[test]
    fn bell_vectors_are_orthonormal() {
        let all = BsmOutcome::all();
        for a in all {
            for b in all {
                let (va, vb) = (bell_vector(a.bits.0, a.bits.1), bell_vector(b.bits.0, b.bits.1));
                let ip: Complex64 = va.iter().zip(&vb).map(|(x, y)| x.conj() * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn teleport_zero_every_outcome() {
        let state = tensor(&ket0(), &make_bell(q(0, 1), q(1, 0)).unwrap()).unwrap();
        for o in BsmOutcome::all() {
            let (p, post) = bell_branch(&state, q(0, 0), q(0, 1), o).unwrap();
            assert!((p - 0.25).abs() < 1e-12);
            let fixed = pauli_correct(&post.unwrap(), q(1, 0), o).unwrap();
            assert!((fixed.entry(0, 0).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn failed_bsm_leaves_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = make_bell(q(0, 0), q(1, 0)).unwrap();
        for _ in 0..10_000 {
            let (o, s) = bsm(&b, q(0, 0), q(1, 0), 0.0, &mut rng).unwrap();
            assert!(!o.succeeded);
            assert_eq!(s, b);
        }
    }

    #[test]
    fn bsm_rejects_same_qubit() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = make_bell(q(0, 0), q(1, 0)).unwrap();
        assert!(bsm(&b, q(0, 0), q(0, 0), 1.0, &mut rng).is_err());
    }

    #[test]
    fn correction_conventions() {
        let zero = DensityMatrix::from_pure(vec![q(1, 0)], &[ONE, ZERO]).unwrap();
        assert_eq!(pauli_correct(&zero, q(1, 0), BsmOutcome::success(0, 0)).unwrap(), zero);
        let flipped = pauli_correct(&zero, q(1, 0), BsmOutcome::success(1, 0)).unwrap();
        assert_eq!(flipped.entry(1, 1), ONE);
        assert!(pauli_correct(&zero, q(1, 0), BsmOutcome::FAILED).is_err());
    }

    #[test]
    fn swapping_yields_bell_between_ends() {
        let a = make_bell(q(0, 1), q(1, 0)).unwrap();
        let b = make_bell(q(0, 2), q(2, 0)).unwrap();
        let t = tensor(&a, &b).unwrap();
        for o in BsmOutcome::all() {
            let (p, post) = bell_branch(&t, q(0, 1), q(0, 2), o).unwrap();
            assert!((p - 0.25).abs() < 1e-12);
            let fixed = pauli_correct(&post.unwrap(), q(2, 0), o).unwrap();
            assert!((fidelity_to_ghz(&fixed) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fusing_two_bells_gives_ghz3() {
        let a = make_bell(q(1, 0), q(2, 0)).unwrap();
        let b = make_bell(q(1, 1), q(3, 0)).unwrap();
        let t = tensor(&a, &b).unwrap();
        for bit in 0..2u8 {
            let (p, post) = fuse_branch(&t, q(1, 0), q(1, 1), bit).unwrap();
            assert!((p - 0.5).abs() < 1e-12);
            let mut s = post.unwrap();
            if bit == 1 {
                s = apply_pauli(&s, q(3, 0), Pauli::X).unwrap();
            }
            assert!((fidelity_to_ghz(&s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_fusion_of_ghz3_and_bell() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = make_ghz(&[q(1, 0), q(2, 0), q(3, 0)]).unwrap();
        let b = make_bell(q(1, 1), q(4, 0)).unwrap();
        let t = tensor(&g, &b).unwrap();
        for _ in 0..20 {
            let (bit, mut s) = fuse(&t, q(1, 0), q(1, 1), &mut rng).unwrap();
            if bit == 1 {
                s = apply_pauli(&s, q(4, 0), Pauli::X).unwrap();
            }
            assert_eq!(s.num_qubits(), 4);
            assert!((fidelity_to_ghz(&s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarized_resource_outcomes_are_uniform() {
        let g = depolarize(&ket0(), &[q(0, 0)], 0.7).unwrap();
        let b = depolarize(&make_bell(q(0, 1), q(1, 0)).unwrap(), &[q(1, 0)], 0.6).unwrap();
        let t = tensor(&g, &b).unwrap();
        for o in BsmOutcome::all() {
            let (p, _) = bell_branch(&t, q(0, 0), q(0, 1), o).unwrap();
            assert!((p - 0.25).abs() < 1e-12);
        }
    }
}

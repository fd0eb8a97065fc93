//! Builders and closed-form references for the three worked models:
//! k-body common-bath dephasing, independent qubit dephasing with GHZ or
//! product probes, and a lossy bosonic mode with a Fock input.

pub mod dephasing;
pub mod kbody;
pub mod lossy;

pub use dephasing::{DephasingForms, DephasingModel, InitialKind, Target};
pub use kbody::KBodyModel;
pub use lossy::LossyBosonModel;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{eigh, identity, kron_all, r, ComplexMatrix, ComplexVector};

/// Largest qubit count for dense builders (`2^6 = 64`).
pub const MAX_QUBITS: usize = 6;

/// `C(n, k)` as an `f64`; exact while the result fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// `op` acting on site `site` of an `n`-qubit register (site 0 is leftmost).
pub fn site_operator(op: &ComplexMatrix, site: usize, n: usize) -> ComplexMatrix {
    let eye = identity(op.nrows());
    let factors: Vec<&ComplexMatrix> = (0..n).map(|m| if m == site { op } else { &eye }).collect();
    kron_all(factors)
}

/// Product of `op` over the given sites.
pub fn multi_site_operator(op: &ComplexMatrix, sites: &[usize], n: usize) -> ComplexMatrix {
    let eye = identity(op.nrows());
    let factors: Vec<&ComplexMatrix> = (0..n)
        .map(|m| if sites.contains(&m) { op } else { &eye })
        .collect();
    kron_all(factors)
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::DomainError("need at least one qubit".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::DimensionLimit(format!(
            "{n} qubits exceeds the dense limit of {MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Relative sign between the two branches of a GHZ-like superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhzSign {
    Plus,
    Minus,
}

/// Fix the global phase so the largest component is real and positive.
fn canonical_phase(mut v: ComplexVector) -> ComplexVector {
    let (k, _) = v
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 + 1e-12 { (i, z.norm()) } else { best });
    let phase = v[k] / r(v[k].norm());
    v /= phase;
    v
}

/// `(|E_M⟩^⊗N ± |E_m⟩^⊗N)/√2` for the extreme eigenvectors of a single-site
/// observable. Eigenvectors are phase-fixed (largest component real positive).
pub fn ghz_like_ket(n: usize, observable: &ComplexMatrix, sign: GhzSign) -> Result<ComplexVector> {
    if n == 0 {
        return Err(Error::DomainError("need at least one site".into()));
    }
    let eig = eigh(observable)?;
    let d = eig.dim();
    let low = canonical_phase(eig.eigenvectors.column(0).into_owned());
    let high = canonical_phase(eig.eigenvectors.column(d - 1).into_owned());
    let power = |v: &ComplexVector| {
        let col = ComplexMatrix::from_column_slice(d, 1, v.as_slice());
        let cols: Vec<&ComplexMatrix> = std::iter::repeat_n(&col, n).collect();
        let k = kron_all(cols);
        ComplexVector::from_column_slice(k.as_slice())
    };
    let s = match sign {
        GhzSign::Plus => 1.0,
        GhzSign::Minus => -1.0,
    };
    Ok((power(&high) + power(&low) * r(s)) * r(std::f64::consts::FRAC_1_SQRT_2))
}

pub fn ghz_like_state(n: usize, observable: &ComplexMatrix, sign: GhzSign) -> Result<DensityMatrix> {
    DensityMatrix::pure(&ghz_like_ket(n, observable, sign)?)
}

/// `[(|0⟩ + |1⟩)/√2]^⊗N`.
pub fn plus_product_ket(n: usize) -> ComplexVector {
    let amp = (0.5f64).powf(n as f64 / 2.0);
    ComplexVector::from_element(1 << n, r(amp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::vectorize;
    use crate::linalg::{kron, max_abs, pauli_z};

    #[test]
    fn binomials_and_subsets() {
        assert_eq!(binomial(5, 3), 10.0);
        assert_eq!(binomial(50, 25), 126_410_606_437_752.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(2, 1), vec![vec![0], vec![1]]);
    }

    #[test]
    fn ghz_minus_single_site() {
        let rho = ghz_like_state(1, &pauli_z(), GhzSign::Minus).unwrap();
        let expect = crate::linalg::from_rows(&[vec![r(0.5), r(-0.5)], vec![r(-0.5), r(0.5)]]);
        assert!(max_abs(&(rho.matrix() - expect)) < 1e-15);
    }

    #[test]
    fn ghz_plus_is_pure() {
        let rho = ghz_like_state(3, &pauli_z(), GhzSign::Plus).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!((rho.matrix()[(0, 7)] - r(0.5)).norm() < 1e-15);
    }

    #[test]
    fn ghz_vectorizes_to_ket_times_conjugate() {
        for n in 1..=3 {
            let psi = ghz_like_ket(n, &pauli_z(), GhzSign::Minus).unwrap();
            let rho = DensityMatrix::pure(&psi).unwrap();
            let col = ComplexMatrix::from_column_slice(psi.len(), 1, psi.as_slice());
            let expect = kron(&col, &col.conjugate());
            let got = vectorize(&rho);
            for k in 0..expect.nrows() {
                assert!((got.amplitudes()[k] - expect[(k, 0)]).norm() < 1e-15);
            }
        }
    }
}

use crate::dynamics::{superoperator, DensityMatrix, LindbladGenerator, RateProfile, Superoperator};
use crate::error::{Error, Result};
use crate::fisher::{ParameterizedEvolution, QfiReport};
use crate::linalg::{kron, pauli_z, r, ComplexMatrix, ComplexVector};

use super::{binomial, check_qubits, ghz_like_ket, multi_site_operator, subsets, GhzSign};

/// `N` probes coupled to a common bath that induces every `k`-body σᶻ term:
/// `𝓛[ρ] = x (Σ_S P_S ρ P_S − C(N,k) ρ)` with `P_S = Π_{i∈S} σᶻ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KBodyModel {
    pub n: usize,
    pub k: usize,
    /// Lindbladian strength.
    pub x: f64,
}

impl KBodyModel {
    pub fn new(n: usize, k: usize, x: f64) -> Result<Self> {
        check_qubits(n)?;
        if k == 0 || k > n {
            return Err(Error::DomainError(format!("need 1 <= k <= N, got k={k}, N={n}")));
        }
        if k % 2 == 0 {
            return Err(Error::UnsupportedOrder(k));
        }
        if !x.is_finite() {
            return Err(Error::DomainError("x must be finite".into()));
        }
        Ok(KBodyModel { n, k, x })
    }

    /// `C(N, k)`, the number of `k`-body operators.
    pub fn coefficient(&self) -> f64 {
        binomial(self.n, self.k)
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// One unit-rate jump `P_S` per `k`-subset; `x` is left out.
    pub fn generator(&self) -> Result<LindbladGenerator> {
        self.generator_with_rate(1.0)
    }

    /// Generator with the strength `x` folded into the rates.
    pub fn physical_generator(&self) -> Result<LindbladGenerator> {
        self.generator_with_rate(self.x)
    }

    fn generator_with_rate(&self, rate: f64) -> Result<LindbladGenerator> {
        let z = pauli_z();
        let mut gen = LindbladGenerator::zero(self.dim());
        for s in subsets(self.n, self.k) {
            gen.add_jump(multi_site_operator(&z, &s, self.n), RateProfile::Constant(rate))?;
        }
        Ok(gen)
    }

    pub fn shape(&self) -> Result<Superoperator> {
        superoperator(&self.generator()?, 0.0)
    }

    /// `|Ψ⟩ = (|E_M⟩^⊗N − |E_m⟩^⊗N)/√2` for σᶻ.
    pub fn initial_ket(&self) -> Result<ComplexVector> {
        ghz_like_ket(self.n, &pauli_z(), GhzSign::Minus)
    }

    /// `|Ψ⊥⟩ = (|E_M⟩^⊗N + |E_m⟩^⊗N)/√2`.
    pub fn orthogonal_ket(&self) -> Result<ComplexVector> {
        ghz_like_ket(self.n, &pauli_z(), GhzSign::Plus)
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::pure(&self.initial_ket()?)
    }

    pub fn evolution(&self, tau: f64) -> Result<ParameterizedEvolution> {
        Ok(ParameterizedEvolution::constant(self.shape()?, self.x, tau))
    }

    /// `‖𝖫̃u + 2C u‖` for `u = (|Ψ⊥⟩|Ψ⊥*⟩ − |Ψ⟩|Ψ*⟩)/√2`.
    pub fn eigenrelation_residual(&self) -> Result<f64> {
        let pair = |v: &ComplexVector| {
            let col = ComplexMatrix::from_column_slice(v.len(), 1, v.as_slice());
            ComplexVector::from_column_slice(kron(&col, &col.conjugate()).as_slice())
        };
        let psi = pair(&self.initial_ket()?);
        let perp = pair(&self.orthogonal_ket()?);
        let u = (perp - psi) * r(std::f64::consts::FRAC_1_SQRT_2);
        let lu = self.shape()?.apply(&u);
        Ok((lu + &u * r(2.0 * self.coefficient())).norm())
    }

    /// `κ/F̃ = (e^{−2Cxτ} + 1)(e^{−4Cxτ} + 1) / (4τ² C² e^{−4Cxτ})`.
    pub fn bound_closed_form(&self, tau: f64) -> Result<f64> {
        if !(tau > 0.0) || !(self.x > 0.0) {
            return Err(Error::DomainError("need tau > 0 and x > 0".into()));
        }
        Ok(kbody_bound(self.coefficient(), self.x * tau, tau))
    }

    /// Full numeric report at duration `tau`.
    pub fn report(&self, tau: f64, repetitions: u64, purity_tol: f64) -> Result<QfiReport> {
        QfiReport::compute(&self.evolution(tau)?, &self.initial_state()?, repetitions, purity_tol)
    }
}

/// Closed-form `κ/F̃` in terms of `C`, `X = xτ` and `τ`.
pub fn kbody_bound(c: f64, xtau: f64, tau: f64) -> f64 {
    let e2 = (-2.0 * c * xtau).exp();
    let e4 = (-4.0 * c * xtau).exp();
    (e2 + 1.0) * (e4 + 1.0) / (4.0 * tau * tau * c * c * e4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fisher::PURITY_TOL;
    use crate::linalg::{from_real_diagonal, max_abs};

    #[test]
    fn builder_jump_counts() {
        let m = KBodyModel::new(1, 1, 0.1).unwrap();
        let s = m.shape().unwrap();
        assert!(max_abs(&(s.matrix() - from_real_diagonal(&[0.0, -2.0, -2.0, 0.0]))) < 1e-15);

        let m = KBodyModel::new(2, 1, 0.1).unwrap();
        assert_eq!(m.generator().unwrap().jumps().len(), 2);
        assert_eq!(m.coefficient(), 2.0);

        let m = KBodyModel::new(3, 3, 0.1).unwrap();
        assert_eq!(m.generator().unwrap().jumps().len(), 1);
        assert_eq!(m.coefficient(), 1.0);
    }

    #[test]
    fn rejects_even_and_oversized() {
        assert_eq!(KBodyModel::new(4, 2, 0.1), Err(Error::UnsupportedOrder(2)));
        assert!(matches!(KBodyModel::new(7, 1, 0.1), Err(Error::DimensionLimit(_))));
        assert!(KBodyModel::new(2, 3, 0.1).is_err());
    }

    #[test]
    fn eigenrelation_examples() {
        for (n, k) in [(2, 1), (3, 3), (5, 3)] {
            let m = KBodyModel::new(n, k, 0.1).unwrap();
            assert!(m.eigenrelation_residual().unwrap() < 1e-10, "N={n} k={k}");
        }
    }

    #[test]
    fn closed_form_small_x_limit() {
        let tau = 1.3;
        // C = 2, x τ → 0: 1/(4τ²)
        let v = kbody_bound(2.0, 0.0, tau);
        assert!((v - 1.0 / (4.0 * tau * tau)).abs() < 1e-15);
        let large = kbody_bound(1.0, 20.0, tau);
        assert!(large > 1e30);
    }

    #[test]
    fn closed_form_matches_numeric_n3_k3() {
        let m = KBodyModel::new(3, 3, 0.1).unwrap();
        let report = m.report(1.0, 1, PURITY_TOL).unwrap();
        let closed = m.bound_closed_form(1.0).unwrap();
        assert!((report.dissipative_bound() / closed - 1.0).abs() < 1e-10);
    }
}

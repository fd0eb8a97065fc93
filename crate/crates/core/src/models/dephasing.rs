//! Independent dephasing of `N` qubits with a phase Hamiltonian:
//! `𝓛[ρ] = i x₁[H, ρ] + ½ x₂(τ)(Σ_m σᶻ_m ρ σᶻ_m − Nρ)`, `H = Σ_m |1⟩⟨1|_m`.
//!
//! The sign of the commutator term follows the displayed generator; the
//! Fisher informations do not depend on it.

use crate::dynamics::{
    superoperator, unvec_operator, vec_operator, DensityMatrix, LindbladGenerator, RateProfile,
    Superoperator, VectorizedState,
};
use crate::error::{Error, Result};
use crate::fisher::{qfi_exact, ParameterizedEvolution, QfiReport};
use crate::linalg::{expm_multiply, from_real_diagonal, pauli_z, r};

use super::{check_qubits, ghz_like_ket, plus_product_ket, site_operator, GhzSign};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// `[(|0⟩ + |1⟩)/√2]^⊗N`
    Product,
    /// `(|0⟩^⊗N + |1⟩^⊗N)/√2`
    Ghz,
}

/// Which coefficient of the generator is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// The Hamiltonian gap `x₁`.
    X1,
    /// The instantaneous dephasing rate `x₂(τ)`.
    X2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingModel {
    pub n: usize,
    pub x1: f64,
    pub x2: RateProfile,
    pub initial: InitialKind,
}

impl DephasingModel {
    pub fn new(n: usize, x1: f64, x2: RateProfile, initial: InitialKind) -> Result<Self> {
        check_qubits(n)?;
        x2.validate()?;
        Ok(DephasingModel { n, x1, x2, initial })
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// `H = Σ_m |1⟩⟨1|_m`: diagonal, entry = number of excited qubits.
    pub fn hamiltonian(&self) -> crate::linalg::ComplexMatrix {
        let diag: Vec<f64> = (0..self.dim()).map(|b: usize| b.count_ones() as f64).collect();
        from_real_diagonal(&diag)
    }

    pub fn generator(&self) -> Result<LindbladGenerator> {
        let mut gen = LindbladGenerator::new(self.hamiltonian() * r(-self.x1))?;
        let half_rate = self.x2.scaled(0.5);
        for m in 0..self.n {
            gen.add_jump(site_operator(&pauli_z(), m, self.n), half_rate.clone())?;
        }
        Ok(gen)
    }

    /// `i(H⊗I − I⊗Hᵀ)`, the generator part multiplying `x₁`.
    pub fn hamiltonian_shape(&self) -> Result<Superoperator> {
        superoperator(&LindbladGenerator::new(self.hamiltonian() * r(-1.0))?, 0.0)
    }

    /// `½ Σ_m (σᶻ_m⊗σᶻ_m − I)`, the generator part multiplying `x₂`.
    pub fn dephasing_shape(&self) -> Result<Superoperator> {
        let mut gen = LindbladGenerator::zero(self.dim());
        for m in 0..self.n {
            gen.add_jump(site_operator(&pauli_z(), m, self.n), RateProfile::Constant(0.5))?;
        }
        superoperator(&gen, 0.0)
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        let ket = match self.initial {
            InitialKind::Product => plus_product_ket(self.n),
            InitialKind::Ghz => ghz_like_ket(self.n, &pauli_z(), GhzSign::Plus)?,
        };
        DensityMatrix::pure(&ket)
    }

    /// `Γ(τ) = ∫₀^τ x₂(s) ds`.
    pub fn gamma(&self, tau: f64) -> f64 {
        self.x2.integral(0.0, tau)
    }

    pub fn log_derivative(&self, tau: f64) -> Result<f64> {
        match self.x2.log_derivative(tau) {
            Some(b) if b != 0.0 && b.is_finite() => Ok(b),
            _ => Err(Error::ZeroLogDerivative),
        }
    }

    /// `exp(x₁τ·𝖫̃_H + Γ·𝖫̃_D)|ρ₀⟩⟩` at explicit exponents.
    fn evolve_exponents(&self, phase: f64, gamma: f64) -> Result<VectorizedState> {
        let total = self
            .hamiltonian_shape()?
            .scaled(phase)
            .sum(&self.dephasing_shape()?.scaled(gamma))?;
        let raw = vec_operator(self.initial_state()?.matrix());
        VectorizedState::from_raw(expm_multiply(total.matrix(), &raw)?)
    }

    pub fn evolved(&self, tau: f64) -> Result<VectorizedState> {
        self.evolve_exponents(self.x1 * tau, self.gamma(tau))
    }

    /// The state reached by the part of the dynamics not carrying `target`,
    /// and the evolution that carries it. The two parts commute.
    pub fn split(&self, target: Target, tau: f64) -> Result<(DensityMatrix, ParameterizedEvolution)> {
        match target {
            Target::X1 => {
                let start = self.evolve_exponents(0.0, self.gamma(tau))?.to_density()?;
                let evo = ParameterizedEvolution::constant(self.hamiltonian_shape()?, self.x1, tau);
                Ok((start, evo))
            }
            Target::X2 => {
                let start = self.evolve_exponents(self.x1 * tau, 0.0)?.to_density()?;
                let evo = ParameterizedEvolution::profile(
                    self.dephasing_shape()?,
                    self.gamma(tau),
                    self.log_derivative(tau)?,
                    tau,
                )?;
                Ok((start, evo))
            }
        }
    }

    /// Report on the whole `N`-qubit register.
    pub fn register_report(
        &self,
        target: Target,
        tau: f64,
        repetitions: u64,
        purity_tol: f64,
    ) -> Result<QfiReport> {
        let (start, evo) = self.split(target, tau)?;
        QfiReport::compute(&evo, &start, repetitions, purity_tol)
    }

    /// Report with the product-state rule applied: for product probes the
    /// informations are `N` times the single-probe ones and `κ` is that of a
    /// single probe.
    pub fn report(
        &self,
        target: Target,
        tau: f64,
        repetitions: u64,
        purity_tol: f64,
    ) -> Result<QfiReport> {
        match self.initial {
            InitialKind::Ghz => self.register_report(target, tau, repetitions, purity_tol),
            InitialKind::Product => {
                let single = DephasingModel { n: 1, ..self.clone() };
                let one = single.register_report(target, tau, repetitions, purity_tol)?;
                Ok(QfiReport::product(&one, self.n))
            }
        }
    }

    /// `F` from a central difference of the evolved density matrix.
    pub fn qfi_exact_fd(&self, target: Target, tau: f64, step: f64) -> Result<f64> {
        let gamma = self.gamma(tau);
        let phase = self.x1 * tau;
        let (rho, plus, minus, scale) = match target {
            Target::X1 => (
                self.evolve_exponents(phase, gamma)?,
                self.evolve_exponents((self.x1 + step) * tau, gamma)?,
                self.evolve_exponents((self.x1 - step) * tau, gamma)?,
                1.0,
            ),
            Target::X2 => (
                self.evolve_exponents(phase, gamma)?,
                self.evolve_exponents(phase, gamma + step)?,
                self.evolve_exponents(phase, gamma - step)?,
                1.0 / self.log_derivative(tau)?,
            ),
        };
        let rho = rho.to_density()?;
        let drho = (unvec_operator(&plus.raw())? - unvec_operator(&minus.raw())?)
            * r(scale / (2.0 * step));
        qfi_exact(&rho, &drho)
    }

    /// Closed-form `F̃/κ` for this model's initial state.
    pub fn closed_form_bound(&self, target: Target, tau: f64) -> Result<f64> {
        let forms = DephasingForms::bounds(self.n, self.gamma(tau), tau, self.log_derivative_or_nan(tau))?;
        Ok(forms.pick(self.initial, target))
    }

    /// Closed-form exact `F` for this model's initial state.
    pub fn closed_form_exact(&self, target: Target, tau: f64) -> Result<f64> {
        let forms = DephasingForms::exact(self.n, self.gamma(tau), tau, self.log_derivative_or_nan(tau))?;
        Ok(forms.pick(self.initial, target))
    }

    fn log_derivative_or_nan(&self, tau: f64) -> f64 {
        self.log_derivative(tau).unwrap_or(f64::NAN)
    }
}

/// The four closed forms for `(product, GHZ) × (x₁, x₂)`.
///
/// x₂ entries are NaN when the log-derivative is unavailable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingForms {
    pub x1_product: f64,
    pub x1_ghz: f64,
    pub x2_product: f64,
    pub x2_ghz: f64,
}

impl DephasingForms {
    /// `F̃/κ`:
    /// `Nτ²e^{−3Γ/2}/(2ch(Γ/2))`, `N²τ²e^{−3NΓ/2}/(2ch(NΓ/2))`,
    /// `Ne^{−Γ/2}/(4b²ch(Γ)ch(Γ/2))`, `N²e^{−NΓ/2}/(4b²ch(NΓ)ch(NΓ/2))`
    /// with `b = ∂_τ ln x₂`.
    pub fn bounds(n: usize, gamma: f64, tau: f64, log_derivative: f64) -> Result<Self> {
        let n = n as f64;
        let ng = n * gamma;
        let b2 = check_log_derivative(log_derivative)?;
        Ok(DephasingForms {
            x1_product: n * tau * tau * (-1.5 * gamma).exp() / (2.0 * (0.5 * gamma).cosh()),
            x1_ghz: n * n * tau * tau * (-1.5 * ng).exp() / (2.0 * (0.5 * ng).cosh()),
            x2_product: n * (-0.5 * gamma).exp() / (4.0 * b2 * gamma.cosh() * (0.5 * gamma).cosh()),
            x2_ghz: n * n * (-0.5 * ng).exp() / (4.0 * b2 * ng.cosh() * (0.5 * ng).cosh()),
        })
    }

    /// Exact `F`:
    /// `Nτ²e^{−2Γ}`, `N²τ²e^{−2NΓ}`, `Ne^{−Γ}/(2b² sh Γ)`, `N²e^{−NΓ}/(2b² sh NΓ)`.
    pub fn exact(n: usize, gamma: f64, tau: f64, log_derivative: f64) -> Result<Self> {
        let n = n as f64;
        let ng = n * gamma;
        let b2 = check_log_derivative(log_derivative)?;
        Ok(DephasingForms {
            x1_product: n * tau * tau * (-2.0 * gamma).exp(),
            x1_ghz: n * n * tau * tau * (-2.0 * ng).exp(),
            x2_product: n * (-gamma).exp() / (2.0 * b2 * gamma.sinh()),
            x2_ghz: n * n * (-ng).exp() / (2.0 * b2 * ng.sinh()),
        })
    }

    pub fn pick(&self, initial: InitialKind, target: Target) -> f64 {
        match (initial, target) {
            (InitialKind::Product, Target::X1) => self.x1_product,
            (InitialKind::Ghz, Target::X1) => self.x1_ghz,
            (InitialKind::Product, Target::X2) => self.x2_product,
            (InitialKind::Ghz, Target::X2) => self.x2_ghz,
        }
    }
}

fn check_log_derivative(b: f64) -> Result<f64> {
    if b.is_nan() {
        return Ok(f64::NAN);
    }
    if b == 0.0 || !b.is_finite() {
        return Err(Error::ZeroLogDerivative);
    }
    Ok(b * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_direct, evolve_vectorized};
    use crate::fisher::PURITY_TOL;

    fn model(n: usize, initial: InitialKind) -> DephasingModel {
        DephasingModel::new(
            n,
            0.8,
            RateProfile::Exponential { amplitude: 0.4, growth: 0.5 },
            initial,
        )
        .unwrap()
    }

    #[test]
    fn single_qubit_coherence() {
        let m = model(1, InitialKind::Product);
        let tau = 1.1;
        let rho = m.evolved(tau).unwrap().to_density().unwrap();
        let expect = 0.5 * (-m.gamma(tau)).exp();
        assert!((rho.matrix()[(0, 1)].norm() - expect).abs() < 1e-13);
        // time-dependent rates via direct integration agree
        let direct = evolve_direct(&m.generator().unwrap(), &m.initial_state().unwrap(), tau, 4000).unwrap();
        assert!(direct.trace_distance(&rho).unwrap() < 1e-10);
        let phase = direct.matrix()[(1, 0)].arg();
        assert!((phase - m.x1 * tau).abs() < 1e-10);
    }

    #[test]
    fn diagonal_states_are_stationary_under_dephasing() {
        let m = model(2, InitialKind::Product);
        let gen = LindbladGenerator::zero(4)
            .with_jump(site_operator(&pauli_z(), 0, 2), RateProfile::Constant(0.5))
            .unwrap()
            .with_jump(site_operator(&pauli_z(), 1, 2), RateProfile::Constant(0.5))
            .unwrap();
        let rho = DensityMatrix::diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let v = evolve_vectorized(&gen, &rho, 2.0).unwrap().to_density().unwrap();
        assert!(v.trace_distance(&rho).unwrap() < 1e-14);
        assert_eq!(m.dephasing_shape().unwrap(), superoperator(&gen, 0.0).unwrap());
    }

    #[test]
    fn ghz_extreme_coherence_decays_n_times_faster() {
        let m = model(2, InitialKind::Ghz);
        let tau = 0.7;
        let rho = m.evolved(tau).unwrap().to_density().unwrap();
        let expect = 0.5 * (-2.0 * m.gamma(tau)).exp();
        assert!((rho.matrix()[(0, 3)].norm() - expect).abs() < 1e-13);
    }

    #[test]
    fn ratio_identities() {
        for gamma in [0.1, 0.5, 1.0, 2.0] {
            let b = DephasingForms::bounds(3, gamma, 1.4, 0.7).unwrap();
            let e = DephasingForms::exact(3, gamma, 1.4, 0.7).unwrap();
            assert!((b.x1_product / e.x1_product - 1.0 / (1.0 + (-gamma).exp())).abs() < 1e-14);
            let x2 = ((2.0 * gamma).exp() - gamma.exp()) / ((2.0 * gamma).exp() + 1.0);
            assert!((b.x2_product / e.x2_product - x2).abs() < 1e-14);
        }
        let b = DephasingForms::bounds(4, 0.0, 1.0, f64::NAN).unwrap();
        let e = DephasingForms::exact(4, 0.0, 1.0, f64::NAN).unwrap();
        assert_eq!(b.x1_product / e.x1_product, 0.5);
        assert_eq!(b.x1_ghz / e.x1_ghz, 0.5);
        assert!(DephasingForms::bounds(1, 0.3, 1.0, 0.0).is_err());
    }

    #[test]
    fn closed_forms_match_numeric_n1() {
        let m = model(1, InitialKind::Product);
        let tau = 0.9;
        for target in [Target::X1, Target::X2] {
            let rep = m.report(target, tau, 1, PURITY_TOL).unwrap();
            let closed = m.closed_form_bound(target, tau).unwrap();
            assert!((rep.qfi_tilde / rep.kappa / closed - 1.0).abs() < 1e-10);
            let exact = m.closed_form_exact(target, tau).unwrap();
            assert!((rep.qfi_exact / exact - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_rate_has_no_x2_bound() {
        let m = DephasingModel::new(1, 0.3, RateProfile::Constant(0.2), InitialKind::Ghz).unwrap();
        assert_eq!(m.split(Target::X2, 1.0).unwrap_err(), Error::ZeroLogDerivative);
    }
}

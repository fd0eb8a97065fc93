//! Amplitude damping of a single bosonic mode, `𝓛[ρ] = x(aρa† − ½{n̂, ρ})`,
//! probed with a Fock state `|N⟩`. The loss is reparametrized by the angle
//! `tan²φ = e^{xτ} − 1`, so each photon survives with probability `cos²φ`.

use std::f64::consts::FRAC_PI_2;

use crate::dynamics::{superoperator, DensityMatrix, LindbladGenerator, RateProfile, VectorizedState};
use crate::error::{Error, Result};
use crate::fisher::{default_step, kappa, qfi_tilde_fd, ParameterizedEvolution, QfiReport, PURITY_TOL};
use crate::linalg::{r, zeros, ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossyBosonModel {
    /// Initial Fock number.
    pub n: usize,
    /// Loss rate.
    pub x: f64,
    pub tau: f64,
}

impl LossyBosonModel {
    pub fn new(n: usize, x: f64, tau: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::DomainError("Fock number must be at least 1".into()));
        }
        phi_of_x(x, tau)?;
        Ok(LossyBosonModel { n, x, tau })
    }

    /// Hilbert-space dimension `N + 1`.
    pub fn cutoff(&self) -> usize {
        self.n + 1
    }

    pub fn phi(&self) -> f64 {
        phi_of_x(self.x, self.tau).expect("validated at construction").0
    }

    pub fn dphi_dx(&self) -> f64 {
        phi_of_x(self.x, self.tau).expect("validated at construction").1
    }

    pub fn initial_state(&self) -> DensityMatrix {
        let mut pops = vec![0.0; self.cutoff()];
        pops[self.n] = 1.0;
        DensityMatrix::diagonal(&pops).expect("Fock state is a valid density matrix")
    }

    pub fn evolution(&self) -> Result<ParameterizedEvolution> {
        let unit = LossyBosonModel { x: 1.0, ..*self };
        let shape = superoperator(&build_lossy_generator(&unit), 0.0)?;
        Ok(ParameterizedEvolution::constant(shape, self.x, self.tau))
    }

    /// Numeric report for estimating `x`.
    pub fn report(&self, repetitions: u64, purity_tol: f64) -> Result<QfiReport> {
        QfiReport::compute(&self.evolution()?, &self.initial_state(), repetitions, purity_tol)
    }

    /// Closed-form `κ/F̃` for `x`: the `φ` value divided by `(∂_x φ)²`.
    pub fn bound_closed_form_x(&self) -> Result<f64> {
        let d = self.dphi_dx();
        Ok(lossy_bound_closed_form(self.n, self.phi())? / (d * d))
    }
}

/// `φ = arctan √(e^{xτ} − 1)` and `∂_x φ = τ / (2√(e^{xτ} − 1))`.
pub fn phi_of_x(x: f64, tau: f64) -> Result<(f64, f64)> {
    let xt = x * tau;
    if !(xt > 0.0) || !xt.is_finite() {
        return Err(Error::DomainError(format!("need x*tau > 0, got {xt}")));
    }
    let u = xt.exp_m1().sqrt();
    if !u.is_finite() {
        return Err(Error::NumericalOverflow(format!("e^(x*tau) overflows at x*tau = {xt}")));
    }
    Ok((u.atan(), tau / (2.0 * u)))
}

/// Truncated `a` with `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(cutoff: usize) -> ComplexMatrix {
    let mut a = zeros(cutoff, cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = r((n as f64).sqrt());
    }
    a
}

pub fn build_lossy_generator(m: &LossyBosonModel) -> LindbladGenerator {
    let d = m.cutoff();
    LindbladGenerator::zero(d)
        .with_jump(annihilation(d), RateProfile::Constant(m.x))
        .expect("annihilation operator has the generator's dimension")
}

fn check_phi(phi: f64) -> Result<()> {
    if !(phi > 0.0 && phi < FRAC_PI_2) {
        return Err(Error::DomainError(format!("phi must lie in (0, pi/2), got {phi}")));
    }
    Ok(())
}

/// `ln[C(N,m) s^{2m} c^{2(N−m)}]` for `m = 0..=N` (photons lost).
fn log_populations(n: usize, phi: f64) -> Vec<f64> {
    let (ls, lc) = (phi.sin().ln(), phi.cos().ln());
    let mut log_binom = 0.0;
    (0..=n)
        .map(|m| {
            if m > 0 {
                log_binom += ((n - m + 1) as f64).ln() - (m as f64).ln();
            }
            log_binom + 2.0 * m as f64 * ls + 2.0 * (n - m) as f64 * lc
        })
        .collect()
}

/// Probability `q_m` that `m` photons were lost, indexed by `m`.
pub fn lossy_populations(n: usize, phi: f64) -> Result<Vec<f64>> {
    check_phi(phi)?;
    Ok(log_populations(n, phi).into_iter().map(f64::exp).collect())
}

/// Unit-norm `|ρ⟩⟩ ∝ Σ_m q_m |N−m⟩|N−m⟩`, with the purity `Σ q_m²` kept.
pub fn lossy_vectorized_state(n: usize, phi: f64) -> Result<VectorizedState> {
    let q = lossy_populations(n, phi)?;
    let d = n + 1;
    let mut raw = ComplexVector::zeros(d * d);
    for (m, qm) in q.iter().enumerate() {
        let level = n - m;
        raw[level * d + level] = r(*qm);
    }
    VectorizedState::from_raw(raw)
}

/// `κ/F̃` for `φ`:
/// `¼cot²φ · max_m q_m · [Σ q_m² A_m² − (Σ q_m² A_m)² / Σ q_m²]⁻¹`,
/// `A_m = m(1 + cot²φ) − N`. Evaluated relative to the largest `q_m`.
pub fn lossy_bound_closed_form(n: usize, phi: f64) -> Result<f64> {
    check_phi(phi)?;
    let lq = log_populations(n, phi);
    let lq_max = lq.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cot2 = 1.0 / phi.tan().powi(2);
    let w: Vec<f64> = lq.iter().map(|l| (2.0 * (l - lq_max)).exp()).collect();
    let a: Vec<f64> = (0..=n).map(|m| m as f64 * (1.0 + cot2) - n as f64).collect();
    let total: f64 = w.iter().sum();
    let mean = w.iter().zip(&a).map(|(w, a)| w * a).sum::<f64>() / total;
    let spread: f64 = w.iter().zip(&a).map(|(w, a)| w * (a - mean).powi(2)).sum();
    if !(spread > 0.0) {
        return Err(Error::NonpositiveInformation(spread));
    }
    Ok(0.25 * cot2 * (-lq_max).exp() / spread)
}

/// `κ/F̃` for `φ` from a central difference of [`lossy_vectorized_state`]
/// and `κ` of the rebuilt density matrix.
pub fn lossy_bound_numeric(n: usize, phi: f64) -> Result<f64> {
    let f_tilde = qfi_tilde_fd(|p| lossy_vectorized_state(n, p), phi, default_step(phi))?;
    let rho = lossy_vectorized_state(n, phi)?.to_density()?;
    Ok(kappa(&rho, PURITY_TOL) / f_tilde)
}

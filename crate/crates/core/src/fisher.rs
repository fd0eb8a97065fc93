//! Symmetric logarithmic derivatives, quantum Fisher information, and the
//! dissipative Cramér–Rao bound built from the vectorized state.
//!
//! Two Fisher informations appear throughout:
//!
//! * `F`: the ordinary QFI `Tr[ρ L²]` of the family `x ↦ ρ(x)`;
//! * `F̃`: the QFI of the pure family `x ↦ ρ̃(x) = |ρ⟩⟩⟨⟨ρ| / Tr[ρ²]`.
//!
//! For semigroup dynamics `|ρ(x)⟩⟩ = exp(X(x)·𝖫̃)|ρ₀⟩⟩`, `F̃` is four times the
//! covariance of `𝖫̃†, 𝖫̃` in the normalized vector, scaled by `(dX/dx)²`.
//! The factor `κ` turns `F̃` into an upper bound on the achievable error:
//! `1/F ≤ κ/F̃`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    evolve_with_shape, unvec_operator, DensityMatrix, Superoperator, VectorizedState,
};
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_deviation, r, ComplexMatrix, ComplexVector, HermitianEigensystem};

/// Spectral pairs with `r_i + r_j` below this are outside the support of `ρ`.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Tolerance on Hermiticity and trace of `∂ρ`.
pub const DERIVATIVE_TOL: f64 = 1e-9;
/// Default purity threshold for the pure branch of `κ`.
pub const PURITY_TOL: f64 = 1e-9;
/// States with `λ_min` at or below this get no upper sandwich bound.
pub const SINGULAR_TOL: f64 = 1e-9;

/// How the estimated parameter enters the integrated exponent `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ParameterKind {
    /// Constant rate `x` over `duration`, so `X = x·τ`.
    Constant { value: f64, duration: f64 },
    /// A known profile `x(s)`: `X = ∫₀^τ x(s) ds` and the estimated quantity
    /// is `x(τ)`, with `dX/dx(τ) = 1/∂_τ ln x(τ)`.
    Profile {
        integrated: f64,
        log_derivative: f64,
        duration: f64,
    },
}

/// The generator shape `𝖫̃` with the parameter factored out, plus how the
/// parameter enters.
#[derive(Debug, Clone)]
pub struct ParameterizedEvolution {
    pub shape: Superoperator,
    pub kind: ParameterKind,
}

impl ParameterizedEvolution {
    pub fn constant(shape: Superoperator, value: f64, duration: f64) -> Self {
        ParameterizedEvolution {
            shape,
            kind: ParameterKind::Constant { value, duration },
        }
    }

    pub fn profile(
        shape: Superoperator,
        integrated: f64,
        log_derivative: f64,
        duration: f64,
    ) -> Result<Self> {
        if log_derivative == 0.0 || !log_derivative.is_finite() {
            return Err(Error::ZeroLogDerivative);
        }
        Ok(ParameterizedEvolution {
            shape,
            kind: ParameterKind::Profile {
                integrated,
                log_derivative,
                duration,
            },
        })
    }

    /// `X = ∫₀^τ x(s) ds`.
    pub fn integrated(&self) -> f64 {
        match self.kind {
            ParameterKind::Constant { value, duration } => value * duration,
            ParameterKind::Profile { integrated, .. } => integrated,
        }
    }

    /// `dX/dx`.
    pub fn jacobian(&self) -> Result<f64> {
        match self.kind {
            ParameterKind::Constant { duration, .. } => Ok(duration),
            ParameterKind::Profile { log_derivative, .. } => {
                if log_derivative == 0.0 {
                    Err(Error::ZeroLogDerivative)
                } else {
                    Ok(1.0 / log_derivative)
                }
            }
        }
    }

    /// `4τ²` or `4/[∂_τ ln x(τ)]²`.
    pub fn prefactor(&self) -> Result<f64> {
        let j = self.jacobian()?;
        Ok(4.0 * j * j)
    }

    pub fn evolve(&self, rho0: &DensityMatrix) -> Result<VectorizedState> {
        evolve_with_shape(&self.shape, rho0, self.integrated())
    }

    /// `∂ρ/∂x` at the evolved state; exact for semigroup dynamics.
    pub fn state_derivative(&self, state: &VectorizedState) -> Result<ComplexMatrix> {
        let d = self.shape.apply(&state.raw());
        Ok(unvec_operator(&d)? * r(self.jacobian()?))
    }
}

/// Clip rounding-level negatives; NaN passes through.
fn nonneg(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

fn check_derivative(drho: &ComplexMatrix) -> Result<()> {
    let deviation = hermiticity_deviation(drho);
    if deviation > DERIVATIVE_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = drho.trace().norm();
    if trace > DERIVATIVE_TOL {
        return Err(Error::NotTraceless { trace });
    }
    Ok(())
}

fn check_dims(rho: &DensityMatrix, other: &ComplexMatrix) -> Result<()> {
    if other.shape() != (rho.dim(), rho.dim()) {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: other.nrows(),
        });
    }
    Ok(())
}

/// SLD matrix in the eigenbasis of `ρ`.
fn sld_eigenbasis(eig: &HermitianEigensystem, drho: &ComplexMatrix) -> ComplexMatrix {
    let d = eig.to_eigenbasis(drho);
    let n = eig.dim();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let denom = eig.eigenvalues[i] + eig.eigenvalues[j];
        if denom < SUPPORT_TOL {
            r(0.0)
        } else {
            d[(i, j)] * r(2.0 / denom)
        }
    })
}

/// Symmetric logarithmic derivative: Hermitian `L` with `∂ρ = (Lρ + ρL)/2` on
/// the support of `ρ`.
pub fn sld(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(rho, drho)?;
    check_derivative(drho)?;
    let eig = rho.eigen();
    let l = eig.from_eigenbasis(&sld_eigenbasis(&eig, drho));
    Ok((&l + l.adjoint()) * r(0.5))
}

/// `F = Tr[ρ L²]`.
pub fn qfi_exact(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<f64> {
    check_dims(rho, drho)?;
    check_derivative(drho)?;
    let eig = rho.eigen();
    let l = sld_eigenbasis(&eig, drho);
    // Tr[ρL²] = Σ_ij r_i |L_ij|² in the eigenbasis
    let n = eig.dim();
    let mut f = 0.0;
    for i in 0..n {
        for j in 0..n {
            f += eig.eigenvalues[i] * l[(i, j)].norm_sqr();
        }
    }
    if !f.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(f.max(0.0))
}

/// `4τ²(⟨𝖧²⟩ − ⟨𝖧⟩²)` for a pure state under `exp(−i x τ 𝖧)`.
pub fn qfi_closed_pure(psi: &ComplexVector, hgen: &ComplexMatrix, tau: f64) -> Result<f64> {
    crate::linalg::ensure_hermitian(hgen)?;
    if hgen.nrows() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: hgen.nrows(),
            found: psi.len(),
        });
    }
    let psi = psi / r(psi.norm());
    let hpsi = hgen * &psi;
    let mean = psi.dotc(&hpsi).re;
    let second = hpsi.norm_squared();
    Ok(4.0 * tau * tau * nonneg(second - mean * mean))
}

/// `⟨v|𝖫̃†𝖫̃|v⟩ − |⟨v|𝖫̃|v⟩|²`.
pub fn generator_covariance(state: &VectorizedState, shape: &Superoperator) -> f64 {
    let v = state.amplitudes();
    let lv = shape.apply(v);
    let mean = v.dotc(&lv);
    nonneg(lv.norm_squared() - mean.norm_sqr())
}

/// `F̃` from the generator covariance, times `4τ²` or `4/[∂_τ ln x]²`.
///
/// `rho_tilde` must come from evolving with `evo.shape`.
pub fn qfi_tilde_cov(rho_tilde: &VectorizedState, evo: &ParameterizedEvolution) -> Result<f64> {
    if rho_tilde.system_dim() != evo.shape.system_dim() {
        return Err(Error::DimensionMismatch {
            expected: evo.shape.system_dim(),
            found: rho_tilde.system_dim(),
        });
    }
    Ok(evo.prefactor()? * generator_covariance(rho_tilde, &evo.shape))
}

/// Default central-difference step `1e-5 · max(1, |x₀|)`.
pub fn default_step(x0: f64) -> f64 {
    1e-5 * x0.abs().max(1.0)
}

/// `F̃ = 4(⟨∂v|∂v⟩ − |⟨v|∂v⟩|²)` with `∂v` from a central difference.
///
/// Independent of the generator: only the family of normalized vectors is used.
pub fn qfi_tilde_fd<F>(family: F, x0: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<VectorizedState>,
{
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::DomainError(format!("step must be positive, got {step}")));
    }
    let v0 = family(x0)?;
    let plus = family(x0 + step)?;
    let minus = family(x0 - step)?;
    let dv = (plus.amplitudes() - minus.amplitudes()) / r(2.0 * step);
    let v = v0.amplitudes();
    let overlap = v.dotc(&dv);
    Ok(4.0 * nonneg(dv.norm_squared() - overlap.norm_sqr()))
}

/// `(2/Tr[ρ²]) (Tr[ρLρL] + Tr[ρ²L²] − 2(Tr[ρ²L])²/Tr[ρ²])`.
pub fn qfi_tilde_from_sld(rho: &DensityMatrix, l: &ComplexMatrix) -> Result<f64> {
    check_dims(rho, l)?;
    crate::linalg::ensure_hermitian(l)?;
    let p = rho.purity();
    let m = rho.matrix();
    let rl = m * l;
    let rho_l_rho_l = (&rl * &rl).trace().re;
    let rho2 = m * m;
    let rho2_l = (&rho2 * l).trace().re;
    let rho2_l2 = (&rho2 * l * l).trace().re;
    Ok(2.0 / p * (rho_l_rho_l + rho2_l2 - 2.0 * rho2_l * rho2_l / p))
}

/// `κ = 2` when `Tr[ρ²] > 1 − purity_tol`, else `4 λ_max / Tr[ρ²]`.
pub fn kappa(rho: &DensityMatrix, purity_tol: f64) -> f64 {
    if rho.purity() > 1.0 - purity_tol {
        2.0
    } else {
        kappa_mixed(rho)
    }
}

/// The mixed-state branch `4 λ_max / Tr[ρ²]` regardless of purity.
pub fn kappa_mixed(rho: &DensityMatrix) -> f64 {
    4.0 * rho.eigen().max() / rho.purity()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichBounds {
    /// `Tr[ρ²] F̃ / (4 λ_max)`.
    pub lower: f64,
    /// `Tr[ρ²] F̃ / (4 λ_min) + F(ρ)`; `None` for singular states.
    pub upper: Option<f64>,
    /// `F(ρ) = (Tr[ρ²L])² / (λ_min Tr[ρ²])`; `None` for singular states.
    pub correction: Option<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl SandwichBounds {
    pub fn upper_or_err(&self) -> Result<f64> {
        self.upper.ok_or(Error::SingularState {
            lambda_min: self.lambda_min,
        })
    }

    pub fn contains(&self, f: f64, rel_slack: f64) -> bool {
        let scale = f.abs().max(f64::MIN_POSITIVE);
        let lower_ok = self.lower - f <= rel_slack * scale;
        let upper_ok = self.upper.is_none_or(|u| f - u <= rel_slack * scale);
        lower_ok && upper_ok
    }
}

pub fn sandwich_bounds(rho: &DensityMatrix, l: &ComplexMatrix, f_tilde: f64) -> Result<SandwichBounds> {
    check_dims(rho, l)?;
    let eig = rho.eigen();
    let p = rho.purity();
    let lambda_min = eig.min();
    let lambda_max = eig.max();
    let lower = p * f_tilde / (4.0 * lambda_max);
    let (upper, correction) = if lambda_min > SINGULAR_TOL {
        let m = rho.matrix();
        let rho2_l = (m * m * l).trace().re;
        let correction = rho2_l * rho2_l / (lambda_min * p);
        (Some(p * f_tilde / (4.0 * lambda_min) + correction), Some(correction))
    } else {
        (None, None)
    };
    Ok(SandwichBounds {
        lower,
        upper,
        correction,
        lambda_min,
        lambda_max,
    })
}

/// `δx ≥ 1/√(M·F)`.
pub fn qcrb(f: f64, repetitions: u64) -> Result<f64> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::NonpositiveInformation(f));
    }
    if repetitions == 0 {
        return Err(Error::DomainError("repetitions must be at least 1".into()));
    }
    Ok(1.0 / (repetitions as f64 * f).sqrt())
}

/// Reparametrize: `F_b = (∂a/∂b)² F_a`.
pub fn chain_rule(f_wrt_a: f64, dadb: f64) -> f64 {
    dadb * dadb * f_wrt_a
}

/// Everything the bound machinery says about one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct QfiReport {
    pub qfi_exact: f64,
    pub qfi_tilde: f64,
    pub kappa: f64,
    pub bound_lower: f64,
    pub bound_upper: Option<f64>,
    pub correction: Option<f64>,
    /// `√(κ / (M F̃))`; `None` when `F̃ = 0`.
    pub precision_bound: Option<f64>,
    pub repetitions: u64,
    pub purity: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl QfiReport {
    /// Evolve `rho0`, then compute `F`, `F̃`, `κ` and the bounds at the evolved state.
    pub fn compute(
        evo: &ParameterizedEvolution,
        rho0: &DensityMatrix,
        repetitions: u64,
        purity_tol: f64,
    ) -> Result<Self> {
        let state = evo.evolve(rho0)?;
        let rho = state.to_density()?;
        let drho = evo.state_derivative(&state)?;
        let qfi_exact = qfi_exact(&rho, &drho)?;
        let qfi_tilde = qfi_tilde_cov(&state, evo)?;
        let l = sld(&rho, &drho)?;
        let kappa = kappa(&rho, purity_tol);
        let bounds = sandwich_bounds(&rho, &l, qfi_tilde)?;
        Ok(Self::assemble(qfi_exact, qfi_tilde, kappa, &bounds, rho.purity(), repetitions))
    }

    fn assemble(
        qfi_exact: f64,
        qfi_tilde: f64,
        kappa: f64,
        bounds: &SandwichBounds,
        purity: f64,
        repetitions: u64,
    ) -> Self {
        let precision_bound =
            (qfi_tilde > 0.0).then(|| (kappa / (repetitions as f64 * qfi_tilde)).sqrt());
        QfiReport {
            qfi_exact,
            qfi_tilde,
            kappa,
            bound_lower: bounds.lower,
            bound_upper: bounds.upper,
            correction: bounds.correction,
            precision_bound,
            repetitions,
            purity,
            lambda_min: bounds.lambda_min,
            lambda_max: bounds.lambda_max,
        }
    }

    /// Report for `n` independent copies of the single-probe point: the
    /// informations and bounds scale by `n`, while `κ` and the spectrum stay
    /// those of the single probe.
    pub fn product(single: &QfiReport, n: usize) -> QfiReport {
        let k = n as f64;
        QfiReport {
            qfi_exact: k * single.qfi_exact,
            qfi_tilde: k * single.qfi_tilde,
            bound_lower: k * single.bound_lower,
            bound_upper: single.bound_upper.map(|u| k * u),
            correction: single.correction.map(|c| k * c),
            precision_bound: single.precision_bound.map(|p| p / k.sqrt()),
            ..single.clone()
        }
    }

    /// `κ/F̃`, the bound on `1/F`.
    pub fn dissipative_bound(&self) -> f64 {
        self.kappa / self.qfi_tilde
    }
}

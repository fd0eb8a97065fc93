//! Lindblad generators, their Liouville-space matrices, and state evolution.
//!
//! Vectorization is row-major: entry `ρ[i][j]` of a `d × d` operator is
//! component `i·d + j`. With this ordering `X ρ Y ↦ (X ⊗ Yᵀ)|ρ⟩⟩`, and a pure
//! state `|ψ⟩⟨ψ|` maps to `|ψ⟩ ⊗ |ψ*⟩`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, eigh, ensure_hermitian, expm_multiply, hermiticity_deviation, identity, kron, r,
    ComplexMatrix, ComplexVector, HermitianEigensystem, C64, I, ZERO,
};

/// Trace tolerance for a freshly constructed density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue allowed for a density matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Hermiticity and trace tolerance for states produced by numerical evolution.
pub const EVOLVED_TOL: f64 = 1e-7;

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        ensure_hermitian(&matrix)?;
        let trace = matrix.trace();
        if (trace - r(1.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let rho = DensityMatrix { matrix };
        let lambda_min = rho.eigen().min();
        if lambda_min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {lambda_min:e}"
            )));
        }
        Ok(rho)
    }

    /// Accepts an evolved state: Hermiticity and trace are checked to
    /// [`EVOLVED_TOL`], positivity is not enforced.
    pub fn from_evolved(matrix: ComplexMatrix) -> Result<Self> {
        linalg::ensure_square(&matrix)?;
        if !linalg::is_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > EVOLVED_TOL {
            return Err(Error::ToleranceNotMet(format!(
                "evolved state Hermiticity deviation {deviation:e}"
            )));
        }
        let drift = (matrix.trace() - r(1.0)).norm();
        if drift > EVOLVED_TOL {
            return Err(Error::ToleranceNotMet(format!(
                "evolved state trace drift {drift:e}"
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a (re-normalized) state vector.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        let psi = psi / r(norm);
        let mut m = linalg::outer(&psi, &psi);
        for i in 0..m.nrows() {
            m[(i, i)].im = 0.0;
        }
        Ok(DensityMatrix { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: identity(dim) * r(1.0 / dim as f64),
        }
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(linalg::from_real_diagonal(populations))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigen(&self) -> HermitianEigensystem {
        // Hermitian by construction; symmetrize away the evolved-state residue
        let sym = (&self.matrix + self.matrix.adjoint()) * r(0.5);
        eigh(&sym).expect("density matrix is Hermitian")
    }

    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        (&self.matrix * op).trace()
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let diff = &self.matrix - &other.matrix;
        let sym = (&diff + diff.adjoint()) * r(0.5);
        let spectrum = eigh(&sym)?;
        Ok(0.5 * spectrum.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
    }
}

/// Time dependence of a dissipation rate `η(τ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateProfile {
    Constant(f64),
    /// Linear interpolation through `(τ, η)` samples, held flat outside the grid.
    Sampled(Vec<(f64, f64)>),
    /// `amplitude · exp(growth · τ)`.
    Exponential { amplitude: f64, growth: f64 },
}

impl RateProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            RateProfile::Constant(v) if !v.is_finite() => {
                Err(Error::InvalidProfile("non-finite constant rate".into()))
            }
            RateProfile::Sampled(samples) => {
                if samples.is_empty() {
                    return Err(Error::InvalidProfile("empty sample grid".into()));
                }
                if samples.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                    return Err(Error::InvalidProfile("non-finite sample".into()));
                }
                if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidProfile(
                        "sample times must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            RateProfile::Exponential { amplitude, growth }
                if !amplitude.is_finite() || !growth.is_finite() =>
            {
                Err(Error::InvalidProfile("non-finite exponential profile".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn rate_at(&self, t: f64) -> f64 {
        match self {
            RateProfile::Constant(v) => *v,
            RateProfile::Exponential { amplitude, growth } => amplitude * (growth * t).exp(),
            RateProfile::Sampled(samples) => {
                let first = samples[0];
                let last = samples[samples.len() - 1];
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let k = samples.partition_point(|&(ts, _)| ts <= t);
                let (t0, v0) = samples[k - 1];
                let (t1, v1) = samples[k];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// `∫_{t0}^{t1} η(s) ds`.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        if t1 < t0 {
            return -self.integral(t1, t0);
        }
        match self {
            RateProfile::Constant(v) => v * (t1 - t0),
            RateProfile::Exponential { amplitude, growth } => {
                if *growth == 0.0 {
                    amplitude * (t1 - t0)
                } else {
                    amplitude * ((growth * t1).exp() - (growth * t0).exp()) / growth
                }
            }
            RateProfile::Sampled(samples) => {
                // piecewise linear: integrate exactly between breakpoints
                let mut knots = vec![t0];
                knots.extend(samples.iter().map(|s| s.0).filter(|&t| t > t0 && t < t1));
                knots.push(t1);
                knots
                    .windows(2)
                    .map(|w| 0.5 * (self.rate_at(w[0]) + self.rate_at(w[1])) * (w[1] - w[0]))
                    .sum()
            }
        }
    }

    /// `∂_τ ln η(τ)`; `None` where the rate vanishes.
    pub fn log_derivative(&self, t: f64) -> Option<f64> {
        let value = self.rate_at(t);
        if value == 0.0 {
            return None;
        }
        let slope = match self {
            RateProfile::Constant(_) => 0.0,
            RateProfile::Exponential { amplitude, growth } => {
                amplitude * growth * (growth * t).exp()
            }
            RateProfile::Sampled(samples) => {
                if samples.len() < 2 || t < samples[0].0 || t >= samples[samples.len() - 1].0 {
                    0.0
                } else {
                    let k = samples.partition_point(|&(ts, _)| ts <= t);
                    let (t0, v0) = samples[k - 1];
                    let (t1, v1) = samples[k];
                    (v1 - v0) / (t1 - t0)
                }
            }
        };
        Some(slope / value)
    }

    pub fn scaled(&self, factor: f64) -> RateProfile {
        match self {
            RateProfile::Constant(v) => RateProfile::Constant(v * factor),
            RateProfile::Sampled(samples) => {
                RateProfile::Sampled(samples.iter().map(|&(t, v)| (t, v * factor)).collect())
            }
            RateProfile::Exponential { amplitude, growth } => RateProfile::Exponential {
                amplitude: amplitude * factor,
                growth: *growth,
            },
        }
    }

    /// Whether the rate dips below zero somewhere on `[t0, t1]`.
    pub fn negative_on(&self, t0: f64, t1: f64) -> bool {
        match self {
            RateProfile::Constant(v) => *v < 0.0,
            RateProfile::Exponential { amplitude, .. } => *amplitude < 0.0,
            RateProfile::Sampled(samples) => {
                self.rate_at(t0) < 0.0
                    || self.rate_at(t1) < 0.0
                    || samples.iter().any(|&(t, v)| t >= t0 && t <= t1 && v < 0.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub operator: ComplexMatrix,
    pub rate: RateProfile,
}

/// `𝓛_τ[ρ] = −i[H, ρ] + Σ_k η_k(τ) (A_k ρ A_k† − ½{A_k†A_k, ρ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    hamiltonian: ComplexMatrix,
    jumps: Vec<Jump>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: ComplexMatrix) -> Result<Self> {
        ensure_hermitian(&hamiltonian)?;
        Ok(LindbladGenerator {
            hamiltonian,
            jumps: Vec::new(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        LindbladGenerator {
            hamiltonian: linalg::zeros(dim, dim),
            jumps: Vec::new(),
        }
    }

    pub fn with_jump(mut self, operator: ComplexMatrix, rate: RateProfile) -> Result<Self> {
        self.add_jump(operator, rate)?;
        Ok(self)
    }

    pub fn add_jump(&mut self, operator: ComplexMatrix, rate: RateProfile) -> Result<()> {
        let d = self.dim();
        if operator.nrows() != d || operator.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: operator.nrows().max(operator.ncols()),
            });
        }
        if !linalg::is_finite(&operator) {
            return Err(Error::NonFinite);
        }
        rate.validate()?;
        self.jumps.push(Jump { operator, rate });
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// True when every rate stays nonnegative on `[t0, t1]`.
    pub fn is_markovian_on(&self, t0: f64, t1: f64) -> bool {
        !self.jumps.iter().any(|j| j.rate.negative_on(t0, t1))
    }

    fn warn_if_non_markovian(&self, t0: f64, t1: f64) {
        if !self.is_markovian_on(t0, t1) {
            warn!(
                "NonMarkovianWarning: negative dissipation rate on [{t0}, {t1}]; positivity is not guaranteed"
            );
        }
    }

    /// `dρ/dτ` for an arbitrary operator `ρ`.
    pub fn apply(&self, rho: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
        let d = self.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.nrows(),
            });
        }
        let h = &self.hamiltonian;
        let mut out = (h * rho - rho * h) * (-I);
        for jump in &self.jumps {
            let eta = jump.rate.rate_at(tau);
            if eta == 0.0 {
                continue;
            }
            let a = &jump.operator;
            let ad = a.adjoint();
            let ada = &ad * a;
            let term = a * rho * &ad - (&ada * rho + rho * &ada) * r(0.5);
            out += term * r(eta);
        }
        Ok(out)
    }
}

/// Matrix of a linear map on vectorized operators (`d² × d²`).
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    matrix: ComplexMatrix,
    system_dim: usize,
}

impl Superoperator {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let n = linalg::ensure_square(&matrix)?;
        let system_dim = exact_sqrt(n).ok_or(Error::NotSquareLength(n))?;
        Ok(Superoperator { matrix, system_dim })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        &self.matrix * v
    }

    pub fn scaled(&self, factor: f64) -> Superoperator {
        Superoperator {
            matrix: &self.matrix * r(factor),
            system_dim: self.system_dim,
        }
    }

    pub fn sum(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.system_dim != other.system_dim {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim,
                found: other.system_dim,
            });
        }
        Ok(Superoperator {
            matrix: &self.matrix + &other.matrix,
            system_dim: self.system_dim,
        })
    }
}

/// Unit-norm `|ρ⟩⟩` together with the purity `Tr[ρ²]` removed by the normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedState {
    amplitudes: ComplexVector,
    purity: f64,
}

impl VectorizedState {
    /// Normalizes a raw `vec(ρ)` and records its squared norm as the purity.
    pub fn from_raw(raw: ComplexVector) -> Result<Self> {
        exact_sqrt(raw.len()).ok_or(Error::NotSquareLength(raw.len()))?;
        let norm = raw.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NumericalOverflow(format!(
                "vectorized state has norm {norm:e}"
            )));
        }
        Ok(VectorizedState {
            amplitudes: raw / r(norm),
            purity: norm * norm,
        })
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }

    pub fn system_dim(&self) -> usize {
        exact_sqrt(self.amplitudes.len()).expect("length checked at construction")
    }

    /// The unnormalized `vec(ρ)`.
    pub fn raw(&self) -> ComplexVector {
        &self.amplitudes * r(self.purity.sqrt())
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        devectorize(&self.amplitudes, self.purity.sqrt())
    }
}

fn exact_sqrt(n: usize) -> Option<usize> {
    let d = (n as f64).sqrt().round() as usize;
    (d * d == n).then_some(d)
}

/// Row-major stacking of an operator.
pub fn vec_operator(m: &ComplexMatrix) -> ComplexVector {
    let (rows, cols) = m.shape();
    ComplexVector::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

/// Inverse of [`vec_operator`] for square operators.
pub fn unvec_operator(v: &ComplexVector) -> Result<ComplexMatrix> {
    let d = exact_sqrt(v.len()).ok_or(Error::NotSquareLength(v.len()))?;
    Ok(ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j]))
}

pub fn vectorize(rho: &DensityMatrix) -> VectorizedState {
    VectorizedState::from_raw(vec_operator(rho.matrix())).expect("density matrix has unit trace")
}

/// Rebuild `ρ = scale · mat(v)`; `scale = √Tr[ρ²]` undoes [`vectorize`].
pub fn devectorize(v: &ComplexVector, purity_scale: f64) -> Result<DensityMatrix> {
    let m = unvec_operator(v)? * r(purity_scale);
    DensityMatrix::from_evolved(m)
}

pub fn apply_generator(
    gen: &LindbladGenerator,
    rho: &DensityMatrix,
    tau: f64,
) -> Result<ComplexMatrix> {
    gen.apply(rho.matrix(), tau)
}

/// `L̃ = −i(H⊗I − I⊗Hᵀ) + Σ_k η_k(τ)[A_k⊗A_k* − ½(A_k†A_k⊗I + I⊗(A_k†A_k)ᵀ)]`.
pub fn superoperator(gen: &LindbladGenerator, tau: f64) -> Result<Superoperator> {
    let d = gen.dim();
    let eye = identity(d);
    let h = gen.hamiltonian();
    let mut out = (kron(h, &eye) - kron(&eye, &h.transpose())) * (-I);
    for jump in gen.jumps() {
        let eta = jump.rate.rate_at(tau);
        if eta == 0.0 {
            continue;
        }
        let a = &jump.operator;
        let ada = a.adjoint() * a;
        let term = kron(a, &a.conjugate())
            - (kron(&ada, &eye) + kron(&eye, &ada.transpose())) * r(0.5);
        out += term * r(eta);
    }
    Superoperator::from_matrix(out)
}

/// Fixed-step RK4 integration of `dρ/dτ = 𝓛_τ[ρ]` from 0 to `tau`.
///
/// Rates are sampled at the stage times. The trace is never renormalized.
pub fn evolve_direct(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    tau: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    if steps == 0 {
        return Err(Error::DomainError("steps must be at least 1".into()));
    }
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho0.dim(),
        });
    }
    gen.warn_if_non_markovian(0.0, tau);
    let h = tau / steps as f64;
    let mut rho = rho0.matrix().clone();
    for step in 0..steps {
        let t = step as f64 * h;
        let k1 = gen.apply(&rho, t)?;
        let k2 = gen.apply(&(&rho + &k1 * r(0.5 * h)), t + 0.5 * h)?;
        let k3 = gen.apply(&(&rho + &k2 * r(0.5 * h)), t + 0.5 * h)?;
        let k4 = gen.apply(&(&rho + &k3 * r(h)), t + h)?;
        rho += (k1 + (k2 + k3) * r(2.0) + k4) * r(h / 6.0);
    }
    DensityMatrix::from_evolved(rho)
}

/// `exp(X·L̃)|ρ₀⟩⟩`, normalized, for a generator whose rates enter only
/// through the integrated parameter `X`. Rate profiles are read at τ = 0.
pub fn evolve_vectorized(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    integrated: f64,
) -> Result<VectorizedState> {
    gen.warn_if_non_markovian(0.0, 0.0);
    let shape = superoperator(gen, 0.0)?;
    evolve_with_shape(&shape, rho0, integrated)
}

pub fn evolve_with_shape(
    shape: &Superoperator,
    rho0: &DensityMatrix,
    integrated: f64,
) -> Result<VectorizedState> {
    if shape.system_dim() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: shape.system_dim(),
            found: rho0.dim(),
        });
    }
    evolve_raw(shape, &vec_operator(rho0.matrix()), integrated)
}

/// Continue a vectorized state by a further integrated parameter `X`.
pub fn evolve_state(
    shape: &Superoperator,
    state: &VectorizedState,
    integrated: f64,
) -> Result<VectorizedState> {
    evolve_raw(shape, &state.raw(), integrated)
}

fn evolve_raw(shape: &Superoperator, raw: &ComplexVector, integrated: f64) -> Result<VectorizedState> {
    if !integrated.is_finite() {
        return Err(Error::NumericalOverflow("integrated parameter is not finite".into()));
    }
    if integrated < 0.0 {
        warn!("NonMarkovianWarning: negative integrated parameter {integrated}");
    }
    if integrated == 0.0 {
        return VectorizedState::from_raw(raw.clone());
    }
    let evolved = expm_multiply(&(shape.matrix() * r(integrated)), raw)?;
    VectorizedState::from_raw(evolved)
}

/// Zero-padded helper used by builders: `|i⟩` in dimension `d`.
pub fn basis_ket(d: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::from_element(d, ZERO);
    v[i] = r(1.0);
    v
}

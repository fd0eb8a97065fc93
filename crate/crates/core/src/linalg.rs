//! Dense complex linear algebra used by every other module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Hermitian inputs are checked
//! against a fixed tolerance of [`HERMITIAN_TOL`] (max-entry norm of `h - h†`).

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Tolerance on `max |h - h†|` for anything required to be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Build a matrix from row-major nested rows. Panics on ragged input.
pub fn from_rows(rows: &[Vec<C64>]) -> ComplexMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    assert!(rows.iter().all(|row| row.len() == ncols), "ragged rows");
    ComplexMatrix::from_fn(nrows, ncols, |i, j| rows[i][j])
}

pub fn from_real_diagonal(diag: &[f64]) -> ComplexMatrix {
    let n = diag.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { r(diag[i]) } else { ZERO })
}

pub fn pauli_x() -> ComplexMatrix {
    from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])
}

pub fn pauli_y() -> ComplexMatrix {
    from_rows(&[vec![ZERO, -I], vec![I, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    from_real_diagonal(&[1.0, -1.0])
}

/// Kronecker product `a ⊗ b`; the row index of `b` varies fastest.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| kron(&acc, f))
}

/// `|a><b|` for column vectors.
pub fn outer(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
    a * b.adjoint()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1(m: &ComplexMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_hermitian(m: &ComplexMatrix) -> Result<()> {
    ensure_square(m)?;
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    let deviation = hermiticity_deviation(m);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        let mut out = scaled * v.adjoint();
        debug_assert_eq!(out.nrows(), n);
        // exact Hermitian symmetry of the reconstruction
        for i in 0..n {
            out[(i, i)].im = 0.0;
        }
        out
    }

    /// Rotate an operator into the eigenbasis: `V† a V`.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.eigenvectors.adjoint() * a * &self.eigenvectors
    }

    /// Rotate back from the eigenbasis: `V a V†`.
    pub fn from_eigenbasis(&self, a: &ComplexMatrix) -> ComplexMatrix {
        &self.eigenvectors * a * self.eigenvectors.adjoint()
    }
}

/// Hermitian eigen-decomposition, eigenvalues ascending.
///
/// `H = A + iB` is diagonalized through the real symmetric embedding
/// `[[A, −B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
/// doubled; `[x; y]` maps to `x + iy`. Complex Gram-Schmidt keeps one vector
/// from each `{v, iv}` pair. Ties keep the factorization's order, so output
/// is deterministic for a fixed input.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigensystem> {
    ensure_hermitian(h)?;
    let n = h.nrows();
    let sym = (h + h.adjoint()) * r(0.5);
    let embed = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = sym[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = SymmetricEigen::try_new(embed, f64::EPSILON, 0)
        .ok_or_else(|| Error::ToleranceNotMet("Hermitian eigensolver did not converge".into()))?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::ToleranceNotMet("Hermitian eigensolver produced non-finite output".into()));
    }

    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut columns: Vec<ComplexVector> = Vec::with_capacity(n);
    for &k in &order {
        let col = eig.eigenvectors.column(k);
        let mut v = ComplexVector::from_fn(n, |i, _| c(col[i], col[i + n]));
        // two passes keep near-degenerate clusters orthonormal
        for _ in 0..2 {
            for u in &columns {
                let overlap = u.dotc(&v);
                v -= u * overlap;
            }
        }
        let norm = v.norm();
        if norm > 0.5 {
            columns.push(v / r(norm));
            eigenvalues.push(eig.eigenvalues[k]);
        }
    }
    if columns.len() != n {
        return Err(Error::ToleranceNotMet(format!(
            "recovered {} of {n} eigenvectors from the real embedding",
            columns.len()
        )));
    }
    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(&columns),
    })
}

const PADE_THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_230e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
];
const THETA_13: f64 = 5.371_920_351_148_152;

fn pade_coefficients(order: usize) -> &'static [f64] {
    match order {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[
            17_297_280.0,
            8_648_640.0,
            1_995_840.0,
            277_200.0,
            25_200.0,
            1_512.0,
            56.0,
            1.0,
        ],
        9 => &[
            17_643_225_600.0,
            8_821_612_800.0,
            2_075_673_600.0,
            302_702_400.0,
            30_270_240.0,
            2_162_160.0,
            110_880.0,
            3_960.0,
            90.0,
            1.0,
        ],
        13 => &[
            64_764_752_532_480_000.0,
            32_382_376_266_240_000.0,
            7_771_770_303_897_600.0,
            1_187_353_796_428_800.0,
            129_060_195_264_000.0,
            10_559_470_521_600.0,
            670_442_572_800.0,
            33_522_128_640.0,
            1_323_241_920.0,
            40_840_800.0,
            960_960.0,
            16_380.0,
            182.0,
            1.0,
        ],
        _ => unreachable!("no Padé table for order {order}"),
    }
}

/// Returns `(U, V)` such that the `[order/order]` Padé approximant is `(V - U)^{-1} (V + U)`.
fn pade_uv(a: &ComplexMatrix, order: usize) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.nrows();
    let b = pade_coefficients(order);
    let eye = identity(n);
    let a2 = a * a;
    if order == 13 {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let inner_u = &a6 * (&a6 * r(b[13]) + &a4 * r(b[11]) + &a2 * r(b[9]));
        let u = a * (inner_u + &a6 * r(b[7]) + &a4 * r(b[5]) + &a2 * r(b[3]) + &eye * r(b[1]));
        let inner_v = &a6 * (&a6 * r(b[12]) + &a4 * r(b[10]) + &a2 * r(b[8]));
        let v = inner_v + &a6 * r(b[6]) + &a4 * r(b[4]) + &a2 * r(b[2]) + &eye * r(b[0]);
        return (u, v);
    }
    let mut powers = vec![eye];
    for k in 1..=order / 2 {
        let next = &powers[k - 1] * &a2;
        powers.push(next);
    }
    let mut u_inner = zeros(n, n);
    let mut v = zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        u_inner += p * r(b[2 * k + 1]);
        v += p * r(b[2 * k]);
    }
    (a * u_inner, v)
}

/// Matrix exponential by scaling and squaring with a Padé core of order 3–13.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = ensure_square(m)?;
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(m.clone());
    }
    let norm = norm1(m);
    for &(order, theta) in &PADE_THETA {
        if norm <= theta {
            let (u, v) = pade_uv(m, order);
            return pade_solve(&u, &v);
        }
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    if s > 1000 {
        return Err(Error::NumericalOverflow(format!(
            "1-norm {norm:e} too large for scaling and squaring"
        )));
    }
    let scaled = m * r(0.5f64.powi(s));
    let (u, v) = pade_uv(&scaled, 13);
    let mut out = pade_solve(&u, &v)?;
    for _ in 0..s {
        out = &out * &out;
    }
    if !is_finite(&out) {
        return Err(Error::NumericalOverflow("matrix exponential overflowed".into()));
    }
    Ok(out)
}

fn pade_solve(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .filter(is_finite)
        .ok_or_else(|| Error::NumericalOverflow("singular Padé denominator".into()))
}

/// Directional (Fréchet) derivative of `exp` at `m` in direction `e`.
///
/// Uses the block identity `exp([[m, e], [0, m]]) = [[exp(m), D], [0, exp(m)]]`.
pub fn expm_frechet(m: &ComplexMatrix, e: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = ensure_square(m)?;
    if e.shape() != m.shape() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: e.nrows(),
        });
    }
    let mut block = zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(m);
    block.view_mut((n, n), (n, n)).copy_from(m);
    block.view_mut((0, n), (n, n)).copy_from(e);
    let big = expm(&block)?;
    Ok(big.view((0, n), (n, n)).into_owned())
}

/// Action of the matrix exponential on a vector, `exp(m) v`, without forming `exp(m)`.
///
/// Shifts by `tr(m)/n`, splits into steps of 1-norm at most one and sums the
/// Taylor series per step to double precision.
pub fn expm_multiply(m: &ComplexMatrix, v: &ComplexVector) -> Result<ComplexVector> {
    let n = ensure_square(m)?;
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Ok(v.clone());
    }
    let shift = m.trace() / r(n as f64);
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] -= shift;
    }
    let norm = norm1(&shifted);
    let steps = norm.ceil().max(1.0);
    if steps > 1e7 {
        return Err(Error::NumericalOverflow(format!(
            "1-norm {norm:e} too large for exponential action"
        )));
    }
    let steps = steps as usize;
    let step_shift = (shift / r(steps as f64)).exp();
    let scale = r(1.0 / steps as f64);

    let mut f = v.clone();
    for _ in 0..steps {
        let mut term = f.clone();
        let mut acc = f.clone();
        let mut prev_small = false;
        for k in 1..=80 {
            term = (&shifted * &term) * (scale / r(k as f64));
            acc += &term;
            let term_norm = term.camax();
            let acc_norm = acc.camax();
            let small = term_norm <= f64::EPSILON * acc_norm;
            if small && prev_small {
                break;
            }
            prev_small = small;
        }
        f = acc * step_shift;
        if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericalOverflow("exponential action overflowed".into()));
        }
    }
    Ok(f)
}

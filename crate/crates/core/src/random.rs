//! Seeded random operators, states and generators for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dynamics::{DensityMatrix, LindbladGenerator, RateProfile};
use crate::linalg::{c, identity, r, ComplexMatrix, ComplexVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. complex Gaussian entries.
pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `(G + G†)/2` for a Ginibre `G`, scaled by `scale`.
pub fn random_hermitian(rng: &mut impl Rng, d: usize, scale: f64) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()) * r(0.5 * scale)
}

/// Haar-distributed unit vector.
pub fn random_ket(rng: &mut impl Rng, d: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| gaussian(rng));
    let norm = v.norm();
    v / r(norm)
}

/// `(1 − ε) GG†/Tr[GG†] + ε I/d`, full rank for `ε > 0`.
pub fn random_density(rng: &mut impl Rng, d: usize, floor: f64) -> DensityMatrix {
    let g = ginibre(rng, d, d);
    let w = &g * g.adjoint();
    let t = w.trace().re;
    let m = w * r((1.0 - floor) / t) + identity(d) * r(floor / d as f64);
    DensityMatrix::new((&m + m.adjoint()) * r(0.5)).expect("mixture of density matrices")
}

/// Random Hamiltonian and `jumps` Ginibre jump operators with constant rates
/// in `[0, max_rate)`.
pub fn random_generator(rng: &mut impl Rng, d: usize, jumps: usize, max_rate: f64) -> LindbladGenerator {
    let mut gen = LindbladGenerator::new(random_hermitian(rng, d, 1.0)).expect("Hermitian by construction");
    for _ in 0..jumps {
        let a = ginibre(rng, d, d) * r(1.0 / (d as f64).sqrt());
        let rate = rng.random_range(0.0..max_rate);
        gen.add_jump(a, RateProfile::Constant(rate)).expect("dimensions match");
    }
    gen
}

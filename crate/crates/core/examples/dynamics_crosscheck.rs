//! Direct RK4 integration against the vectorized exponential, and a
//! time-dependent dephasing rate integrated both ways.

use openqfi::dynamics::{evolve_direct, evolve_vectorized, superoperator, vectorize, DensityMatrix, LindbladGenerator, RateProfile};
use openqfi::linalg::{norm1, pauli_z};
use openqfi::random::{random_density, random_generator, seeded};

fn main() -> openqfi::Result<()> {
    let mut rng = seeded(11);
    for d in [2, 3, 4] {
        let gen = random_generator(&mut rng, d, 2, 1.0);
        let rho0 = random_density(&mut rng, d, 0.0);
        let tau = 2.0 / norm1(superoperator(&gen, 0.0)?.matrix());
        let a = evolve_direct(&gen, &rho0, tau, 10_000)?;
        let b = evolve_vectorized(&gen, &rho0, tau)?.to_density()?;
        println!("d={d} tau={tau:.4} trace distance {:.2e}  min eigenvalue {:+.2e}", a.trace_distance(&b)?, a.eigen().min());
    }

    // σᶻ dephasing at rate ½·0.4·e^{0.5τ}: the coherence decays as e^{−Γ(τ)}
    let rate = RateProfile::Exponential { amplitude: 0.2, growth: 0.5 };
    let gen = LindbladGenerator::zero(2).with_jump(pauli_z(), rate.clone())?;
    let plus = DensityMatrix::new(openqfi::linalg::from_rows(&[
        vec![openqfi::linalg::r(0.5), openqfi::linalg::r(0.5)],
        vec![openqfi::linalg::r(0.5), openqfi::linalg::r(0.5)],
    ]))?;
    let tau = 1.5;
    let rho = evolve_direct(&gen, &plus, tau, 4000)?;
    let gamma = 2.0 * rate.integral(0.0, tau);
    println!("coherence {:.12} expected {:.12}", rho.matrix()[(0, 1)].re, 0.5 * (-gamma).exp());
    println!("purity of vec(rho): {:.12}", vectorize(&rho).purity());
    Ok(())
}

//! Closed-system check: for unitary families the vectorized information is
//! exactly twice the quantum Fisher information.

use openqfi::dynamics::{superoperator, DensityMatrix, LindbladGenerator};
use openqfi::fisher::{qfi_closed_pure, ParameterizedEvolution, QfiReport, PURITY_TOL};
use openqfi::random::{random_hermitian, random_ket, seeded};

fn main() -> openqfi::Result<()> {
    let mut rng = seeded(2024);
    let tau = 0.8;
    println!("{:>6} {:>14} {:>14} {:>10}", "qubits", "F", "F_tilde/2", "kappa");
    for qubits in 1..=3 {
        let d = 1 << qubits;
        let psi = random_ket(&mut rng, d);
        let h = random_hermitian(&mut rng, d, 1.0);
        let shape = superoperator(&LindbladGenerator::new(h.clone())?, 0.0)?;
        let evo = ParameterizedEvolution::constant(shape, 1.3, tau);
        let rep = QfiReport::compute(&evo, &DensityMatrix::pure(&psi)?, 1, PURITY_TOL)?;
        let closed = qfi_closed_pure(&psi, &h, tau)?;
        println!("{qubits:>6} {:>14.10} {:>14.10} {:>10}", rep.qfi_exact, rep.qfi_tilde / 2.0, rep.kappa);
        assert!((rep.qfi_exact / closed - 1.0).abs() < 1e-10);
    }
    Ok(())
}

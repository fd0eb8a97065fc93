//! Lower and upper bounds on the exact QFI from F̃ for a random open qutrit.

use openqfi::dynamics::{evolve_with_shape, superoperator, unvec_operator};
use openqfi::fisher::{kappa, qfi_exact, qfi_tilde_cov, sandwich_bounds, sld, ParameterizedEvolution, PURITY_TOL};
use openqfi::linalg::r;
use openqfi::random::{random_density, random_generator, seeded};

fn main() -> openqfi::Result<()> {
    let mut rng = seeded(7);
    let rho0 = random_density(&mut rng, 3, 0.1);
    let shape = superoperator(&random_generator(&mut rng, 3, 2, 1.0), 0.0)?;
    let tau = 0.5;
    let h = 1e-5;
    println!("{:>4} {:>12} {:>12} {:>12} {:>12}", "x", "lower", "F", "upper", "kappa/F~");
    for x in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let evo = ParameterizedEvolution::constant(shape.clone(), x, tau);
        let state = evo.evolve(&rho0)?;
        let rho = state.to_density()?;
        // the exact derivative, cross-checked by a central difference
        let drho = evo.state_derivative(&state)?;
        let plus = evolve_with_shape(&shape, &rho0, (x + h) * tau)?.raw();
        let minus = evolve_with_shape(&shape, &rho0, (x - h) * tau)?.raw();
        let fd = (unvec_operator(&plus)? - unvec_operator(&minus)?) * r(0.5 / h);
        assert!((qfi_exact(&rho, &fd)? / qfi_exact(&rho, &drho)? - 1.0).abs() < 1e-6);

        let f = qfi_exact(&rho, &drho)?;
        let f_tilde = qfi_tilde_cov(&state, &evo)?;
        let b = sandwich_bounds(&rho, &sld(&rho, &drho)?, f_tilde)?;
        println!(
            "{x:>4} {:>12.6e} {f:>12.6e} {:>12.6e} {:>12.6e}",
            b.lower,
            b.upper_or_err()?,
            kappa(&rho, PURITY_TOL) / f_tilde
        );
    }
    Ok(())
}

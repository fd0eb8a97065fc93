//! Loss-rate estimation with a Fock probe: (δφ)_min = √(κ/F̃) against N, and
//! the fitted log-log slope for each angle.

use std::f64::consts::PI;

use openqfi::cli::{cmd_figure2, default_phis};
use openqfi::fisher::PURITY_TOL;
use openqfi::models::lossy::{lossy_bound_closed_form, lossy_bound_numeric};
use openqfi::models::LossyBosonModel;

fn main() -> openqfi::Result<()> {
    for n in [1, 5, 20] {
        let phi = PI / 5.0;
        println!(
            "N={n:>2} phi=pi/5  closed {:.12e}  finite difference {:.12e}",
            lossy_bound_closed_form(n, phi)?,
            lossy_bound_numeric(n, phi)?
        );
    }

    let m = LossyBosonModel::new(6, 0.4, 1.0)?;
    let rep = m.report(1, PURITY_TOL)?;
    println!(
        "x-estimation, N=6: kappa/F_tilde = {:.10e}, closed form {:.10e}, 1/F = {:.10e}",
        rep.dissipative_bound(),
        m.bound_closed_form_x()?,
        1.0 / rep.qfi_exact
    );

    let ns: Vec<usize> = (1..=50).collect();
    let data = cmd_figure2(&ns, &default_phis())?;
    for fit in &data.fits {
        println!("phi = {:>2}pi/20  slope {:+.4}  c(phi) = {:.4}", (fit.phi * 20.0 / PI).round(), fit.slope, fit.intercept.exp());
    }
    Ok(())
}

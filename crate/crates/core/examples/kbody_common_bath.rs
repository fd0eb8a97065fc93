//! N probes dephased by all k-body σᶻ couplings to a common bath.
//!
//! Prints the eigenrelation residual and compares the numerically computed
//! κ/F̃ with its closed form.

use openqfi::fisher::PURITY_TOL;
use openqfi::models::KBodyModel;

fn main() -> openqfi::Result<()> {
    let tau = 1.0;
    println!("{:>2} {:>2} {:>6} {:>10} {:>16} {:>16} {:>12}", "N", "k", "x*tau", "residual", "kappa/F_tilde", "closed form", "1/F");
    for n in 1..=5 {
        for k in (1..=n).step_by(2) {
            for xtau in [0.01, 0.1, 0.5] {
                let m = KBodyModel::new(n, k, xtau / tau)?;
                let rep = m.report(tau, 1, PURITY_TOL)?;
                println!(
                    "{n:>2} {k:>2} {xtau:>6} {:>10.2e} {:>16.10e} {:>16.10e} {:>12.6e}",
                    m.eigenrelation_residual()?,
                    rep.dissipative_bound(),
                    m.bound_closed_form(tau)?,
                    1.0 / rep.qfi_exact,
                );
            }
        }
    }
    Ok(())
}

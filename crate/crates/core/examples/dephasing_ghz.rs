//! Phase and dephasing-rate estimation with product and GHZ probes.
//!
//! The ratio of the bound F̃/κ to the exact QFI is 1/(1+e^{−Γ}) for product
//! probes and tends to 1 for GHZ probes as NΓ grows.

use openqfi::dynamics::RateProfile;
use openqfi::fisher::PURITY_TOL;
use openqfi::models::{DephasingModel, InitialKind, Target};

fn main() -> openqfi::Result<()> {
    let (tau, growth) = (1.0_f64, 0.3_f64);
    println!("{:>2} {:>5} {:>8} {:>6} {:>14} {:>14} {:>10}", "N", "Gamma", "probe", "param", "F_tilde/kappa", "F", "ratio");
    for n in [1, 2, 4] {
        for gamma in [0.1, 0.5, 1.0, 2.0] {
            let amplitude = gamma * growth / (growth * tau).exp_m1();
            let x2 = RateProfile::Exponential { amplitude, growth };
            for initial in [InitialKind::Product, InitialKind::Ghz] {
                let m = DephasingModel::new(n, 1.0, x2.clone(), initial)?;
                for target in [Target::X1, Target::X2] {
                    let rep = m.report(target, tau, 1, PURITY_TOL)?;
                    let bound = rep.qfi_tilde / rep.kappa;
                    println!(
                        "{n:>2} {gamma:>5} {:>8} {:>6} {bound:>14.8e} {:>14.8e} {:>10.6}",
                        format!("{initial:?}"),
                        format!("{target:?}"),
                        rep.qfi_exact,
                        bound / rep.qfi_exact
                    );
                }
            }
        }
    }
    Ok(())
}

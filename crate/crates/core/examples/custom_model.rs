//! A model read from JSON: a driven qubit with amplitude damping whose
//! overall rate is the estimated parameter.

use openqfi::cli::CustomModelFile;
use openqfi::fisher::{QfiReport, PURITY_TOL};

const MODEL: &str = r#"{
    "dimension": 2,
    "hamiltonian": [[[0.5, 0], [0.2, 0]], [[0.2, 0], [-0.5, 0]]],
    "jumps": [{"operator": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]], "rate": {"constant": 0.3}}],
    "initial_state": {"ket": [[1, 0], [0, 1]]},
    "parameter": {"kind": "constant", "value": 1.0, "duration": 1.0}
}"#;

fn main() -> openqfi::Result<()> {
    let model = CustomModelFile::from_json(MODEL)?;
    let rho0 = model.initial()?;
    for tau in [0.5, 1.0, 2.0, 4.0] {
        let evo = model.evolution(None, Some(tau))?;
        let rep = QfiReport::compute(&evo, &rho0, 1000, PURITY_TOL)?;
        println!(
            "tau={tau:<4} F={:.6e} F~={:.6e} kappa={:.4} dx>={:.4e} bounds=[{:.4e}, {}]",
            rep.qfi_exact,
            rep.qfi_tilde,
            rep.kappa,
            rep.precision_bound.unwrap_or(f64::INFINITY),
            rep.bound_lower,
            rep.bound_upper.map_or("-".to_string(), |u| format!("{u:.4e}")),
        );
    }
    Ok(())
}

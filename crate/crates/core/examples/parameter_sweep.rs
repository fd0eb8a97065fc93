//! Drive the sweep machinery from code: a dephasing grid rendered as CSV.

use openqfi::cli::{cmd_qfi, parse_grid_item, Format, ModelChoice, SweepSpec};
use openqfi::fisher::PURITY_TOL;

fn main() -> openqfi::Result<()> {
    let grid = ["N=1,2,3,4", "gamma=0.1,1", "ghz=0,1"]
        .iter()
        .map(|g| parse_grid_item(g))
        .collect::<openqfi::Result<Vec<_>>>()?;
    let spec = SweepSpec {
        model: ModelChoice::Dephasing,
        grid,
        out: None,
        format: Format::Csv,
        seed: 1,
        steps: 10_000,
        tol: PURITY_TOL,
    };
    print!("{}", cmd_qfi(&spec)?.to_csv());
    Ok(())
}

use rayon::prelude::*;

use crate::dynamics::RateProfile;
use crate::error::{Error, Result};
use crate::fisher::{ParameterKind, QfiReport};
use crate::models::{DephasingModel, InitialKind, KBodyModel, LossyBosonModel, Target};

use super::custom::CustomModelFile;
use super::{as_count, expand_grid, Cell, ModelChoice, SweepSpec, Table};

const REPORT_COLUMNS: [&str; 9] = [
    "F_exact",
    "F_tilde",
    "kappa",
    "bound_lower",
    "bound_upper",
    "delta_x_min",
    "closed_bound",
    "closed_exact",
    "status",
];

/// Axes that must hold positive integers.
const COUNT_KEYS: [&str; 4] = ["N", "k", "M", "target"];

struct Outcome {
    report: QfiReport,
    /// Closed-form `κ/F̃`.
    closed_bound: Option<f64>,
    /// Closed-form `F`.
    closed_exact: Option<f64>,
}

/// One row per grid point: the parameters, then `F`, `F̃`, `κ`, the sandwich
/// bounds, `√(κ/(M F̃))` and any closed forms. Failures become rows with a
/// `status` message and empty numeric cells.
pub fn cmd_qfi(spec: &SweepSpec) -> Result<Table> {
    let custom = match &spec.model {
        ModelChoice::Custom(path) => Some(CustomModelFile::load(path)?),
        _ => None,
    };
    let defaults: Vec<(&str, Option<f64>)> = match &spec.model {
        ModelChoice::KBody => vec![("N", Some(3.0)), ("k", Some(1.0)), ("x", Some(0.1)), ("tau", Some(1.0)), ("M", Some(1.0))],
        ModelChoice::Dephasing => vec![
            ("N", Some(1.0)),
            ("x1", Some(1.0)),
            ("gamma", Some(0.5)),
            ("b", Some(0.3)),
            ("tau", Some(1.0)),
            ("target", Some(1.0)),
            ("ghz", Some(0.0)),
            ("M", Some(1.0)),
        ],
        ModelChoice::Lossy => vec![("N", Some(5.0)), ("x", Some(0.5)), ("tau", Some(1.0)), ("M", Some(1.0))],
        ModelChoice::Custom(_) => match custom.as_ref().map(|c| c.parameter) {
            Some(ParameterKind::Constant { value, duration }) => {
                vec![("x", Some(value)), ("tau", Some(duration)), ("M", Some(1.0))]
            }
            _ => vec![("M", Some(1.0))],
        },
    };
    let allowed: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
    spec.check_keys(&allowed)?;

    let axes: Vec<(String, Vec<f64>)> = defaults
        .iter()
        .map(|(key, default)| {
            let values = spec.axis(key).map(<[f64]>::to_vec).or_else(|| default.map(|d| vec![d]));
            (key.to_string(), values.unwrap_or_default())
        })
        .collect();
    for (key, values) in &axes {
        if COUNT_KEYS.contains(&key.as_str()) {
            for v in values {
                as_count(key, *v)?;
            }
        }
        if key == "ghz" && values.iter().any(|v| *v != 0.0 && *v != 1.0) {
            return Err(Error::config_field("ghz", "expected 0 (product) or 1 (GHZ)"));
        }
        if key == "target" && values.iter().any(|v| *v != 1.0 && *v != 2.0) {
            return Err(Error::config_field("target", "expected 1 (x1) or 2 (x2)"));
        }
    }

    let points = expand_grid(&axes);
    let outcomes: Vec<Result<Outcome>> = points
        .par_iter()
        .map(|p| {
            let get = |key: &str| p[allowed.iter().position(|k| *k == key).expect("known axis")];
            evaluate(&spec.model, custom.as_ref(), &get, spec.tol)
        })
        .collect();

    let mut columns: Vec<String> = allowed.iter().map(|k| k.to_string()).collect();
    columns.extend(REPORT_COLUMNS.iter().map(|c| c.to_string()));
    let mut table = Table::new(columns);
    for (p, outcome) in points.iter().zip(outcomes) {
        let mut row: Vec<Cell> = allowed
            .iter()
            .zip(p)
            .map(|(k, v)| if COUNT_KEYS.contains(k) { Cell::Int(*v as i64) } else { Cell::Real(*v) })
            .collect();
        row.extend(report_cells(outcome));
        table.push(row);
    }
    Ok(table)
}

fn report_cells(outcome: Result<Outcome>) -> Vec<Cell> {
    match outcome {
        Ok(o) => {
            let r = &o.report;
            vec![
                Cell::real_or_empty(Some(r.qfi_exact)),
                Cell::real_or_empty(Some(r.qfi_tilde)),
                Cell::real_or_empty(Some(r.kappa)),
                Cell::real_or_empty(Some(r.bound_lower)),
                Cell::real_or_empty(r.bound_upper),
                Cell::real_or_empty(r.precision_bound),
                Cell::real_or_empty(o.closed_bound),
                Cell::real_or_empty(o.closed_exact),
                Cell::Text("ok".into()),
            ]
        }
        Err(e) => {
            let mut cells = vec![Cell::Empty; REPORT_COLUMNS.len() - 1];
            cells.push(Cell::Text(format!("error: {e}")));
            cells
        }
    }
}

fn evaluate(
    model: &ModelChoice,
    custom: Option<&CustomModelFile>,
    get: &dyn Fn(&str) -> f64,
    tol: f64,
) -> Result<Outcome> {
    let reps = get("M") as u64;
    match model {
        ModelChoice::KBody => {
            let m = KBodyModel::new(get("N") as usize, get("k") as usize, get("x"))?;
            let tau = get("tau");
            Ok(Outcome {
                report: m.report(tau, reps, tol)?,
                closed_bound: m.bound_closed_form(tau).ok(),
                closed_exact: None,
            })
        }
        ModelChoice::Dephasing => {
            let tau = get("tau");
            if !(tau > 0.0) {
                return Err(Error::DomainError("tau must be positive".into()));
            }
            let (gamma, b) = (get("gamma"), get("b"));
            let profile = if b == 0.0 {
                RateProfile::Constant(gamma / tau)
            } else {
                RateProfile::Exponential { amplitude: gamma * b / (b * tau).exp_m1(), growth: b }
            };
            let initial = if get("ghz") == 1.0 { InitialKind::Ghz } else { InitialKind::Product };
            let target = if get("target") == 2.0 { Target::X2 } else { Target::X1 };
            let m = DephasingModel::new(get("N") as usize, get("x1"), profile, initial)?;
            Ok(Outcome {
                report: m.report(target, tau, reps, tol)?,
                closed_bound: m.closed_form_bound(target, tau).ok().map(|v| 1.0 / v),
                closed_exact: m.closed_form_exact(target, tau).ok(),
            })
        }
        ModelChoice::Lossy => {
            let m = LossyBosonModel::new(get("N") as usize, get("x"), get("tau"))?;
            Ok(Outcome {
                report: m.report(reps, tol)?,
                closed_bound: m.bound_closed_form_x().ok(),
                closed_exact: None,
            })
        }
        ModelChoice::Custom(_) => {
            let file = custom.expect("custom model loaded");
            let (value, duration) = match file.parameter {
                ParameterKind::Constant { .. } => (Some(get("x")), Some(get("tau"))),
                ParameterKind::Profile { .. } => (None, None),
            };
            let evo = file.evolution(value, duration)?;
            Ok(Outcome {
                report: QfiReport::compute(&evo, &file.initial()?, reps, tol)?,
                closed_bound: None,
                closed_exact: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{parse_grid_item, Format};

    fn spec(model: ModelChoice, grid: &[&str]) -> SweepSpec {
        SweepSpec {
            model,
            grid: grid.iter().map(|g| parse_grid_item(g).unwrap()).collect(),
            out: None,
            format: Format::Csv,
            seed: 1,
            steps: 100,
            tol: crate::fisher::PURITY_TOL,
        }
    }

    fn col(t: &Table, row: usize, name: &str) -> f64 {
        match &t.rows[row][t.column(name).unwrap()] {
            Cell::Real(v) => *v,
            other => panic!("{name}: {other:?}"),
        }
    }

    #[test]
    fn kbody_row_matches_closed_form() {
        let t = cmd_qfi(&spec(ModelChoice::KBody, &["N=2", "k=1"])).unwrap();
        assert_eq!(t.rows.len(), 1);
        let bound = col(&t, 0, "kappa") / col(&t, 0, "F_tilde");
        assert!((bound / col(&t, 0, "closed_bound") - 1.0).abs() < 1e-8);
    }

    #[test]
    fn dephasing_rows_match_closed_forms() {
        let t = cmd_qfi(&spec(ModelChoice::Dephasing, &["N=1,2", "gamma=0.1,1", "target=1,2", "ghz=0,1"])).unwrap();
        assert_eq!(t.rows.len(), 16);
        for i in 0..t.rows.len() {
            let bound = col(&t, i, "kappa") / col(&t, i, "F_tilde");
            assert!((bound / col(&t, i, "closed_bound") - 1.0).abs() < 1e-8, "row {i}");
            assert!((col(&t, i, "F_exact") / col(&t, i, "closed_exact") - 1.0).abs() < 1e-8, "row {i}");
        }
    }

    #[test]
    fn bad_points_become_error_rows() {
        let t = cmd_qfi(&spec(ModelChoice::KBody, &["N=4", "k=1,2"])).unwrap();
        let status = t.column("status").unwrap();
        assert_eq!(t.rows[0][status], Cell::Text("ok".into()));
        assert!(matches!(&t.rows[1][status], Cell::Text(s) if s.contains("order")));
        assert_eq!(t.rows[1][t.column("F_tilde").unwrap()], Cell::Empty);
    }

    #[test]
    fn config_errors() {
        assert!(cmd_qfi(&spec(ModelChoice::KBody, &["gamma=1"])).is_err());
        assert!(cmd_qfi(&spec(ModelChoice::KBody, &["N=2.5"])).is_err());
        assert!(cmd_qfi(&spec(ModelChoice::Dephasing, &["target=3"])).is_err());
    }
}

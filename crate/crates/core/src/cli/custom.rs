//! JSON model description for `--model custom`.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "hamiltonian": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]],
//!   "jumps": [{"operator": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]], "rate": {"constant": 0.2}}],
//!   "initial_state": {"ket": [[0.7071067811865476, 0], [0.7071067811865476, 0]]},
//!   "parameter": {"kind": "constant", "value": 1.0, "duration": 1.0}
//! }
//! ```
//!
//! Complex entries are `[re, im]` pairs. The estimated parameter multiplies
//! the whole generator: the state is `exp(X·𝖫̃)|ρ₀⟩⟩` with `X` set by
//! `parameter`.

use std::path::Path;

use serde::Deserialize;

use crate::dynamics::{superoperator, DensityMatrix, LindbladGenerator, RateProfile};
use crate::error::{Error, Result};
use crate::fisher::{ParameterKind, ParameterizedEvolution};
use crate::linalg::{c, ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomModelFile {
    pub dimension: usize,
    pub hamiltonian: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub jumps: Vec<CustomJump>,
    pub initial_state: CustomState,
    pub parameter: ParameterKind,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomJump {
    pub operator: Vec<Vec<[f64; 2]>>,
    pub rate: RateProfile,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CustomState {
    Ket(Vec<[f64; 2]>),
    Density(Vec<Vec<[f64; 2]>>),
}

impl CustomModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::config(format!("line {} column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config_field("--input", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config { message, .. } => Error::config_field(path.display().to_string(), message),
            other => other,
        })
    }

    pub fn generator(&self) -> Result<LindbladGenerator> {
        let h = matrix(&self.hamiltonian, self.dimension, "hamiltonian")?;
        let mut gen = LindbladGenerator::new(h).map_err(|e| Error::config_field("hamiltonian", e.to_string()))?;
        for (i, jump) in self.jumps.iter().enumerate() {
            let field = format!("jumps[{i}]");
            let a = matrix(&jump.operator, self.dimension, &field)?;
            jump.rate.validate().map_err(|e| Error::config_field(&field, e.to_string()))?;
            gen.add_jump(a, jump.rate.clone()).map_err(|e| Error::config_field(&field, e.to_string()))?;
        }
        Ok(gen)
    }

    pub fn initial(&self) -> Result<DensityMatrix> {
        let d = self.dimension;
        let field = "initial_state";
        match &self.initial_state {
            CustomState::Ket(entries) => {
                if entries.len() != d {
                    return Err(Error::config_field(field, format!("ket has {} entries, expected {d}", entries.len())));
                }
                let v = ComplexVector::from_iterator(d, entries.iter().map(|[re, im]| c(*re, *im)));
                let norm = v.norm();
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(Error::config_field(field, "ket must be nonzero and finite"));
                }
                DensityMatrix::pure(&(v / c(norm, 0.0))).map_err(|e| Error::config_field(field, e.to_string()))
            }
            CustomState::Density(rows) => DensityMatrix::new(matrix(rows, d, field)?)
                .map_err(|e| Error::config_field(field, e.to_string())),
        }
    }

    /// The parameter binding, with `value`/`duration` of a constant binding
    /// optionally replaced.
    pub fn evolution(&self, value: Option<f64>, duration: Option<f64>) -> Result<ParameterizedEvolution> {
        let shape = superoperator(&self.generator()?, 0.0)?;
        match self.parameter {
            ParameterKind::Constant { value: v0, duration: t0 } => {
                let tau = duration.unwrap_or(t0);
                if !(tau > 0.0) {
                    return Err(Error::config_field("parameter.duration", "must be positive"));
                }
                Ok(ParameterizedEvolution::constant(shape, value.unwrap_or(v0), tau))
            }
            ParameterKind::Profile { integrated, log_derivative, duration: t0 } => {
                if value.is_some() || duration.is_some() {
                    return Err(Error::config_field(
                        "parameter",
                        "grid overrides apply to constant bindings only",
                    ));
                }
                ParameterizedEvolution::profile(shape, integrated, log_derivative, t0)
            }
        }
    }
}

fn matrix(rows: &[Vec<[f64; 2]>], d: usize, field: &str) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::config_field("dimension", "must be positive"));
    }
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::config_field(field, format!("expected a {d}x{d} matrix")));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::config_field(field, "entries must be finite"));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT: &str = r#"{
        "dimension": 2,
        "hamiltonian": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]],
        "jumps": [{"operator": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]], "rate": {"constant": 0.2}}],
        "initial_state": {"ket": [[1, 0], [1, 0]]},
        "parameter": {"kind": "constant", "value": 1.0, "duration": 1.5}
    }"#;

    #[test]
    fn parses_and_builds() {
        let m = CustomModelFile::from_json(QUBIT).unwrap();
        assert_eq!(m.generator().unwrap().jumps().len(), 1);
        assert!((m.initial().unwrap().matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
        let evo = m.evolution(Some(2.0), None).unwrap();
        assert_eq!(evo.integrated(), 3.0);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = QUBIT.replace("[-0.5, 0]]]", "[-0.5, 0], [0, 0]]]");
        let err = CustomModelFile::from_json(&bad).unwrap().generator().unwrap_err();
        assert!(matches!(err, Error::Config { field: Some(ref f), .. } if f == "hamiltonian"), "{err}");

        let err = CustomModelFile::from_json("{\"dimension\": 2,\n \"bogus\": 1}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");

        let nonherm = QUBIT.replace("[[[0.5, 0], [0, 0]]", "[[[0.5, 0], [1, 0]]");
        let err = CustomModelFile::from_json(&nonherm).unwrap().generator().unwrap_err();
        assert!(err.to_string().contains("hamiltonian"));
    }
}

//! Quantum Fisher information for open-system parameter estimation.
//!
//! The state `ρ(x)` produced by a Lindblad semigroup is mapped to the pure
//! vector `|ρ⟩⟩/‖ρ‖`. Its Fisher information `F̃` is a covariance of the
//! vectorized generator, needs no diagonalization of `ρ`, and bounds the
//! exact QFI through `1/F ≤ κ/F̃`.
//!
//! ```
//! use openqfi::models::KBodyModel;
//! use openqfi::fisher::PURITY_TOL;
//!
//! let model = KBodyModel::new(3, 1, 0.1).unwrap();
//! let report = model.report(1.0, 1, PURITY_TOL).unwrap();
//! assert!(1.0 / report.qfi_exact <= report.dissipative_bound() * (1.0 + 1e-8));
//! ```

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fisher;
pub mod linalg;
pub mod models;
pub mod random;

pub use error::{Error, Result};

//! Seeded verification suites. Each check reports the worst value of a
//! quantity that must stay at or below a threshold.

use std::collections::BTreeSet;

use clap::ValueEnum;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    apply_generator, devectorize, evolve_direct, evolve_vectorized, evolve_with_shape, superoperator,
    unvec_operator, vec_operator, vectorize, DensityMatrix, LindbladGenerator, RateProfile,
};
use crate::error::Result;
use crate::fisher::{
    chain_rule, default_step, kappa, kappa_mixed, qcrb, qfi_closed_pure, qfi_exact, qfi_tilde_cov, qfi_tilde_fd,
    qfi_tilde_from_sld, sandwich_bounds, sld, ParameterizedEvolution, QfiReport,
};
use crate::linalg::{eigh, expm, expm_frechet, kron, max_abs, norm1, pauli_z, r};
use crate::models::lossy::{
    build_lossy_generator, lossy_bound_closed_form, lossy_bound_numeric, lossy_vectorized_state, phi_of_x,
};
use crate::models::{ghz_like_state, DephasingForms, DephasingModel, GhzSign, InitialKind, KBodyModel, LossyBosonModel, Target};
use crate::random::{ginibre, random_density, random_generator, random_hermitian, random_ket, seeded, SeededRng};

use super::figure2::{cmd_figure2, default_phis};
use super::format_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Bounds,
    Examples,
    Dynamics,
    All,
}

/// Operations every `all` run must exercise.
pub const REQUIRED_OPS: [&str; 31] = [
    "linalg::kron",
    "linalg::eigh",
    "linalg::expm",
    "linalg::expm_frechet",
    "dynamics::vectorize",
    "dynamics::devectorize",
    "dynamics::apply_generator",
    "dynamics::superoperator",
    "dynamics::evolve_direct",
    "dynamics::evolve_vectorized",
    "fisher::sld",
    "fisher::qfi_exact",
    "fisher::qfi_closed_pure",
    "fisher::qfi_tilde_cov",
    "fisher::qfi_tilde_fd",
    "fisher::qfi_tilde_from_sld",
    "fisher::kappa",
    "fisher::sandwich_bounds",
    "fisher::qcrb",
    "fisher::chain_rule",
    "models::KBodyModel::generator",
    "models::ghz_like_state",
    "models::KBodyModel::eigenrelation_residual",
    "models::KBodyModel::bound_closed_form",
    "models::DephasingModel::generator",
    "models::DephasingForms::bounds",
    "models::DephasingForms::exact",
    "models::build_lossy_generator",
    "models::lossy_vectorized_state",
    "models::lossy_bound_closed_form",
    "models::phi_of_x",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    /// Worst value over the samples; absent when a sample failed to compute.
    pub measured: Option<f64>,
    pub threshold: f64,
    /// `threshold − measured`.
    pub margin: Option<f64>,
    pub samples: usize,
    pub error: Option<String>,
    pub covers: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    pub required: usize,
    pub covered: Vec<&'static str>,
    pub missing: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub coverage: Coverage,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
        let mut out = String::from("suite,name,passed,measured,threshold,margin,samples\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.suite,
                c.name,
                c.passed,
                opt(c.measured),
                format_real(c.threshold),
                opt(c.margin),
                c.samples
            ));
        }
        out
    }
}

fn make_check(
    suite: &'static str,
    name: &str,
    threshold: f64,
    covers: &[&'static str],
    values: Result<Vec<f64>>,
) -> Check {
    let (measured, samples, error) = match values {
        Ok(v) if v.is_empty() => (None, 0, Some("no samples".to_string())),
        Ok(v) if v.iter().any(|x| !x.is_finite()) => (None, v.len(), Some("non-finite value".to_string())),
        Ok(v) => (v.iter().cloned().reduce(f64::max), v.len(), None),
        Err(e) => (None, 0, Some(e.to_string())),
    };
    Check {
        suite,
        name: name.to_string(),
        passed: measured.is_some_and(|m| m <= threshold),
        measured,
        threshold,
        margin: measured.map(|m| threshold - m),
        samples,
        error,
        covers: covers.to_vec(),
    }
}

fn rng_for(seed: u64, stream: u64, i: usize) -> SeededRng {
    seeded(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (stream << 32) ^ i as u64)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `(1/F − κ/F̃)/(κ/F̃)`: positive when the dissipative bound is violated.
fn ordering_violation(f: f64, kappa: f64, f_tilde: f64) -> f64 {
    let bound = kappa / f_tilde;
    (1.0 / f - bound) / bound
}

/// Run `suite`; `steps` is the RK4 step count and `tol` the purity tolerance.
pub fn cmd_verify(suite: Suite, seed: u64, steps: usize, tol: f64) -> VerifyReport {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Bounds | Suite::All) {
        checks.extend(bounds_suite(seed, tol));
    }
    if matches!(suite, Suite::Examples | Suite::All) {
        checks.extend(examples_suite(steps, tol));
    }
    if matches!(suite, Suite::Dynamics | Suite::All) {
        checks.extend(dynamics_suite(seed, steps));
    }
    let covered: BTreeSet<&'static str> = checks.iter().flat_map(|c| c.covers.iter().cloned()).collect();
    let missing: Vec<&'static str> = REQUIRED_OPS.iter().cloned().filter(|op| !covered.contains(op)).collect();
    let coverage_ok = suite != Suite::All || missing.is_empty();
    VerifyReport {
        suite,
        seed,
        passed: coverage_ok && checks.iter().all(|c| c.passed),
        checks,
        coverage: Coverage {
            required: REQUIRED_OPS.len(),
            covered: covered.into_iter().collect(),
            missing,
        },
    }
}

// ---------------------------------------------------------------- bounds

fn bounds_suite(seed: u64, tol: f64) -> Vec<Check> {
    let mut out = Vec::new();

    let pure: Result<Vec<(f64, f64)>> = (0..200usize)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 1, i);
            let d = 1 << (1 + i % 3);
            let psi = random_ket(&mut rng, d);
            let h = random_hermitian(&mut rng, d, 1.0);
            let tau = rng.random_range(0.2..1.5);
            let x = rng.random_range(0.5..2.0);
            let shape = superoperator(&LindbladGenerator::new(h.clone())?, 0.0)?;
            let evo = ParameterizedEvolution::constant(shape, x, tau);
            let rep = QfiReport::compute(&evo, &DensityMatrix::pure(&psi)?, 1, tol)?;
            let closed = qfi_closed_pure(&psi, &h, tau)?;
            Ok((rel(rep.qfi_tilde, 2.0 * rep.qfi_exact), rel(rep.qfi_exact, closed)))
        })
        .collect();
    let (eq, closed) = split_pairs(pure);
    out.push(make_check(
        "bounds",
        "pure_unitary_equality",
        1e-8,
        &["dynamics::superoperator", "fisher::qfi_tilde_cov", "fisher::qfi_exact", "fisher::sld"],
        eq,
    ));
    out.push(make_check("bounds", "pure_unitary_closed_form", 1e-8, &["fisher::qfi_closed_pure"], closed));

    let families: Result<Vec<[f64; 4]>> = (0..1000usize)
        .into_par_iter()
        .map(|i| random_family(seed, i, tol))
        .collect();
    let columns: Result<Vec<Vec<f64>>> =
        families.map(|rows| (0..4).map(|j| rows.iter().map(|r| r[j]).collect()).collect());
    let col = |j: usize| columns.as_ref().map(|c| c[j].clone()).map_err(Clone::clone);
    out.push(make_check(
        "bounds",
        "sandwich_random_families",
        1e-8,
        &["fisher::sandwich_bounds", "fisher::sld", "fisher::qfi_exact", "dynamics::devectorize"],
        col(0),
    ));
    out.push(make_check("bounds", "qcrb_ordering_random_families", 1e-8, &["fisher::kappa"], col(1)));
    out.push(make_check("bounds", "f_tilde_finite_difference", 1e-6, &["fisher::qfi_tilde_fd"], col(2)));
    out.push(make_check("bounds", "f_tilde_from_sld", 1e-6, &["fisher::qfi_tilde_from_sld"], col(3)));
    out
}

fn split_pairs(v: Result<Vec<(f64, f64)>>) -> (Result<Vec<f64>>, Result<Vec<f64>>) {
    match v {
        Ok(pairs) => (Ok(pairs.iter().map(|p| p.0).collect()), Ok(pairs.iter().map(|p| p.1).collect())),
        Err(e) => (Err(e.clone()), Err(e)),
    }
}

/// One random full-rank family `x ↦ exp(xτ𝖫̃)ρ₀` on a qubit or qutrit:
/// sandwich violation, ordering violation, and the relative gaps of the
/// finite-difference and SLD forms of `F̃` from the covariance form.
fn random_family(seed: u64, i: usize, tol: f64) -> Result<[f64; 4]> {
    let mut rng = rng_for(seed, 2, i);
    let d = 2 + i % 2;
    let rho0 = random_density(&mut rng, d, 0.1);
    let gen = random_generator(&mut rng, d, 2, 1.0);
    let shape = superoperator(&gen, 0.0)?;
    let tau = rng.random_range(0.1..1.0);
    let x0 = rng.random_range(0.5..1.5);
    let family = |x: f64| evolve_with_shape(&shape, &rho0, x * tau);
    let h = 1e-5;

    let state = family(x0)?;
    let rho = state.to_density()?;
    let drho = (unvec_operator(&family(x0 + h)?.raw())? - unvec_operator(&family(x0 - h)?.raw())?) * r(0.5 / h);
    let f = qfi_exact(&rho, &drho)?;
    let evo = ParameterizedEvolution::constant(shape.clone(), x0, tau);
    let f_tilde = qfi_tilde_cov(&state, &evo)?;
    let l = sld(&rho, &drho)?;
    let b = sandwich_bounds(&rho, &l, f_tilde)?;
    let below = (b.lower - f) / f;
    let above = b.upper.map_or(f64::NEG_INFINITY, |u| (f - u) / f);
    let k = kappa(&rho, tol);
    Ok([
        below.max(above),
        ordering_violation(f, k, f_tilde),
        rel(qfi_tilde_fd(family, x0, h)?, f_tilde),
        rel(qfi_tilde_from_sld(&rho, &l)?, f_tilde),
    ])
}

// ---------------------------------------------------------------- examples

fn dephasing(n: usize, gamma: f64, initial: InitialKind) -> Result<DephasingModel> {
    let b: f64 = 0.3;
    let amplitude = gamma * b / b.exp_m1();
    DephasingModel::new(n, 1.0, RateProfile::Exponential { amplitude, growth: b }, initial)
}

const GAMMAS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

fn examples_suite(steps: usize, tol: f64) -> Vec<Check> {
    let mut out = Vec::new();
    let mut ordering: Vec<Result<f64>> = Vec::new();
    let record = |rep: &QfiReport| ordering_violation(rep.qfi_exact, rep.kappa, rep.qfi_tilde);

    // k-body
    let orders: Vec<(usize, usize)> =
        (1..=5).flat_map(|n| (1..=n).step_by(2).map(move |k| (n, k))).collect();
    let residuals: Result<Vec<f64>> =
        orders.par_iter().map(|&(n, k)| KBodyModel::new(n, k, 0.1)?.eigenrelation_residual()).collect();
    out.push(make_check(
        "examples",
        "kbody_eigenrelation",
        1e-10,
        &["models::KBodyModel::generator", "models::KBodyModel::eigenrelation_residual"],
        residuals,
    ));

    let points: Vec<(usize, usize, f64)> =
        orders.iter().flat_map(|&(n, k)| [0.01, 0.1, 0.5].map(|x| (n, k, x))).collect();
    let reports: Vec<Result<(f64, QfiReport)>> = points
        .par_iter()
        .map(|&(n, k, x)| {
            let m = KBodyModel::new(n, k, x)?;
            let rep = m.report(1.0, 100, tol)?;
            Ok((m.bound_closed_form(1.0)?, rep))
        })
        .collect();
    let closed: Result<Vec<f64>> = reports
        .iter()
        .map(|r| r.as_ref().map(|(c, rep)| rel(rep.dissipative_bound(), *c)).map_err(Clone::clone))
        .collect();
    out.push(make_check(
        "examples",
        "kbody_closed_form",
        1e-8,
        &["models::KBodyModel::bound_closed_form", "fisher::qfi_tilde_cov", "fisher::kappa"],
        closed,
    ));
    let precision: Result<Vec<f64>> = reports
        .iter()
        .map(|r| {
            let (_, rep) = r.as_ref().map_err(Clone::clone)?;
            let expect = qcrb(rep.qfi_tilde / rep.kappa, rep.repetitions)?;
            Ok(rel(rep.precision_bound.unwrap_or(f64::NAN), expect))
        })
        .collect();
    out.push(make_check("examples", "kbody_precision_bound", 1e-12, &["fisher::qcrb"], precision));
    for r in &reports {
        ordering.push(r.as_ref().map(|(_, rep)| record(rep)).map_err(Clone::clone));
    }

    let ghz: Result<Vec<f64>> = (1..=6)
        .map(|n| {
            let rho = ghz_like_state(n, &pauli_z(), GhzSign::Plus)?;
            let last = rho.dim() - 1;
            Ok((rho.purity() - 1.0).abs().max((rho.matrix()[(0, last)].re - 0.5).abs()))
        })
        .collect();
    out.push(make_check("examples", "ghz_state_construction", 1e-14, &["models::ghz_like_state"], ghz));

    // dephasing ratios
    let grid: Vec<(usize, f64, InitialKind, Target)> = (1..=4)
        .flat_map(|n| {
            GAMMAS.iter().flat_map(move |&g| {
                [InitialKind::Product, InitialKind::Ghz]
                    .into_iter()
                    .flat_map(move |kind| [Target::X1, Target::X2].map(|t| (n, g, kind, t)))
            })
        })
        .collect();
    let deph: Vec<Result<(f64, f64, f64, QfiReport)>> = grid
        .par_iter()
        .map(|&(n, gamma, kind, target)| {
            let m = dephasing(n, gamma, kind)?;
            let rep = m.report(target, 1.0, 1, tol)?;
            let fd = m.qfi_exact_fd(target, 1.0, 1e-5)?;
            let exact = m.closed_form_exact(target, 1.0)?;
            let ng = match kind {
                InitialKind::Product => gamma,
                InitialKind::Ghz => n as f64 * gamma,
            };
            let expected_ratio = match target {
                Target::X1 => 1.0 / (1.0 + (-ng).exp()),
                Target::X2 => ((2.0 * ng).exp() - ng.exp()) / ((2.0 * ng).exp() + 1.0),
            };
            Ok((expected_ratio, fd, exact, rep))
        })
        .collect();
    let ratio_values = |want: Target| -> Result<Vec<f64>> {
        grid.iter()
            .zip(&deph)
            .filter(|(p, _)| p.3 == want)
            .map(|(_, r)| {
                let (expected, _, _, rep) = r.as_ref().map_err(Clone::clone)?;
                Ok((rep.qfi_tilde / rep.kappa / rep.qfi_exact - expected).abs())
            })
            .collect()
    };
    out.push(make_check("examples", "dephasing_x1_ratio", 1e-6, &[], ratio_values(Target::X1)));
    out.push(make_check("examples", "dephasing_x2_ratio", 1e-6, &[], ratio_values(Target::X2)));
    let exact: Result<Vec<f64>> = deph
        .iter()
        .map(|r| {
            let (_, fd, exact, rep) = r.as_ref().map_err(Clone::clone)?;
            Ok(rel(*fd, *exact).max(rel(rep.qfi_exact, *exact)))
        })
        .collect();
    out.push(make_check(
        "examples",
        "dephasing_exact_closed_forms",
        1e-5,
        &["models::DephasingForms::exact", "fisher::qfi_exact"],
        exact,
    ));
    let bound_forms: Result<Vec<f64>> = grid
        .iter()
        .zip(&deph)
        .map(|(&(n, gamma, kind, target), r)| {
            let (_, _, _, rep) = r.as_ref().map_err(Clone::clone)?;
            let forms = DephasingForms::bounds(n, dephasing(n, gamma, kind)?.gamma(1.0), 1.0, 0.3)?;
            Ok(rel(rep.qfi_tilde / rep.kappa, forms.pick(kind, target)))
        })
        .collect();
    out.push(make_check(
        "examples",
        "dephasing_bound_closed_forms",
        1e-8,
        &["models::DephasingForms::bounds"],
        bound_forms,
    ));
    for r in &deph {
        ordering.push(r.as_ref().map(|(_, _, _, rep)| record(rep)).map_err(Clone::clone));
    }

    let unitary: Result<Vec<f64>> = (1..=4)
        .flat_map(|n| [InitialKind::Product, InitialKind::Ghz].map(|k| (n, k)))
        .map(|(n, kind)| {
            let m = dephasing(n, 0.0, kind)?;
            let (start, evo) = m.split(Target::X1, 1.0)?;
            let state = evo.evolve(&start)?;
            let rho = state.to_density()?;
            let f = qfi_exact(&rho, &evo.state_derivative(&state)?)?;
            let numeric = qfi_tilde_cov(&state, &evo)? / kappa_mixed(&rho) / f;
            let closed = m.closed_form_bound(Target::X1, 1.0)? / m.closed_form_exact(Target::X1, 1.0)?;
            Ok((numeric - 0.5).abs().max((closed - 0.5).abs()))
        })
        .collect();
    out.push(make_check("examples", "dephasing_unitary_limit_ratio", 1e-8, &[], unitary));

    let large: Result<Vec<f64>> = (|| {
        let m = dephasing(3, 5.0, InitialKind::Ghz)?;
        let rep = m.report(Target::X1, 1.0, 1, tol)?;
        Ok(vec![(rep.qfi_tilde / rep.kappa / rep.qfi_exact - 1.0).abs()])
    })();
    out.push(make_check("examples", "dephasing_ghz_ratio_at_ngamma_15", 5e-7, &[], large));

    let direct: Result<Vec<f64>> = (|| {
        let m = dephasing(2, 0.7, InitialKind::Ghz)?;
        let rho = evolve_direct(&m.generator()?, &m.initial_state()?, 1.0, steps)?;
        Ok(vec![rho.trace_distance(&m.evolved(1.0)?.to_density()?)?])
    })();
    out.push(make_check(
        "examples",
        "dephasing_generator_direct",
        1e-8,
        &["models::DephasingModel::generator", "dynamics::evolve_direct"],
        direct,
    ));

    let additivity: Result<Vec<f64>> = (1..=4)
        .flat_map(|n| [Target::X1, Target::X2].map(|t| (n, t)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(n, target)| {
            let whole = dephasing(n, 0.5, InitialKind::Product)?.register_report(target, 1.0, 1, tol)?;
            let one = dephasing(1, 0.5, InitialKind::Product)?.register_report(target, 1.0, 1, tol)?;
            Ok(rel(whole.qfi_tilde, n as f64 * one.qfi_tilde))
        })
        .collect();
    out.push(make_check("examples", "dephasing_product_additivity", 1e-8, &[], additivity));

    // lossy boson
    let pops: Result<Vec<f64>> = (|| {
        let m = LossyBosonModel::new(4, 0.7, 1.1)?;
        let (phi, _) = phi_of_x(m.x, m.tau)?;
        let rho = evolve_direct(&build_lossy_generator(&m), &m.initial_state(), m.tau, steps)?;
        let got = vectorize(&rho);
        let expect = lossy_vectorized_state(4, phi)?;
        Ok(vec![(got.amplitudes() - expect.amplitudes()).norm()])
    })();
    out.push(make_check(
        "examples",
        "lossy_state_direct",
        1e-8,
        &[
            "models::build_lossy_generator",
            "models::lossy_vectorized_state",
            "models::phi_of_x",
            "dynamics::vectorize",
        ],
        pops,
    ));

    let phis = default_phis();
    let lossy_points: Vec<(usize, f64)> = [1, 5, 10, 20].iter().flat_map(|&n| phis.iter().map(move |&p| (n, p))).collect();
    let lossy: Result<Vec<f64>> = lossy_points
        .par_iter()
        .map(|&(n, phi)| Ok(rel(lossy_bound_numeric(n, phi)?, lossy_bound_closed_form(n, phi)?)))
        .collect();
    out.push(make_check(
        "examples",
        "lossy_closed_form",
        1e-6,
        &["models::lossy_bound_closed_form", "fisher::qfi_tilde_fd"],
        lossy,
    ));

    let chain: Result<Vec<f64>> = (|| {
        let m = LossyBosonModel::new(3, 0.5, 1.0)?;
        let rep = m.report(1, tol)?;
        let phi = m.phi();
        let f_phi = qfi_tilde_fd(|p| lossy_vectorized_state(3, p), phi, default_step(phi))?;
        ordering.push(Ok(record(&rep)));
        Ok(vec![rel(rep.qfi_tilde, chain_rule(f_phi, m.dphi_dx()))])
    })();
    out.push(make_check("examples", "lossy_chain_rule", 1e-6, &["fisher::chain_rule"], chain));

    let ns: Vec<usize> = (5..=50).collect();
    let slope = cmd_figure2(&ns, &phis).map(|d| vec![d.worst_slope_deviation(-0.5).unwrap_or(f64::NAN)]);
    out.push(make_check("examples", "lossy_loglog_slope", 0.03, &[], slope));

    let ordering: Result<Vec<f64>> = ordering.into_iter().collect();
    out.push(make_check("examples", "example_qcrb_ordering", 1e-8, &[], ordering));
    out
}

// ---------------------------------------------------------------- dynamics

fn dynamics_suite(seed: u64, steps: usize) -> Vec<Check> {
    let mut out = Vec::new();

    let runs: Result<Vec<[f64; 3]>> = (0..100usize)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 3, i);
            let d = 2 + i % 2;
            let gen = random_generator(&mut rng, d, 2, 1.0);
            let rho0 = if i % 4 < 2 {
                DensityMatrix::pure(&random_ket(&mut rng, d))?
            } else {
                random_density(&mut rng, d, 0.0)
            };
            let scale = norm1(superoperator(&gen, 0.0)?.matrix());
            let tau = rng.random_range(0.2..1.0) * 5.0 / scale.max(1.0);
            let direct = evolve_direct(&gen, &rho0, tau, steps)?;
            let vectorized = evolve_vectorized(&gen, &rho0, tau)?.to_density()?;
            Ok([
                direct.trace_distance(&vectorized)?,
                (direct.trace().re - 1.0).abs().max(direct.trace().im.abs()),
                -direct.eigen().min(),
            ])
        })
        .collect();
    let col = |j: usize| runs.as_ref().map(|rs| rs.iter().map(|r| r[j]).collect()).map_err(Clone::clone);
    out.push(make_check(
        "dynamics",
        "direct_vs_vectorized",
        1e-8,
        &["dynamics::evolve_direct", "dynamics::evolve_vectorized", "dynamics::superoperator"],
        col(0),
    ));
    out.push(make_check("dynamics", "trace_drift", 1e-9, &[], col(1)));
    out.push(make_check("dynamics", "positivity", 1e-7, &["linalg::eigh"], col(2)));

    let linalg: Result<Vec<[f64; 6]>> = (0..50usize)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 4, i);
            let d = 2 + i % 5;
            let a = ginibre(&mut rng, d, d) * r(0.7);
            let e = ginibre(&mut rng, d, d);
            let ea = expm(&a)?;
            let e2a = expm(&(&a * r(2.0)))?;
            let semigroup = max_abs(&(&ea * &ea - &e2a)) / max_abs(&e2a);
            let h = 1e-5;
            let fd = (expm(&(&a + &e * r(h)))? - expm(&(&a - &e * r(h)))?) * r(0.5 / h);
            let fr = expm_frechet(&a, &e)?;
            let frechet = max_abs(&(&fr - &fd)) / max_abs(&fr);

            let (b, c, dd) = (ginibre(&mut rng, 2, 3), ginibre(&mut rng, d, 2), ginibre(&mut rng, 3, 2));
            let mixed = max_abs(&(kron(&a, &b) * kron(&c, &dd) - kron(&(&a * &c), &(&b * &dd))));

            let herm = random_hermitian(&mut rng, d + 2, 1.0);
            let eig = eigh(&herm)?;
            let recon = max_abs(&(eig.reconstruct() - &herm)) / max_abs(&herm);

            let rho = random_density(&mut rng, d, 0.0);
            let v = vectorize(&rho);
            let back = devectorize(v.amplitudes(), v.purity().sqrt())?;
            let round_trip = max_abs(&(back.matrix() - rho.matrix()));

            let gen = random_generator(&mut rng, d, 2, 1.0);
            let direct = apply_generator(&gen, &rho, 0.0)?;
            let via = unvec_operator(&superoperator(&gen, 0.0)?.apply(&vec_operator(rho.matrix())))?;
            let consistency = max_abs(&(direct - via));
            Ok([semigroup, frechet, mixed, recon, round_trip, consistency])
        })
        .collect();
    let col = |j: usize| linalg.as_ref().map(|rs| rs.iter().map(|r| r[j]).collect()).map_err(Clone::clone);
    out.push(make_check("dynamics", "expm_semigroup", 1e-10, &["linalg::expm"], col(0)));
    out.push(make_check("dynamics", "expm_frechet_finite_difference", 1e-6, &["linalg::expm_frechet"], col(1)));
    out.push(make_check("dynamics", "kron_mixed_product", 1e-12, &["linalg::kron"], col(2)));
    out.push(make_check("dynamics", "eigh_reconstruction", 1e-12, &["linalg::eigh"], col(3)));
    out.push(make_check(
        "dynamics",
        "vectorize_round_trip",
        1e-14,
        &["dynamics::vectorize", "dynamics::devectorize"],
        col(4),
    ));
    out.push(make_check(
        "dynamics",
        "generator_superoperator_consistency",
        1e-12,
        &["dynamics::apply_generator", "dynamics::superoperator"],
        col(5),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_semantics() {
        let c = make_check("s", "x", 1.0, &[], Ok(vec![0.5, 0.9]));
        assert!(c.passed);
        assert_eq!(c.measured, Some(0.9));
        assert!((c.margin.unwrap() - 0.1).abs() < 1e-15);
        assert!(!make_check("s", "x", 1.0, &[], Ok(vec![1.5])).passed);
        assert!(!make_check("s", "x", 1.0, &[], Ok(vec![f64::NAN])).passed);
        assert!(!make_check("s", "x", 1.0, &[], Ok(vec![])).passed);
        let e = make_check("s", "x", 1.0, &[], Err(crate::Error::NonFinite));
        assert!(!e.passed && e.error.is_some());
    }

    #[test]
    fn dynamics_suite_passes() {
        let rep = cmd_verify(Suite::Dynamics, 5, 10_000, crate::fisher::PURITY_TOL);
        for c in &rep.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(rep.passed);
        assert!(!rep.coverage.missing.is_empty());
    }
}

//! Command-line surface: `qfi` sweeps, `figure2` plot data and `verify` suites.
//!
//! Every command is a pure function of its arguments; output for a fixed
//! seed is byte-identical across runs and thread counts.

mod custom;
mod figure2;
mod qfi;
mod table;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fisher::PURITY_TOL;

pub use custom::{CustomModelFile, CustomState};
pub use figure2::{cmd_figure2, default_ns, default_phis, fit_loglog, Figure2Data, LineFit};
pub use qfi::cmd_qfi;
pub use table::{Cell, Table};
pub use verify::{cmd_verify, Check, Coverage, Suite, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "openqfi", version, about = "Dissipative quantum Cramér-Rao bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fisher informations and bounds over a parameter grid.
    Qfi(CommonArgs),
    /// Lossy-boson precision bound vs photon number, with log-log fits.
    Figure2(CommonArgs),
    /// Run a verification suite and report pass/fail with margins.
    Verify {
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// kbody, dephasing, lossy or custom.
    #[arg(long)]
    pub model: Option<String>,
    /// Grid axis `key=v1,v2,...`; repeat for more axes.
    #[arg(long = "grid", value_name = "KEY=VALUES")]
    pub grid: Vec<String>,
    /// Model description for `--model custom`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// RK4 steps for direct integration.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Purity tolerance selecting the pure-state `κ`.
    #[arg(long, default_value_t = PURITY_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelChoice {
    KBody,
    Dephasing,
    Lossy,
    Custom(PathBuf),
}

impl ModelChoice {
    pub fn name(&self) -> &'static str {
        match self {
            ModelChoice::KBody => "kbody",
            ModelChoice::Dephasing => "dephasing",
            ModelChoice::Lossy => "lossy",
            ModelChoice::Custom(_) => "custom",
        }
    }
}

/// A validated request: model, grid axes in command-line order, output and
/// numerical settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub model: ModelChoice,
    pub grid: Vec<(String, Vec<f64>)>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub steps: usize,
    pub tol: f64,
}

impl SweepSpec {
    pub fn from_args(args: &CommonArgs, default_model: Option<ModelChoice>, default_format: Format) -> Result<Self> {
        let model = match args.model.as_deref() {
            None => default_model.ok_or_else(|| Error::config_field("--model", "a model is required"))?,
            Some("kbody") => ModelChoice::KBody,
            Some("dephasing") => ModelChoice::Dephasing,
            Some("lossy") => ModelChoice::Lossy,
            Some("custom") => ModelChoice::Custom(
                args.input
                    .clone()
                    .ok_or_else(|| Error::config_field("--input", "custom models need --input FILE"))?,
            ),
            Some(other) => {
                return Err(Error::config_field("--model", format!("unknown model `{other}`")));
            }
        };
        if args.input.is_some() && !matches!(model, ModelChoice::Custom(_)) {
            return Err(Error::config_field("--input", "only used with --model custom"));
        }
        if args.steps == 0 {
            return Err(Error::config_field("--steps", "must be positive"));
        }
        if !(args.tol >= 0.0 && args.tol < 1.0) {
            return Err(Error::config_field("--tol", format!("must lie in [0, 1), got {}", args.tol)));
        }
        let mut grid: Vec<(String, Vec<f64>)> = Vec::new();
        for item in &args.grid {
            let (key, values) = parse_grid_item(item)?;
            if grid.iter().any(|(k, _)| *k == key) {
                return Err(Error::config_field(key, "grid axis given twice"));
            }
            grid.push((key, values));
        }
        Ok(SweepSpec {
            model,
            grid,
            out: args.out.clone(),
            format: args.format.unwrap_or(default_format),
            seed: args.seed,
            steps: args.steps,
            tol: args.tol,
        })
    }

    pub fn axis(&self, key: &str) -> Option<&[f64]> {
        self.grid.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_slice())
    }

    /// Reject axes outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (key, _) in &self.grid {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::config_field(
                    key.clone(),
                    format!(
                        "not a parameter of model `{}` (expected one of {})",
                        self.model.name(),
                        allowed.join(", ")
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// `key=v1,v2,...` into a non-empty list of finite reals.
pub fn parse_grid_item(item: &str) -> Result<(String, Vec<f64>)> {
    let (key, rest) = item
        .split_once('=')
        .ok_or_else(|| Error::config_field("--grid", format!("expected KEY=VALUES, got `{item}`")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::config_field("--grid", format!("missing key in `{item}`")));
    }
    let mut values = Vec::new();
    for (i, raw) in rest.split(',').enumerate() {
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::config_field(key, format!("value {} `{raw}` is not a number", i + 1)))?;
        if !v.is_finite() {
            return Err(Error::config_field(key, format!("value {} `{raw}` is not finite", i + 1)));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::config_field(key, "empty grid"));
    }
    Ok((key.to_string(), values))
}

/// A grid value that must be a positive integer.
pub fn as_count(key: &str, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(Error::config_field(key, format!("expected a positive integer, got {v}")))
    }
}

/// Cartesian product of the axes, last axis fastest.
pub fn expand_grid(axes: &[(String, Vec<f64>)]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for (_, values) in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    points
}

/// 17 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Error::config_field("--out", format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::config(format!("cannot write to stdout: {e}")))
        }
    }
}

fn run_command(command: Command) -> Result<i32> {
    match command {
        Command::Qfi(args) => {
            let spec = SweepSpec::from_args(&args, None, Format::Csv)?;
            let table = cmd_qfi(&spec)?;
            let body = match spec.format {
                Format::Csv => table.to_csv(),
                Format::Json => table.to_json(),
            };
            emit(&spec.out, &body)?;
            Ok(EXIT_OK)
        }
        Command::Figure2(args) => {
            let spec = SweepSpec::from_args(&args, Some(ModelChoice::Lossy), Format::Csv)?;
            if spec.model != ModelChoice::Lossy {
                return Err(Error::config_field("--model", "figure2 uses the lossy model only"));
            }
            spec.check_keys(&["N", "phi"])?;
            let ns = match spec.axis("N") {
                Some(values) => values.iter().map(|v| as_count("N", *v)).collect::<Result<Vec<_>>>()?,
                None => default_ns(),
            };
            let phis = spec.axis("phi").map(<[f64]>::to_vec).unwrap_or_else(default_phis);
            let data = cmd_figure2(&ns, &phis)?;
            let body = match spec.format {
                Format::Csv => data.to_csv(),
                Format::Json => data.to_json(),
            };
            emit(&spec.out, &body)?;
            Ok(EXIT_OK)
        }
        Command::Verify { suite, common } => {
            if common.model.is_some() || !common.grid.is_empty() || common.input.is_some() {
                return Err(Error::config("verify takes no --model, --grid or --input"));
            }
            let spec = SweepSpec::from_args(&common, Some(ModelChoice::KBody), Format::Json)?;
            let report = cmd_verify(suite, spec.seed, spec.steps, spec.tol);
            let body = match spec.format {
                Format::Csv => report.to_csv(),
                Format::Json => report.to_json(),
            };
            emit(&spec.out, &body)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

/// Parse arguments (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run_command(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid_item("N=1,2, 3").unwrap(), ("N".into(), vec![1.0, 2.0, 3.0]));
        assert!(matches!(parse_grid_item("N="), Err(Error::Config { field: Some(f), .. }) if f == "N"));
        assert!(parse_grid_item("N=1,x").is_err());
        assert!(parse_grid_item("N=inf").is_err());
        assert!(parse_grid_item("=1").is_err());
        assert!(parse_grid_item("N").is_err());
    }

    #[test]
    fn grid_expansion_order() {
        let axes = vec![("a".to_string(), vec![1.0, 2.0]), ("b".to_string(), vec![3.0, 4.0, 5.0])];
        let pts = expand_grid(&axes);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![1.0, 3.0]);
        assert_eq!(pts[1], vec![1.0, 4.0]);
        assert_eq!(pts[5], vec![2.0, 5.0]);
        assert_eq!(expand_grid(&[]), vec![Vec::<f64>::new()]);
    }

    #[test]
    fn counts_and_formatting() {
        assert_eq!(as_count("N", 4.0).unwrap(), 4);
        assert!(as_count("N", 0.0).is_err());
        assert!(as_count("N", 2.5).is_err());
        assert_eq!(format_real(0.1), "1.0000000000000001e-1");
        assert_eq!(format_real(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["openqfi", "verify", "nonsense"]), EXIT_USAGE);
        assert_eq!(run(["openqfi", "qfi"]), EXIT_USAGE);
        assert_eq!(run(["openqfi", "qfi", "--model", "kbody", "--grid", "N="]), EXIT_USAGE);
        assert_eq!(run(["openqfi", "frobnicate"]), EXIT_USAGE);
    }
}

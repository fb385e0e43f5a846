//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure or I/O error, 2 malformed
//! config or invalid spectrum request, 3 inconsistent twist specification,
//! 4 quadrature did not converge (partial results are still written).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{ConfigError, Format, RunConfig};
use crate::spectrum::{compute_spectrum, SpectrumError};
use crate::starprod::build_table;
use crate::twists::LinearTwist;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

const DEFAULT_OUT: &str = "out";

#[derive(Debug, Parser)]
#[command(name = "ncrindler", version, about = "Twist-deformed Rindler commutators and Unruh spectra")]
pub struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `[output] dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Random seed for sampled checks (overrides `seed`).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output format (overrides `[output] format`).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Star commutators [c_mu, c_nu] of the coordinate functions.
    Commutator,
    /// Commutative and deformed power spectra on a frequency grid.
    Spectrum,
    /// Run every invariant suite and write a pass/fail report.
    Verify,
}

/// Resolved run settings: config file merged with command-line overrides.
struct Run {
    config: RunConfig,
    out: PathBuf,
    format: Option<Format>,
}

fn load(cli: &Cli) -> Result<Run, ConfigError> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = Some(s);
    }
    let out = cli
        .out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let format = cli.format.or(config.output.format);
    Ok(Run { config, out, format })
}

fn config_exit(e: &ConfigError) -> i32 {
    match e {
        ConfigError::Parse(_) => EXIT_CONFIG,
        ConfigError::Inconsistent(_) => EXIT_INCONSISTENT,
    }
}

/// Write `contents` to `dir/name` through a temporary file in the same directory.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| e.error)?;
    Ok(target)
}

fn write_all(dir: &Path, files: &[(String, String)]) -> Result<(), i32> {
    for (name, contents) in files {
        if let Err(e) = write_atomic(dir, name, contents) {
            eprintln!("error: writing {}: {e}", dir.join(name).display());
            return Err(EXIT_FAILED);
        }
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn cmd_commutator(run: &Run) -> i32 {
    let (spec, frame) = match run.config.twist.resolve() {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return config_exit(&e);
        }
    };
    let table = match LinearTwist::new(&spec, &frame)
        .map_err(|e| e.to_string())
        .and_then(|t| build_table(&t).map_err(|e| e.to_string()))
    {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: inconsistent twist specification: {e}");
            return EXIT_INCONSISTENT;
        }
    };
    let text = table.to_text();
    let mut files = vec![
        ("commutator.json".to_string(), pretty(&table.to_json())),
        ("commutator.txt".to_string(), text.clone()),
    ];
    if run.format == Some(Format::Csv) {
        let mut csv = String::from("mu,nu,value\n");
        for ((mu, nu), v) in &table.entries {
            csv.push_str(&format!("{mu},{nu},\"{v}\"\n"));
        }
        files.push(("commutator.csv".to_string(), csv));
    }
    if let Err(code) = write_all(&run.out, &files) {
        return code;
    }
    print!("{text}");
    EXIT_OK
}

fn cmd_spectrum(run: &Run) -> i32 {
    let req = match run.config.spectrum.request() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return config_exit(&e);
        }
    };
    let result = match compute_spectrum(&req) {
        Ok(r) => r,
        Err(e @ (SpectrumError::EmptyGrid | SpectrumError::InvalidParams(_) | SpectrumError::GammaPole(..))) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILED;
        }
    };
    let mut json = result.to_json();
    json["seed"] = json!(run.config.seed());
    json["converged"] = json!(result.all_converged());
    json["tolerances"] = serde_json::to_value(&run.config.tolerances).expect("tolerances serialize");

    let csv = result.to_csv();
    let files = match run.format {
        Some(Format::Csv) => vec![("spectrum.csv".to_string(), csv.clone())],
        Some(Format::Json) => vec![("spectrum.json".to_string(), pretty(&json))],
        Some(Format::Text) => vec![("spectrum.txt".to_string(), spectrum_text(&result))],
        None => vec![
            ("spectrum.csv".to_string(), csv.clone()),
            ("spectrum.json".to_string(), pretty(&json)),
        ],
    };
    if let Err(code) = write_all(&run.out, &files) {
        return code;
    }
    print!("{}", spectrum_text(&result));
    if result.all_converged() {
        EXIT_OK
    } else {
        eprintln!("error: quadrature did not converge at some grid points (rows tagged quadrature_unconverged)");
        EXIT_NONCONVERGENCE
    }
}

fn spectrum_text(r: &crate::spectrum::SpectrumResult) -> String {
    let mut out = format!(
        "# a = {}, T = {}, omega_hat = {}, z = {}, theta01 = {}\n",
        r.request.a, r.temperature, r.request.omega_hat, r.request.z, r.request.theta01
    );
    out.push_str(&format!(
        "{:>12} {:>22} {:>22} {:>22} {:>22}\n",
        "omega", "power", "planck", "power_deformed", "method"
    ));
    for row in &r.rows {
        out.push_str(&format!(
            "{:>12} {:>22.15e} {:>22.15e} {:>22.15e} {:>22}\n",
            row.omega,
            row.power,
            row.planck,
            row.power_deformed,
            row.method_tag()
        ));
    }
    out
}

fn cmd_verify(run: &Run) -> i32 {
    // Reject a malformed twist block before spending time on the suites.
    if let Err(e) = run.config.twist.resolve() {
        eprintln!("error: {e}");
        return config_exit(&e);
    }
    let report = verify::run(&run.config);
    let text = report.to_text();
    let mut files = vec![("verify.json".to_string(), pretty(&report.to_json()))];
    if run.format == Some(Format::Text) {
        files.push(("verify.txt".to_string(), text.clone()));
    }
    if let Err(code) = write_all(&run.out, &files) {
        return code;
    }
    print!("{text}");
    if report.passed {
        EXIT_OK
    } else {
        for f in &report.failures {
            eprintln!("failed invariant: {f}");
        }
        EXIT_FAILED
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let run = match load(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return config_exit(&e);
        }
    };
    match cli.command {
        Command::Commutator => cmd_commutator(&run),
        Command::Spectrum => cmd_spectrum(&run),
        Command::Verify => cmd_verify(&run),
    }
}

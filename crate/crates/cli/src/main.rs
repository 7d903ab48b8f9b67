//! `opx`: evaluation, verification and table generation for kernel polynomials
//! and their spectral transformations.

mod commands;
mod report;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use opx_core::verify::Suite;
use opx_core::{FamilySpec, Support};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::report::{Num, Report};

#[derive(Parser, Debug)]
#[command(name = "opx", version, about = "Kernel polynomials, spectral transformations and their numerical checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value = "chebyshev1")]
    family: FamilyName,

    /// Laguerre or Jacobi parameter gamma.
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    gamma: f64,

    /// Jacobi parameter delta.
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,

    /// Shift point, real or complex (`2`, `-1.5`, `0.5+1i`). Repeatable.
    #[arg(long = "shift", global = true, value_parser = parse_point, allow_hyphen_values = true)]
    shifts: Vec<Complex64>,

    /// Geronimus mass L~(1); canonical value when omitted.
    #[arg(long, global = true, allow_hyphen_values = true)]
    mass0: Option<f64>,

    /// Uvarov point mass.
    #[arg(long, global = true, default_value_t = 0.5, allow_hyphen_values = true)]
    r0: f64,

    #[arg(long = "n-max", global = true, default_value_t = 8)]
    n_max: usize,

    /// Override for asserted tolerances.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Starting depth for continued fractions.
    #[arg(long, global = true, default_value_t = 60)]
    depth: usize,

    #[arg(long, global = true, env = "OPX_SEED", default_value_t = 42)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value = "json")]
    output: Output,

    /// Suite for `verify`.
    #[arg(long, global = true, default_value = "all")]
    suite: String,

    /// CSV file with header `n,c_n,lambda_n` for `--family custom`.
    #[arg(long, global = true)]
    coeffs: Option<PathBuf>,

    /// Support of a custom family as `a,b`; `inf` allowed for either end.
    #[arg(long, global = true, allow_hyphen_values = true)]
    support: Option<String>,

    /// Evaluation points (comma separated or repeated).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    points: Vec<f64>,

    /// Chain sequence terms for `chain` (comma separated or repeated).
    #[arg(long = "l", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    l: Vec<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// P_0..P_n at the given points.
    Eval,
    /// Kernel polynomials at the given shifts.
    Kernel,
    /// Recovery coefficients and their identity checks.
    Recover,
    /// Kernel ratio limits at a shift.
    Ratio,
    /// Run verification suites.
    Verify,
    /// Minimal parameters of a chain sequence.
    Chain,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Kernel => "kernel",
            Command::Recover => "recover",
            Command::Ratio => "ratio",
            Command::Verify => "verify",
            Command::Chain => "chain",
        }
    }

    fn tabular(self) -> bool {
        matches!(self, Command::Eval | Command::Ratio | Command::Chain)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyName {
    Chebyshev1,
    Laguerre,
    Jacobi,
    Custom,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Output {
    Json,
    Csv,
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    Complex64::from_str(s.trim()).map_err(|e| format!("not a real or complex number: {s:?} ({e})"))
}

fn parse_support(s: &str) -> Result<Support, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(format!("support must be `a,b`, got {s:?}"));
    };
    let end = |t: &str| t.parse::<f64>().map_err(|_| format!("bad support endpoint {t:?}"));
    let (a, b) = (end(a)?, end(b)?);
    match (a.is_finite(), b.is_finite()) {
        (true, true) if a < b => Ok(Support::Interval(a, b)),
        (true, false) if b > 0.0 => Ok(Support::HalfLine(a)),
        (false, false) if a < 0.0 && b > 0.0 => Ok(Support::RealLine),
        _ => Err(format!("unsupported support {s:?}")),
    }
}

#[derive(serde::Deserialize)]
struct CoeffRow {
    n: usize,
    c_n: f64,
    lambda_n: f64,
}

fn read_coeffs(path: &PathBuf) -> Result<Vec<(f64, f64)>, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file).deserialize().enumerate() {
        let row: CoeffRow = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        if row.n != i + 1 {
            return Err(format!("{}: row {} has n = {}, expected {}", path.display(), i + 1, row.n, i + 1));
        }
        rows.push((row.c_n, row.lambda_n));
    }
    Ok(rows)
}

/// Validated inputs shared by every command.
pub struct RunConfig {
    pub family: FamilySpec,
    pub shifts: Vec<Complex64>,
    pub mass0: Option<f64>,
    pub r0: f64,
    pub n_max: usize,
    pub tol: Option<f64>,
    pub depth: usize,
    pub seed: u64,
    pub suite: Suite,
    pub points: Vec<f64>,
    pub l: Vec<f64>,
}

impl RunConfig {
    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    family: FamilyName,
    family_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    support: Option<&'a str>,
    shifts: Vec<String>,
    mass0: Option<Num>,
    r0: Num,
    n_max: usize,
    tol: Option<Num>,
    depth: usize,
    seed: u64,
    output: Output,
    #[serde(skip_serializing_if = "Option::is_none")]
    suite: Option<&'a str>,
    points: Vec<Num>,
    l: Vec<Num>,
}

fn validate(cli: &Cli) -> Result<RunConfig, String> {
    let family = match cli.family {
        FamilyName::Chebyshev1 => FamilySpec::chebyshev1(),
        FamilyName::Laguerre => FamilySpec::laguerre(cli.gamma).map_err(|e| e.to_string())?,
        FamilyName::Jacobi => FamilySpec::jacobi(cli.gamma, cli.delta).map_err(|e| e.to_string())?,
        FamilyName::Custom => {
            let path = cli.coeffs.as_ref().ok_or("--family custom needs --coeffs FILE")?;
            let support = parse_support(cli.support.as_deref().ok_or("--family custom needs --support a,b")?)?;
            FamilySpec::from_table(read_coeffs(path)?, support).map_err(|e| e.to_string())?
        }
    };
    if cli.family != FamilyName::Custom && (cli.coeffs.is_some() || cli.support.is_some()) {
        return Err("--coeffs and --support apply only to --family custom".into());
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(format!("--tol must be positive, got {t}"));
        }
    }
    if cli.n_max == 0 && cli.command != Command::Eval {
        return Err("--n-max must be at least 1".into());
    }
    if !(cli.r0 != 0.0 && cli.r0.is_finite()) {
        return Err(format!("--r0 must be finite and nonzero, got {}", cli.r0));
    }
    if cli.depth == 0 {
        return Err("--depth must be at least 1".into());
    }
    if cli.output == Output::Csv && !cli.command.tabular() {
        return Err(format!("--output csv is available for eval, ratio and chain, not {}", cli.command.name()));
    }
    let suite = Suite::from_str(&cli.suite).map_err(|e| e.to_string())?;
    if cli.points.iter().chain(&cli.l).any(|v| !v.is_finite()) {
        return Err("--points and --l take finite numbers".into());
    }
    Ok(RunConfig {
        family,
        shifts: cli.shifts.clone(),
        mass0: cli.mass0,
        r0: cli.r0,
        n_max: cli.n_max,
        tol: cli.tol,
        depth: cli.depth,
        seed: cli.seed,
        suite,
        points: cli.points.clone(),
        l: cli.l.clone(),
    })
}

fn echo(cli: &Cli, cfg: &RunConfig) -> Box<RawValue> {
    let parametrized = matches!(cli.family, FamilyName::Laguerre | FamilyName::Jacobi);
    let e = ConfigEcho {
        family: cli.family,
        family_name: cfg.family.name(),
        gamma: parametrized.then_some(Num(cli.gamma)),
        delta: (cli.family == FamilyName::Jacobi).then_some(Num(cli.delta)),
        coeffs: cli.coeffs.as_ref().map(|p| p.display().to_string()),
        support: cli.support.as_deref(),
        shifts: cfg.shifts.iter().map(|z| z.to_string()).collect(),
        mass0: cfg.mass0.map(Num),
        r0: Num(cfg.r0),
        n_max: cfg.n_max,
        tol: cfg.tol.map(Num),
        depth: cfg.depth,
        seed: cfg.seed,
        output: cli.output,
        suite: (cli.command == Command::Verify).then_some(cli.suite.as_str()),
        points: cfg.points.iter().copied().map(Num).collect(),
        l: cfg.l.iter().copied().map(Num).collect(),
    };
    serde_json::value::to_raw_value(&e).expect("config echo serializes")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match validate(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("opx: {msg}");
            return ExitCode::from(2);
        }
    };

    let start = Instant::now();
    let out = match cli.command {
        Command::Eval => commands::eval(&cfg),
        Command::Kernel => commands::kernel(&cfg),
        Command::Recover => commands::recover(&cfg),
        Command::Ratio => commands::ratio(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Chain => commands::chain(&cfg),
    };
    let (cases, table) = match out {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("opx: {msg}");
            return ExitCode::from(2);
        }
    };
    let mut report = Report::new(cli.command.name(), echo(&cli, &cfg), cases, table);
    report.runtime_ms = start.elapsed().as_millis() as u64;

    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let written = match (cli.output, &report.table) {
        (Output::Csv, Some(t)) => t.write_csv(&mut lock).map_err(|e| e.to_string()),
        _ => serde_json::to_writer_pretty(&mut lock, &report)
            .map_err(|e| e.to_string())
            .and_then(|_| writeln!(lock).map_err(|e| e.to_string())),
    };
    if let Err(e) = written {
        eprintln!("opx: cannot write output: {e}");
        return ExitCode::from(2);
    }

    for c in report.failures() {
        eprintln!("opx: FAILED {} (residual {}, {})", c.name, c.max_residual.text(), c.note.as_deref().unwrap_or("-"));
    }
    if report.overall {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

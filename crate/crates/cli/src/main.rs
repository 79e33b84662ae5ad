use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ness_core::harness::{
    fh_validate, run_identities, run_resolved, ExperimentConfig, FhValidationSpec, GridSpec, IdentityGrid, RowFlag,
};
use ness_core::Error;

/// Correlations across a biased scattering impurity in a free-fermion chain.
#[derive(Parser)]
#[command(name = "ness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one geometry of a config file and print JSON.
    Measure {
        config: PathBuf,
        /// Scan value to evaluate; defaults to the first grid point.
        #[arg(long)]
        at: Option<i64>,
    },
    /// Run the scan described by a config file and write CSV.
    Scan {
        config: PathBuf,
        /// Overrides the config's output path; `-` writes to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check the replica-sum and kernel identities.
    Identities {
        #[arg(long)]
        json: bool,
    },
    /// Compare exact Toeplitz determinants with their asymptotics.
    FhValidate {
        /// CSV destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Matrix sizes, at least three.
        #[arg(long, value_delimiter = ',', default_values_t = vec![256usize, 512, 1024])]
        sizes: Vec<usize>,
    },
}

/// Exit status: 1 for configuration problems, 2 for numeric failures.
enum Failure {
    Config(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Self::Config(e.to_string()),
            other => Self::Numeric(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) if p.as_os_str() == "-" => Ok(Box::new(io::stdout().lock())),
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn measure(config: &Path, at: Option<i64>) -> Result<(), Failure> {
    let mut cfg = load(config)?;
    let value = match at {
        Some(v) => v,
        None => *cfg.grid.points()?.first().expect("grid is nonempty"),
    };
    cfg.grid = GridSpec::Values { values: vec![value] };
    cfg.fit = Default::default();
    let resolved = cfg.resolve()?;
    let report = run_resolved(&resolved);
    let results: Vec<_> = report
        .rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "measure": r.measure.name(),
                "n": r.n,
                "numeric": r.numeric,
                "lin_term": r.lin_term,
                "log_term": r.log_term,
                "flag": r.flag,
                "error": r.error,
            })
        })
        .collect();
    let out = serde_json::json!({
        "scan_value": value,
        "geometry": resolved.geometries[0],
        "model": resolved.model,
        "bias": {
            "hopping": resolved.bias.hopping,
            "mu_left": resolved.bias.mu_left,
            "mu_right": resolved.bias.mu_right,
            "kf_left": resolved.bias.kf_left(),
            "kf_right": resolved.bias.kf_right(),
        },
        "mode": resolved.mode,
        "results": results,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("JSON values serialize"));
    if report.failed_rows() > 0 {
        return Err(Failure::Numeric(format!("{} measure(s) failed", report.failed_rows())));
    }
    Ok(())
}

fn scan(config: &Path, output: Option<PathBuf>, threads: Option<usize>) -> Result<(), Failure> {
    let mut cfg = load(config)?;
    if threads.is_some() {
        cfg.threads = threads;
    }
    let resolved = cfg.resolve()?;
    let dest = output.or_else(|| cfg.output.clone());
    let mut out = sink(dest.as_deref())?;
    let report = run_resolved(&resolved);
    report.write_csv(&mut out)?;
    out.flush().map_err(|e| Failure::Config(format!("writing output: {e}")))?;
    for s in &report.fits {
        match s.fit {
            Some(f) => eprintln!(
                "{} n={}: constant {:.6}, rms {:.3e} over {} points",
                s.measure.name(),
                s.n,
                f.constant,
                f.rms,
                f.points
            ),
            None => eprintln!("{} n={}: no usable points in the fit window", s.measure.name(), s.n),
        }
    }
    for r in report.rows.iter().filter(|r| r.flag == RowFlag::Failed) {
        eprintln!("{} at {}: {}", r.measure.name(), r.scan_value, r.error.as_deref().unwrap_or("failed"));
    }
    match report.failed_rows() {
        0 => Ok(()),
        k => Err(Failure::Numeric(format!("{k} row(s) failed"))),
    }
}

fn identities(json: bool) -> Result<(), Failure> {
    let report = run_identities(&IdentityGrid::default());
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("JSON values serialize"));
    } else {
        print!("{}", report.to_text());
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Numeric("some identities exceed their tolerance".into()))
    }
}

fn validate(output: Option<PathBuf>, sizes: Vec<usize>) -> Result<(), Failure> {
    let spec = FhValidationSpec { sizes, ..Default::default() };
    let report = fh_validate(&spec)?;
    let mut out = sink(output.as_deref())?;
    report.write_csv(&mut out)?;
    out.flush().map_err(|e| Failure::Config(format!("writing output: {e}")))?;
    for s in &report.summaries {
        let ratios: Vec<String> = s.shrink_ratios.iter().map(|r| format!("{r:.3}")).collect();
        eprintln!(
            "{:<12} {:<10} shrink [{}]  ln M slope {:.5} vs {:.5} ({:.2}%)",
            format!("{:?}", s.case).to_lowercase(),
            s.family.name(),
            ratios.join(", "),
            s.ln_size_slope,
            s.ln_size_target,
            100.0 * s.relative_error
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            // Usage errors are configuration errors.
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Measure { config, at } => measure(&config, at),
        Command::Scan { config, output, threads } => scan(&config, output, threads),
        Command::Identities { json } => identities(json),
        Command::FhValidate { output, sizes } => validate(output, sizes),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

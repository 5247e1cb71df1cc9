use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use schurlab::suite::{parse_exponent, render_report, ConfigOverrides, SUITES};
use schurlab::{run_suite, Error, Format, SuiteConfig};
use serde_json::{Map, Value};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Seeded experiment runner for Schur multipliers and Riesz-Schur transforms.
///
/// Values from `--config` are overridden by flags. The report goes to `--out`
/// (or stdout); a one-line summary and the wall time go to stderr.
#[derive(Debug, Parser)]
#[command(name = "schurlab", version, about)]
struct Args {
    /// Suite to run (see --list-suites).
    #[arg(long)]
    suite: Option<String>,

    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Report destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// csv or json.
    #[arg(long)]
    format: Option<Format>,

    /// Global constant bounding the ratios that count as violations.
    #[arg(long = "k-global", value_name = "K")]
    k_global: Option<f64>,

    #[arg(long)]
    trials: Option<usize>,

    /// Matrix sizes; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,

    /// Vector dimensions; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,

    /// Exponents such as 1.5, 4/3 or inf; repeat or comma-separate.
    #[arg(long, value_delimiter = ',', value_parser = exponent)]
    p: Vec<f64>,

    /// Monte Carlo sample count.
    #[arg(long, value_name = "N")]
    samples: Option<usize>,

    /// Suite parameter, e.g. construction=gh or beta=0.3. Values are read as
    /// JSON when they parse, otherwise as strings.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = param)]
    params: Vec<(String, Value)>,

    /// Print the suite names and exit.
    #[arg(long)]
    list_suites: bool,
}

fn exponent(s: &str) -> Result<f64, String> {
    parse_exponent(s).map_err(|e| e.to_string())
}

fn param(s: &str) -> Result<(String, Value), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), v))
}

fn some_vec<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl Args {
    fn overrides(self) -> ConfigOverrides {
        let params = (!self.params.is_empty()).then(|| self.params.into_iter().collect::<Map<_, _>>());
        ConfigOverrides {
            suite: self.suite,
            n: some_vec(self.n),
            d: some_vec(self.d),
            p: some_vec(self.p),
            trials: self.trials,
            seed: self.seed,
            k_global: self.k_global,
            samples: self.samples,
            out: self.out,
            format: self.format,
            params,
        }
    }
}

fn load_config(args: Args) -> Result<SuiteConfig, Error> {
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            ConfigOverrides::from_json(&text)?
        }
        None => ConfigOverrides::default(),
    };
    SuiteConfig::resolve(base.merge(args.overrides()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_suites {
        for s in SUITES {
            println!("{s}");
        }
        return ExitCode::SUCCESS;
    }

    let cfg = match load_config(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let start = Instant::now();
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: suite {} failed: {e}", cfg.suite);
            return ExitCode::from(EXIT_VIOLATION);
        }
    };
    let elapsed = start.elapsed();

    let text = match render_report(&report, cfg.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot render report: {e}");
            return ExitCode::from(EXIT_IO);
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| format!("cannot write stdout: {e}"))
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_IO);
    }

    eprintln!(
        "{}: {} rows, {} violations, {:.3} s",
        report.suite,
        report.summary.rows,
        report.summary.violations,
        elapsed.as_secs_f64()
    );
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VIOLATION)
    }
}

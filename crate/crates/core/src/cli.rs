//! The `highway` command line.
//!
//! Exit codes: 0 on success, 2 on usage or input errors, 1 on runtime
//! failures. Data goes to files or stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{
    fit_scaling, fit_to_json, parse_rows_csv, rows_to_csv, rows_to_json, run_trials,
    ExperimentConfig, RunMetadata, CHAIN_LIMIT,
};
use crate::frames::estimate_frame_probability;
use crate::generators::{
    equally_spaced, exponential_chain, exponential_chain_exact, exponential_gaps, uniform_points,
    GeneratorKind, Seed, DEFAULT_SEED,
};
use crate::interference::{interference_fast, interference_naive, InterferenceProfile};
use crate::io::{format_points, profile_to_csv, profile_to_json, read_points, write_file};
use crate::model::from_gaps;

#[derive(Debug, Parser)]
#[command(
    name = "highway",
    version,
    about = "Interference of random sensors on a line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Expgaps,
    Chain,
    Equal,
}

impl From<Kind> for GeneratorKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Uniform => GeneratorKind::Uniform,
            Kind::Expgaps => GeneratorKind::Expgaps,
            Kind::Chain => GeneratorKind::Chain,
            Kind::Equal => GeneratorKind::Equal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algo {
    Fast,
    Naive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a points file.
    Gen {
        #[arg(long, value_enum, default_value = "uniform")]
        kind: Kind,
        /// Number of points; accepts powers such as 2^16.
        #[arg(long, value_parser = parse_count)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Gap ratio for the chain.
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interference profile of a points file.
    Interfere {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "fast")]
        algo: Algo,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo aggregates of the maximum interference over an n grid.
    Simulate {
        /// Comma-separated sizes, e.g. 2^10,2^12,2^14.
        #[arg(long, value_parser = parse_grid)]
        n_grid: Grid,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "uniform")]
        generator: Kind,
        /// Per-size trial budget, `n=trials`; repeatable.
        #[arg(long = "trial-cap", value_parser = parse_cap)]
        trial_caps: Vec<(usize, usize)>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit mean Z_S against sqrt(ln n) from a simulate CSV.
    Scaling {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo frequency of k-frames against the 2^{-(k+2)^2} bound.
    Frames {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1_000_000, value_parser = parse_count_u64)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check that the halving chain reaches Z_S = n - 2.
    Worstcase {
        #[arg(long, value_parser = parse_count)]
        n: usize,
    },
}

#[derive(Debug, Clone)]
struct Grid(Vec<usize>);

/// Parses `123`, `2^16` or `10^4`.
pub fn parse_power(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    let value = match s.split_once('^') {
        Some((base, exp)) => {
            let base: u64 = base
                .trim()
                .parse()
                .map_err(|_| format!("bad base in `{s}`"))?;
            let exp: u32 = exp
                .trim()
                .parse()
                .map_err(|_| format!("bad exponent in `{s}`"))?;
            base.checked_pow(exp)
                .ok_or_else(|| format!("`{s}` overflows"))?
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a count"))?,
    };
    Ok(value)
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    parse_power(s).and_then(|v| usize::try_from(v).map_err(|_| format!("`{s}` is too large")))
}

fn parse_count_u64(s: &str) -> std::result::Result<u64, String> {
    parse_power(s)
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    s.split(',')
        .map(parse_count)
        .collect::<std::result::Result<_, _>>()
        .map(Grid)
}

fn parse_cap(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, t) = s
        .split_once('=')
        .ok_or_else(|| format!("expected n=trials, got `{s}`"))?;
    Ok((parse_count(n)?, parse_count(t)?))
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn with_threads<R: Send>(threads: Option<usize>, job: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(job()),
        Some(0) => Err(Error::InvalidParameter(
            "--threads must be at least 1".into(),
        )),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gen {
            kind,
            n,
            seed,
            ratio,
            out,
        } => {
            let points = match kind {
                Kind::Uniform => uniform_points(n, Seed::new(seed)),
                Kind::Expgaps => from_gaps(&exponential_gaps(n, Seed::new(seed)))?,
                Kind::Chain => exponential_chain(n, ratio)?,
                Kind::Equal => equally_spaced(n)?,
            };
            let mut text = match kind {
                Kind::Uniform | Kind::Expgaps => {
                    format!("# kind={} n={n} seed={seed}\n", GeneratorKind::from(kind))
                }
                Kind::Chain => format!("# kind=chain n={n} ratio={ratio}\n"),
                Kind::Equal => format!("# kind=equal n={n}\n"),
            };
            text.push_str(&format_points(&points));
            emit(out.as_deref(), &text, stdout)?;
            Ok(0)
        }
        Command::Interfere {
            input,
            algo,
            format,
            out,
        } => {
            let points = read_points(&input)?;
            let profile: InterferenceProfile = match algo {
                Algo::Fast => interference_fast(&points)?,
                Algo::Naive => interference_naive(&points)?,
            };
            let text = match format {
                OutFormat::Csv => profile_to_csv(&points, &profile)?,
                OutFormat::Json => profile_to_json(&points, &profile)?,
            };
            emit(out.as_deref(), &text, stdout)?;
            Ok(0)
        }
        Command::Simulate {
            n_grid,
            trials,
            seed,
            generator,
            trial_caps,
            format,
            out,
            threads,
        } => {
            let mut config = ExperimentConfig::new(n_grid.0, trials, seed, generator.into());
            for (n, t) in trial_caps {
                config = config.with_override(n, t);
            }
            config.validate()?;
            let rows = with_threads(threads, || run_trials(&config))??;
            let meta = RunMetadata::from_config(&config);
            let text = match format {
                OutFormat::Csv => rows_to_csv(&rows, &meta)?,
                OutFormat::Json => rows_to_json(&rows, &meta)?,
            };
            emit(out.as_deref(), &text, stdout)?;
            Ok(0)
        }
        Command::Scaling { input, out } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Error::io(&input, e))?;
            let fit = fit_scaling(&parse_rows_csv(&text)?)?;
            emit(out.as_deref(), &fit_to_json(&fit)?, stdout)?;
            Ok(0)
        }
        Command::Frames {
            k,
            trials,
            seed,
            threads,
        } => {
            let estimate = with_threads(threads, || estimate_frame_probability(k, trials, seed))??;
            emit(None, &(serde_json::to_string(&estimate)? + "\n"), stdout)?;
            Ok(0)
        }
        Command::Worstcase { n } => worstcase(n, stdout),
    }
}

fn worstcase(n: usize, stdout: &mut dyn Write) -> Result<i32> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "worstcase needs n >= 3, got {n}"
        )));
    }
    if n > CHAIN_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "worstcase supports n <= {CHAIN_LIMIT}, got {n}"
        )));
    }
    let (profile, representation) = match exponential_chain(n, 0.5) {
        Ok(points) => (interference_fast(&points)?, "f64"),
        Err(_) => (
            interference_fast(&exponential_chain_exact(n, 2)?)?,
            "exact-integer",
        ),
    };
    let expected = n - 2;
    let pass = profile.max() == expected && profile.counts()[0] == expected;
    let line = format!(
        "n={n} z_max={} leftmost={} expected={expected} coordinates={representation} {}\n",
        profile.max(),
        profile.counts()[0],
        if pass { "PASS" } else { "FAIL" }
    );
    stdout
        .write_all(line.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))?;
    Ok(if pass { 0 } else { 1 })
}

//! `haar-modular` command line.
//!
//! Exit codes: 0 success, 1 internal or verification failure, 2 usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use haar_modular::counting::{corner_fiber_bounds, exact_corner_dist, order_gl, DistMethod};
use haar_modular::io;
use haar_modular::rings::{factorize, Ring, RingDescriptor};
use haar_modular::rng::RngStream;
use haar_modular::sampling::sample_truncated_parallel;
use haar_modular::stats::{
    chi_squared_test, convergence_sweep, tv_estimate, EmpiricalDist, Reference, SweepMode,
};
use haar_modular::verify::{self, Suite};
use haar_modular::Error;

const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(
    name = "haar-modular",
    version,
    about = "Haar sampling and corner laws on GL_N over finite rings"
)]
struct Cli {
    /// Seed for every random stream (default 0).
    #[arg(long, global = true, env = "HAAR_MODULAR_SEED")]
    seed: Option<u64>,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// More log output on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prime factorization of m.
    Factor { m: u64 },
    /// Order of GL_N(R).
    Count {
        #[arg(long)]
        ring: RingDescriptor,
        #[arg(long)]
        n: usize,
    },
    /// Corners of independent Haar draws, as JSON lines.
    Sample {
        #[arg(long)]
        ring: RingDescriptor,
        #[arg(long)]
        n: usize,
        /// Corner size; defaults to N.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        draws: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Exact law of the S x S corner.
    Dist {
        #[arg(long)]
        ring: RingDescriptor,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Enumerate)]
        method: MethodArg,
    },
    /// Bounds on corner fiber counts over Z_{p^r}.
    Bounds {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
    },
    /// TV distance of the corner law to uniform over a list of N.
    Sweep {
        #[arg(long)]
        ring: RingDescriptor,
        #[arg(long)]
        s: usize,
        /// `2..10`, `4,8,16,24`, or a mix.
        #[arg(long = "n")]
        n_list: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 100_000)]
        draws: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Run the built-in invariant checks.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// TV and chi-squared of a sample batch against uniform or an exact law.
    Analyze {
        #[arg(long)]
        batch: PathBuf,
        /// Exact law written by `dist`; uniform on M_S when absent.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Enumerate,
    Formula,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Rings,
    Matrices,
    Sampling,
    Counting,
    Stats,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Rings => Suite::Rings,
            SuiteArg::Matrices => Suite::Matrices,
            SuiteArg::Sampling => Suite::Sampling,
            SuiteArg::Counting => Suite::Counting,
            SuiteArg::Stats => Suite::Stats,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn ring(d: &RingDescriptor) -> Result<Arc<Ring>, Failure> {
    Ok(Arc::new(Ring::from_descriptor(d)?))
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, mut text: String) -> Result<(), Failure> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Internal(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match cli.command {
        Command::Factor { m } => {
            let f = factorize(m)?;
            emit(
                &cli.out,
                serde_json::to_string(&f).expect("factorization serializes"),
            )
        }
        Command::Count { ring: d, n } => {
            let r = ring(&d)?;
            emit(&cli.out, io::order_to_json(&r, n, &order_gl(&r, n)?))
        }
        Command::Sample {
            ring: d,
            n,
            s,
            draws,
            threads,
        } => {
            if draws == 0 {
                return Err(Failure::Usage("--draws must be at least 1".into()));
            }
            let r = ring(&d)?;
            let s = s.unwrap_or(n);
            let batch = sample_truncated_parallel(&r, n, s, draws, &RngStream::new(seed), threads)?;
            emit(&cli.out, io::batch_to_jsonl(&batch))
        }
        Command::Dist {
            ring: d,
            n,
            s,
            method,
        } => {
            let r = ring(&d)?;
            let method = match method {
                MethodArg::Enumerate => DistMethod::Enumerate,
                MethodArg::Formula => DistMethod::Formula,
            };
            emit(
                &cli.out,
                io::exact_dist_to_json(&exact_corner_dist(&r, n, s, method)?),
            )
        }
        Command::Bounds { p, r, n, s } => emit(
            &cli.out,
            io::bounds_to_json(&corner_fiber_bounds(p, r, n, s)?),
        ),
        Command::Sweep {
            ring: d,
            s,
            n_list,
            mode,
            draws,
            threads,
            format,
        } => {
            let r = ring(&d)?;
            let ns = io::parse_n_list(&n_list)?;
            let mode = match mode {
                ModeArg::Exact => SweepMode::Exact,
                ModeArg::Mc => SweepMode::MonteCarlo,
            };
            let sweep = convergence_sweep(&r, s, &ns, mode, draws, seed, threads)?;
            let text = match format {
                FormatArg::Csv => io::sweep_to_csv(&sweep),
                FormatArg::Json => io::sweep_to_json(&sweep),
            };
            emit(&cli.out, text)
        }
        Command::Verify { suite } => {
            let lines = verify::run(suite.into());
            let failed = lines.iter().filter(|l| !l.passed).count();
            let mut text: String = lines.iter().map(|l| format!("{l}\n")).collect();
            text.push_str(&format!(
                "{} passed, {failed} failed\n",
                lines.len() - failed
            ));
            emit(&cli.out, text)?;
            if failed > 0 {
                return Err(Failure::Internal(format!("{failed} checks failed")));
            }
            Ok(())
        }
        Command::Analyze { batch, reference } => {
            let batch = io::parse_batch_jsonl(&read(&batch)?)?;
            let emp = EmpiricalDist::from_batch(&batch)?;
            let exact = match &reference {
                Some(path) => Some(io::parse_exact_dist_json(&read(path)?)?),
                None => None,
            };
            let reference = match &exact {
                Some(d) => Reference::Exact(d),
                None => Reference::Uniform,
            };
            let tv = tv_estimate(&emp, reference)?;
            let chi = chi_squared_test(&emp, reference)?;
            emit(&cli.out, io::chi_squared_to_json(&chi, tv, emp.total))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

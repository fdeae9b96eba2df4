//! `mixorder`: build, compare and analyze finite Markov chains from JSON specs.

mod commands;
mod format;
mod spec;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mixorder::duality::DEFAULT_SEED;
use mixorder::orders::{DEFAULT_DOWNSET_CAP, DEFAULT_TOL};
use mixorder::Poset;

use commands::TmixMethod;
use format::{DEFAULT_PRECISION, MAX_PRECISION};
use spec::{Chain, ChainSpec};

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    /// A property suite reported a failure.
    Verdict(String),
}

impl From<mixorder::Error> for Failure {
    fn from(e: mixorder::Error) -> Self {
        match e {
            mixorder::Error::Numerical(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "mixorder", version, about = "Comparison orders, mixing traces and fastest-mixing chains")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Significant digits in numeric output.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION as u8,
          value_parser = clap::value_parser!(u8).range(1..=MAX_PRECISION as i64))]
    precision: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PosetChoice {
    /// The natural order of the spec's state space.
    Auto,
    /// The total order `0 < 1 < ... < N-1`.
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    /// Minimum mixing time over chains without interior holding.
    Lw,
    /// Minimum mixing time under an edge budget `sum pi_k p_k = c`.
    Budgeted,
}

#[derive(Subcommand)]
enum Command {
    /// Print the kernel, stationary pmf and structural flags as a raw spec.
    Build {
        /// Spec file; stdin when omitted or "-".
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_DOWNSET_CAP)]
        cap_downsets: usize,
    },
    /// Distances to stationarity over time as CSV.
    Trace {
        spec: Option<PathBuf>,
        /// Start state index or "pi".
        #[arg(long, default_value = "0")]
        start: String,
        #[arg(long, default_value_t = 50)]
        horizon: usize,
        /// Comma-separated subset of tv,sep,l2,linf,hellinger,kl_fwd,kl_rev.
        #[arg(long, default_value = "tv,sep,l2,linf,hellinger,kl_fwd,kl_rev")]
        metrics: String,
    },
    /// Decide the comparison order between two chains sharing pi.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        poset: PosetChoice,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_DOWNSET_CAP)]
        cap_downsets: usize,
    },
    /// Mixing time from state 0 to a pi-distributed target.
    Tmix {
        spec: Option<PathBuf>,
        /// Defaults to closed for birth-and-death chains, first_step otherwise.
        #[arg(long, value_enum)]
        method: Option<TmixMethod>,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Strong stationary dual of a birth-and-death chain.
    Dual {
        spec: Option<PathBuf>,
        /// Print the absorption survival curve up to this time instead.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Fastest-mixing birth-and-death chain for a target pi.
    Optimize {
        /// Spec whose stationary pmf is the target; ignored when --pi is set.
        spec: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "lw")]
        objective: Objective,
        /// Target pmf (or positive weights), comma-separated.
        #[arg(long, value_delimiter = ',')]
        pi: Option<Vec<f64>>,
        /// Edge budget for the budgeted objective.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_DOWNSET_CAP)]
        cap_downsets: usize,
    },
    /// Eigenvalues, SLEM and relaxation time of a reversible chain.
    Spectrum { spec: Option<PathBuf> },
    /// Run named property suites against a chain.
    Verify {
        spec: Option<PathBuf>,
        /// Comma-separated suites; all when omitted.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_DOWNSET_CAP)]
        cap_downsets: usize,
        #[arg(long, default_value_t = 200)]
        horizon: usize,
    },
}

fn read_input(path: Option<&PathBuf>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p).map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))?
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Validation(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn load(path: Option<&PathBuf>) -> Result<Chain, Failure> {
    Ok(ChainSpec::parse(&read_input(path)?)?.build()?)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let precision = usize::from(cli.precision);
    match &cli.command {
        Command::Build { spec, tol, cap_downsets } => commands::build(&load(spec.as_ref())?, *tol, *cap_downsets),
        Command::Trace {
            spec,
            start,
            horizon,
            metrics,
        } => {
            let chain = load(spec.as_ref())?;
            let metrics = commands::parse_metrics(metrics)?;
            let init = commands::parse_start(start, chain.kernel.size(), &chain.pi)?;
            commands::trace_csv(&chain, &init, *horizon, &metrics, precision)
        }
        Command::Compare {
            a,
            b,
            poset,
            tol,
            cap_downsets,
        } => {
            if a.as_os_str() == "-" && b.as_os_str() == "-" {
                return Err(Failure::Validation("only one spec can come from stdin".into()));
            }
            let (ka, kb) = (load(Some(a))?, load(Some(b))?);
            let order = match poset {
                PosetChoice::Auto => ka.poset.clone(),
                PosetChoice::Linear => Poset::linear(ka.kernel.size()),
            };
            commands::compare(&ka, &kb, &order, *tol, *cap_downsets, precision)
        }
        Command::Tmix {
            spec,
            method,
            samples,
            seed,
        } => commands::tmix(&load(spec.as_ref())?, *method, *samples, *seed),
        Command::Dual { spec, horizon } => commands::dual(&load(spec.as_ref())?, *horizon, precision),
        Command::Optimize {
            spec,
            objective,
            pi,
            c,
            tol,
            cap_downsets,
        } => {
            let source = if pi.is_some() { None } else { Some(load(spec.as_ref())?) };
            let target = commands::target_pi(source.as_ref(), pi.as_deref())?.into_weights();
            let spec = match objective {
                Objective::Lw => ChainSpec::LwOptimal { n: None, pi: Some(target) },
                Objective::Budgeted => ChainSpec::Budgeted {
                    pi: target,
                    c: c.ok_or_else(|| Failure::Validation("budgeted objective needs --c".into()))?,
                },
            };
            commands::build(&spec.build()?, *tol, *cap_downsets)
        }
        Command::Spectrum { spec } => commands::spectrum(&load(spec.as_ref())?, precision),
        Command::Verify {
            spec,
            suite,
            tol,
            cap_downsets,
            horizon,
        } => {
            let (report, ok) = commands::verify(&load(spec.as_ref())?, suite, *tol, *cap_downsets, *horizon)?;
            if ok {
                Ok(report)
            } else {
                Err(Failure::Verdict(report))
            }
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = match run(&cli) {
        Ok(text) => (text, 0),
        Err(Failure::Verdict(text)) => (text, 1),
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    if let Err(e) = emit(cli.out.as_ref(), &text) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

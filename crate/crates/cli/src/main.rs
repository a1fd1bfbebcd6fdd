use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use robsub::oracle::OracleBudget;
use robsub::robust_max::Reduction;
use robsub::robust_min::InnerStrategy;
use robsub_cli::audit::run_audit;
use robsub_cli::experiment::{run_synthetic, trend, write_csv, SyntheticParams};
use robsub_cli::instance::{is_infeasibility, Instance, InstanceFile, LoadError};
use robsub_cli::solve::{solve, Method, SolveOptions};

const EXIT_PARSE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_AUDIT: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Parser)]
#[command(
    name = "robsub",
    version,
    about = "Robust submodular optimization solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write a CSV result row.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare solvers against the exhaustive optimum.
    Audit {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Parse and check an instance file.
    Validate { path: PathBuf },
    /// Run a built-in experiment.
    Experiment {
        #[command(subcommand)]
        kind: ExperimentKind,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// mmin, aa, cr, ea or saturate; every applicable method when absent.
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    eps: Option<f64>,
    /// Accepted for symmetry with instance files; solvers are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Inner::Both)]
    inner: Inner,
    #[arg(long, value_enum, default_value_t = Aggregation::Both)]
    reduction: Aggregation,
}

#[derive(Clone, Copy, ValueEnum)]
enum Inner {
    Modmax,
    Avg,
    Both,
    Exhaustive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Aggregation {
    Modmax,
    Avg,
    Both,
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// Random clustered-sqrt functions under a cardinality lower bound.
    Synthetic {
        #[arg(long, default_value_t = 50)]
        n: usize,
        /// Number of functions; comma-separated for several.
        #[arg(long, value_delimiter = ',', default_values_t = [3, 10])]
        l: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        clusters: usize,
        /// Draw a separate weight vector for every function.
        #[arg(long)]
        independent_weights: bool,
        /// Fill the wall_ms column (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            method: self.method,
            eps: self.eps,
            inner: match self.inner {
                Inner::Modmax => InnerStrategy::Modmax,
                Inner::Avg => InnerStrategy::Avg,
                Inner::Both => InnerStrategy::Both,
                Inner::Exhaustive => InnerStrategy::Exhaustive,
            },
            reduction: match self.reduction {
                Aggregation::Modmax => Reduction::Modmax,
                Aggregation::Avg => Reduction::Avg,
                Aggregation::Both => Reduction::Both,
            },
        }
    }
}

fn load(path: &Path) -> Result<Instance, ExitCode> {
    InstanceFile::read(path)
        .and_then(InstanceFile::load)
        .map_err(|e| {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PARSE)
        })
}

fn solver_error(e: robsub::Error) -> ExitCode {
    eprintln!("error: {e}");
    if is_infeasibility(&e) {
        ExitCode::from(EXIT_INFEASIBLE)
    } else {
        ExitCode::from(EXIT_SOLVER)
    }
}

fn output(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_SOLVER)
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Solve { path, solver, out } => {
            let inst = load(&path)?;
            let opts = solver.options();
            let methods = match opts.method {
                Some(m) => vec![m],
                None => vec![Method::defaults(inst.file.problem)[0]],
            };
            let mut w = csv::Writer::from_writer(output(out.as_deref()).map_err(io_error)?);
            for m in methods {
                let outcome = solve(&inst, m, &opts).map_err(solver_error)?;
                eprintln!("{}", outcome.summary());
                w.serialize(outcome.row()).map_err(io_error)?;
            }
            w.flush().map_err(io_error)?;
        }
        Command::Audit { path, solver } => {
            let inst = load(&path)?;
            let report = run_audit(&inst, &solver.options(), &OracleBudget::from_env())
                .map_err(solver_error)?;
            if let Some(why) = &report.skipped {
                println!("audit skipped: {why}");
                return Ok(());
            }
            println!("optimum, {}", report.optimum.unwrap_or(f64::NAN));
            println!("method, empirical_ratio, bound, result");
            for line in &report.lines {
                println!("{line}");
            }
            if !report.passed() {
                return Err(ExitCode::from(EXIT_AUDIT));
            }
        }
        Command::Validate { path } => {
            let file = InstanceFile::read(&path).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_PARSE)
            })?;
            let again = InstanceFile::parse(&file.to_json());
            if !matches!(&again, Ok(f) if *f == file) {
                eprintln!("error: instance does not survive a serialize/parse round trip");
                return Err(ExitCode::from(EXIT_PARSE));
            }
            let inst = file.load().map_err(|e: LoadError| {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_PARSE)
            })?;
            println!(
                "ok: {:?}, n = {}, {} f, {} g",
                inst.file.problem,
                inst.n(),
                inst.fs.len(),
                inst.gs.len()
            );
        }
        Command::Experiment {
            kind:
                ExperimentKind::Synthetic {
                    n,
                    l,
                    k,
                    runs,
                    seed,
                    clusters,
                    independent_weights,
                    timing,
                    out,
                },
        } => {
            let params = SyntheticParams {
                n,
                ls: l,
                k,
                runs,
                seed,
                clusters,
                independent_weights,
                timing,
            };
            params.validate().map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_PARSE)
            })?;
            eprintln!("# {}", params.header());
            let rows = run_synthetic(&params).map_err(solver_error)?;
            write_csv(&rows, output(out.as_deref()).map_err(io_error)?).map_err(io_error)?;
            for (l, mm, aa) in trend(&rows) {
                if mm > aa {
                    eprintln!("warning: l = {l}: median mmin {mm} exceeds median aa {aa}");
                } else {
                    eprintln!("l = {l}: median mmin {mm} <= median aa {aa}");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

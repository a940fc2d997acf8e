use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use besov_tree::boundary_space::{dyadic_energy_with, AlphaSequence};
use besov_tree::experiments::{emit_report, run_suite, ExperimentConfig, Suite};
use besov_tree::extension_ops::{alpha_extend, gagliardo_extend, whitney_extend};
use besov_tree::io::{read_boundary, read_tree, write_boundary, write_tree};
use besov_tree::tree_functions::trace;
use besov_tree::{Result, SpaceParams};

#[derive(Parser)]
#[command(name = "besov-tree", version, about = "Trace and extension experiments on weighted K-ary trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SuiteArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Whitney,
    Alpha,
    Gagliardo,
}

#[derive(Subcommand)]
enum Command {
    #[command(name = "trace-ext-th2")]
    TraceExt(SuiteArgs),
    #[command(name = "borderline-th3")]
    Borderline(SuiteArgs),
    #[command(name = "alpha-th5")]
    Alpha(SuiteArgs),
    #[command(name = "optimal-th4")]
    Optimal(SuiteArgs),
    #[command(name = "exam-strict")]
    ExamStrict(SuiteArgs),
    #[command(name = "log-example")]
    LogExample(SuiteArgs),
    Doubling(SuiteArgs),
    Ahlfors(SuiteArgs),
    #[command(name = "norm-equiv")]
    NormEquiv(SuiteArgs),
    /// Dyadic energy of a boundary function, per level.
    Energy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        p: f64,
        /// Source of eps; log 2 when absent.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Extend a boundary function into the tree.
    Extend {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Alpha mode: alpha(n) = base^n.
        #[arg(long, default_value_t = 2)]
        alpha_base: usize,
        /// Gagliardo mode: where to write the layer schedule.
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Deepest-level values of a tree function.
    Trace {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn suite_of(cmd: &Command) -> Option<(Suite, &SuiteArgs)> {
    Some(match cmd {
        Command::TraceExt(a) => (Suite::TraceExt, a),
        Command::Borderline(a) => (Suite::Borderline, a),
        Command::Alpha(a) => (Suite::Alpha, a),
        Command::Optimal(a) => (Suite::Optimal, a),
        Command::ExamStrict(a) => (Suite::ExamStrict, a),
        Command::LogExample(a) => (Suite::LogExample, a),
        Command::Doubling(a) => (Suite::Doubling, a),
        Command::Ahlfors(a) => (Suite::Ahlfors, a),
        Command::NormEquiv(a) => (Suite::NormEquiv, a),
        _ => return None,
    })
}

/// Parameters for a boundary file: from the config when given, otherwise
/// `eps = log 2`, `beta = log K + eps`, `p = 1`, `lambda = 0`.
fn file_params(config: Option<&Path>, k: usize, depth: usize) -> Result<SpaceParams> {
    match config {
        Some(path) => SpaceParams::load(path)?.with_depth(depth),
        None => {
            let eps = std::f64::consts::LN_2;
            SpaceParams::new(k, eps, (k as f64).ln() + eps, 0.0, 1.0, depth)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Some((suite, args)) = suite_of(&cli.command) {
        let mut cfg = ExperimentConfig::load(suite, &args.config)?;
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        if let Some(depth) = args.depth {
            cfg.params = cfg.params.with_depth(depth)?;
        }
        cfg.out = args.out.clone();
        let report = run_suite(&cfg)?;
        match &cfg.out {
            Some(path) => emit_report(&report, path)?,
            None => print!("{}", report.to_csv()),
        }
        for c in report.checks.iter().filter(|c| !c.pass) {
            eprintln!("{}: check {} failed ({} vs {})", suite, c.name, c.value, c.threshold);
        }
        return Ok(report.passed());
    }
    match cli.command {
        Command::Energy {
            input,
            theta,
            lambda,
            p,
            config,
        } => {
            let f = read_boundary(&input)?;
            let eps = match config {
                Some(path) => SpaceParams::load(path)?.eps(),
                None => std::f64::consts::LN_2,
            };
            print!("{}", dyadic_energy_with(&f, eps, theta, lambda, p).to_csv());
        }
        Command::Extend {
            mode,
            input,
            out,
            config,
            alpha_base,
            schedule,
        } => {
            let f = read_boundary(&input)?;
            let params = file_params(config.as_deref(), f.k(), f.depth())?;
            let u = match mode {
                Mode::Whitney => whitney_extend(&f, &params),
                Mode::Alpha => alpha_extend(&f, &AlphaSequence::powers(alpha_base, f.depth())?, &params),
                Mode::Gagliardo => {
                    let (u, s) = gagliardo_extend(&f, &params)?;
                    if let Some(path) = schedule {
                        std::fs::write(&path, s.to_csv())
                            .map_err(|e| besov_tree::Error::Io { path, source: e })?;
                    }
                    u
                }
            };
            write_tree(&out, &u)?;
        }
        Command::Trace { input, out } => write_boundary(&out, &trace(&read_tree(&input)?))?,
        _ => unreachable!("suites handled above"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qdetect::scenarios::{build_ghsz, build_rt_analogue, save_scenario, scenario_to_json};
use qdetect::Tolerance;
use qdetect_cli::{
    cmd_c3, cmd_detect, cmd_ghsz, cmd_mixture, cmd_simulate, OutputFormat, SimulateOptions, DEFAULT_SAMPLES,
    DEFAULT_THETA, DEFAULT_Z, EXIT_USAGE,
};

/// Verifiers for detection relations and value assignment of elementary
/// quantum observables.
///
/// Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
/// IO or input-validation errors.
#[derive(Parser, Debug)]
#[command(name = "qdetect", version)]
struct Cli {
    /// Absolute tolerance per matrix entry; comparisons use tol·dim.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_ATOL)]
    tol: f64,

    /// Eigenvalues within this distance are treated as equal (or as zero).
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_EIG_CUT)]
    eig_cut: f64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Builtin {
    Ghsz,
    RtAnalogue,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Four-qubit no-go construction: commutators, detections and the sign constraints.
    Ghsz,
    /// Check whether T detects E in a scenario file.
    Detect { scenario: PathBuf, t: String, e: String },
    /// Two-dimensional mixture counterexample to the consistency condition.
    Mixture {
        /// Angle of F in radians; the failure pattern needs 0 < theta < pi/4.
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
    },
    /// Consistency condition Tr(rho F) = p(E&F) + p(E'&F) in a scenario file.
    C3 { scenario: PathBuf, e: String, f: String },
    /// Sample a specimen ensemble for a commuting family and audit it.
    Simulate {
        scenario: PathBuf,
        /// Observable names, e.g. `M Ga`.
        #[arg(required = true)]
        family: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; results do not depend on this. Defaults to the number of CPUs.
        #[arg(long)]
        workers: Option<usize>,
        /// Frequency tolerance in binomial standard deviations.
        #[arg(long, default_value_t = DEFAULT_Z)]
        z: f64,
        /// Ensemble CSV path [default: <scenario stem>.ensemble.csv beside the scenario].
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write a built-in scenario file.
    Scenario {
        name: Builtin,
        /// Output path; stdout if omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> qdetect::Result<ExitCode> {
    let tol = Tolerance::new(cli.tol, cli.eig_cut)?;
    let report = match cli.command {
        Command::Ghsz => cmd_ghsz(&tol)?,
        Command::Detect { scenario, t, e } => cmd_detect(&scenario, &t, &e, &tol)?,
        Command::Mixture { theta } => cmd_mixture(theta, &tol)?,
        Command::C3 { scenario, e, f } => cmd_c3(&scenario, &e, &f, &tol)?,
        Command::Simulate {
            scenario,
            family,
            samples,
            seed,
            workers,
            z,
            csv,
        } => {
            let mut opts = SimulateOptions {
                samples,
                seed,
                z,
                csv,
                ..SimulateOptions::default()
            };
            if let Some(w) = workers {
                opts.workers = w;
            }
            cmd_simulate(&scenario, &family, &opts, &tol)?
        }
        Command::Scenario { name, out } => {
            let scn = match name {
                Builtin::Ghsz => build_ghsz()?,
                Builtin::RtAnalogue => build_rt_analogue()?,
            };
            match out {
                Some(path) => save_scenario(&scn, path)?,
                None => println!("{}", scenario_to_json(&scn)?),
            }
            return Ok(ExitCode::SUCCESS);
        }
    };
    print!("{}", report.render(cli.output));
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ontic_core::commands::{self, Mode, Outcome, Overrides};
use ontic_core::Error;

/// Checks ontological models of finite-dimensional quantum systems.
///
/// Exit codes: 0 run completed, 2 invalid input, 3 precondition failed
/// (including a rejected self-measurement kernel), 4 numerical failure.
#[derive(Parser, Debug)]
#[command(name = "ontic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Eigen and normalization tolerance; adequacy uses ten times this.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a scenario.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Check empirical adequacy of the scenario's model.
    Adequacy {
        #[command(flatten)]
        common: Common,
    },
    /// Run the impossibility analysis.
    Nogo {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Support threshold for the regions `Lambda_g`.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Emit a canonical fixture scenario.
    Fixture {
        #[arg(value_enum)]
        name: FixtureArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Witness,
    Search,
    Theorem1,
    Sweep,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FixtureArg {
    Trivial,
    Binned,
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::validation("out", format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(command: &str, out: Option<&Path>, result: Result<Outcome, Error>) -> ExitCode {
    match result {
        Ok(o) => {
            if let Err(e) = emit(&commands::render(&o.report), out) {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
            if out.is_some() {
                println!("{}", o.summary);
            } else {
                eprintln!("{}", o.summary);
            }
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(p) = out {
                let _ = std::fs::write(p, commands::render(&commands::error_report(command, &e)));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { common } => {
            let ov = Overrides { tol: common.tol, ..Overrides::default() };
            let r = commands::load_scenario(&common.scenario).and_then(|s| commands::validate(&s, &ov));
            finish("validate", common.out.as_deref(), r)
        }
        Command::Adequacy { common } => {
            let ov = Overrides { tol: common.tol, ..Overrides::default() };
            let r = commands::load_scenario(&common.scenario).and_then(|s| commands::adequacy(&s, &ov));
            finish("adequacy", common.out.as_deref(), r)
        }
        Command::Nogo { common, mode, seed, restarts, max_iter, eta } => {
            let ov = Overrides { tol: common.tol, seed, restarts, max_iter, eta };
            let mode = match mode {
                ModeArg::Witness => Mode::Witness,
                ModeArg::Search => Mode::Search,
                ModeArg::Theorem1 => Mode::Theorem1,
                ModeArg::Sweep => Mode::Sweep,
            };
            let r = commands::load_scenario(&common.scenario).and_then(|s| commands::nogo(&s, mode, &ov));
            finish("nogo", common.out.as_deref(), r)
        }
        Command::Fixture { name, dim, bins, out } => {
            let name = match name {
                FixtureArg::Trivial => "trivial",
                FixtureArg::Binned => "binned",
            };
            match commands::fixture(name, dim, bins).and_then(|t| emit(&t, out.as_deref())) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}

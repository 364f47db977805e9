use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use psafe::cli::{cmd_check, cmd_ir, cmd_lint, cmd_run, RunOptions};

const CONFIG_HELP: &str = "Monitor config (JSON). Keys, all optional: \
nominal_speed (m/s, default 1.0), default_cap (m/s applied by cap_speed, default 0.3), \
caps (per-clause overrides keyed \"<group>.<clause>\", e.g. {\"0.1\": 0.5})";

#[derive(Parser)]
#[command(
    name = "psafe",
    version,
    about = "Perception-safety rule compiler and monitor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and typecheck a program
    Check { program: PathBuf },
    /// Check a program and report redundant or constant clauses
    Lint { program: PathBuf },
    /// Print the lowered rule table
    Ir {
        program: PathBuf,
        #[arg(long, help = CONFIG_HELP)]
        config: Option<PathBuf>,
    },
    /// Replay a scenario through the monitor, one trace line per tick
    Run {
        program: PathBuf,
        scenario: PathBuf,
        #[arg(long, help = CONFIG_HELP)]
        config: Option<PathBuf>,
        /// Print per-tick trace lines (the default)
        #[arg(long, overrides_with = "quiet")]
        trace: bool,
        /// Suppress trace lines; the exit status still reflects expectations
        #[arg(long, overrides_with = "trace")]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let status = match &cli.command {
        Command::Check { program } => cmd_check(program, &mut out, &mut err),
        Command::Lint { program } => cmd_lint(program, &mut out, &mut err),
        Command::Ir { program, config } => cmd_ir(program, config.as_deref(), &mut out, &mut err),
        Command::Run {
            program,
            scenario,
            config,
            quiet,
            ..
        } => {
            let options = RunOptions {
                config: config.as_deref(),
                quiet: *quiet,
            };
            cmd_run(program, scenario, &options, &mut out, &mut err)
        }
    };
    ExitCode::from(status.code() as u8)
}

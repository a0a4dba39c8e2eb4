use std::process::ExitCode;

use clap::Parser;

use rcthermo_cli::{run, Command, Options, EXIT_CONFIG, EXIT_OK, EXIT_POINT_FAILED};

#[derive(Debug, Parser)]
#[command(name = "rcthermo", version, about = "Reaction-coordinate thermodynamics of quantum engines")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, clap::Subcommand)]
enum Sub {
    /// Map a spectral density onto a reaction coordinate.
    MapSd(Options),
    /// Three-level maser with and without a reaction coordinate.
    Maser(Options),
    /// Single-electron transistor with a vibrational reaction coordinate.
    Set(Options),
    /// Reduced equilibrium state against the canonical and steady states.
    Eqcheck(Options),
    /// Sweep whichever model the config defines along `[sweep]`.
    Sweep(Options),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    let (cmd, opts) = match cli.command {
        Sub::MapSd(o) => (Command::MapSd, o),
        Sub::Maser(o) => (Command::Maser, o),
        Sub::Set(o) => (Command::Set, o),
        Sub::Eqcheck(o) => (Command::Eqcheck, o),
        Sub::Sweep(o) => (Command::Sweep, o),
    };
    let code = match run(cmd, &opts) {
        Ok(0) => EXIT_OK,
        Ok(n) => {
            eprintln!("{n} grid point(s) failed; see the error column");
            EXIT_POINT_FAILED
        }
        Err(e) => {
            eprintln!("rcthermo: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

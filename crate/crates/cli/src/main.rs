use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trilevel::SolverKind;
use trilevel_cli::{cmd_check, cmd_figure, cmd_run, cmd_sweep, Overrides};

/// Driven three-level system with decoherence: runs, figure presets, sweeps and self-checks.
#[derive(Parser)]
#[command(name = "trilevel", version)]
struct Cli {
    /// Integration tolerance, in (0, 1e-3].
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// End time of the run.
    #[arg(long = "t-end", global = true, allow_hyphen_values = true)]
    t_end: Option<f64>,
    /// Spacing of output samples.
    #[arg(long = "dt-out", global = true, allow_hyphen_values = true)]
    dt_out: Option<f64>,
    /// product, direct_eta, direct_rho or hydrogen_analytic.
    #[arg(long, global = true, value_parser = parse_solver)]
    solver: Option<SolverKind>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file; CSV goes to the file's `csv` path or stdout.
    Run { config: PathBuf },
    /// Reproduce a figure preset (fig1 to fig17).
    Figure {
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Re-run a config for each value of one field parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated; expressions such as -pi/6 are accepted.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the built-in consistency checks.
    Check,
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|e: trilevel::ConfigError| e.message)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        tol: cli.tol,
        t_end: cli.t_end,
        dt_out: cli.dt_out,
        solver: cli.solver,
    };
    let mut stdout = io::stdout().lock();
    let result = match &cli.command {
        Command::Run { config } => cmd_run(config, &overrides, &mut stdout).map(|_| ()),
        Command::Figure { name, out } => cmd_figure(name, out, &overrides).map(|paths| {
            for p in paths {
                let _ = writeln!(stdout, "{}", p.display());
            }
        }),
        Command::Sweep { config, param, values, out } => {
            let values: Vec<String> = values.split(',').map(str::to_string).collect();
            cmd_sweep(config, param, &values, out, &overrides).map(|written| {
                for (value, path) in written {
                    let _ = writeln!(stdout, "{param} = {value}: {}", path.display());
                }
            })
        }
        Command::Check => cmd_check(&mut stdout),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pauli_dyn_cli::{cmd_divisibility, cmd_eval, cmd_example, cmd_lemma1, cmd_roundtrip, cmd_singularities};
use pauli_dyn_core::mixing::Lemma1Config;

#[derive(Parser)]
#[command(name = "pauli-dyn", version, about = "Analyse time-dependent qubit Pauli channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a channel and write t, lambdas, Pauli weights and decay rates as CSV.
    Eval {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Locate and classify the singular points of a channel.
    Singularities {
        spec: PathBuf,
        #[arg(long)]
        horizon: Option<f64>,
        /// Directory for the JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the four worked examples and check its claim.
    Example {
        n: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomised check that mixing non-singular flip channels never yields a singular map.
    Lemma1 {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        #[arg(long, hide = true)]
        inject_type_ii: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide CP-divisibility from the signs of the decay rates.
    Divisibility {
        spec: PathBuf,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the master equation and compare with the closed-form map.
    Roundtrip {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[arg(long)]
        horizon: Option<f64>,
        /// Step over rate poles by re-anchoring on the closed-form map.
        #[arg(long)]
        excise: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval {
            spec,
            out,
            horizon,
            grid,
        } => cmd_eval(&spec, &out, horizon, grid),
        Command::Singularities { spec, horizon, out } => cmd_singularities(&spec, horizon, out.as_deref()),
        Command::Example { n, out } => cmd_example(n, out.as_deref()),
        Command::Lemma1 {
            trials,
            seed,
            horizon,
            grid,
            inject_type_ii,
            out,
        } => {
            let mut cfg = Lemma1Config::new(trials, horizon, seed);
            cfg.grid = grid;
            cfg.inject_type_ii = inject_type_ii;
            cmd_lemma1(&cfg, out.as_deref())
        }
        Command::Divisibility {
            spec,
            horizon,
            grid,
            out,
        } => cmd_divisibility(&spec, horizon, grid, out.as_deref()),
        Command::Roundtrip {
            spec,
            dt,
            horizon,
            excise,
            out,
        } => cmd_roundtrip(&spec, dt, horizon, excise, out.as_deref()),
    };
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `witnesskit` command-line front end.
//!
//! Exit codes: 0 success (for `mdi-eval`, N >= 0), 10 entanglement certified
//! by `mdi-eval`, 1 `coeffs` mismatch or `verify` failures, 2 invalid input,
//! 3 degenerate denominator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use witnesskit::tolerance::Tolerances;

#[derive(Parser)]
#[command(
    name = "witnesskit",
    version,
    about = "Entanglement witnesses and their MDI forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Family {
    Werner,
    Bound,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CaseArg {
    Werner,
    Bound,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BasisArg {
    /// Pauli states for qubits, Gell-Mann states for qutrits, generic otherwise.
    Auto,
    Pauli,
    Gellmann,
    Standard,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate all witnesses with MES effects over a parameter grid.
    Scan {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Output stem; writes `<out>.csv` and `<out>.json`. JSON goes to stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose the canonical witness and compare against the reference tables.
    Coeffs {
        #[arg(long, value_enum)]
        case: Family,
        /// Directory for the CSV tables.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate I(P) and N(P) for a state, witness and effects.
    MdiEval {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        /// Alice's effect; defaults to the maximally entangled projector.
        #[arg(long)]
        effect_a: Option<PathBuf>,
        /// Bob's effect; defaults to the maximally entangled projector.
        #[arg(long)]
        effect_b: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        basis: BasisArg,
    },
    /// Randomized separable-state and filtering-identity suite.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "both")]
        case: CaseArg,
    },
    /// Coefficients of an operator over a product of local state bases.
    Decompose {
        #[arg(long)]
        operator: PathBuf,
        /// Local dimensions `dA,dB`; taken from the file or a square split otherwise.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        basis: BasisArg,
        /// Print CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Print a family member as state JSON.
    State {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, allow_negative_numbers = true)]
        param: f64,
    },
    /// Print a canonical nonlinear witness as JSON.
    Witness {
        #[arg(long, value_enum)]
        case: Family,
    },
}

fn install_tolerances() -> Result<(), String> {
    if let Ok(overrides) = std::env::var("WITNESSKIT_TOL") {
        let t = Tolerances::DEFAULT
            .with_overrides(&overrides)
            .map_err(|e| format!("WITNESSKIT_TOL: {e}"))?;
        Tolerances::install(t);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = install_tolerances() {
        eprintln!("error: {e}");
        return ExitCode::from(commands::EXIT_INPUT);
    }
    let result = match cli.command {
        Command::Scan {
            family,
            from,
            to,
            steps,
            out,
        } => commands::scan(family, from, to, steps, out.as_deref()),
        Command::Coeffs { case, out } => commands::coeffs(case, out.as_deref()),
        Command::MdiEval {
            state,
            witness,
            effect_a,
            effect_b,
            basis,
        } => commands::mdi_eval(
            &state,
            &witness,
            effect_a.as_deref(),
            effect_b.as_deref(),
            basis,
        ),
        Command::Verify { trials, seed, case } => commands::verify(trials, seed, case),
        Command::Decompose {
            operator,
            dims,
            basis,
            csv,
        } => commands::decompose(&operator, dims.as_deref(), basis, csv),
        Command::State { family, param } => commands::state(family, param),
        Command::Witness { case } => commands::witness(case),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}

//! `tcqdm` — build and inspect Tavis-Cummings interaction matrices, run
//! closed-form evolutions, run the quantum diagonalization pipeline, and run
//! the verification suite. Outputs are JSON or CSV for scripting.
//!
//! Exit status: 0 on success, 1 when verification checks fail, 2 on usage
//! errors.

mod output;
mod state_spec;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use tcqdm::evolve::{evolve_state, interaction_exponential};
use tcqdm::fock::realize;
use tcqdm::model::{build_a, build_decomposition, build_spin_block, AtomCount, Spin};
use tcqdm::opalg::QuantumMatrix;
use tcqdm::qdm::{diagonalize, Mode};
use tcqdm::verify::{run_suite, CheckConfig};

#[derive(Parser)]
#[command(
    name = "tcqdm",
    about = "Tavis-Cummings evolution operators and quantum diagonalization",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a model matrix, propagator, or diagonalization factor.
    Matrix(MatrixArgs),
    /// Evolve an atom-field state and tabulate observables over time.
    Evolve(EvolveArgs),
    /// Run the diagonalization pipeline for one spin block.
    Qdm(QdmArgs),
    /// Run the identity verification suite and print its JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct MatrixArgs {
    /// Interaction matrix A_n for this atom count.
    #[arg(long)]
    atoms: Option<u32>,
    /// Spin block B_j, e.g. 0.5, 1, 1.5.
    #[arg(long, value_name = "J")]
    block_j: Option<String>,
    /// Orthogonal intertwiner T for this atom count (2 or 3).
    #[arg(long, value_name = "ATOMS")]
    intertwiner: Option<u32>,
    /// Closed-form propagator e^{-itgA} for `--atoms` at this time.
    #[arg(long, requires = "atoms")]
    propagator: bool,
    /// Diagonalization factor (u or d) for the spin block in `--block-j`.
    #[arg(long, value_name = "u|d", requires = "block_j")]
    factor: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    /// Realize numerically on the truncated Fock space instead of printing
    /// symbolic entries.
    #[arg(long)]
    realize: bool,
    #[arg(long, default_value_t = 40)]
    cutoff: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Accepted for interface compatibility; computation is single-threaded
    /// and deterministic.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    atoms: u32,
    /// Initial state, e.g. "atoms=eg;field=fock:0" or
    /// "atoms=eee;field=coherent:2,0".
    #[arg(long)]
    state: String,
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Single evaluation time (ignored when sweeping).
    #[arg(long)]
    t: Option<f64>,
    /// Sweep end time; produces `steps + 1` points from 0 to t-max.
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 40)]
    cutoff: usize,
    #[arg(long, default_value_t = 6)]
    margin: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct QdmArgs {
    /// Half-integer spin of the block, e.g. 0.5, 1, 1.5, 2.
    #[arg(long)]
    j: String,
    #[arg(long, value_enum, default_value_t = QdmMode::ClosedForm)]
    mode: QdmMode,
    #[arg(long, default_value_t = 40)]
    cutoff: usize,
    #[arg(long, default_value_t = 6)]
    margin: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum QdmMode {
    ClosedForm,
    PerLevel,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 40)]
    cutoff: usize,
    #[arg(long, default_value_t = 6)]
    margin: usize,
    /// Run only checks whose name contains this substring.
    #[arg(long)]
    only: Option<String>,
    /// Tolerance for exact-algebra identities.
    #[arg(long, default_value_t = 1e-12)]
    tol_exact: f64,
    /// Tolerance for oracle comparisons against the dense exponential.
    #[arg(long, default_value_t = 1e-9)]
    tol_oracle: f64,
    /// Override every tolerance (useful to demonstrate failure reporting).
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value_t = 20040607)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Matrix(args) => cmd_matrix(args),
        Command::Evolve(args) => cmd_evolve(args),
        Command::Qdm(args) => cmd_qdm(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

type CmdResult = Result<ExitCode, String>;

fn atom_count(n: u32) -> Result<AtomCount, String> {
    AtomCount::new(n).map_err(|e| e.to_string())
}

fn cmd_matrix(args: MatrixArgs) -> CmdResult {
    if args.threads != 1 {
        eprintln!("note: computation is single-threaded; --threads is accepted but unused");
    }
    let selectors = usize::from(args.atoms.is_some() && !args.propagator)
        + usize::from(args.block_j.is_some() && args.factor.is_none())
        + usize::from(args.intertwiner.is_some())
        + usize::from(args.propagator)
        + usize::from(args.factor.is_some());
    if selectors != 1 {
        return Err(
            "select exactly one of --atoms, --block-j, --intertwiner, \
             --propagator, or --factor"
                .to_string(),
        );
    }

    if let Some(n) = args.intertwiner {
        let d = build_decomposition(atom_count(n)?).map_err(|e| e.to_string())?;
        println!("{}", output::scalar_matrix_json(&format!("intertwiner_{n}"), &d.t));
        return Ok(ExitCode::SUCCESS);
    }

    let (label, matrix): (String, QuantumMatrix) = if args.propagator {
        let n = atom_count(args.atoms.expect("clap enforces --atoms"))?;
        (
            format!("propagator_atoms_{}_t_{}_g_{}", n, args.t, args.g),
            interaction_exponential(n, args.t, args.g),
        )
    } else if let Some(factor) = &args.factor {
        let j = Spin::parse(args.block_j.as_deref().expect("clap enforces --block-j"))
            .map_err(|e| e.to_string())?;
        let mode = if j.twice() <= 3 { Mode::ClosedForm } else { Mode::PerLevel };
        let result = diagonalize(j, mode).map_err(|e| e.to_string())?;
        match factor.as_str() {
            "u" => (format!("qdm_u_j_{j}"), result.u),
            "d" => (format!("qdm_d_j_{j}"), result.d),
            other => return Err(format!("unknown factor `{other}` (expected u or d)")),
        }
    } else if let Some(j) = &args.block_j {
        let j = Spin::parse(j).map_err(|e| e.to_string())?;
        let block = build_spin_block(j).map_err(|e| e.to_string())?;
        (format!("block_j_{j}"), block.matrix().clone())
    } else {
        let n = atom_count(args.atoms.expect("selector guarantees --atoms"))?;
        (format!("interaction_atoms_{n}"), build_a(n))
    };

    if args.realize {
        let r = realize(&matrix, args.cutoff).map_err(|e| e.to_string())?;
        match args.format {
            Format::Json => println!("{}", output::realization_json(&label, &r)),
            Format::Csv => print!("{}", output::realization_csv(&r)),
        }
    } else {
        println!("{}", output::symbolic_json(&label, &matrix));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_evolve(args: EvolveArgs) -> CmdResult {
    if args.cutoff <= 2 * args.margin {
        return Err(format!(
            "cutoff {} must exceed twice the margin {}",
            args.cutoff, args.margin
        ));
    }
    let n = atom_count(args.atoms)?;
    let initial = state_spec::parse(&args.state, n.count()).map_err(|e| e.to_string())?;
    let times: Vec<f64> = match (args.t_max, args.t) {
        (Some(t_max), _) => {
            if args.steps < 1 {
                return Err("steps must be at least 1".to_string());
            }
            if t_max <= 0.0 {
                return Err("t-max must be positive".to_string());
            }
            (0..=args.steps)
                .map(|k| k as f64 * t_max / args.steps as f64)
                .collect()
        }
        (None, Some(t)) => vec![t],
        (None, None) => return Err("provide either --t or --t-max".to_string()),
    };
    let series = evolve_state(n, args.g, args.omega, &initial, &times, args.cutoff, args.margin)
        .map_err(|e| e.to_string())?;
    match args.format {
        Format::Csv => print!("{}", output::series_csv(n.count(), &series)),
        Format::Json => println!("{}", output::series_json(n.count(), &series)),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_qdm(args: QdmArgs) -> CmdResult {
    if args.cutoff <= 2 * args.margin {
        return Err(format!(
            "cutoff {} must exceed twice the margin {}",
            args.cutoff, args.margin
        ));
    }
    let j = Spin::parse(&args.j).map_err(|e| e.to_string())?;
    let mode = match args.mode {
        QdmMode::ClosedForm => Mode::ClosedForm,
        QdmMode::PerLevel => Mode::PerLevel,
    };
    if mode == Mode::PerLevel && j.twice() > 8 {
        return Err(format!("per-level mode supports j up to 4, got {j}"));
    }
    let result = diagonalize(j, mode).map_err(|e| e.to_string())?;
    let block = build_spin_block(j).map_err(|e| e.to_string())?;
    let rebuilt = result.reconstruct().map_err(|e| e.to_string())?;
    let lhs = realize(&rebuilt, args.cutoff).map_err(|e| e.to_string())?;
    let rhs = realize(block.matrix(), args.cutoff).map_err(|e| e.to_string())?;
    let margin = args.margin.max(j.block_dim() - 1);
    if args.cutoff <= 2 * margin {
        return Err(format!(
            "cutoff {} leaves no interior at the block's required margin {}",
            args.cutoff, margin
        ));
    }
    let residual =
        tcqdm::fock::interior_compare(&lhs, &rhs, margin).map_err(|e| e.to_string())?;
    let u_realized = realize(&result.u, args.cutoff).map_err(|e| e.to_string())?;
    println!(
        "{}",
        output::qdm_json(&result, &u_realized, residual, args.cutoff, mode)
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let config = CheckConfig {
        cutoff: args.cutoff,
        margin: args.margin,
        tol_exact: args.tol_exact,
        tol_oracle: args.tol_oracle,
        tol_override: args.tolerance,
        only: args.only,
        seed: args.seed,
        ..CheckConfig::default()
    };
    if config.cutoff <= 2 * config.margin {
        return Err(format!(
            "cutoff {} must exceed twice the margin {}",
            config.cutoff, config.margin
        ));
    }
    let report = run_suite(&config).map_err(|e| e.to_string())?;
    print!("{}", report.to_json());
    Ok(if report.all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

// Complex helper shared by the output module.
pub(crate) fn c64_pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

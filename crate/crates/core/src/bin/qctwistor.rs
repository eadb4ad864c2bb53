use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qctwistor::flat::NumericConfig;
use qctwistor::graded::bracket_table;
use qctwistor::report::{
    parse_bracket_table, render_bracket_table, run_algebra_suite, run_all, run_model_suite, verify_bracket_table, Format,
    Report, SuiteConfig, DEFAULT_MAX_N,
};
use qctwistor::Error;

#[derive(Parser)]
#[command(name = "qctwistor", version, about = "Exact and numeric checks for the qc twistor CR structure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact checks on the graded algebras, the embedding and the group actions.
    VerifyAlgebra(CommonArgs),
    /// Checks on the flat model and the numeric Levi form of its twistor space.
    VerifyModel(CommonArgs),
    /// Writes the structure constants of sp(Q), or re-verifies a saved table.
    BracketTable(BracketArgs),
    /// Both verification suites.
    All(CommonArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Random samples per check.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Finite-difference step for brackets.
    #[arg(long, default_value_t = 1e-5)]
    fd_step: f64,
    /// Integrability residual tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Smallest accepted |eigenvalue| of the Levi form.
    #[arg(long, default_value_t = 1e-8)]
    eig_floor: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest accepted n.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
    /// Runs the homomorphism check against a deliberately broken embedding.
    #[arg(long, hide = true)]
    inject_phi_fault: bool,
}

impl CommonArgs {
    fn config(&self) -> SuiteConfig {
        SuiteConfig {
            n: self.n,
            seed: self.seed,
            trials: self.trials,
            numeric: NumericConfig { fd_step: self.fd_step, residual_tol: self.tol, eig_floor: self.eig_floor },
            max_n: self.max_n,
            format: self.format.into(),
            out: self.out.clone(),
            inject_phi_fault: self.inject_phi_fault,
        }
    }
}

#[derive(Args)]
struct BracketArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Load this table and check it against the bracket instead of writing one.
    #[arg(long)]
    verify: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_suite(args: &CommonArgs, run: fn(&SuiteConfig) -> Result<Report, Error>) -> Result<bool, Error> {
    let cfg = args.config();
    let report = run(&cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    emit(&report.render(cfg.format)?, cfg.out.as_ref())?;
    Ok(report.passed())
}

fn bracket(args: &BracketArgs) -> Result<bool, Error> {
    if args.n == 0 || args.n > args.max_n {
        return Err(Error::InvalidConfig(format!("n = {} outside 1..={}", args.n, args.max_n)));
    }
    let format: Format = args.format.into();
    if let Some(path) = &args.verify {
        let text = std::fs::read_to_string(path)?;
        let rows = parse_bracket_table(&text, format)?;
        let check = verify_bracket_table(args.n, &rows)?;
        for f in check.failures.iter().take(10) {
            eprintln!("mismatch: {f}");
        }
        println!("{} rows, {} instances checked, {} failures", rows.len(), check.instances, check.failures.len());
        return Ok(check.passed());
    }
    let text = render_bracket_table(args.n, &bracket_table(args.n), format)?;
    emit(&text, args.out.as_ref())?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyAlgebra(a) => run_suite(a, run_algebra_suite),
        Command::VerifyModel(a) => run_suite(a, run_model_suite),
        Command::All(a) => run_suite(a, run_all),
        Command::BracketTable(a) => bracket(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e @ (Error::InvalidConfig(_) | Error::Parse(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

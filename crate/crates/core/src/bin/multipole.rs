use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use multipole_core::scan::{
    parse_index_list, save_report, threshold_report, write_report, KappaSelection, ReportFormat, ScanConfig,
    DEFAULT_BISECTION_TOL, DEFAULT_GRID_STEP,
};
use multipole_core::states::{moments_of, noisy_family_state, NoisyFamily, SymmetricState};
use multipole_core::witness::witness_verdict;
use multipole_core::{selftest, Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "multipole",
    version,
    about = "Multipole covariance entanglement witnesses for symmetric qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the tensor moments t^K_Q of a state as JSON
    Moments {
        #[arg(long)]
        state: PathBuf,
    },
    /// Evaluate the order-κ witness on a state file or a noisy family member
    Witness(WitnessArgs),
    /// Threshold scan over (family, N, κ) cells
    Scan(ScanArgs),
    /// Run the built-in oracle checks
    Selftest,
}

#[derive(Args, Debug)]
struct WitnessArgs {
    #[arg(long, conflicts_with_all = ["family", "n", "x"])]
    state: Option<PathBuf>,
    #[arg(long, requires_all = ["n", "x"])]
    family: Option<u8>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    kappa: usize,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Families, e.g. "1,2" or "1..3"
    #[arg(long, default_value = "1,2,3")]
    family: String,
    /// Qubit numbers, e.g. "4..12" or "4,6,8"
    #[arg(long)]
    n: String,
    /// "highest" or a list such as "1..5"
    #[arg(long, default_value = "highest")]
    kappa: String,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Bisection tolerance in x
    #[arg(long, default_value_t = DEFAULT_BISECTION_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    grid_step: f64,
    #[arg(long)]
    jobs: Option<usize>,
    /// Record per-cell wall time (makes output run-dependent)
    #[arg(long)]
    timing: bool,
}

#[derive(Serialize)]
struct MomentEntry {
    #[serde(rename = "K")]
    rank: usize,
    #[serde(rename = "Q")]
    component: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct MomentReport {
    n: usize,
    moments: Vec<MomentEntry>,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn moments(path: &Path) -> Result<()> {
    let state = SymmetricState::read_json(path)?;
    let t = moments_of(&state);
    let moments = t
        .iter()
        .map(|(rank, component, z)| MomentEntry {
            rank,
            component,
            re: z.re,
            im: z.im,
        })
        .collect();
    print_json(&MomentReport {
        n: t.n_qubits(),
        moments,
    })
}

fn witness(args: &WitnessArgs) -> Result<()> {
    let state = match (&args.state, args.family, args.n, args.x) {
        (Some(path), ..) => SymmetricState::read_json(path)?,
        (None, Some(f), Some(n), Some(x)) => noisy_family_state(NoisyFamily::from_index(f)?, x, n)?,
        _ => return Err(Error::domain("witness needs --state FILE or --family, --n and --x")),
    };
    print_json(&witness_verdict(&state, args.kappa)?)
}

fn scan(args: &ScanArgs) -> Result<()> {
    let families = parse_index_list(&args.family)?
        .into_iter()
        .map(|i| {
            u8::try_from(i)
                .map_err(|_| Error::domain(format!("bad family {i}")))
                .and_then(NoisyFamily::from_index)
        })
        .collect::<Result<Vec<_>>>()?;
    let cfg = ScanConfig {
        families,
        n_values: parse_index_list(&args.n)?,
        kappas: args.kappa.parse::<KappaSelection>()?,
        grid_step: args.grid_step,
        bisection_tol: args.tol,
        format: args.format.parse::<ReportFormat>()?,
        jobs: args.jobs,
        timing: args.timing,
    };
    let records = threshold_report(&cfg)?;
    match &args.out {
        Some(path) => save_report(&records, cfg.format, path),
        None => write_report(&records, cfg.format, std::io::stdout().lock()),
    }
}

fn run_selftest() -> Result<bool> {
    let checks = selftest::run()?;
    for c in &checks {
        println!(
            "{} {} ({:.3e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Moments { state } => moments(state),
        Command::Witness(args) => witness(args),
        Command::Scan(args) => scan(args),
        Command::Selftest => run_selftest().and_then(|ok| {
            if ok {
                Ok(())
            } else {
                Err(Error::validation("selftest failed"))
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Io { .. }) { 2 } else { 1 })
        }
    }
}

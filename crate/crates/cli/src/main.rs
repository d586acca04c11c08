mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use privcount_core::precision::{set_precision, DEFAULT_PRECISION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] privcount_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Probabilistic counters, their exact distributions and privacy audits.
#[derive(Debug, Parser)]
#[command(name = "privcount", version)]
struct Cli {
    /// Working precision in bits for extended-precision arithmetic.
    #[arg(long, global = true, env = "PRIVCOUNT_PRECISION", default_value_t = DEFAULT_PRECISION,
          value_parser = clap::value_parser!(u32).range(64..=1 << 20))]
    precision: u32,

    /// Significant digits for printed probabilities.
    #[arg(long, global = true, default_value_t = 15, value_parser = clap::value_parser!(u16).range(1..=1000))]
    digits: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact level distributions.
    #[command(subcommand)]
    Dist(DistCommand),
    /// Differential-privacy parameters.
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Simulate a survey from a JSON config.
    Survey(SurveyArgs),
    /// Run the aggregation service from a JSON config.
    Serve(ServeArgs),
    /// Adjacent-probability ratios or the p_{2^k+1,k+4} sequence.
    Tables(TablesArgs),
    /// Laplace, Morris and MaxGeo aggregation side by side.
    Compare(CompareArgs),
    /// The Flajolet-Martin constant.
    Phi(PhiArgs),
}

#[derive(Debug, Subcommand)]
enum DistCommand {
    /// Morris level M_n.
    Morris(DistMorrisArgs),
    /// MaxGeo level M_n.
    Maxgeo(DistMaxgeoArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("what").args(["row", "moments", "tails"])))]
struct DistMorrisArgs {
    #[arg(long)]
    n: u64,
    /// Full pmf over [1 : n+1] (default).
    #[arg(long)]
    row: bool,
    /// E[M], Var(M) and E[2^M].
    #[arg(long)]
    moments: bool,
    /// Mass below and above I_n.
    #[arg(long)]
    tails: bool,
}

#[derive(Debug, Args)]
struct DistMaxgeoArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    l: u64,
}

#[derive(Debug, Subcommand)]
enum AuditCommand {
    /// Morris privacy loss; one n as JSON, or a range of n.
    Morris(AuditMorrisArgs),
    /// MaxGeo minimum n for (epsilon, delta), or epsilon for given n.
    Maxgeo(AuditMaxgeoArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["n", "range"])))]
struct AuditMorrisArgs {
    #[arg(long)]
    n: Option<u64>,
    /// Inclusive range A:B.
    #[arg(long, value_parser = output::parse_range)]
    range: Option<(u64, u64)>,
    /// Emit CSV instead of JSON (range only).
    #[arg(long, requires = "range")]
    csv: bool,
    /// Include backward ratios for every n.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["epsilon", "n", "range"])))]
struct AuditMaxgeoArgs {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    n: Option<u64>,
    /// Inclusive range A:B; emits epsilon curves as CSV.
    #[arg(long, value_parser = output::parse_range)]
    range: Option<(u64, u64)>,
    /// Accepted for symmetry with `audit morris`; range output is always CSV.
    #[arg(long, requires = "range")]
    csv: bool,
    /// Use l_eps = ceil(log2(1 + 1/eps)).
    #[arg(long, requires = "epsilon")]
    compat: bool,
    /// Also verify the tail and ratio conditions at n_min.
    #[arg(long, requires = "epsilon")]
    check: bool,
}

#[derive(Debug, Args)]
struct SurveyArgs {
    #[arg(long)]
    config: std::path::PathBuf,
    /// Write per-trial (trial, released, estimate) rows here.
    #[arg(long)]
    trials_csv: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long)]
    config: std::path::PathBuf,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("table").required(true).args(["alfa", "init"])))]
struct TablesArgs {
    /// Ratios theta_i = p_{n,i} / p_{n,i+1}.
    #[arg(long)]
    alfa: bool,
    /// p_{2^k+1,k+4} and p_{2^k+1,k+5}.
    #[arg(long)]
    init: bool,
    #[arg(long, default_value_t = 129, requires = "alfa")]
    n: u64,
    #[arg(long, default_value_t = 11, requires = "alfa")]
    i_max: u64,
    #[arg(long, default_value_t = 2, requires = "init")]
    k_min: u32,
    #[arg(long, default_value_t = 14, requires = "init")]
    k_max: u32,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct PhiArgs {
    #[arg(long, default_value_t = privcount_core::counters::DEFAULT_PHI_TERMS)]
    terms: u64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    set_precision(cli.precision);
    let digits = usize::from(cli.digits);
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Dist(DistCommand::Morris(a)) => {
            commands::dist_morris(&mut out, a.n, a.moments, a.tails, digits)
        }
        Command::Dist(DistCommand::Maxgeo(a)) => commands::dist_maxgeo(&mut out, a.n, a.l, digits),
        Command::Audit(AuditCommand::Morris(a)) => match (a.n, a.range) {
            (Some(n), _) => commands::audit_morris_one(&mut out, n, a.strict),
            (None, Some(range)) => commands::audit_morris_range(&mut out, range, a.csv, a.strict, digits),
            (None, None) => unreachable!("clap enforces the target group"),
        },
        Command::Audit(AuditCommand::Maxgeo(a)) => match (a.epsilon, a.n, a.range) {
            (Some(eps), _, _) => commands::audit_maxgeo_min_n(&mut out, eps, a.delta, a.compat, a.check),
            (None, Some(n), _) => commands::audit_maxgeo_given_n(&mut out, n, a.delta),
            (None, None, Some(range)) => commands::audit_maxgeo_range(&mut out, range, a.delta, digits),
            (None, None, None) => unreachable!("clap enforces the target group"),
        },
        Command::Survey(a) => commands::survey(&mut out, &a.config, a.trials_csv.as_deref(), digits),
        Command::Serve(a) => commands::serve(&a.config),
        Command::Tables(a) => {
            if a.alfa {
                commands::tables_alfa(&mut out, a.n, a.i_max, digits)
            } else {
                commands::tables_init(&mut out, a.k_min, a.k_max, digits)
            }
        }
        Command::Compare(a) => commands::compare(&mut out, a.n, a.json, digits),
        Command::Phi(a) => commands::phi(&mut out, a.terms, digits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

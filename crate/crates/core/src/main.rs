use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tradenet::cli::{
    detect_kind, parse_flow_problem, parse_instance, run_compromise, run_distances, run_equilibrium, CliError,
    CompromiseOptions, DocumentKind, Metric, OutputFormat, ReplayDocument, SituationTie,
};
use tradenet::equilibrium::EquilibriumMode;
use tradenet::market::{CostConvention, MarketOptions, PayoffMode};

#[derive(Parser)]
#[command(name = "tradenet", version, about = "Delivery-point placement and path-flow equilibria on trading networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Display {
    #[value(name = "l-plus-d")]
    LPlusD,
    D,
}

#[derive(Clone, Copy, ValueEnum)]
enum Payoff {
    Revenue,
    Units,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    EqualCost,
    Nonnegative,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Retailer,
    Consumer,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    First,
    LowestSites,
}

#[derive(Subcommand)]
enum Command {
    /// Place delivery points by the compromise rule.
    SolveCompromise {
        instance: PathBuf,
        /// Distance tables to use instead of recomputed ones.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "l-plus-d")]
        display: Display,
        /// Overrides the instance's payoff_mode.
        #[arg(long, value_enum)]
        payoff: Option<Payoff>,
        #[arg(long, value_enum, default_value = "first")]
        tie: Tie,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Solve a path-flow equilibrium.
    SolveEquilibrium {
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "equal-cost")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a site distance table.
    Distances {
        instance: PathBuf,
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value = "l-plus-d")]
        display: Display,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check that a document parses and validates.
    Validate { file: PathBuf },
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

impl From<Display> for CostConvention {
    fn from(d: Display) -> Self {
        match d {
            Display::LPlusD => CostConvention::LPlusD,
            Display::D => CostConvention::D,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T, CliError>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::SolveCompromise { instance, replay, display, payoff, tie, format } => {
            let (inst, doc) = with_path(&instance, parse_instance(&read(&instance)?).map_err(Into::into))?;
            let replay_doc = match &replay {
                Some(p) => Some(with_path(p, ReplayDocument::from_json(&read(p)?).map_err(Into::into))?),
                None => None,
            };
            let payoff = match payoff {
                Some(Payoff::Revenue) => PayoffMode::Revenue,
                Some(Payoff::Units) => PayoffMode::Units,
                None => doc.payoff_mode.unwrap_or_default().into(),
            };
            let options = CompromiseOptions {
                market: MarketOptions { payoff, ..Default::default() },
                display: display.into(),
                tie: match tie {
                    Tie::First => SituationTie::First,
                    Tie::LowestSites => SituationTie::LowestSites,
                },
            };
            Ok(run_compromise(&inst, replay_doc.as_ref(), options)?.render(format.into()))
        }
        Command::SolveEquilibrium { problem, mode, format } => {
            let p = with_path(&problem, parse_flow_problem(&read(&problem)?).map_err(Into::into))?;
            let mode = match mode {
                Mode::EqualCost => EquilibriumMode::EqualCost,
                Mode::Nonnegative => EquilibriumMode::Nonnegative,
            };
            Ok(run_equilibrium(&p, mode)?.render(format.into()))
        }
        Command::Distances { instance, metric, display, format } => {
            let (inst, _) = with_path(&instance, parse_instance(&read(&instance)?).map_err(Into::into))?;
            let metric = match metric {
                MetricArg::Retailer => Metric::Retailer,
                MetricArg::Consumer => Metric::Consumer,
            };
            Ok(run_distances(&inst, metric, display.into())?.render(format.into()))
        }
        Command::Validate { file } => {
            let text = read(&file)?;
            let kind = with_path(&file, detect_kind(&text).map_err(Into::into))?;
            let summary = match kind {
                DocumentKind::Instance => {
                    let (inst, _) = with_path(&file, parse_instance(&text).map_err(Into::into))?;
                    format!(
                        "instance: {} nodes, {} edges, {} producers, {} consumers, {} candidate sites, {} retailers",
                        inst.network().node_count,
                        inst.network().edges.len(),
                        inst.producers().len(),
                        inst.consumers().len(),
                        inst.candidate_sites().len(),
                        inst.retailer_count()
                    )
                }
                DocumentKind::FlowProblem => {
                    let p = with_path(&file, parse_flow_problem(&text).map_err(Into::into))?;
                    format!("flow problem: {} edges, {} paths, demand {}", p.edges().len(), p.path_count(), p.demand())
                }
                DocumentKind::Replay => {
                    with_path(&file, ReplayDocument::from_json(&text).map_err(Into::into))?;
                    "replay tables".to_string()
                }
            };
            Ok(format!("ok: {summary}\n"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

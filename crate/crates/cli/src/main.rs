mod compose;
mod data;
mod elicit;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spi_discovery::learner::Preset;
use spi_discovery::monotone::{hansel_chains, ChainPlan, Mode};

use report::{Failure, Format, Report};

/// Rule induction and monotone expert elicitation.
#[derive(Parser)]
#[command(name = "spi-discovery", version)]
struct Cli {
    /// Seed for anything random.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Where to write the command's artifact (session, rule set, plan, CSV).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Hansel chain partition of the n-cube.
    Chains {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=24))]
        n: u8,
    },
    /// Reconstruct a monotone function by chain-ordered questions.
    Elicit(elicit::ElicitArgs),
    /// Learn maximally specific rules for a target literal.
    Learn(data::LearnArgs),
    /// Leave-one-out evaluation of the learner under threshold presets.
    Evaluate(data::EvaluateArgs),
    /// Evaluate the two-level model f(g(w), h(y), x3, x4, x5).
    Compose(compose::ComposeArgs),
    /// Sample cases labelled by the bundled expert model.
    Synth(data::SynthArgs),
    /// Run the interview HTTP service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct ServeArgs {
    /// Defaults to $SPI_DISCOVERY_PORT, then 8714.
    #[arg(long)]
    port: Option<u16>,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Directory for session snapshots; in-memory only when omitted.
    #[arg(long)]
    state_dir: Option<PathBuf>,
    /// Built UI bundle to serve under /.
    #[arg(long)]
    ui_dir: Option<PathBuf>,
    /// Idle sessions are dropped after this many hours.
    #[arg(long, default_value_t = 24)]
    ttl_hours: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hansel,
    Exhaustive,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Hansel => Mode::Hansel,
            ModeArg::Exhaustive => Mode::Exhaustive,
        }
    }
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
}

fn load_plan(path: &std::path::Path) -> Result<ChainPlan, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn chains(n: u8) -> Result<Report, Failure> {
    let plan = hansel_chains(n.into()).map_err(|e| Failure::Usage(e.to_string()))?;
    let text = plan.chains().iter().map(|c| c.render() + "\n").collect();
    let json = serde_json::to_value(&plan).expect("plans serialize");
    Ok(Report::new(text, json).with_artifact(serde_json::to_string_pretty(&plan).expect("plans serialize") + "\n"))
}

fn serve(args: ServeArgs) -> Result<Report, Failure> {
    let port = spi_discovery_service::resolve_port(args.port).map_err(Failure::Usage)?;
    let mut config = spi_discovery_service::ServiceConfig::new(port);
    config.addr = std::net::SocketAddr::new(args.host, port);
    config.state_dir = args.state_dir;
    config.ui_dir = args.ui_dir;
    config.ttl = std::time::Duration::from_secs(args.ttl_hours * 3600);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Other(e.into()))?;
    runtime
        .block_on(spi_discovery_service::serve(config))
        .map_err(|e| Failure::Other(e.into()))?;
    Ok(Report::empty())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SPI_DISCOVERY_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Chains { n } => chains(n),
        Command::Elicit(args) => elicit::run(args, cli.output.as_deref()),
        Command::Learn(args) => data::learn(args),
        Command::Evaluate(args) => data::evaluate(args),
        Command::Compose(args) => compose::run(args),
        Command::Synth(args) => data::synth(args, cli.seed, cli.output.as_deref()),
        Command::Serve(args) => serve(args),
    };
    match result.and_then(|r| r.emit(cli.format, cli.output.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

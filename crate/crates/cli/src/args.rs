use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fleetassign_dynamic::Mode;
use fleetassign_model::rational::parse_rational;
use fleetassign_model::{Rational, Sense};

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s)
}

#[derive(Debug, Parser)]
#[command(
    name = "fleetassign",
    version,
    about = "Exact, dynamic and distributed task assignment for vehicle fleets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a static instance.
    Solve(SolveArgs),
    /// Exhaustive reference answer for a small instance.
    Oracle(OracleArgs),
    /// Run a distributed protocol over a topology.
    Simulate(SimulateArgs),
    /// Loss sweep of a distributed protocol on seeded instances.
    Sweep(SweepArgs),
    /// Run a policy over a multi-period scenario.
    RunScenario(RunScenarioArgs),
    /// Write a seeded random instance, scenario or topology.
    Generate(GenerateArgs),
    /// Check an instance file, or a scenario run against every model constraint.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Instance file (`.json` or the text format).
    #[arg(long)]
    pub instance: PathBuf,
    /// sum, bottleneck, fair, mindev, ksum:<k>, semi, apraq or sideconstrained.
    #[arg(long, default_value = "sum")]
    pub objective: String,
    /// Category demands for `semi`.
    #[arg(long)]
    pub demand: Option<PathBuf>,
    /// Resource blocks for `sideconstrained`.
    #[arg(long)]
    pub resources: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Hungarian,
    Auction,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "hungarian")]
    pub method: Method,
    /// Fixed auction epsilon; epsilon scaling when absent.
    #[arg(long, value_parser = rational)]
    pub epsilon: Option<Rational>,
    /// CSV sidecar: auction prices per round, or Hungarian duals.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// List every optimal candidate instead of the first.
    #[arg(long)]
    pub all_optima: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Dauction,
    Cbaa,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    #[arg(long)]
    pub instance: PathBuf,
    /// Topology document `{n, edges, loss, seed}`.
    #[arg(long)]
    pub topology: PathBuf,
    /// Auction epsilon; `1/(n+1)` when absent.
    #[arg(long, value_parser = rational)]
    pub epsilon: Option<Rational>,
    /// Round budget of a lossy run.
    #[arg(long, default_value_t = 1000)]
    pub max_rounds: usize,
    /// One JSON record per round.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TopologyArg {
    Complete,
    Ring,
    Line,
    Er,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "ring")]
    pub topology: TopologyArg,
    /// Edge probability of `er` topologies.
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    /// Comma-separated loss levels; 0, 0.1, ..., 0.9 when absent.
    #[arg(long, value_delimiter = ',', value_parser = rational)]
    pub levels: Option<Vec<Rational>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 400)]
    pub max_rounds: usize,
    #[arg(long, value_parser = rational)]
    pub epsilon: Option<Rational>,
    /// CSV path; stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// myopic, null, or a per-period variant: bottleneck, fair, mindev,
    /// ksum:<k>, semi, sideconstrained.
    #[arg(long, default_value = "myopic")]
    pub policy: String,
    /// Resource blocks over scenario agents and tasks, for `sideconstrained`.
    #[arg(long)]
    pub resources: Option<PathBuf>,
    /// Overrides the scenario's mode.
    #[arg(long)]
    pub mode: Option<Mode>,
}

#[derive(Debug, Args)]
pub struct RunScenarioArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[command(flatten)]
    pub policy: PolicyArgs,
    /// Per-period CSV sidecar.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Include the clairvoyant optimum and the regret.
    #[arg(long)]
    pub clairvoyant: bool,
    /// Also run the other mode and report the gap.
    #[arg(long)]
    pub compare_modes: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: GenerateKind,
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    Instance {
        #[arg(long)]
        agents: usize,
        /// Defaults to `agents`.
        #[arg(long)]
        tasks: Option<usize>,
        #[arg(long, default_value_t = 0)]
        lo: i64,
        #[arg(long, default_value_t = 100)]
        hi: i64,
        #[arg(long, default_value = "min")]
        sense: Sense,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `.json` writes the structured form.
        #[arg(long)]
        out: PathBuf,
    },
    Scenario {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        tasks: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        lo: i64,
        #[arg(long, default_value_t = 10)]
        hi: i64,
        #[arg(long, default_value = "max")]
        sense: Sense,
        #[arg(long, default_value = "commit")]
        mode: Mode,
        /// Largest ETA; with `--max-duration` makes the fleet renewable.
        #[arg(long, requires = "max_duration")]
        max_eta: Option<usize>,
        #[arg(long, requires = "max_eta")]
        max_duration: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Topology {
        #[arg(long, value_enum)]
        kind: TopologyArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, value_parser = rational, default_value = "0")]
        loss: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

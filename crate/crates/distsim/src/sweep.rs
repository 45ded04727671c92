//! Loss sweeps: the same seeded instances and topologies run at each loss
//! level, summarized into one row per level.

use fleetassign_model::generate::{random_instance, InstanceParams};
use fleetassign_model::rational::{format_rational, to_f64};
use fleetassign_model::{ratio, Rational, RationalValue, Sense};
use serde::Serialize;

use crate::error::DistError;
use crate::lossy::{run_lossy, LossyOutcome, Protocol};
use crate::topology::NetworkTopology;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopologyKind {
    Complete,
    Ring,
    Line,
    ErdosRenyi(f64),
}

impl TopologyKind {
    pub fn build(self, n: usize, seed: u64) -> Result<NetworkTopology, DistError> {
        Ok(match self {
            TopologyKind::Complete => NetworkTopology::complete(n),
            TopologyKind::Ring => NetworkTopology::ring(n),
            TopologyKind::Line => NetworkTopology::line(n),
            TopologyKind::ErdosRenyi(p) => NetworkTopology::erdos_renyi(n, p, seed)?,
        }
        .with_seed(seed))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub protocol: Protocol,
    pub n: usize,
    pub topology: TopologyKind,
    pub instances: usize,
    pub levels: Vec<Rational>,
    pub seed: u64,
    pub max_rounds: usize,
    pub lo: i64,
    pub hi: i64,
}

impl SweepConfig {
    /// Loss levels 0, 0.1, ..., 0.9 over profit weights in `[0, 20]`.
    pub fn new(protocol: Protocol, n: usize, topology: TopologyKind, instances: usize, seed: u64) -> Self {
        Self {
            protocol,
            n,
            topology,
            instances,
            levels: (0..10).map(|k| ratio(k, 10)).collect(),
            seed,
            max_rounds: 400,
            lo: 0,
            hi: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub loss: RationalValue,
    pub runs: usize,
    pub non_converged: usize,
    pub nonconvergence_rate: f64,
    /// Mean over runs that have a ratio.
    pub mean_value_ratio: Option<f64>,
    pub mean_conflicts: f64,
    pub mean_rounds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub protocol: String,
    pub n: usize,
    pub instances: usize,
    pub seed: u64,
    pub max_rounds: usize,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("loss,runs,non_converged,nonconvergence_rate,mean_value_ratio,mean_conflicts,mean_rounds\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{:.6},{},{:.6},{:.6}\n",
                format_rational(&p.loss.0),
                p.runs,
                p.non_converged,
                p.nonconvergence_rate,
                p.mean_value_ratio.map_or(String::new(), |r| format!("{r:.6}")),
                p.mean_conflicts,
                p.mean_rounds
            ));
        }
        out
    }
}

/// Seed of the drop stream for one run, distinct per level and instance.
fn run_seed(base: u64, level: usize, instance: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((level as u64) << 32)
        .wrapping_add(instance as u64)
}

pub fn loss_sweep(config: &SweepConfig) -> Result<SweepReport, DistError> {
    let params = InstanceParams {
        sense: Sense::MaximizeProfit,
        ..InstanceParams::square(config.n, config.lo, config.hi)
    };
    let instances = (0..config.instances)
        .map(|k| random_instance(&params, config.seed.wrapping_add(k as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut points = Vec::with_capacity(config.levels.len());
    for (level, &loss) in config.levels.iter().enumerate() {
        let mut outcomes: Vec<LossyOutcome> = Vec::with_capacity(instances.len());
        for (k, instance) in instances.iter().enumerate() {
            let topology = config
                .topology
                .build(config.n, config.seed.wrapping_add(k as u64))?
                .with_loss(loss)?
                .with_seed(run_seed(config.seed, level, k));
            outcomes.push(run_lossy(config.protocol, instance, &topology, config.max_rounds)?);
        }
        let runs = outcomes.len();
        let mean = |f: &dyn Fn(&LossyOutcome) -> f64| outcomes.iter().map(f).sum::<f64>() / runs.max(1) as f64;
        let ratios: Vec<f64> = outcomes
            .iter()
            .filter_map(|o| o.value_ratio.map(|r| to_f64(&r.0)))
            .collect();
        let non_converged = outcomes.iter().filter(|o| !o.converged).count();
        points.push(SweepPoint {
            loss: RationalValue(loss),
            runs,
            non_converged,
            nonconvergence_rate: non_converged as f64 / runs.max(1) as f64,
            mean_value_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
            mean_conflicts: mean(&|o| o.conflicts_open as f64),
            mean_rounds: mean(&|o| o.rounds as f64),
        });
    }
    Ok(SweepReport {
        protocol: config.protocol.to_string(),
        n: config.n,
        instances: config.instances,
        seed: config.seed,
        max_rounds: config.max_rounds,
        points,
    })
}

//! Message-passing simulation of decentralized assignment: a seeded
//! synchronous round scheduler over an undirected topology, the distributed
//! auction with local price tables, the consensus-based auction and its
//! sequential greedy reference, and a harness for lossy links.

pub mod auction;
pub mod cbaa;
pub mod error;
pub mod lossy;
pub mod sim;
pub mod sweep;
pub mod topology;

pub use auction::{auction_nodes, run_distributed_auction, AuctionNode, DistributedAuctionRun};
pub use cbaa::{cbaa_nodes, greedy_sequential, run_cbaa, CbaaNode, CbaaRun};
pub use error::DistError;
pub use lossy::{run_lossy, LossyOutcome, Protocol};
pub use sim::{contested_tasks, logs_to_jsonl, ProtocolNode, RoundLog, SimRun, Simulator};
pub use sweep::{loss_sweep, SweepConfig, SweepPoint, SweepReport, TopologyKind};
pub use topology::{emit_topology_json, parse_topology_json, NetworkTopology};

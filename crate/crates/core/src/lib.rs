//! Exact centralized solvers: the Hungarian method and the forward auction
//! for the classic LAP, plus solvers for the bottleneck, fair, minimum
//! deviation, k-sum, semi-assignment, qualification and side-constrained
//! variants.

pub mod apraq;
pub mod auction;
pub mod bipartite;
pub mod deviation;
pub mod error;
pub mod hungarian;
pub mod ksum;
pub mod scaled;
pub mod semi;
pub mod side;
pub mod threshold;

pub use apraq::{solve_apraq, ApraqSolution};
pub use auction::{
    detect_naive_auction_cycle, epsilon_schedule, solve_auction, solve_auction_scaled, solve_auction_with,
    AuctionConfig, AuctionSolution, AuctionTrace, NaiveAuctionOutcome,
};
pub use bipartite::{max_cardinality_matching, BipartiteGraph};
pub use deviation::{solve_min_deviation, DeviationSolution};
pub use error::{SolveError, SolveResult};
pub use hungarian::{solve_hungarian, HungarianSolution};
pub use ksum::{solve_k_sum, KSumSolution};
pub use scaled::IntCosts;
pub use semi::{solve_semi_assignment, SemiAssignment};
pub use side::{side_constraint_bound, solve_with_side_constraints, SideConstrainedSolution};
pub use threshold::{solve_bottleneck, solve_fair_matching, FairSolution, ThresholdResult};

use std::time::Instant;

use fleetassign_core::{solve_auction_scaled, solve_hungarian};
use fleetassign_model::generate::{random_instance, InstanceParams};

#[test]
#[ignore = "large instance; run with --ignored"]
fn thousand_by_thousand() {
    let inst = random_instance(&InstanceParams::square(1000, 0, 1000), 2024).unwrap();
    let start = Instant::now();
    let hungarian = solve_hungarian(&inst).unwrap();
    println!("hungarian {:?} value {}", start.elapsed(), hungarian.value);
    let start = Instant::now();
    let auction = solve_auction_scaled(&inst).unwrap();
    println!("auction {:?} rounds {}", start.elapsed(), auction.trace.rounds);
    assert_eq!(hungarian.value, auction.value);
}

//! Seeded random instances. The same parameters and seed always produce the
//! same instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{Resource, SideConstraintSet};
use crate::error::ModelError;
use crate::instance::{AssignmentInstance, Sense};
use crate::rational::int;

pub const MAX_DIMENSION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceParams {
    pub n_agents: usize,
    pub n_tasks: usize,
    pub lo: i64,
    pub hi: i64,
    pub sense: Sense,
}

impl InstanceParams {
    pub fn square(n: usize, lo: i64, hi: i64) -> Self {
        Self {
            n_agents: n,
            n_tasks: n,
            lo,
            hi,
            sense: Sense::MinimizeCost,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.n_agents == 0 || self.n_tasks == 0 || self.n_agents > MAX_DIMENSION || self.n_tasks > MAX_DIMENSION {
            return Err(ModelError::InvalidValue(format!(
                "dimensions must lie in 1..={MAX_DIMENSION}, got {}x{}",
                self.n_agents, self.n_tasks
            )));
        }
        if self.lo > self.hi {
            return Err(ModelError::InvalidValue(format!(
                "empty weight range [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer weights in `[lo, hi]`.
pub fn random_instance(params: &InstanceParams, seed: u64) -> Result<AssignmentInstance, ModelError> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let weights = (0..params.n_agents * params.n_tasks)
        .map(|_| int(rng.gen_range(params.lo..=params.hi)))
        .collect();
    AssignmentInstance::from_flat(params.n_agents, params.n_tasks, weights, params.sense)
}

/// Random qualification mask where each pair is qualified with probability `density`.
pub fn random_qualification(n_agents: usize, n_tasks: usize, density: f64, seed: u64) -> Vec<Vec<bool>> {
    let mut rng = rng_from_seed(seed);
    (0..n_agents)
        .map(|_| (0..n_tasks).map(|_| rng.gen_bool(density.clamp(0.0, 1.0))).collect())
        .collect()
}

/// `count` resources with uniform usages in `[0, max_usage]`. Each budget is
/// drawn between the sum of row minima and the sum of row maxima.
pub fn random_resources(n_agents: usize, n_tasks: usize, count: usize, max_usage: i64, seed: u64) -> SideConstraintSet {
    let mut rng = rng_from_seed(seed);
    let resources = (0..count)
        .map(|_| {
            let usage: Vec<Vec<i64>> = (0..n_agents)
                .map(|_| (0..n_tasks).map(|_| rng.gen_range(0..=max_usage)).collect())
                .collect();
            let low: i64 = usage.iter().map(|r| *r.iter().min().unwrap_or(&0)).sum();
            let high: i64 = usage.iter().map(|r| *r.iter().max().unwrap_or(&0)).sum();
            let budget = rng.gen_range(low..=high.max(low));
            Resource::new(
                usage.into_iter().map(|r| r.into_iter().map(int).collect()).collect(),
                int(budget),
            )
            .expect("nonnegative budget")
        })
        .collect();
    SideConstraintSet::new(resources)
}

/// Random composition of `n` into `m` positive parts.
pub fn random_demand(n: usize, m: usize, seed: u64) -> Result<Vec<usize>, ModelError> {
    if m == 0 || m > n {
        return Err(ModelError::InvalidValue(format!(
            "cannot split {n} agents into {m} categories"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut demand = vec![1; m];
    for _ in m..n {
        demand[rng.gen_range(0..m)] += 1;
    }
    Ok(demand)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let p = InstanceParams::square(5, 0, 20);
        assert_eq!(random_instance(&p, 7).unwrap(), random_instance(&p, 7).unwrap());
        assert_ne!(random_instance(&p, 7).unwrap(), random_instance(&p, 8).unwrap());
    }

    #[test]
    fn respects_range() {
        let p = InstanceParams::square(6, -3, 3);
        let inst = random_instance(&p, 1).unwrap();
        assert!(inst.weights().iter().all(|w| *w >= int(-3) && *w <= int(3)));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(random_instance(&InstanceParams::square(0, 0, 1), 0).is_err());
        assert!(random_instance(&InstanceParams::square(2, 5, 1), 0).is_err());
        assert!(random_instance(&InstanceParams::square(MAX_DIMENSION + 1, 0, 1), 0).is_err());
    }

    #[test]
    fn demand_is_a_composition() {
        let d = random_demand(6, 3, 4).unwrap();
        assert_eq!(d.iter().sum::<usize>(), 6);
        assert!(d.iter().all(|&x| x >= 1));
        assert!(random_demand(2, 3, 0).is_err());
    }
}

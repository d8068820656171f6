//! Seeded random instances.
//!
//! The stream is pinned: `ChaCha8Rng::seed_from_u64(seed)`, then for agents
//! `1..=n` in order, the other agents in ascending id order are shuffled with
//! `rand` 0.8's `SliceRandom::shuffle` (Fisher-Yates, drawing from the end).
//! Capacities do not consume randomness, so the same `(n, seed)` gives the
//! same preference profile under every capacity function.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::instance::{InstanceError, SfInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapSpec {
    Uniform(u32),
    PerAgent(Vec<u32>),
}

impl CapSpec {
    pub fn resolve(&self, n: usize) -> Vec<u32> {
        match self {
            CapSpec::Uniform(c) => vec![*c; n],
            CapSpec::PerAgent(v) => v.clone(),
        }
    }
}

pub fn random_prefs(n: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut l: Vec<u32> = (0..n as u32).filter(|&j| j as usize != i).collect();
            l.shuffle(&mut rng);
            l
        })
        .collect()
}

pub fn random_instance(n: usize, caps: &CapSpec, seed: u64) -> Result<SfInstance, InstanceError> {
    if n < 2 {
        return Err(InstanceError::Empty);
    }
    SfInstance::new(random_prefs(n, seed), caps.resolve(n))
}

//! Capacity repair: turn each odd cycle of length at least 3 into
//! transpositions by moving one agent's capacity by one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gsp::{validate_gsp1, validate_matching, Gsp1, Matching};
use crate::instance::{AgentId, InstanceError, SfInstance};
use crate::violation::Violation;

/// Which capacity change to use on odd cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// +1 on even-numbered odd cycles, -1 on the rest.
    #[default]
    Alternate,
    IncreaseOnly,
    DecreaseOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modification {
    pub agent: AgentId,
    /// +1 or -1.
    pub delta: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairResult {
    pub new_caps: Vec<u32>,
    pub matching: Matching,
    /// In the order the odd cycles were processed.
    pub modified: Vec<Modification>,
}

impl RepairResult {
    /// Sum of `c' - c`.
    pub fn net_change(&self) -> i64 {
        self.modified.iter().map(|m| m.delta as i64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error("input is not a GSP of the instance: {0}")]
    NotGsp(Violation),
    #[error("agent {agent} already has capacity {cap}, the maximum")]
    CapacityAtMaximum { agent: AgentId, cap: u32 },
    #[error("repaired capacities rejected: {0}")]
    Instance(#[from] InstanceError),
    #[error("repaired matching is not stable: {0}")]
    Unstable(Violation),
}

pub fn near_feasible(inst: &SfInstance, g: &Gsp1) -> Result<RepairResult, RepairError> {
    near_feasible_directed(inst, g, Direction::Alternate)
}

pub fn near_feasible_directed(inst: &SfInstance, g: &Gsp1, direction: Direction) -> Result<RepairResult, RepairError> {
    validate_gsp1(inst, g).map_err(RepairError::NotGsp)?;
    let n = inst.n();
    let mut caps = inst.caps().to_vec();
    let mut pairs = Vec::new();
    let mut modified = Vec::new();
    let mut odd_seen = 0usize;

    for c in g.cycles() {
        let m = c.len();
        if m == 2 || (m > 2 && m % 2 == 0) {
            pairs.extend(c.chunks(2).map(|p| (p[0], p[1])));
        } else if m > 2 {
            let increase = match direction {
                Direction::Alternate => odd_seen % 2 == 0,
                Direction::IncreaseOnly => true,
                Direction::DecreaseOnly => false,
            };
            odd_seen += 1;
            let head = c[0];
            let cap = &mut caps[head.index()];
            if increase {
                if *cap as usize >= n - 1 {
                    return Err(RepairError::CapacityAtMaximum { agent: head, cap: *cap });
                }
                *cap += 1;
                pairs.extend((0..m).step_by(2).map(|k| (c[k], c[(k + 1) % m])));
            } else {
                *cap -= 1;
                pairs.extend((1..m).step_by(2).map(|k| (c[k], c[k + 1])));
            }
            modified.push(Modification { agent: head, delta: if increase { 1 } else { -1 } });
        }
    }

    let matching = Matching::new(pairs);
    let repaired = inst.with_caps(caps.clone())?;
    validate_matching(&repaired, &matching).map_err(RepairError::Unstable)?;
    Ok(RepairResult { new_caps: caps, matching, modified })
}

use serde::Serialize;
use thiserror::Error;

use crate::instance::AgentId;

/// First failed condition found by a validator, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    #[error("agent {agent} does not exist")]
    UnknownAgent { agent: u32 },
    #[error("not a permutation: agent {agent} appears {count} times")]
    NotPermutation { agent: AgentId, count: usize },
    #[error("a cycle repeats agent {agent}")]
    RepeatedInCycle { agent: AgentId },
    #[error("agents {a} and {b} are adjacent but not mutually acceptable")]
    Unacceptable { a: AgentId, b: AgentId },
    #[error("cycle starting at {first} occurs more than once")]
    DuplicateCycle { first: AgentId },
    #[error("T1: agent {agent} prefers its predecessor to its successor")]
    T1 { agent: AgentId },
    #[error("T2: agents {a} and {b} block")]
    T2 { a: AgentId, b: AgentId },
    #[error("F1: agent {agent} prefers its predecessor to its successor in a cycle")]
    F1 { agent: AgentId },
    #[error("F2: agents {a} and {b} block")]
    F2 { a: AgentId, b: AgentId },
    #[error("F3: agent {agent} lies in {found} cycles, capacity {capacity}")]
    F3 { agent: AgentId, found: usize, capacity: u32 },
    #[error("F4: agents {a} and {b} are adjacent {count} times")]
    F4 { a: AgentId, b: AgentId, count: usize },
    #[error("G1: no dominating bijection from P({agent}) to S({agent})")]
    G1 { agent: AgentId },
    #[error("G2: agents {a} and {b} block")]
    G2 { a: AgentId, b: AgentId },
    #[error("G3: agent {agent} has |P| = {pred}, |S| = {succ}, capacity {capacity}")]
    G3 { agent: AgentId, pred: usize, succ: usize, capacity: u32 },
    #[error("G4: {a} in P({b}) and {b} in S({a}) disagree")]
    G4 { a: AgentId, b: AgentId },
    #[error("agent {agent} holds dummy {index} beyond its capacity or unpaired")]
    BadDummy { agent: AgentId, index: u32 },
    #[error("pair {a},{b} is listed more than once")]
    DuplicatePair { a: AgentId, b: AgentId },
    #[error("agent {agent} is paired with itself")]
    SelfPair { agent: AgentId },
    #[error("agent {agent} carries {load_halves}/2, capacity {capacity}")]
    OverCapacity { agent: AgentId, load_halves: u32, capacity: u32 },
    #[error("edge {a},{b} has weight below 1 and no saturated endpoint")]
    UnstableEdge { a: AgentId, b: AgentId },
    #[error("successor chain through agent {agent} does not close into a cycle")]
    UntraceableCycle { agent: AgentId },
    #[error("agents {a} and {b} form a blocking pair")]
    BlockingPair { a: AgentId, b: AgentId },
}

pub(crate) fn id(i: usize) -> AgentId {
    AgentId::from_index(i)
}

//! Brute-force ground truth for small instances.
//!
//! Stability is re-implemented here from the definitions, independently of
//! the validators in [`crate::gsp`], so the two can be cross-checked.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gsp::{HalfMatching, Matching};
use crate::instance::SfInstance;
use crate::sr::SrPartition;
use crate::violation::id;

/// Hard size guards. Raise them on faster machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_edges_matchings: usize,
    pub max_edges_half_matchings: usize,
    pub max_agents_partitions: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_edges_matchings: 21, max_edges_half_matchings: 10, max_agents_partitions: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what}: instance has {size}, the guard allows {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
}

fn guard(what: &'static str, size: usize, limit: usize) -> Result<(), OracleError> {
    if size > limit {
        return Err(OracleError::TooLarge { what, size, limit });
    }
    Ok(())
}

/// `w[i][j]` in half-units; does some endpoint have all its capacity on
/// partners at least as good as the other?
fn edge_is_covered(inst: &SfInstance, w: &[Vec<u32>], i: usize, j: usize) -> bool {
    let full_at = |a: usize, b: usize| {
        let r = inst.rank(a, b);
        let held: u32 = inst.prefs(a).iter().filter(|&&k| inst.rank(a, k as usize) <= r).map(|&k| w[a][k as usize]).sum();
        held == 2 * inst.cap(a)
    };
    full_at(i, j) || full_at(j, i)
}

fn stable_weights(inst: &SfInstance, edges: &[(usize, usize)], w: &[Vec<u32>]) -> bool {
    edges.iter().all(|&(i, j)| w[i][j] == 2 || edge_is_covered(inst, w, i, j))
}

/// Every capacity-feasible edge subset without a blocking pair.
pub fn enumerate_stable_matchings(inst: &SfInstance, limits: &OracleLimits) -> Result<Vec<Matching>, OracleError> {
    let edges: Vec<(usize, usize)> = inst.pairs().collect();
    guard("edges for matching enumeration", edges.len(), limits.max_edges_matchings)?;
    let n = inst.n();
    let mut deg = vec![0u32; n];
    let mut chosen = vec![false; edges.len()];
    let mut out = Vec::new();

    fn rec(
        inst: &SfInstance,
        edges: &[(usize, usize)],
        k: usize,
        deg: &mut [u32],
        chosen: &mut [bool],
        out: &mut Vec<Matching>,
    ) {
        if k == edges.len() {
            let m: Vec<(usize, usize)> = edges.iter().zip(chosen.iter()).filter(|(_, &c)| c).map(|(e, _)| *e).collect();
            if no_blocking_pair(inst, edges, &m) {
                out.push(Matching::new(m.iter().map(|&(i, j)| (id(i), id(j)))));
            }
            return;
        }
        let (i, j) = edges[k];
        rec(inst, edges, k + 1, deg, chosen, out);
        if deg[i] < inst.cap(i) && deg[j] < inst.cap(j) {
            deg[i] += 1;
            deg[j] += 1;
            chosen[k] = true;
            rec(inst, edges, k + 1, deg, chosen, out);
            chosen[k] = false;
            deg[i] -= 1;
            deg[j] -= 1;
        }
    }
    rec(inst, &edges, 0, &mut deg, &mut chosen, &mut out);
    out.sort_by(|a, b| a.pairs.cmp(&b.pairs));
    Ok(out)
}

fn no_blocking_pair(inst: &SfInstance, edges: &[(usize, usize)], m: &[(usize, usize)]) -> bool {
    let n = inst.n();
    let mut partners: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in m {
        partners[i].push(j);
        partners[j].push(i);
    }
    let would_take = |i: usize, j: usize| {
        (partners[i].len() as u32) < inst.cap(i) || partners[i].iter().any(|&k| inst.prefers(i, j, k))
    };
    edges
        .iter()
        .all(|&(i, j)| partners[i].contains(&j) || !(would_take(i, j) && would_take(j, i)))
}

/// Every capacity-feasible weight function in {0, 1/2, 1} that is stable.
pub fn enumerate_stable_half_matchings(
    inst: &SfInstance,
    limits: &OracleLimits,
) -> Result<Vec<HalfMatching>, OracleError> {
    let edges: Vec<(usize, usize)> = inst.pairs().collect();
    guard("edges for half-matching enumeration", edges.len(), limits.max_edges_half_matchings)?;
    let n = inst.n();
    let mut w = vec![vec![0u32; n]; n];
    let mut load = vec![0u32; n];
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        inst: &SfInstance,
        edges: &[(usize, usize)],
        k: usize,
        w: &mut Vec<Vec<u32>>,
        load: &mut [u32],
        out: &mut Vec<HalfMatching>,
    ) {
        if k == edges.len() {
            if stable_weights(inst, edges, w) {
                let pick = |v: u32| {
                    edges.iter().filter(|&&(i, j)| w[i][j] == v).map(|&(i, j)| (id(i), id(j))).collect::<Vec<_>>()
                };
                out.push(HalfMatching::new(pick(1), pick(2)));
            }
            return;
        }
        let (i, j) = edges[k];
        for v in 0..=2 {
            if load[i] + v > 2 * inst.cap(i) || load[j] + v > 2 * inst.cap(j) {
                break;
            }
            w[i][j] = v;
            w[j][i] = v;
            load[i] += v;
            load[j] += v;
            rec(inst, edges, k + 1, w, load, out);
            load[i] -= v;
            load[j] -= v;
        }
        w[i][j] = 0;
        w[j][i] = 0;
    }
    rec(inst, &edges, 0, &mut w, &mut load, &mut out);
    out.sort_by(|a, b| (&a.half, &a.full).cmp(&(&b.half, &b.full)));
    Ok(out)
}

/// Every permutation satisfying T1 and T2 (capacities read as 1).
pub fn brute_stable_partition_sr(inst: &SfInstance, limits: &OracleLimits) -> Result<Vec<SrPartition>, OracleError> {
    let n = inst.n();
    guard("agents for partition enumeration", n, limits.max_agents_partitions)?;
    let mut succ = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut out = Vec::new();

    fn rec(inst: &SfInstance, i: usize, succ: &mut [usize], used: &mut [bool], out: &mut Vec<SrPartition>) {
        let n = succ.len();
        if i == n {
            let mut pred = vec![0; n];
            for (a, &s) in succ.iter().enumerate() {
                pred[s] = a;
            }
            // T1 for every agent, then no pair preferring each other to their predecessors.
            let t1 = (0..n).all(|a| inst.rank(a, succ[a]) <= inst.rank(a, pred[a]));
            let t2 = (0..n).all(|a| {
                (a + 1..n).all(|b| {
                    !(inst.acceptable(a, b) && inst.prefers(a, b, pred[a]) && inst.prefers(b, a, pred[b]))
                })
            });
            if t1 && t2 {
                let s: Vec<u32> = succ.iter().map(|&x| x as u32).collect();
                out.push(SrPartition::from_successors(&s).expect("permutation"));
            }
            return;
        }
        for j in 0..n {
            if !used[j] && (j == i || inst.acceptable(i, j)) {
                used[j] = true;
                succ[i] = j;
                rec(inst, i + 1, succ, used, out);
                used[j] = false;
            }
        }
    }
    rec(inst, 0, &mut succ, &mut used, &mut out);
    out.sort_by(|a, b| a.cycles().cmp(b.cycles()));
    Ok(out)
}

/// Rank-weighted cost in half-units: each agent pays the rank of each
/// partner times the weight it holds.
pub fn egalitarian_cost_halves(inst: &SfInstance, hm: &HalfMatching) -> u64 {
    hm.half
        .iter()
        .map(|p| (p, 1u64))
        .chain(hm.full.iter().map(|p| (p, 2u64)))
        .map(|(&(a, b), w)| w * (inst.rank(a.index(), b.index()) + inst.rank(b.index(), a.index())) as u64)
        .sum()
}

/// Worst rank any agent assigns to a partner with positive weight (0 if none).
pub fn regret(inst: &SfInstance, hm: &HalfMatching) -> u32 {
    hm.half
        .iter()
        .chain(&hm.full)
        .map(|&(a, b)| inst.rank(a.index(), b.index()).max(inst.rank(b.index(), a.index())))
        .max()
        .unwrap_or(0)
}

fn allocation(n: usize, hm: &HalfMatching) -> Vec<u32> {
    let mut v = vec![0; n];
    for (&(a, b), w) in hm.half.iter().map(|p| (p, 1)).chain(hm.full.iter().map(|p| (p, 2))) {
        v[a.index()] += w;
        v[b.index()] += w;
    }
    v
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReport {
    pub stable_matchings: Vec<Matching>,
    pub stable_half_matchings: Vec<HalfMatching>,
    pub solvable: bool,
    /// Distinct allocation vectors, in half-units.
    pub allocation_vectors: Vec<Vec<u32>>,
    pub min_egalitarian_cost_halves: Option<u64>,
    pub min_regret: Option<u32>,
}

pub fn oracle_report(inst: &SfInstance, limits: &OracleLimits) -> Result<OracleReport, OracleError> {
    let stable_matchings = enumerate_stable_matchings(inst, limits)?;
    let stable_half_matchings = enumerate_stable_half_matchings(inst, limits)?;
    let allocation_vectors: BTreeSet<Vec<u32>> =
        stable_half_matchings.iter().map(|hm| allocation(inst.n(), hm)).collect();
    Ok(OracleReport {
        solvable: !stable_matchings.is_empty(),
        allocation_vectors: allocation_vectors.into_iter().collect(),
        min_egalitarian_cost_halves: stable_half_matchings.iter().map(|hm| egalitarian_cost_halves(inst, hm)).min(),
        min_regret: stable_half_matchings.iter().map(|hm| regret(inst, hm)).min(),
        stable_matchings,
        stable_half_matchings,
    })
}

//! Stable partitions of Stable Roommates instances.

mod tan;

use serde::{Deserialize, Serialize};

use crate::cycles::{cycles_of_permutation, format_cycles};
use crate::instance::{AgentId, SfInstance};
use crate::violation::{id, Violation};

/// A permutation of the agents, kept as canonical cycles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SrPartition {
    cycles: Vec<Vec<AgentId>>,
}

impl SrPartition {
    /// From a successor array. Fails if `succ` is not a permutation.
    pub fn from_successors(succ: &[u32]) -> Result<Self, Violation> {
        let n = succ.len();
        let mut count = vec![0usize; n];
        for &s in succ {
            let s = s as usize;
            if s >= n {
                return Err(Violation::UnknownAgent { agent: s as u32 + 1 });
            }
            count[s] += 1;
        }
        if let Some(a) = count.iter().position(|&c| c != 1) {
            return Err(Violation::NotPermutation { agent: id(a), count: count[a] });
        }
        Ok(SrPartition { cycles: cycles_of_permutation(succ) })
    }

    /// From cycles in any rotation/order. Fails unless every agent `0..n` appears once.
    pub fn from_cycles(n: usize, cycles: Vec<Vec<AgentId>>) -> Result<Self, Violation> {
        let mut succ = vec![u32::MAX; n];
        for c in &cycles {
            for (k, a) in c.iter().enumerate() {
                if a.index() >= n {
                    return Err(Violation::UnknownAgent { agent: a.label() });
                }
                if succ[a.index()] != u32::MAX {
                    return Err(Violation::NotPermutation { agent: *a, count: 2 });
                }
                succ[a.index()] = c[(k + 1) % c.len()].index() as u32;
            }
        }
        if let Some(a) = succ.iter().position(|&s| s == u32::MAX) {
            return Err(Violation::NotPermutation { agent: id(a), count: 0 });
        }
        Self::from_successors(&succ)
    }

    pub fn cycles(&self) -> &[Vec<AgentId>] {
        &self.cycles
    }

    pub fn agent_count(&self) -> usize {
        self.cycles.iter().map(Vec::len).sum()
    }

    pub fn successors(&self) -> Vec<u32> {
        let mut succ = vec![0; self.agent_count()];
        for c in &self.cycles {
            for (k, a) in c.iter().enumerate() {
                succ[a.index()] = c[(k + 1) % c.len()].index() as u32;
            }
        }
        succ
    }

    pub fn predecessors(&self) -> Vec<u32> {
        let succ = self.successors();
        let mut pred = vec![0; succ.len()];
        for (i, &s) in succ.iter().enumerate() {
            pred[s as usize] = i as u32;
        }
        pred
    }

    /// Cycles of odd length at least 3.
    pub fn odd_cycles(&self) -> Vec<Vec<AgentId>> {
        self.cycles.iter().filter(|c| c.len() >= 3 && c.len() % 2 == 1).cloned().collect()
    }

    pub fn to_text(&self) -> String {
        format_cycles(&self.cycles)
    }
}

/// Stable partition of an SR instance given as mutually consistent
/// acceptability lists (0-based, best first).
///
/// Runs in O(m n) for `m` list entries.
pub fn stable_partition_lists(lists: &[Vec<u32>]) -> SrPartition {
    let succ = tan::solve(lists);
    SrPartition::from_successors(&succ).expect("solver output is a permutation")
}

/// Stable partition of `inst`, reading every capacity as 1.
pub fn stable_partition_sr(inst: &SfInstance) -> SrPartition {
    stable_partition_lists(inst.all_prefs())
}

/// Checks T1 and T2, reading every capacity as 1.
pub fn verify_stable_partition(inst: &SfInstance, part: &SrPartition) -> Result<(), Violation> {
    let n = inst.n();
    if part.agent_count() != n {
        return Err(Violation::NotPermutation { agent: id(n.min(part.agent_count())), count: 0 });
    }
    for c in part.cycles() {
        if let Some(a) = c.iter().find(|a| a.index() >= n) {
            return Err(Violation::UnknownAgent { agent: a.label() });
        }
    }
    let succ = part.successors();
    let pred = part.predecessors();
    for i in 0..n {
        let s = succ[i] as usize;
        if s != i && !inst.acceptable(i, s) {
            return Err(Violation::Unacceptable { a: id(i), b: id(s) });
        }
    }
    for i in 0..n {
        if inst.rank(i, succ[i] as usize) > inst.rank(i, pred[i] as usize) {
            return Err(Violation::T1 { agent: id(i) });
        }
    }
    for (i, j) in inst.pairs() {
        if inst.prefers(i, j, pred[i] as usize) && inst.prefers(j, i, pred[j] as usize) {
            return Err(Violation::T2 { a: id(i), b: id(j) });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::from_labels;

    fn table1() -> SfInstance {
        from_labels(
            &[&[2, 5, 3, 4, 6], &[5, 3, 1, 6, 4], &[4, 2, 6, 1, 5], &[1, 2, 5, 3, 6], &[6, 2, 1, 4, 3], &[5, 3, 2, 4, 1]],
            &[1; 6],
        )
        .unwrap()
    }

    fn table2() -> SfInstance {
        from_labels(
            &[&[2, 5, 3, 4, 6], &[4, 3, 1, 6, 5], &[5, 4, 1, 2, 6], &[1, 5, 6, 2, 3], &[6, 2, 4, 1, 3], &[1, 2, 3, 4, 5]],
            &[1; 6],
        )
        .unwrap()
    }

    #[test]
    fn table1_partition() {
        let p = stable_partition_sr(&table1());
        assert_eq!(p.to_text(), "( 1 2 )\n( 3 4 )\n( 5 6 )\n");
        verify_stable_partition(&table1(), &p).unwrap();
    }

    #[test]
    fn table2_partition() {
        let p = stable_partition_sr(&table2());
        assert_eq!(p.to_text(), "( 1 2 3 )\n( 4 5 6 )\n");
        assert_eq!(p.odd_cycles().len(), 2);
    }

    #[test]
    fn identity_is_blocked_by_top_pair() {
        let part = SrPartition::from_successors(&[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(
            verify_stable_partition(&table1(), &part),
            Err(Violation::T2 { a: id(0), b: id(1) })
        );
    }

    #[test]
    fn fixed_point_a3_is_rejected_on_table2() {
        let l = |v: &[u32]| v.iter().map(|&x| AgentId::from_label(x).unwrap()).collect::<Vec<_>>();
        let part = SrPartition::from_cycles(6, vec![l(&[1, 2]), l(&[3]), l(&[4, 5, 6])]).unwrap();
        assert!(verify_stable_partition(&table2(), &part).is_err());
    }

    #[test]
    fn two_agents() {
        let inst = from_labels(&[&[2], &[1]], &[1, 1]).unwrap();
        assert_eq!(stable_partition_sr(&inst).to_text(), "( 1 2 )\n");
    }

    #[test]
    fn non_permutation_rejected() {
        assert!(SrPartition::from_successors(&[1, 1]).is_err());
    }

    #[test]
    fn empty_lists_are_fixed_points() {
        let p = stable_partition_lists(&[vec![], vec![2], vec![1]]);
        assert_eq!(p.to_text(), "( 1 )\n( 2 3 )\n");
    }
}

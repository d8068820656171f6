//! Validators. Each returns the first violated condition with witnesses.

use std::collections::{BTreeSet, HashSet};

use super::{Gsp1, Gsp2, HalfMatching, Matching, Slot};
use crate::instance::{AgentId, SfInstance};
use crate::violation::{id, Violation};

fn check_agent(n: usize, a: usize) -> Result<(), Violation> {
    if a >= n {
        return Err(Violation::UnknownAgent { agent: a as u32 + 1 });
    }
    Ok(())
}

fn check_pair(inst: &SfInstance, i: usize, j: usize) -> Result<(), Violation> {
    check_agent(inst.n(), i)?;
    check_agent(inst.n(), j)?;
    if i == j {
        return Err(Violation::SelfPair { agent: id(i) });
    }
    if !inst.acceptable(i, j) {
        return Err(Violation::Unacceptable { a: id(i), b: id(j) });
    }
    Ok(())
}

/// Checks structure, then F3, F4, F1, F2.
pub fn validate_gsp1(inst: &SfInstance, g: &Gsp1) -> Result<(), Violation> {
    let n = inst.n();
    let mut seen_cycles = HashSet::new();
    for c in g.cycles() {
        let mut members = BTreeSet::new();
        for a in c {
            check_agent(n, a.index())?;
            if !members.insert(*a) {
                return Err(Violation::RepeatedInCycle { agent: *a });
            }
        }
        if c.len() >= 2 {
            for k in 0..c.len() {
                let (x, y) = (c[k].index(), c[(k + 1) % c.len()].index());
                if !inst.acceptable(x, y) {
                    return Err(Violation::Unacceptable { a: id(x), b: id(y) });
                }
            }
            if !seen_cycles.insert(c.clone()) {
                return Err(Violation::DuplicateCycle { first: c[0] });
            }
        }
    }

    let mut mult = vec![0usize; n];
    for c in g.cycles() {
        for a in c {
            mult[a.index()] += 1;
        }
    }
    for i in 0..n {
        if mult[i] != inst.cap(i) as usize {
            return Err(Violation::F3 { agent: id(i), found: mult[i], capacity: inst.cap(i) });
        }
    }

    let mut adj = vec![0usize; n * n];
    for c in g.cycles().iter().filter(|c| c.len() >= 2) {
        for k in 0..c.len() {
            let (x, y) = (c[k].index(), c[(k + 1) % c.len()].index());
            adj[x.min(y) * n + x.max(y)] += 1;
        }
    }
    for (i, j) in inst.pairs() {
        if adj[i * n + j] > 2 {
            return Err(Violation::F4 { a: id(i), b: id(j), count: adj[i * n + j] });
        }
    }

    let mut worst = vec![0u32; n];
    let mut transposed = vec![false; n * n];
    for c in g.cycles() {
        let m = c.len();
        for k in 0..m {
            let x = c[k].index();
            let succ = c[(k + 1) % m].index();
            let pred = c[(k + m - 1) % m].index();
            if inst.rank(x, succ) > inst.rank(x, pred) {
                return Err(Violation::F1 { agent: id(x) });
            }
            worst[x] = worst[x].max(inst.rank(x, pred));
        }
        if m == 2 {
            let (x, y) = (c[0].index(), c[1].index());
            transposed[x * n + y] = true;
            transposed[y * n + x] = true;
        }
    }
    for (i, j) in inst.pairs() {
        if !transposed[i * n + j] && inst.rank(i, j) < worst[i] && inst.rank(j, i) < worst[j] {
            return Err(Violation::F2 { a: id(i), b: id(j) });
        }
    }
    Ok(())
}

fn slot_rank(inst: &SfInstance, i: usize, s: Slot) -> u32 {
    match s {
        Slot::Agent(j) => inst.rank(i, j.index()),
        Slot::Dummy(k) => inst.n() as u32 + k,
    }
}

/// Checks structure, then G3, G1, G4, G2.
///
/// G1 uses the sorted-greedy test: the k-th best successor must be weakly
/// preferred to the k-th best predecessor for every k.
pub fn validate_gsp2(inst: &SfInstance, g: &Gsp2) -> Result<(), Violation> {
    let n = inst.n();
    if g.pred.len() != n || g.succ.len() != n {
        return Err(Violation::UnknownAgent { agent: g.pred.len().max(g.succ.len()) as u32 });
    }
    for i in 0..n {
        let mut dummies_p = Vec::new();
        let mut dummies_s = Vec::new();
        for (set, dummies) in [(&g.pred[i], &mut dummies_p), (&g.succ[i], &mut dummies_s)] {
            for &s in set {
                match s {
                    Slot::Agent(j) => check_pair(inst, i, j.index())?,
                    Slot::Dummy(k) => dummies.push(k),
                }
            }
        }
        let held = dummies_p.len() as u32;
        if let Some(&k) = dummies_p.iter().chain(&dummies_s).find(|&&k| k == 0 || k > held) {
            return Err(Violation::BadDummy { agent: id(i), index: k });
        }
        if dummies_p != dummies_s {
            let k = *dummies_p.iter().chain(&dummies_s).max().unwrap_or(&0);
            return Err(Violation::BadDummy { agent: id(i), index: k });
        }
    }

    for i in 0..n {
        let (p, s) = (g.pred[i].len(), g.succ[i].len());
        if p != inst.cap(i) as usize || s != inst.cap(i) as usize {
            return Err(Violation::G3 { agent: id(i), pred: p, succ: s, capacity: inst.cap(i) });
        }
    }

    for i in 0..n {
        let mut p: Vec<u32> = g.pred[i].iter().map(|&s| slot_rank(inst, i, s)).collect();
        let mut s: Vec<u32> = g.succ[i].iter().map(|&s| slot_rank(inst, i, s)).collect();
        p.sort_unstable();
        s.sort_unstable();
        if s.iter().zip(&p).any(|(rs, rp)| rs > rp) {
            return Err(Violation::G1 { agent: id(i) });
        }
    }

    for i in 0..n {
        for &x in &g.pred[i] {
            if let Slot::Agent(j) = x {
                if !g.succ[j.index()].contains(&Slot::Agent(id(i))) {
                    return Err(Violation::G4 { a: j, b: id(i) });
                }
            }
        }
        for &x in &g.succ[i] {
            if let Slot::Agent(j) = x {
                if !g.pred[j.index()].contains(&Slot::Agent(id(i))) {
                    return Err(Violation::G4 { a: id(i), b: j });
                }
            }
        }
    }

    let worst: Vec<u32> =
        (0..n).map(|i| g.pred[i].iter().map(|&s| slot_rank(inst, i, s)).max().unwrap_or(0)).collect();
    for (i, j) in inst.pairs() {
        let a = Slot::Agent(id(j));
        let full = g.pred[i].contains(&a) && g.succ[i].contains(&a);
        if !full && inst.rank(i, j) < worst[i] && inst.rank(j, i) < worst[j] {
            return Err(Violation::G2 { a: id(i), b: id(j) });
        }
    }
    Ok(())
}

/// Capacity, disjointness, and the saturation condition on every edge of
/// weight below 1.
pub fn validate_half_matching(inst: &SfInstance, hm: &HalfMatching) -> Result<(), Violation> {
    match unstable_edges(inst, hm)?.first() {
        Some(&(a, b)) => Err(Violation::UnstableEdge { a, b }),
        None => Ok(()),
    }
}

/// Every edge of weight below 1 with no saturated endpoint, in pair order.
/// Structural problems (capacity, duplicates) are returned as errors.
pub fn unstable_edges(inst: &SfInstance, hm: &HalfMatching) -> Result<Vec<(AgentId, AgentId)>, Violation> {
    let n = inst.n();
    let mut w = vec![0u32; n * n];
    for (&(a, b), weight) in hm.half.iter().map(|p| (p, 1)).chain(hm.full.iter().map(|p| (p, 2))) {
        let (i, j) = (a.index(), b.index());
        check_pair(inst, i, j)?;
        if w[i * n + j] != 0 {
            return Err(Violation::DuplicatePair { a, b });
        }
        w[i * n + j] = weight;
        w[j * n + i] = weight;
    }
    for i in 0..n {
        let load: u32 = (0..n).map(|j| w[i * n + j]).sum();
        if load > 2 * inst.cap(i) {
            return Err(Violation::OverCapacity { agent: id(i), load_halves: load, capacity: inst.cap(i) });
        }
    }
    // covered[i][j]: weight i holds on partners at least as good as j.
    let mut covered = vec![0u32; n * n];
    for i in 0..n {
        let mut acc = 0;
        for &j in inst.prefs(i) {
            acc += w[i * n + j as usize];
            covered[i * n + j as usize] = acc;
        }
    }
    Ok(inst
        .pairs()
        .filter(|&(i, j)| {
            w[i * n + j] < 2 && covered[i * n + j] != 2 * inst.cap(i) && covered[j * n + i] != 2 * inst.cap(j)
        })
        .map(|(i, j)| (id(i), id(j)))
        .collect())
}

/// Capacity and the absence of blocking pairs.
pub fn validate_matching(inst: &SfInstance, m: &Matching) -> Result<(), Violation> {
    let n = inst.n();
    let mut deg = vec![0u32; n];
    let mut worst = vec![0u32; n];
    let mut inside = vec![false; n * n];
    for &(a, b) in &m.pairs {
        let (i, j) = (a.index(), b.index());
        check_pair(inst, i, j)?;
        deg[i] += 1;
        deg[j] += 1;
        worst[i] = worst[i].max(inst.rank(i, j));
        worst[j] = worst[j].max(inst.rank(j, i));
        inside[i * n + j] = true;
        inside[j * n + i] = true;
    }
    for i in 0..n {
        if deg[i] > inst.cap(i) {
            return Err(Violation::OverCapacity { agent: id(i), load_halves: 2 * deg[i], capacity: inst.cap(i) });
        }
    }
    let wants = |i: usize, j: usize| deg[i] < inst.cap(i) || inst.rank(i, j) < worst[i];
    for (i, j) in inst.pairs() {
        if !inside[i * n + j] && wants(i, j) && wants(j, i) {
            return Err(Violation::BlockingPair { a: id(i), b: id(j) });
        }
    }
    Ok(())
}

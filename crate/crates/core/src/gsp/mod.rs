//! Generalised stable partitions in both forms, half-matchings, matchings,
//! and the conversions between them.

mod validate;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cycles::{canonicalize, format_cycles, parse_cycles};
use crate::instance::{AgentId, ParseError, SfInstance};
use crate::violation::{id, Violation};

pub use validate::{unstable_edges, validate_gsp1, validate_gsp2, validate_half_matching, validate_matching};

/// A multiset of cyclic permutations, one per "layer". Fixed points mark
/// unused capacity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gsp1 {
    cycles: Vec<Vec<AgentId>>,
}

impl Gsp1 {
    pub fn new(cycles: Vec<Vec<AgentId>>) -> Self {
        Gsp1 { cycles: canonicalize(cycles) }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Ok(Gsp1::new(parse_cycles(text)?))
    }

    /// Transpositions of `m` plus one fixed point per unit of free capacity.
    pub fn from_matching(inst: &SfInstance, m: &Matching) -> Self {
        let mut cycles: Vec<Vec<AgentId>> = m.pairs.iter().map(|&(a, b)| vec![a, b]).collect();
        let mut deg = vec![0u32; inst.n()];
        for &(a, b) in &m.pairs {
            deg[a.index()] += 1;
            deg[b.index()] += 1;
        }
        for i in 0..inst.n() {
            for _ in deg[i]..inst.cap(i) {
                cycles.push(vec![id(i)]);
            }
        }
        Gsp1::new(cycles)
    }

    pub fn cycles(&self) -> &[Vec<AgentId>] {
        &self.cycles
    }

    pub fn transpositions(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.cycles.iter().filter(|c| c.len() == 2).map(|c| (c[0], c[1]))
    }

    /// No even cycle longer than 2.
    pub fn is_reduced(&self) -> bool {
        !self.cycles.iter().any(|c| c.len() >= 4 && c.len() % 2 == 0)
    }

    pub fn to_text(&self) -> String {
        format_cycles(&self.cycles)
    }

    /// Drops fixed points and reads transpositions as a matching. `None` if
    /// longer cycles remain.
    pub fn to_matching(&self) -> Option<Matching> {
        if self.cycles.iter().any(|c| c.len() > 2) {
            return None;
        }
        Some(Matching::new(self.transpositions()))
    }
}

/// An entry of `P(a_i)` or `S(a_i)`: a real agent or the dummy `d_i^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Agent(AgentId),
    Dummy(u32),
}

/// Predecessor and successor set functions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gsp2 {
    pub pred: Vec<BTreeSet<Slot>>,
    pub succ: Vec<BTreeSet<Slot>>,
}

impl Gsp2 {
    pub fn empty(n: usize) -> Self {
        Gsp2 { pred: vec![BTreeSet::new(); n], succ: vec![BTreeSet::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.pred.len()
    }
}

fn norm(a: AgentId, b: AgentId) -> (AgentId, AgentId) {
    (a.min(b), a.max(b))
}

/// Edge weights in {0, 1/2, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct HalfMatching {
    pub half: BTreeSet<(AgentId, AgentId)>,
    pub full: BTreeSet<(AgentId, AgentId)>,
}

impl HalfMatching {
    pub fn new(
        half: impl IntoIterator<Item = (AgentId, AgentId)>,
        full: impl IntoIterator<Item = (AgentId, AgentId)>,
    ) -> Self {
        HalfMatching {
            half: half.into_iter().map(|(a, b)| norm(a, b)).collect(),
            full: full.into_iter().map(|(a, b)| norm(a, b)).collect(),
        }
    }

    /// From weights in half-units indexed by normalised pair; zero entries are skipped.
    pub fn from_halves(weights: impl IntoIterator<Item = ((AgentId, AgentId), u32)>) -> Result<Self, Violation> {
        let mut hm = HalfMatching::default();
        for ((a, b), w) in weights {
            match w {
                0 => {}
                1 => {
                    hm.half.insert(norm(a, b));
                }
                2 => {
                    hm.full.insert(norm(a, b));
                }
                k => return Err(Violation::F4 { a, b, count: k as usize }),
            }
        }
        Ok(hm)
    }

    /// Weight of `{a, b}` in half-units.
    pub fn weight_halves(&self, a: AgentId, b: AgentId) -> u32 {
        let p = norm(a, b);
        if self.full.contains(&p) {
            2
        } else if self.half.contains(&p) {
            1
        } else {
            0
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("HALF:\n");
        for (a, b) in &self.half {
            let _ = writeln!(out, "{a} {b}");
        }
        out.push_str("FULL:\n");
        for (a, b) in &self.full {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut hm = HalfMatching::default();
        let mut section: Option<bool> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            match l {
                "HALF:" => section = Some(true),
                "FULL:" => section = Some(false),
                _ => {
                    let bad = |msg: &str| ParseError::Malformed { line, msg: msg.to_string() };
                    let half = section.ok_or_else(|| bad("pair before HALF:/FULL: header"))?;
                    let ids: Vec<AgentId> = l
                        .split_whitespace()
                        .map(|t| t.parse::<u32>().ok().and_then(AgentId::from_label))
                        .collect::<Option<_>>()
                        .ok_or_else(|| bad("expected two 1-based agent ids"))?;
                    if ids.len() != 2 {
                        return Err(bad("expected two 1-based agent ids"));
                    }
                    let p = norm(ids[0], ids[1]);
                    if half { hm.half.insert(p) } else { hm.full.insert(p) };
                }
            }
        }
        Ok(hm)
    }
}

/// A set of unordered pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: BTreeSet<(AgentId, AgentId)>,
}

impl Matching {
    pub fn new(pairs: impl IntoIterator<Item = (AgentId, AgentId)>) -> Self {
        Matching { pairs: pairs.into_iter().map(|(a, b)| norm(a, b)).collect() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: AgentId, b: AgentId) -> bool {
        self.pairs.contains(&norm(a, b))
    }

    pub fn to_text(&self) -> String {
        self.pairs.iter().map(|(a, b)| format!("{a} {b}\n")).collect()
    }

    /// One pair of 1-based ids per line; blank and `#` lines are skipped.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut pairs = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let ids: Option<Vec<AgentId>> =
                l.split_whitespace().map(|t| t.parse::<u32>().ok().and_then(AgentId::from_label)).collect();
            match ids.as_deref() {
                Some(&[a, b]) => pairs.push((a, b)),
                _ => {
                    return Err(ParseError::Malformed { line: k + 1, msg: "expected two 1-based agent ids".into() })
                }
            }
        }
        Ok(Matching::new(pairs))
    }
}

/// Successor/predecessor sets of each cycle member; fixed points become the
/// owner's next dummy.
pub fn gsp2_from_gsp1(inst: &SfInstance, g: &Gsp1) -> Result<Gsp2, Violation> {
    validate_gsp1(inst, g)?;
    let mut out = Gsp2::empty(inst.n());
    let mut dummies = vec![0u32; inst.n()];
    for c in g.cycles() {
        let m = c.len();
        if m == 1 {
            let i = c[0].index();
            dummies[i] += 1;
            out.pred[i].insert(Slot::Dummy(dummies[i]));
            out.succ[i].insert(Slot::Dummy(dummies[i]));
            continue;
        }
        for k in 0..m {
            let x = c[k].index();
            out.succ[x].insert(Slot::Agent(c[(k + 1) % m]));
            out.pred[x].insert(Slot::Agent(c[(k + m - 1) % m]));
        }
    }
    validate_gsp2(inst, &out)?;
    Ok(out)
}

/// Transpositions and fixed points come from `P ∩ S`; the remaining
/// `S \ P` entries (at most one per agent) are chained into longer cycles.
pub fn gsp1_from_gsp2(inst: &SfInstance, g: &Gsp2) -> Result<Gsp1, Violation> {
    validate_gsp2(inst, g)?;
    let n = inst.n();
    let mut cycles = Vec::new();
    let mut next = vec![None; n];
    for i in 0..n {
        for &s in g.succ[i].intersection(&g.pred[i]) {
            match s {
                Slot::Dummy(_) => cycles.push(vec![id(i)]),
                Slot::Agent(j) if j.index() > i => cycles.push(vec![id(i), j]),
                Slot::Agent(_) => {}
            }
        }
        let mut rest = g.succ[i].difference(&g.pred[i]);
        if let Some(Slot::Agent(j)) = rest.next() {
            next[i] = Some(j.index());
        }
        if rest.next().is_some() {
            return Err(Violation::UntraceableCycle { agent: id(i) });
        }
    }
    let mut used = vec![false; n];
    for start in 0..n {
        if used[start] || next[start].is_none() {
            continue;
        }
        let mut c = Vec::new();
        let mut x = start;
        loop {
            used[x] = true;
            c.push(id(x));
            match next[x] {
                Some(y) if y == start => break,
                Some(y) if !used[y] => x = y,
                _ => return Err(Violation::UntraceableCycle { agent: id(x) }),
            }
        }
        cycles.push(c);
    }
    Ok(Gsp1::new(cycles))
}

/// Each predecessor-successor adjacency contributes 1/2.
pub fn half_matching_from_gsp1(g: &Gsp1) -> Result<HalfMatching, Violation> {
    let mut w = std::collections::BTreeMap::new();
    for c in g.cycles().iter().filter(|c| c.len() >= 2) {
        for k in 0..c.len() {
            *w.entry(norm(c[k], c[(k + 1) % c.len()])).or_insert(0) += 1;
        }
    }
    HalfMatching::from_halves(w)
}

pub fn half_matching_from_gsp2(g: &Gsp2) -> Result<HalfMatching, Violation> {
    let mut w = std::collections::BTreeMap::new();
    for i in 0..g.n() {
        for &s in &g.succ[i] {
            if let Slot::Agent(j) = s {
                *w.entry(norm(id(i), j)).or_insert(0) += 1;
            }
        }
    }
    HalfMatching::from_halves(w)
}

/// Orients a stable half-matching. A half edge points into the endpoint at
/// which it is the worst assigned edge of a saturated agent: that endpoint
/// takes the other as predecessor. Free capacity is filled with dummies.
pub fn gsp2_from_half_matching(inst: &SfInstance, hm: &HalfMatching) -> Result<Gsp2, Violation> {
    validate_half_matching(inst, hm)?;
    let n = inst.n();
    let mut load = vec![0u32; n];
    let mut worst = vec![0u32; n];
    for (&(a, b), w) in hm.half.iter().map(|p| (p, 1)).chain(hm.full.iter().map(|p| (p, 2))) {
        let (i, j) = (a.index(), b.index());
        load[i] += w;
        load[j] += w;
        worst[i] = worst[i].max(inst.rank(i, j));
        worst[j] = worst[j].max(inst.rank(j, i));
    }
    let saturated_at = |i: usize, j: usize| load[i] == 2 * inst.cap(i) && worst[i] == inst.rank(i, j);

    let mut out = Gsp2::empty(n);
    for &(a, b) in &hm.full {
        out.pred[a.index()].insert(Slot::Agent(b));
        out.succ[a.index()].insert(Slot::Agent(b));
        out.pred[b.index()].insert(Slot::Agent(a));
        out.succ[b.index()].insert(Slot::Agent(a));
    }
    for &(a, b) in &hm.half {
        let (i, j) = (a.index(), b.index());
        let (head, tail) = match (saturated_at(i, j), saturated_at(j, i)) {
            (true, false) => (i, j),
            (false, true) => (j, i),
            _ => return Err(Violation::UnstableEdge { a, b }),
        };
        out.pred[head].insert(Slot::Agent(id(tail)));
        out.succ[tail].insert(Slot::Agent(id(head)));
    }
    for i in 0..n {
        if load[i] % 2 == 1 {
            return Err(Violation::OverCapacity { agent: id(i), load_halves: load[i], capacity: inst.cap(i) });
        }
        for k in 1..=inst.cap(i) - load[i] / 2 {
            out.pred[i].insert(Slot::Dummy(k));
            out.succ[i].insert(Slot::Dummy(k));
        }
    }
    validate_gsp2(inst, &out)?;
    Ok(out)
}

/// Which transposition split to use for even cycles `(i1 i2 ... i2k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvenSplit {
    /// `(i1 i2)(i3 i4)...`
    #[default]
    Leading,
    /// `(i2 i3)...(i2k i1)`
    Shifted,
}

pub(crate) fn split_even(c: &[AgentId], how: EvenSplit) -> Vec<Vec<AgentId>> {
    let m = c.len();
    let off = match how {
        EvenSplit::Leading => 0,
        EvenSplit::Shifted => 1,
    };
    (0..m / 2).map(|k| vec![c[(2 * k + off) % m], c[(2 * k + 1 + off) % m]]).collect()
}

/// Replaces every even cycle of length at least 4 by transpositions.
pub fn reduce_gsp(inst: &SfInstance, g: &Gsp1) -> Result<Gsp1, Violation> {
    reduce_gsp_with(inst, g, EvenSplit::Leading)
}

pub fn reduce_gsp_with(inst: &SfInstance, g: &Gsp1, how: EvenSplit) -> Result<Gsp1, Violation> {
    validate_gsp1(inst, g)?;
    let mut out = Vec::new();
    for c in g.cycles() {
        if c.len() >= 4 && c.len() % 2 == 0 {
            out.extend(split_even(c, how));
        } else {
            out.push(c.clone());
        }
    }
    Ok(Gsp1::new(out))
}

/// Cycles of odd length at least 3, in canonical order.
pub fn odd_cycles(g: &Gsp1) -> Vec<Vec<AgentId>> {
    g.cycles().iter().filter(|c| c.len() >= 3 && c.len() % 2 == 1).cloned().collect()
}

/// Per-agent assigned weight in half-units.
pub fn allocation_vector(n: usize, hm: &HalfMatching) -> Vec<u32> {
    let mut v = vec![0; n];
    for (&(a, b), w) in hm.half.iter().map(|p| (p, 1)).chain(hm.full.iter().map(|p| (p, 2))) {
        v[a.index()] += w;
        v[b.index()] += w;
    }
    v
}

/// Per-agent assigned weight in half-units: one unit per real predecessor
/// and per real successor.
pub fn allocation_vector_gsp1(n: usize, g: &Gsp1) -> Vec<u32> {
    let mut v = vec![0; n];
    for c in g.cycles().iter().filter(|c| c.len() >= 2) {
        for a in c {
            v[a.index()] += 2;
        }
    }
    v
}

pub fn allocation_vector_gsp2(g: &Gsp2) -> Vec<u32> {
    (0..g.n())
        .map(|i| {
            g.pred[i].iter().chain(&g.succ[i]).filter(|s| matches!(s, Slot::Agent(_))).count() as u32
        })
        .collect()
}

/// Formats half-units as `k` or `k.5`.
pub fn format_halves(h: u32) -> String {
    if h % 2 == 0 {
        (h / 2).to_string()
    } else {
        format!("{}.5", h / 2)
    }
}

/// Appends `c_i` dummies to each list. Dummy `d_i^k` gets id
/// `n + (c_1 + ... + c_{i-1}) + k - 1`, capacity 1 and the list `[a_i]`.
pub fn augment_with_dummies(inst: &SfInstance) -> SfInstance {
    let n = inst.n();
    let total: u32 = inst.caps().iter().sum();
    let mut prefs: Vec<Vec<u32>> = inst.all_prefs().to_vec();
    let mut caps = inst.caps().to_vec();
    let mut next = n as u32;
    for i in 0..n {
        for _ in 0..inst.cap(i) {
            prefs[i].push(next);
            prefs.push(vec![i as u32]);
            caps.push(1);
            next += 1;
        }
    }
    debug_assert_eq!(prefs.len(), n + total as usize);
    SfInstance::new_incomplete(prefs, caps).expect("dummy augmentation keeps lists mutual")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Solvability {
    Solvable { matching: Matching },
    Unsolvable { odd_cycles: Vec<Vec<AgentId>> },
}

impl Solvability {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Solvability::Solvable { .. })
    }
}

/// Computes and reduces a GSP; no odd cycle means its transpositions form a
/// stable matching, otherwise the odd cycles certify that none exists.
pub fn decide_solvable(inst: &SfInstance) -> Result<Solvability, Violation> {
    let g = reduce_gsp(inst, &crate::reduction::compute_gsp(inst))?;
    let odd = odd_cycles(&g);
    if !odd.is_empty() {
        return Ok(Solvability::Unsolvable { odd_cycles: odd });
    }
    let matching = g.to_matching().expect("reduced GSP without odd cycles has only transpositions");
    validate_matching(inst, &matching)?;
    Ok(Solvability::Solvable { matching })
}

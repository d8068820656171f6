//! SF to SR: replace every edge by a six-agent gadget, split every agent into
//! capacity-1 copies, solve the roommates instance, and lift back.
//!
//! Layout after both splits: copies of original agent `i` occupy
//! `copies(i)`, in agent order, followed by the gadgets; gadget agent `k`
//! (1..=6) of original edge `e` has id `gadget_base + 6e + k - 1`. The gadget
//! of edge `{a_i, a_j}` with `i < j` attaches `a^1` to `a_i` and `a^4` to `a_j`.

use std::ops::Range;

use thiserror::Error;

use crate::graph::{to_graphic, PreferenceGraph};
use crate::gsp::{gsp1_from_gsp2, gsp2_from_half_matching, Gsp1, Gsp2, HalfMatching};
use crate::instance::{AgentId, SfInstance};
use crate::sr::{stable_partition_lists, SrPartition};
use crate::violation::{id, Violation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetMap {
    edges: Vec<(u32, u32)>,
    copy_start: Vec<u32>,
    gadget_base: u32,
}

impl GadgetMap {
    pub fn original_agents(&self) -> usize {
        self.copy_start.len() - 1
    }

    /// Original edges, indexed as in the input graph.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Gadget agent `a^k` of edge `e`, `k` in `1..=6`.
    pub fn gadget_agent(&self, e: usize, k: usize) -> u32 {
        debug_assert!((1..=6).contains(&k));
        self.gadget_base + 6 * e as u32 + k as u32 - 1
    }

    /// Ids standing for original agent `i`.
    pub fn copies(&self, i: usize) -> Range<u32> {
        self.copy_start[i]..self.copy_start[i + 1]
    }

    pub fn agent_count(&self) -> usize {
        self.gadget_base as usize + 6 * self.edges.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("edge {a},{b}: weight {via_first}/2 enters the gadget at a^1 but {via_fourth}/2 at a^4")]
    Asymmetric { a: AgentId, b: AgentId, via_first: u32, via_fourth: u32 },
    #[error(transparent)]
    Invalid(#[from] Violation),
}

// Edge slots inside one gadget.
const ATTACH_I: u32 = 0;
const ATTACH_J: u32 = 1;
const RING: u32 = 2; // a1a2, a2a3, a3a4, a4a5, a5a6, a6a1

pub fn split_edges(g: &PreferenceGraph) -> (PreferenceGraph, GadgetMap) {
    let n = g.vertex_count() as u32;
    let m = g.edge_count();
    let agent = |e: usize, k: u32| n + 6 * e as u32 + k - 1;
    let ring = |e: usize, k: u32| 8 * e as u32 + RING + k - 1; // edge a^k a^{k+1}

    let mut edges = Vec::with_capacity(8 * m);
    for (e, &(i, j)) in g.edges().iter().enumerate() {
        edges.push((i, agent(e, 1)));
        edges.push((j, agent(e, 4)));
        for k in 1..=6 {
            let (a, b) = (agent(e, k), agent(e, k % 6 + 1));
            edges.push((a.min(b), a.max(b)));
        }
    }

    let mut incident: Vec<Vec<u32>> = Vec::with_capacity(n as usize + 6 * m);
    for v in 0..n as usize {
        incident.push(
            g.incident(v)
                .iter()
                .map(|&e| 8 * e + if g.edge(e as usize).0 as usize == v { ATTACH_I } else { ATTACH_J })
                .collect(),
        );
    }
    for e in 0..m {
        let base = 8 * e as u32;
        incident.push(vec![ring(e, 1), base + ATTACH_I, ring(e, 6)]);
        incident.push(vec![ring(e, 2), ring(e, 1)]);
        incident.push(vec![ring(e, 3), ring(e, 2)]);
        incident.push(vec![ring(e, 4), base + ATTACH_J, ring(e, 3)]);
        incident.push(vec![ring(e, 5), ring(e, 4)]);
        incident.push(vec![ring(e, 6), ring(e, 5)]);
    }

    let mut caps = g.caps().to_vec();
    caps.resize(n as usize + 6 * m, 1);
    let map = GadgetMap {
        edges: g.edges().to_vec(),
        copy_start: (0..=n).collect(),
        gadget_base: n,
    };
    (PreferenceGraph::from_parts(edges, incident, caps), map)
}

/// Replaces each vertex of capacity `c` by `c` capacity-1 copies. Each copy
/// inherits the full incidence order; neighbours list the copies
/// consecutively where the vertex used to be.
pub fn split_vertices(g: &PreferenceGraph, map: &GadgetMap) -> (PreferenceGraph, GadgetMap) {
    let nv = g.vertex_count();
    let mut start = Vec::with_capacity(nv + 1);
    start.push(0u32);
    for v in 0..nv {
        start.push(start[v] + g.cap(v));
    }
    let copies = |v: usize| start[v]..start[v + 1];

    let mut edge_base = Vec::with_capacity(g.edge_count() + 1);
    edge_base.push(0u32);
    let mut edges = Vec::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        for a in copies(u as usize) {
            for b in copies(v as usize) {
                edges.push((a, b));
            }
        }
        edge_base.push(edges.len() as u32);
        debug_assert_eq!(edge_base[e + 1] - edge_base[e], g.cap(u as usize) * g.cap(v as usize));
    }

    let total = start[nv] as usize;
    let mut incident = vec![Vec::new(); total];
    for v in 0..nv {
        for (s, copy) in copies(v).enumerate() {
            let list = &mut incident[copy as usize];
            for &e in g.incident(v) {
                let (a, b) = g.edge(e as usize);
                let cb = g.cap(b as usize);
                if a as usize == v {
                    let base = edge_base[e as usize] + s as u32 * cb;
                    list.extend(base..base + cb);
                } else {
                    let ca = g.cap(a as usize);
                    list.extend((0..ca).map(|t| edge_base[e as usize] + t * cb + s as u32));
                }
            }
        }
    }

    let n = map.original_agents();
    let new_map = GadgetMap {
        edges: map.edges.clone(),
        copy_start: start[..=n].to_vec(),
        gadget_base: start[n],
    };
    debug_assert!((n..nv).all(|v| g.cap(v) == 1));
    (PreferenceGraph::from_parts(edges, incident, vec![1; total]), new_map)
}

/// Consecutive members of cycles of length 2 are fully matched; of longer
/// cycles, half matched.
pub fn half_matching_from_partition(p: &SrPartition) -> HalfMatching {
    let mut hm = HalfMatching::default();
    for c in p.cycles() {
        match c.len() {
            1 => {}
            2 => {
                hm.full.insert((c[0].min(c[1]), c[0].max(c[1])));
            }
            m => {
                for k in 0..m {
                    let (a, b) = (c[k], c[(k + 1) % m]);
                    hm.half.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    hm
}

/// Weight on `{a_i, a_j}` is the weight between copies of `a_i` and `a^1`;
/// the weight between copies of `a_j` and `a^4` must agree.
pub fn lift_half_matching(map: &GadgetMap, split: &HalfMatching) -> Result<HalfMatching, ReductionError> {
    let mut weights = Vec::new();
    for (e, &(i, j)) in map.edges().iter().enumerate() {
        let sum = |v: usize, k: usize| -> u32 {
            let g = id(map.gadget_agent(e, k) as usize);
            map.copies(v).map(|c| split.weight_halves(id(c as usize), g)).sum()
        };
        let (via_first, via_fourth) = (sum(i as usize, 1), sum(j as usize, 4));
        if via_first != via_fourth {
            return Err(ReductionError::Asymmetric {
                a: id(i as usize),
                b: id(j as usize),
                via_first,
                via_fourth,
            });
        }
        weights.push(((id(i as usize), id(j as usize)), via_first));
    }
    Ok(HalfMatching::from_halves(weights)?)
}

/// Every intermediate object of one GSP computation.
#[derive(Debug, Clone)]
pub struct GspTrace {
    pub edge_split: PreferenceGraph,
    pub vertex_split: PreferenceGraph,
    pub map: GadgetMap,
    pub partition: SrPartition,
    pub split_matching: HalfMatching,
    pub half_matching: HalfMatching,
    pub gsp2: Gsp2,
    pub gsp: Gsp1,
}

pub fn compute_gsp_traced(inst: &SfInstance) -> Result<GspTrace, ReductionError> {
    let g = to_graphic(inst);
    let (edge_split, map) = split_edges(&g);
    let (vertex_split, map) = split_vertices(&edge_split, &map);
    let partition = stable_partition_lists(&vertex_split.neighbour_lists());
    let split_matching = half_matching_from_partition(&partition);
    let half_matching = lift_half_matching(&map, &split_matching)?;
    let gsp2 = gsp2_from_half_matching(inst, &half_matching)?;
    let gsp = gsp1_from_gsp2(inst, &gsp2)?;
    Ok(GspTrace { edge_split, vertex_split, map, partition, split_matching, half_matching, gsp2, gsp })
}

/// A GSP of `inst`. One always exists; failure here is a bug.
pub fn compute_gsp(inst: &SfInstance) -> Gsp1 {
    compute_half_matching_and_gsp(inst).1
}

/// The stable half-matching found on the way, and the GSP built from it.
pub fn compute_half_matching_and_gsp(inst: &SfInstance) -> (HalfMatching, Gsp1) {
    match compute_gsp_traced(inst) {
        Ok(t) => (t.half_matching, t.gsp),
        Err(e) => panic!("GSP construction failed: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    fn table13() -> SfInstance {
        parse_instance("3\n2 2 3\n2 3 1\n2 1 2\n").unwrap()
    }

    #[test]
    fn table13_edge_split() {
        let g = to_graphic(&table13());
        let (s, map) = split_edges(&g);
        assert_eq!(s.vertex_count(), 21);
        let names = s.neighbour_lists();
        // a1 now ranks a^1_{1,2} then a^1_{1,3}
        assert_eq!(names[0], vec![map.gadget_agent(0, 1), map.gadget_agent(1, 1)]);
        let a = |k| map.gadget_agent(0, k);
        assert_eq!(names[a(1) as usize], vec![a(2), 0, a(6)]);
        assert_eq!(names[a(2) as usize], vec![a(3), a(1)]);
        assert_eq!(names[a(3) as usize], vec![a(4), a(2)]);
        assert_eq!(names[a(4) as usize], vec![a(5), 1, a(3)]);
        assert_eq!(names[a(5) as usize], vec![a(6), a(4)]);
        assert_eq!(names[a(6) as usize], vec![a(1), a(5)]);
    }

    #[test]
    fn table13_vertex_split() {
        let g = to_graphic(&table13());
        let (s, map) = split_edges(&g);
        let (v, map) = split_vertices(&s, &map);
        assert_eq!(v.vertex_count(), 24);
        assert_eq!(map.agent_count(), 24);
        let names = v.neighbour_lists();
        let a = |k| map.gadget_agent(0, k);
        let c1: Vec<u32> = map.copies(0).collect();
        assert_eq!(names[a(1) as usize], vec![a(2), c1[0], c1[1], a(6)]);
        assert_eq!(names[c1[0] as usize], names[c1[1] as usize]);
        assert!(v.caps().iter().all(|&c| c == 1));
    }

    #[test]
    fn unit_caps_split_is_renaming() {
        let inst = parse_instance("3\n1 2 3\n1 3 1\n1 1 2\n").unwrap();
        let (s, map) = split_edges(&to_graphic(&inst));
        let (v, _) = split_vertices(&s, &map);
        assert_eq!(s.neighbour_lists(), v.neighbour_lists());
    }

    #[test]
    fn two_agents() {
        let inst = parse_instance("2\n1 2\n1 1\n").unwrap();
        let (s, _) = split_edges(&to_graphic(&inst));
        assert_eq!(s.vertex_count(), 8);
        assert_eq!(compute_gsp(&inst).to_text(), "( 1 2 )\n");
    }

    #[test]
    fn table13_lifts_to_triangle() {
        let t = compute_gsp_traced(&table13()).unwrap();
        assert!(t.half_matching.half.is_empty());
        let full: Vec<_> = t.half_matching.full.iter().map(|(a, b)| (a.label(), b.label())).collect();
        assert_eq!(full, vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn zero_weight_lifts_to_empty() {
        let inst = parse_instance("2\n1 2\n1 1\n").unwrap();
        let (s, map) = split_edges(&to_graphic(&inst));
        let (_, map) = split_vertices(&s, &map);
        assert_eq!(lift_half_matching(&map, &HalfMatching::default()).unwrap(), HalfMatching::default());
    }

    #[test]
    fn asymmetric_lift_is_reported() {
        let inst = parse_instance("2\n1 2\n1 1\n").unwrap();
        let (s, map) = split_edges(&to_graphic(&inst));
        let (_, map) = split_vertices(&s, &map);
        let bad = HalfMatching::new([], [(id(0), id(map.gadget_agent(0, 1) as usize))]);
        assert!(matches!(lift_half_matching(&map, &bad), Err(ReductionError::Asymmetric { .. })));
    }
}

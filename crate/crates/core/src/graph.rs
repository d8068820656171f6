//! Graphic preference systems: a graph whose vertices rank their incident edges.

use crate::instance::{InstanceError, SfInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceGraph {
    /// Edges as `(u, v)` with `u < v`.
    edges: Vec<(u32, u32)>,
    /// Incident edge ids per vertex, best first.
    incident: Vec<Vec<u32>>,
    caps: Vec<u32>,
}

impl PreferenceGraph {
    /// Assembles a graph. Panics on self-loops or on an incidence list that
    /// names an edge not touching its vertex.
    pub fn from_parts(edges: Vec<(u32, u32)>, incident: Vec<Vec<u32>>, caps: Vec<u32>) -> Self {
        assert_eq!(incident.len(), caps.len());
        for (v, inc) in incident.iter().enumerate() {
            for &e in inc {
                let (a, b) = edges[e as usize];
                assert!(a < b, "edge {e} is not normalised");
                assert!(a as usize == v || b as usize == v, "edge {e} does not touch vertex {v}");
            }
        }
        PreferenceGraph { edges, incident, caps }
    }

    pub fn vertex_count(&self) -> usize {
        self.incident.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (u32, u32) {
        self.edges[e]
    }

    pub fn incident(&self, v: usize) -> &[u32] {
        &self.incident[v]
    }

    pub fn cap(&self, v: usize) -> u32 {
        self.caps[v]
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn other(&self, e: usize, v: usize) -> u32 {
        let (a, b) = self.edges[e];
        if a as usize == v {
            b
        } else {
            a
        }
    }

    /// 1-based rank of edge `e` at vertex `v`.
    pub fn edge_rank(&self, v: usize, e: usize) -> Option<u32> {
        self.incident[v].iter().position(|&x| x as usize == e).map(|p| p as u32 + 1)
    }

    /// Neighbour lists in preference order.
    pub fn neighbour_lists(&self) -> Vec<Vec<u32>> {
        (0..self.vertex_count())
            .map(|v| self.incident[v].iter().map(|&e| self.other(e as usize, v)).collect())
            .collect()
    }
}

/// Edge ids follow [`SfInstance::pairs`] order.
pub fn to_graphic(inst: &SfInstance) -> PreferenceGraph {
    let n = inst.n();
    let mut id = vec![u32::MAX; n * n];
    let mut edges = Vec::new();
    for (i, j) in inst.pairs() {
        id[i * n + j] = edges.len() as u32;
        id[j * n + i] = edges.len() as u32;
        edges.push((i as u32, j as u32));
    }
    let incident = (0..n).map(|i| inst.prefs(i).iter().map(|&j| id[i * n + j as usize]).collect()).collect();
    PreferenceGraph { edges, incident, caps: inst.caps().to_vec() }
}

pub fn from_graphic(g: &PreferenceGraph) -> Result<SfInstance, InstanceError> {
    let prefs = g.neighbour_lists();
    let n = prefs.len();
    if prefs.iter().all(|l| l.len() + 1 == n) && g.caps.iter().all(|&c| c >= 1) {
        SfInstance::new(prefs, g.caps.clone())
    } else {
        SfInstance::new_incomplete(prefs, g.caps.clone())
    }
}

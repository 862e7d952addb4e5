use std::collections::BTreeMap;
use std::sync::OnceLock;

use bitvec::prelude::*;
use serde::Serialize;

use super::{DecoderError, ErrorMechanism};
use crate::circuit::{DetectorFamily, SyndromeCircuit};

/// Integer weight units per unit of log-likelihood ratio.
pub const WEIGHT_SCALE: f64 = 65536.0;

/// Weight that marks an edge as absent.
pub(crate) const ABSENT: i64 = i64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphEdge {
    /// Node indices into [`MatchingGraph::detectors`]; `v = None` is the boundary.
    pub u: usize,
    pub v: Option<usize>,
    /// Probability of an odd number of the merged unheralded mechanisms.
    pub probability: f64,
    pub observable: bool,
    pub mechanisms: Vec<usize>,
}

impl GraphEdge {
    /// `ln((1 − p)/p)`, or `None` for an edge that only heralded faults produce.
    pub fn weight(&self) -> Option<f64> {
        (self.probability > 0.0).then(|| ((1.0 - self.probability) / self.probability).ln().max(0.0))
    }
}

/// Decoding graph of one detector family.
#[derive(Debug, Clone, Serialize)]
pub struct MatchingGraph {
    pub family: DetectorFamily,
    /// Global detector index of every node.
    pub detectors: Vec<usize>,
    pub edges: Vec<GraphEdge>,
    /// Edges touched by each herald's failure mechanisms.
    pub herald_edges: BTreeMap<usize, Vec<usize>>,
    #[serde(skip)]
    pub(crate) local: Vec<u32>,
    #[serde(skip)]
    pub(crate) adj_offsets: Vec<u32>,
    /// `(neighbour, edge)` pairs; the boundary node is `detectors.len()`.
    #[serde(skip)]
    pub(crate) adj: Vec<(u32, u32)>,
    #[serde(skip)]
    pub(crate) base_weights: Vec<i64>,
    /// All-pairs distances under the base weights, built on first use.
    #[serde(skip)]
    pub(crate) table: OnceLock<DistanceTable>,
}

/// Shortest-path distances and observable parities between all nodes, with
/// pair paths barred from passing through the boundary.
#[derive(Debug, Clone)]
pub(crate) struct DistanceTable {
    pub pair: Vec<i64>,
    pub pair_parity: Vec<bool>,
    pub boundary: Vec<i64>,
    pub boundary_parity: Vec<bool>,
}

fn xor_prob(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

fn to_int(w: Option<f64>) -> i64 {
    w.map_or(ABSENT, |w| (w * WEIGHT_SCALE).round() as i64)
}

fn build(
    c: &SyndromeCircuit,
    dem: &[ErrorMechanism],
    family: DetectorFamily,
    herald_aware: bool,
) -> Result<MatchingGraph, DecoderError> {
    let detectors: Vec<usize> = (0..c.detector_count()).filter(|&d| c.detectors[d].family == family).collect();
    let mut local = vec![u32::MAX; c.detector_count()];
    for (i, &d) in detectors.iter().enumerate() {
        local[d] = i as u32;
    }
    let tracks_observable = c.basis.check_kind() == family;
    let mut keyed: BTreeMap<(usize, Option<usize>, bool), GraphEdge> = BTreeMap::new();
    let mut herald_edges: BTreeMap<usize, Vec<(usize, Option<usize>, bool)>> = BTreeMap::new();
    for (k, m) in dem.iter().enumerate() {
        let mut nodes = Vec::with_capacity(2);
        for &d in &m.detectors {
            let l = *local.get(d).ok_or(DecoderError::UnknownDetector(d))?;
            if l != u32::MAX {
                nodes.push(l as usize);
            }
        }
        if nodes.len() > 2 {
            return Err(DecoderError::NotGraphLike { mechanism: k, family, count: nodes.len() });
        }
        let Some(&u) = nodes.first() else { continue };
        let key = (u, nodes.get(1).copied(), tracks_observable && m.observable);
        let p = match (m.herald, herald_aware) {
            (Some(h), true) => {
                herald_edges.entry(h).or_default().push(key);
                0.0
            }
            (Some(h), false) => m.probability * c.herald_sites[h].p_fail,
            (None, _) => m.probability,
        };
        let e = keyed.entry(key).or_insert_with(|| GraphEdge {
            u: key.0,
            v: key.1,
            probability: 0.0,
            observable: key.2,
            mechanisms: Vec::new(),
        });
        e.probability = xor_prob(e.probability, p);
        e.mechanisms.push(k);
    }
    let index: BTreeMap<_, usize> = keyed.keys().enumerate().map(|(i, k)| (*k, i)).collect();
    let edges: Vec<GraphEdge> = keyed.into_values().collect();
    let herald_edges = herald_edges
        .into_iter()
        .map(|(h, keys)| {
            let mut ids: Vec<usize> = keys.iter().map(|k| index[k]).collect();
            ids.sort_unstable();
            ids.dedup();
            (h, ids)
        })
        .collect();

    Ok(MatchingGraph::from_edges(family, detectors, edges, herald_edges))
}

/// Graph of unheralded mechanisms; failure mechanisms are indexed by herald
/// and only enter through [`MatchingGraph::shot_weights`].
pub fn build_base_graph(
    c: &SyndromeCircuit,
    dem: &[ErrorMechanism],
    family: DetectorFamily,
) -> Result<MatchingGraph, DecoderError> {
    build(c, dem, family, true)
}

/// Graph for a decoder that ignores heralds: failure mechanisms are folded
/// in with their unconditional probability `p_fail / 2`.
pub fn build_blind_graph(
    c: &SyndromeCircuit,
    dem: &[ErrorMechanism],
    family: DetectorFamily,
) -> Result<MatchingGraph, DecoderError> {
    build(c, dem, family, false)
}

impl MatchingGraph {
    /// Assemble a graph over `detectors.len()` nodes plus the boundary.
    pub fn from_edges(
        family: DetectorFamily,
        detectors: Vec<usize>,
        edges: Vec<GraphEdge>,
        herald_edges: BTreeMap<usize, Vec<usize>>,
    ) -> Self {
        let n = detectors.len();
        let mut local = vec![u32::MAX; detectors.iter().max().map_or(0, |m| m + 1)];
        for (i, &d) in detectors.iter().enumerate() {
            local[d] = i as u32;
        }
        let mut lists: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n + 1];
        for (i, e) in edges.iter().enumerate() {
            let v = e.v.unwrap_or(n);
            lists[e.u].push((v as u32, i as u32));
            lists[v].push((e.u as u32, i as u32));
        }
        let mut adj_offsets = vec![0u32];
        let mut adj = Vec::new();
        for l in lists {
            adj.extend(l);
            adj_offsets.push(adj.len() as u32);
        }
        let base_weights = edges.iter().map(|e| to_int(e.weight())).collect();
        MatchingGraph {
            family,
            detectors,
            edges,
            herald_edges,
            local,
            adj_offsets,
            adj,
            base_weights,
            table: OnceLock::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.detectors.len()
    }

    pub(crate) fn boundary(&self) -> usize {
        self.detectors.len()
    }

    pub(crate) fn neighbours(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[self.adj_offsets[v] as usize..self.adj_offsets[v + 1] as usize]
    }

    /// Integer edge weights for one shot: every edge of a fired herald has
    /// probability 1/2 and so weight zero.
    pub fn shot_weights_into(&self, heralds: Option<&BitSlice<u64, Lsb0>>, out: &mut Vec<i64>) {
        out.clear();
        out.extend_from_slice(&self.base_weights);
        if let Some(h) = heralds {
            for fired in h.iter_ones() {
                if let Some(ids) = self.herald_edges.get(&fired) {
                    for &e in ids {
                        out[e] = 0;
                    }
                }
            }
        }
    }

    pub fn shot_weights(&self, heralds: Option<&BitSlice<u64, Lsb0>>) -> Vec<i64> {
        let mut w = Vec::new();
        self.shot_weights_into(heralds, &mut w);
        w
    }

    /// Whether the fired heralds change any edge weight of this graph.
    pub fn heralds_matter(&self, heralds: &BitSlice<u64, Lsb0>) -> bool {
        heralds.iter_ones().any(|h| {
            self.herald_edges.get(&h).is_some_and(|ids| ids.iter().any(|&e| self.base_weights[e] != 0))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialises")
    }
}

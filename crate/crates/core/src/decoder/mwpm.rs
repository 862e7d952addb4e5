use std::cmp::Reverse;
use std::collections::BinaryHeap;

use bitvec::prelude::*;
use rayon::prelude::*;
use serde::Serialize;

use super::blossom::min_weight_perfect_matching;
use super::graph::{DistanceTable, MatchingGraph, ABSENT, WEIGHT_SCALE};
use super::{build_base_graph, build_blind_graph, derive_error_model, DecoderError};
use crate::circuit::SyndromeCircuit;
use crate::frame::{shot_rng, FaultSampler, ShotRecord};

const INF: i64 = i64::MAX / 4;
const NO_SLOT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodeResult {
    /// Predicted observable flip.
    pub flip: bool,
    /// Total weight of the matching, in log-likelihood units.
    pub weight: f64,
}

/// Scratch buffers reused across shots.
#[derive(Debug, Default, Clone)]
pub struct DecodeWorkspace {
    weights: Vec<i64>,
    dist: Vec<i64>,
    par: Vec<bool>,
    seen: Vec<u32>,
    settled: Vec<u32>,
    epoch: u32,
    heap: BinaryHeap<Reverse<(i64, u32)>>,
    slot: Vec<u32>,
    flagged: Vec<usize>,
}

impl DecodeWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self, nodes: usize) {
        if self.dist.len() != nodes {
            self.dist = vec![INF; nodes];
            self.par = vec![false; nodes];
            self.seen = vec![0; nodes];
            self.settled = vec![0; nodes];
            self.slot = vec![NO_SLOT; nodes];
            self.epoch = 0;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.seen.fill(0);
            self.settled.fill(0);
            self.epoch = 1;
        }
    }

    fn dist_of(&self, v: usize) -> i64 {
        if self.settled[v] == self.epoch {
            self.dist[v]
        } else {
            INF
        }
    }

    /// Dijkstra from `src` up to distance `limit`, never entering `blocked`.
    /// Stops early once `targets` nodes with a slot above `above` are settled.
    fn search(
        &mut self,
        g: &MatchingGraph,
        w: &[i64],
        src: usize,
        limit: i64,
        blocked: Option<usize>,
        above: u32,
        mut targets: usize,
    ) {
        self.reset(g.node_count() + 1);
        let e = self.epoch;
        self.heap.clear();
        self.dist[src] = 0;
        self.par[src] = false;
        self.seen[src] = e;
        self.heap.push(Reverse((0, src as u32)));
        while let Some(Reverse((d, v))) = self.heap.pop() {
            let v = v as usize;
            if self.settled[v] == e || d > self.dist[v] {
                continue;
            }
            if d > limit {
                break;
            }
            self.settled[v] = e;
            if v != src && self.slot[v] != NO_SLOT && self.slot[v] > above {
                targets -= 1;
                if targets == 0 {
                    break;
                }
            }
            for &(u, k) in g.neighbours(v) {
                let (u, k) = (u as usize, k as usize);
                if Some(u) == blocked || w[k] == ABSENT || self.settled[u] == e {
                    continue;
                }
                let nd = d + w[k];
                if self.seen[u] != e || nd < self.dist[u] {
                    self.seen[u] = e;
                    self.dist[u] = nd;
                    self.par[u] = self.par[v] ^ g.edges[k].observable;
                    self.heap.push(Reverse((nd, u as u32)));
                }
            }
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Boundary distances of the flagged nodes and the pairs whose shortest path
/// beats sending both to the boundary.
struct Candidates {
    bd: Vec<i64>,
    bp: Vec<bool>,
    pairs: Vec<(usize, usize, i64, bool)>,
}

fn search_candidates(g: &MatchingGraph, weights: &[i64], flagged: &[usize], ws: &mut DecodeWorkspace) -> Candidates {
    let n = flagged.len();
    let boundary = g.boundary();
    ws.reset(g.node_count() + 1);
    for (k, &v) in flagged.iter().enumerate() {
        ws.slot[v] = k as u32;
    }
    ws.search(g, weights, boundary, INF, None, NO_SLOT, usize::MAX);
    let bd: Vec<i64> = flagged.iter().map(|&v| ws.dist_of(v)).collect();
    let bp: Vec<bool> = flagged.iter().map(|&v| ws.par[v]).collect();
    let bmax = bd.iter().copied().max().unwrap_or(0);
    let mut pairs = Vec::new();
    for a in 0..n.saturating_sub(1) {
        let limit = bd[a].saturating_add(bmax).min(INF);
        ws.search(g, weights, flagged[a], limit, Some(boundary), a as u32, n - 1 - a);
        for b in a + 1..n {
            let d = ws.dist_of(flagged[b]);
            if d < INF && d < bd[a].saturating_add(bd[b]) {
                pairs.push((a, b, d, ws.par[flagged[b]]));
            }
        }
    }
    for &v in flagged {
        ws.slot[v] = NO_SLOT;
    }
    Candidates { bd, bp, pairs }
}

fn table_candidates(t: &DistanceTable, nodes: usize, flagged: &[usize]) -> Candidates {
    let bd: Vec<i64> = flagged.iter().map(|&v| t.boundary[v]).collect();
    let bp: Vec<bool> = flagged.iter().map(|&v| t.boundary_parity[v]).collect();
    let mut pairs = Vec::new();
    for a in 0..flagged.len() {
        for b in a + 1..flagged.len() {
            let k = flagged[a] * nodes + flagged[b];
            let d = t.pair[k];
            if d < INF && d < bd[a].saturating_add(bd[b]) {
                pairs.push((a, b, d, t.pair_parity[k]));
            }
        }
    }
    Candidates { bd, bp, pairs }
}

pub(crate) fn distance_table(g: &MatchingGraph) -> DistanceTable {
    let n = g.node_count();
    let mut ws = DecodeWorkspace::new();
    let mut pair = vec![INF; n * n];
    let mut pair_parity = vec![false; n * n];
    for a in 0..n {
        ws.search(g, &g.base_weights, a, INF, Some(n), NO_SLOT, usize::MAX);
        for b in 0..n {
            pair[a * n + b] = ws.dist_of(b);
            pair_parity[a * n + b] = ws.par[b];
        }
    }
    ws.search(g, &g.base_weights, n, INF, None, NO_SLOT, usize::MAX);
    let boundary = (0..n).map(|v| ws.dist_of(v)).collect();
    let boundary_parity = (0..n).map(|v| ws.par[v]).collect();
    DistanceTable { pair, pair_parity, boundary, boundary_parity }
}

/// Exact minimum-weight perfect matching of `flagged` nodes (indices into
/// `g.detectors`) with the boundary available to any of them, under the given
/// integer edge weights. Returns the observable parity and total weight.
///
/// Pairs whose shortest path beats sending both to the boundary form a graph
/// whose components are matched independently: pairing across components
/// costs exactly the two boundary distances, so no global constraint links
/// them.
pub fn match_nodes(
    g: &MatchingGraph,
    weights: &[i64],
    flagged: &[usize],
    ws: &mut DecodeWorkspace,
) -> Result<(bool, i64), DecoderError> {
    if flagged.is_empty() {
        return Ok((false, 0));
    }
    solve(&search_candidates(g, weights, flagged, ws))
}

fn solve(c: &Candidates) -> Result<(bool, i64), DecoderError> {
    let Candidates { bd, bp, pairs } = c;
    let n = bd.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b, _, _) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let r = find(&mut parent, v);
        members[r].push(v);
    }
    let mut comp_pairs: Vec<Vec<(usize, usize, i64, bool)>> = vec![Vec::new(); n];
    for &p in pairs {
        comp_pairs[find(&mut parent, p.0)].push(p);
    }

    let mut flip = false;
    let mut total = 0i64;
    for (root, nodes) in members.iter().enumerate() {
        match nodes.len() {
            0 => continue,
            1 => {
                let v = nodes[0];
                if bd[v] >= INF {
                    return Err(DecoderError::NoPerfectMatching);
                }
                total += bd[v];
                flip ^= bp[v];
            }
            2 if comp_pairs[root].len() == 1 => {
                let (_, _, d, p) = comp_pairs[root][0];
                total += d;
                flip ^= p;
            }
            k => {
                let pos = |v: usize| nodes.binary_search(&v).expect("member");
                let mut edge: Vec<Option<(i64, bool)>> = vec![None; k * k];
                for &(a, b, d, p) in &comp_pairs[root] {
                    edge[pos(a) * k + pos(b)] = Some((d, p));
                }
                let mut list = Vec::with_capacity(k * (k + 1) / 2);
                let mut meta = Vec::with_capacity(list.capacity());
                for i in 0..k {
                    for j in i + 1..k {
                        let e = edge[i * k + j].or_else(|| {
                            let s = bd[nodes[i]].saturating_add(bd[nodes[j]]);
                            (s < INF).then_some((s, bp[nodes[i]] ^ bp[nodes[j]]))
                        });
                        if let Some((d, p)) = e {
                            list.push((i, j, d));
                            meta.push(p);
                        }
                    }
                }
                let size = if k % 2 == 1 {
                    for i in 0..k {
                        if bd[nodes[i]] < INF {
                            list.push((i, k, bd[nodes[i]]));
                            meta.push(bp[nodes[i]]);
                        }
                    }
                    k + 1
                } else {
                    k
                };
                let mates = min_weight_perfect_matching(size, &list).ok_or(DecoderError::NoPerfectMatching)?;
                for (e, &(i, j, d)) in list.iter().enumerate() {
                    if mates[i] == j {
                        total += d;
                        flip ^= meta[e];
                    }
                }
            }
        }
    }
    Ok((flip, total))
}

/// Convenience wrapper of [`match_nodes`] with a fresh workspace.
pub fn mwpm_decode(g: &MatchingGraph, weights: &[i64], flagged: &[usize]) -> Result<DecodeResult, DecoderError> {
    let (flip, w) = match_nodes(g, weights, flagged, &mut DecodeWorkspace::new())?;
    Ok(DecodeResult { flip, weight: w as f64 / WEIGHT_SCALE })
}

/// Decoder of the observable of a memory circuit.
#[derive(Debug, Clone)]
pub struct Decoder {
    graph: MatchingGraph,
    herald_aware: bool,
}

impl Decoder {
    /// Herald-aware decoder on the family that detects flips of the observable.
    pub fn new(c: &SyndromeCircuit) -> Result<Self, DecoderError> {
        let dem = derive_error_model(c);
        Ok(Self { graph: build_base_graph(c, &dem, c.basis.check_kind())?, herald_aware: true })
    }

    /// Decoder that ignores heralds and treats failures as unheralded noise.
    pub fn blind(c: &SyndromeCircuit) -> Result<Self, DecoderError> {
        let dem = derive_error_model(c);
        Ok(Self { graph: build_blind_graph(c, &dem, c.basis.check_kind())?, herald_aware: false })
    }

    pub fn graph(&self) -> &MatchingGraph {
        &self.graph
    }

    pub fn is_herald_aware(&self) -> bool {
        self.herald_aware
    }

    /// Decode flagged global detector indices given the shot's heralds.
    pub fn decode(
        &self,
        flagged: impl IntoIterator<Item = usize>,
        heralds: &BitSlice<u64, Lsb0>,
        ws: &mut DecodeWorkspace,
    ) -> Result<DecodeResult, DecoderError> {
        let g = &self.graph;
        let mut nodes = std::mem::take(&mut ws.flagged);
        nodes.clear();
        nodes.extend(
            flagged
                .into_iter()
                .map(|d| g.local.get(d).copied().unwrap_or(u32::MAX))
                .filter(|&l| l != u32::MAX)
                .map(|l| l as usize),
        );
        let out = if nodes.is_empty() {
            Ok((false, 0))
        } else if self.herald_aware && g.heralds_matter(heralds) {
            let mut weights = std::mem::take(&mut ws.weights);
            g.shot_weights_into(Some(heralds), &mut weights);
            let c = search_candidates(g, &weights, &nodes, ws);
            ws.weights = weights;
            solve(&c)
        } else {
            let t = g.table.get_or_init(|| distance_table(g));
            solve(&table_candidates(t, g.node_count(), &nodes))
        };
        ws.flagged = nodes;
        let (flip, w) = out?;
        Ok(DecodeResult { flip, weight: w as f64 / WEIGHT_SCALE })
    }

    pub fn decode_shot(&self, shot: &ShotRecord, ws: &mut DecodeWorkspace) -> Result<DecodeResult, DecoderError> {
        self.decode(shot.detectors.iter_ones(), &shot.heralds, ws)
    }

    /// Whether decoding this shot leaves a logical error.
    pub fn fails(&self, shot: &ShotRecord, ws: &mut DecodeWorkspace) -> Result<bool, DecoderError> {
        Ok(self.decode_shot(shot, ws)?.flip != shot.observable)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalErrorEstimate {
    pub shots: u64,
    pub errors: u64,
    pub p_l: f64,
    /// Binomial standard error `√(p(1−p)/N)`.
    pub stderr: f64,
}

impl LogicalErrorEstimate {
    pub fn from_counts(errors: u64, shots: u64) -> Self {
        let p = errors as f64 / shots as f64;
        Self { shots, errors, p_l: p, stderr: (p * (1.0 - p) / shots as f64).sqrt() }
    }
}

/// Count logical errors over shots `0..shots` of the seed's stream family.
pub fn count_errors(
    sampler: &FaultSampler,
    decoder: &Decoder,
    shots: u64,
    seed: u64,
) -> Result<u64, DecoderError> {
    (0..shots)
        .into_par_iter()
        .map_init(DecodeWorkspace::new, |ws, i| {
            let shot = sampler.sample_shot(&mut shot_rng(seed, i));
            decoder.fails(&shot, ws).map(u64::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Herald-aware MWPM logical error rate of a memory circuit.
pub fn logical_error_rate(c: &SyndromeCircuit, shots: u64, seed: u64) -> Result<LogicalErrorEstimate, DecoderError> {
    if shots == 0 {
        return Err(DecoderError::NoShots);
    }
    let errors = count_errors(&FaultSampler::new(c), &Decoder::new(c)?, shots, seed)?;
    Ok(LogicalErrorEstimate::from_counts(errors, shots))
}

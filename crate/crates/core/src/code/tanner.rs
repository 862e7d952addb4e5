use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CodeError;

/// Dense vertex identifier. Data vertices come first, then checks.
pub type VertexId = usize;

/// Pauli label carried by a Tanner-graph edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgePauli {
    X,
    Y,
    Z,
}

impl fmt::Display for EdgePauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgePauli::X => "X",
            EdgePauli::Y => "Y",
            EdgePauli::Z => "Z",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckKind {
    X,
    Z,
    Mixed,
}

/// Planar position. Rotated-surface-code graphs use doubled coordinates so
/// that data qubits sit on odd rows/columns and plaquette centres on even ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub row: i32,
    pub col: i32,
}

impl Coord {
    pub const fn new(row: i32, col: i32) -> Self {
        Self { row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: VertexId,
    pub kind: CheckKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TannerEdge {
    pub data: VertexId,
    pub check: VertexId,
    pub pauli: EdgePauli,
}

/// Bipartite data/check graph with Pauli-labelled edges.
///
/// Construction goes through [`TannerGraph::new`], which enforces that every
/// edge joins a data vertex to a check vertex and that no (data, check) pair
/// appears twice. The graph is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct TannerGraph {
    data: Vec<VertexId>,
    checks: Vec<Check>,
    edges: Vec<TannerEdge>,
    coords: BTreeMap<VertexId, Coord>,
    data_index: BTreeMap<VertexId, usize>,
    check_index: BTreeMap<VertexId, usize>,
}

impl TannerGraph {
    pub fn new(
        data: Vec<VertexId>,
        checks: Vec<Check>,
        edges: Vec<TannerEdge>,
    ) -> Result<Self, CodeError> {
        let mut data_index = BTreeMap::new();
        for (i, &d) in data.iter().enumerate() {
            if data_index.insert(d, i).is_some() {
                return Err(CodeError::DuplicateVertex(d));
            }
        }
        let mut check_index = BTreeMap::new();
        for (i, c) in checks.iter().enumerate() {
            if data_index.contains_key(&c.id) || check_index.insert(c.id, i).is_some() {
                return Err(CodeError::DuplicateVertex(c.id));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !data_index.contains_key(&e.data) || !check_index.contains_key(&e.check) {
                return Err(CodeError::NotBipartite {
                    data: e.data,
                    check: e.check,
                });
            }
            if !seen.insert((e.data, e.check)) {
                return Err(CodeError::DuplicateEdge {
                    data: e.data,
                    check: e.check,
                });
            }
        }
        Ok(Self {
            data,
            checks,
            edges,
            coords: BTreeMap::new(),
            data_index,
            check_index,
        })
    }

    /// Attach planar coordinates. Unknown vertex ids are rejected.
    pub fn with_coords(mut self, coords: BTreeMap<VertexId, Coord>) -> Result<Self, CodeError> {
        for &v in coords.keys() {
            if !self.contains(v) {
                return Err(CodeError::UnknownVertex(v));
            }
        }
        self.coords = coords;
        Ok(self)
    }

    pub fn data(&self) -> &[VertexId] {
        &self.data
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn edges(&self) -> &[TannerEdge] {
        &self.edges
    }

    pub fn coord(&self, v: VertexId) -> Option<Coord> {
        self.coords.get(&v).copied()
    }

    pub fn coords(&self) -> &BTreeMap<VertexId, Coord> {
        &self.coords
    }

    pub fn is_data(&self, v: VertexId) -> bool {
        self.data_index.contains_key(&v)
    }

    pub fn is_check(&self, v: VertexId) -> bool {
        self.check_index.contains_key(&v)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.is_data(v) || self.is_check(v)
    }

    pub fn check_kind(&self, c: VertexId) -> Option<CheckKind> {
        self.check_index.get(&c).map(|&i| self.checks[i].kind)
    }

    /// One past the largest vertex id, i.e. the qubit count of a dense layout.
    pub fn vertex_bound(&self) -> usize {
        self.data
            .iter()
            .copied()
            .chain(self.checks.iter().map(|c| c.id))
            .max()
            .map_or(0, |m| m + 1)
    }

    pub fn check_edges(&self, c: VertexId) -> impl Iterator<Item = &TannerEdge> {
        self.edges.iter().filter(move |e| e.check == c)
    }

    /// Data support of a check, in edge order.
    pub fn check_support(&self, c: VertexId) -> Vec<VertexId> {
        self.check_edges(c).map(|e| e.data).collect()
    }

    /// True when every check is single-typed and no Y edge exists.
    pub fn is_css(&self) -> bool {
        self.non_css_checks().is_empty()
    }

    pub(crate) fn non_css_checks(&self) -> Vec<VertexId> {
        let mut out = Vec::new();
        for c in &self.checks {
            let labels: BTreeSet<EdgePauli> = self.check_edges(c.id).map(|e| e.pauli).collect();
            let bad = match c.kind {
                CheckKind::Mixed => true,
                CheckKind::X => labels.iter().any(|&p| p != EdgePauli::X),
                CheckKind::Z => labels.iter().any(|&p| p != EdgePauli::Z),
            };
            if bad {
                out.push(c.id);
            }
        }
        out
    }

    /// Split a CSS graph into its X-type and Z-type classical Tanner graphs.
    /// Both halves keep every data vertex.
    pub fn css_subgraphs(&self) -> Result<(TannerGraph, TannerGraph), CodeError> {
        if let Some(e) = self.edges.iter().find(|e| e.pauli == EdgePauli::Y) {
            return Err(CodeError::NotCss(e.check));
        }
        if let Some(&c) = self.non_css_checks().first() {
            return Err(CodeError::NotCss(c));
        }
        let half = |kind: CheckKind, pauli: EdgePauli| -> Result<TannerGraph, CodeError> {
            let checks: Vec<Check> = self.checks.iter().copied().filter(|c| c.kind == kind).collect();
            let edges: Vec<TannerEdge> = self.edges.iter().copied().filter(|e| e.pauli == pauli).collect();
            let mut coords = BTreeMap::new();
            for (&v, &c) in &self.coords {
                if self.is_data(v) || checks.iter().any(|k| k.id == v) {
                    coords.insert(v, c);
                }
            }
            TannerGraph::new(self.data.clone(), checks, edges)?.with_coords(coords)
        };
        Ok((half(CheckKind::X, EdgePauli::X)?, half(CheckKind::Z, EdgePauli::Z)?))
    }

    /// Degree of every vertex. The maximum is the number of router outputs a
    /// module needs to realise the graph.
    pub fn router_fanout(&self) -> BTreeMap<VertexId, usize> {
        let mut deg: BTreeMap<VertexId, usize> = self
            .data
            .iter()
            .copied()
            .chain(self.checks.iter().map(|c| c.id))
            .map(|v| (v, 0))
            .collect();
        for e in &self.edges {
            *deg.get_mut(&e.data).expect("validated edge") += 1;
            *deg.get_mut(&e.check).expect("validated edge") += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.router_fanout().values().copied().max().unwrap_or(0)
    }

    pub fn validate_ldpc(&self, max_degree: usize) -> LdpcReport {
        let fanout = self.router_fanout();
        let degree_violations = fanout
            .iter()
            .filter(|(_, &d)| d > max_degree)
            .map(|(&v, &d)| (v, d))
            .collect();
        let disconnected_data = self.data.iter().copied().filter(|v| fanout[v] == 0).collect();
        LdpcReport {
            max_degree,
            degree_violations,
            non_css_checks: self.non_css_checks(),
            disconnected_data,
        }
    }

    pub fn to_json(&self) -> TannerJson {
        TannerJson {
            data: self.data.clone(),
            checks: self.checks.clone(),
            edges: self.edges.iter().map(|e| (e.data, e.check, e.pauli)).collect(),
            coords: self.coords.iter().map(|(&v, c)| (v, c.row, c.col)).collect(),
        }
    }

    pub fn from_json(json: &TannerJson) -> Result<Self, CodeError> {
        let edges = json
            .edges
            .iter()
            .map(|&(data, check, pauli)| TannerEdge { data, check, pauli })
            .collect();
        let coords = json.coords.iter().map(|&(v, r, c)| (v, Coord::new(r, c))).collect();
        TannerGraph::new(json.data.clone(), json.checks.clone(), edges)?.with_coords(coords)
    }
}

/// Serialized form: `{"data": [...], "checks": [{"id", "kind"}], "edges": [[data, check, "X"|"Y"|"Z"]]}`
/// with an optional `"coords": [[id, row, col]]` list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TannerJson {
    pub data: Vec<VertexId>,
    pub checks: Vec<Check>,
    pub edges: Vec<(VertexId, VertexId, EdgePauli)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coords: Vec<(VertexId, i32, i32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LdpcReport {
    pub max_degree: usize,
    pub degree_violations: Vec<(VertexId, usize)>,
    pub non_css_checks: Vec<VertexId>,
    pub disconnected_data: Vec<VertexId>,
}

impl LdpcReport {
    pub fn passed(&self) -> bool {
        self.degree_violations.is_empty()
            && self.non_css_checks.is_empty()
            && self.disconnected_data.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(data: VertexId, check: VertexId, pauli: EdgePauli) -> TannerEdge {
        TannerEdge { data, check, pauli }
    }

    #[test]
    fn rejects_non_bipartite_edge() {
        let err = TannerGraph::new(
            vec![0, 1],
            vec![Check { id: 2, kind: CheckKind::Z }],
            vec![edge(0, 1, EdgePauli::Z)],
        )
        .unwrap_err();
        assert!(matches!(err, CodeError::NotBipartite { .. }));
    }

    #[test]
    fn rejects_duplicate_pair() {
        let err = TannerGraph::new(
            vec![0],
            vec![Check { id: 1, kind: CheckKind::Mixed }],
            vec![edge(0, 1, EdgePauli::Z), edge(0, 1, EdgePauli::X)],
        )
        .unwrap_err();
        assert_eq!(err, CodeError::DuplicateEdge { data: 0, check: 1 });
    }

    #[test]
    fn empty_graph_passes_vacuously() {
        let g = TannerGraph::new(vec![], vec![], vec![]).unwrap();
        assert!(g.validate_ldpc(4).passed());
        assert_eq!(g.max_degree(), 0);
    }

    #[test]
    fn degree_five_check_is_reported() {
        let data: Vec<_> = (0..5).collect();
        let edges = data.iter().map(|&d| edge(d, 5, EdgePauli::Z)).collect();
        let g = TannerGraph::new(data, vec![Check { id: 5, kind: CheckKind::Z }], edges).unwrap();
        let report = g.validate_ldpc(4);
        assert!(!report.passed());
        assert_eq!(report.degree_violations, vec![(5, 5)]);
    }

    #[test]
    fn isolated_data_vertex_has_zero_fanout() {
        let g = TannerGraph::new(vec![0], vec![], vec![]).unwrap();
        assert_eq!(g.router_fanout()[&0], 0);
        assert_eq!(g.validate_ldpc(4).disconnected_data, vec![0]);
    }

    #[test]
    fn y_edge_blocks_css_split() {
        let g = TannerGraph::new(
            vec![0, 1],
            vec![Check { id: 2, kind: CheckKind::Mixed }],
            vec![edge(0, 2, EdgePauli::Y), edge(1, 2, EdgePauli::Z)],
        )
        .unwrap();
        assert_eq!(g.css_subgraphs().unwrap_err(), CodeError::NotCss(2));
        assert_eq!(g.validate_ldpc(4).non_css_checks, vec![2]);
    }

    #[test]
    fn z_only_graph_has_empty_x_half() {
        let g = TannerGraph::new(
            vec![0, 1],
            vec![Check { id: 2, kind: CheckKind::Z }],
            vec![edge(0, 2, EdgePauli::Z), edge(1, 2, EdgePauli::Z)],
        )
        .unwrap();
        let (gx, gz) = g.css_subgraphs().unwrap();
        assert!(gx.checks().is_empty());
        assert!(gx.edges().is_empty());
        assert_eq!(gz.edges().len(), 2);
        assert_eq!(gx.data().len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let g = TannerGraph::new(
            vec![0, 1],
            vec![Check { id: 2, kind: CheckKind::X }],
            vec![edge(0, 2, EdgePauli::X), edge(1, 2, EdgePauli::X)],
        )
        .unwrap();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"data":[0,1],"checks":[{"id":2,"kind":"X"}],"edges":[[0,2,"X"],[1,2,"X"]]}"#
        );
        let back: TannerJson = serde_json::from_str(&text).unwrap();
        assert_eq!(TannerGraph::from_json(&back).unwrap(), g);
    }
}

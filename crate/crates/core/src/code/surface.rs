use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::tanner::{Check, CheckKind, Coord, EdgePauli, TannerEdge, TannerGraph, VertexId};
use super::CodeError;

/// `[[n, k, d]]` parameters of a stabilizer code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalOperators {
    pub z_support: BTreeSet<VertexId>,
    pub x_support: BTreeSet<VertexId>,
}

#[derive(Debug, Clone)]
pub struct RotatedSurfaceCode {
    pub graph: TannerGraph,
    pub params: CodeParams,
    pub logicals: LogicalOperators,
}

impl RotatedSurfaceCode {
    pub fn distance(&self) -> usize {
        self.params.d
    }
}

/// Build the distance-`d` rotated surface code.
///
/// Data qubit `(r, c)` of the `d × d` grid has id `r·d + c` and doubled
/// coordinate `(2r+1, 2c+1)`. Plaquette `(i, j)` sits at `(2i, 2j)` and is
/// X-type when `i + j` is even. X-type weight-2 checks live on the left and
/// right boundaries, Z-type ones on the top and bottom, so the Z logical is the
/// leftmost column and the X logical the top row.
pub fn build_rotated_surface_code(d: usize) -> Result<RotatedSurfaceCode, CodeError> {
    if d < 3 || d % 2 == 0 {
        return Err(CodeError::InvalidDistance(d));
    }
    let n = d * d;
    let data: Vec<VertexId> = (0..n).collect();
    let mut coords: BTreeMap<VertexId, Coord> = data
        .iter()
        .map(|&q| (q, Coord::new(2 * (q / d) as i32 + 1, 2 * (q % d) as i32 + 1)))
        .collect();

    let mut checks = Vec::with_capacity(n - 1);
    let mut edges = Vec::with_capacity(2 * d * (d - 1));
    let mut next_id = n;
    for i in 0..=d {
        for j in 0..=d {
            let x_type = (i + j) % 2 == 0;
            let row_edge = i == 0 || i == d;
            let col_edge = j == 0 || j == d;
            let keep = match (row_edge, col_edge) {
                (true, true) => false,
                (true, false) => !x_type,
                (false, true) => x_type,
                (false, false) => true,
            };
            if !keep {
                continue;
            }
            let id = next_id;
            next_id += 1;
            let (kind, pauli) = if x_type {
                (CheckKind::X, EdgePauli::X)
            } else {
                (CheckKind::Z, EdgePauli::Z)
            };
            checks.push(Check { id, kind });
            coords.insert(id, Coord::new(2 * i as i32, 2 * j as i32));
            for (r, c) in [(i.wrapping_sub(1), j.wrapping_sub(1)), (i.wrapping_sub(1), j), (i, j.wrapping_sub(1)), (i, j)] {
                if r < d && c < d {
                    edges.push(TannerEdge { data: r * d + c, check: id, pauli });
                }
            }
        }
    }

    let graph = TannerGraph::new(data, checks, edges)?.with_coords(coords)?;
    let logicals = LogicalOperators {
        z_support: (0..d).map(|r| r * d).collect(),
        x_support: (0..d).collect(),
    };
    Ok(RotatedSurfaceCode {
        graph,
        params: CodeParams { n, k: 1, d },
        logicals,
    })
}

/// Symplectic commutation test between a check of `graph` and a Pauli string
/// given as explicit X and Z supports.
pub fn check_commutes_with(
    graph: &TannerGraph,
    check: VertexId,
    x_support: &BTreeSet<VertexId>,
    z_support: &BTreeSet<VertexId>,
) -> bool {
    let mut parity = false;
    for e in graph.check_edges(check) {
        let (has_x, has_z) = match e.pauli {
            EdgePauli::X => (true, false),
            EdgePauli::Y => (true, true),
            EdgePauli::Z => (false, true),
        };
        if has_x && z_support.contains(&e.data) {
            parity ^= true;
        }
        if has_z && x_support.contains(&e.data) {
            parity ^= true;
        }
    }
    !parity
}

/// X and Z supports of a check's stabilizer.
pub fn check_supports(graph: &TannerGraph, check: VertexId) -> (BTreeSet<VertexId>, BTreeSet<VertexId>) {
    let mut xs = BTreeSet::new();
    let mut zs = BTreeSet::new();
    for e in graph.check_edges(check) {
        if matches!(e.pauli, EdgePauli::X | EdgePauli::Y) {
            xs.insert(e.data);
        }
        if matches!(e.pauli, EdgePauli::Z | EdgePauli::Y) {
            zs.insert(e.data);
        }
    }
    (xs, zs)
}

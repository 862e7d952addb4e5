//! Tanner graphs, the rotated surface code and layout scaling estimates.

mod layout;
mod surface;
mod tanner;

use thiserror::Error;

pub use layout::{layout_overhead, LayoutOverhead, LayoutParams};
pub use surface::{
    build_rotated_surface_code, check_commutes_with, check_supports, CodeParams, LogicalOperators,
    RotatedSurfaceCode,
};
pub use tanner::{
    Check, CheckKind, Coord, EdgePauli, LdpcReport, TannerEdge, TannerGraph, TannerJson, VertexId,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("rotated surface code distance must be odd and at least 3, got {0}")]
    InvalidDistance(usize),
    #[error("vertex {0} appears more than once")]
    DuplicateVertex(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("edge ({data}, {check}) does not join a data vertex to a check vertex")]
    NotBipartite { data: VertexId, check: VertexId },
    #[error("edge ({data}, {check}) listed twice")]
    DuplicateEdge { data: VertexId, check: VertexId },
    #[error("check {0} is not a pure X or Z check")]
    NotCss(VertexId),
    #[error("layout parameters must be positive with dimension in 1..=3")]
    InvalidLayout,
}

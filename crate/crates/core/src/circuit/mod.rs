//! Compilation of surface-code memory experiments into Clifford circuits with
//! heralded RUS gates and Pauli noise sites.

mod memory;
mod schedule;
mod text;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CheckKind, CodeError, EdgePauli, VertexId};
use crate::noise::{NoiseError, PauliChannel1, PauliChannel2};

pub use memory::{build_memory_experiment, compile_memory, NoiseParams};
pub use schedule::{cz_schedule, Direction, ScheduleLayer};
pub use text::ParseError;
pub use validate::{validate_circuit, CircuitIssue, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("vertex {0} has no planar coordinates")]
    MissingCoordinates(VertexId),
    #[error("edge ({data}, {check}) is not diagonal to its check")]
    AmbiguousDirection { data: VertexId, check: VertexId },
    #[error("layer {layer} uses qubit {qubit} twice")]
    LayerOverlap { layer: usize, qubit: VertexId },
    #[error("check {0} is not CSS")]
    NotCss(VertexId),
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("unknown basis {0:?}")]
    UnknownBasis(String),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Memory basis: the logical eigenstate that is prepared and measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    /// Check type whose outcomes are deterministic from the first round.
    pub fn check_kind(self) -> CheckKind {
        match self {
            Basis::Z => CheckKind::Z,
            Basis::X => CheckKind::X,
        }
    }
}

impl std::str::FromStr for Basis {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Z" | "z" => Ok(Basis::Z),
            "X" | "x" => Ok(Basis::X),
            _ => Err(CircuitError::UnknownBasis(s.to_string())),
        }
    }
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Basis::Z => "Z",
            Basis::X => "X",
        })
    }
}

/// Check type a detector compares; Z-check detectors see X errors.
pub type DetectorFamily = CheckKind;

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp {
    ResetZ(VertexId),
    Hadamard(VertexId),
    /// Swaps Y and Z; used around Y-type Tanner edges.
    HadamardYZ(VertexId),
    RusCz { data: VertexId, check: VertexId, pauli: EdgePauli, herald: usize },
    PauliNoise1 { qubit: VertexId, channel: PauliChannel1 },
    /// With a herald, a fired herald replaces `channel` by the failure channel.
    PauliNoise2 { a: VertexId, b: VertexId, channel: PauliChannel2, herald: Option<usize> },
    MeasureZ { qubit: VertexId, record: usize },
    Detector { records: Vec<usize>, coords: [i32; 3], family: DetectorFamily },
    ObservableInclude { records: Vec<usize> },
    /// Layer boundary; RusCz gates between two ticks act on disjoint qubits.
    Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeraldSite {
    pub p_fail: f64,
    pub data: VertexId,
    pub check: VertexId,
    pub round: usize,
    pub layer: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorInfo {
    pub records: Vec<usize>,
    pub coords: [i32; 3],
    pub family: DetectorFamily,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyndromeCircuit {
    pub ops: Vec<CircuitOp>,
    pub qubit_count: usize,
    pub distance: usize,
    pub rounds: usize,
    pub basis: Basis,
    /// Indexed by herald id.
    pub herald_sites: Vec<HeraldSite>,
    pub record_count: usize,
    pub detectors: Vec<DetectorInfo>,
    pub observable: Vec<usize>,
}

impl SyndromeCircuit {
    pub fn detector_count(&self) -> usize {
        self.detectors.len()
    }

    pub fn herald_count(&self) -> usize {
        self.herald_sites.len()
    }

    /// Rebuild the detector and observable tables from the op list.
    pub(crate) fn index_annotations(&mut self) {
        self.detectors.clear();
        self.observable.clear();
        for op in &self.ops {
            match op {
                CircuitOp::Detector { records, coords, family } => self.detectors.push(DetectorInfo {
                    records: records.clone(),
                    coords: *coords,
                    family: *family,
                }),
                CircuitOp::ObservableInclude { records } => self.observable.extend(records),
                _ => {}
            }
        }
    }
}

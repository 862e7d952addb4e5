//! Minimum-weight perfect matching decoding with herald-aware edge weights.
//!
//! The detector error model lists every elementary fault with its signature.
//! Splitting each signature by detector family gives one matching graph per
//! family; a fired herald turns the edges of its failure mechanisms into
//! zero-weight erasures for that shot only.

mod blossom;
mod graph;
mod mwpm;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{CircuitOp, DetectorFamily, SyndromeCircuit};
use crate::frame::noise_site_signatures;
use crate::pauli::Pauli;

pub use blossom::{max_weight_matching, min_weight_perfect_matching};
pub use graph::{build_base_graph, build_blind_graph, GraphEdge, MatchingGraph, WEIGHT_SCALE};
pub use mwpm::{
    count_errors, logical_error_rate, match_nodes, mwpm_decode, DecodeResult, DecodeWorkspace, Decoder,
    LogicalErrorEstimate,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecoderError {
    #[error("mechanism {mechanism} flips {count} detectors of the {family:?} family")]
    NotGraphLike { mechanism: usize, family: DetectorFamily, count: usize },
    #[error("flagged detectors cannot be paired or matched to the boundary")]
    NoPerfectMatching,
    #[error("detector {0} is outside the circuit")]
    UnknownDetector(usize),
    #[error("shots must be positive")]
    NoShots,
}

/// One independent fault of the circuit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorMechanism {
    /// Index of the noise op in the circuit.
    pub op: usize,
    pub paulis: Vec<(usize, Pauli)>,
    pub probability: f64,
    pub detectors: Vec<usize>,
    pub observable: bool,
    /// Failure mechanisms exist only when this herald fires.
    pub herald: Option<usize>,
}

/// Detector error model of a circuit. Failure mechanisms appear as an
/// independent Z on each gate qubit with probability 1/2, tagged with their
/// herald, which reproduces the uniform failure channel exactly.
pub fn derive_error_model(c: &SyndromeCircuit) -> Vec<ErrorMechanism> {
    let mut out = Vec::new();
    for site in noise_site_signatures(c) {
        let sig = |k: usize, p: Pauli| {
            let (_, x, z) = &site.qubits[k];
            match p {
                Pauli::I => Default::default(),
                Pauli::X => x.clone(),
                Pauli::Z => z.clone(),
                Pauli::Y => x.xor(z),
            }
        };
        match &c.ops[site.op] {
            CircuitOp::PauliNoise1 { qubit, channel } => {
                for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                    if channel.prob(p) > 0.0 {
                        let s = sig(0, p);
                        out.push(ErrorMechanism {
                            op: site.op,
                            paulis: vec![(*qubit, p)],
                            probability: channel.prob(p),
                            detectors: s.detectors,
                            observable: s.observable,
                            herald: None,
                        });
                    }
                }
            }
            CircuitOp::PauliNoise2 { a, b, channel, herald } => {
                for (p, w) in channel.support() {
                    let s = sig(0, p.a).xor(&sig(1, p.b));
                    let paulis = [(*a, p.a), (*b, p.b)].into_iter().filter(|x| x.1 != Pauli::I).collect();
                    out.push(ErrorMechanism {
                        op: site.op,
                        paulis,
                        probability: w,
                        detectors: s.detectors,
                        observable: s.observable,
                        herald: None,
                    });
                }
                if let Some(h) = *herald {
                    if c.herald_sites[h].p_fail > 0.0 {
                        for (k, q) in [(0, *a), (1, *b)] {
                            let s = sig(k, Pauli::Z);
                            out.push(ErrorMechanism {
                                op: site.op,
                                paulis: vec![(q, Pauli::Z)],
                                probability: 0.5,
                                detectors: s.detectors,
                                observable: s.observable,
                                herald: Some(h),
                            });
                        }
                    }
                }
            }
            _ => {}
        }
    }
    out
}

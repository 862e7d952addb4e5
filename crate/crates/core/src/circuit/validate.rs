use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CircuitOp, SyndromeCircuit};
use crate::frame::gauge_shot;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircuitIssue {
    RecordOutOfOrder { op: usize, record: usize, expected: usize },
    FutureRecord { op: usize, record: usize },
    UnknownHerald { op: usize, herald: usize },
    DuplicateHerald { op: usize, herald: usize },
    LayerOverlap { op: usize, qubit: usize },
    NonDeterministicDetector(usize),
    NonDeterministicObservable,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<CircuitIssue>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

const GAUGE_SHOTS: u64 = 64;

/// Structural checks plus detector determinism. Determinism is tested with
/// noiseless shots in which every reset and measured qubit carries a random Z
/// gauge; a detector that flips under some gauge is not fixed by the circuit.
pub fn validate_circuit(c: &SyndromeCircuit) -> ValidationReport {
    let mut issues = Vec::new();
    let mut next_record = 0;
    let mut heralds = BTreeSet::new();
    let mut layer_qubits = BTreeSet::new();
    for (i, op) in c.ops.iter().enumerate() {
        match op {
            CircuitOp::MeasureZ { record, .. } => {
                if *record != next_record {
                    issues.push(CircuitIssue::RecordOutOfOrder { op: i, record: *record, expected: next_record });
                }
                next_record = next_record.max(*record + 1);
            }
            CircuitOp::Detector { records, .. } | CircuitOp::ObservableInclude { records } => {
                for &r in records.iter().filter(|&&r| r >= next_record) {
                    issues.push(CircuitIssue::FutureRecord { op: i, record: r });
                }
            }
            CircuitOp::RusCz { data, check, herald, .. } => {
                if *herald >= c.herald_count() {
                    issues.push(CircuitIssue::UnknownHerald { op: i, herald: *herald });
                } else if !heralds.insert(*herald) {
                    issues.push(CircuitIssue::DuplicateHerald { op: i, herald: *herald });
                }
                for q in [*data, *check] {
                    if !layer_qubits.insert(q) {
                        issues.push(CircuitIssue::LayerOverlap { op: i, qubit: q });
                    }
                }
            }
            CircuitOp::PauliNoise2 { herald: Some(h), .. } if *h >= c.herald_count() => {
                issues.push(CircuitIssue::UnknownHerald { op: i, herald: *h });
            }
            CircuitOp::Tick => layer_qubits.clear(),
            _ => {}
        }
    }
    if !issues.is_empty() {
        // The gauge pass assumes well-formed records.
        return ValidationReport { issues };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut bad = BTreeSet::new();
    let mut bad_obs = false;
    for _ in 0..GAUGE_SHOTS {
        let shot = gauge_shot(c, &mut rng);
        bad.extend(shot.detectors.iter_ones());
        bad_obs |= shot.observable;
    }
    issues.extend(bad.into_iter().map(CircuitIssue::NonDeterministicDetector));
    if bad_obs {
        issues.push(CircuitIssue::NonDeterministicObservable);
    }
    ValidationReport { issues }
}

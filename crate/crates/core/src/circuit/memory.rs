use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::schedule::cz_schedule;
use super::{Basis, CircuitError, CircuitOp, HeraldSite, SyndromeCircuit};
use crate::code::{build_rotated_surface_code, EdgePauli, LogicalOperators, TannerGraph, VertexId};
use crate::noise::{decoherence_channel, success_channel, NoiseError, RusParams};

/// Circuit-level noise of every RUS gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Heralded probability that the gate does not deliver a CZ.
    pub p_fail: f64,
    pub distinguishability: f64,
    /// Gate duration `t_RUS` over `T2`; applied as idle decoherence before every layer.
    pub t_rus_over_t2: f64,
    #[serde(default)]
    pub t_rus_over_t1: f64,
}

impl NoiseParams {
    pub fn noiseless() -> Self {
        Self { p_fail: 0.0, distinguishability: 0.0, t_rus_over_t2: 0.0, t_rus_over_t1: 0.0 }
    }

    pub fn from_rus(params: &RusParams) -> Result<Self, NoiseError> {
        params.validate()?;
        Ok(Self {
            p_fail: params.p_fail()?,
            distinguishability: params.distinguishability,
            t_rus_over_t2: params.t_rus_over_t2()?,
            t_rus_over_t1: 0.0,
        })
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..=1.0).contains(&self.p_fail) {
            return Err(NoiseError::Domain { name: "p_fail", value: self.p_fail });
        }
        success_channel(self.distinguishability)?;
        decoherence_channel(self.t_rus_over_t2, self.t_rus_over_t1)?;
        Ok(())
    }
}

/// Distance-`d` rotated-surface-code memory experiment.
pub fn build_memory_experiment(
    d: usize,
    basis: Basis,
    rounds: usize,
    noise: &NoiseParams,
) -> Result<SyndromeCircuit, CircuitError> {
    let code = build_rotated_surface_code(d)?;
    compile_memory(&code.graph, &code.logicals, d, basis, rounds, noise)
}

struct Builder {
    ops: Vec<CircuitOp>,
    records: usize,
}

impl Builder {
    fn measure(&mut self, q: VertexId) -> usize {
        let r = self.records;
        self.ops.push(CircuitOp::MeasureZ { qubit: q, record: r });
        self.records += 1;
        r
    }
}

/// Compile a memory experiment on a planar CSS Tanner graph.
pub fn compile_memory(
    graph: &TannerGraph,
    logicals: &LogicalOperators,
    distance: usize,
    basis: Basis,
    rounds: usize,
    noise: &NoiseParams,
) -> Result<SyndromeCircuit, CircuitError> {
    if rounds == 0 {
        return Err(CircuitError::NoRounds);
    }
    if let Some(&c) = graph.non_css_checks().first() {
        return Err(CircuitError::NotCss(c));
    }
    noise.validate()?;
    let layers = cz_schedule(graph)?;
    let idle = decoherence_channel(noise.t_rus_over_t2, noise.t_rus_over_t1)?;
    let gate_noise = success_channel(noise.distinguishability)?;
    let qubit_count = graph.vertex_bound();
    let all_qubits: Vec<VertexId> = graph.data().iter().copied().chain(graph.checks().iter().map(|c| c.id)).collect();
    let memory_kind = basis.check_kind();

    let mut b = Builder { ops: Vec::new(), records: 0 };
    let mut herald_sites = Vec::new();

    for &q in graph.data() {
        b.ops.push(CircuitOp::ResetZ(q));
        if basis == Basis::X {
            b.ops.push(CircuitOp::Hadamard(q));
        }
    }

    let mut last: BTreeMap<VertexId, usize> = BTreeMap::new();
    for round in 0..rounds {
        for c in graph.checks() {
            b.ops.push(CircuitOp::ResetZ(c.id));
            b.ops.push(CircuitOp::Hadamard(c.id));
        }
        for layer in &layers {
            b.ops.push(CircuitOp::Tick);
            let basis_changes: Vec<CircuitOp> = layer
                .edges
                .iter()
                .filter_map(|e| match e.pauli {
                    EdgePauli::X => Some(CircuitOp::Hadamard(e.data)),
                    EdgePauli::Y => Some(CircuitOp::HadamardYZ(e.data)),
                    EdgePauli::Z => None,
                })
                .collect();
            b.ops.extend(basis_changes.iter().cloned());
            if !idle.is_identity() {
                for &q in &all_qubits {
                    b.ops.push(CircuitOp::PauliNoise1 { qubit: q, channel: idle });
                }
            }
            for e in &layer.edges {
                let herald = herald_sites.len();
                herald_sites.push(HeraldSite {
                    p_fail: noise.p_fail,
                    data: e.data,
                    check: e.check,
                    round,
                    layer: layer.index,
                });
                b.ops.push(CircuitOp::RusCz { data: e.data, check: e.check, pauli: e.pauli, herald });
                b.ops.push(CircuitOp::PauliNoise2 { a: e.data, b: e.check, channel: gate_noise, herald: Some(herald) });
            }
            b.ops.extend(basis_changes);
        }
        b.ops.push(CircuitOp::Tick);
        for c in graph.checks() {
            b.ops.push(CircuitOp::Hadamard(c.id));
        }
        let mut current = BTreeMap::new();
        for c in graph.checks() {
            current.insert(c.id, b.measure(c.id));
        }
        for c in graph.checks() {
            let coord = graph.coord(c.id).ok_or(CircuitError::MissingCoordinates(c.id))?;
            let coords = [coord.row, coord.col, round as i32];
            let records = match last.get(&c.id) {
                Some(&prev) => vec![prev, current[&c.id]],
                None if c.kind == memory_kind => vec![current[&c.id]],
                None => continue,
            };
            b.ops.push(CircuitOp::Detector { records, coords, family: c.kind });
        }
        last = current;
    }

    if basis == Basis::X {
        for &q in graph.data() {
            b.ops.push(CircuitOp::Hadamard(q));
        }
    }
    let mut data_record = BTreeMap::new();
    for &q in graph.data() {
        data_record.insert(q, b.measure(q));
    }
    for c in graph.checks().iter().filter(|c| c.kind == memory_kind) {
        let coord = graph.coord(c.id).ok_or(CircuitError::MissingCoordinates(c.id))?;
        let mut records: Vec<usize> = graph.check_support(c.id).iter().map(|q| data_record[q]).collect();
        records.sort_unstable();
        records.push(last[&c.id]);
        b.ops.push(CircuitOp::Detector { records, coords: [coord.row, coord.col, rounds as i32], family: c.kind });
    }
    let support = match basis {
        Basis::Z => &logicals.z_support,
        Basis::X => &logicals.x_support,
    };
    b.ops.push(CircuitOp::ObservableInclude { records: support.iter().map(|q| data_record[q]).collect() });

    let mut circuit = SyndromeCircuit {
        ops: b.ops,
        qubit_count,
        distance,
        rounds,
        basis,
        herald_sites,
        record_count: b.records,
        detectors: Vec::new(),
        observable: Vec::new(),
    };
    circuit.index_annotations();
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_three_counts() {
        let c = build_memory_experiment(3, Basis::Z, 3, &NoiseParams::noiseless()).unwrap();
        assert_eq!(c.detector_count(), 4 + 8 * 2 + 4);
        assert_eq!(c.herald_count(), 4 * 3 * 2 * 3);
        assert_eq!(c.record_count, 8 * 3 + 9);
        assert_eq!(c.observable.len(), 3);
        let x = build_memory_experiment(3, Basis::X, 3, &NoiseParams::noiseless()).unwrap();
        assert_eq!(x.detector_count(), 24);
    }

    #[test]
    fn four_decoherence_layers_per_round() {
        let noise = NoiseParams { t_rus_over_t2: 0.01, ..NoiseParams::noiseless() };
        let c = build_memory_experiment(3, Basis::Z, 2, &noise).unwrap();
        let idle = c.ops.iter().filter(|op| matches!(op, CircuitOp::PauliNoise1 { .. })).count();
        assert_eq!(idle, 4 * 17 * 2);
    }

    #[test]
    fn every_check_measured_once_per_round() {
        let c = build_memory_experiment(5, Basis::Z, 4, &NoiseParams::noiseless()).unwrap();
        let mut count: BTreeMap<VertexId, usize> = BTreeMap::new();
        for op in &c.ops {
            if let CircuitOp::MeasureZ { qubit, .. } = op {
                *count.entry(*qubit).or_default() += 1;
            }
        }
        for q in 25..49 {
            assert_eq!(count[&q], 4);
        }
        for q in 0..25 {
            assert_eq!(count[&q], 1);
        }
    }

    #[test]
    fn rejects_zero_rounds_and_bad_noise() {
        assert_eq!(
            build_memory_experiment(3, Basis::Z, 0, &NoiseParams::noiseless()).unwrap_err(),
            CircuitError::NoRounds
        );
        let bad = NoiseParams { p_fail: 1.5, ..NoiseParams::noiseless() };
        assert!(build_memory_experiment(3, Basis::Z, 3, &bad).is_err());
    }

    #[test]
    fn rejects_non_css_graph() {
        use crate::code::{Check, CheckKind, TannerEdge};
        let g = TannerGraph::new(
            vec![0, 1],
            vec![Check { id: 2, kind: CheckKind::Mixed }],
            vec![
                TannerEdge { data: 0, check: 2, pauli: EdgePauli::X },
                TannerEdge { data: 1, check: 2, pauli: EdgePauli::Z },
            ],
        )
        .unwrap();
        let logicals = LogicalOperators { z_support: [0].into(), x_support: [0].into() };
        assert_eq!(
            compile_memory(&g, &logicals, 1, Basis::Z, 1, &NoiseParams::noiseless()).unwrap_err(),
            CircuitError::NotCss(2)
        );
    }
}

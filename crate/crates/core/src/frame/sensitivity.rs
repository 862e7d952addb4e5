//! Backward sweep giving the signature of X and Z on every noise-site qubit.

use super::Signature;
use crate::circuit::{CircuitOp, SyndromeCircuit};

/// Signatures of the single-qubit components at one noise op.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SiteSignatures {
    pub op: usize,
    /// `(qubit, X signature, Z signature)` per qubit the noise acts on.
    pub qubits: Vec<(usize, Signature, Signature)>,
}

struct Bits {
    words: usize,
    data: Vec<u64>,
}

impl Bits {
    fn new(rows: usize, bits: usize) -> Self {
        let words = bits.div_ceil(64).max(1);
        Self { words, data: vec![0; rows * words] }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn xor_into(&mut self, dst: usize, src: &[u64]) {
        let w = self.words;
        for (d, s) in self.data[dst * w..(dst + 1) * w].iter_mut().zip(src) {
            *d ^= s;
        }
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let w = self.words;
        for k in 0..w {
            self.data[dst * w + k] ^= self.data[src * w + k];
        }
    }

    fn clear(&mut self, r: usize) {
        let w = self.words;
        self.data[r * w..(r + 1) * w].fill(0);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        let w = self.words;
        for k in 0..w {
            self.data.swap(a * w + k, b * w + k);
        }
    }
}

fn to_signature(row: &[u64], detectors: usize) -> Signature {
    let mut sig = Signature::default();
    for (k, &word) in row.iter().enumerate() {
        let mut w = word;
        while w != 0 {
            let bit = k * 64 + w.trailing_zeros() as usize;
            if bit < detectors {
                sig.detectors.push(bit);
            } else if bit == detectors {
                sig.observable = true;
            }
            w &= w - 1;
        }
    }
    sig
}

/// Walk the circuit backwards tracking, per qubit, which detectors (and the
/// observable) an X or a Z at the current point would flip.
pub(crate) fn noise_site_signatures(c: &SyndromeCircuit) -> Vec<SiteSignatures> {
    let dets = c.detector_count();
    let width = dets + 1;
    let mut records = Bits::new(c.record_count, width);
    for (k, d) in c.detectors.iter().enumerate() {
        for &r in &d.records {
            records.data[r * records.words + k / 64] ^= 1 << (k % 64);
        }
    }
    for &r in &c.observable {
        records.data[r * records.words + dets / 64] ^= 1 << (dets % 64);
    }
    // Rows 2q and 2q + 1 hold the X and Z sensitivities of qubit q.
    let mut sens = Bits::new(2 * c.qubit_count, width);
    let mut out = Vec::new();
    for (i, op) in c.ops.iter().enumerate().rev() {
        match *op {
            CircuitOp::MeasureZ { qubit, record } => {
                let row = records.row(record).to_vec();
                sens.xor_into(2 * qubit, &row);
            }
            CircuitOp::ResetZ(q) => {
                sens.clear(2 * q);
                sens.clear(2 * q + 1);
            }
            CircuitOp::Hadamard(q) => sens.swap_rows(2 * q, 2 * q + 1),
            CircuitOp::HadamardYZ(q) => sens.xor_rows(2 * q + 1, 2 * q),
            CircuitOp::RusCz { data, check, .. } => {
                sens.xor_rows(2 * data, 2 * check + 1);
                sens.xor_rows(2 * check, 2 * data + 1);
            }
            CircuitOp::PauliNoise1 { qubit, .. } => out.push(SiteSignatures {
                op: i,
                qubits: vec![(
                    qubit,
                    to_signature(sens.row(2 * qubit), dets),
                    to_signature(sens.row(2 * qubit + 1), dets),
                )],
            }),
            CircuitOp::PauliNoise2 { a, b, .. } => out.push(SiteSignatures {
                op: i,
                qubits: [a, b]
                    .into_iter()
                    .map(|q| (q, to_signature(sens.row(2 * q), dets), to_signature(sens.row(2 * q + 1), dets)))
                    .collect(),
            }),
            _ => {}
        }
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_memory_experiment, Basis, NoiseParams};
    use crate::frame::fault_signature;
    use crate::pauli::Pauli;

    #[test]
    fn backward_sweep_matches_forward_propagation() {
        let noise = NoiseParams { p_fail: 0.1, distinguishability: 0.01, t_rus_over_t2: 0.01, t_rus_over_t1: 0.0 };
        for basis in [Basis::Z, Basis::X] {
            let c = build_memory_experiment(3, basis, 3, &noise).unwrap();
            let sites = noise_site_signatures(&c);
            assert_eq!(sites.len(), 72 + 4 * 17 * 3);
            for s in &sites {
                for (q, x, z) in &s.qubits {
                    assert_eq!(*x, fault_signature(&c, s.op, &[(*q, Pauli::X)]), "op {} qubit {q} X", s.op);
                    assert_eq!(*z, fault_signature(&c, s.op, &[(*q, Pauli::Z)]), "op {} qubit {q} Z", s.op);
                }
            }
        }
    }
}

//! Pauli-frame sampling of syndrome circuits.
//!
//! All gates are Clifford and all noise is Pauli, so a shot is described by
//! the Pauli frame relative to the noiseless reference, whose detectors and
//! observable are all zero.

mod dump;
mod sensitivity;
mod table;

use bitvec::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{CircuitOp, SyndromeCircuit};
use crate::noise::failure_channel;
use crate::pauli::Pauli;

pub use dump::{read_dump, write_dump, DumpError, DumpHeader};
pub use table::FaultSampler;
pub(crate) use sensitivity::noise_site_signatures;

/// X and Z components of a Pauli operator over all qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliFrame {
    x: Vec<bool>,
    z: Vec<bool>,
}

impl PauliFrame {
    pub fn new(qubits: usize) -> Self {
        Self { x: vec![false; qubits], z: vec![false; qubits] }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn pauli(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x[q], self.z[q])
    }

    /// Multiply `p` onto qubit `q`.
    pub fn apply(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x[q] ^= x;
        self.z[q] ^= z;
    }

    pub fn is_identity(&self) -> bool {
        !self.x.iter().chain(self.z.iter()).any(|&b| b)
    }

    /// Conjugate the frame by a Clifford or reset op. Returns the flip of the
    /// outcome for `MeasureZ`; noise and annotations are ignored.
    pub fn propagate(&mut self, op: &CircuitOp) -> Option<bool> {
        match *op {
            CircuitOp::ResetZ(q) => {
                self.x[q] = false;
                self.z[q] = false;
            }
            CircuitOp::Hadamard(q) => std::mem::swap(&mut self.x[q], &mut self.z[q]),
            CircuitOp::HadamardYZ(q) => self.x[q] ^= self.z[q],
            CircuitOp::RusCz { data, check, .. } => {
                self.z[data] ^= self.x[check];
                self.z[check] ^= self.x[data];
            }
            CircuitOp::MeasureZ { qubit, .. } => return Some(self.x[qubit]),
            _ => {}
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShotRecord {
    pub detectors: BitVec<u64, Lsb0>,
    pub observable: bool,
    /// One bit per herald site, set when the gate failed or aborted.
    pub heralds: BitVec<u64, Lsb0>,
}

impl ShotRecord {
    pub fn flagged_detectors(&self) -> Vec<usize> {
        self.detectors.iter_ones().collect()
    }

    pub fn fired_heralds(&self) -> Vec<usize> {
        self.heralds.iter_ones().collect()
    }
}

/// Detector and observable flips caused by a Pauli placed in the circuit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub detectors: Vec<usize>,
    pub observable: bool,
}

impl Signature {
    /// Symmetric difference (the signature of the product of two faults).
    pub fn xor(&self, other: &Signature) -> Signature {
        let mut detectors: Vec<usize> = self
            .detectors
            .iter()
            .filter(|d| !other.detectors.contains(d))
            .chain(other.detectors.iter().filter(|d| !self.detectors.contains(d)))
            .copied()
            .collect();
        detectors.sort_unstable();
        Signature { detectors, observable: self.observable ^ other.observable }
    }
}

/// Where noise comes from while walking the circuit.
enum Source<'a, R: Rng + ?Sized> {
    Noisy(&'a mut R),
    /// Noiseless, with a random Z gauge after every reset and measurement.
    Gauge(&'a mut R),
}

struct Walk {
    frame: PauliFrame,
    measurements: Vec<bool>,
    detectors: BitVec<u64, Lsb0>,
    observable: bool,
    heralds: BitVec<u64, Lsb0>,
}

impl Walk {
    fn new(c: &SyndromeCircuit) -> Self {
        Self {
            frame: PauliFrame::new(c.qubit_count),
            measurements: vec![false; c.record_count],
            detectors: BitVec::with_capacity(c.detector_count()),
            observable: false,
            heralds: bitvec![u64, Lsb0; 0; c.herald_count()],
        }
    }

    fn annotate(&mut self, op: &CircuitOp) {
        match op {
            CircuitOp::Detector { records, .. } => {
                let parity = records.iter().fold(false, |acc, &r| acc ^ self.measurements[r]);
                self.detectors.push(parity);
            }
            CircuitOp::ObservableInclude { records } => {
                self.observable ^= records.iter().fold(false, |acc, &r| acc ^ self.measurements[r]);
            }
            _ => {}
        }
    }

    fn finish(self) -> ShotRecord {
        ShotRecord { detectors: self.detectors, observable: self.observable, heralds: self.heralds }
    }
}

fn walk<R: Rng + ?Sized>(c: &SyndromeCircuit, mut source: Source<'_, R>) -> ShotRecord {
    let failure = failure_channel();
    let mut w = Walk::new(c);
    for op in &c.ops {
        match op {
            CircuitOp::RusCz { herald, .. } => {
                if let Source::Noisy(rng) = &mut source {
                    let p = c.herald_sites[*herald].p_fail;
                    if p > 0.0 && rng.random::<f64>() < p {
                        w.heralds.set(*herald, true);
                    }
                }
                w.frame.propagate(op);
            }
            CircuitOp::PauliNoise1 { qubit, channel } => {
                if let Source::Noisy(rng) = &mut source {
                    if !channel.is_identity() {
                        w.frame.apply(*qubit, channel.sample(*rng));
                    }
                }
            }
            CircuitOp::PauliNoise2 { a, b, channel, herald } => {
                if let Source::Noisy(rng) = &mut source {
                    let ch = match herald {
                        Some(h) if w.heralds[*h] => &failure,
                        _ => channel,
                    };
                    if !ch.is_identity() {
                        let p = ch.sample(*rng);
                        w.frame.apply(*a, p.a);
                        w.frame.apply(*b, p.b);
                    }
                }
            }
            CircuitOp::MeasureZ { qubit, record } => {
                w.measurements[*record] = w.frame.x[*qubit];
                if let Source::Gauge(rng) = &mut source {
                    w.frame.z[*qubit] = rng.random();
                }
            }
            CircuitOp::ResetZ(q) => {
                w.frame.propagate(op);
                if let Source::Gauge(rng) = &mut source {
                    w.frame.z[*q] = rng.random();
                }
            }
            CircuitOp::Detector { .. } | CircuitOp::ObservableInclude { .. } => w.annotate(op),
            _ => {
                w.frame.propagate(op);
            }
        }
    }
    w.finish()
}

/// One noisy shot.
pub fn sample_shot<R: Rng + ?Sized>(c: &SyndromeCircuit, rng: &mut R) -> ShotRecord {
    walk(c, Source::Noisy(rng))
}

/// Noiseless shot with random Z gauges on freshly reset and measured qubits.
/// Any nonzero detector or observable reveals a non-deterministic annotation.
pub fn gauge_shot<R: Rng + ?Sized>(c: &SyndromeCircuit, rng: &mut R) -> ShotRecord {
    walk(c, Source::Gauge(rng))
}

/// Per-shot generator: ChaCha8 keyed by the master seed, stream = shot index.
pub fn shot_rng(master_seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(shot);
    rng
}

/// Shots `0..shots`; record `i` depends only on `(master_seed, i)`.
pub fn sample_batch(c: &SyndromeCircuit, shots: usize, master_seed: u64) -> Vec<ShotRecord> {
    sample_range(c, 0, shots, master_seed)
}

/// Shots `start..start + count` of the stream family of `master_seed`.
pub fn sample_range(c: &SyndromeCircuit, start: usize, count: usize, master_seed: u64) -> Vec<ShotRecord> {
    (start..start + count)
        .into_par_iter()
        .map(|i| sample_shot(c, &mut shot_rng(master_seed, i as u64)))
        .collect()
}

/// Noiseless run with `paulis` multiplied onto the frame right after op
/// `after_op`.
pub fn fault_signature(c: &SyndromeCircuit, after_op: usize, paulis: &[(usize, Pauli)]) -> Signature {
    let mut frame = PauliFrame::new(c.qubit_count);
    for &(q, p) in paulis {
        frame.apply(q, p);
    }
    let mut measurements = vec![false; c.record_count];
    let mut detector = c.ops[..=after_op].iter().filter(|op| matches!(op, CircuitOp::Detector { .. })).count();
    let mut sig = Signature::default();
    let mut any_flip = false;
    for op in &c.ops[after_op + 1..] {
        if matches!(op, CircuitOp::Tick) && !any_flip && frame.is_identity() {
            break;
        }
        match op {
            CircuitOp::MeasureZ { qubit, record } => {
                measurements[*record] = frame.x[*qubit];
                any_flip |= frame.x[*qubit];
            }
            CircuitOp::Detector { records, .. } => {
                if records.iter().fold(false, |acc, &r| acc ^ measurements[r]) {
                    sig.detectors.push(detector);
                }
                detector += 1;
            }
            CircuitOp::ObservableInclude { records } => {
                sig.observable ^= records.iter().fold(false, |acc, &r| acc ^ measurements[r]);
            }
            _ => {
                frame.propagate(op);
            }
        }
    }
    sig
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_memory_experiment, Basis, NoiseParams};
    use crate::code::EdgePauli;

    #[test]
    fn hadamard_twice_is_identity() {
        let mut f = PauliFrame::new(1);
        f.apply(0, Pauli::Y);
        let before = f.clone();
        f.propagate(&CircuitOp::Hadamard(0));
        assert_eq!(f.pauli(0), Pauli::Y);
        f.apply(0, Pauli::X);
        f.propagate(&CircuitOp::Hadamard(0));
        assert_eq!(f.pauli(0), Pauli::X);
        f.apply(0, Pauli::Z);
        f.propagate(&CircuitOp::Hadamard(0));
        f.propagate(&CircuitOp::Hadamard(0));
        assert_eq!(f, before);
    }

    #[test]
    fn cz_spreads_x_to_z() {
        let cz = CircuitOp::RusCz { data: 0, check: 1, pauli: EdgePauli::Z, herald: 0 };
        let mut f = PauliFrame::new(2);
        f.apply(0, Pauli::X);
        f.propagate(&cz);
        assert_eq!((f.pauli(0), f.pauli(1)), (Pauli::X, Pauli::Z));
        f.propagate(&cz);
        assert_eq!((f.pauli(0), f.pauli(1)), (Pauli::X, Pauli::I));
    }

    #[test]
    fn hadamard_yz_swaps_y_and_z() {
        let mut f = PauliFrame::new(1);
        f.apply(0, Pauli::Z);
        f.propagate(&CircuitOp::HadamardYZ(0));
        assert_eq!(f.pauli(0), Pauli::Y);
        f.propagate(&CircuitOp::HadamardYZ(0));
        assert_eq!(f.pauli(0), Pauli::Z);
    }

    #[test]
    fn zero_noise_shots_are_zero() {
        let c = build_memory_experiment(3, Basis::Z, 3, &NoiseParams::noiseless()).unwrap();
        for s in sample_batch(&c, 50, 1) {
            assert!(s.detectors.not_any() && !s.observable && s.heralds.not_any());
            assert_eq!(s.detectors.len(), c.detector_count());
        }
    }

    #[test]
    fn batches_are_reproducible() {
        let noise = NoiseParams { p_fail: 0.05, distinguishability: 0.02, t_rus_over_t2: 0.01, t_rus_over_t1: 0.0 };
        let c = build_memory_experiment(3, Basis::Z, 3, &noise).unwrap();
        let a = sample_batch(&c, 200, 9);
        assert_eq!(a, sample_batch(&c, 200, 9));
        assert_ne!(a, sample_batch(&c, 200, 10));
        assert_eq!(a[50..60], sample_range(&c, 50, 10, 9)[..]);
    }

    #[test]
    fn signature_xor() {
        let a = Signature { detectors: vec![1, 4, 7], observable: true };
        let b = Signature { detectors: vec![4, 9], observable: true };
        assert_eq!(a.xor(&b), Signature { detectors: vec![1, 7, 9], observable: false });
    }
}

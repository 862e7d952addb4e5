//! Batch sampling from a precomputed fault table.
//!
//! The detector and observable flips of a Pauli fault are linear in its X and
//! Z components, so each noise site stores the signatures of its single-qubit
//! components once. Sites sharing a channel are visited with geometric skips,
//! making the cost of a shot proportional to the number of faults rather than
//! the number of sites.

use std::collections::BTreeMap;

use bitvec::prelude::*;
use rand::Rng;
use rayon::prelude::*;

use super::sensitivity::noise_site_signatures;
use super::{shot_rng, ShotRecord, Signature};
use crate::circuit::{CircuitOp, SyndromeCircuit};
use crate::noise::PauliChannel2;
use crate::pauli::{Pauli, Pauli2};

#[derive(Debug, Clone, Copy)]
enum Outcome {
    /// Failed or aborted gate: herald set, independent Z on each qubit w.p. 1/2.
    Herald,
    /// Components as bits `x_a, z_a, x_b, z_b` (low to high).
    Pauli(u8),
}

#[derive(Debug, Clone, Copy)]
struct Site {
    herald: Option<usize>,
    /// Signature indices of `X_a, Z_a, X_b, Z_b`.
    components: [u32; 4],
}

#[derive(Debug, Clone)]
struct SiteClass {
    /// Per-site probability that anything happens.
    q: f64,
    /// Cumulative conditional outcome distribution.
    outcomes: Vec<(f64, Outcome)>,
    sites: Vec<Site>,
}

#[derive(Debug, Clone)]
struct SigTable {
    offsets: Vec<u32>,
    detectors: Vec<u32>,
    observable: Vec<bool>,
}

/// Exact sampler equivalent in distribution to [`super::sample_shot`].
#[derive(Debug, Clone)]
pub struct FaultSampler {
    detector_count: usize,
    herald_count: usize,
    classes: Vec<SiteClass>,
    sigs: SigTable,
}

fn gate_key(p_fail: f64, channel: &PauliChannel2) -> Vec<u64> {
    [2, p_fail.to_bits()].into_iter().chain(channel.probs().iter().map(|p| p.to_bits())).collect()
}

fn gate_class(p_fail: f64, channel: &PauliChannel2) -> SiteClass {
    let p_nz = 1.0 - channel.prob(Pauli2 { a: Pauli::I, b: Pauli::I });
    let q = p_fail + (1.0 - p_fail) * p_nz;
    let mut acc = 0.0;
    let mut outcomes = Vec::new();
    if p_fail > 0.0 {
        acc += p_fail / q;
        outcomes.push((acc, Outcome::Herald));
    }
    for (p, w) in channel.support() {
        acc += (1.0 - p_fail) * w / q;
        outcomes.push((acc, Outcome::Pauli(pauli_bits(p))));
    }
    SiteClass { q, outcomes, sites: Vec::new() }
}

fn pauli_bits(p: Pauli2) -> u8 {
    let (xa, za) = p.a.bits();
    let (xb, zb) = p.b.bits();
    u8::from(xa) | u8::from(za) << 1 | u8::from(xb) << 2 | u8::from(zb) << 3
}

impl FaultSampler {
    pub fn new(c: &SyndromeCircuit) -> Self {
        // Signature 0 is empty; unused component slots point at it.
        let mut sigs = SigTable { offsets: vec![0, 0], detectors: Vec::new(), observable: vec![false] };
        let mut add_sig = |s: &Signature| -> u32 {
            sigs.detectors.extend(s.detectors.iter().map(|&d| d as u32));
            sigs.offsets.push(sigs.detectors.len() as u32);
            sigs.observable.push(s.observable);
            (sigs.observable.len() - 1) as u32
        };
        // Keyed by the exact bit patterns of the site parameters.
        let mut classes: BTreeMap<Vec<u64>, SiteClass> = BTreeMap::new();
        let mut covered = vec![false; c.herald_count()];
        for site in noise_site_signatures(c) {
            let mut components = [0u32; 4];
            for (k, (_, x, z)) in site.qubits.iter().enumerate() {
                components[2 * k] = add_sig(x);
                components[2 * k + 1] = add_sig(z);
            }
            match &c.ops[site.op] {
                CircuitOp::PauliNoise1 { channel, .. } => {
                    if channel.is_identity() {
                        continue;
                    }
                    let probs = channel.probs();
                    let key: Vec<u64> = std::iter::once(1).chain(probs.iter().map(|p| p.to_bits())).collect();
                    let class = classes.entry(key).or_insert_with(|| {
                        let q = 1.0 - probs[0];
                        let mut acc = 0.0;
                        let outcomes = Pauli::ALL[1..]
                            .iter()
                            .filter(|p| probs[p.index()] > 0.0)
                            .map(|&p| {
                                acc += probs[p.index()] / q;
                                (acc, Outcome::Pauli(pauli_bits(Pauli2 { a: p, b: Pauli::I })))
                            })
                            .collect();
                        SiteClass { q, outcomes, sites: Vec::new() }
                    });
                    class.sites.push(Site { herald: None, components });
                }
                CircuitOp::PauliNoise2 { channel, herald, .. } => {
                    if let Some(h) = herald {
                        covered[*h] = true;
                    }
                    let p_fail = herald.map_or(0.0, |h| c.herald_sites[h].p_fail);
                    if channel.is_identity() && p_fail == 0.0 {
                        continue;
                    }
                    classes
                        .entry(gate_key(p_fail, channel))
                        .or_insert_with(|| gate_class(p_fail, channel))
                        .sites
                        .push(Site { herald: *herald, components });
                }
                _ => unreachable!("noise sites are noise ops"),
            }
        }
        // Heralds with no noise op still fire.
        for (h, site) in c.herald_sites.iter().enumerate() {
            if !covered[h] && site.p_fail > 0.0 {
                let id = PauliChannel2::identity();
                classes
                    .entry(gate_key(site.p_fail, &id))
                    .or_insert_with(|| gate_class(site.p_fail, &id))
                    .sites
                    .push(Site { herald: Some(h), components: [0; 4] });
            }
        }
        Self {
            detector_count: c.detector_count(),
            herald_count: c.herald_count(),
            classes: classes.into_values().collect(),
            sigs,
        }
    }

    fn flip(&self, sig: u32, dets: &mut [u64], obs: &mut bool) {
        let s = sig as usize;
        for &d in &self.sigs.detectors[self.sigs.offsets[s] as usize..self.sigs.offsets[s + 1] as usize] {
            dets[d as usize / 64] ^= 1 << (d % 64);
        }
        *obs ^= self.sigs.observable[s];
    }

    pub fn sample_shot<R: Rng + ?Sized>(&self, rng: &mut R) -> ShotRecord {
        let mut dets = vec![0u64; self.detector_count.div_ceil(64)];
        let mut heralds = bitvec![u64, Lsb0; 0; self.herald_count];
        let mut obs = false;
        for class in &self.classes {
            if class.q <= 0.0 {
                continue;
            }
            let log_miss = (-class.q).ln_1p();
            let mut i = 0usize;
            loop {
                if class.q < 1.0 {
                    let u: f64 = rng.random();
                    let skip = ((1.0 - u).ln() / log_miss).floor();
                    if skip >= (class.sites.len() - i) as f64 {
                        break;
                    }
                    i += skip as usize;
                }
                if i >= class.sites.len() {
                    break;
                }
                let site = class.sites[i];
                let u: f64 = rng.random();
                let outcome = class
                    .outcomes
                    .iter()
                    .find(|(c, _)| u < *c)
                    .or(class.outcomes.last())
                    .map(|o| o.1)
                    .expect("class has outcomes");
                let bits = match outcome {
                    Outcome::Herald => {
                        if let Some(h) = site.herald {
                            heralds.set(h, true);
                        }
                        let r: u8 = rng.random();
                        (r & 1) << 1 | (r & 2) << 2
                    }
                    Outcome::Pauli(b) => b,
                };
                for k in 0..4 {
                    if bits >> k & 1 == 1 {
                        self.flip(site.components[k], &mut dets, &mut obs);
                    }
                }
                i += 1;
            }
        }
        let mut detectors = BitVec::from_vec(dets);
        detectors.truncate(self.detector_count);
        ShotRecord { detectors, observable: obs, heralds }
    }

    /// Shots `start..start + count`; shot `i` uses `shot_rng(master_seed, i)`.
    pub fn sample_range(&self, start: usize, count: usize, master_seed: u64) -> Vec<ShotRecord> {
        (start..start + count)
            .into_par_iter()
            .map(|i| self.sample_shot(&mut shot_rng(master_seed, i as u64)))
            .collect()
    }

    pub fn sample_batch(&self, shots: usize, master_seed: u64) -> Vec<ShotRecord> {
        self.sample_range(0, shots, master_seed)
    }
}

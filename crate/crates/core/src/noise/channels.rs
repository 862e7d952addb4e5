use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rates::check_probability;
use super::NoiseError;
use crate::pauli::{Pauli, Pauli2};
use crate::quantum::{pauli2_matrix, pauli_matrix, Superop};

const SUM_TOL: f64 = 1e-12;

fn check_distribution(probs: &[f64]) -> Result<(), NoiseError> {
    if probs.iter().any(|&p| !(p >= 0.0)) {
        return Err(NoiseError::NotADistribution);
    }
    if (probs.iter().sum::<f64>() - 1.0).abs() > SUM_TOL {
        return Err(NoiseError::NotADistribution);
    }
    Ok(())
}

/// Draw an index from a small discrete distribution.
fn draw<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding slack lands on the last nonzero entry.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Single-qubit Pauli channel `ρ ↦ Σ p_P PρP`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel1 {
    probs: [f64; 4],
}

impl PauliChannel1 {
    pub fn new(p_i: f64, p_x: f64, p_y: f64, p_z: f64) -> Result<Self, NoiseError> {
        let probs = [p_i, p_x, p_y, p_z];
        check_distribution(&probs)?;
        Ok(Self { probs })
    }

    pub fn identity() -> Self {
        Self { probs: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn dephasing(p_z: f64) -> Result<Self, NoiseError> {
        check_probability("p_z", p_z)?;
        Self::new(1.0 - p_z, 0.0, 0.0, p_z)
    }

    pub fn prob(&self, p: Pauli) -> f64 {
        self.probs[p.index()]
    }

    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    pub fn is_identity(&self) -> bool {
        self.probs[1..].iter().all(|&p| p == 0.0)
    }

    /// `self` then `next`; Pauli channels compose by group convolution.
    pub fn then(&self, next: &PauliChannel1) -> PauliChannel1 {
        let mut probs = [0.0; 4];
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                probs[a.mul(b).index()] += self.prob(a) * next.prob(b);
            }
        }
        PauliChannel1 { probs }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        Pauli::from_index(draw(&self.probs, rng))
    }

    pub fn to_superop(&self) -> Superop {
        Pauli::ALL
            .iter()
            .fold(Superop::zero(2), |acc, &p| acc.add(&Superop::unitary(&pauli_matrix(p)).scale(self.prob(p))))
    }
}

/// Two-qubit Pauli channel over `Pauli2` labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel2 {
    probs: [f64; 16],
}

impl PauliChannel2 {
    pub fn new(probs: [f64; 16]) -> Result<Self, NoiseError> {
        check_distribution(&probs)?;
        Ok(Self { probs })
    }

    pub fn identity() -> Self {
        let mut probs = [0.0; 16];
        probs[0] = 1.0;
        Self { probs }
    }

    pub fn prob(&self, p: Pauli2) -> f64 {
        self.probs[p.index()]
    }

    pub fn probs(&self) -> &[f64; 16] {
        &self.probs
    }

    pub fn is_identity(&self) -> bool {
        self.probs[1..].iter().all(|&p| p == 0.0)
    }

    /// Nonzero non-identity terms.
    pub fn support(&self) -> impl Iterator<Item = (Pauli2, f64)> + '_ {
        Pauli2::all().skip(1).map(|p| (p, self.prob(p))).filter(|&(_, q)| q > 0.0)
    }

    pub fn then(&self, next: &PauliChannel2) -> PauliChannel2 {
        let mut probs = [0.0; 16];
        for a in Pauli2::all() {
            for b in Pauli2::all() {
                probs[a.mul(b).index()] += self.prob(a) * next.prob(b);
            }
        }
        PauliChannel2 { probs }
    }

    /// Conjugate every term by CZ, i.e. the channel seen through `CZ · CZ`.
    pub fn conjugated_by_cz(&self) -> PauliChannel2 {
        let mut probs = [0.0; 16];
        for p in Pauli2::all() {
            let (ax, az) = p.a.bits();
            let (bx, bz) = p.b.bits();
            let q = Pauli2::new(Pauli::from_bits(ax, az ^ bx), Pauli::from_bits(bx, bz ^ ax));
            probs[q.index()] += self.prob(p);
        }
        PauliChannel2 { probs }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli2 {
        Pauli2::from_index(draw(&self.probs, rng))
    }

    pub fn to_superop(&self) -> Superop {
        Pauli2::all().fold(Superop::zero(4), |acc, p| {
            acc.add(&Superop::unitary(&pauli2_matrix(p)).scale(self.prob(p)))
        })
    }

    pub fn max_abs_diff(&self, other: &PauliChannel2) -> f64 {
        self.probs.iter().zip(other.probs.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn dephasing_pair(weight: f64) -> [f64; 16] {
    let mut probs = [0.0; 16];
    probs[Pauli2::new(Pauli::I, Pauli::I).index()] = 1.0 - 3.0 * weight;
    probs[Pauli2::new(Pauli::Z, Pauli::I).index()] = weight;
    probs[Pauli2::new(Pauli::I, Pauli::Z).index()] = weight;
    probs[Pauli2::new(Pauli::Z, Pauli::Z).index()] = weight;
    probs
}

/// Full phase erasure of both emitters after a failed (or aborted) gate.
pub fn failure_channel() -> PauliChannel2 {
    PauliChannel2 { probs: dephasing_pair(0.25) }
}

/// Error applied after the CZ of a successful gate: `(1−D)ρ + D·C_Za C_Zb(ρ)`.
pub fn success_channel(distinguishability: f64) -> Result<PauliChannel2, NoiseError> {
    let d = check_probability("D", distinguishability)?;
    Ok(PauliChannel2 { probs: dephasing_pair(d / 4.0) })
}

/// Pauli channel of a spin idling for `t`, given `t/T2` and `t/T1`.
///
/// Uses `T1 = 1/(2γ)` and `T2 = 1/(γ+γ*)`. `t_over_t1 = 0` is the pure
/// dephasing regime with `p_Z = (1 − e^{−t/T2})/2`. Parameters with
/// `T2 > 2·T1` are unphysical and rejected.
pub fn decoherence_channel(t_over_t2: f64, t_over_t1: f64) -> Result<PauliChannel1, NoiseError> {
    if !(t_over_t2 >= 0.0) {
        return Err(NoiseError::Domain { name: "t_over_t2", value: t_over_t2 });
    }
    if !(t_over_t1 >= 0.0) {
        return Err(NoiseError::Domain { name: "t_over_t1", value: t_over_t1 });
    }
    if t_over_t2 < t_over_t1 / 2.0 {
        return Err(NoiseError::T2ExceedsTwiceT1);
    }
    let flip = -(-t_over_t1).exp_m1() / 4.0;
    let p_z = -(-t_over_t2).exp_m1() / 2.0 - flip;
    let p_i = 1.0 - 2.0 * flip - p_z;
    PauliChannel1::new(p_i, flip, flip, p_z)
}

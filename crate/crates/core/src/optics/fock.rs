use std::collections::BTreeMap;

use num_complex::Complex64;

use super::OpticsError;
use crate::quantum::{c, CMatrix, ZERO};

/// Number of interferometer modes (two dual rails).
pub const MODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Emitter {
    A,
    B,
}

impl Emitter {
    /// First rail of the emitter's dual-rail pair.
    fn first_mode(self) -> u8 {
        match self {
            Emitter::A => 0,
            Emitter::B => 2,
        }
    }

    fn spin_bit(self, spins: u8) -> u8 {
        match self {
            Emitter::A => (spins >> 1) & 1,
            Emitter::B => spins & 1,
        }
    }
}

/// Internal (non-encoding) state of an emitted photon over two orthogonal
/// labels. Label 0 is the reference shared with the other emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalState {
    amps: [f64; 2],
}

impl InternalState {
    pub fn reference() -> Self {
        Self { amps: [1.0, 0.0] }
    }

    /// `√(1−D)|ref⟩ + √D|⊥⟩`, giving squared overlap `1 − D` with the reference.
    pub fn distinguishable(d: f64) -> Result<Self, OpticsError> {
        if !(0.0..=1.0).contains(&d) {
            return Err(OpticsError::Domain { name: "D", value: d });
        }
        Ok(Self { amps: [(1.0 - d).sqrt(), d.sqrt()] })
    }
}

/// Mode label packing (spatial slot, internal label).
pub(crate) fn mode(spatial: u8, internal: u8) -> u8 {
    spatial * 2 + internal
}

pub(crate) fn spatial_of(m: u8) -> u8 {
    m / 2
}

type Monomial = Vec<u8>;

/// Spin–photon state written as a polynomial in photon creation operators
/// acting on vacuum, one polynomial per two-spin basis label `2a + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    input: [Complex64; 4],
    terms: BTreeMap<(u8, Monomial), Complex64>,
}

impl JointState {
    /// Photon vacuum with the spins in `Σ ket[s] |s⟩`.
    pub fn from_spins(ket: [Complex64; 4]) -> Self {
        let terms = (0..4u8)
            .filter(|&s| ket[s as usize] != ZERO)
            .map(|s| ((s, Vec::new()), ket[s as usize]))
            .collect();
        Self { input: ket, terms }
    }

    /// Spin amplitudes the photons were emitted from.
    pub fn spin_input(&self) -> [Complex64; 4] {
        self.input
    }

    /// Both spins in `|+⟩`; every spin branch is present with weight 1/2.
    pub fn plus_plus() -> Self {
        Self::from_spins([c(0.5); 4])
    }

    /// Photon emission `|0⟩|0⟩_ph⟨0| + |1⟩|1⟩_ph⟨1|` into the emitter's dual rail.
    pub fn emit(&self, emitter: Emitter, internal: InternalState) -> Result<Self, OpticsError> {
        let first = emitter.first_mode();
        let mut terms = BTreeMap::new();
        for ((s, mono), &amp) in &self.terms {
            if mono.iter().any(|&m| spatial_of(m) == first || spatial_of(m) == first + 1) {
                return Err(OpticsError::OccupiedMode(first));
            }
            let rail = first + emitter.spin_bit(*s);
            for (label, &w) in internal.amps.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let mut m = mono.clone();
                m.push(mode(rail, label as u8));
                m.sort_unstable();
                *terms.entry((*s, m)).or_insert(ZERO) += amp * w;
            }
        }
        Ok(Self { input: self.input, terms })
    }

    /// Apply a linear map on creation operators, `a†_m ↦ Σ_j f(m)_j a†_j`.
    fn map_modes(&self, f: impl Fn(u8) -> Vec<(u8, Complex64)>) -> Self {
        let mut terms = BTreeMap::new();
        for ((s, mono), &amp) in &self.terms {
            let mut partial: Vec<(Monomial, Complex64)> = vec![(Vec::new(), amp)];
            for &m in mono {
                let images = f(m);
                let mut next = Vec::with_capacity(partial.len() * images.len());
                for (pm, pa) in &partial {
                    for &(j, w) in &images {
                        let mut nm = pm.clone();
                        nm.push(j);
                        next.push((nm, pa * w));
                    }
                }
                partial = next;
            }
            for (mut m, a) in partial {
                m.sort_unstable();
                *terms.entry((*s, m)).or_insert(ZERO) += a;
            }
        }
        terms.retain(|_, a| a.norm() > 1e-300);
        Self { input: self.input, terms }
    }

    /// Beamsplitter loss to a private reservoir per mode: emitter A's rails
    /// transmit with `eta_a`, emitter B's with `eta_b`.
    pub fn apply_loss(&self, eta_a: f64, eta_b: f64) -> Result<Self, OpticsError> {
        for (name, v) in [("eta_a", eta_a), ("eta_b", eta_b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(OpticsError::Domain { name, value: v });
            }
        }
        Ok(self.map_modes(|m| {
            let s = spatial_of(m);
            let internal = m % 2;
            if s >= MODES as u8 {
                return vec![(m, c(1.0))];
            }
            let eta = if s < 2 { eta_a } else { eta_b };
            vec![
                (mode(s, internal), c(eta.sqrt())),
                (mode(s + MODES as u8, internal), c((1.0 - eta).sqrt())),
            ]
        }))
    }

    /// Apply `U` to the interferometer modes: `a†_i ↦ Σ_k U[k][i] a†_k`.
    pub fn apply_interferometer(&self, u: &super::Interferometer) -> Self {
        let m = u.matrix();
        self.map_modes(|md| {
            let s = spatial_of(md);
            let internal = md % 2;
            if s >= MODES as u8 {
                return vec![(md, c(1.0))];
            }
            (0..MODES as u8).map(|k| (mode(k, internal), m[(k as usize, s as usize)])).collect()
        })
    }

    /// Fock-basis amplitudes of one spin branch. A monomial with occupation
    /// numbers `n_i` is `Π √(n_i!)` times the normalised Fock state.
    pub fn fock_branch(&self, spins: u8) -> BTreeMap<Monomial, Complex64> {
        self.terms
            .range((spins, Vec::new())..)
            .take_while(|((s, _), _)| *s == spins)
            .map(|((_, m), &a)| (m.clone(), a * occupation_norm(m)))
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|((_, m), a)| a.norm_sqr() * occupation_norm(m).powi(2)).sum()
    }

    /// Spin density matrix with every photon traced out.
    pub fn reduced_spin_density(&self) -> CMatrix {
        let branches: Vec<_> = (0..4u8).map(|s| self.fock_branch(s)).collect();
        CMatrix::from_fn(4, 4, |i, j| {
            branches[i]
                .iter()
                .filter_map(|(m, a)| branches[j].get(m).map(|b| a * b.conj()))
                .sum()
        })
    }
}

fn occupation_norm(mono: &[u8]) -> f64 {
    let mut norm = 1.0;
    let mut run = 1;
    for w in mono.windows(2) {
        if w[0] == w[1] {
            run += 1;
            norm *= f64::from(run);
        } else {
            run = 1;
        }
    }
    norm.sqrt()
}

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::fock::{spatial_of, Emitter, InternalState, JointState, MODES};
use super::{Interferometer, OpticsError};
use crate::noise::failure_channel;
use crate::quantum::{c, cz, identity, pauli2_matrix, s_gate, CMatrix, Superop, ZERO};
use crate::pauli::{Pauli, Pauli2};

/// Detector click pattern: two detections `(k, l)` with `k ≤ l`, or the
/// loss class `F` (fewer than two photons detected).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DetectionPattern {
    Pair(u8, u8),
    Lost,
}

impl DetectionPattern {
    pub fn pair(k: u8, l: u8) -> Self {
        DetectionPattern::Pair(k.min(l), k.max(l))
    }

    /// All ten two-click patterns followed by `F`.
    pub fn all() -> Vec<DetectionPattern> {
        let mut v = Vec::with_capacity(11);
        for k in 0..MODES as u8 {
            for l in k..MODES as u8 {
                v.push(DetectionPattern::Pair(k, l));
            }
        }
        v.push(DetectionPattern::Lost);
        v
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectionPattern::Pair(k, l) => write!(f, "({k},{l})"),
            DetectionPattern::Lost => write!(f, "F"),
        }
    }
}

/// Unnormalised conditional map of one outcome class. The map is the Schur
/// multiplier `ρ ↦ K ∘ ρ` in the two-spin computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMap {
    pub schur: CMatrix,
}

impl ConditionalMap {
    fn zero() -> Self {
        Self { schur: CMatrix::zeros(4, 4) }
    }

    /// Outcome probability for the maximally mixed spin input.
    pub fn mixed_probability(&self) -> f64 {
        self.schur.trace().re / 4.0
    }

    /// Outcome probability for the spin state `rho`.
    pub fn probability(&self, rho: &CMatrix) -> f64 {
        (0..4).map(|s| self.schur[(s, s)].re * rho[(s, s)].re).sum()
    }

    /// Channel conditioned on this outcome, normalised by the mixed-input
    /// probability. `None` if the outcome never occurs.
    pub fn channel(&self) -> Option<Superop> {
        let p = self.mixed_probability();
        (p > 1e-15).then(|| Superop::schur(&(&self.schur / c(p))))
    }
}

#[derive(Debug, Clone)]
pub struct DetectionDistribution {
    pub patterns: BTreeMap<DetectionPattern, ConditionalMap>,
    /// Split of `F` into exactly one and exactly two photons lost.
    pub one_lost: ConditionalMap,
    pub both_lost: ConditionalMap,
}

impl DetectionDistribution {
    pub fn probability(&self, pattern: DetectionPattern) -> f64 {
        self.patterns.get(&pattern).map_or(0.0, ConditionalMap::mixed_probability)
    }

    pub fn total_probability(&self) -> f64 {
        self.patterns.values().map(ConditionalMap::mixed_probability).sum()
    }
}

/// Detect the photons of `state` after per-emitter loss and the RUS
/// interferometer, using number-resolving detectors.
///
/// `state` holds both emitted photons and no loss yet; branches are
/// normalised by the spin input so the conditional maps do not depend on it.
pub fn detection_distribution(
    state: &JointState,
    eta_a: f64,
    eta_b: f64,
) -> Result<DetectionDistribution, OpticsError> {
    let out = state.apply_loss(eta_a, eta_b)?.apply_interferometer(&Interferometer::rus());
    let input = state.spin_input();
    let branches: Vec<BTreeMap<Vec<u8>, Complex64>> = (0..4u8)
        .map(|s| {
            let alpha = input[s as usize];
            if alpha.norm() < 1e-300 {
                return BTreeMap::new();
            }
            out.fock_branch(s).into_iter().map(|(m, a)| (m, a / alpha)).collect()
        })
        .collect();

    let mut patterns: BTreeMap<DetectionPattern, ConditionalMap> =
        DetectionPattern::all().into_iter().map(|p| (p, ConditionalMap::zero())).collect();
    let mut one_lost = ConditionalMap::zero();
    let mut both_lost = ConditionalMap::zero();

    let mut states: Vec<&Vec<u8>> = branches.iter().flat_map(|b| b.keys()).collect();
    states.sort();
    states.dedup();
    for f in states {
        let detected: Vec<u8> = f.iter().map(|&m| spatial_of(m)).filter(|&s| (s as usize) < MODES).collect();
        let amps: Vec<Complex64> = branches.iter().map(|b| b.get(f).copied().unwrap_or(ZERO)).collect();
        let k = CMatrix::from_fn(4, 4, |s, t| amps[s] * amps[t].conj());
        let lost = f.len() - detected.len();
        let pattern = if detected.len() == 2 {
            DetectionPattern::pair(detected[0], detected[1])
        } else {
            DetectionPattern::Lost
        };
        patterns.get_mut(&pattern).expect("all patterns present").schur += &k;
        match lost {
            0 => {}
            1 => one_lost.schur += &k,
            _ => both_lost.schur += &k,
        }
    }
    Ok(DetectionDistribution { patterns, one_lost, both_lost })
}

/// Both photons emitted from `|++⟩`, photon b with distinguishability `d`.
pub fn emitted_pair(d: f64) -> Result<JointState, OpticsError> {
    JointState::plus_plus()
        .emit(Emitter::A, InternalState::reference())?
        .emit(Emitter::B, InternalState::distinguishable(d)?)
}

/// Spin operation of a Table 1 column after its correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetGate {
    Cz,
    Identity,
    Failure,
}

impl TargetGate {
    pub fn superop(self) -> Superop {
        match self {
            TargetGate::Cz => Superop::unitary(&cz()),
            TargetGate::Identity => Superop::identity(4),
            TargetGate::Failure => failure_channel().to_superop(),
        }
    }
}

impl fmt::Display for TargetGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetGate::Cz => "CZ",
            TargetGate::Identity => "Id",
            TargetGate::Failure => "C_RUS,f",
        })
    }
}

/// Correction applied after a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correction {
    None,
    SaSbDag,
    SaDagSb,
    ZaZb,
}

impl Correction {
    pub fn matrix(self) -> CMatrix {
        let s = s_gate();
        match self {
            Correction::None => identity(4),
            Correction::SaSbDag => s.kronecker(&s.adjoint()),
            Correction::SaDagSb => s.adjoint().kronecker(&s),
            Correction::ZaZb => pauli2_matrix(Pauli2::new(Pauli::Z, Pauli::Z)),
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Correction::None => "Id",
            Correction::SaSbDag => "S_a S_b^dag",
            Correction::SaDagSb => "S_a^dag S_b",
            Correction::ZaZb => "Z_a Z_b",
        })
    }
}

/// Expected column of the gate table: probability for mixed input, correction
/// and resulting spin operation.
pub fn table1_column(pattern: DetectionPattern, eta_a: f64, eta_b: f64) -> (f64, Correction, TargetGate) {
    let pair = eta_a * eta_b / 8.0;
    match pattern {
        DetectionPattern::Pair(0, 2) | DetectionPattern::Pair(1, 3) => (pair, Correction::SaSbDag, TargetGate::Cz),
        DetectionPattern::Pair(0, 3) | DetectionPattern::Pair(1, 2) => (pair, Correction::SaDagSb, TargetGate::Cz),
        DetectionPattern::Pair(0, 0) | DetectionPattern::Pair(1, 1) => (pair, Correction::None, TargetGate::Identity),
        DetectionPattern::Pair(2, 2) | DetectionPattern::Pair(3, 3) => (pair, Correction::ZaZb, TargetGate::Identity),
        DetectionPattern::Pair(0, 1) => (0.0, Correction::None, TargetGate::Identity),
        DetectionPattern::Pair(2, 3) => (0.0, Correction::ZaZb, TargetGate::Identity),
        DetectionPattern::Pair(..) => unreachable!("pairs are ordered"),
        DetectionPattern::Lost => (1.0 - eta_a * eta_b, Correction::None, TargetGate::Failure),
    }
}

#[derive(Debug, Clone)]
pub struct Table1Row {
    pub pattern: DetectionPattern,
    pub expected_probability: f64,
    pub oracle_probability: f64,
    pub correction: Correction,
    pub gate: TargetGate,
    /// Largest entry of `corrected channel − gate`; `None` when the pattern
    /// never occurs.
    pub channel_deviation: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Table1Report {
    pub eta_a: f64,
    pub eta_b: f64,
    pub rows: Vec<Table1Row>,
}

impl Table1Report {
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.expected_probability - r.oracle_probability).abs().max(r.channel_deviation.unwrap_or(0.0)))
            .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

impl fmt::Display for Table1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "eta_a = {}, eta_b = {}", self.eta_a, self.eta_b)?;
        writeln!(
            f,
            "{:<8} {:>12} {:>12} {:<12} {:<8} {:>10}",
            "pattern", "expected", "oracle", "correction", "gate", "deviation"
        )?;
        for r in &self.rows {
            let dev = r.channel_deviation.map_or("n/a".to_string(), |d| format!("{d:.1e}"));
            writeln!(
                f,
                "{:<8} {:>12.6} {:>12.6} {:<12} {:<8} {:>10}",
                r.pattern.to_string(),
                r.expected_probability,
                r.oracle_probability,
                r.correction.to_string(),
                r.gate.to_string(),
                dev
            )?;
        }
        write!(f, "max deviation {:.2e}", self.max_deviation())
    }
}

/// Compare every pattern of the oracle against the gate table.
pub fn verify_table1(eta_a: f64, eta_b: f64) -> Result<Table1Report, OpticsError> {
    let dist = detection_distribution(&emitted_pair(0.0)?, eta_a, eta_b)?;
    let rows = DetectionPattern::all()
        .into_iter()
        .map(|pattern| {
            let (expected, correction, gate) = table1_column(pattern, eta_a, eta_b);
            let map = &dist.patterns[&pattern];
            let channel_deviation = map.channel().map(|ch| {
                ch.then(&Superop::unitary(&correction.matrix())).max_abs_diff(&gate.superop())
            });
            Table1Row {
                pattern,
                expected_probability: expected,
                oracle_probability: map.mixed_probability(),
                correction,
                gate,
                channel_deviation,
            }
        })
        .collect();
    Ok(Table1Report { eta_a, eta_b, rows })
}

/// `(1−D)·CZ ρ CZ + (D/2)·C(Z_a ρ Z_a + Z_b ρ Z_b)C†` for correction `C`.
pub fn distinguishability_channel(d: f64, correction: Correction) -> Superop {
    let cmat = correction.matrix();
    let za = pauli2_matrix(Pauli2::new(Pauli::Z, Pauli::I));
    let zb = pauli2_matrix(Pauli2::new(Pauli::I, Pauli::Z));
    let mixed = Superop::kraus(&[&cmat * za, &cmat * zb]).scale(d / 2.0);
    Superop::unitary(&cz()).scale(1.0 - d).add(&mixed)
}

#[derive(Debug, Clone)]
pub struct SuccessChannel {
    pub pattern: DetectionPattern,
    pub probability: f64,
    pub correction: Correction,
    /// Conditional channel after the pattern's correction.
    pub channel: Superop,
}

/// Corrected conditional channels of the four success patterns at unit
/// transmission with photon b distinguishable by `d`.
pub fn distinguishability_distribution(d: f64) -> Result<Vec<SuccessChannel>, OpticsError> {
    let dist = detection_distribution(&emitted_pair(d)?, 1.0, 1.0)?;
    [(0, 2), (1, 3), (0, 3), (1, 2)]
        .into_iter()
        .map(|(k, l)| {
            let pattern = DetectionPattern::Pair(k, l);
            let (_, correction, _) = table1_column(pattern, 1.0, 1.0);
            let map = &dist.patterns[&pattern];
            let channel = map
                .channel()
                .ok_or(OpticsError::Domain { name: "D", value: d })?
                .then(&Superop::unitary(&correction.matrix()));
            Ok(SuccessChannel { pattern, probability: map.mixed_probability(), correction, channel })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::success_channel;
    use crate::quantum::{ket_to_dm, max_abs_diff, random_density_matrix, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ideal_pattern_probabilities() {
        let dist = detection_distribution(&emitted_pair(0.0).unwrap(), 1.0, 1.0).unwrap();
        for p in DetectionPattern::all() {
            let want = match p {
                DetectionPattern::Pair(0, 1) | DetectionPattern::Pair(2, 3) | DetectionPattern::Lost => 0.0,
                _ => 0.125,
            };
            assert!((dist.probability(p) - want).abs() < 1e-14, "{p}");
        }
    }

    #[test]
    fn full_loss_is_failure() {
        let dist = detection_distribution(&emitted_pair(0.0).unwrap(), 0.0, 0.0).unwrap();
        let lost = &dist.patterns[&DetectionPattern::Lost];
        assert!((lost.mixed_probability() - 1.0).abs() < 1e-14);
        assert!(lost.channel().unwrap().max_abs_diff(&failure_channel().to_superop()) < 1e-12);
    }

    #[test]
    fn table_ideal_and_lossy() {
        let r = verify_table1(1.0, 1.0).unwrap();
        assert!(r.passed(1e-10), "{r}");
        let r = verify_table1(0.7, 0.9).unwrap();
        assert!(r.passed(1e-10), "{r}");
        let f = r.rows.iter().find(|row| row.pattern == DetectionPattern::Lost).unwrap();
        assert!((f.oracle_probability - (1.0 - 0.63)).abs() < 1e-12);
    }

    #[test]
    fn repeat_two_two_corrects_to_identity() {
        let dist = detection_distribution(&emitted_pair(0.0).unwrap(), 1.0, 1.0).unwrap();
        let ch = dist.patterns[&DetectionPattern::Pair(2, 2)].channel().unwrap();
        let fixed = ch.then(&Superop::unitary(&Correction::ZaZb.matrix()));
        assert!(fixed.max_abs_diff(&Superop::identity(4)) < 1e-12);
    }

    #[test]
    fn distinguishability_matches_closed_form() {
        for d in [0.0, 0.3, 1.0] {
            for sc in distinguishability_distribution(d).unwrap() {
                let want = distinguishability_channel(d, sc.correction);
                assert!(sc.channel.max_abs_diff(&want) < 1e-10, "D={d} {}", sc.pattern);
                assert!((sc.probability - 0.125).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_distinguishability_mixes_single_z_paths() {
        let sc = &distinguishability_distribution(1.0).unwrap()[0];
        let cmat = sc.correction.matrix();
        let za = pauli2_matrix(Pauli2::new(Pauli::Z, Pauli::I));
        let zb = pauli2_matrix(Pauli2::new(Pauli::I, Pauli::Z));
        let want = Superop::unitary(&(&cmat * za))
            .scale(0.5)
            .add(&Superop::unitary(&(&cmat * zb)).scale(0.5));
        assert!(sc.channel.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn diagonal_action_matches_success_channel_after_cz() {
        for d in [0.0, 0.3, 1.0] {
            let model = Superop::unitary(&cz()).then(&success_channel(d).unwrap().to_superop());
            for sc in distinguishability_distribution(d).unwrap() {
                for s in 0..4 {
                    let mut ket = [ZERO; 4];
                    ket[s] = ONE;
                    let rho = ket_to_dm(&ket);
                    let a = sc.channel.apply(&rho);
                    let b = model.apply(&rho);
                    assert!(max_abs_diff(&a, &b) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn oracle_coherences_bounded_by_model() {
        // The Pauli model keeps the populations and never retains more coherence
        // than the oracle, up to the correction's local phases.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let d = 0.3;
        let sc = &distinguishability_distribution(d).unwrap()[0];
        let model = Superop::unitary(&cz()).then(&success_channel(d).unwrap().to_superop());
        for _ in 0..20 {
            let rho = random_density_matrix(4, &mut rng);
            let a = sc.channel.apply(&rho);
            let b = model.apply(&rho);
            for i in 0..4 {
                assert!((a[(i, i)] - b[(i, i)]).norm() < 1e-12);
                for j in 0..4 {
                    if i != j {
                        assert!(b[(i, j)].norm() <= a[(i, j)].norm() + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_maps_are_cp() {
        for eta in [0.0, 0.3, 0.7, 1.0] {
            for d in [0.0, 0.5, 1.0] {
                let dist = detection_distribution(&emitted_pair(d).unwrap(), eta, eta).unwrap();
                assert!((dist.total_probability() - 1.0).abs() < 1e-12, "eta={eta} D={d}");
                for map in dist.patterns.values() {
                    if let Some(ch) = map.channel() {
                        assert!(ch.min_choi_eigenvalue() > -1e-10);
                        assert!(ch.trace_preservation_error() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn one_lost_erases_like_both_lost() {
        for d in [0.0, 0.5] {
            let dist = detection_distribution(&emitted_pair(d).unwrap(), 0.6, 0.8).unwrap();
            let one = dist.one_lost.channel().unwrap();
            let both = dist.both_lost.channel().unwrap();
            assert!(one.max_abs_diff(&both) < 1e-10);
            assert!(both.max_abs_diff(&failure_channel().to_superop()) < 1e-10);
        }
    }

    #[test]
    fn success_probability_per_trial() {
        let grid = [0.1, 0.3, 0.5, 0.8, 1.0];
        for &ea in &grid {
            for &eb in &grid {
                let dist = detection_distribution(&emitted_pair(0.0).unwrap(), ea, eb).unwrap();
                let p: f64 = [(0, 2), (1, 3), (0, 3), (1, 2)]
                    .iter()
                    .map(|&(k, l)| dist.probability(DetectionPattern::Pair(k, l)))
                    .sum();
                assert!((p - ea * eb / 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_input_probability_uses_populations() {
        let dist = detection_distribution(&emitted_pair(0.0).unwrap(), 1.0, 1.0).unwrap();
        let rho = ket_to_dm(&[ONE, ZERO, ZERO, ZERO]);
        let map = &dist.patterns[&DetectionPattern::Pair(0, 2)];
        assert!((map.probability(&rho) - 0.125).abs() < 1e-14);
    }
}

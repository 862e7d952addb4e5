//! Threshold sweeps, the fault-tolerance surface and loss/coherence trade-offs.

mod border;
mod crossing;
mod surface;
mod tradeoff;

use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{build_memory_experiment, Basis, CircuitError, NoiseParams};
use crate::decoder::{count_errors, Decoder, DecoderError};
use crate::frame::FaultSampler;
use crate::noise::{rus_success_prob, NoiseError, Trials};

pub use border::Border;
pub use crossing::{bracket, crossings, pair_crossing, Bracket, CrossingReport, Curve, CurvePoint, PairCrossing, ThresholdEstimate};
pub use surface::{ft_line, ft_surface, surface_points, tessellate, FtSurface, FtSurfaceSpec, SurfacePoint};
pub use tradeoff::{
    envelope_at, hrus_tradeoff, loss_coherence_tradeoff, loss_intercept, tradeoff_curve, EnvelopePoint, TradeoffCurve,
    TradeoffPoint, TradeoffSeries,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

/// Swept parameter; the others keep their values from [`SweepSpec::noise`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Axis {
    PFail,
    TRusOverT2,
    Distinguishability,
    /// Photon loss `ε` on both emitters, turned into `p_F` for an RUS gate of `trials` trials.
    Loss { trials: u32 },
    /// Scale `w` applied to a point `(p_F, t_RUS/T2, D)`.
    W { point: [f64; 3] },
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::PFail => "p_F",
            Axis::TRusOverT2 => "t_rus_over_T2",
            Axis::Distinguishability => "D",
            Axis::Loss { .. } => "loss",
            Axis::W { .. } => "w",
        }
    }

    pub fn apply(&self, value: f64, base: &NoiseParams) -> Result<NoiseParams, ExperimentError> {
        let mut n = *base;
        match *self {
            Axis::PFail => n.p_fail = value,
            Axis::TRusOverT2 => n.t_rus_over_t2 = value,
            Axis::Distinguishability => n.distinguishability = value,
            Axis::Loss { trials } => {
                let eta = 1.0 - value;
                n.p_fail = 1.0 - rus_success_prob(eta, eta, Trials::Bounded(trials))?;
            }
            Axis::W { point } => {
                n.p_fail = value * point[0];
                n.t_rus_over_t2 = value * point[1];
                n.distinguishability = value * point[2];
            }
        }
        n.validate()?;
        Ok(n)
    }
}

/// One threshold sweep; every memory experiment runs `d` rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub distances: Vec<usize>,
    pub shots: u64,
    pub seed: u64,
    pub basis: Basis,
    /// Values of the axes that are not swept.
    pub noise: NoiseParams,
    pub bootstrap: usize,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: Vec<f64>, distances: Vec<usize>, shots: u64, seed: u64) -> Self {
        Self { axis, values, distances, shots, seed, basis: Basis::Z, noise: NoiseParams::noiseless(), bootstrap: 200 }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Invalid(m.into()));
        if self.values.is_empty() || self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("sweep values must be strictly ascending");
        }
        if self.distances.len() < 2 {
            return bad("a threshold scan needs at least two distances");
        }
        if self.distances.iter().any(|&d| d < 3 || d % 2 == 0) || self.distances.windows(2).any(|w| w[0] >= w[1]) {
            return bad("distances must be odd, at least 3 and ascending");
        }
        if self.shots == 0 {
            return bad("shots must be positive");
        }
        for &v in &self.values {
            self.axis.apply(v, &self.noise)?;
        }
        Ok(())
    }
}

/// Evenly spaced grid including both ends.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Seed of one sweep point, a function of the master seed, the distance and
/// the point's evaluation index only.
pub fn point_seed(master: u64, distance: usize, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((distance as u64) << 32) | index as u64);
    rng.next_u64()
}

/// Logical errors of a `d`-round distance-`d` memory at one noise setting.
pub fn evaluate_point(d: usize, basis: Basis, noise: &NoiseParams, shots: u64, seed: u64) -> Result<u64, ExperimentError> {
    let c = build_memory_experiment(d, basis, d, noise)?;
    Ok(count_errors(&FaultSampler::new(&c), &Decoder::new(&c)?, shots, seed)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub spec: SweepSpec,
    pub curves: Vec<Curve>,
    pub crossings: CrossingReport,
}

pub fn threshold_scan(spec: &SweepSpec) -> Result<ThresholdScan, ExperimentError> {
    spec.validate()?;
    let curves = spec
        .distances
        .iter()
        .map(|&d| {
            let points = spec
                .values
                .iter()
                .enumerate()
                .map(|(i, &value)| {
                    let noise = spec.axis.apply(value, &spec.noise)?;
                    let errors = evaluate_point(d, spec.basis, &noise, spec.shots, point_seed(spec.seed, d, i))?;
                    Ok(CurvePoint { value, shots: spec.shots, errors })
                })
                .collect::<Result<_, ExperimentError>>()?;
            Ok(Curve { distance: d, points })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let crossings = crossings(&curves, spec.bootstrap, spec.seed);
    Ok(ThresholdScan { spec: spec.clone(), curves, crossings })
}

pub const CSV_HEADER: &str = "axis_value,distance,shots,logical_errors,p_L,stderr";

/// One row per distance and sweep point.
pub fn curves_csv(curves: &[Curve]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for c in curves {
        for p in &c.points {
            writeln!(out, "{},{},{},{},{},{}", p.value, c.distance, p.shots, p.errors, p.p_l(), p.stderr()).unwrap();
        }
    }
    out
}

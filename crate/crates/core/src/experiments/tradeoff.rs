use serde::{Deserialize, Serialize};

use super::{Border, ExperimentError};
use crate::noise::{hrus_rates, Trials};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub loss: f64,
    pub p_fail: f64,
    /// Largest tolerable trial duration over `T2`.
    pub t_trial_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffSeries {
    pub trials: u32,
    pub points: Vec<TradeoffPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub loss: f64,
    pub t_trial_max: f64,
    /// Trial budget attaining the maximum; `None` where nothing is tolerable.
    pub best_trials: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub photons: u32,
    pub series: Vec<TradeoffSeries>,
    pub envelope: Vec<EnvelopePoint>,
}

fn point(border: &Border, photons: u32, trials: u32, loss: f64) -> Result<TradeoffPoint, ExperimentError> {
    let eta = 1.0 - loss;
    let p_fail = 1.0 - hrus_rates(eta, eta, Trials::Bounded(trials), photons)?.success;
    Ok(TradeoffPoint { loss, p_fail, t_trial_max: border.eval(p_fail) / f64::from(trials) })
}

fn check(trials: &[u32], losses: &[f64], border: &Border) -> Result<(), ExperimentError> {
    if trials.is_empty() || trials.contains(&0) {
        return Err(ExperimentError::Invalid("trial budgets must be positive".into()));
    }
    if losses.iter().any(|l| !(0.0..1.0).contains(l)) {
        return Err(ExperimentError::Invalid("losses must lie in [0, 1)".into()));
    }
    if !border.covers(0.0) {
        return Err(ExperimentError::Invalid("border must start at p_F = 0".into()));
    }
    Ok(())
}

/// Tolerable trial time per trial budget over a loss grid, for `n` photons
/// per trial, and its pointwise maximum over budgets.
pub fn tradeoff_curve(photons: u32, trials: &[u32], losses: &[f64], border: &Border) -> Result<TradeoffCurve, ExperimentError> {
    check(trials, losses, border)?;
    let series = trials
        .iter()
        .map(|&k| {
            let points = losses.iter().map(|&l| point(border, photons, k, l)).collect::<Result<_, _>>()?;
            Ok(TradeoffSeries { trials: k, points })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let envelope = losses
        .iter()
        .enumerate()
        .map(|(i, &loss)| {
            let best = series
                .iter()
                .map(|s| (s.trials, s.points[i].t_trial_max))
                .filter(|&(_, t)| t > 0.0)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            EnvelopePoint { loss, t_trial_max: best.map_or(0.0, |b| b.1), best_trials: best.map(|b| b.0) }
        })
        .collect();
    Ok(TradeoffCurve { photons, series, envelope })
}

pub fn loss_coherence_tradeoff(trials: &[u32], losses: &[f64], border: &Border) -> Result<TradeoffCurve, ExperimentError> {
    tradeoff_curve(1, trials, losses, border)
}

pub fn hrus_tradeoff(
    photons: &[u32],
    trials: &[u32],
    losses: &[f64],
    border: &Border,
) -> Result<Vec<TradeoffCurve>, ExperimentError> {
    if photons.is_empty() || photons.contains(&0) {
        return Err(ExperimentError::Invalid("photon counts must be positive".into()));
    }
    photons.iter().map(|&n| tradeoff_curve(n, trials, losses, border)).collect()
}

/// Envelope value at an arbitrary loss.
pub fn envelope_at(photons: u32, trials: &[u32], loss: f64, border: &Border) -> Result<f64, ExperimentError> {
    check(trials, &[loss], border)?;
    trials
        .iter()
        .map(|&k| Ok(point(border, photons, k, loss)?.t_trial_max))
        .try_fold(0.0f64, |m, t: Result<f64, ExperimentError>| Ok(m.max(t?)))
}

/// Smallest loss at which no trial budget tolerates any decoherence.
pub fn loss_intercept(photons: u32, trials: &[u32], border: &Border) -> Result<f64, ExperimentError> {
    let (mut lo, mut hi) = (0.0, 0.999);
    if envelope_at(photons, trials, lo, border)? == 0.0 {
        return Ok(0.0);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if envelope_at(photons, trials, mid, border)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

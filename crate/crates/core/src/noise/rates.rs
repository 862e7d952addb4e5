use rand::Rng;
use serde::{Deserialize, Serialize};

use super::NoiseError;

/// Trial budget of a repeat-until-success gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trials {
    Bounded(u32),
    Unbounded,
}

impl Trials {
    pub fn count(self) -> Option<u32> {
        match self {
            Trials::Bounded(k) => Some(k),
            Trials::Unbounded => None,
        }
    }
}

/// Per-trial outcome probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRates {
    pub success: f64,
    pub repeat: f64,
    pub failure: f64,
}

/// Whole-gate outcome probabilities after at most `k` trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateRates {
    pub success: f64,
    pub failure: f64,
    pub abort: f64,
}

impl GateRates {
    /// Probability the gate does not deliver a CZ (failure or abort).
    pub fn not_success(&self) -> f64 {
        self.failure + self.abort
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64, NoiseError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(NoiseError::Domain { name, value })
    }
}

fn check_trials(k: Trials) -> Result<(), NoiseError> {
    match k {
        Trials::Bounded(0) => Err(NoiseError::Domain { name: "k", value: 0.0 }),
        _ => Ok(()),
    }
}

/// Single RUS trial: success and repeat each `ηaηb/2`, failure `1 − ηaηb`.
pub fn trial_rates(eta_a: f64, eta_b: f64) -> Result<TrialRates, NoiseError> {
    let both = check_probability("eta_a", eta_a)? * check_probability("eta_b", eta_b)?;
    Ok(TrialRates { success: both / 2.0, repeat: both / 2.0, failure: 1.0 - both })
}

/// Single hybrid trial with `n` photons per emitter: success needs every
/// photon detected and at least one heralding pattern.
pub fn hrus_trial_rates(eta_a: f64, eta_b: f64, n: u32) -> Result<TrialRates, NoiseError> {
    if n == 0 {
        return Err(NoiseError::Domain { name: "n", value: 0.0 });
    }
    let both = check_probability("eta_a", eta_a)? * check_probability("eta_b", eta_b)?;
    let all_detected = both.powi(n as i32);
    let all_repeat = 0.5f64.powi(n as i32);
    Ok(TrialRates {
        success: (1.0 - all_repeat) * all_detected,
        repeat: all_repeat * all_detected,
        failure: 1.0 - all_detected,
    })
}

/// Geometric accumulation over at most `k` trials.
pub fn gate_rates(trial: TrialRates, k: Trials) -> Result<GateRates, NoiseError> {
    check_trials(k)?;
    let r = trial.repeat;
    let (series, abort) = match k {
        // r ≤ 1/2 for every physical trial, so the series converges.
        Trials::Unbounded => (1.0 / (1.0 - r), 0.0),
        Trials::Bounded(k) => {
            let rk = r.powi(k as i32);
            ((1.0 - rk) / (1.0 - r), rk)
        }
    };
    Ok(GateRates { success: trial.success * series, failure: trial.failure * series, abort })
}

pub fn rus_rates(eta_a: f64, eta_b: f64, k: Trials) -> Result<GateRates, NoiseError> {
    gate_rates(trial_rates(eta_a, eta_b)?, k)
}

pub fn rus_success_prob(eta_a: f64, eta_b: f64, k: Trials) -> Result<f64, NoiseError> {
    Ok(rus_rates(eta_a, eta_b, k)?.success)
}

pub fn rus_failure_prob(eta_a: f64, eta_b: f64, k: Trials) -> Result<f64, NoiseError> {
    Ok(rus_rates(eta_a, eta_b, k)?.failure)
}

pub fn rus_abort_prob(eta_a: f64, eta_b: f64, k: Trials) -> Result<f64, NoiseError> {
    Ok(rus_rates(eta_a, eta_b, k)?.abort)
}

pub fn hrus_rates(eta_a: f64, eta_b: f64, k: Trials, n: u32) -> Result<GateRates, NoiseError> {
    gate_rates(hrus_trial_rates(eta_a, eta_b, n)?, k)
}

/// Physical parameters of one RUS/HRUS gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RusParams {
    pub eta_a: f64,
    pub eta_b: f64,
    pub trials: Trials,
    pub photons: u32,
    /// `D = 1 − M`, with `M` the pairwise photon indistinguishability.
    pub distinguishability: f64,
    pub t_trial_over_t2: f64,
}

impl RusParams {
    /// Symmetric loss `ε` on both photons, standard single-photon trials.
    pub fn with_loss(loss: f64, trials: Trials) -> Self {
        Self {
            eta_a: 1.0 - loss,
            eta_b: 1.0 - loss,
            trials,
            photons: 1,
            distinguishability: 0.0,
            t_trial_over_t2: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        check_probability("eta_a", self.eta_a)?;
        check_probability("eta_b", self.eta_b)?;
        check_probability("D", self.distinguishability)?;
        check_trials(self.trials)?;
        if self.photons == 0 {
            return Err(NoiseError::Domain { name: "n", value: 0.0 });
        }
        if !(self.t_trial_over_t2 >= 0.0) {
            return Err(NoiseError::Domain { name: "t_trial_over_t2", value: self.t_trial_over_t2 });
        }
        Ok(())
    }

    pub fn trial(&self) -> Result<TrialRates, NoiseError> {
        hrus_trial_rates(self.eta_a, self.eta_b, self.photons)
    }

    pub fn rates(&self) -> Result<GateRates, NoiseError> {
        hrus_rates(self.eta_a, self.eta_b, self.trials, self.photons)
    }

    /// Heralded failure probability used by the circuit layer (abort counted as failure).
    pub fn p_fail(&self) -> Result<f64, NoiseError> {
        Ok(1.0 - self.rates()?.success)
    }

    /// Full gate duration `k · t_trial` in units of `T2`.
    pub fn t_rus_over_t2(&self) -> Result<f64, NoiseError> {
        match self.trials {
            Trials::Bounded(k) => Ok(f64::from(k) * self.t_trial_over_t2),
            Trials::Unbounded if self.t_trial_over_t2 == 0.0 => Ok(0.0),
            Trials::Unbounded => Err(NoiseError::UnboundedDuration),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeKind {
    Success,
    Failure,
    Abort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateOutcome {
    pub kind: OutcomeKind,
    pub trials_used: u32,
}

/// Run the trial process until success, failure or the trial budget is spent.
pub fn sample_gate_outcome<R: Rng + ?Sized>(
    params: &RusParams,
    rng: &mut R,
) -> Result<GateOutcome, NoiseError> {
    params.validate()?;
    let trial = params.trial()?;
    let limit = params.trials.count();
    let mut used = 0u32;
    loop {
        used += 1;
        let u: f64 = rng.random();
        if u < trial.success {
            return Ok(GateOutcome { kind: OutcomeKind::Success, trials_used: used });
        }
        if u < trial.success + trial.failure {
            return Ok(GateOutcome { kind: OutcomeKind::Failure, trials_used: used });
        }
        if limit == Some(used) {
            return Ok(GateOutcome { kind: OutcomeKind::Abort, trials_used: used });
        }
    }
}

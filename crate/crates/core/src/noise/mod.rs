//! Gate outcome statistics and the Pauli channels attached to them.

mod channels;
mod rates;
mod thermal;

use thiserror::Error;

pub use channels::{decoherence_channel, failure_channel, success_channel, PauliChannel1, PauliChannel2};
pub use rates::{
    gate_rates, hrus_rates, hrus_trial_rates, rus_abort_prob, rus_failure_prob, rus_rates,
    rus_success_prob, sample_gate_outcome, trial_rates, GateOutcome, GateRates, OutcomeKind,
    RusParams, TrialRates, Trials,
};
pub use thermal::{thermal_channel, ThermalParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("{name} = {value} is outside its domain")]
    Domain { name: &'static str, value: f64 },
    #[error("probabilities must be nonnegative and sum to 1")]
    NotADistribution,
    #[error("T2 may not exceed 2·T1")]
    T2ExceedsTwiceT1,
    #[error("an unbounded trial budget has no finite duration unless the trial time is zero")]
    UnboundedDuration,
}

use serde::{Deserialize, Serialize};

use super::NoiseError;
use crate::quantum::{c, CMatrix, Superop};

/// Spin coupled to a thermal bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    /// Zero-temperature relaxation rate.
    pub gamma_0: f64,
    /// Pure dephasing rate.
    pub gamma_star: f64,
    /// Thermal occupation of the bath at the spin frequency.
    pub n_th: f64,
}

impl ThermalParams {
    /// Excitation rate `γ↑ = γ0·n_th`.
    pub fn gamma_up(&self) -> f64 {
        self.gamma_0 * self.n_th
    }

    /// Relaxation rate `γ↓ = γ0·(n_th + 1)`.
    pub fn gamma_down(&self) -> f64 {
        self.gamma_0 * (self.n_th + 1.0)
    }
}

/// Exact solution of the thermal Lindblad equation in the rotating frame.
///
/// Basis index 0 is the upper spin state `|↑⟩ = |0⟩`, index 1 the lower
/// state `|↓⟩ = |1⟩`. Populations relax towards `γ↑/(γ↑+γ↓)` at rate
/// `γ↑+γ↓`; coherences decay at `(γ↑+γ↓)/2 + γ*`.
pub fn thermal_channel(t: f64, params: &ThermalParams) -> Result<Superop, NoiseError> {
    for (name, v) in [
        ("t", t),
        ("gamma_0", params.gamma_0),
        ("gamma_star", params.gamma_star),
        ("n_th", params.n_th),
    ] {
        if !(v >= 0.0) {
            return Err(NoiseError::Domain { name, value: v });
        }
    }
    let up = params.gamma_up();
    let down = params.gamma_down();
    let total = up + down;
    // Fraction of the population that has relaxed, (1 − e^{−Γt}).
    let relaxed = -(-total * t).exp_m1();
    let (stay_up, up_to_down, down_to_up, stay_down) = if total > 0.0 {
        (
            1.0 - down / total * relaxed,
            down / total * relaxed,
            up / total * relaxed,
            1.0 - up / total * relaxed,
        )
    } else {
        (1.0, 0.0, 0.0, 1.0)
    };
    let coherence = (-t * (total / 2.0 + params.gamma_star)).exp();

    // Row-major vec(ρ) = (ρ↑↑, ρ↑↓, ρ↓↑, ρ↓↓).
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c(stay_up);
    m[(0, 3)] = c(down_to_up);
    m[(3, 0)] = c(up_to_down);
    m[(3, 3)] = c(stay_down);
    m[(1, 1)] = c(coherence);
    m[(2, 2)] = c(coherence);
    Ok(Superop::from_matrix(2, m))
}

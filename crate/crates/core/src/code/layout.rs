use serde::{Deserialize, Serialize};

use super::CodeError;

/// Physical footprint of a modular machine whose links span the whole device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    /// Volume of one qubit module (length³).
    pub module_volume: f64,
    /// Channel attenuation length, in the same length unit. May be infinite.
    pub attenuation_length: f64,
    /// Spatial dimension of the module arrangement, 1 to 3.
    pub dimension: u32,
    pub qubit_count: u64,
    /// RUS trials per gate.
    pub trials: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayoutOverhead {
    /// Transmission loss over a link spanning the device.
    pub loss: f64,
    /// Latency in units of `V^(1/3) / c`.
    pub latency: f64,
}

pub fn layout_overhead(p: &LayoutParams) -> Result<LayoutOverhead, CodeError> {
    let positive = p.module_volume > 0.0 && p.attenuation_length > 0.0;
    if !positive || p.dimension == 0 || p.dimension > 3 || p.qubit_count == 0 || p.trials == 0 {
        return Err(CodeError::InvalidLayout);
    }
    let span = (p.qubit_count as f64).powf(1.0 / f64::from(p.dimension));
    let module_side = p.module_volume.cbrt();
    let loss = -(-span * module_side / p.attenuation_length).exp_m1();
    Ok(LayoutOverhead {
        loss,
        latency: f64::from(p.trials) * span,
    })
}

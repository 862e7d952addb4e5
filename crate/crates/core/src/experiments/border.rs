use serde::{Deserialize, Serialize};

use super::ExperimentError;

/// Monotone cubic interpolation of the correctable-region border
/// `t_th(p_F)` at `D = 0`; zero at and beyond its root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Border {
    /// Knots `(p_F, t_th)`, ascending in `p_F`, nonincreasing in `t_th`.
    pub knots: Vec<(f64, f64)>,
    slopes: Vec<f64>,
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    if n == 2 {
        return vec![d[0]; 2];
    }
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    m[0] = edge_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

impl Border {
    /// Sorts the knots, replaces each value by the running minimum so the
    /// border is nonincreasing, and requires a knot at `t_th = 0`.
    pub fn new(mut knots: Vec<(f64, f64)>) -> Result<Self, ExperimentError> {
        if knots.iter().any(|&(x, t)| !(x >= 0.0 && t >= 0.0)) {
            return Err(ExperimentError::Invalid("border knots must be nonnegative".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        knots.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 = a.1.min(b.1);
                true
            } else {
                false
            }
        });
        for i in 1..knots.len() {
            knots[i].1 = knots[i].1.min(knots[i - 1].1);
        }
        let Some(root) = knots.iter().position(|k| k.1 == 0.0) else {
            return Err(ExperimentError::Invalid("border never reaches t_th = 0".into()));
        };
        knots.truncate(root + 1);
        if knots.len() < 2 {
            return Err(ExperimentError::Invalid("border needs at least two knots".into()));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = knots.iter().copied().unzip();
        Ok(Self { slopes: pchip_slopes(&xs, &ys), knots })
    }

    /// Largest `p_F` with a positive tolerable decoherence.
    pub fn root(&self) -> f64 {
        self.knots.last().expect("nonempty").0
    }

    pub fn covers(&self, p_fail: f64) -> bool {
        p_fail >= self.knots[0].0
    }

    /// `t_th(p_F)`; clamps to the first knot below the covered range.
    pub fn eval(&self, p_fail: f64) -> f64 {
        let k = &self.knots;
        if p_fail >= self.root() {
            return 0.0;
        }
        if p_fail <= k[0].0 {
            return k[0].1;
        }
        let i = k.partition_point(|&(x, _)| x <= p_fail) - 1;
        let (x0, y0, x1, y1) = (k[i].0, k[i].1, k[i + 1].0, k[i + 1].1);
        let h = x1 - x0;
        let s = (p_fail - x0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        (h00 * y0 + h10 * h * self.slopes[i] + h01 * y1 + h11 * h * self.slopes[i + 1]).max(0.0)
    }
}

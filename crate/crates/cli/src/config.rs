use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use spoqc::circuit::{Basis, NoiseParams};
use spoqc::experiments::{linspace, Axis, FtSurfaceSpec, SweepSpec};
use spoqc::noise::{RusParams, Trials};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub code: CodeConfig,
    pub noise: NoiseConfig,
    pub sweep: SweepConfig,
    pub surface: SurfaceConfig,
    pub tradeoff: TradeoffConfig,
    pub run: RunSection,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeConfig {
    pub distances: Vec<usize>,
    /// Rounds of the `sample` circuit; sweeps always use `d` rounds.
    pub rounds: Option<usize>,
    pub basis: Basis,
}

impl Default for CodeConfig {
    fn default() -> Self {
        Self { distances: vec![3, 5, 7], rounds: None, basis: Basis::Z }
    }
}

/// Either `p_fail` directly or photon loss `epsilon` with `k` trials of `n`
/// photons; `t_trial_over_t2` is multiplied by `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub p_fail: Option<f64>,
    pub epsilon: Option<f64>,
    pub k: Option<u32>,
    pub n: u32,
    pub distinguishability: f64,
    pub t_rus_over_t2: Option<f64>,
    pub t_trial_over_t2: Option<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self { p_fail: None, epsilon: None, k: None, n: 1, distinguishability: 0.0, t_rus_over_t2: None, t_trial_over_t2: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// `p_F`, `t_rus_over_T2`, `D`, `loss` or `w`.
    pub axis: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: usize,
    pub values: Option<Vec<f64>>,
    /// Trial budget mapping loss to `p_F` on the `loss` axis.
    pub trials: u32,
    /// Direction scaled by the `w` axis.
    pub point: Option<[f64; 3]>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { axis: "p_F".into(), min: None, max: None, points: 11, values: None, trials: 20, point: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceConfig {
    pub thresholds: Option<[f64; 3]>,
    pub n_p: usize,
    pub w_min: f64,
    pub w_max: f64,
    pub w_points: usize,
    /// Scan only this many points of the `D = 0` edge instead of the plane.
    pub line: Option<usize>,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        Self { thresholds: None, n_p: 120, w_min: 0.85, w_max: 1.0, w_points: 7, line: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TradeoffConfig {
    pub k: Vec<u32>,
    pub n: Vec<u32>,
    pub loss_min: f64,
    pub loss_max: f64,
    pub loss_points: usize,
    /// JSON summary written by `ft-surface`.
    pub border: Option<PathBuf>,
    /// Inline `(p_F, t_th)` knots, used when no border file is given.
    pub border_knots: Option<Vec<[f64; 2]>>,
}

impl Default for TradeoffConfig {
    fn default() -> Self {
        Self {
            k: (1..=20).collect(),
            n: vec![1, 2, 3],
            loss_min: 0.0,
            loss_max: 0.04,
            loss_points: 81,
            border: None,
            border_knots: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub shots: u64,
    pub seed: u64,
    pub bootstrap: usize,
    pub workers: Option<usize>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { shots: 100_000, seed: 0, bootstrap: 200, workers: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    /// Binary shot dump of `sample`.
    pub dump: Option<PathBuf>,
}

impl RunConfig {
    /// TOML, or JSON either bare or as the `config` field of an output summary.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let inner = value.get("config").cloned().unwrap_or(value);
            Ok(serde_json::from_value(inner)?)
        } else {
            Ok(toml::from_str(&text)?)
        }
    }

    pub fn noise_params(&self) -> Result<NoiseParams> {
        let n = &self.noise;
        let trials = n.k.map(Trials::Bounded);
        let p_fail = match (n.p_fail, n.epsilon) {
            (Some(_), Some(_)) => bail!("give either noise.p_fail or noise.epsilon, not both"),
            (Some(p), None) => p,
            (None, Some(eps)) => {
                let Some(k) = trials else { bail!("noise.epsilon needs noise.k") };
                RusParams { photons: n.n, ..RusParams::with_loss(eps, k) }.p_fail()?
            }
            (None, None) => 0.0,
        };
        let t = match (n.t_rus_over_t2, n.t_trial_over_t2) {
            (Some(_), Some(_)) => bail!("give either noise.t_rus_over_t2 or noise.t_trial_over_t2, not both"),
            (Some(t), None) => t,
            (None, Some(t)) => {
                let Some(k) = n.k else { bail!("noise.t_trial_over_t2 needs noise.k") };
                f64::from(k) * t
            }
            (None, None) => 0.0,
        };
        let p = NoiseParams { p_fail, distinguishability: n.distinguishability, t_rus_over_t2: t, t_rus_over_t1: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn axis(&self) -> Result<Axis> {
        Ok(match self.sweep.axis.as_str() {
            "p_F" | "p_fail" => Axis::PFail,
            "t" | "t_rus_over_T2" | "t_rus_over_t2" => Axis::TRusOverT2,
            "D" | "distinguishability" => Axis::Distinguishability,
            "loss" | "epsilon" => Axis::Loss { trials: self.sweep.trials },
            "w" => match self.sweep.point {
                Some(point) => Axis::W { point },
                None => bail!("the w axis needs sweep.point"),
            },
            other => bail!("unknown sweep axis {other:?}"),
        })
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let axis = self.axis()?;
        let values = match &self.sweep.values {
            Some(v) => v.clone(),
            None => {
                let (lo, hi) = match axis {
                    Axis::PFail => (0.06, 0.14),
                    Axis::TRusOverT2 => (0.015, 0.032),
                    Axis::Distinguishability => (0.015, 0.030),
                    Axis::Loss { .. } => (0.015, 0.04),
                    Axis::W { .. } => (0.85, 1.0),
                };
                linspace(self.sweep.min.unwrap_or(lo), self.sweep.max.unwrap_or(hi), self.sweep.points)
            }
        };
        let spec = SweepSpec {
            axis,
            values,
            distances: self.code.distances.clone(),
            shots: self.run.shots,
            seed: self.run.seed,
            basis: self.code.basis,
            noise: self.noise_params()?,
            bootstrap: self.run.bootstrap,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn surface_spec(&self) -> Result<FtSurfaceSpec> {
        let Some(thresholds) = self.surface.thresholds else { bail!("surface.thresholds is required") };
        let s = &self.surface;
        let spec = FtSurfaceSpec {
            thresholds,
            n_p: s.n_p,
            w_range: [s.w_min, s.w_max],
            w_points: s.w_points,
            distances: self.code.distances.clone(),
            shots: self.run.shots,
            seed: self.run.seed,
            basis: self.code.basis,
            bootstrap: self.run.bootstrap,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn losses(&self) -> Result<Vec<f64>> {
        let t = &self.tradeoff;
        if !(0.0 <= t.loss_min && t.loss_min <= t.loss_max && t.loss_max < 1.0) || t.loss_points == 0 {
            bail!("loss grid must satisfy 0 ≤ loss_min ≤ loss_max < 1 with at least one point");
        }
        Ok(linspace(t.loss_min, t.loss_max, t.loss_points))
    }

    /// Refuse output paths whose directory does not exist before computing.
    pub fn check_outputs(&self) -> Result<()> {
        for p in [&self.output.csv, &self.output.json, &self.output.dump].into_iter().flatten() {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !dir.is_dir() {
                bail!("output directory {} does not exist", dir.display());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_sections_parse_and_echo_round_trips() {
        let cfg: RunConfig = toml::from_str(
            "[code]\ndistances = [3, 5]\n[noise]\nepsilon = 0.01\nk = 6\n[sweep]\naxis = \"D\"\npoints = 3\n[run]\nshots = 10\nseed = 4\n",
        )
        .unwrap();
        assert_eq!(cfg.code.distances, vec![3, 5]);
        let echo = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&echo).unwrap();
        assert_eq!(back, cfg);
        let spec = cfg.sweep_spec().unwrap();
        assert_eq!(spec.values, vec![0.015, 0.0225, 0.03]);
        assert!(spec.noise.p_fail > 0.0);
    }

    #[test]
    fn unknown_keys_and_conflicts_are_rejected() {
        assert!(toml::from_str::<RunConfig>("[run]\nshot = 3\n").is_err());
        let mut cfg = RunConfig::default();
        cfg.noise.p_fail = Some(0.1);
        cfg.noise.epsilon = Some(0.01);
        assert!(cfg.noise_params().is_err());
        cfg.noise.p_fail = None;
        assert!(cfg.noise_params().is_err());
        cfg.sweep.axis = "bogus".into();
        assert!(cfg.axis().is_err());
    }
}

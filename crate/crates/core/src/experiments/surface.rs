use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{bracket, crossings, evaluate_point, linspace, point_seed, Axis, Border, Bracket, Curve, CurvePoint, ExperimentError};
use crate::circuit::{Basis, NoiseParams};

/// Plane `x/A + y/B + z/C = 1` through the three single-axis thresholds of
/// `(p_F, t_RUS/T2, D)`, sampled at `n_p` points, each scanned along `w·M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtSurfaceSpec {
    pub thresholds: [f64; 3],
    pub n_p: usize,
    pub w_range: [f64; 2],
    /// Equally spaced `w` values before the refinement point.
    pub w_points: usize,
    pub distances: Vec<usize>,
    pub shots: u64,
    pub seed: u64,
    pub basis: Basis,
    pub bootstrap: usize,
}

impl FtSurfaceSpec {
    pub fn new(thresholds: [f64; 3], distances: Vec<usize>, shots: u64, seed: u64) -> Self {
        Self {
            thresholds,
            n_p: 120,
            w_range: [0.85, 1.0],
            w_points: 7,
            distances,
            shots,
            seed,
            basis: Basis::Z,
            bootstrap: 100,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Invalid(m.into()));
        if self.thresholds.iter().any(|&t| !(t > 0.0)) {
            return bad("axis thresholds must be positive");
        }
        if self.n_p < 3 {
            return bad("n_p must be at least 3");
        }
        let [lo, hi] = self.w_range;
        if !(0.0 < lo && lo < hi) {
            return bad("w range must satisfy 0 < w_min < w_max");
        }
        if self.w_points < 2 {
            return bad("at least two w values are needed");
        }
        if self.distances.len() < 2 || self.distances.iter().any(|&d| d < 3 || d % 2 == 0) {
            return bad("distances must be at least two odd values ≥ 3");
        }
        if self.shots == 0 {
            return bad("shots must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub m: [f64; 3],
    /// Range endpoint when the crossing lies outside the scanned range.
    pub w_th: Option<f64>,
    pub ci: Option<[f64; 2]>,
    pub bracketed: bool,
    pub curves: Vec<Curve>,
}

impl SurfacePoint {
    pub fn boundary(&self) -> Option<[f64; 3]> {
        self.w_th.map(|w| self.m.map(|x| w * x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtSurface {
    pub spec: FtSurfaceSpec,
    pub points: Vec<SurfacePoint>,
}

/// Barycentric lattice on the plane with `m` subdivisions per side, the
/// smallest giving at least `n_p` points.
pub fn tessellate(thresholds: [f64; 3], n_p: usize) -> Vec<[f64; 3]> {
    let m = (1..).find(|m| (m + 1) * (m + 2) / 2 >= n_p).unwrap();
    let [a, b, c] = thresholds;
    let mut out = Vec::new();
    for i in (0..=m).rev() {
        for j in 0..=m - i {
            let l = m - i - j;
            let f = |k: usize| k as f64 / m as f64;
            out.push([f(i) * a, f(j) * b, f(l) * c]);
        }
    }
    out
}

fn scan_point(spec: &FtSurfaceSpec, m: [f64; 3], index: usize) -> Result<SurfacePoint, ExperimentError> {
    let axis = Axis::W { point: m };
    let base = NoiseParams::noiseless();
    let seed = point_seed(spec.seed, 0, index);
    let eval = |w: f64, k: usize| -> Result<Vec<u64>, ExperimentError> {
        let noise = axis.apply(w, &base)?;
        spec.distances.iter().map(|&d| evaluate_point(d, spec.basis, &noise, spec.shots, point_seed(seed, d, k))).collect()
    };
    let mut ws = linspace(spec.w_range[0], spec.w_range[1], spec.w_points);
    let mut counts = ws.iter().enumerate().map(|(k, &w)| eval(w, k)).collect::<Result<Vec<_>, _>>()?;
    let curves = |ws: &[f64], counts: &[Vec<u64>]| -> Vec<Curve> {
        spec.distances
            .iter()
            .enumerate()
            .map(|(j, &d)| Curve {
                distance: d,
                points: ws.iter().zip(counts).map(|(&value, c)| CurvePoint { value, shots: spec.shots, errors: c[j] }).collect(),
            })
            .collect()
    };
    let mut report = crossings(&curves(&ws, &counts), spec.bootstrap, seed);
    if let Some(w) = report.pooled.as_ref().map(|p| p.crossing) {
        let j = ws.partition_point(|&x| x <= w).clamp(1, ws.len() - 1);
        let mid = 0.5 * (ws[j - 1] + ws[j]);
        counts.insert(j, eval(mid, spec.w_points)?);
        ws.insert(j, mid);
        let refined = crossings(&curves(&ws, &counts), spec.bootstrap, seed);
        if refined.pooled.is_some() {
            report = refined;
        }
    }
    let curves = curves(&ws, &counts);
    let [lo, hi] = spec.w_range;
    let (w_th, ci, bracketed) = match &report.pooled {
        Some(p) => (Some(p.crossing), p.ci, lo < p.crossing && p.crossing < hi),
        None => {
            let kinds: Vec<Bracket> = curves.windows(2).map(|w| bracket(&w[0], &w[1])).collect();
            let w = if kinds.iter().all(|&k| k == Bracket::BelowEverywhere) {
                Some(hi)
            } else if kinds.iter().all(|&k| k == Bracket::AboveEverywhere) {
                Some(lo)
            } else {
                None
            };
            (w, None, false)
        }
    };
    Ok(SurfacePoint { m, w_th, ci, bracketed, curves })
}

/// Boundary points along the given directions.
pub fn surface_points(spec: &FtSurfaceSpec, points: &[[f64; 3]]) -> Result<FtSurface, ExperimentError> {
    spec.validate()?;
    let points = points.iter().enumerate().map(|(i, &m)| scan_point(spec, m, i)).collect::<Result<_, _>>()?;
    Ok(FtSurface { spec: spec.clone(), points })
}

pub fn ft_surface(spec: &FtSurfaceSpec) -> Result<FtSurface, ExperimentError> {
    surface_points(spec, &tessellate(spec.thresholds, spec.n_p))
}

/// The `D = 0` edge of the plane, `count` points from the `t` corner to the
/// `p_F` corner.
pub fn ft_line(spec: &FtSurfaceSpec, count: usize) -> Result<FtSurface, ExperimentError> {
    let [a, b, _] = spec.thresholds;
    let points: Vec<[f64; 3]> = linspace(0.0, 1.0, count.max(2)).into_iter().map(|s| [s * a, (1.0 - s) * b, 0.0]).collect();
    surface_points(spec, &points)
}

impl FtSurface {
    /// Interpolated border `t_th(p_F)` from the points with `D = 0`.
    pub fn border(&self) -> Result<Border, ExperimentError> {
        let knots = self
            .points
            .iter()
            .filter(|p| p.m[2] == 0.0)
            .filter_map(|p| p.boundary())
            .map(|b| (b[0], b[1]))
            .collect();
        Border::new(knots)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("m_p_F,m_t_rus_over_T2,m_D,w_th,bracketed,p_F,t_rus_over_T2,D\n");
        for p in &self.points {
            let w = p.w_th.map_or(String::new(), |w| w.to_string());
            let b = p.boundary().map_or(",,".into(), |b| format!("{},{},{}", b[0], b[1], b[2]));
            writeln!(out, "{},{},{},{},{},{}", p.m[0], p.m[1], p.m[2], w, p.bracketed, b).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tessellation_covers_the_plane() {
        let t = [0.1, 0.02, 0.03];
        let pts = tessellate(t, 120);
        assert_eq!(pts.len(), 120);
        for p in &pts {
            let s = p[0] / t[0] + p[1] / t[1] + p[2] / t[2];
            assert!((s - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
        for corner in [[0.1, 0.0, 0.0], [0.0, 0.02, 0.0], [0.0, 0.0, 0.03]] {
            assert!(pts.contains(&corner));
        }
        assert_eq!(tessellate(t, 3).len(), 3);
        assert_eq!(tessellate(t, 4).len(), 6);
    }

    #[test]
    fn validation() {
        let s = FtSurfaceSpec::new([0.1, 0.02, 0.02], vec![3, 5], 10, 0);
        assert!(s.validate().is_ok());
        assert!(FtSurfaceSpec { n_p: 2, ..s.clone() }.validate().is_err());
        assert!(FtSurfaceSpec { w_range: [1.0, 0.85], ..s.clone() }.validate().is_err());
        assert!(FtSurfaceSpec { thresholds: [0.1, 0.0, 0.02], ..s }.validate().is_err());
    }

    #[test]
    fn far_from_threshold_is_flagged_at_an_endpoint() {
        let mut s = FtSurfaceSpec::new([0.02, 0.004, 0.004], vec![3, 5], 2000, 1);
        s.w_points = 3;
        let out = surface_points(&s, &[[0.02, 0.0, 0.0]]).unwrap();
        let p = &out.points[0];
        assert!(!p.bracketed);
        assert!(matches!(p.w_th, Some(w) if w == 1.0) || p.w_th.is_none());
    }
}

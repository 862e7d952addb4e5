use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

/// Logical error count at one sweep value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub value: f64,
    pub shots: u64,
    pub errors: u64,
}

impl CurvePoint {
    pub fn p_l(&self) -> f64 {
        self.errors as f64 / self.shots as f64
    }

    /// Binomial standard error.
    pub fn stderr(&self) -> f64 {
        let p = self.p_l();
        (p * (1.0 - p) / self.shots as f64).sqrt()
    }
}

/// Logical error rates of one distance along the sweep, ascending in value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub distance: usize,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub crossing: f64,
    /// Percentile bootstrap interval; `None` when no replicate crossed.
    pub ci: Option<[f64; 2]>,
    pub distances: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub distances: [usize; 2],
    /// `None` means no crossing in the swept range.
    pub estimate: Option<ThresholdEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub pairs: Vec<PairCrossing>,
    /// Inverse-variance weighted mean of the pair crossings that exist, with
    /// variances from the bootstrap (equal weights when it has too few draws).
    pub pooled: Option<ThresholdEstimate>,
}

/// Where the larger code stands relative to the smaller one over the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bracket {
    Crossed,
    /// The larger distance is better at every value.
    BelowEverywhere,
    /// The larger distance is worse at every value.
    AboveEverywhere,
    Undetermined,
}

fn wls(xs: &[f64], ys: &[f64], ws: &[f64]) -> Option<(f64, f64)> {
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(ws).map(|(x, w)| w * (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).zip(ws).map(|((x, y), w)| w * (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn log_point(p: &CurvePoint) -> Option<(f64, f64)> {
    if p.errors == 0 || p.errors == p.shots || p.value <= 0.0 {
        return None;
    }
    let (e, n) = (p.errors as f64, p.shots as f64);
    Some((p.p_l().ln(), e * n / (n - e)))
}

/// Sign pattern of `ln p_large − ln p_small` over the common grid.
pub fn bracket(small: &Curve, large: &Curve) -> Bracket {
    let g: Vec<f64> = small
        .points
        .iter()
        .zip(&large.points)
        .filter_map(|(a, b)| Some(log_point(b)?.0 - log_point(a)?.0))
        .collect();
    if g.is_empty() {
        Bracket::Undetermined
    } else if g.windows(2).any(|w| w[0] < 0.0 && w[1] >= 0.0) {
        Bracket::Crossed
    } else if g.iter().all(|&x| x < 0.0) {
        Bracket::BelowEverywhere
    } else if g.iter().all(|&x| x >= 0.0) {
        Bracket::AboveEverywhere
    } else {
        Bracket::Undetermined
    }
}

/// Crossing of two curves on the same grid from weighted straight-line fits
/// of `ln p_L` against `ln x` around the sign changes of their difference.
pub fn pair_crossing(small: &Curve, large: &Curve) -> Option<f64> {
    let rows: Vec<(f64, (f64, f64), (f64, f64))> = small
        .points
        .iter()
        .zip(&large.points)
        .filter_map(|(a, b)| Some((a.value.ln(), log_point(a)?, log_point(b)?)))
        .collect();
    let changes: Vec<usize> =
        (0..rows.len().saturating_sub(1)).filter(|&i| rows[i].2 .0 < rows[i].1 .0 && rows[i + 1].2 .0 >= rows[i + 1].1 .0).collect();
    let (&first, &last) = (changes.first()?, changes.last()?);
    let window = &rows[first.saturating_sub(1)..(last + 3).min(rows.len())];
    let xs: Vec<f64> = window.iter().map(|r| r.0).collect();
    let fit = |pick: fn(&(f64, (f64, f64), (f64, f64))) -> (f64, f64)| {
        let (ys, ws): (Vec<f64>, Vec<f64>) = window.iter().map(pick).unzip();
        wls(&xs, &ys, &ws)
    };
    let (s1, c1) = fit(|r| r.1)?;
    let (s2, c2) = fit(|r| r.2)?;
    if s2 <= s1 {
        return None;
    }
    let x = ((c1 - c2) / (s2 - s1)).exp();
    let lo = small.points.first()?.value;
    let hi = small.points.last()?.value;
    (lo..=hi).contains(&x).then_some(x)
}

fn pair_estimates(curves: &[Curve]) -> Vec<Option<f64>> {
    curves.windows(2).map(|w| pair_crossing(&w[0], &w[1])).collect()
}

fn pool(pairs: &[Option<f64>], weights: &[f64]) -> Option<f64> {
    let (sum, norm) = pairs
        .iter()
        .zip(weights)
        .filter_map(|(&x, &w)| Some((x? * w, w)))
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    (norm > 0.0).then(|| sum / norm)
}

fn inverse_variances(draws: &[Vec<f64>]) -> Vec<f64> {
    let inv: Vec<Option<f64>> = draws
        .iter()
        .map(|d| {
            let n = d.len() as f64;
            let mean = d.iter().sum::<f64>() / n;
            let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            (d.len() >= 2 && var > 0.0).then(|| 1.0 / var)
        })
        .collect();
    if inv.iter().all(Option::is_some) {
        inv.into_iter().flatten().collect()
    } else {
        vec![1.0; draws.len()]
    }
}

fn percentile_ci(mut xs: Vec<f64>) -> Option<[f64; 2]> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let at = |q: f64| xs[((q * (xs.len() - 1) as f64).round() as usize).min(xs.len() - 1)];
    Some([at(0.025), at(0.975)])
}

/// Pair crossings of consecutive curves and their pooled value, with percentile
/// intervals from a parametric bootstrap that redraws every count.
pub fn crossings(curves: &[Curve], replicates: usize, seed: u64) -> CrossingReport {
    let pairs = pair_estimates(curves);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut replicate_pairs = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let redrawn: Vec<Curve> = curves
            .iter()
            .map(|c| Curve {
                distance: c.distance,
                points: c
                    .points
                    .iter()
                    .map(|p| CurvePoint {
                        errors: Binomial::new(p.shots, p.p_l()).expect("valid binomial").sample(&mut rng),
                        ..*p
                    })
                    .collect(),
            })
            .collect();
        replicate_pairs.push(pair_estimates(&redrawn));
    }
    let pair_draws: Vec<Vec<f64>> =
        (0..pairs.len()).map(|i| replicate_pairs.iter().filter_map(|r| r[i]).collect()).collect();
    let weights = inverse_variances(&pair_draws);
    let pooled = pool(&pairs, &weights);
    let pooled_draws: Vec<f64> = replicate_pairs.iter().filter_map(|r| pool(r, &weights)).collect();
    let distances: Vec<usize> = curves.iter().map(|c| c.distance).collect();
    CrossingReport {
        pairs: pairs
            .into_iter()
            .zip(pair_draws)
            .zip(curves.windows(2))
            .map(|((x, draws), w)| PairCrossing {
                distances: [w[0].distance, w[1].distance],
                estimate: x.map(|crossing| ThresholdEstimate {
                    crossing,
                    ci: percentile_ci(draws),
                    distances: vec![w[0].distance, w[1].distance],
                }),
            })
            .collect(),
        pooled: pooled.map(|crossing| ThresholdEstimate { crossing, ci: percentile_ci(pooled_draws), distances }),
    }
}

//! Measurements on simulated paths: occupation measures, hitting times,
//! the Fenchel-coupling growth audit, power-law rate fits and ensemble
//! summaries.
//!
//! Distances to a center point are Euclidean.

use thiserror::Error;

use crate::dynamics::{SensitivitySchedule, Trajectory};
use crate::geometry::Region;
use crate::linalg::dot;
use crate::mirror::{MirrorError, Regularizer};
use crate::noise::NoiseModel;
use crate::problems::Objective;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("no logged samples in the measurement window")]
    EmptyWindow,
    #[error("radius must be positive")]
    BadRadius,
    #[error("gap must be positive inside the fit window (t = {0})")]
    NonPositiveGap(f64),
    #[error("rate fit needs at least 10 points in the window, got {0}")]
    TooFewPoints(usize),
    #[error("trajectories are logged on different grids")]
    GridMismatch,
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error(transparent)]
    Mirror(#[from] MirrorError),
}

fn distance(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Fraction of logged samples in `[burn_in, T]` lying in the closed ball `B_δ(center)`.
pub fn occupation_fraction(
    traj: &Trajectory,
    center: &[f64],
    delta: f64,
    burn_in: f64,
) -> Result<f64, DiagnosticsError> {
    if !(delta > 0.0) {
        return Err(DiagnosticsError::BadRadius);
    }
    let mut total = 0usize;
    let mut inside = 0usize;
    for (t, x) in traj.times.iter().zip(&traj.primal_path) {
        if *t >= burn_in {
            total += 1;
            if distance(x, center) <= delta {
                inside += 1;
            }
        }
    }
    if total == 0 {
        return Err(DiagnosticsError::EmptyWindow);
    }
    Ok(inside as f64 / total as f64)
}

/// First logged time at which the path is within `delta` of `center`.
pub fn hitting_time(traj: &Trajectory, center: &[f64], delta: f64) -> Option<f64> {
    traj.times
        .iter()
        .zip(&traj.primal_path)
        .find(|(_, x)| distance(x, center) <= delta)
        .map(|(t, _)| *t)
}

/// Per-interval decomposition of the growth of `V = η⁻¹F(x*, ηY)`.
///
/// On interval `[t_k, t_{k+1}]` of length `Δ`:
///
/// * `drift = Δ·⟨v(X_k), X_k − x*⟩`
/// * `temperature = −Δ·(η̇/η²)·[h(x*) − h(X_k)]`
/// * `ito = Δ·η·tr Σ / (2K)`
/// * `residual = ΔV − drift − temperature − ito`
/// * `martingale = ⟨X_k − x*, ΔY⟩ − drift`, the noise increment actually fed in
///
/// A violation is an interval where `ΔV` exceeds the four terms by more than
/// `slack_rate · Δ`.
#[derive(Clone, Debug, Default)]
pub struct FenchelAuditReport {
    pub times: Vec<f64>,
    pub v: Vec<f64>,
    pub drift: Vec<f64>,
    pub temperature: Vec<f64>,
    pub ito: Vec<f64>,
    pub martingale: Vec<f64>,
    pub residual: Vec<f64>,
    pub delta_v: Vec<f64>,
    pub cum_drift: Vec<f64>,
    pub cum_temperature: Vec<f64>,
    pub cum_ito: Vec<f64>,
    pub cum_martingale: Vec<f64>,
    pub cum_residual: Vec<f64>,
    pub cum_delta_v: Vec<f64>,
    pub slack_rate: f64,
    pub violation_count: usize,
    /// Logged times with `V < 0` beyond rounding (1e−12).
    pub negative_v_count: usize,
    /// Largest single-interval increase of `V`.
    pub max_increase: f64,
    /// Largest `⟨v(X_k), X_k − x*⟩` seen; nonpositive when `x*` minimizes a convex `f`.
    pub max_drift_rate: f64,
}

impl FenchelAuditReport {
    pub fn final_cum_residual(&self) -> f64 {
        self.cum_residual.last().copied().unwrap_or(0.0)
    }
}

/// Audits a logged trajectory against the Fenchel growth inequality.
#[allow(clippy::too_many_arguments)]
pub fn fenchel_audit(
    traj: &Trajectory,
    obj: &Objective,
    reg: Regularizer,
    region: &Region,
    target: &[f64],
    sched: &SensitivitySchedule,
    noise: Option<&NoiseModel>,
) -> Result<FenchelAuditReport, DiagnosticsError> {
    if traj.dual_path.len() != traj.len() || traj.is_empty() {
        return Err(DiagnosticsError::EmptyWindow);
    }
    let k_conv = reg.strong_convexity(region)?;
    let h_star = reg.value(region, target)?;
    let n = target.len();
    let mut grad = vec![0.0; n];

    let mut rep = FenchelAuditReport {
        max_increase: f64::NEG_INFINITY,
        max_drift_rate: f64::NEG_INFINITY,
        ..Default::default()
    };
    let mut max_v_norm: f64 = 0.0;
    let mut rates = Vec::with_capacity(traj.len());
    for (k, x) in traj.primal_path.iter().enumerate() {
        let v_k = reg.deflated_coupling(region, target, &traj.dual_path[k], traj.etas[k])?;
        rep.v.push(v_k);
        if v_k < -1e-12 {
            rep.negative_v_count += 1;
        }
        obj.value_grad_into(x, &mut grad);
        max_v_norm = max_v_norm.max(region.dual_norm(&grad));
        let diff: Vec<f64> = x.iter().zip(target).map(|(a, b)| a - b).collect();
        // v = −∇f
        let rate = -dot(&grad, &diff);
        rep.max_drift_rate = rep.max_drift_rate.max(rate);
        rates.push((rate, diff, reg.value(region, x)?));
    }
    rep.slack_rate = 10.0 * max_v_norm * region.diameter();

    let mut cum = [0.0f64; 6];
    for (k, (rate, diff, h_x)) in rates.iter().enumerate().take(traj.len() - 1) {
        let (t0, t1) = (traj.times[k], traj.times[k + 1]);
        let span = t1 - t0;
        let eta = traj.etas[k];
        let drift = span * rate;
        let temperature = -span * sched.eta_dot(t0) / (eta * eta) * (h_star - h_x);
        let ito = noise.map_or(0.0, |m| {
            span * eta * m.trace_covariance(&traj.primal_path[k], t0) / (2.0 * k_conv)
        });
        let dy: Vec<f64> = traj.dual_path[k + 1]
            .iter()
            .zip(traj.dual_path[k].iter())
            .map(|(a, b)| a - b)
            .collect();
        let martingale = dot(diff, &dy) - drift;
        let delta_v = rep.v[k + 1] - rep.v[k];
        let residual = delta_v - drift - temperature - ito;
        if residual > martingale + rep.slack_rate * span {
            rep.violation_count += 1;
        }
        rep.max_increase = rep.max_increase.max(delta_v);
        for (c, v) in cum
            .iter_mut()
            .zip([drift, temperature, ito, martingale, residual, delta_v])
        {
            *c += v;
        }
        rep.times.push(t1);
        rep.drift.push(drift);
        rep.temperature.push(temperature);
        rep.ito.push(ito);
        rep.martingale.push(martingale);
        rep.residual.push(residual);
        rep.delta_v.push(delta_v);
        rep.cum_drift.push(cum[0]);
        rep.cum_temperature.push(cum[1]);
        rep.cum_ito.push(cum[2]);
        rep.cum_martingale.push(cum[3]);
        rep.cum_residual.push(cum[4]);
        rep.cum_delta_v.push(cum[5]);
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares slope of `log gap` against `log t` over `window`.
pub fn rate_fit(times: &[f64], gaps: &[f64], window: (f64, f64)) -> Result<RateFit, DiagnosticsError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &g) in times.iter().zip(gaps) {
        if t >= window.0 && t <= window.1 {
            if !(g > 0.0) {
                return Err(DiagnosticsError::NonPositiveGap(t));
            }
            xs.push(t.ln());
            ys.push(g.ln());
        }
    }
    let m = xs.len();
    if m < 10 {
        return Err(DiagnosticsError::TooFewPoints(m));
    }
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: m,
    })
}

/// Reductions of one path, cheap enough to keep for large ensembles.
#[derive(Clone, Debug, PartialEq)]
pub struct PathStats {
    /// `(first time, last time, samples)` of the logged grid.
    pub grid: (f64, f64, usize),
    /// `t⁻¹∫₀ᵗ‖X − x*‖² ds` at the final time (trapezoidal on the logged grid).
    pub time_avg_sq_dist: f64,
    pub hitting_time: Option<f64>,
    pub occupation: f64,
    pub final_gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatsOptions {
    pub hit_delta: f64,
    pub occupation_delta: f64,
    pub burn_in: f64,
    pub f_star: f64,
}

impl PathStats {
    pub fn from_trajectory(traj: &Trajectory, target: &[f64], opts: &StatsOptions) -> Result<Self, DiagnosticsError> {
        if traj.is_empty() {
            return Err(DiagnosticsError::EmptyWindow);
        }
        let sq: Vec<f64> = traj.primal_path.iter().map(|x| distance(x, target).powi(2)).collect();
        let t_end = traj.final_time() - traj.times[0];
        let time_avg_sq_dist = if t_end > 0.0 {
            let integral: f64 = traj
                .times
                .windows(2)
                .zip(sq.windows(2))
                .map(|(t, s)| 0.5 * (t[1] - t[0]) * (s[0] + s[1]))
                .sum();
            integral / t_end
        } else {
            sq[0]
        };
        Ok(PathStats {
            grid: (traj.times[0], traj.final_time(), traj.len()),
            time_avg_sq_dist,
            hitting_time: hitting_time(traj, target, opts.hit_delta),
            occupation: occupation_fraction(traj, target, opts.occupation_delta, opts.burn_in)?,
            final_gap: traj.f_values.last().copied().unwrap_or(f64::NAN) - opts.f_star,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

pub fn mean_se(values: &[f64]) -> MeanSe {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    MeanSe {
        mean,
        se: (var / n).sqrt(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSummary {
    pub paths: usize,
    pub time_avg_sq_dist: MeanSe,
    /// Mean over paths that hit; `None` when none did.
    pub mean_hitting_time: Option<f64>,
    pub hit_fraction: f64,
    pub occupation: MeanSe,
    pub final_gap_mean: f64,
    pub final_gap_min: f64,
    pub final_gap_max: f64,
}

/// Aggregates per-path statistics logged on a common grid.
pub fn summarize(stats: &[PathStats]) -> Result<EnsembleSummary, DiagnosticsError> {
    let first = stats.first().ok_or(DiagnosticsError::EmptyEnsemble)?;
    if stats.iter().any(|s| s.grid != first.grid) {
        return Err(DiagnosticsError::GridMismatch);
    }
    let dists: Vec<f64> = stats.iter().map(|s| s.time_avg_sq_dist).collect();
    let occ: Vec<f64> = stats.iter().map(|s| s.occupation).collect();
    let hits: Vec<f64> = stats.iter().filter_map(|s| s.hitting_time).collect();
    let gaps: Vec<f64> = stats.iter().map(|s| s.final_gap).collect();
    Ok(EnsembleSummary {
        paths: stats.len(),
        time_avg_sq_dist: mean_se(&dists),
        mean_hitting_time: (!hits.is_empty()).then(|| hits.iter().sum::<f64>() / hits.len() as f64),
        hit_fraction: hits.len() as f64 / stats.len() as f64,
        occupation: mean_se(&occ),
        final_gap_mean: gaps.iter().sum::<f64>() / gaps.len() as f64,
        final_gap_min: gaps.iter().cloned().fold(f64::INFINITY, f64::min),
        final_gap_max: gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Summary of a list of trajectories against `target`.
pub fn ensemble_summary(
    trajs: &[Trajectory],
    target: &[f64],
    opts: &StatsOptions,
) -> Result<EnsembleSummary, DiagnosticsError> {
    let stats = trajs
        .iter()
        .map(|t| PathStats::from_trajectory(t, target, opts))
        .collect::<Result<Vec<_>, _>>()?;
    summarize(&stats)
}

/// Thins a logged series to about `count` log-spaced samples inside `window`.
pub fn log_spaced(times: &[f64], gaps: &[f64], window: (f64, f64), count: usize) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = (window.0.ln(), window.1.ln());
    let mut ts = Vec::with_capacity(count);
    let mut gs = Vec::with_capacity(count);
    let mut last = usize::MAX;
    for j in 0..count {
        let t = (lo + (hi - lo) * j as f64 / (count - 1) as f64).exp();
        let idx = times.partition_point(|&s| s < t * (1.0 - 1e-12)).min(times.len() - 1);
        if idx != last {
            ts.push(times[idx]);
            gs.push(gaps[idx]);
            last = idx;
        }
    }
    (ts, gs)
}

/// Pointwise ensemble mean of a per-path series.
pub fn mean_series(series: &[Vec<f64>]) -> Vec<f64> {
    let n = series.len() as f64;
    let len = series.iter().map(Vec::len).min().unwrap_or(0);
    (0..len).map(|k| series.iter().map(|s| s[k]).sum::<f64>() / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, h: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * h).collect()
    }

    fn path(times: &[f64], f: impl Fn(f64) -> Vec<f64>) -> Trajectory {
        let xs: Vec<Vec<f64>> = times.iter().map(|&t| f(t)).collect();
        let fs = vec![0.0; times.len()];
        Trajectory::from_samples(times.to_vec(), xs, fs)
    }

    #[test]
    fn occupation_examples() {
        let ts = grid(1001, 0.01);
        let inside = path(&ts, |_| vec![0.1, 0.0]);
        assert_eq!(occupation_fraction(&inside, &[0.0, 0.0], 0.2, 0.0).unwrap(), 1.0);
        // in for t < 5, out afterwards
        let square = path(&ts, |t| vec![if t < 5.0 { 0.0 } else { 1.0 }]);
        let frac = occupation_fraction(&square, &[0.0], 0.5, 0.0).unwrap();
        assert!((frac - 0.5).abs() <= 1.0 / 1001.0);
        let far = path(&ts, |_| vec![1.0, 1.0]);
        assert_eq!(occupation_fraction(&far, &[0.0, 0.0], 2f64.sqrt(), 0.0).unwrap(), 1.0);
        assert_eq!(
            occupation_fraction(&far, &[0.0, 0.0], 1.0, 100.0),
            Err(DiagnosticsError::EmptyWindow)
        );
    }

    #[test]
    fn hitting_examples() {
        let ts = grid(1001, 1e-3);
        let down = path(&ts, |t| vec![1.0 - t]);
        assert!((hitting_time(&down, &[0.0], 0.5).unwrap() - 0.5).abs() <= 1e-3);
        assert_eq!(hitting_time(&down, &[1.0], 0.1), Some(0.0));
        assert_eq!(hitting_time(&down, &[3.0], 0.5), None);
    }

    #[test]
    fn rate_fit_examples() {
        let ts: Vec<f64> = (0..200).map(|k| 10f64.powf(1.0 + k as f64 / 50.0)).collect();
        let inv: Vec<f64> = ts.iter().map(|t| 1.0 / t).collect();
        assert!((rate_fit(&ts, &inv, (1.0, 1e6)).unwrap().slope + 1.0).abs() < 1e-6);
        let root: Vec<f64> = ts.iter().map(|t| t.powf(-0.5)).collect();
        assert!((rate_fit(&ts, &root, (1.0, 1e6)).unwrap().slope + 0.5).abs() < 1e-6);
        let wavy: Vec<f64> = ts.iter().map(|t| t.powf(-0.5) * (1.0 + 0.1 * t.ln().sin())).collect();
        let fit = rate_fit(&ts, &wavy, (1.0, 1e6)).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.05 && fit.r_squared >= 0.95);
        let mut bad = root.clone();
        bad[3] = 0.0;
        assert!(matches!(
            rate_fit(&ts, &bad, (1.0, 1e6)),
            Err(DiagnosticsError::NonPositiveGap(_))
        ));
        assert!(matches!(
            rate_fit(&ts[..5], &root[..5], (1.0, 1e6)),
            Err(DiagnosticsError::TooFewPoints(5))
        ));
    }

    #[test]
    fn summary_examples() {
        let ts = grid(101, 0.1);
        let opts = StatsOptions {
            hit_delta: 0.1,
            occupation_delta: 0.1,
            burn_in: 0.0,
            f_star: 0.0,
        };
        let at = path(&ts, |_| vec![0.2, 0.3]);
        let s = ensemble_summary(&[at], &[0.2, 0.3], &opts).unwrap();
        assert_eq!(s.time_avg_sq_dist.mean, 0.0);
        assert_eq!(s.mean_hitting_time, Some(0.0));

        let a = path(&ts, |_| vec![0.3]);
        let b = path(&ts, |_| vec![-0.4]);
        let s = ensemble_summary(&[a, b], &[0.0], &opts).unwrap();
        assert!((s.time_avg_sq_dist.mean - (0.09 + 0.16) / 2.0).abs() < 1e-12);

        let short = path(&grid(50, 0.1), |_| vec![0.0]);
        let long = path(&ts, |_| vec![0.0]);
        assert_eq!(
            ensemble_summary(&[short, long], &[0.0], &opts),
            Err(DiagnosticsError::GridMismatch)
        );
    }
}

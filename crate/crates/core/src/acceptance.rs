//! Named end-to-end checks of the convergence guarantees.
//!
//! Each suite runs seeded ensembles and returns one or more report rows.
//! A suite passes when all of its rows pass.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::diagnostics::{self, fenchel_audit, mean_se, rate_fit, DiagnosticsError, PathStats, StatsOptions};
use crate::dynamics::{
    integrate_hr1d, integrate_md, rectify, Dynamics, DynamicsError, IntegratorConfig, RectifyMode, SensitivitySchedule,
    Trajectory,
};
use crate::geometry::{Primal, Region};
use crate::linalg::Matrix;
use crate::mirror::{MirrorError, Regularizer};
use crate::noise::{DecaySchedule, NoiseModel};
use crate::problems::Objective;
use crate::properties;
use crate::traffic::{random_network, social_optimum, TrafficError, TrafficModel, DEFAULT_PATH_CAP};

/// Seed used when none is given on the command line.
pub const DEFAULT_SEED: u64 = 20_170_301;

#[derive(Debug, Error)]
pub enum AcceptanceError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Mirror(#[from] MirrorError),
    #[error(transparent)]
    Traffic(#[from] TrafficError),
    #[error("{0}")]
    Setup(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub check: String,
    pub measured: f64,
    pub target: String,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(check: impl Into<String>, measured: f64, target: impl Into<String>, pass: bool) -> Self {
        CheckResult {
            check: check.into(),
            measured,
            target: target.into(),
            pass,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AcceptanceOptions {
    pub seed: u64,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions { seed: DEFAULT_SEED }
    }
}

type SuiteFn = fn(&AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError>;

#[derive(Debug)]
pub struct Suite {
    pub name: &'static str,
    pub title: &'static str,
    pub run: SuiteFn,
    /// Set when the suite is expected to fail, with the reason.
    pub known_deviation: Option<&'static str>,
}

const RECTIFIED_RATES_DEVIATION: &str = "the rates are upper bounds; with an interior minimizer \
     the averaged gap decays close to 1/t, so the β ≤ ½ slopes come out steeper than the targets";

pub const SUITES: &[Suite] = &[
    Suite {
        name: "ou-variance",
        title: "OU stationary variance",
        run: ou_variance,
        known_deviation: None,
    },
    Suite {
        name: "omega-bound",
        title: "deterministic Ω/t bound",
        run: omega_bound,
        known_deviation: None,
    },
    Suite {
        name: "vanishing-noise",
        title: "vanishing-noise convergence",
        run: vanishing_noise,
        known_deviation: None,
    },
    Suite {
        name: "hitting-time",
        title: "hitting-time bound",
        run: hitting_time,
        known_deviation: None,
    },
    Suite {
        name: "mse-bound",
        title: "mean-square time-average bound",
        run: mse_bound,
        known_deviation: None,
    },
    Suite {
        name: "occupation",
        title: "occupation concentration",
        run: occupation,
        known_deviation: None,
    },
    Suite {
        name: "sharp-minimum",
        title: "sharp minimum in finite time",
        run: sharp_minimum,
        known_deviation: None,
    },
    Suite {
        name: "rectified-rates",
        title: "rectified power-law rates",
        run: rectified_rates,
        known_deviation: Some(RECTIFIED_RATES_DEVIATION),
    },
    Suite {
        name: "optimized-schedule",
        title: "optimized-schedule constant",
        run: optimized_schedule,
        known_deviation: None,
    },
    Suite {
        name: "shd-smd",
        title: "SHD/SMD dichotomy",
        run: shd_smd,
        known_deviation: None,
    },
    Suite {
        name: "traffic-power-law",
        title: "traffic power law",
        run: traffic_power_law,
        known_deviation: None,
    },
    Suite {
        name: "fenchel-audit",
        title: "Fenchel growth audit",
        run: fenchel_audit_suite,
        known_deviation: None,
    },
    Suite {
        name: "properties",
        title: "randomized property suites",
        run: property_suites,
        known_deviation: None,
    },
];

pub fn find_suite(name: &str) -> Result<&'static Suite, AcceptanceError> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| AcceptanceError::UnknownSuite(name.to_string()))
}

/// Writes `check,measured,target,pass` rows.
pub fn write_report<W: std::io::Write>(out: W, rows: &[CheckResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "measured", "target", "pass"])?;
    for r in rows {
        w.write_record([
            r.check.clone(),
            format!("{:.16e}", r.measured),
            r.target.clone(),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn box_quadratic() -> (Objective, Region) {
    let obj = Objective::quadratic(vec![0.5, 0.5], Matrix::identity(2))
        .expect("identity curvature")
        .with_known_min(vec![0.5, 0.5], 0.0);
    (obj, Region::cube(2, 0.0, 1.0).expect("unit square"))
}

fn simplex_quadratic() -> (Objective, Region) {
    let mu = vec![0.5, 0.3, 0.2];
    let obj = Objective::quadratic(mu.clone(), Matrix::identity(3))
        .expect("identity curvature")
        .with_known_min(mu, 0.0);
    (obj, Region::simplex(1.0, 3).expect("unit simplex"))
}

fn ensemble<T: Send>(
    paths: usize,
    f: impl Fn(u64) -> Result<T, AcceptanceError> + Sync + Send,
) -> Result<Vec<T>, AcceptanceError> {
    (0..paths as u64).into_par_iter().map(f).collect()
}

fn cfg(dt: f64, horizon: f64, y0: Vec<f64>, stride: usize, seed: u64, path: u64) -> IntegratorConfig {
    let mut c = IntegratorConfig::new(dt, horizon, y0);
    c.log_stride = stride;
    c.seed = seed;
    c.path = path;
    c
}

fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
}

fn ou_variance(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let region = Region::cube(1, -10.0, 10.0).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let obj = Objective::isotropic(vec![0.0], 1.0).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let noise = NoiseModel::isotropic(1, 1.0).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let dynamics = Dynamics {
        obj: &obj,
        reg: Regularizer::Euclidean,
        region: &region,
        noise: Some(&noise),
        sched: SensitivitySchedule::Constant { eta0: 1.0 },
    };
    let finals = ensemble(200, |p| {
        let tr = dynamics.integrate(&cfg(1e-3, 50.0, vec![0.0], 50_000, o.seed, p))?;
        Ok(tr.final_primal()[0])
    })?;
    let var = sample_variance(&finals);
    Ok(vec![CheckResult::new(
        "ou-variance",
        var,
        "0.5 ± 10%",
        (var - 0.5).abs() <= 0.05,
    )])
}

fn omega_excess(tr: &Trajectory, omega: f64, f_star: f64) -> f64 {
    tr.times
        .iter()
        .zip(&tr.f_avg)
        .filter(|(t, _)| **t >= 1.0)
        .map(|(t, fa)| fa - f_star - omega / t)
        .fold(f64::NEG_INFINITY, f64::max)
}

type NamedRun = (&'static str, Objective, Region, Regularizer, Trajectory);

/// Deterministic runs shared by the Ω/t and audit suites.
fn deterministic_runs() -> Result<Vec<NamedRun>, AcceptanceError> {
    let mut out = Vec::new();
    for (name, (obj, region), reg) in [
        ("box-euclidean", box_quadratic(), Regularizer::Euclidean),
        ("simplex-entropic", simplex_quadratic(), Regularizer::Entropic),
    ] {
        let mut c = cfg(1e-3, 100.0, vec![0.0; region.dim()], 10, 0, 0);
        c.target = obj.known_min.as_ref().map(|(x, _)| x.clone());
        let tr = integrate_md(&obj, reg, &region, 1.0, &c)?;
        out.push((name, obj, region, reg, tr));
    }
    Ok(out)
}

fn omega_bound(_: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let mut rows = Vec::new();
    for (name, obj, region, reg, tr) in deterministic_runs()? {
        let omega = reg.depth(&region)?;
        let f_star = obj.known_min.as_ref().map_or(0.0, |m| m.1);
        let excess = omega_excess(&tr, omega, f_star);
        rows.push(CheckResult::new(
            format!("omega-bound/{name}"),
            excess,
            "max_t (f̄(t) − f* − Ω/t) ≤ 1e-4",
            excess <= 1e-4,
        ));
    }
    Ok(rows)
}

fn vanishing_noise(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let (obj, region) = box_quadratic();
    let noise =
        NoiseModel::decaying(0.1, DecaySchedule::InvLog, 2).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let dynamics = Dynamics {
        obj: &obj,
        reg: Regularizer::Euclidean,
        region: &region,
        noise: Some(&noise),
        sched: SensitivitySchedule::Constant { eta0: 1.0 },
    };
    let dists = ensemble(50, |p| {
        let tr = dynamics.integrate(&cfg(1e-3, 200.0, vec![0.0, 0.0], 200_000, o.seed, p))?;
        let x = tr.final_primal();
        Ok(((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)).sqrt())
    })?;
    let frac = dists.iter().filter(|&&d| d <= 0.05).count() as f64 / dists.len() as f64;
    Ok(vec![CheckResult::new(
        "vanishing-noise",
        frac,
        "fraction ≥ 0.9 within 0.05",
        frac >= 0.9,
    )])
}

/// Box quadratic with `σ = 0.1·I`, so `σ*² = 0.02`, `α = K = 1`, `δ = 0.2`.
struct Concentration {
    obj: Objective,
    region: Region,
    noise: NoiseModel,
    sigma_sq: f64,
    delta: f64,
    omega: f64,
}

fn concentration() -> Result<Concentration, AcceptanceError> {
    let (obj, region) = box_quadratic();
    let noise = NoiseModel::isotropic(2, 0.1).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let omega = Regularizer::Euclidean.depth(&region)?;
    Ok(Concentration {
        sigma_sq: noise.sup_bound(),
        obj,
        region,
        noise,
        delta: 0.2,
        omega,
    })
}

impl Concentration {
    fn k(&self) -> f64 {
        Regularizer::Euclidean
            .strong_convexity(&self.region)
            .expect("euclidean pairs with boxes")
    }

    fn dynamics(&self, eta: f64) -> Dynamics<'_> {
        Dynamics {
            obj: &self.obj,
            reg: Regularizer::Euclidean,
            region: &self.region,
            noise: Some(&self.noise),
            sched: SensitivitySchedule::Constant { eta0: eta },
        }
    }

    fn target(&self) -> &Primal {
        &self.obj.known_min.as_ref().expect("known minimizer").0
    }
}

fn hitting_time(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let c = concentration()?;
    let alpha = c.obj.alpha;
    let k = c.k();
    let eta = alpha * k * c.delta * c.delta / (2.0 * c.sigma_sq);
    let bound = 8.0 * c.omega * c.sigma_sq / (alpha * alpha * k * c.delta.powi(4));
    let horizon = 20.0;
    let dynamics = c.dynamics(eta);
    let hits = ensemble(200, |p| {
        let tr = dynamics.integrate(&cfg(1e-3, horizon, vec![0.0, 0.0], 1, o.seed, p))?;
        Ok(diagnostics::hitting_time(&tr, c.target(), c.delta))
    })?;
    let all_hit = hits.iter().all(Option::is_some);
    // paths that never hit are counted at the horizon, a lower bound on their hitting time
    let mean = hits.iter().map(|h| h.unwrap_or(horizon)).sum::<f64>() / hits.len() as f64;
    Ok(vec![CheckResult::new(
        "hitting-time",
        mean,
        format!("mean τ ≤ {bound:.4} (all paths hit by t = {horizon})"),
        all_hit && mean <= bound,
    )])
}

fn mse_bound(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let c = concentration()?;
    let (alpha, k) = (c.obj.alpha, c.k());
    let eta = alpha * k * c.delta * c.delta / (2.0 * c.sigma_sq);
    let t = 50.0;
    let y0 = vec![0.0, 0.0];
    let f0 = Regularizer::Euclidean.fenchel_coupling(
        &c.region,
        c.target(),
        &y0.iter().map(|v| eta * v).collect::<Vec<_>>(),
    )?;
    let bound = 2.0 * f0 / (eta * alpha * t) + eta * c.sigma_sq / (alpha * k);
    let opts = StatsOptions {
        hit_delta: c.delta,
        occupation_delta: c.delta,
        burn_in: 0.0,
        f_star: 0.0,
    };
    let dynamics = c.dynamics(eta);
    let stats = ensemble(200, |p| {
        let tr = dynamics.integrate(&cfg(1e-3, t, y0.clone(), 10, o.seed, p))?;
        Ok(PathStats::from_trajectory(&tr, c.target(), &opts)?)
    })?;
    let summary = diagnostics::summarize(&stats)?;
    let m = summary.time_avg_sq_dist;
    Ok(vec![CheckResult::new(
        "mse-bound",
        m.mean,
        format!("≤ {bound:.6} + 3·SE ({:.2e})", m.se),
        m.mean <= bound + 3.0 * m.se,
    )])
}

fn occupation(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let c = concentration()?;
    let eps = 0.1;
    let eta = eps * c.obj.alpha * c.k() * c.delta * c.delta / c.sigma_sq;
    let horizon = 500.0;
    let opts = StatsOptions {
        hit_delta: c.delta,
        occupation_delta: c.delta,
        burn_in: 0.2 * horizon,
        f_star: 0.0,
    };
    let dynamics = c.dynamics(eta);
    let occ = ensemble(50, |p| {
        let tr = dynamics.integrate(&cfg(1e-3, horizon, vec![0.0, 0.0], 10, o.seed, p))?;
        Ok(PathStats::from_trajectory(&tr, c.target(), &opts)?.occupation)
    })?;
    let m = mean_se(&occ).mean;
    Ok(vec![CheckResult::new(
        "occupation",
        m,
        "mean ≥ 1 − ε − 0.05 = 0.85",
        m >= 1.0 - eps - 0.05,
    )])
}

fn sharp_minimum(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let obj = Objective::linear(vec![1.0, 2.0], 0.0).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let region = Region::cube(2, 0.0, 1.0).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let noise = NoiseModel::isotropic(2, 0.3).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let eta = 0.05;
    let horizon = 100.0;
    let dynamics = Dynamics {
        obj: &obj,
        reg: Regularizer::Euclidean,
        region: &region,
        noise: Some(&noise),
        sched: SensitivitySchedule::Constant { eta0: eta },
    };
    // start at the center of the square
    let y0 = vec![0.5 / eta, 0.5 / eta];
    let stuck = ensemble(100, |p| {
        let tr = dynamics.integrate(&cfg(1e-3, horizon, y0.clone(), 1, o.seed, p))?;
        Ok(tr
            .times
            .iter()
            .zip(&tr.primal_path)
            .filter(|(t, _)| **t >= 0.9 * horizon)
            .all(|(_, x)| x[0] == 0.0 && x[1] == 0.0))
    })?;
    let frac = stuck.iter().filter(|&&s| s).count() as f64 / stuck.len() as f64;
    Ok(vec![CheckResult::new(
        "sharp-minimum",
        frac,
        "fraction ≥ 0.95 at (0,0) over final 10%",
        frac >= 0.95,
    )])
}

/// Log-spaced sample of `(t, gap)` pairs inside `window`.
/// Ensemble-mean gap of the averaged path on the logged grid.
fn rectified_gap_series(
    dynamics: &Dynamics<'_>,
    c: &IntegratorConfig,
    paths: usize,
    f_star: f64,
    mode: Option<RectifyMode>,
) -> Result<(Vec<f64>, Vec<f64>), AcceptanceError> {
    let series = ensemble(paths, |p| {
        let mut cc = c.clone();
        cc.path = p;
        let tr = dynamics.integrate(&cc)?;
        let tr = match mode {
            Some(m) => rectify(&tr, dynamics.obj, m),
            None => tr,
        };
        Ok((tr.times, tr.f_values.iter().map(|f| f - f_star).collect::<Vec<f64>>()))
    })?;
    let times = series[0].0.clone();
    let gaps: Vec<Vec<f64>> = series.into_iter().map(|s| s.1).collect();
    Ok((times, diagnostics::mean_series(&gaps)))
}

fn rectified_rates(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let (obj, region) = simplex_quadratic();
    let noise = NoiseModel::isotropic(3, 0.5).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let c = cfg(1e-2, 1e4, vec![0.0; 3], 100, o.seed, 0);
    let mut rows = Vec::new();
    for (beta, target, tol) in [(0.25, -0.25, 0.1), (0.5, -0.5, 0.12), (0.75, -0.25, 0.1)] {
        let dynamics = Dynamics {
            obj: &obj,
            reg: Regularizer::Entropic,
            region: &region,
            noise: Some(&noise),
            sched: SensitivitySchedule::PowerLaw { eta0: 1.0, beta },
        };
        let (times, gaps) = rectified_gap_series(&dynamics, &c, 20, 0.0, Some(RectifyMode::Average))?;
        let (ts, gs) = diagnostics::log_spaced(&times, &gaps, (1e2, 1e4), 60);
        let fit = rate_fit(&ts, &gs, (1e2, 1e4))?;
        rows.push(CheckResult::new(
            format!("rectified-rates/beta={beta}"),
            fit.slope,
            format!("slope {target} ± {tol}"),
            (fit.slope - target).abs() <= tol,
        ));
    }
    Ok(rows)
}

fn optimized_schedule(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let (obj, region) = simplex_quadratic();
    let noise = NoiseModel::isotropic(3, 0.5).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let omega = Regularizer::Entropic.depth(&region)?;
    let k = Regularizer::Entropic.strong_convexity(&region)?;
    let sigma_sq = noise.sup_bound();
    let horizon = 1e4;
    let dynamics = Dynamics {
        obj: &obj,
        reg: Regularizer::Entropic,
        region: &region,
        noise: Some(&noise),
        sched: SensitivitySchedule::Optimized { omega, k, sigma_sq },
    };
    let c = cfg(1e-2, horizon, vec![0.0; 3], 1_000_000, o.seed, 0);
    let (_, gaps) = rectified_gap_series(&dynamics, &c, 20, 0.0, Some(RectifyMode::Average))?;
    let gap = *gaps.last().expect("final sample");
    let bound = 1.5 * 2.0 * (omega * sigma_sq / (k * horizon)).sqrt();
    Ok(vec![CheckResult::new(
        "optimized-schedule",
        gap,
        format!("≤ {bound:.6}"),
        gap <= bound,
    )])
}

fn shd_smd(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let ends = ensemble(500, |p| {
        let pair = integrate_hr1d(3.0, 0.8, &cfg(1e-3, 50.0, vec![], 50_000, o.seed, p))?;
        Ok((pair.smd.final_primal()[0], pair.shd.final_primal()[0]))
    })?;
    let n = ends.len() as f64;
    let smd = ends.iter().filter(|e| e.0 < 0.01).count() as f64 / n;
    let shd = ends.iter().filter(|e| e.1 > 0.99).count() as f64 / n;
    Ok(vec![
        CheckResult::new("shd-smd/smd-to-argmin", smd, "fraction X(T) < 0.01 ≥ 0.95", smd >= 0.95),
        CheckResult::new("shd-smd/shd-to-argmax", shd, "fraction X(T) > 0.99 ≥ 0.5", shd >= 0.5),
    ])
}

/// Seed of the random network used by the traffic suite.
pub const TRAFFIC_NETWORK_SEED: u64 = 7;

fn traffic_power_law(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let net = random_network(20, 40, TRAFFIC_NETWORK_SEED)?;
    let model = Arc::new(TrafficModel::new(net, DEFAULT_PATH_CAP)?);
    let opt = social_optimum(&model, 5_000_000);
    if !opt.certified {
        return Err(AcceptanceError::Setup(format!(
            "social optimum not certified (spread {:.3e})",
            opt.support_spread
        )));
    }
    let n = model.paths.len();
    let region = Region::simplex(model.network.demand, n).map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let noise = NoiseModel::path_correlated(&model.paths, model.network.edge_sigmas())
        .map_err(|e| AcceptanceError::Setup(e.to_string()))?;
    let obj = Objective::traffic(model);
    let c = cfg(1e-2, 1e3, vec![0.0; n], 10, o.seed, 0);
    let window = (10.0, 1e3);

    let mut rows = Vec::new();
    for (sched, mode) in [
        (
            SensitivitySchedule::PowerLaw { eta0: 1.0, beta: 0.5 },
            Some(RectifyMode::Average),
        ),
        (SensitivitySchedule::Constant { eta0: 1.0 }, None),
    ] {
        let dynamics = Dynamics {
            obj: &obj,
            reg: Regularizer::Entropic,
            region: &region,
            noise: Some(&noise),
            sched,
        };
        let (times, gaps) = rectified_gap_series(&dynamics, &c, 20, opt.cost, mode)?;
        let (ts, gs) = diagnostics::log_spaced(&times, &gaps, window, 60);
        let fit = rate_fit(&ts, &gs, window)?;
        if mode.is_some() {
            rows.push(CheckResult::new(
                "traffic-power-law/rectified-slope",
                fit.slope,
                "slope ≤ −0.3",
                fit.slope <= -0.3,
            ));
            rows.push(CheckResult::new(
                "traffic-power-law/rectified-r2",
                fit.r_squared,
                "r² ≥ 0.9",
                fit.r_squared >= 0.9,
            ));
        } else {
            rows.push(CheckResult::new(
                "traffic-power-law/raw-slope",
                fit.slope,
                "slope 0 ± 0.1",
                fit.slope.abs() <= 0.1,
            ));
        }
    }
    Ok(rows)
}

fn fenchel_audit_suite(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    let mut rows = Vec::new();
    for (name, obj, region, reg, tr) in deterministic_runs()? {
        let target = obj.known_min.as_ref().expect("known minimizer").0.clone();
        let sched = SensitivitySchedule::Constant { eta0: 1.0 };
        let rep = fenchel_audit(&tr, &obj, reg, &region, &target, &sched, None)?;
        // per logged interval of 10 steps
        let per_step = rep.max_increase / 10.0;
        rows.push(CheckResult::new(
            format!("fenchel-audit/{name}/violations"),
            rep.violation_count as f64,
            "0",
            rep.violation_count == 0 && rep.negative_v_count == 0,
        ));
        rows.push(CheckResult::new(
            format!("fenchel-audit/{name}/monotone"),
            per_step,
            "max V increase per step ≤ 1e-6",
            per_step <= 1e-6,
        ));
    }

    let c = concentration()?;
    let eta = c.obj.alpha * c.k() * c.delta * c.delta / (2.0 * c.sigma_sq);
    let dynamics = c.dynamics(eta);
    let sched = dynamics.sched;
    let reports = ensemble(200, |p| {
        let tr = dynamics.integrate(&cfg(1e-3, 50.0, vec![0.0, 0.0], 1, o.seed, p))?;
        let rep = fenchel_audit(
            &tr,
            &c.obj,
            Regularizer::Euclidean,
            &c.region,
            c.target(),
            &sched,
            Some(&c.noise),
        )?;
        Ok((rep.violation_count + rep.negative_v_count, rep.final_cum_residual()))
    })?;
    let violations: usize = reports.iter().map(|r| r.0).sum();
    rows.push(CheckResult::new(
        "fenchel-audit/stochastic/violations",
        violations as f64,
        "0",
        violations == 0,
    ));
    Ok(rows)
}

fn property_suites(o: &AcceptanceOptions) -> Result<Vec<CheckResult>, AcceptanceError> {
    Ok(properties::run_all(o.seed, properties::DEFAULT_CASES)
        .into_iter()
        .map(|p| {
            CheckResult::new(
                format!("properties/{}", p.name),
                p.failures as f64,
                format!("0 of {} cases", p.cases),
                p.failures == 0,
            )
        })
        .collect())
}

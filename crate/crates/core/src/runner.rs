//! Config-driven experiment runs and the files they produce.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::acceptance::{self, AcceptanceError, AcceptanceOptions, CheckResult, Suite, SUITES};
use crate::config::{ConfigError, ExperimentConfig, NetworkSource, NoiseSpec, ProblemSpec, RegionSpec, ScheduleSpec};
use crate::diagnostics::{
    fenchel_audit, hitting_time, log_spaced, mean_se, mean_series, occupation_fraction, rate_fit, DiagnosticsError,
};
use crate::dynamics::{
    rectify, run_ensemble, Dynamics, DynamicsError, IntegratorConfig, SensitivitySchedule, Trajectory,
};
use crate::geometry::{Primal, Region};
use crate::mirror::Regularizer;
use crate::noise::NoiseModel;
use crate::problems::{Objective, ObjectiveKind};
use crate::traffic::{random_network, social_optimum, Network, SocialOptimum, TrafficModel};

/// Iteration budget for the certified traffic optimum.
const OPTIMUM_ITERATIONS: usize = 5_000_000;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid `{field}`: {msg}")]
    Setup { field: &'static str, msg: String },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Acceptance(#[from] AcceptanceError),
    #[error("i/o error on `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl RunError {
    /// 2 for configuration problems, 3 for numerical aborts.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Dynamics(DynamicsError::NonFinite { .. }) => 3,
            _ => 2,
        }
    }
}

fn setup_err(field: &'static str, e: impl ToString) -> RunError {
    RunError::Setup {
        field,
        msg: e.to_string(),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Constants reported alongside a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derived {
    /// Strong convexity of the regularizer.
    pub k: f64,
    /// Depth `max h − min h` of the region.
    pub omega: f64,
    /// Supremum of `‖σ‖²` over the horizon.
    pub sigma_sq: f64,
    /// Strong-convexity modulus of the objective.
    pub alpha: f64,
}

impl Derived {
    pub fn pairs(&self) -> [(&'static str, f64); 4] {
        [
            ("K", self.k),
            ("Omega", self.omega),
            ("sigma_star_sq", self.sigma_sq),
            ("alpha", self.alpha),
        ]
    }
}

/// Fully constructed components of an experiment.
pub struct Setup {
    pub obj: Objective,
    pub region: Region,
    pub reg: Regularizer,
    pub noise: NoiseModel,
    pub sched: SensitivitySchedule,
    pub y0: Vec<f64>,
    /// Reference minimizer and value used by every gap and distance.
    pub target: Primal,
    pub f_star: f64,
    pub derived: Derived,
    pub traffic: Option<(Arc<TrafficModel>, SocialOptimum)>,
}

impl Setup {
    pub fn dynamics(&self) -> Dynamics<'_> {
        Dynamics {
            obj: &self.obj,
            reg: self.reg,
            region: &self.region,
            noise: (!self.noise.is_zero()).then_some(&self.noise),
            sched: self.sched,
        }
    }

    pub fn integrator(&self, cfg: &ExperimentConfig) -> IntegratorConfig {
        IntegratorConfig {
            dt: cfg.dt,
            horizon: cfg.horizon,
            seed: cfg.seed,
            log_stride: cfg.log_stride,
            y0: crate::geometry::Dual(self.y0.clone()),
            path: 0,
            target: Some(self.target.clone()),
        }
    }
}

fn load_network(src: &NetworkSource) -> Result<Network, RunError> {
    match src {
        NetworkSource::File(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| setup_err("problem.network", format!("{}: {e}", p.display())))?;
            Network::parse(&text).map_err(|e| setup_err("problem.network", e))
        }
        NetworkSource::Random {
            nodes,
            extra_edges,
            seed,
        } => random_network(*nodes, *extra_edges, *seed).map_err(|e| setup_err("problem.nodes", e)),
    }
}

/// Resolves every component named by the config.
pub fn build(cfg: &ExperimentConfig) -> Result<Setup, RunError> {
    cfg.validate()?;
    let mut traffic = None;
    let (obj, region) = match &cfg.problem {
        ProblemSpec::Traffic { network, path_cap } => {
            let net = load_network(network)?;
            let demand = net.demand;
            let model = Arc::new(TrafficModel::new(net, *path_cap).map_err(|e| setup_err("problem.network", e))?);
            let region = Region::simplex(demand, model.paths.len()).map_err(|e| setup_err("problem.network", e))?;
            let opt = social_optimum(&model, OPTIMUM_ITERATIONS);
            if !opt.certified {
                return Err(setup_err(
                    "problem.network",
                    format!("social optimum not certified (spread {:.3e})", opt.support_spread),
                ));
            }
            let obj = Objective::traffic(model.clone()).with_known_min(opt.flow.clone(), opt.cost);
            traffic = Some((model, opt));
            (obj, region)
        }
        other => {
            let obj = match other {
                ProblemSpec::Quadratic { center, curvature } => Objective::quadratic(center.clone(), curvature.clone()),
                ProblemSpec::Linear { cost, offset } => Objective::linear(cost.clone(), *offset),
                _ => Ok(Objective::scalar_1d()),
            }
            .map_err(|e| setup_err("problem", e))?;
            let region_spec = cfg.region.as_ref().ok_or_else(|| setup_err("region.kind", "missing"))?;
            let region = match region_spec {
                RegionSpec::Box { lower, upper } => Region::boxed(lower.clone(), upper.clone()),
                RegionSpec::Cube { dim, lower, upper } => Region::cube(*dim, *lower, *upper),
                RegionSpec::Simplex { dim, mass } => Region::simplex(*mass, *dim),
                RegionSpec::Spectrahedron { order } => Region::spectrahedron(*order),
            }
            .map_err(|e| setup_err("region", e))?;
            if let Some(d) = obj.dim() {
                if d != region.dim() {
                    return Err(setup_err(
                        "problem",
                        format!("dimension {d} does not match region dimension {}", region.dim()),
                    ));
                }
            }
            (obj, region)
        }
    };
    cfg.mirror
        .check_pairing(&region)
        .map_err(|e| setup_err("mirror.kind", e))?;
    let n = region.dim();

    let noise = match &cfg.noise {
        NoiseSpec::Zero => Ok(NoiseModel::zero(n)),
        NoiseSpec::Isotropic { sigma } => NoiseModel::isotropic(n, *sigma),
        NoiseSpec::Constant(m) => NoiseModel::constant(m.clone()),
        NoiseSpec::Decaying { sigma, decay } => NoiseModel::decaying(*sigma, *decay, n),
        NoiseSpec::Path { edge_sigma } => {
            let (model, _) = traffic
                .as_ref()
                .ok_or_else(|| setup_err("noise.kind", "path noise needs a traffic problem"))?;
            let sigmas = match edge_sigma {
                Some(s) => vec![*s; model.network.edges.len()],
                None => model.network.edge_sigmas(),
            };
            NoiseModel::path_correlated(&model.paths, sigmas)
        }
    }
    .map_err(|e| setup_err("noise", e))?;
    if noise.state_dim() != n {
        return Err(setup_err(
            "noise.matrix",
            format!("volatility has {} rows, state dimension is {n}", noise.state_dim()),
        ));
    }

    let derived = Derived {
        k: cfg
            .mirror
            .strong_convexity(&region)
            .map_err(|e| setup_err("mirror.kind", e))?,
        omega: cfg.mirror.depth(&region).map_err(|e| setup_err("mirror.kind", e))?,
        sigma_sq: noise.sup_bound(),
        alpha: obj.alpha,
    };
    let sched = match cfg.schedule {
        ScheduleSpec::Constant { eta0 } => SensitivitySchedule::Constant { eta0 },
        ScheduleSpec::PowerLaw { eta0, beta } => SensitivitySchedule::PowerLaw { eta0, beta },
        ScheduleSpec::Optimized => SensitivitySchedule::Optimized {
            omega: derived.omega,
            k: derived.k,
            sigma_sq: derived.sigma_sq,
        },
    };
    sched.validate().map_err(|e| setup_err("schedule", e))?;

    let y0 = cfg.y0.clone().unwrap_or_else(|| vec![0.0; n]);
    if y0.len() != n {
        return Err(setup_err(
            "integrator.y0",
            format!("expected {n} entries, got {}", y0.len()),
        ));
    }
    let (target, f_star) = reference_minimum(&obj, &region)?;
    Ok(Setup {
        obj,
        region,
        reg: cfg.mirror,
        noise,
        sched,
        y0,
        target,
        f_star,
        derived,
        traffic,
    })
}

/// Minimizer of `obj` over `region`: the recorded one when present, otherwise
/// projected gradient descent run to a fixed point.
pub fn reference_minimum(obj: &Objective, region: &Region) -> Result<(Primal, f64), RunError> {
    if let Some((x, f)) = &obj.known_min {
        return Ok((x.clone(), *f));
    }
    let n = region.dim();
    let start = match obj.kind() {
        ObjectiveKind::Quadratic { center, .. } => center.0.clone(),
        _ => vec![0.0; n],
    };
    let mut x = region.euclidean_project(&start).map_err(|e| setup_err("region", e))?.0;
    let step = 1.0 / obj.lipschitz.unwrap_or(1.0).max(1.0);
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..1_000_000 {
        obj.value_grad_into(&x, &mut grad);
        for ((t, xi), g) in trial.iter_mut().zip(&x).zip(&grad) {
            *t = xi - step * g;
        }
        region
            .project_into(&trial, &mut next)
            .map_err(|e| setup_err("region", e))?;
        let moved = next.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        std::mem::swap(&mut x, &mut next);
        if moved <= 1e-15 {
            break;
        }
    }
    let f = obj.value(&x);
    Ok((Primal(x), f))
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `t, x_1..x_n, f, f_avg, f_best, fenchel`.
pub fn write_trajectory_csv<W: Write>(out: W, traj: &Trajectory) -> csv::Result<()> {
    let n = traj.primal_path.first().map_or(0, |x| x.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.extend(["f", "f_avg", "f_best", "fenchel"].map(String::from));
    w.write_record(&header)?;
    for k in 0..traj.len() {
        let mut rec = Vec::with_capacity(n + 5);
        rec.push(fmt(traj.times[k]));
        rec.extend(traj.primal_path[k].iter().map(|v| fmt(*v)));
        rec.push(fmt(traj.f_values[k]));
        rec.push(fmt(traj.f_avg[k]));
        rec.push(fmt(traj.f_best[k]));
        rec.push(traj.fenchel_to_target.as_ref().map_or(String::new(), |v| fmt(v[k])));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric CSV back as `(header, rows)`; empty cells become NaN.
pub fn read_numeric_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), RunError> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| if s.is_empty() { Ok(f64::NAN) } else { s.parse::<f64>() })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| setup_err("csv", e))?;
        rows.push(row);
    }
    Ok((header, rows))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub statistic: String,
    pub value: f64,
    pub se: Option<f64>,
}

impl SummaryRow {
    fn new(statistic: impl Into<String>, value: f64) -> Self {
        SummaryRow {
            statistic: statistic.into(),
            value,
            se: None,
        }
    }

    fn with_se(statistic: impl Into<String>, values: &[f64]) -> Self {
        let m = mean_se(values);
        SummaryRow {
            statistic: statistic.into(),
            value: m.mean,
            se: Some(m.se),
        }
    }
}

pub fn write_summary_csv<W: Write>(out: W, rows: &[SummaryRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["statistic", "value", "se"])?;
    for r in rows {
        w.write_record([r.statistic.clone(), fmt(r.value), r.se.map_or(String::new(), fmt)])?;
    }
    w.flush()?;
    Ok(())
}

/// What a run produced.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub summary: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
    pub derived: Derived,
}

fn create(path: PathBuf, files: &mut Vec<PathBuf>) -> Result<BufWriter<File>, RunError> {
    let f = File::create(&path).map_err(io_err(&path))?;
    files.push(path);
    Ok(BufWriter::new(f))
}

/// Runs the ensemble described by `cfg` and writes its files into `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let setup = build(cfg)?;
    run_with(cfg, &setup)
}

/// Like [`run_experiment`] for traffic problems, adding the network, the
/// social optimum and the raw/rectified gap series.
pub fn run_traffic_demo(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    if !matches!(cfg.problem, ProblemSpec::Traffic { .. }) {
        return Err(setup_err("problem.kind", "traffic-demo needs `problem.kind = traffic`"));
    }
    let setup = build(cfg)?;
    run_with(cfg, &setup)
}

fn run_with(cfg: &ExperimentConfig, setup: &Setup) -> Result<RunReport, RunError> {
    let icfg = setup.integrator(cfg);
    let dynamics = setup.dynamics();
    let trajs = run_ensemble(&dynamics, &icfg, cfg.paths)?;

    fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;
    let mut files = Vec::new();
    for (i, tr) in trajs.iter().take(cfg.trajectories).enumerate() {
        let w = create(cfg.out_dir.join(format!("trajectory_{i}.csv")), &mut files)?;
        write_trajectory_csv(w, tr)?;
    }

    let summary = summarize_run(cfg, setup, &trajs)?;
    let w = create(cfg.out_dir.join("summary.csv"), &mut files)?;
    write_summary_csv(w, &summary)?;

    if let Some((model, _)) = &setup.traffic {
        let mut w = create(cfg.out_dir.join("network.txt"), &mut files)?;
        let path = cfg.out_dir.join("network.txt");
        w.write_all(model.network.to_text().as_bytes()).map_err(io_err(&path))?;
        w.flush().map_err(io_err(&path))?;
        write_gap_series(cfg, setup, &trajs, &mut files)?;
    }

    let echo = cfg.to_text(&setup.derived.pairs());
    let path = cfg.out_dir.join("config.echo");
    fs::write(&path, echo).map_err(io_err(&path))?;
    files.push(path);

    Ok(RunReport {
        summary,
        files,
        derived: setup.derived,
    })
}

fn gap_series(trajs: &[Trajectory], f_star: f64) -> Vec<f64> {
    let per_path: Vec<Vec<f64>> = trajs
        .iter()
        .map(|t| t.f_values.iter().map(|f| f - f_star).collect())
        .collect();
    mean_series(&per_path)
}

fn rectified(cfg: &ExperimentConfig, setup: &Setup, trajs: &[Trajectory]) -> Option<Vec<Trajectory>> {
    cfg.diagnostics
        .rectify
        .map(|mode| trajs.iter().map(|t| rectify(t, &setup.obj, mode)).collect())
}

fn write_gap_series(
    cfg: &ExperimentConfig,
    setup: &Setup,
    trajs: &[Trajectory],
    files: &mut Vec<PathBuf>,
) -> Result<(), RunError> {
    let raw = gap_series(trajs, setup.f_star);
    let rect = rectified(cfg, setup, trajs).map(|r| gap_series(&r, setup.f_star));
    let mut w = csv::Writer::from_writer(create(cfg.out_dir.join("gap_series.csv"), files)?);
    w.write_record(["t", "raw_gap", "rectified_gap"])?;
    for (k, t) in trajs[0].times.iter().enumerate() {
        let r = rect.as_ref().map_or(String::new(), |g| fmt(g[k]));
        w.write_record([fmt(*t), fmt(raw[k]), r])?;
    }
    w.flush().map_err(|e| RunError::Io {
        path: cfg.out_dir.join("gap_series.csv"),
        source: e,
    })?;
    Ok(())
}

fn summarize_run(cfg: &ExperimentConfig, setup: &Setup, trajs: &[Trajectory]) -> Result<Vec<SummaryRow>, RunError> {
    let d = &cfg.diagnostics;
    let x_star = &setup.target;
    let mut rows = vec![SummaryRow::new("paths", trajs.len() as f64)];
    rows.push(SummaryRow::new("f_star", setup.f_star));

    let final_gaps: Vec<f64> = trajs
        .iter()
        .map(|t| t.f_values.last().copied().unwrap_or(f64::NAN) - setup.f_star)
        .collect();
    rows.push(SummaryRow::with_se("final_gap", &final_gaps));
    rows.push(SummaryRow::new(
        "final_gap_min",
        final_gaps.iter().cloned().fold(f64::INFINITY, f64::min),
    ));
    rows.push(SummaryRow::new(
        "final_gap_max",
        final_gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    ));
    let avg_gaps: Vec<f64> = trajs
        .iter()
        .map(|t| t.f_avg.last().copied().unwrap_or(f64::NAN) - setup.f_star)
        .collect();
    rows.push(SummaryRow::with_se("time_avg_gap", &avg_gaps));

    let sq: Vec<f64> = trajs.iter().map(|t| time_avg_sq_dist(t, x_star)).collect();
    rows.push(SummaryRow::with_se("time_avg_sq_dist", &sq));

    let hits: Vec<f64> = trajs
        .iter()
        .filter_map(|t| hitting_time(t, x_star, d.hitting_delta))
        .collect();
    rows.push(SummaryRow::new(
        format!("hit_fraction[delta={}]", d.hitting_delta),
        hits.len() as f64 / trajs.len() as f64,
    ));
    if !hits.is_empty() {
        rows.push(SummaryRow::with_se(
            format!("hitting_time[delta={}]", d.hitting_delta),
            &hits,
        ));
    }
    for &delta in &d.occupation_deltas {
        let occ = trajs
            .iter()
            .map(|t| occupation_fraction(t, x_star, delta, d.burn_in))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(SummaryRow::with_se(format!("occupation[delta={delta}]"), &occ));
    }

    let rect = rectified(cfg, setup, trajs);
    if let Some(r) = &rect {
        let gaps: Vec<f64> = r
            .iter()
            .map(|t| t.f_values.last().copied().unwrap_or(f64::NAN) - setup.f_star)
            .collect();
        rows.push(SummaryRow::with_se("rectified_final_gap", &gaps));
    }
    if let Some(window) = d.rate_window {
        let times = &trajs[0].times;
        let mut fits = vec![("raw", gap_series(trajs, setup.f_star))];
        if let Some(r) = &rect {
            fits.push(("rectified", gap_series(r, setup.f_star)));
        }
        for (name, gaps) in fits {
            let (ts, gs) = log_spaced(times, &gaps, window, 60);
            let fit = rate_fit(&ts, &gs, window)?;
            rows.push(SummaryRow::new(format!("{name}_rate_slope"), fit.slope));
            rows.push(SummaryRow::new(format!("{name}_rate_r2"), fit.r_squared));
        }
    }

    if d.audit {
        let noise = (!setup.noise.is_zero()).then_some(&setup.noise);
        let reports = trajs
            .iter()
            .map(|t| fenchel_audit(t, &setup.obj, setup.reg, &setup.region, x_star, &setup.sched, noise))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(SummaryRow::new(
            "audit_violations",
            reports.iter().map(|r| r.violation_count).sum::<usize>() as f64,
        ));
        rows.push(SummaryRow::new(
            "audit_negative_v",
            reports.iter().map(|r| r.negative_v_count).sum::<usize>() as f64,
        ));
        rows.push(SummaryRow::new(
            "audit_max_increase",
            reports.iter().map(|r| r.max_increase).fold(f64::NEG_INFINITY, f64::max),
        ));
        let resid: Vec<f64> = reports.iter().map(|r| r.final_cum_residual()).collect();
        rows.push(SummaryRow::with_se("audit_cum_residual", &resid));
    }

    if let Some((model, opt)) = &setup.traffic {
        rows.push(SummaryRow::new("network_paths", model.paths.len() as f64));
        rows.push(SummaryRow::new(
            "network_paths_truncated",
            f64::from(u8::from(model.paths.truncated)),
        ));
        rows.push(SummaryRow::new("optimum_support_spread", opt.support_spread));
    }
    Ok(rows)
}

fn time_avg_sq_dist(t: &Trajectory, x_star: &[f64]) -> f64 {
    let sq: Vec<f64> = t
        .primal_path
        .iter()
        .map(|x| x.iter().zip(x_star).map(|(a, b)| (a - b) * (a - b)).sum())
        .collect();
    let span = t.final_time() - t.times[0];
    if span <= 0.0 {
        return sq[0];
    }
    let integral: f64 = t
        .times
        .windows(2)
        .zip(sq.windows(2))
        .map(|(w, s)| 0.5 * (w[1] - w[0]) * (s[0] + s[1]))
        .sum();
    integral / span
}

/// Result of one acceptance suite.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub suite: &'static Suite,
    pub rows: Vec<CheckResult>,
    pub error: Option<String>,
    pub elapsed: Duration,
}

impl SuiteOutcome {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.rows.iter().all(|r| r.pass)
    }
}

/// Runs one named suite (or all of them), calling `progress` after each,
/// and writes `acceptance_report.csv` into `out_dir`.
pub fn run_acceptance(
    suite: Option<&str>,
    opts: &AcceptanceOptions,
    out_dir: &Path,
    mut progress: impl FnMut(usize, &SuiteOutcome),
) -> Result<Vec<SuiteOutcome>, RunError> {
    let selected: Vec<(usize, &'static Suite)> = match suite {
        None | Some("all") => SUITES.iter().enumerate().collect(),
        Some(name) => {
            let s = acceptance::find_suite(name)?;
            let idx = SUITES.iter().position(|x| x.name == s.name).unwrap_or(0);
            vec![(idx, s)]
        }
    };
    let mut outcomes = Vec::new();
    for (idx, s) in selected {
        let start = Instant::now();
        let (rows, error) = match (s.run)(opts) {
            Ok(rows) => (rows, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let outcome = SuiteOutcome {
            suite: s,
            rows,
            error,
            elapsed: start.elapsed(),
        };
        progress(idx + 1, &outcome);
        outcomes.push(outcome);
    }
    let rows: Vec<CheckResult> = outcomes
        .iter()
        .flat_map(|o| match &o.error {
            None => o.rows.clone(),
            Some(e) => vec![CheckResult::new(o.suite.name, f64::NAN, format!("error: {e}"), false)],
        })
        .collect();
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let path = out_dir.join("acceptance_report.csv");
    let f = File::create(&path).map_err(io_err(&path))?;
    acceptance::write_report(BufWriter::new(f), &rows)?;
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn reference_minimum_projects_exterior_center() {
        let obj = Objective::isotropic(vec![2.0, 0.5], 1.0).unwrap();
        let region = Region::cube(2, 0.0, 1.0).unwrap();
        let (x, f) = reference_minimum(&obj, &region).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12);
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reference_minimum_of_linear_program_is_vertex() {
        let obj = Objective::linear(vec![1.0, 2.0], 0.0).unwrap();
        let region = Region::cube(2, 0.0, 1.0).unwrap();
        let (x, f) = reference_minimum(&obj, &region).unwrap();
        assert_eq!(x.0, vec![0.0, 0.0]);
        assert_eq!(f, 0.0);
    }

    #[test]
    fn reference_minimum_on_simplex_with_curvature() {
        let obj = Objective::quadratic(vec![1.0, 1.0, -1.0], Matrix::diag(&[2.0, 1.0, 1.0])).unwrap();
        let region = Region::simplex(1.0, 3).unwrap();
        let (x, _) = reference_minimum(&obj, &region).unwrap();
        // KKT on the face x₃ = 0: 2(x₁−1) = x₂−1, x₁+x₂ = 1, so x = (2/3, 1/3, 0)
        assert!(
            (x[0] - 2.0 / 3.0).abs() < 1e-9 && (x[1] - 1.0 / 3.0).abs() < 1e-9 && x[2].abs() < 1e-12,
            "{:?}",
            x.0
        );
    }

    #[test]
    fn nonfinite_maps_to_exit_three() {
        assert_eq!(RunError::Dynamics(DynamicsError::NonFinite { step: 3 }).exit_code(), 3);
        assert_eq!(setup_err("dt", "bad").exit_code(), 2);
    }
}

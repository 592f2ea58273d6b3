//! Time integrators for the deterministic and stochastic mirror dynamics.
//!
//! The state is the dual score `y`; the primal point is `x = Q(η(t)·y)`.
//! Both flows are advanced by forward Euler (Euler–Maruyama with noise):
//!
//! ```text
//! y_{k+1} = y_k − dt·∇f(x_k) + σ(x_k, t_k)·√dt·ξ_k
//! ```

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{Dual, GeometryError, Primal, Region};
use crate::mirror::{MirrorError, Regularizer};
use crate::noise::NoiseModel;
use crate::problems::Objective;
use crate::rng::GaussianStream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid `{field}`: {msg}")]
    Config { field: &'static str, msg: String },
    #[error(transparent)]
    Mirror(#[from] MirrorError),
    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },
}

impl From<GeometryError> for DynamicsError {
    fn from(e: GeometryError) -> Self {
        DynamicsError::Mirror(e.into())
    }
}

fn config_err(field: &'static str, msg: impl Into<String>) -> DynamicsError {
    DynamicsError::Config { field, msg: msg.into() }
}

/// Sensitivity schedule `η(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SensitivitySchedule {
    Constant {
        eta0: f64,
    },
    /// `η₀·min(1, t^{−β})`
    PowerLaw {
        eta0: f64,
        beta: f64,
    },
    /// `√(ΩK/σ*²)·min(1, 1/√t)`
    Optimized {
        omega: f64,
        k: f64,
        sigma_sq: f64,
    },
}

impl SensitivitySchedule {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        match *self {
            SensitivitySchedule::Constant { eta0 } if !positive(eta0) => {
                Err(config_err("schedule.eta0", "must be a positive number"))
            }
            SensitivitySchedule::PowerLaw { eta0, .. } if !positive(eta0) => {
                Err(config_err("schedule.eta0", "must be a positive number"))
            }
            SensitivitySchedule::PowerLaw { beta, .. } if !(beta > 0.0 && beta < 1.0) => {
                Err(config_err("schedule.beta", "must lie in (0,1)"))
            }
            SensitivitySchedule::Optimized { omega, k, sigma_sq }
                if !positive(omega) || !positive(k) || !positive(sigma_sq) =>
            {
                Err(config_err("schedule", "optimized schedule needs Ω, K, σ*² > 0"))
            }
            _ => Ok(()),
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            SensitivitySchedule::Constant { eta0 } | SensitivitySchedule::PowerLaw { eta0, .. } => eta0,
            SensitivitySchedule::Optimized { omega, k, sigma_sq } => (omega * k / sigma_sq).sqrt(),
        }
    }

    fn exponent(&self) -> f64 {
        match *self {
            SensitivitySchedule::Constant { .. } => 0.0,
            SensitivitySchedule::PowerLaw { beta, .. } => beta,
            SensitivitySchedule::Optimized { .. } => 0.5,
        }
    }

    pub fn eta(&self, t: f64) -> f64 {
        let b = self.exponent();
        if b == 0.0 || t <= 1.0 {
            self.scale()
        } else {
            self.scale() * t.powf(-b)
        }
    }

    /// `dη/dt`, taking the left derivative (zero) at the kink `t = 1`.
    pub fn eta_dot(&self, t: f64) -> f64 {
        let b = self.exponent();
        if b == 0.0 || t <= 1.0 {
            0.0
        } else {
            -b * self.scale() * t.powf(-b - 1.0)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub log_stride: usize,
    pub y0: Dual,
    /// Path index; selects the noise stream within a seed.
    pub path: u64,
    /// When set, the deflated Fenchel coupling to this point is logged.
    pub target: Option<Primal>,
}

impl IntegratorConfig {
    pub fn new(dt: f64, horizon: f64, y0: Vec<f64>) -> Self {
        IntegratorConfig {
            dt,
            horizon,
            seed: 0,
            log_stride: 1,
            y0: Dual(y0),
            path: 0,
            target: None,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(config_err("dt", "must be a positive number"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(config_err("horizon", "must be a positive number"));
        }
        if self.dt > self.horizon {
            return Err(config_err("dt", format!("exceeds the horizon {}", self.horizon)));
        }
        if self.log_stride == 0 {
            return Err(config_err("log_stride", "must be ≥ 1"));
        }
        if self.log_stride as f64 * self.dt > self.horizon {
            return Err(config_err("log_stride", "log_stride·dt exceeds the horizon"));
        }
        if !self.y0.is_finite() {
            return Err(config_err("y0", "must be finite"));
        }
        Ok(())
    }

    /// Number of Euler steps, `round(T/dt)`.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }
}

/// A logged sample path. Series are indexed by logged step; the running
/// averages are accumulated at every integration step, not just logged ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub dual_path: Vec<Dual>,
    pub primal_path: Vec<Primal>,
    pub etas: Vec<f64>,
    pub f_values: Vec<f64>,
    /// `X̃(t) = t⁻¹∫₀ᵗ X ds` (trapezoidal).
    pub running_avg_primal: Vec<Primal>,
    /// `f̄(t) = t⁻¹∫₀ᵗ f(X) ds` (trapezoidal).
    pub f_avg: Vec<f64>,
    /// Running minimum of the logged `f` values.
    pub f_best: Vec<f64>,
    /// `(time, point, value)` of the first logged minimum of `f`.
    pub best_so_far: (f64, Primal, f64),
    /// `η⁻¹F(x*, ηY)` for the configured target.
    pub fenchel_to_target: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_primal(&self) -> &Primal {
        self.primal_path.last().expect("nonempty trajectory")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("nonempty trajectory")
    }

    /// Builds a trajectory from synthetic primal samples; averages are
    /// trapezoidal over the given grid and the dual path is left empty.
    pub fn from_samples(times: Vec<f64>, primal: Vec<Vec<f64>>, f_values: Vec<f64>) -> Self {
        assert!(!times.is_empty() && times.len() == primal.len() && times.len() == f_values.len());
        let n = primal[0].len();
        let mut sum_x = vec![0.0; n];
        let mut sum_f = 0.0;
        let mut avg = Vec::with_capacity(times.len());
        let mut f_avg = Vec::with_capacity(times.len());
        for k in 0..times.len() {
            if k > 0 {
                let h = times[k] - times[k - 1];
                for (s, (a, b)) in sum_x.iter_mut().zip(primal[k - 1].iter().zip(&primal[k])) {
                    *s += 0.5 * h * (a + b);
                }
                sum_f += 0.5 * h * (f_values[k - 1] + f_values[k]);
            }
            let span = times[k] - times[0];
            if span > 0.0 {
                avg.push(Primal(sum_x.iter().map(|s| s / span).collect()));
                f_avg.push(sum_f / span);
            } else {
                avg.push(Primal(primal[k].clone()));
                f_avg.push(f_values[k]);
            }
        }
        let (f_best, best_so_far) = running_best(&times, &primal, &f_values);
        let dt = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
        Trajectory {
            dt,
            etas: vec![1.0; times.len()],
            dual_path: Vec::new(),
            primal_path: primal.into_iter().map(Primal).collect(),
            running_avg_primal: avg,
            f_avg,
            f_best,
            best_so_far,
            fenchel_to_target: None,
            f_values,
            times,
        }
    }
}

fn running_best(times: &[f64], primal: &[Vec<f64>], f: &[f64]) -> (Vec<f64>, (f64, Primal, f64)) {
    let mut best_idx = 0;
    let mut series = Vec::with_capacity(f.len());
    for (k, &v) in f.iter().enumerate() {
        // strict comparison keeps the earliest minimizer
        if v < f[best_idx] {
            best_idx = k;
        }
        series.push(f[best_idx]);
    }
    (series, (times[best_idx], Primal(primal[best_idx].clone()), f[best_idx]))
}

/// Everything a single integration needs besides the configuration.
#[derive(Clone, Copy)]
pub struct Dynamics<'a> {
    pub obj: &'a Objective,
    pub reg: Regularizer,
    pub region: &'a Region,
    pub noise: Option<&'a NoiseModel>,
    pub sched: SensitivitySchedule,
}

impl Dynamics<'_> {
    fn check(&self, cfg: &IntegratorConfig) -> Result<usize, DynamicsError> {
        cfg.validate()?;
        self.sched.validate()?;
        self.reg.check_pairing(self.region)?;
        let n = self.region.dim();
        if let Some(d) = self.obj.dim() {
            if d != n {
                return Err(config_err(
                    "problem",
                    format!("dimension {d} does not match region dimension {n}"),
                ));
            }
        }
        if cfg.y0.len() != n {
            return Err(config_err("y0", format!("expected {n} entries, got {}", cfg.y0.len())));
        }
        if let Some(noise) = self.noise {
            if noise.state_dim() != n {
                return Err(config_err(
                    "noise",
                    format!("volatility has {} rows, state dimension is {n}", noise.state_dim()),
                ));
            }
        }
        if let Some(t) = &cfg.target {
            if t.len() != n || !self.region.contains(t, 1e-9)? {
                return Err(config_err("target", "must be a feasible point of the region"));
            }
        }
        Ok(n)
    }

    /// Integrates the flow described by `self` under `cfg`.
    pub fn integrate(&self, cfg: &IntegratorConfig) -> Result<Trajectory, DynamicsError> {
        let n = self.check(cfg)?;
        let steps = cfg.steps();
        let dt = cfg.dt;
        let sqrt_dt = dt.sqrt();
        let noise = self.noise.filter(|m| !m.is_zero());
        let mut stream = noise.map(|m| GaussianStream::new(cfg.seed, cfg.path, m.wiener_dim()));
        let mut xi = vec![0.0; noise.map_or(0, |m| m.wiener_dim())];
        let mut dz = vec![0.0; n];

        let mut y = cfg.y0.0.clone();
        let mut scaled = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut x_next = vec![0.0; n];
        let mut grad = vec![0.0; n];

        let mut eta = self.sched.eta(0.0);
        self.map(eta, &y, &mut scaled, &mut x)?;
        let mut f = self.obj.value_grad_into(&x, &mut grad);

        let capacity = steps / cfg.log_stride + 2;
        let mut tr = Trajectory {
            dt,
            times: Vec::with_capacity(capacity),
            dual_path: Vec::with_capacity(capacity),
            primal_path: Vec::with_capacity(capacity),
            etas: Vec::with_capacity(capacity),
            f_values: Vec::with_capacity(capacity),
            running_avg_primal: Vec::with_capacity(capacity),
            f_avg: Vec::with_capacity(capacity),
            f_best: Vec::with_capacity(capacity),
            best_so_far: (0.0, Primal(x.clone()), f),
            fenchel_to_target: cfg.target.as_ref().map(|_| Vec::with_capacity(capacity)),
        };
        let mut sum_x = vec![0.0; n];
        let mut sum_f = 0.0;

        for k in 0..=steps {
            let t = k as f64 * dt;
            if k % cfg.log_stride == 0 || k == steps {
                self.log(&mut tr, cfg, t, eta, &y, &x, f, &sum_x, sum_f)?;
            }
            if k == steps {
                break;
            }
            for (yi, g) in y.iter_mut().zip(&grad) {
                *yi -= dt * g;
            }
            if let (Some(model), Some(s)) = (noise, stream.as_mut()) {
                s.fill_step(k as u64, &mut xi);
                model.apply_into(&x, t, &xi, &mut dz);
                for (yi, d) in y.iter_mut().zip(&dz) {
                    *yi += sqrt_dt * d;
                }
            }
            if !y.iter().all(|v| v.is_finite()) {
                return Err(DynamicsError::NonFinite { step: k + 1 });
            }
            eta = self.sched.eta(t + dt);
            self.map(eta, &y, &mut scaled, &mut x_next)?;
            let f_next = self.obj.value_grad_into(&x_next, &mut grad);
            if !f_next.is_finite() {
                return Err(DynamicsError::NonFinite { step: k + 1 });
            }
            for (s, (a, b)) in sum_x.iter_mut().zip(x.iter().zip(&x_next)) {
                *s += 0.5 * dt * (a + b);
            }
            sum_f += 0.5 * dt * (f + f_next);
            std::mem::swap(&mut x, &mut x_next);
            f = f_next;
        }
        Ok(tr)
    }

    fn map(&self, eta: f64, y: &[f64], scaled: &mut [f64], out: &mut [f64]) -> Result<(), DynamicsError> {
        for (s, v) in scaled.iter_mut().zip(y) {
            *s = eta * v;
        }
        self.reg.mirror_into(self.region, scaled, out)?;
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn log(
        &self,
        tr: &mut Trajectory,
        cfg: &IntegratorConfig,
        t: f64,
        eta: f64,
        y: &[f64],
        x: &[f64],
        f: f64,
        sum_x: &[f64],
        sum_f: f64,
    ) -> Result<(), DynamicsError> {
        tr.times.push(t);
        tr.dual_path.push(Dual(y.to_vec()));
        tr.primal_path.push(Primal(x.to_vec()));
        tr.etas.push(eta);
        tr.f_values.push(f);
        if t > 0.0 {
            tr.running_avg_primal
                .push(Primal(sum_x.iter().map(|s| s / t).collect()));
            tr.f_avg.push(sum_f / t);
        } else {
            tr.running_avg_primal.push(Primal(x.to_vec()));
            tr.f_avg.push(f);
        }
        if f < tr.best_so_far.2 {
            tr.best_so_far = (t, Primal(x.to_vec()), f);
        }
        tr.f_best.push(tr.best_so_far.2);
        if let (Some(target), Some(series)) = (&cfg.target, tr.fenchel_to_target.as_mut()) {
            series.push(self.reg.deflated_coupling(self.region, target, y, eta)?);
        }
        Ok(())
    }
}

/// Deterministic mirror descent with constant sensitivity `eta0`.
pub fn integrate_md(
    obj: &Objective,
    reg: Regularizer,
    region: &Region,
    eta0: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    Dynamics {
        obj,
        reg,
        region,
        noise: None,
        sched: SensitivitySchedule::Constant { eta0 },
    }
    .integrate(cfg)
}

/// Stochastic mirror descent by Euler–Maruyama. Bit-deterministic in
/// `(cfg.seed, cfg.path)`.
pub fn integrate_smd(
    obj: &Objective,
    reg: Regularizer,
    region: &Region,
    noise: &NoiseModel,
    sched: SensitivitySchedule,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    Dynamics {
        obj,
        reg,
        region,
        noise: Some(noise),
        sched,
    }
    .integrate(cfg)
}

/// Runs `paths` independent integrations; path `i` uses noise stream `i`.
/// Results are ordered by path index regardless of scheduling.
pub fn run_ensemble(
    dynamics: &Dynamics<'_>,
    cfg: &IntegratorConfig,
    paths: usize,
) -> Result<Vec<Trajectory>, DynamicsError> {
    (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut c = cfg.clone();
            c.path = i as u64;
            dynamics.integrate(&c)
        })
        .collect()
}

/// Boundary guard for the one-dimensional pair.
pub const HR_CLAMP: f64 = 1e-12;

/// Terminal states of the one-dimensional comparison pair driven by the
/// Brownian increments `dw` (each of variance `dt`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HrEndpoints {
    pub smd: f64,
    pub shd: f64,
    pub smd_dual: f64,
    /// Sup distance between the primal and dual discretizations of the SMD path.
    pub dual_gap: f64,
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(HR_CLAMP, 1.0 - HR_CLAMP)
}

fn logistic(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

/// One Euler–Maruyama step of each member of the pair for `f(x) = x` on [0,1].
#[inline]
fn hr_step(smd: f64, shd: f64, y: f64, sigma: f64, dt: f64, dw: f64) -> (f64, f64, f64) {
    let g = smd * (1.0 - smd);
    let smd = clamp_unit(smd - g * (dt - sigma * dw) + 0.5 * g * (1.0 - 2.0 * smd) * sigma * sigma * dt);
    let shd = clamp_unit(shd - shd * (1.0 - shd) * (dt - sigma * dw));
    (smd, shd, y - dt + sigma * dw)
}

/// Integrates the pair from explicit increments.
pub fn hr1d_from_increments(sigma: f64, x0: f64, dt: f64, dw: &[f64]) -> HrEndpoints {
    let (mut smd, mut shd) = (x0, x0);
    let mut y = (x0 / (1.0 - x0)).ln();
    let mut gap: f64 = 0.0;
    for &w in dw {
        (smd, shd, y) = hr_step(smd, shd, y, sigma, dt, w);
        gap = gap.max((smd - logistic(y)).abs());
    }
    HrEndpoints {
        smd,
        shd,
        smd_dual: logistic(y),
        dual_gap: gap,
    }
}

/// The one-dimensional stochastic pair on [0,1] with `f(x) = x`.
#[derive(Clone, Debug)]
pub struct HrPair {
    /// Primal form of the stochastic mirror path (includes the Itô correction).
    pub smd: Trajectory,
    /// Stochastic replicator path without the correction.
    pub shd: Trajectory,
    /// `eʸ/(1+eʸ)` from the dual form, logged on the same grid.
    pub smd_dual: Vec<f64>,
    /// Sup over all steps of `|X_smd − eʸ/(1+eʸ)|`.
    pub dual_gap: f64,
}

/// Simulates both members of the pair with the same Wiener increments.
pub fn integrate_hr1d(sigma: f64, x0: f64, cfg: &IntegratorConfig) -> Result<HrPair, DynamicsError> {
    cfg.validate()?;
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(config_err("x0", "must lie in (0,1)"));
    }
    if !sigma.is_finite() {
        return Err(config_err("sigma", "must be finite"));
    }
    let steps = cfg.steps();
    let dt = cfg.dt;
    let sqrt_dt = dt.sqrt();
    let mut stream = GaussianStream::new(cfg.seed, cfg.path, 1);
    let mut xi = [0.0];
    let (mut smd, mut shd) = (x0, x0);
    let mut y = (x0 / (1.0 - x0)).ln();
    let mut gap: f64 = 0.0;
    let mut ts = Vec::new();
    let (mut a, mut b, mut d) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..=steps {
        if k % cfg.log_stride == 0 || k == steps {
            ts.push(k as f64 * dt);
            a.push(vec![smd]);
            b.push(vec![shd]);
            d.push(logistic(y));
        }
        if k == steps {
            break;
        }
        stream.fill_step(k as u64, &mut xi);
        (smd, shd, y) = hr_step(smd, shd, y, sigma, dt, sqrt_dt * xi[0]);
        if !(smd.is_finite() && shd.is_finite() && y.is_finite()) {
            return Err(DynamicsError::NonFinite { step: k + 1 });
        }
        gap = gap.max((smd - logistic(y)).abs());
    }
    let fa: Vec<f64> = a.iter().map(|v| v[0]).collect();
    let fb: Vec<f64> = b.iter().map(|v| v[0]).collect();
    Ok(HrPair {
        smd: Trajectory::from_samples(ts.clone(), a, fa),
        shd: Trajectory::from_samples(ts, b, fb),
        smd_dual: d,
        dual_gap: gap,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RectifyMode {
    Average,
    Best,
}

/// Replaces the primal path by its ergodic average or its running best point.
///
/// In average mode `f` is re-evaluated at the averaged points. Best mode is
/// restricted to logged points, with ties going to the earliest time.
pub fn rectify(traj: &Trajectory, obj: &Objective, mode: RectifyMode) -> Trajectory {
    let mut out = traj.clone();
    match mode {
        RectifyMode::Average => {
            out.primal_path = traj.running_avg_primal.clone();
            out.f_values = out.primal_path.iter().map(|x| obj.value(x)).collect();
        }
        RectifyMode::Best => {
            let mut best = 0;
            for k in 0..traj.len() {
                if traj.f_values[k] < traj.f_values[best] {
                    best = k;
                }
                out.primal_path[k] = traj.primal_path[best].clone();
                out.f_values[k] = traj.f_values[best];
            }
        }
    }
    out
}

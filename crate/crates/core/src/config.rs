//! Experiment definitions in a flat `section.key = value` text format.
//!
//! Lists are comma separated, matrix rows are separated by `;`, `#` starts a
//! comment. Keys under `derived.` are written by the runner for reference
//! and ignored when read back.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::acceptance::DEFAULT_SEED;
use crate::dynamics::RectifyMode;
use crate::linalg::Matrix;
use crate::mirror::Regularizer;
use crate::noise::DecaySchedule;
use crate::traffic::DEFAULT_PATH_CAP;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("cannot read `{path}`: {msg}")]
    Io { path: String, msg: String },
}

fn field_err(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        msg: msg.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NetworkSource {
    File(PathBuf),
    Random {
        nodes: usize,
        extra_edges: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    Quadratic { center: Vec<f64>, curvature: Matrix },
    Linear { cost: Vec<f64>, offset: f64 },
    Scalar1D,
    Traffic { network: NetworkSource, path_cap: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum RegionSpec {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Cube { dim: usize, lower: f64, upper: f64 },
    Simplex { dim: usize, mass: f64 },
    Spectrahedron { order: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseSpec {
    Zero,
    Isotropic {
        sigma: f64,
    },
    Constant(Matrix),
    Decaying {
        sigma: f64,
        decay: DecaySchedule,
    },
    /// Edge noise pushed onto paths; `None` keeps the per-edge values of the network.
    Path {
        edge_sigma: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScheduleSpec {
    Constant {
        eta0: f64,
    },
    PowerLaw {
        eta0: f64,
        beta: f64,
    },
    /// `√(ΩK/σ*²)·min(1, 1/√t)` with constants taken from the resolved setup.
    Optimized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsSpec {
    pub audit: bool,
    pub occupation_deltas: Vec<f64>,
    pub hitting_delta: f64,
    pub burn_in: f64,
    pub rate_window: Option<(f64, f64)>,
    pub rectify: Option<RectifyMode>,
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        DiagnosticsSpec {
            audit: false,
            occupation_deltas: vec![0.1],
            hitting_delta: 0.1,
            burn_in: 0.2,
            rate_window: None,
            rectify: Some(RectifyMode::Average),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    /// Absent for traffic problems, whose region is the demand simplex over paths.
    pub region: Option<RegionSpec>,
    pub mirror: Regularizer,
    pub noise: NoiseSpec,
    pub schedule: ScheduleSpec,
    pub dt: f64,
    pub horizon: f64,
    pub log_stride: usize,
    /// Defaults to the zero vector.
    pub y0: Option<Vec<f64>>,
    pub paths: usize,
    pub seed: u64,
    /// Number of paths written as `trajectory_<i>.csv`.
    pub trajectories: usize,
    pub out_dir: PathBuf,
    pub diagnostics: DiagnosticsSpec,
}

struct Entries {
    map: BTreeMap<String, String>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn req(&mut self, key: &str) -> Result<String, ConfigError> {
        self.take(key).ok_or_else(|| field_err(key, "missing"))
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        self.take(key).map_or(Ok(default), |v| parse_f64(key, &v))
    }

    fn req_f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        parse_f64(key, &self.req(key)?)
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        self.take(key).map_or(Ok(default), |v| parse_int(key, &v))
    }

    fn req_usize(&mut self, key: &str) -> Result<usize, ConfigError> {
        parse_int(key, &self.req(key)?)
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.take(key).map(|v| parse_list(key, &v)).transpose()
    }

    fn req_list(&mut self, key: &str) -> Result<Vec<f64>, ConfigError> {
        parse_list(key, &self.req(key)?)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v
        .parse()
        .map_err(|_| field_err(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(field_err(key, "must be finite"));
    }
    Ok(x)
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| field_err(key, format!("`{v}` is not a nonnegative integer")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|s| parse_f64(key, s.trim())).collect()
}

fn parse_matrix(key: &str, v: &str) -> Result<Matrix, ConfigError> {
    let rows = v
        .split(';')
        .map(|r| parse_list(key, r))
        .collect::<Result<Vec<_>, _>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(field_err(key, "rows must be nonempty and of equal length"));
    }
    Ok(Matrix::from_rows(&rows))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(field_err(key, format!("`{v}` is not a boolean"))),
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn fmt_matrix(m: &Matrix) -> String {
    (0..m.rows()).map(|i| fmt_list(m.row(i))).collect::<Vec<_>>().join("; ")
}

impl ExperimentConfig {
    /// Reads a config file; relative network paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: "expected `section.key = value`".into(),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if !k.contains('.') {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    msg: format!("key `{k}` has no section"),
                });
            }
            if k.starts_with("derived.") {
                continue;
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    msg: format!("duplicate key `{k}`"),
                });
            }
        }
        let mut e = Entries { map };
        let cfg = Self::from_entries(&mut e, base_dir)?;
        if let Some(k) = e.map.keys().next() {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_entries(e: &mut Entries, base_dir: &Path) -> Result<Self, ConfigError> {
        let problem = match e.req("problem.kind")?.as_str() {
            "quadratic" => {
                let center = e.req_list("problem.center")?;
                let curvature = match (e.take("problem.curvature"), e.take("problem.theta")) {
                    (Some(_), Some(_)) => {
                        return Err(field_err("problem.theta", "give either a curvature matrix or theta"))
                    }
                    (Some(m), None) => parse_matrix("problem.curvature", &m)?,
                    (None, theta) => {
                        let theta = theta.map_or(Ok(1.0), |v| parse_f64("problem.theta", &v))?;
                        Matrix::scaled_identity(center.len(), theta)
                    }
                };
                ProblemSpec::Quadratic { center, curvature }
            }
            "linear" => ProblemSpec::Linear {
                cost: e.req_list("problem.cost")?,
                offset: e.f64_or("problem.offset", 0.0)?,
            },
            "scalar1d" => ProblemSpec::Scalar1D,
            "traffic" => {
                let network = match e.take("problem.network") {
                    Some(p) => NetworkSource::File(base_dir.join(p)),
                    None => NetworkSource::Random {
                        nodes: e.req_usize("problem.nodes")?,
                        extra_edges: e.usize_or("problem.extra_edges", 0)?,
                        seed: parse_int("problem.network_seed", &e.req("problem.network_seed")?)?,
                    },
                };
                ProblemSpec::Traffic {
                    network,
                    path_cap: e.usize_or("problem.path_cap", DEFAULT_PATH_CAP)?,
                }
            }
            other => return Err(field_err("problem.kind", format!("unknown problem `{other}`"))),
        };

        let region = match e.take("region.kind").as_deref() {
            None if matches!(problem, ProblemSpec::Traffic { .. }) => None,
            None if problem == ProblemSpec::Scalar1D => Some(RegionSpec::Cube {
                dim: 1,
                lower: 0.0,
                upper: 1.0,
            }),
            None => return Err(field_err("region.kind", "missing")),
            Some(_) if matches!(problem, ProblemSpec::Traffic { .. }) => {
                return Err(field_err(
                    "region.kind",
                    "traffic problems use the demand simplex over paths",
                ))
            }
            Some("box") => Some(RegionSpec::Box {
                lower: e.req_list("region.lower")?,
                upper: e.req_list("region.upper")?,
            }),
            Some("cube") => Some(RegionSpec::Cube {
                dim: e.req_usize("region.dim")?,
                lower: e.req_f64("region.lower")?,
                upper: e.req_f64("region.upper")?,
            }),
            Some("simplex") => Some(RegionSpec::Simplex {
                dim: e.req_usize("region.dim")?,
                mass: e.f64_or("region.mass", 1.0)?,
            }),
            Some("spectrahedron") => Some(RegionSpec::Spectrahedron {
                order: e.req_usize("region.order")?,
            }),
            Some(other) => return Err(field_err("region.kind", format!("unknown region `{other}`"))),
        };

        let mirror = match e.req("mirror.kind")?.as_str() {
            "euclidean" => Regularizer::Euclidean,
            "entropic" => Regularizer::Entropic,
            "von_neumann" => Regularizer::VonNeumann,
            other => return Err(field_err("mirror.kind", format!("unknown mirror map `{other}`"))),
        };

        let noise = match e.take("noise.kind").as_deref().unwrap_or("zero") {
            "zero" => NoiseSpec::Zero,
            "isotropic" => NoiseSpec::Isotropic {
                sigma: e.req_f64("noise.sigma")?,
            },
            "constant" => NoiseSpec::Constant(parse_matrix("noise.matrix", &e.req("noise.matrix")?)?),
            "decaying" => {
                let sigma = e.req_f64("noise.sigma")?;
                let decay = match e.req("noise.decay")?.as_str() {
                    "inv_log" => DecaySchedule::InvLog,
                    "inv_sqrt_t" => DecaySchedule::InvSqrtT,
                    "log_power" => DecaySchedule::LogPower(e.req_f64("noise.power")?),
                    other => return Err(field_err("noise.decay", format!("unknown decay `{other}`"))),
                };
                NoiseSpec::Decaying { sigma, decay }
            }
            "path" => NoiseSpec::Path {
                edge_sigma: e
                    .take("noise.edge_sigma")
                    .map(|v| parse_f64("noise.edge_sigma", &v))
                    .transpose()?,
            },
            other => return Err(field_err("noise.kind", format!("unknown noise `{other}`"))),
        };

        let schedule = match e.take("schedule.kind").as_deref().unwrap_or("constant") {
            "constant" => ScheduleSpec::Constant {
                eta0: e.f64_or("schedule.eta0", 1.0)?,
            },
            "power_law" => ScheduleSpec::PowerLaw {
                eta0: e.f64_or("schedule.eta0", 1.0)?,
                beta: e.req_f64("schedule.beta")?,
            },
            "optimized" => ScheduleSpec::Optimized,
            other => return Err(field_err("schedule.kind", format!("unknown schedule `{other}`"))),
        };

        let dt = e.req_f64("integrator.dt")?;
        let horizon = e.req_f64("integrator.horizon")?;
        let log_stride = e.usize_or("integrator.log_stride", 1)?;
        let y0 = e.list("integrator.y0")?;

        let paths = e.usize_or("ensemble.paths", 1)?;
        let seed = e
            .take("ensemble.seed")
            .map_or(Ok(DEFAULT_SEED), |v| parse_int("ensemble.seed", &v))?;
        let trajectories = e.usize_or("ensemble.trajectories", paths)?;
        let out_dir = PathBuf::from(e.take("output.dir").unwrap_or_else(|| "out".into()));

        let mut diagnostics = DiagnosticsSpec::default();
        if let Some(v) = e.take("diagnostics.audit") {
            diagnostics.audit = parse_bool("diagnostics.audit", &v)?;
        }
        if let Some(v) = e.list("diagnostics.occupation_delta")? {
            diagnostics.occupation_deltas = v;
        }
        diagnostics.hitting_delta = e.f64_or("diagnostics.hitting_delta", diagnostics.hitting_delta)?;
        diagnostics.burn_in = e.f64_or("diagnostics.burn_in", diagnostics.burn_in)?;
        if let Some(w) = e.list("diagnostics.rate_window")? {
            match w[..] {
                [a, b] => diagnostics.rate_window = Some((a, b)),
                _ => return Err(field_err("diagnostics.rate_window", "expected two times `t0, t1`")),
            }
        }
        if let Some(v) = e.take("diagnostics.rectify") {
            diagnostics.rectify = match v.as_str() {
                "average" => Some(RectifyMode::Average),
                "best" => Some(RectifyMode::Best),
                "none" => None,
                other => return Err(field_err("diagnostics.rectify", format!("unknown mode `{other}`"))),
            };
        }

        Ok(ExperimentConfig {
            problem,
            region,
            mirror,
            noise,
            schedule,
            dt,
            horizon,
            log_stride,
            y0,
            paths,
            seed,
            trajectories,
            out_dir,
            diagnostics,
        })
    }

    /// Checks that do not need the constructed components.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dt > 0.0) {
            return Err(field_err("integrator.dt", "must be positive"));
        }
        if !(self.horizon > 0.0) {
            return Err(field_err("integrator.horizon", "must be positive"));
        }
        if self.dt > self.horizon {
            return Err(field_err(
                "integrator.dt",
                format!("step {} exceeds the horizon {}", self.dt, self.horizon),
            ));
        }
        if self.log_stride == 0 {
            return Err(field_err("integrator.log_stride", "must be at least 1"));
        }
        if self.paths == 0 {
            return Err(field_err("ensemble.paths", "must be at least 1"));
        }
        if self.trajectories > self.paths {
            return Err(field_err("ensemble.trajectories", "cannot exceed ensemble.paths"));
        }
        let d = &self.diagnostics;
        if d.occupation_deltas.is_empty() || d.occupation_deltas.iter().any(|v| !(*v > 0.0)) {
            return Err(field_err("diagnostics.occupation_delta", "radii must be positive"));
        }
        if !(d.hitting_delta > 0.0) {
            return Err(field_err("diagnostics.hitting_delta", "must be positive"));
        }
        if !(0.0..1.0).contains(&d.burn_in) {
            return Err(field_err("diagnostics.burn_in", "must lie in [0, 1)"));
        }
        if let Some((a, b)) = d.rate_window {
            if !(a > 0.0 && b > a) {
                return Err(field_err("diagnostics.rate_window", "needs 0 < t0 < t1"));
            }
        }
        if let ScheduleSpec::Constant { eta0 } | ScheduleSpec::PowerLaw { eta0, .. } = self.schedule {
            if !(eta0 > 0.0) {
                return Err(field_err("schedule.eta0", "must be positive"));
            }
        }
        Ok(())
    }

    /// Serializes the config in the same format; `derived` lines are appended verbatim.
    pub fn to_text(&self, derived: &[(&str, f64)]) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match &self.problem {
            ProblemSpec::Quadratic { center, curvature } => {
                kv("problem.kind", "quadratic".into());
                kv("problem.center", fmt_list(center));
                kv("problem.curvature", fmt_matrix(curvature));
            }
            ProblemSpec::Linear { cost, offset } => {
                kv("problem.kind", "linear".into());
                kv("problem.cost", fmt_list(cost));
                kv("problem.offset", offset.to_string());
            }
            ProblemSpec::Scalar1D => kv("problem.kind", "scalar1d".into()),
            ProblemSpec::Traffic { network, path_cap } => {
                kv("problem.kind", "traffic".into());
                match network {
                    NetworkSource::File(p) => kv("problem.network", p.display().to_string()),
                    NetworkSource::Random {
                        nodes,
                        extra_edges,
                        seed,
                    } => {
                        kv("problem.nodes", nodes.to_string());
                        kv("problem.extra_edges", extra_edges.to_string());
                        kv("problem.network_seed", seed.to_string());
                    }
                }
                kv("problem.path_cap", path_cap.to_string());
            }
        }
        match &self.region {
            None => {}
            Some(RegionSpec::Box { lower, upper }) => {
                kv("region.kind", "box".into());
                kv("region.lower", fmt_list(lower));
                kv("region.upper", fmt_list(upper));
            }
            Some(RegionSpec::Cube { dim, lower, upper }) => {
                kv("region.kind", "cube".into());
                kv("region.dim", dim.to_string());
                kv("region.lower", lower.to_string());
                kv("region.upper", upper.to_string());
            }
            Some(RegionSpec::Simplex { dim, mass }) => {
                kv("region.kind", "simplex".into());
                kv("region.dim", dim.to_string());
                kv("region.mass", mass.to_string());
            }
            Some(RegionSpec::Spectrahedron { order }) => {
                kv("region.kind", "spectrahedron".into());
                kv("region.order", order.to_string());
            }
        }
        let mirror = match self.mirror {
            Regularizer::Euclidean => "euclidean",
            Regularizer::Entropic => "entropic",
            Regularizer::VonNeumann => "von_neumann",
        };
        kv("mirror.kind", mirror.into());
        match &self.noise {
            NoiseSpec::Zero => kv("noise.kind", "zero".into()),
            NoiseSpec::Isotropic { sigma } => {
                kv("noise.kind", "isotropic".into());
                kv("noise.sigma", sigma.to_string());
            }
            NoiseSpec::Constant(m) => {
                kv("noise.kind", "constant".into());
                kv("noise.matrix", fmt_matrix(m));
            }
            NoiseSpec::Decaying { sigma, decay } => {
                kv("noise.kind", "decaying".into());
                kv("noise.sigma", sigma.to_string());
                match decay {
                    DecaySchedule::InvLog => kv("noise.decay", "inv_log".into()),
                    DecaySchedule::InvSqrtT => kv("noise.decay", "inv_sqrt_t".into()),
                    DecaySchedule::LogPower(q) => {
                        kv("noise.decay", "log_power".into());
                        kv("noise.power", q.to_string());
                    }
                }
            }
            NoiseSpec::Path { edge_sigma } => {
                kv("noise.kind", "path".into());
                if let Some(s) = edge_sigma {
                    kv("noise.edge_sigma", s.to_string());
                }
            }
        }
        match self.schedule {
            ScheduleSpec::Constant { eta0 } => {
                kv("schedule.kind", "constant".into());
                kv("schedule.eta0", eta0.to_string());
            }
            ScheduleSpec::PowerLaw { eta0, beta } => {
                kv("schedule.kind", "power_law".into());
                kv("schedule.eta0", eta0.to_string());
                kv("schedule.beta", beta.to_string());
            }
            ScheduleSpec::Optimized => kv("schedule.kind", "optimized".into()),
        }
        kv("integrator.dt", self.dt.to_string());
        kv("integrator.horizon", self.horizon.to_string());
        kv("integrator.log_stride", self.log_stride.to_string());
        if let Some(y0) = &self.y0 {
            kv("integrator.y0", fmt_list(y0));
        }
        kv("ensemble.paths", self.paths.to_string());
        kv("ensemble.seed", self.seed.to_string());
        kv("ensemble.trajectories", self.trajectories.to_string());
        kv("output.dir", self.out_dir.display().to_string());
        let d = &self.diagnostics;
        kv("diagnostics.audit", d.audit.to_string());
        kv("diagnostics.occupation_delta", fmt_list(&d.occupation_deltas));
        kv("diagnostics.hitting_delta", d.hitting_delta.to_string());
        kv("diagnostics.burn_in", d.burn_in.to_string());
        if let Some((a, b)) = d.rate_window {
            kv("diagnostics.rate_window", fmt_list(&[a, b]));
        }
        let rectify = match d.rectify {
            Some(RectifyMode::Average) => "average",
            Some(RectifyMode::Best) => "best",
            None => "none",
        };
        kv("diagnostics.rectify", rectify.into());
        for (k, v) in derived {
            kv(&format!("derived.{k}"), v.to_string());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "\
problem.kind = quadratic
problem.center = 0.5, 0.5   # interior
region.kind = box
region.lower = 0, 0
region.upper = 1, 1
mirror.kind = euclidean
integrator.dt = 1e-3
integrator.horizon = 10
";

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::parse(BASIC, Path::new(".")).unwrap();
        assert_eq!(c.noise, NoiseSpec::Zero);
        assert_eq!(c.schedule, ScheduleSpec::Constant { eta0: 1.0 });
        assert_eq!((c.paths, c.trajectories, c.seed), (1, 1, DEFAULT_SEED));
        assert_eq!(
            c.problem,
            ProblemSpec::Quadratic {
                center: vec![0.5, 0.5],
                curvature: Matrix::identity(2)
            }
        );
    }

    #[test]
    fn dt_beyond_horizon_names_dt() {
        let text = BASIC.replace("integrator.dt = 1e-3", "integrator.dt = 20");
        let err = ExperimentConfig::parse(&text, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("dt"), "{err}");
    }

    #[test]
    fn unknown_and_duplicate_keys_rejected() {
        let err = ExperimentConfig::parse(&format!("{BASIC}noise.colour = pink\n"), Path::new(".")).unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey("noise.colour".into()));
        let err = ExperimentConfig::parse(&format!("{BASIC}integrator.dt = 1\n"), Path::new(".")).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { .. }));
    }

    #[test]
    fn echo_round_trips() {
        let text = format!(
            "{BASIC}noise.kind = decaying\nnoise.sigma = 0.3\nnoise.decay = log_power\nnoise.power = 0.75\n\
             schedule.kind = power_law\nschedule.beta = 0.5\ndiagnostics.rate_window = 10, 100\n\
             diagnostics.occupation_delta = 0.1, 0.2\n"
        );
        let c = ExperimentConfig::parse(&text, Path::new(".")).unwrap();
        let echo = c.to_text(&[("K", 1.0), ("Omega", 0.5)]);
        let back = ExperimentConfig::parse(&echo, Path::new(".")).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(&[("K", 1.0), ("Omega", 0.5)]), echo);
    }

    #[test]
    fn bad_number_names_field() {
        let text = BASIC.replace("integrator.horizon = 10", "integrator.horizon = ten");
        let err = ExperimentConfig::parse(&text, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("integrator.horizon"), "{err}");
    }
}

//! Convex objectives with gradients and structural metadata.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{Dual, GeometryError, Primal, Region};
use crate::linalg::{jacobi_eigen, Matrix};
use crate::mirror::FEAS_TOL;
use crate::traffic::TrafficModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("point is not feasible")]
    Infeasible,
    #[error("curvature matrix must be square, symmetric and finite")]
    NotSymmetric,
    #[error("curvature matrix has a negative eigenvalue {0}")]
    NotPsd(f64),
    #[error("objective has no known minimizer")]
    MissingKnownMin,
    #[error("invalid objective: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug)]
pub enum ObjectiveKind {
    /// `½ (x−μ)ᵀ A (x−μ)`.
    Quadratic { center: Primal, curvature: Matrix },
    /// `⟨c, x⟩ + offset`.
    Linear { cost: Dual, offset: f64 },
    /// Total network cost over path flows.
    Traffic(Arc<TrafficModel>),
    /// `f(x) = x₀`.
    Scalar1D,
}

#[derive(Clone, Debug)]
pub struct Objective {
    kind: ObjectiveKind,
    /// Strong-convexity modulus (Euclidean norm); 0 when not strongly convex.
    pub alpha: f64,
    /// Sharpness modulus, 0 when unknown or absent.
    pub gamma: f64,
    /// Lipschitz modulus of the gradient, when known. Stored, never enforced.
    pub lipschitz: Option<f64>,
    /// Minimizer and minimum value over the feasible region, when known.
    pub known_min: Option<(Primal, f64)>,
}

impl Objective {
    pub fn quadratic(center: Vec<f64>, curvature: Matrix) -> Result<Self, ProblemError> {
        if !curvature.is_square()
            || curvature.rows() != center.len()
            || !curvature.is_finite()
            || !curvature.is_symmetric(0.0)
        {
            return Err(ProblemError::NotSymmetric);
        }
        if center.iter().any(|v| !v.is_finite()) {
            return Err(ProblemError::Invalid("non-finite quadratic center".into()));
        }
        let eig = jacobi_eigen(&curvature);
        let lo = eig.values.first().copied().unwrap_or(0.0);
        let hi = eig.values.last().copied().unwrap_or(0.0);
        if lo < -1e-12 {
            return Err(ProblemError::NotPsd(lo));
        }
        Ok(Objective {
            kind: ObjectiveKind::Quadratic {
                center: Primal(center),
                curvature,
            },
            alpha: lo.max(0.0),
            gamma: 0.0,
            lipschitz: Some(hi),
            known_min: None,
        })
    }

    /// `½θ‖x−μ‖²`.
    pub fn isotropic(center: Vec<f64>, theta: f64) -> Result<Self, ProblemError> {
        let n = center.len();
        Self::quadratic(center, Matrix::scaled_identity(n, theta))
    }

    pub fn linear(cost: Vec<f64>, offset: f64) -> Result<Self, ProblemError> {
        if cost.iter().any(|v| !v.is_finite()) || !offset.is_finite() {
            return Err(ProblemError::Invalid("non-finite linear cost".into()));
        }
        Ok(Objective {
            kind: ObjectiveKind::Linear {
                cost: Dual(cost),
                offset,
            },
            alpha: 0.0,
            gamma: 0.0,
            lipschitz: Some(0.0),
            known_min: None,
        })
    }

    pub fn scalar_1d() -> Self {
        Objective {
            kind: ObjectiveKind::Scalar1D,
            alpha: 0.0,
            gamma: 1.0,
            lipschitz: Some(0.0),
            known_min: None,
        }
    }

    pub fn traffic(model: Arc<TrafficModel>) -> Self {
        Objective {
            kind: ObjectiveKind::Traffic(model),
            alpha: 0.0,
            gamma: 0.0,
            lipschitz: None,
            known_min: None,
        }
    }

    pub fn with_known_min(mut self, x: Vec<f64>, value: f64) -> Self {
        self.known_min = Some((Primal(x), value));
        self
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    /// Input dimension, when fixed by the objective itself.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            ObjectiveKind::Quadratic { center, .. } => Some(center.len()),
            ObjectiveKind::Linear { cost, .. } => Some(cost.len()),
            ObjectiveKind::Traffic(m) => Some(m.paths.len()),
            ObjectiveKind::Scalar1D => None,
        }
    }

    /// `f(x)` and `∇f(x)` at a feasible point.
    pub fn evaluate(&self, region: &Region, x: &[f64]) -> Result<(f64, Dual), ProblemError> {
        if let Some(n) = self.dim() {
            if n != x.len() {
                return Err(GeometryError::DimensionMismatch {
                    expected: n,
                    got: x.len(),
                }
                .into());
            }
        }
        if !region.contains(x, FEAS_TOL)? {
            return Err(ProblemError::Infeasible);
        }
        let mut g = vec![0.0; x.len()];
        let f = self.value_grad_into(x, &mut g);
        Ok((f, Dual(g)))
    }

    /// Unchecked `f(x)`, writing `∇f(x)` into `grad`. Hot path of the integrators.
    pub fn value_grad_into(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        match &self.kind {
            ObjectiveKind::Quadratic { center, curvature } => {
                let mut f = 0.0;
                for (i, g) in grad.iter_mut().enumerate() {
                    *g = curvature
                        .row(i)
                        .iter()
                        .zip(x)
                        .zip(center.iter())
                        .map(|((a, xj), cj)| a * (xj - cj))
                        .sum();
                    f += 0.5 * (x[i] - center[i]) * *g;
                }
                f
            }
            ObjectiveKind::Linear { cost, offset } => {
                grad.copy_from_slice(cost);
                cost.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + offset
            }
            ObjectiveKind::Traffic(model) => model.cost_into(x, grad),
            ObjectiveKind::Scalar1D => {
                grad.fill(0.0);
                grad[0] = 1.0;
                x[0]
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut g = vec![0.0; x.len()];
        self.value_grad_into(x, &mut g)
    }
}

/// Sharpness estimate at a polytope vertex: the smallest rate
/// `⟨∇f(vertex), z⟩` over unit tangent-cone generators `z`.
///
/// The vertex is sharp iff the result is positive. On boxes and simplices
/// the generators are the extreme rays of the cone, so the minimum of the
/// linear functional over normalized cone directions is attained on one of them.
pub fn check_sharpness(obj: &Objective, region: &Region, vertex: &[f64]) -> Result<f64, ProblemError> {
    let gens = region.tangent_cone_generators(vertex)?;
    let (_, grad) = obj.evaluate(region, vertex)?;
    Ok(gens
        .iter()
        .map(|z| region.inner(&grad, z) / region.norm(z))
        .fold(f64::INFINITY, f64::min))
}

/// Monte Carlo lower envelope of `2(f(x) − f*)/‖x − x*‖²` over feasible
/// samples: half drawn from the region, half at distance 1e−3 from `x*`
/// (projected back onto the region).
pub fn check_strong_convexity(
    obj: &Objective,
    region: &Region,
    samples: usize,
    seed: u64,
) -> Result<f64, ProblemError> {
    let (xstar, fstar) = obj.known_min.clone().ok_or(ProblemError::MissingKnownMin)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = region.dim();
    let mut best = f64::INFINITY;
    for k in 0..samples {
        let x = if k % 2 == 0 {
            region.sample(&mut rng)
        } else {
            let dir: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
            let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let y: Vec<f64> = xstar.iter().zip(&dir).map(|(c, d)| c + 1e-3 * d / len).collect();
            region.euclidean_project(&y)?
        };
        let diff: Vec<f64> = x.iter().zip(xstar.iter()).map(|(a, b)| a - b).collect();
        let dist = region.norm(&diff);
        if dist < 1e-12 {
            continue;
        }
        let ratio = 2.0 * (obj.value(&x) - fstar) / (dist * dist);
        best = best.min(ratio);
    }
    Ok(best)
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

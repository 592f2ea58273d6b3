//! Regularizers and the geometry they induce.
//!
//! Each [`Regularizer`] is a strongly convex penalty `h` on a feasible
//! region. From it we get the mirror map `Q(y) = argmax {⟨y,x⟩ − h(x)}`,
//! the convex conjugate `h*`, the Fenchel coupling
//! `F(p,y) = h(p) + h*(y) − ⟨y,p⟩` and the Bregman divergence.
//!
//! Supported pairings:
//!
//! | regularizer | region              | K (w.r.t. region norm)   |
//! |-------------|---------------------|--------------------------|
//! | Euclidean   | box/simplex/product | 1 (L2), 1/n (L1)         |
//! | Entropic    | simplex of mass λ   | 1/λ                      |
//! | VonNeumann  | spectrahedron       | 1/2                      |
//!
//! The entropic penalty for mass λ is `Σ xᵢ log(xᵢ/λ)`, whose mirror map is
//! `λ·softmax(y)`; at λ = 1 it is the negative Gibbs entropy.

use thiserror::Error;

use crate::geometry::{pack_symmetric, unpack_symmetric, Dual, GeometryError, Norm, Primal, Region, RegionKind};
use crate::linalg::jacobi_eigen;

/// Feasibility tolerance for primal inputs.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MirrorError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{reg} regularizer is not defined on this region")]
    UnsupportedPairing { reg: &'static str },
    #[error("point is not feasible")]
    Infeasible,
    #[error("{0} regularizer is not differentiable at boundary points")]
    Boundary(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularizer {
    Euclidean,
    Entropic,
    VonNeumann,
}

impl Regularizer {
    pub fn name(self) -> &'static str {
        match self {
            Regularizer::Euclidean => "euclidean",
            Regularizer::Entropic => "entropic",
            Regularizer::VonNeumann => "vonneumann",
        }
    }

    pub fn is_steep(self) -> bool {
        !matches!(self, Regularizer::Euclidean)
    }

    pub fn check_pairing(self, region: &Region) -> Result<(), MirrorError> {
        let ok = match (self, region.kind()) {
            (Regularizer::Euclidean, RegionKind::Spectrahedron { .. }) => false,
            (Regularizer::Euclidean, _) => true,
            (Regularizer::Entropic, RegionKind::Simplex { .. }) => true,
            (Regularizer::VonNeumann, RegionKind::Spectrahedron { .. }) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(MirrorError::UnsupportedPairing { reg: self.name() })
        }
    }

    /// Strong-convexity modulus `K` with respect to the region norm.
    pub fn strong_convexity(self, region: &Region) -> Result<f64, MirrorError> {
        self.check_pairing(region)?;
        Ok(match (self, region.kind()) {
            (Regularizer::Euclidean, _) => match region.norm_tag() {
                Norm::L1 => 1.0 / region.dim() as f64,
                _ => 1.0,
            },
            (Regularizer::Entropic, RegionKind::Simplex { mass, .. }) => 1.0 / mass,
            _ => 0.5,
        })
    }

    fn check_feasible(self, region: &Region, x: &[f64]) -> Result<(), MirrorError> {
        if region.contains(x, FEAS_TOL)? {
            Ok(())
        } else {
            Err(MirrorError::Infeasible)
        }
    }

    /// `h(x)`, with the convention `0·log 0 = 0` on the boundary.
    pub fn value(self, region: &Region, x: &[f64]) -> Result<f64, MirrorError> {
        self.check_pairing(region)?;
        self.check_feasible(region, x)?;
        Ok(self.value_unchecked(region, x))
    }

    fn value_unchecked(self, region: &Region, x: &[f64]) -> f64 {
        match (self, region.kind()) {
            (Regularizer::Euclidean, _) => 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
            (Regularizer::Entropic, RegionKind::Simplex { mass, .. }) => x.iter().map(|&v| xlogx_over(v, *mass)).sum(),
            (Regularizer::VonNeumann, RegionKind::Spectrahedron { order }) => {
                let e = jacobi_eigen(&unpack_symmetric(*order, x));
                let tr: f64 = e.values.iter().map(|v| v.max(0.0)).sum();
                e.values.iter().map(|&l| xlogx_over(l, 1.0)).sum::<f64>() + xlogx_over(1.0 - tr, 1.0)
            }
            _ => unreachable!("pairing checked"),
        }
    }

    /// The mirror map `Q(y)`.
    pub fn mirror_map(self, region: &Region, y: &[f64]) -> Result<Primal, MirrorError> {
        self.check_pairing(region)?;
        if y.len() != region.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: region.dim(),
                got: y.len(),
            }
            .into());
        }
        let mut out = vec![0.0; y.len()];
        self.mirror_into(region, y, &mut out)?;
        Ok(Primal(out))
    }

    /// Writes `Q(y)` into `out` without allocating (except for matrices).
    pub fn mirror_into(self, region: &Region, y: &[f64], out: &mut [f64]) -> Result<(), MirrorError> {
        match (self, region.kind()) {
            (Regularizer::Euclidean, _) => region.project_into(y, out)?,
            (Regularizer::Entropic, RegionKind::Simplex { mass, .. }) => softmax_into(y, *mass, out),
            (Regularizer::VonNeumann, RegionKind::Spectrahedron { order }) => {
                let e = jacobi_eigen(&unpack_symmetric(*order, y));
                let m = e.values.iter().fold(0.0_f64, |a, &b| a.max(b));
                let denom = (-m).exp() + e.values.iter().map(|l| (l - m).exp()).sum::<f64>();
                let x = e.map_spectrum(|l| (l - m).exp() / denom);
                out.copy_from_slice(&pack_symmetric(&x));
            }
            _ => return Err(MirrorError::UnsupportedPairing { reg: self.name() }),
        }
        Ok(())
    }

    /// The convex conjugate `h*(y) = max_x {⟨y,x⟩ − h(x)}`.
    pub fn conjugate(self, region: &Region, y: &[f64]) -> Result<f64, MirrorError> {
        self.check_pairing(region)?;
        Ok(match (self, region.kind()) {
            (Regularizer::Euclidean, _) => {
                let x = region.euclidean_project(y)?;
                region.inner(y, &x) - self.value_unchecked(region, &x)
            }
            (Regularizer::Entropic, RegionKind::Simplex { mass, .. }) => mass * log_sum_exp(y),
            (Regularizer::VonNeumann, RegionKind::Spectrahedron { order }) => {
                let e = jacobi_eigen(&unpack_symmetric(*order, y));
                let m = e.values.iter().fold(0.0_f64, |a, &b| a.max(b));
                m + ((-m).exp() + e.values.iter().map(|l| (l - m).exp()).sum::<f64>()).ln()
            }
            _ => unreachable!("pairing checked"),
        })
    }

    /// Gradient of `h` at an interior (for steep `h`) point.
    pub fn gradient(self, region: &Region, x: &[f64]) -> Result<Dual, MirrorError> {
        self.check_pairing(region)?;
        self.check_feasible(region, x)?;
        Ok(match (self, region.kind()) {
            (Regularizer::Euclidean, _) => Dual(x.to_vec()),
            (Regularizer::Entropic, RegionKind::Simplex { mass, .. }) => {
                if x.iter().any(|&v| v <= 0.0) {
                    return Err(MirrorError::Boundary(self.name()));
                }
                Dual(x.iter().map(|&v| (v / mass).ln() + 1.0).collect())
            }
            (Regularizer::VonNeumann, RegionKind::Spectrahedron { order }) => {
                let e = jacobi_eigen(&unpack_symmetric(*order, x));
                let tr: f64 = e.values.iter().sum();
                if e.values.iter().any(|&l| l <= 0.0) || tr >= 1.0 {
                    return Err(MirrorError::Boundary(self.name()));
                }
                let shift = (1.0 - tr).ln();
                Dual(pack_symmetric(&e.map_spectrum(|l| l.ln() - shift)))
            }
            _ => unreachable!("pairing checked"),
        })
    }

    /// Fenchel coupling `F(p,y) = h(p) + h*(y) − ⟨y,p⟩ ≥ 0`.
    pub fn fenchel_coupling(self, region: &Region, p: &[f64], y: &[f64]) -> Result<f64, MirrorError> {
        let hp = self.value(region, p)?;
        Ok(hp + self.conjugate(region, y)? - region.inner(y, p))
    }

    /// The η-deflated coupling `η⁻¹ F(p, ηy)` used as a Lyapunov function.
    pub fn deflated_coupling(self, region: &Region, p: &[f64], y: &[f64], eta: f64) -> Result<f64, MirrorError> {
        let scaled: Vec<f64> = y.iter().map(|v| eta * v).collect();
        Ok(self.fenchel_coupling(region, p, &scaled)? / eta)
    }

    /// Bregman divergence `D(p,x) = h(p) − h(x) − ⟨∇h(x), p − x⟩`.
    ///
    /// For steep regularizers `x` must be interior; boundary points are an
    /// error rather than `+∞`.
    pub fn bregman_divergence(self, region: &Region, p: &[f64], x: &[f64]) -> Result<f64, MirrorError> {
        let hp = self.value(region, p)?;
        let grad = self.gradient(region, x)?;
        let diff: Vec<f64> = p.iter().zip(x).map(|(a, b)| a - b).collect();
        Ok(hp - self.value_unchecked(region, x) - region.inner(&grad, &diff))
    }

    /// Depth `Ω = max h − min h` over the region.
    pub fn depth(self, region: &Region) -> Result<f64, MirrorError> {
        self.check_pairing(region)?;
        Ok(match (self, region.kind()) {
            (Regularizer::Euclidean, _) => euclidean_depth(region),
            (Regularizer::Entropic, RegionKind::Simplex { mass, dim }) => mass * (*dim as f64).ln(),
            (Regularizer::VonNeumann, RegionKind::Spectrahedron { order }) => ((order + 1) as f64).ln(),
            _ => unreachable!("pairing checked"),
        })
    }

    /// Minimizer of `h` over the region.
    pub fn prox_center(self, region: &Region) -> Result<Primal, MirrorError> {
        self.mirror_map(region, &vec![0.0; region.dim()])
    }
}

fn euclidean_depth(region: &Region) -> f64 {
    match region.kind() {
        RegionKind::Box { lower, upper } => {
            let max: f64 = lower.iter().zip(upper).map(|(l, u)| (l * l).max(u * u)).sum();
            let min: f64 = lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| {
                    let c = 0.0_f64.clamp(l, u);
                    c * c
                })
                .sum();
            0.5 * (max - min)
        }
        RegionKind::Simplex { mass, dim } => 0.5 * mass * mass * (1.0 - 1.0 / *dim as f64),
        RegionKind::Product(parts) => parts.iter().map(euclidean_depth).sum(),
        RegionKind::Spectrahedron { .. } => unreachable!("pairing checked"),
    }
}

/// `x log(x/scale)`, extended by continuity to 0 at x ≤ 0.
fn xlogx_over(x: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (x / scale).ln()
    }
}

pub fn log_sum_exp(y: &[f64]) -> f64 {
    let m = y.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    m + y.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// `mass · softmax(y)` with max-subtraction.
pub fn softmax_into(y: &[f64], mass: f64, out: &mut [f64]) {
    let m = y.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut s = 0.0;
    for (o, &v) in out.iter_mut().zip(y) {
        *o = (v - m).exp();
        s += *o;
    }
    let k = mass / s;
    for o in out.iter_mut() {
        *o *= k;
    }
}

//! Compact convex feasible regions.
//!
//! A [`Region`] couples a set (box, scaled simplex, spectrahedron, or a
//! product of boxes and simplices) with the primal norm used to measure it.
//! Points are stored as flat coordinate vectors; a symmetric `n×n` matrix
//! on the spectrahedron is stored as its packed upper triangle, and the
//! region's [`Region::inner`] supplies the matching trace pairing.

use std::ops::{Deref, DerefMut};

use rand::Rng;
use thiserror::Error;

use crate::linalg::{jacobi_eigen, Matrix};

/// Absolute tolerance used to decide whether a point is a polytope vertex.
pub const VERTEX_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation not supported on {0}")]
    Unsupported(&'static str),
    #[error("point is not a vertex of the region")]
    NotAVertex,
    #[error("invalid region: {0}")]
    Invalid(String),
}

macro_rules! coord_newtype {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Clone, Debug, PartialEq, Default)]
        pub struct $name(pub Vec<f64>);

        impl $name {
            pub fn zeros(n: usize) -> Self {
                $name(vec![0.0; n])
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }
        }

        impl Deref for $name {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut [f64] {
                &mut self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                $name(v)
            }
        }

        impl From<&[f64]> for $name {
            fn from(v: &[f64]) -> Self {
                $name(v.to_vec())
            }
        }
    };
}

coord_newtype!(
    /// A point of the primal space (where the feasible region lives).
    Primal
);
coord_newtype!(
    /// A point of the dual space (scores, gradients).
    Dual
);

/// The primal norm attached to a region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Nuclear,
}

impl Norm {
    pub fn name(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Nuclear => "nuclear",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RegionKind {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Simplex { mass: f64, dim: usize },
    Spectrahedron { order: usize },
    Product(Vec<Region>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    kind: RegionKind,
    norm: Norm,
}

impl Region {
    /// Box `∏ [lowerᵢ, upperᵢ]` with the L2 norm.
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, GeometryError> {
        if lower.len() != upper.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(GeometryError::Invalid("box must have dimension ≥ 1".into()));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() || l > u {
                return Err(GeometryError::Invalid(format!(
                    "box bounds at coordinate {i} are not an interval: [{l}, {u}]"
                )));
            }
        }
        Ok(Region {
            kind: RegionKind::Box { lower, upper },
            norm: Norm::L2,
        })
    }

    /// `[lo, hi]ⁿ`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self, GeometryError> {
        Self::boxed(vec![lo; dim], vec![hi; dim])
    }

    /// The scaled simplex `{x ≥ 0, Σx = mass}` in `dim` coordinates, with the L1 norm.
    pub fn simplex(mass: f64, dim: usize) -> Result<Self, GeometryError> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(GeometryError::Invalid(format!("simplex mass must be > 0, got {mass}")));
        }
        if dim < 2 {
            return Err(GeometryError::Invalid(format!(
                "simplex dimension must be ≥ 2, got {dim}"
            )));
        }
        Ok(Region {
            kind: RegionKind::Simplex { mass, dim },
            norm: Norm::L1,
        })
    }

    /// `{X ⪰ 0, tr X ≤ 1}` over symmetric `order×order` matrices, with the nuclear norm.
    pub fn spectrahedron(order: usize) -> Result<Self, GeometryError> {
        if order == 0 {
            return Err(GeometryError::Invalid("spectrahedron order must be ≥ 1".into()));
        }
        Ok(Region {
            kind: RegionKind::Spectrahedron { order },
            norm: Norm::Nuclear,
        })
    }

    /// Cartesian product of boxes and simplices, with the L2 norm on the concatenation.
    pub fn product(parts: Vec<Region>) -> Result<Self, GeometryError> {
        if parts.is_empty() {
            return Err(GeometryError::Invalid("product of zero regions".into()));
        }
        if parts
            .iter()
            .any(|p| matches!(p.kind, RegionKind::Spectrahedron { .. } | RegionKind::Product(_)))
        {
            return Err(GeometryError::Invalid(
                "product factors must be boxes or simplices".into(),
            ));
        }
        Ok(Region {
            kind: RegionKind::Product(parts),
            norm: Norm::L2,
        })
    }

    /// Overrides the default norm. The nuclear norm is reserved for spectrahedra.
    pub fn with_norm(mut self, norm: Norm) -> Result<Self, GeometryError> {
        let spectral = matches!(self.kind, RegionKind::Spectrahedron { .. });
        let allowed = match norm {
            Norm::L2 => true,
            Norm::L1 => !spectral,
            Norm::Nuclear => spectral,
        };
        if !allowed {
            return Err(GeometryError::Invalid(format!(
                "norm {} is not available on this region",
                norm.name()
            )));
        }
        self.norm = norm;
        Ok(self)
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn norm_tag(&self) -> Norm {
        self.norm
    }

    /// Number of stored coordinates.
    pub fn dim(&self) -> usize {
        match &self.kind {
            RegionKind::Box { lower, .. } => lower.len(),
            RegionKind::Simplex { dim, .. } => *dim,
            RegionKind::Spectrahedron { order } => order * (order + 1) / 2,
            RegionKind::Product(parts) => parts.iter().map(Region::dim).sum(),
        }
    }

    pub fn is_polytope(&self) -> bool {
        !matches!(self.kind, RegionKind::Spectrahedron { .. })
    }

    fn check_dim(&self, len: usize) -> Result<(), GeometryError> {
        let expected = self.dim();
        if len != expected {
            return Err(GeometryError::DimensionMismatch { expected, got: len });
        }
        Ok(())
    }

    /// The duality pairing `⟨y, x⟩`: the dot product, or `tr(YX)` on packed matrices.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.kind {
            RegionKind::Spectrahedron { order } => packed_trace_inner(*order, a, b),
            _ => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        }
    }

    /// Primal norm of a displacement.
    pub fn norm(&self, x: &[f64]) -> f64 {
        self.norm_of(self.norm, x)
    }

    /// Dual norm (`L∞` for `L1`, `L2` for `L2`, operator norm for nuclear).
    pub fn dual_norm(&self, y: &[f64]) -> f64 {
        match self.norm {
            Norm::L1 => y.iter().fold(0.0, |m, v| m.max(v.abs())),
            Norm::L2 => self.norm_of(Norm::L2, y),
            Norm::Nuclear => {
                let order = self.order().expect("nuclear norm implies spectrahedron");
                let e = jacobi_eigen(&unpack_symmetric(order, y));
                e.values.iter().fold(0.0, |m, v| m.max(v.abs()))
            }
        }
    }

    fn norm_of(&self, norm: Norm, x: &[f64]) -> f64 {
        match (norm, self.order()) {
            (Norm::L1, None) => x.iter().map(|v| v.abs()).sum(),
            (Norm::L2, None) => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            (Norm::L2, Some(order)) => packed_trace_inner(order, x, x).sqrt(),
            (_, Some(order)) => {
                let e = jacobi_eigen(&unpack_symmetric(order, x));
                e.values.iter().map(|v| v.abs()).sum()
            }
            (Norm::Nuclear, None) => unreachable!("nuclear norm on a vector region"),
        }
    }

    fn order(&self) -> Option<usize> {
        match self.kind {
            RegionKind::Spectrahedron { order } => Some(order),
            _ => None,
        }
    }

    /// True iff `x` satisfies every defining constraint up to `tol`.
    ///
    /// Boxes measure the exact distance to the set in the region norm;
    /// simplices and spectrahedra relax each linear / spectral constraint by `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool, GeometryError> {
        self.check_dim(x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Ok(false);
        }
        Ok(match &self.kind {
            RegionKind::Box { lower, upper } => {
                let gap: Vec<f64> = x
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(&v, (&l, &u))| v - v.clamp(l, u))
                    .collect();
                self.norm(&gap) <= tol
            }
            RegionKind::Simplex { mass, .. } => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - mass).abs() <= tol
            }
            RegionKind::Spectrahedron { order } => {
                let e = jacobi_eigen(&unpack_symmetric(*order, x));
                e.values.iter().all(|&l| l >= -tol) && e.values.iter().sum::<f64>() <= 1.0 + tol
            }
            RegionKind::Product(parts) => {
                let mut off = 0;
                let mut ok = true;
                for p in parts {
                    let d = p.dim();
                    ok &= p.contains(&x[off..off + d], tol)?;
                    off += d;
                }
                ok
            }
        })
    }

    /// `max ‖x′ − x‖` over the region, in the region norm.
    pub fn diameter(&self) -> f64 {
        self.diameter_in(self.norm)
    }

    fn diameter_in(&self, norm: Norm) -> f64 {
        match (&self.kind, norm) {
            (RegionKind::Box { lower, upper }, Norm::L2) => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| (u - l) * (u - l))
                .sum::<f64>()
                .sqrt(),
            (RegionKind::Box { lower, upper }, _) => lower.iter().zip(upper).map(|(l, u)| u - l).sum(),
            (RegionKind::Simplex { mass, .. }, Norm::L2) => mass * 2f64.sqrt(),
            (RegionKind::Simplex { mass, .. }, _) => 2.0 * mass,
            // Two orthogonal rank-one projectors.
            (RegionKind::Spectrahedron { order }, Norm::L2) => {
                if *order >= 2 {
                    2f64.sqrt()
                } else {
                    1.0
                }
            }
            (RegionKind::Spectrahedron { order }, _) => {
                if *order >= 2 {
                    2.0
                } else {
                    1.0
                }
            }
            (RegionKind::Product(parts), Norm::L2) => parts
                .iter()
                .map(|p| p.diameter_in(Norm::L2).powi(2))
                .sum::<f64>()
                .sqrt(),
            (RegionKind::Product(parts), _) => parts.iter().map(|p| p.diameter_in(norm)).sum(),
        }
    }

    /// Closest point in the Euclidean sense: `argmin ‖y − x‖₂²`.
    pub fn euclidean_project(&self, y: &[f64]) -> Result<Primal, GeometryError> {
        self.check_dim(y.len())?;
        let mut out = vec![0.0; y.len()];
        self.project_into(y, &mut out)?;
        Ok(Primal(out))
    }

    /// Allocation-free projection used on hot paths.
    pub fn project_into(&self, y: &[f64], out: &mut [f64]) -> Result<(), GeometryError> {
        match &self.kind {
            RegionKind::Box { lower, upper } => {
                for (o, (&v, (&l, &u))) in out.iter_mut().zip(y.iter().zip(lower.iter().zip(upper))) {
                    *o = v.clamp(l, u);
                }
            }
            RegionKind::Simplex { mass, .. } => project_simplex(y, *mass, out),
            RegionKind::Spectrahedron { .. } => return Err(GeometryError::Unsupported("spectrahedron projection")),
            RegionKind::Product(parts) => {
                let mut off = 0;
                for p in parts {
                    let d = p.dim();
                    p.project_into(&y[off..off + d], &mut out[off..off + d])?;
                    off += d;
                }
            }
        }
        Ok(())
    }

    /// Vertices of a polytope region. Exponential in the box dimension.
    pub fn vertices(&self) -> Result<Vec<Primal>, GeometryError> {
        match &self.kind {
            RegionKind::Box { lower, upper } => {
                let n = lower.len();
                let mut out = Vec::with_capacity(1 << n);
                for mask in 0..(1usize << n) {
                    out.push(Primal(
                        (0..n)
                            .map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] })
                            .collect(),
                    ));
                }
                out.dedup();
                Ok(out)
            }
            RegionKind::Simplex { mass, dim } => Ok((0..*dim)
                .map(|i| {
                    let mut v = vec![0.0; *dim];
                    v[i] = *mass;
                    Primal(v)
                })
                .collect()),
            RegionKind::Spectrahedron { .. } => Err(GeometryError::Unsupported("spectrahedron vertices")),
            RegionKind::Product(parts) => {
                let mut acc = vec![Vec::new()];
                for p in parts {
                    let vs = p.vertices()?;
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix: Vec<f64>| {
                            vs.iter().map(move |v| {
                                let mut c = prefix.clone();
                                c.extend_from_slice(v);
                                c
                            })
                        })
                        .collect();
                }
                Ok(acc.into_iter().map(Primal).collect())
            }
        }
    }

    /// Unit-norm generators of the tangent cone at a polytope vertex.
    ///
    /// Boxes yield the inward coordinate directions; simplices yield the
    /// normalized edges toward the adjacent vertices.
    pub fn tangent_cone_generators(&self, vertex: &[f64]) -> Result<Vec<Primal>, GeometryError> {
        self.check_dim(vertex.len())?;
        let raw = self.raw_cone_generators(vertex)?;
        Ok(raw
            .into_iter()
            .map(|z| {
                let n = self.norm(&z);
                Primal(z.iter().map(|v| v / n).collect())
            })
            .collect())
    }

    fn raw_cone_generators(&self, vertex: &[f64]) -> Result<Vec<Vec<f64>>, GeometryError> {
        match &self.kind {
            RegionKind::Box { lower, upper } => {
                let n = lower.len();
                let mut gens = Vec::new();
                for i in 0..n {
                    let at_lo = (vertex[i] - lower[i]).abs() <= VERTEX_TOL;
                    let at_hi = (vertex[i] - upper[i]).abs() <= VERTEX_TOL;
                    if !at_lo && !at_hi {
                        return Err(GeometryError::NotAVertex);
                    }
                    if at_lo && at_hi {
                        continue;
                    }
                    let mut z = vec![0.0; n];
                    z[i] = if at_lo { 1.0 } else { -1.0 };
                    gens.push(z);
                }
                Ok(gens)
            }
            RegionKind::Simplex { mass, dim } => {
                let apex = (0..*dim).find(|&i| (vertex[i] - mass).abs() <= VERTEX_TOL);
                let apex = apex.ok_or(GeometryError::NotAVertex)?;
                if (0..*dim).any(|j| j != apex && vertex[j].abs() > VERTEX_TOL) {
                    return Err(GeometryError::NotAVertex);
                }
                Ok((0..*dim)
                    .filter(|&j| j != apex)
                    .map(|j| {
                        let mut z = vec![0.0; *dim];
                        z[j] = 1.0;
                        z[apex] = -1.0;
                        z
                    })
                    .collect())
            }
            RegionKind::Spectrahedron { .. } => Err(GeometryError::Unsupported("spectrahedron tangent cones")),
            RegionKind::Product(parts) => {
                let total = self.dim();
                let mut gens = Vec::new();
                let mut off = 0;
                for p in parts {
                    let d = p.dim();
                    for g in p.raw_cone_generators(&vertex[off..off + d])? {
                        let mut z = vec![0.0; total];
                        z[off..off + d].copy_from_slice(&g);
                        gens.push(z);
                    }
                    off += d;
                }
                Ok(gens)
            }
        }
    }

    /// Draws a random feasible point. Uniform on boxes and simplices
    /// (Dirichlet(1)); on spectrahedra a random rotation of a random
    /// spectrum with trace ≤ 1.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Primal {
        match &self.kind {
            RegionKind::Box { lower, upper } => Primal(
                lower
                    .iter()
                    .zip(upper)
                    .map(|(&l, &u)| l + (u - l) * rng.random::<f64>())
                    .collect(),
            ),
            RegionKind::Simplex { mass, dim } => {
                let e: Vec<f64> = (0..*dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                let s: f64 = e.iter().sum();
                Primal(e.iter().map(|v| mass * v / s).collect())
            }
            RegionKind::Spectrahedron { order } => {
                let n = *order;
                let e: Vec<f64> = (0..=n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                let s: f64 = e.iter().sum();
                let mut g = Matrix::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let v = rng.random::<f64>() - 0.5;
                        g[(i, j)] = v;
                        g[(j, i)] = v;
                    }
                }
                let basis = jacobi_eigen(&g);
                let spectrum: Vec<f64> = e[..n].iter().map(|v| v / s).collect();
                let mut x = Matrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        x[(i, j)] = (0..n)
                            .map(|k| basis.vectors[(i, k)] * spectrum[k] * basis.vectors[(j, k)])
                            .sum();
                    }
                }
                Primal(pack_symmetric(&x))
            }
            RegionKind::Product(parts) => Primal(parts.iter().flat_map(|p| p.sample(rng).0).collect()),
        }
    }
}

/// Sort-and-threshold projection onto `{x ≥ 0, Σx = mass}`.
pub fn project_simplex(y: &[f64], mass: f64, out: &mut [f64]) {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - mass) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    for (o, &v) in out.iter_mut().zip(y) {
        *o = (v - theta).max(0.0);
    }
}

/// Packs the upper triangle (row-major, `i ≤ j`) of a symmetric matrix.
pub fn pack_symmetric(m: &Matrix) -> Vec<f64> {
    let n = m.rows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn unpack_symmetric(order: usize, packed: &[f64]) -> Matrix {
    assert_eq!(packed.len(), order * (order + 1) / 2, "packed length mismatch");
    let mut m = Matrix::zeros(order, order);
    let mut k = 0;
    for i in 0..order {
        for j in i..order {
            m[(i, j)] = packed[k];
            m[(j, i)] = packed[k];
            k += 1;
        }
    }
    m
}

/// `tr(AB)` for packed symmetric `A`, `B`.
pub fn packed_trace_inner(order: usize, a: &[f64], b: &[f64]) -> f64 {
    let mut k = 0;
    let mut s = 0.0;
    for i in 0..order {
        for j in i..order {
            let w = if i == j { 1.0 } else { 2.0 };
            s += w * a[k] * b[k];
            k += 1;
        }
    }
    s
}

//! Seeded randomized invariant checks, run by the `properties` acceptance suite.
//!
//! Every check draws its own cases from a ChaCha stream, so a failure is
//! reproducible from `(seed, check name)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{integrate_md, integrate_smd, IntegratorConfig, SensitivitySchedule};
use crate::geometry::{Region, RegionKind};
use crate::linalg::{jacobi_eigen, Matrix};
use crate::mirror::Regularizer;
use crate::noise::{DecaySchedule, NoiseModel};
use crate::problems::Objective;
use crate::traffic::{cost_eval, enumerate_paths, path_covariance, random_network, PathSet};

pub const DEFAULT_CASES: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

type Check = fn(&mut ChaCha8Rng) -> bool;

/// `(name, check, cases divisor)`: expensive checks run `cases / divisor` times.
const CHECKS: &[(&str, Check, usize)] = &[
    ("projection-idempotent", projection_idempotent, 1),
    ("projection-nonexpansive", projection_nonexpansive, 1),
    ("cone-generators-feasible", cone_generators_feasible, 1),
    ("diameter-translation", diameter_translation, 1),
    ("mirror-lipschitz", mirror_lipschitz, 1),
    ("fenchel-norm-bound", fenchel_norm_bound, 1),
    ("fenchel-smoothness", fenchel_smoothness, 1),
    ("fenchel-vs-bregman", fenchel_vs_bregman, 1),
    ("steep-interior", steep_interior, 1),
    ("euclidean-onto", euclidean_onto, 1),
    ("reciprocity", reciprocity, 1),
    ("polar-cone-invariance", polar_cone_invariance, 1),
    ("conjugate-gradient", conjugate_gradient, 1),
    ("objective-gradient", objective_gradient, 1),
    ("objective-convexity", objective_convexity, 1),
    ("quadratic-growth", quadratic_growth, 1),
    ("covariance-psd", covariance_psd, 1),
    ("covariance-trace-bound", covariance_trace_bound, 1),
    ("path-covariance-formula", path_covariance_formula, 1),
    ("traffic-marginal-gradient", traffic_marginal_gradient, 1),
    ("traffic-convexity", traffic_convexity, 1),
    ("traffic-flow-conservation", traffic_flow_conservation, 1),
    ("integrator-determinism", integrator_determinism, 20),
    ("integrator-feasibility", integrator_feasibility, 20),
    ("lyapunov-decrease", lyapunov_decrease, 20),
];

pub fn run_all(seed: u64, cases: usize) -> Vec<PropertyOutcome> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(name, check, divisor))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let n = (cases / divisor).max(1);
            let failures = (0..n).filter(|_| !check(&mut rng)).count();
            PropertyOutcome {
                name,
                cases: n,
                failures,
            }
        })
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect()
}

fn random_box(rng: &mut ChaCha8Rng) -> Region {
    let n = rng.random_range(1..=5);
    let lower = random_vec(rng, n, 2.0);
    let upper = lower.iter().map(|l| l + 0.1 + 2.0 * rng.random::<f64>()).collect();
    Region::boxed(lower, upper).expect("ordered bounds")
}

fn random_simplex(rng: &mut ChaCha8Rng) -> Region {
    Region::simplex(0.5 + 2.5 * rng.random::<f64>(), rng.random_range(2..=6)).expect("positive mass")
}

fn random_polytope(rng: &mut ChaCha8Rng) -> Region {
    if rng.random() {
        random_box(rng)
    } else {
        random_simplex(rng)
    }
}

/// A region together with a regularizer it pairs with.
fn random_setup(rng: &mut ChaCha8Rng) -> (Region, Regularizer) {
    match rng.random_range(0..4) {
        0 => (random_box(rng), Regularizer::Euclidean),
        1 => (random_simplex(rng), Regularizer::Euclidean),
        2 => (random_simplex(rng), Regularizer::Entropic),
        _ => (
            Region::spectrahedron(rng.random_range(1..=3)).expect("order ≥ 1"),
            Regularizer::VonNeumann,
        ),
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn l2(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn projection_idempotent(rng: &mut ChaCha8Rng) -> bool {
    let r = random_polytope(rng);
    let y = random_vec(rng, r.dim(), 5.0);
    let p = r.euclidean_project(&y).expect("polytope");
    let pp = r.euclidean_project(&p).expect("polytope");
    p.iter().zip(pp.iter()).all(|(a, b)| (a - b).abs() <= 1e-12)
}

fn projection_nonexpansive(rng: &mut ChaCha8Rng) -> bool {
    let r = random_polytope(rng);
    let y = random_vec(rng, r.dim(), 5.0);
    let z = random_vec(rng, r.dim(), 5.0);
    let (py, pz) = (
        r.euclidean_project(&y).expect("polytope"),
        r.euclidean_project(&z).expect("polytope"),
    );
    l2(&sub(&py, &pz)) <= l2(&sub(&y, &z)) + 1e-12
}

fn cone_generators_feasible(rng: &mut ChaCha8Rng) -> bool {
    let r = random_polytope(rng);
    let verts = r.vertices().expect("polytope");
    let v = &verts[rng.random_range(0..verts.len())];
    let gens = r.tangent_cone_generators(v).expect("vertex");
    let eps = 1e-4;
    gens.iter().all(|z| {
        let x: Vec<f64> = v.iter().zip(z.iter()).map(|(a, b)| a + eps * b).collect();
        r.contains(&x, 1e-12).expect("dimension")
    })
}

fn diameter_translation(rng: &mut ChaCha8Rng) -> bool {
    let r = random_box(rng);
    let RegionKind::Box { lower, upper } = r.kind() else {
        unreachable!()
    };
    let shift = random_vec(rng, lower.len(), 10.0);
    let moved = Region::boxed(
        lower.iter().zip(&shift).map(|(a, s)| a + s).collect(),
        upper.iter().zip(&shift).map(|(a, s)| a + s).collect(),
    )
    .expect("ordered bounds");
    close(r.diameter(), moved.diameter(), 1e-12)
}

fn dual_sample(rng: &mut ChaCha8Rng, r: &Region) -> Vec<f64> {
    random_vec(rng, r.dim(), 3.0)
}

fn mirror_lipschitz(rng: &mut ChaCha8Rng) -> bool {
    let (r, reg) = random_setup(rng);
    let k = reg.strong_convexity(&r).expect("paired");
    let y = dual_sample(rng, &r);
    let z = dual_sample(rng, &r);
    let (qy, qz) = (
        reg.mirror_map(&r, &y).expect("paired"),
        reg.mirror_map(&r, &z).expect("paired"),
    );
    r.norm(&sub(&qy, &qz)) <= r.dual_norm(&sub(&y, &z)) / k + 1e-9
}

fn fenchel_norm_bound(rng: &mut ChaCha8Rng) -> bool {
    let (r, reg) = random_setup(rng);
    let k = reg.strong_convexity(&r).expect("paired");
    let p = r.sample(rng);
    let y = dual_sample(rng, &r);
    let q = reg.mirror_map(&r, &y).expect("paired");
    let f = reg.fenchel_coupling(&r, &p, &y).expect("paired");
    f >= 0.5 * k * r.norm(&sub(&q, &p)).powi(2) - 1e-9
}

fn fenchel_smoothness(rng: &mut ChaCha8Rng) -> bool {
    let (r, reg) = random_setup(rng);
    let k = reg.strong_convexity(&r).expect("paired");
    let p = r.sample(rng);
    let y = dual_sample(rng, &r);
    let y2 = dual_sample(rng, &r);
    let q = reg.mirror_map(&r, &y).expect("paired");
    let lhs = reg.fenchel_coupling(&r, &p, &y2).expect("paired");
    let d = sub(&y2, &y);
    let rhs = reg.fenchel_coupling(&r, &p, &y).expect("paired")
        + r.inner(&d, &sub(&q, &p))
        + r.dual_norm(&d).powi(2) / (2.0 * k);
    lhs <= rhs + 1e-9
}

fn fenchel_vs_bregman(rng: &mut ChaCha8Rng) -> bool {
    let (r, reg) = random_setup(rng);
    let p = r.sample(rng);
    let y = dual_sample(rng, &r);
    let q = reg.mirror_map(&r, &y).expect("paired");
    let f = reg.fenchel_coupling(&r, &p, &y).expect("paired");
    let d = reg.bregman_divergence(&r, &p, &q).expect("interior for steep maps");
    // equality holds when Q(y) lies in the relative interior
    let interior = match r.kind() {
        RegionKind::Box { lower, upper } => y.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| v > l && v < u),
        RegionKind::Simplex { .. } => q.iter().all(|&v| v > 0.0),
        _ => true,
    };
    if interior {
        close(f, d, 1e-8)
    } else {
        f >= d - 1e-9
    }
}

fn steep_interior(rng: &mut ChaCha8Rng) -> bool {
    let (r, reg) = random_setup(rng);
    if !reg.is_steep() {
        return true;
    }
    let y = dual_sample(rng, &r);
    let q = reg.mirror_map(&r, &y).expect("paired");
    match r.kind() {
        RegionKind::Simplex { .. } => q.iter().all(|&v| v > 0.0),
        RegionKind::Spectrahedron { order } => {
            let e = jacobi_eigen(&crate::geometry::unpack_symmetric(*order, &q));
            e.values[0] > 0.0 && e.values.iter().sum::<f64>() < 1.0
        }
        _ => false,
    }
}

fn euclidean_onto(rng: &mut ChaCha8Rng) -> bool {
    // boundary points are images of themselves under projection
    let r = random_polytope(rng);
    let verts = r.vertices().expect("polytope");
    let a = &verts[rng.random_range(0..verts.len())];
    let b = &verts[rng.random_range(0..verts.len())];
    let s: f64 = rng.random();
    let x: Vec<f64> = a.iter().zip(b.iter()).map(|(u, v)| (1.0 - s) * u + s * v).collect();
    let q = Regularizer::Euclidean.mirror_map(&r, &x).expect("paired");
    q.iter().zip(&x).all(|(u, v)| (u - v).abs() <= 1e-12)
}

fn reciprocity(rng: &mut ChaCha8Rng) -> bool {
    let (r, reg) = random_setup(rng);
    // a ray with a unique limiting image: a clear top coordinate (or eigenvalue)
    // and no coordinate near zero
    let y: Vec<f64> = match r.kind() {
        RegionKind::Spectrahedron { order } => {
            let mut d: Vec<f64> = (0..*order).map(|_| -1.0 - rng.random::<f64>()).collect();
            d[rng.random_range(0..*order)] = 1.0 + rng.random::<f64>();
            crate::geometry::pack_symmetric(&Matrix::diag(&d))
        }
        _ => {
            let mut y: Vec<f64> = random_vec(rng, r.dim(), 2.0)
                .iter()
                .map(|v| v + 0.5 * v.signum())
                .collect();
            let top = (0..y.len()).max_by(|&i, &j| y[i].total_cmp(&y[j])).expect("nonempty");
            y[top] += 1.0;
            y
        }
    };
    let limit = reg
        .mirror_map(&r, &y.iter().map(|v| v * 200.0).collect::<Vec<_>>())
        .expect("paired");
    let couplings: Vec<f64> = [2.0, 20.0, 200.0]
        .iter()
        .map(|s| {
            let ys: Vec<f64> = y.iter().map(|v| v * s).collect();
            reg.fenchel_coupling(&r, &limit, &ys).expect("paired")
        })
        .collect();
    couplings.windows(2).all(|w| w[1] <= w[0] + 1e-9) && couplings[2] <= 1e-6
}

fn polar_cone_invariance(rng: &mut ChaCha8Rng) -> bool {
    let r = random_box(rng);
    let RegionKind::Box { lower, upper } = r.kind() else {
        unreachable!()
    };
    let n = lower.len();
    // y beyond a random vertex; pushing further outward stays in the polar cone
    let side: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            if side[i] {
                upper[i] + rng.random::<f64>()
            } else {
                lower[i] - rng.random::<f64>()
            }
        })
        .collect();
    let v: Vec<f64> = (0..n)
        .map(|i| if side[i] { 1.0 } else { -1.0 } * 3.0 * rng.random::<f64>())
        .collect();
    let q = Regularizer::Euclidean.mirror_map(&r, &y).expect("paired");
    let yv: Vec<f64> = y.iter().zip(&v).map(|(a, b)| a + b).collect();
    q == Regularizer::Euclidean.mirror_map(&r, &yv).expect("paired")
}

fn conjugate_gradient(rng: &mut ChaCha8Rng) -> bool {
    let (r, reg) = random_setup(rng);
    let y = dual_sample(rng, &r);
    let q = reg.mirror_map(&r, &y).expect("paired");
    let h = 1e-5;
    (0..r.dim()).all(|i| {
        let mut e = vec![0.0; r.dim()];
        e[i] = 1.0;
        let plus: Vec<f64> = y.iter().zip(&e).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = y.iter().zip(&e).map(|(a, b)| a - h * b).collect();
        let fd = (reg.conjugate(&r, &plus).expect("paired") - reg.conjugate(&r, &minus).expect("paired")) / (2.0 * h);
        (fd - r.inner(&q, &e)).abs() <= 1e-5
    })
}

fn random_quadratic(rng: &mut ChaCha8Rng, n: usize) -> Objective {
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = 2.0 * rng.random::<f64>() - 1.0;
        }
    }
    let shift = 0.1 * rng.random::<f64>();
    let a = g.gram();
    let a = Matrix::from_row_major(
        n,
        n,
        (0..n * n)
            .map(|k| a.as_slice()[k] + if k % (n + 1) == 0 { shift } else { 0.0 })
            .collect(),
    );
    Objective::quadratic(random_vec(rng, n, 1.0), a).expect("psd by construction")
}

fn random_objective(rng: &mut ChaCha8Rng, n: usize) -> Objective {
    if rng.random() {
        random_quadratic(rng, n)
    } else {
        Objective::linear(random_vec(rng, n, 2.0), rng.random()).expect("finite cost")
    }
}

fn objective_gradient(rng: &mut ChaCha8Rng) -> bool {
    let r = random_polytope(rng);
    let obj = random_objective(rng, r.dim());
    let x = r.sample(rng);
    let (_, g) = obj.evaluate(&r, &x).expect("feasible sample");
    let h = 1e-5;
    (0..r.dim()).all(|i| {
        let (mut a, mut b) = (x.0.clone(), x.0.clone());
        a[i] += h;
        b[i] -= h;
        ((obj.value(&a) - obj.value(&b)) / (2.0 * h) - g[i]).abs() <= 1e-6
    })
}

fn objective_convexity(rng: &mut ChaCha8Rng) -> bool {
    let r = random_polytope(rng);
    let obj = random_objective(rng, r.dim());
    let (x, z) = (r.sample(rng), r.sample(rng));
    let mid: Vec<f64> = x.iter().zip(z.iter()).map(|(a, b)| 0.5 * (a + b)).collect();
    obj.value(&mid) <= 0.5 * obj.value(&x) + 0.5 * obj.value(&z) + 1e-12
}

fn quadratic_growth(rng: &mut ChaCha8Rng) -> bool {
    let n = rng.random_range(1..=5);
    let obj = random_quadratic(rng, n);
    let crate::problems::ObjectiveKind::Quadratic { center, .. } = obj.kind() else {
        unreachable!()
    };
    let x = random_vec(rng, n, 2.0);
    let d = l2(&sub(&x, center));
    obj.value(&x) >= 0.5 * obj.alpha * d * d - 1e-10
}

fn random_noise(rng: &mut ChaCha8Rng) -> NoiseModel {
    let n = rng.random_range(1..=5);
    match rng.random_range(0..3) {
        0 => {
            let m = rng.random_range(1..=5);
            NoiseModel::constant(Matrix::from_row_major(n, m, random_vec(rng, n * m, 1.0))).expect("finite")
        }
        1 => {
            let sched = [
                DecaySchedule::InvLog,
                DecaySchedule::InvSqrtT,
                DecaySchedule::LogPower(0.6),
            ][rng.random_range(0..3)];
            NoiseModel::decaying(rng.random(), sched, n).expect("valid schedule")
        }
        _ => {
            let net = random_network(rng.random_range(2..=7), rng.random_range(0..=8), rng.random()).expect("valid");
            let ps = enumerate_paths(&net, 16).expect("connected");
            NoiseModel::path_correlated(
                &ps,
                random_vec(rng, net.edges.len(), 1.0).iter().map(|v| v.abs()).collect(),
            )
            .expect("nonnegative")
        }
    }
}

fn covariance_psd(rng: &mut ChaCha8Rng) -> bool {
    let m = random_noise(rng);
    let x = vec![0.0; m.state_dim()];
    let c = m.covariance(&x, 100.0 * rng.random::<f64>());
    c.is_symmetric(0.0) && jacobi_eigen(&c).values[0] >= -1e-12
}

fn covariance_trace_bound(rng: &mut ChaCha8Rng) -> bool {
    let m = random_noise(rng);
    let x = random_vec(rng, m.state_dim(), 1.0);
    let c = m.covariance(&x, 1e3 * rng.random::<f64>());
    c.trace() <= m.sup_bound() * (1.0 + 1e-12)
}

fn random_traffic(rng: &mut ChaCha8Rng) -> (crate::traffic::Network, PathSet) {
    let net = random_network(rng.random_range(2..=8), rng.random_range(0..=10), rng.random()).expect("valid");
    let ps = enumerate_paths(&net, 32).expect("connected");
    (net, ps)
}

fn feasible_flow(rng: &mut ChaCha8Rng, n: usize, demand: f64) -> Vec<f64> {
    if n == 1 {
        vec![demand]
    } else {
        Region::simplex(demand, n).expect("mass > 0").sample(rng).0
    }
}

fn path_covariance_formula(rng: &mut ChaCha8Rng) -> bool {
    let (net, ps) = random_traffic(rng);
    let sig: Vec<f64> = (0..net.edges.len()).map(|_| rng.random()).collect();
    let cov = path_covariance(&net, &ps, &sig).expect("valid");
    let inc = ps.incidence(net.edges.len());
    let mut ok = true;
    for p in 0..ps.len() {
        for q in 0..ps.len() {
            let direct: f64 = (0..net.edges.len())
                .filter(|&e| inc[p][e] && inc[q][e])
                .map(|e| sig[e] * sig[e])
                .sum();
            ok &= (cov[(p, q)] - direct).abs() <= 1e-12;
        }
    }
    let own: f64 = ps
        .paths
        .iter()
        .map(|p| p.iter().map(|&e| sig[e] * sig[e]).sum::<f64>())
        .sum();
    ok && (cov.trace() - own).abs() <= 1e-12 && jacobi_eigen(&cov).values[0] >= -1e-12
}

fn traffic_marginal_gradient(rng: &mut ChaCha8Rng) -> bool {
    let (net, ps) = random_traffic(rng);
    let x = feasible_flow(rng, ps.len(), net.demand);
    let c = cost_eval(&net, &ps, &x).expect("feasible");
    // feasible directions: move mass between two paths
    if ps.len() < 2 {
        let h = 1e-5;
        let up = cost_eval_unchecked(&net, &ps, &[x[0] + h]);
        let dn = cost_eval_unchecked(&net, &ps, &[x[0] - h]);
        return ((up - dn) / (2.0 * h) - c.marginal[0]).abs() <= 1e-6;
    }
    let (i, j) = (rng.random_range(0..ps.len()), rng.random_range(0..ps.len()));
    let h = 1e-5;
    let mut a = x.clone();
    let mut b = x.clone();
    a[i] += h;
    a[j] -= h;
    b[i] -= h;
    b[j] += h;
    let fd = (cost_eval_unchecked(&net, &ps, &a) - cost_eval_unchecked(&net, &ps, &b)) / (2.0 * h);
    (fd - (c.marginal[i] - c.marginal[j])).abs() <= 1e-6
}

fn cost_eval_unchecked(net: &crate::traffic::Network, ps: &PathSet, x: &[f64]) -> f64 {
    let model = crate::traffic::TrafficModel {
        network: net.clone(),
        paths: ps.clone(),
    };
    let mut g = vec![0.0; x.len()];
    model.cost_into(x, &mut g)
}

fn traffic_convexity(rng: &mut ChaCha8Rng) -> bool {
    let (net, ps) = random_traffic(rng);
    let x = feasible_flow(rng, ps.len(), net.demand);
    let z = feasible_flow(rng, ps.len(), net.demand);
    let mid: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 0.5 * (a + b)).collect();
    let c = |v: &[f64]| cost_eval(&net, &ps, v).expect("feasible").total;
    c(&mid) <= 0.5 * c(&x) + 0.5 * c(&z) + 1e-12
}

fn traffic_flow_conservation(rng: &mut ChaCha8Rng) -> bool {
    let (net, ps) = random_traffic(rng);
    let x = feasible_flow(rng, ps.len(), net.demand);
    let c = cost_eval(&net, &ps, &x).expect("feasible");
    let weighted: f64 = ps.paths.iter().zip(&x).map(|(p, xp)| xp * p.len() as f64).sum();
    (c.loads.iter().sum::<f64>() - weighted).abs() <= 1e-12 * (1.0 + weighted)
}

fn short_run(rng: &mut ChaCha8Rng) -> (Region, Regularizer, Objective, NoiseModel, IntegratorConfig) {
    let (r, reg) = loop {
        let s = random_setup(rng);
        if s.1 != Regularizer::VonNeumann {
            break s;
        }
    };
    let obj = random_objective(rng, r.dim());
    let noise = NoiseModel::isotropic(r.dim(), rng.random()).expect("finite");
    let mut cfg = IntegratorConfig::new(1e-2, 2.0, random_vec(rng, r.dim(), 1.0));
    cfg.seed = rng.random();
    cfg.log_stride = rng.random_range(1..=5);
    (r, reg, obj, noise, cfg)
}

fn integrator_determinism(rng: &mut ChaCha8Rng) -> bool {
    let (r, reg, obj, noise, cfg) = short_run(rng);
    let sched = SensitivitySchedule::PowerLaw { eta0: 1.0, beta: 0.5 };
    let a = integrate_smd(&obj, reg, &r, &noise, sched, &cfg).expect("valid run");
    let b = integrate_smd(&obj, reg, &r, &noise, sched, &cfg).expect("valid run");
    a == b
}

fn integrator_feasibility(rng: &mut ChaCha8Rng) -> bool {
    let (r, reg, obj, noise, cfg) = short_run(rng);
    let sched = SensitivitySchedule::Constant {
        eta0: 0.5 + rng.random::<f64>(),
    };
    let tr = integrate_smd(&obj, reg, &r, &noise, sched, &cfg).expect("valid run");
    tr.primal_path.iter().all(|x| r.contains(x, 1e-9).expect("dimension"))
}

fn lyapunov_decrease(rng: &mut ChaCha8Rng) -> bool {
    let r = random_box(rng);
    let n = r.dim();
    let obj = random_quadratic(rng, n);
    // minimize over the box by long projected descent, then check V along MD
    let mut x = r.sample(rng).0;
    let mut g = vec![0.0; n];
    let lip = obj.lipschitz.unwrap_or(1.0).max(1e-3);
    for _ in 0..20_000 {
        obj.value_grad_into(&x, &mut g);
        let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - b / lip).collect();
        r.project_into(&y, &mut x).expect("box");
    }
    let mut cfg = IntegratorConfig::new(1e-3, 1.0, random_vec(rng, n, 2.0));
    cfg.target = Some(crate::geometry::Primal(x));
    let tr = integrate_md(&obj, Regularizer::Euclidean, &r, 1.0, &cfg).expect("valid run");
    let v = tr.fenchel_to_target.expect("target set");
    v.windows(2).all(|w| w[1] <= w[0] + 1e-6)
}

//! Randomized invariants, 1000 cases each.

use std::collections::HashSet;
use std::path::Path;

use proptest::collection::vec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mirrorflow::config::ExperimentConfig;
use mirrorflow::diagnostics::{fenchel_audit, hitting_time, occupation_fraction, rate_fit};
use mirrorflow::dynamics::{integrate_md, integrate_smd, IntegratorConfig, SensitivitySchedule, Trajectory};
use mirrorflow::geometry::{Region, RegionKind};
use mirrorflow::linalg::{jacobi_eigen, Matrix};
use mirrorflow::mirror::Regularizer;
use mirrorflow::noise::{DecaySchedule, NoiseModel};
use mirrorflow::problems::Objective;
use mirrorflow::runner::{read_numeric_csv, write_trajectory_csv};
use mirrorflow::traffic::{cost_eval, enumerate_paths, path_covariance, random_network, Network, PathSet};

fn cases() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn l2(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect()
}

fn boxes() -> impl Strategy<Value = Region> {
    (1usize..=5)
        .prop_flat_map(|n| (vec(-2.0..2.0f64, n), vec(0.1..3.0f64, n)))
        .prop_map(|(lo, w)| {
            let hi = lo.iter().zip(&w).map(|(a, b)| a + b).collect();
            Region::boxed(lo, hi).unwrap()
        })
}

fn simplices() -> impl Strategy<Value = Region> {
    (0.5..3.0f64, 2usize..=6).prop_map(|(m, n)| Region::simplex(m, n).unwrap())
}

fn polytopes() -> impl Strategy<Value = Region> {
    prop_oneof![boxes(), simplices()]
}

fn paired() -> impl Strategy<Value = (Region, Regularizer)> {
    prop_oneof![
        boxes().prop_map(|r| (r, Regularizer::Euclidean)),
        simplices().prop_map(|r| (r, Regularizer::Euclidean)),
        simplices().prop_map(|r| (r, Regularizer::Entropic)),
        (1usize..=3).prop_map(|k| (Region::spectrahedron(k).unwrap(), Regularizer::VonNeumann)),
    ]
}

/// `½(x−μ)ᵀBᵀB(x−μ) + ridge·‖x−μ‖²/2` with `μ` in the unit box.
fn quadratics(n: usize) -> impl Strategy<Value = Objective> {
    (vec(0.05..0.95f64, n), vec(-1.0..1.0f64, n * n), 0.0..1.0f64).prop_map(move |(mu, b, ridge)| {
        let bm = Matrix::from_row_major(n, n, b);
        let mut a = bm.transpose().matmul(&bm);
        for i in 0..n {
            a[(i, i)] += ridge;
        }
        Objective::quadratic(mu, a).unwrap()
    })
}

fn cfg(dt: f64, horizon: f64, y0: Vec<f64>, seed: u64) -> IntegratorConfig {
    let mut c = IntegratorConfig::new(dt, horizon, y0);
    c.seed = seed;
    c
}

fn network(seed: u64) -> (Network, PathSet) {
    let net = random_network(6, 8, seed).unwrap();
    let ps = enumerate_paths(&net, 64).unwrap();
    (net, ps)
}

fn random_flow(rng: &mut ChaCha8Rng, n: usize, demand: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| 0.01 - (1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| demand * v / s).collect()
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn projection_is_idempotent(r in polytopes(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = uniform(&mut rng, r.dim(), 5.0);
        let p = r.euclidean_project(&y).unwrap();
        let pp = r.euclidean_project(&p).unwrap();
        for (a, b) in p.iter().zip(pp.iter()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn projection_is_nonexpansive(r in polytopes(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = uniform(&mut rng, r.dim(), 5.0);
        let z = uniform(&mut rng, r.dim(), 5.0);
        let (py, pz) = (r.euclidean_project(&y).unwrap(), r.euclidean_project(&z).unwrap());
        prop_assert!(l2(&sub(&py, &pz)) <= l2(&sub(&y, &z)) + 1e-12);
    }

    #[test]
    fn cone_generators_point_into_region(r in polytopes(), pick: prop::sample::Index) {
        let verts = r.vertices().unwrap();
        let v = &verts[pick.index(verts.len())];
        for z in r.tangent_cone_generators(v).unwrap() {
            let x: Vec<f64> = v.iter().zip(z.iter()).map(|(a, b)| a + 1e-4 * b).collect();
            prop_assert!(r.contains(&x, 1e-12).unwrap());
        }
    }

    #[test]
    fn box_diameter_is_translation_invariant(r in boxes(), shift in vec(-10.0..10.0f64, 5)) {
        let RegionKind::Box { lower, upper } = r.kind() else { unreachable!() };
        let moved = Region::boxed(
            lower.iter().zip(&shift).map(|(a, s)| a + s).collect(),
            upper.iter().zip(&shift).map(|(a, s)| a + s).collect(),
        ).unwrap();
        // oracle: Euclidean length of the side vector
        let sides: Vec<f64> = upper.iter().zip(lower.iter()).map(|(u, l)| u - l).collect();
        prop_assert!((moved.diameter() - r.diameter()).abs() <= 1e-12 * (1.0 + r.diameter()));
        prop_assert!((r.diameter() - l2(&sides)).abs() <= 1e-12 * (1.0 + r.diameter()));
    }

    #[test]
    fn mirror_map_is_inverse_k_lipschitz((r, reg) in paired(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = reg.strong_convexity(&r).unwrap();
        let y = uniform(&mut rng, r.dim(), 3.0);
        let z = uniform(&mut rng, r.dim(), 3.0);
        let (qy, qz) = (reg.mirror_map(&r, &y).unwrap(), reg.mirror_map(&r, &z).unwrap());
        prop_assert!(r.norm(&sub(&qy, &qz)) <= r.dual_norm(&sub(&y, &z)) / k + 1e-9);
    }

    #[test]
    fn fenchel_coupling_dominates_squared_norm((r, reg) in paired(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = reg.strong_convexity(&r).unwrap();
        let p = r.sample(&mut rng);
        let y = uniform(&mut rng, r.dim(), 3.0);
        let q = reg.mirror_map(&r, &y).unwrap();
        let f = reg.fenchel_coupling(&r, &p, &y).unwrap();
        prop_assert!(f >= 0.5 * k * r.norm(&sub(&q, &p)).powi(2) - 1e-9);
    }

    #[test]
    fn fenchel_coupling_smoothness((r, reg) in paired(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = reg.strong_convexity(&r).unwrap();
        let p = r.sample(&mut rng);
        let y = uniform(&mut rng, r.dim(), 3.0);
        let y2 = uniform(&mut rng, r.dim(), 3.0);
        let q = reg.mirror_map(&r, &y).unwrap();
        let d = sub(&y2, &y);
        let rhs = reg.fenchel_coupling(&r, &p, &y).unwrap()
            + r.inner(&d, &sub(&q, &p))
            + r.dual_norm(&d).powi(2) / (2.0 * k);
        prop_assert!(reg.fenchel_coupling(&r, &p, &y2).unwrap() <= rhs + 1e-9);
    }

    #[test]
    fn fenchel_coupling_dominates_bregman((r, reg) in paired(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = r.sample(&mut rng);
        let y = uniform(&mut rng, r.dim(), 3.0);
        let q = reg.mirror_map(&r, &y).unwrap();
        let f = reg.fenchel_coupling(&r, &p, &y).unwrap();
        let d = reg.bregman_divergence(&r, &p, &q).unwrap();
        prop_assert!(f >= d - 1e-9);
        let interior = match r.kind() {
            RegionKind::Box { lower, upper } => {
                q.iter().zip(lower.iter().zip(upper)).all(|(x, (l, u))| x > l && x < u)
            }
            RegionKind::Simplex { .. } => q.iter().all(|&x| x > 0.0),
            _ => true,
        };
        if interior {
            prop_assert!((f - d).abs() <= 1e-9 * (1.0 + f.abs()));
        }
    }

    #[test]
    fn steep_maps_land_in_relative_interior(r in simplices(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = uniform(&mut rng, r.dim(), 20.0);
        let q = Regularizer::Entropic.mirror_map(&r, &y).unwrap();
        prop_assert!(q.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn euclidean_map_reaches_boundary_points(r in polytopes(), seed: u64, pick: prop::sample::Index) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // a point on a face: convex combination of two vertices
        let verts = r.vertices().unwrap();
        let (a, b) = (&verts[pick.index(verts.len())], &verts[(pick.index(verts.len()) + 1) % verts.len()]);
        let s: f64 = rng.random();
        let p: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| s * x + (1.0 - s) * y).collect();
        let y = Regularizer::Euclidean.gradient(&r, &p).unwrap();
        let q = Regularizer::Euclidean.mirror_map(&r, &y).unwrap();
        prop_assert!(l2(&sub(&q, &p)) <= 1e-9);
    }

    #[test]
    fn coupling_vanishes_along_rays(pair in prop_oneof![
        boxes().prop_map(|r| (r, Regularizer::Euclidean)),
        simplices().prop_map(|r| (r, Regularizer::Entropic)),
    ], seed: u64) {
        let (r, reg) = pair;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // direction with a clear winner so the limit point is a known vertex
        let mut y: Vec<f64> = (0..r.dim()).map(|_| {
            let v = 0.2 + rng.random::<f64>();
            if rng.random() { v } else { -v }
        }).collect();
        let p: Vec<f64> = match r.kind() {
            RegionKind::Box { lower, upper } => y.iter().zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| if *v > 0.0 { *u } else { *l }).collect(),
            RegionKind::Simplex { mass, dim } => {
                let i = rng.random_range(0..*dim);
                y[i] = y.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)) + 0.2;
                (0..*dim).map(|j| if j == i { *mass } else { 0.0 }).collect()
            }
            _ => unreachable!(),
        };
        let f: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|s| {
            let ys: Vec<f64> = y.iter().map(|v| s * v).collect();
            reg.fenchel_coupling(&r, &p, &ys).unwrap()
        }).collect();
        prop_assert!(f[1] <= f[0] + 1e-12 && f[2] <= f[1] + 1e-12, "{f:?}");
        prop_assert!(f[2] <= 1e-9, "{f:?}");
    }

    #[test]
    fn mirror_map_constant_on_polar_cone(r in boxes(), pick: prop::sample::Index, push in vec(0.0..5.0f64, 5), more in vec(0.0..5.0f64, 5)) {
        let verts = r.vertices().unwrap();
        let v = &verts[pick.index(verts.len())];
        let RegionKind::Box { upper, .. } = r.kind() else { unreachable!() };
        // outward normal signs at the vertex
        let sign: Vec<f64> = v.iter().zip(upper).map(|(x, u)| if x == u { 1.0 } else { -1.0 }).collect();
        let y: Vec<f64> = v.iter().zip(&sign).zip(&push).map(|((x, s), p)| x + s * p).collect();
        let y2: Vec<f64> = y.iter().zip(&sign).zip(&more).map(|((x, s), p)| x + s * p).collect();
        let q = Regularizer::Euclidean.mirror_map(&r, &y).unwrap();
        let q2 = Regularizer::Euclidean.mirror_map(&r, &y2).unwrap();
        prop_assert_eq!(&q.0, &v.0);
        prop_assert_eq!(q2.0, q.0);
    }

    #[test]
    fn conjugate_gradient_is_mirror_map(r in polytopes(), reg_pick: bool, seed: u64) {
        let reg = if reg_pick && matches!(r.kind(), RegionKind::Simplex { .. }) {
            Regularizer::Entropic
        } else {
            Regularizer::Euclidean
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = uniform(&mut rng, r.dim(), 3.0);
        let q = reg.mirror_map(&r, &y).unwrap();
        let h = 1e-6;
        for i in 0..r.dim() {
            let (mut a, mut b) = (y.clone(), y.clone());
            a[i] += h;
            b[i] -= h;
            let fd = (reg.conjugate(&r, &a).unwrap() - reg.conjugate(&r, &b).unwrap()) / (2.0 * h);
            prop_assert!((fd - q[i]).abs() <= 1e-5 * (1.0 + q[i].abs()), "i={i} fd={fd} q={}", q[i]);
        }
    }

    #[test]
    fn quadratic_gradient_matches_finite_differences(obj in quadratics(3), x in vec(0.0..1.0f64, 3)) {
        let mut g = vec![0.0; 3];
        obj.value_grad_into(&x, &mut g);
        let h = 1e-5;
        for i in 0..3 {
            let (mut a, mut b) = (x.clone(), x.clone());
            a[i] += h;
            b[i] -= h;
            let fd = (obj.value(&a) - obj.value(&b)) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-6, "i={i} fd={fd} g={}", g[i]);
        }
    }

    #[test]
    fn linear_gradient_is_cost(c in vec(-3.0..3.0f64, 4), off in -2.0..2.0f64, x in vec(0.0..1.0f64, 4)) {
        let obj = Objective::linear(c.clone(), off).unwrap();
        let mut g = vec![0.0; 4];
        let f = obj.value_grad_into(&x, &mut g);
        prop_assert_eq!(g, c.clone());
        prop_assert!((f - dot(&c, &x) - off).abs() <= 1e-12);
    }

    #[test]
    fn quadratic_is_midpoint_convex(obj in quadratics(3), x in vec(0.0..1.0f64, 3), z in vec(0.0..1.0f64, 3)) {
        let m: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 0.5 * (a + b)).collect();
        prop_assert!(obj.value(&m) <= 0.5 * obj.value(&x) + 0.5 * obj.value(&z) + 1e-12);
    }

    #[test]
    fn quadratic_grows_at_least_alpha(obj in quadratics(3), x in vec(0.0..1.0f64, 3)) {
        // center lies in the unit box, so it is the minimizer with f* = 0
        let mirrorflow::problems::ObjectiveKind::Quadratic { center, .. } = obj.kind() else { unreachable!() };
        let d = sub(&x, center);
        prop_assert!(obj.value(&x) >= 0.5 * obj.alpha * dot(&d, &d) - 1e-12);
    }

    #[test]
    fn covariance_is_psd_and_bounded(n in 1usize..=4, m in 1usize..=4, s in vec(-2.0..2.0f64, 16), t in 0.0..100.0f64, decaying: bool) {
        let noise = if decaying {
            NoiseModel::decaying(s[0].abs(), DecaySchedule::InvLog, n).unwrap()
        } else {
            NoiseModel::constant(Matrix::from_row_major(n, m, s[..n * m].to_vec())).unwrap()
        };
        let x = vec![0.5; n];
        let cov = noise.covariance(&x, t);
        prop_assert!(cov.is_symmetric(1e-12));
        let eig = jacobi_eigen(&cov);
        prop_assert!(eig.values.iter().all(|&v| v >= -1e-12));
        prop_assert!(noise.trace_covariance(&x, t) <= noise.sup_bound() * (1.0 + 1e-12) + 1e-15);
        prop_assert!((cov.trace() - noise.trace_covariance(&x, t)).abs() <= 1e-12 * (1.0 + cov.trace()));
    }

    #[test]
    fn log_power_decay_beats_inverse_sqrt_log(q in 0.55..3.0f64) {
        let g = DecaySchedule::LogPower(q);
        let r: Vec<f64> = (2..=6).map(|k| {
            let t = 10f64.powi(k);
            g.factor(t) * t.ln().sqrt()
        }).collect();
        prop_assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
    }

    #[test]
    fn integration_is_deterministic_and_feasible((r, reg) in paired(), seed: u64, sigma in 0.0..1.0f64) {
        let n = r.dim();
        let obj = Objective::linear(vec![1.0; n], 0.0).unwrap();
        let noise = NoiseModel::isotropic(n, sigma).unwrap();
        let c = cfg(1e-2, 1.0, vec![0.0; n], seed);
        let sched = SensitivitySchedule::Constant { eta0: 1.0 };
        let a = integrate_smd(&obj, reg, &r, &noise, sched, &c).unwrap();
        let b = integrate_smd(&obj, reg, &r, &noise, sched, &c).unwrap();
        prop_assert_eq!(&a, &b);
        for x in &a.primal_path {
            prop_assert!(r.contains(x, 1e-9).unwrap());
        }
    }

    #[test]
    fn zero_noise_equals_deterministic_flow(obj in quadratics(2), seed: u64, eta in 0.1..3.0f64) {
        let r = Region::cube(2, 0.0, 1.0).unwrap();
        let c = cfg(1e-2, 1.0, vec![0.0; 2], seed);
        let md = integrate_md(&obj, Regularizer::Euclidean, &r, eta, &c).unwrap();
        let smd = integrate_smd(&obj, Regularizer::Euclidean, &r, &NoiseModel::zero(2),
            SensitivitySchedule::Constant { eta0: eta }, &c).unwrap();
        prop_assert_eq!(md.primal_path, smd.primal_path);
        prop_assert_eq!(md.f_values, smd.f_values);
    }

    #[test]
    fn deterministic_lyapunov_function_decreases(obj in quadratics(2), y0 in vec(-3.0..3.0f64, 2)) {
        let mirrorflow::problems::ObjectiveKind::Quadratic { center, .. } = obj.kind() else { unreachable!() };
        let r = Region::cube(2, 0.0, 1.0).unwrap();
        let mut c = cfg(1e-2, 2.0, y0, 0);
        c.target = Some(mirrorflow::geometry::Primal(center.0.clone()));
        let tr = integrate_md(&obj, Regularizer::Euclidean, &r, 1.0, &c).unwrap();
        let v = tr.fenchel_to_target.unwrap();
        for w in v.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-6, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn entropic_lyapunov_function_decreases(mu in vec(0.05..1.0f64, 3), y0 in vec(-3.0..3.0f64, 3)) {
        let s: f64 = mu.iter().sum();
        let mu: Vec<f64> = mu.iter().map(|v| v / s).collect();
        let obj = Objective::isotropic(mu.clone(), 1.0).unwrap();
        let r = Region::simplex(1.0, 3).unwrap();
        let mut c = cfg(1e-2, 2.0, y0, 0);
        c.target = Some(mirrorflow::geometry::Primal(mu));
        let tr = integrate_md(&obj, Regularizer::Entropic, &r, 1.0, &c).unwrap();
        let v = tr.fenchel_to_target.unwrap();
        for w in v.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-6, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn deterministic_audit_drift_is_nonpositive(obj in quadratics(2), y0 in vec(-3.0..3.0f64, 2)) {
        let mirrorflow::problems::ObjectiveKind::Quadratic { center, .. } = obj.kind() else { unreachable!() };
        let r = Region::cube(2, 0.0, 1.0).unwrap();
        let tr = integrate_md(&obj, Regularizer::Euclidean, &r, 1.0, &cfg(1e-2, 1.0, y0, 0)).unwrap();
        let sched = SensitivitySchedule::Constant { eta0: 1.0 };
        let rep = fenchel_audit(&tr, &obj, Regularizer::Euclidean, &r, center, &sched, None).unwrap();
        prop_assert!(rep.cum_drift.iter().all(|&d| d <= 1e-12));
        prop_assert!(rep.max_drift_rate <= 1e-12);
    }

    #[test]
    fn occupation_and_complement_partition(points in vec(vec(0.0..1.0f64, 2), 2..60), delta in 0.01..1.0f64, burn in 0.0..0.5f64) {
        let n = points.len();
        let times: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let f = vec![0.0; n];
        let tr = Trajectory::from_samples(times.clone(), points.clone(), f);
        let c = [0.5, 0.5];
        if let Ok(inside) = occupation_fraction(&tr, &c, delta, burn) {
            let window: Vec<&Vec<f64>> = times.iter().zip(&points).filter(|(t, _)| **t >= burn).map(|(_, x)| x).collect();
            let outside = window.iter().filter(|x| l2(&sub(x, &c)) > delta).count() as f64 / window.len() as f64;
            prop_assert!((inside + outside - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn hitting_time_monotone_in_radius(points in vec(vec(0.0..1.0f64, 2), 2..60), d1 in 0.01..1.0f64, d2 in 0.01..1.0f64) {
        let n = points.len();
        let times: Vec<f64> = (0..n).map(|k| k as f64).collect();
        let tr = Trajectory::from_samples(times, points, vec![0.0; n]);
        let (big, small) = if d1 >= d2 { (d1, d2) } else { (d2, d1) };
        let c = [0.5, 0.5];
        if let (Some(a), Some(b)) = (hitting_time(&tr, &c, big), hitting_time(&tr, &c, small)) {
            prop_assert!(a <= b);
        }
        if hitting_time(&tr, &c, small).is_some() {
            prop_assert!(hitting_time(&tr, &c, big).is_some());
        }
    }

    #[test]
    fn rate_fit_ignores_gap_scale(slope in -2.0..0.0f64, noise in vec(-0.3..0.3f64, 40), scale in 1e-6..1e6f64) {
        let times: Vec<f64> = (0..40).map(|k| 10f64.powf(1.0 + k as f64 / 13.0)).collect();
        let gaps: Vec<f64> = times.iter().zip(&noise).map(|(t, e)| t.powf(slope) * e.exp()).collect();
        let scaled: Vec<f64> = gaps.iter().map(|g| scale * g).collect();
        let a = rate_fit(&times, &gaps, (1.0, 1e5)).unwrap();
        let b = rate_fit(&times, &scaled, (1.0, 1e5)).unwrap();
        prop_assert!((a.slope - b.slope).abs() <= 1e-12);
    }

    #[test]
    fn traffic_marginal_cost_is_gradient(seed in 0u64..200, flow_seed: u64) {
        let (net, ps) = network(seed);
        prop_assume!(ps.len() >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(flow_seed);
        let x = random_flow(&mut rng, ps.len(), net.demand);
        let ev = cost_eval(&net, &ps, &x).unwrap();
        let (i, j) = (rng.random_range(0..ps.len()), rng.random_range(0..ps.len()));
        prop_assume!(i != j);
        let h = 1e-4 * x[j].min(x[i]);
        let (mut a, mut b) = (x.clone(), x.clone());
        a[i] += h; a[j] -= h;
        b[i] -= h; b[j] += h;
        let fd = (cost_eval(&net, &ps, &a).unwrap().total - cost_eval(&net, &ps, &b).unwrap().total) / (2.0 * h);
        prop_assert!((fd - (ev.marginal[i] - ev.marginal[j])).abs() <= 1e-6, "fd {fd}");
    }

    #[test]
    fn traffic_cost_is_convex(seed in 0u64..200, flow_seed: u64) {
        let (net, ps) = network(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(flow_seed);
        let x = random_flow(&mut rng, ps.len(), net.demand);
        let z = random_flow(&mut rng, ps.len(), net.demand);
        let m: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 0.5 * (a + b)).collect();
        let c = |v: &[f64]| cost_eval(&net, &ps, v).unwrap().total;
        prop_assert!(c(&m) <= 0.5 * c(&x) + 0.5 * c(&z) + 1e-12);
    }

    #[test]
    fn path_covariance_matches_overlap_formula(seed in 0u64..200, sig in vec(0.0..1.0f64, 13)) {
        let (net, ps) = network(seed);
        let sigma = &sig[..net.edges.len()];
        let cov = path_covariance(&net, &ps, sigma).unwrap();
        let sets: Vec<HashSet<usize>> = ps.paths.iter().map(|p| p.iter().copied().collect()).collect();
        for (i, p) in sets.iter().enumerate() {
            for (j, q) in sets.iter().enumerate() {
                let want: f64 = p.intersection(q).map(|&e| sigma[e] * sigma[e]).sum();
                prop_assert!((cov[(i, j)] - want).abs() <= 1e-12);
            }
        }
        let trace: f64 = ps.paths.iter().map(|p| p.iter().map(|&e| sigma[e] * sigma[e]).sum::<f64>()).sum();
        prop_assert!((cov.trace() - trace).abs() <= 1e-12);
        prop_assert!(jacobi_eigen(&cov).values.iter().all(|&v| v >= -1e-12));
    }

    #[test]
    fn edge_loads_conserve_path_flow(seed in 0u64..200, flow_seed: u64) {
        let (net, ps) = network(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(flow_seed);
        let x = random_flow(&mut rng, ps.len(), net.demand);
        let ev = cost_eval(&net, &ps, &x).unwrap();
        let weighted: f64 = ps.paths.iter().zip(&x).map(|(p, f)| f * p.len() as f64).sum();
        prop_assert!((ev.loads.iter().sum::<f64>() - weighted).abs() <= 1e-12 * (1.0 + weighted));
    }

    #[test]
    fn trajectory_csv_round_trips(values in vec(vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 3), 1..20)) {
        let n = values.len();
        let times: Vec<f64> = (0..n).map(|k| k as f64 * 0.1).collect();
        let primal: Vec<Vec<f64>> = values.iter().map(|v| v[..2].to_vec()).collect();
        let f: Vec<f64> = values.iter().map(|v| v[2]).collect();
        let tr = Trajectory::from_samples(times.clone(), primal.clone(), f.clone());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_trajectory_csv(std::fs::File::create(&path).unwrap(), &tr).unwrap();
        let (header, rows) = read_numeric_csv(&path).unwrap();
        prop_assert_eq!(header, vec!["t", "x_1", "x_2", "f", "f_avg", "f_best", "fenchel"]);
        for (k, row) in rows.iter().enumerate() {
            prop_assert_eq!(row[0].to_bits(), times[k].to_bits());
            prop_assert_eq!(row[1].to_bits(), primal[k][0].to_bits());
            prop_assert_eq!(row[2].to_bits(), primal[k][1].to_bits());
            prop_assert_eq!(row[3].to_bits(), f[k].to_bits());
            prop_assert!(row[6].is_nan());
        }
    }

    #[test]
    fn config_echo_round_trips(center in vec(-1.0..2.0f64, 2), sigma in 0.0..2.0f64, dt in 1e-4..1e-1f64, beta in 0.05..0.95f64, seed: u64) {
        let text = format!(
            "problem.kind = quadratic\nproblem.center = {}, {}\nregion.kind = box\nregion.lower = 0, 0\n\
             region.upper = 1, 1\nmirror.kind = euclidean\nnoise.kind = isotropic\nnoise.sigma = {sigma}\n\
             schedule.kind = power_law\nschedule.beta = {beta}\nintegrator.dt = {dt}\nintegrator.horizon = 10\n\
             ensemble.seed = {seed}\n",
            center[0], center[1]
        );
        let c = ExperimentConfig::parse(&text, Path::new(".")).unwrap();
        let echo = c.to_text(&[("K", 1.0)]);
        let back = ExperimentConfig::parse(&echo, Path::new(".")).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_text(&[("K", 1.0)]), echo);
    }
}

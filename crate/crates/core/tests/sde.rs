//! Statistical checks of the stochastic integrators against closed forms.

use mirrorflow::diagnostics::fenchel_audit;
use mirrorflow::dynamics::{hr1d_from_increments, run_ensemble, Dynamics, IntegratorConfig, SensitivitySchedule};
use mirrorflow::geometry::{Primal, Region};
use mirrorflow::linalg::Matrix;
use mirrorflow::mirror::Regularizer;
use mirrorflow::noise::NoiseModel;
use mirrorflow::problems::Objective;
use mirrorflow::rng::GaussianStream;

const SEED: u64 = 20170301;

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

fn config(dt: f64, horizon: f64, y0: Vec<f64>) -> IntegratorConfig {
    let mut c = IntegratorConfig::new(dt, horizon, y0);
    c.seed = SEED;
    c
}

#[test]
fn ornstein_uhlenbeck_reaches_stationary_variance() {
    // far-away walls: x = y, so the dual is an OU process around μ
    let (alpha, sigma, mu) = (2.0, 0.8, 0.3);
    let region = Region::boxed(vec![-50.0], vec![50.0]).unwrap();
    let obj = Objective::isotropic(vec![mu], alpha).unwrap();
    let noise = NoiseModel::isotropic(1, sigma).unwrap();
    let dynamics = Dynamics {
        obj: &obj,
        reg: Regularizer::Euclidean,
        region: &region,
        noise: Some(&noise),
        sched: SensitivitySchedule::Constant { eta0: 1.0 },
    };
    let mut cfg = config(1e-3, 5.0, vec![mu]);
    cfg.log_stride = 5000;
    let paths = run_ensemble(&dynamics, &cfg, 2000).unwrap();
    let ends: Vec<f64> = paths.iter().map(|p| p.final_primal()[0]).collect();
    let (m, se) = mean_se(&ends);
    assert!((m - mu).abs() < 3.0 * se, "mean {m} vs {mu} (se {se})");

    let sq: Vec<f64> = ends.iter().map(|x| (x - mu).powi(2)).collect();
    let (v, se) = mean_se(&sq);
    // exact variance of the Euler chain: σ²dt / (1 − (1 − αdt)²)
    let want = sigma * sigma * 1e-3 / (1.0 - (1.0 - alpha * 1e-3f64).powi(2));
    assert!((v - want).abs() < 3.0 * se, "variance {v} vs {want} (se {se})");
    assert!((want - sigma * sigma / (2.0 * alpha)).abs() < alpha * 1e-3 * want);
}

#[test]
fn linear_problem_dual_drifts_at_minus_cost() {
    let cost = vec![0.5, 1.0, 2.0];
    let (sigma, horizon) = (0.7, 20.0);
    let region = Region::simplex(1.0, 3).unwrap();
    let obj = Objective::linear(cost.clone(), 0.0).unwrap();
    let noise = NoiseModel::isotropic(3, sigma).unwrap();
    let dynamics = Dynamics {
        obj: &obj,
        reg: Regularizer::Entropic,
        region: &region,
        noise: Some(&noise),
        sched: SensitivitySchedule::Constant { eta0: 1.0 },
    };
    let mut cfg = config(1e-2, horizon, vec![0.0; 3]);
    cfg.log_stride = 100;
    let paths = run_ensemble(&dynamics, &cfg, 400).unwrap();
    for (i, c) in cost.iter().enumerate() {
        let slopes: Vec<f64> = paths.iter().map(|p| p.dual_path.last().unwrap()[i] / horizon).collect();
        let (m, se) = mean_se(&slopes);
        assert!(
            (m + c).abs() < 3.0 * se,
            "coordinate {i}: slope {m} vs {} (se {se})",
            -c
        );
        assert!((se - sigma / (horizon * 400.0).sqrt()).abs() < 0.1 * se);
    }
    // the cheapest vertex wins on average
    let x_end: f64 = paths.iter().map(|p| p.final_primal()[0]).sum::<f64>() / 400.0;
    assert!(x_end > 0.95, "{x_end}");
}

#[test]
fn quadratic_covariation_matches_integrated_covariance() {
    // zero drift, so dual increments are exactly the noise increments
    let s = Matrix::from_rows(&[vec![0.6, 0.0, 0.2], vec![0.3, 0.4, 0.0]]);
    let noise = NoiseModel::constant(s.clone()).unwrap();
    let region = Region::boxed(vec![-1e3; 2], vec![1e3; 2]).unwrap();
    let obj = Objective::linear(vec![0.0; 2], 0.0).unwrap();
    let dynamics = Dynamics {
        obj: &obj,
        reg: Regularizer::Euclidean,
        region: &region,
        noise: Some(&noise),
        sched: SensitivitySchedule::Constant { eta0: 1.0 },
    };
    let horizon = 20.0;
    let cfg = config(1e-3, horizon, vec![0.0; 2]);
    let tr = run_ensemble(&dynamics, &cfg, 1).unwrap().remove(0);
    let mut qv = [[0.0; 2]; 2];
    for w in tr.dual_path.windows(2) {
        let d = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
        for a in 0..2 {
            for b in 0..2 {
                qv[a][b] += d[a] * d[b];
            }
        }
    }
    // ΣΣᵀ by hand
    let rows = [[0.6, 0.0, 0.2], [0.3, 0.4, 0.0]];
    let n = horizon / 1e-3;
    for a in 0..2 {
        for b in 0..2 {
            let cov: f64 = (0..3).map(|k| rows[a][k] * rows[b][k]).sum();
            let want = cov * horizon;
            // sd of a sum of n products of Gaussians with variance dt
            let sd = ((rows[a].iter().map(|v| v * v).sum::<f64>() * rows[b].iter().map(|v| v * v).sum::<f64>()
                + cov * cov)
                / n)
                .sqrt()
                * horizon;
            assert!(
                (qv[a][b] - want).abs() < 4.0 * sd,
                "[{a}][{b}] {} vs {want} (sd {sd})",
                qv[a][b]
            );
        }
    }
}

#[test]
fn audit_residual_is_centred() {
    let region = Region::cube(2, 0.0, 1.0).unwrap();
    let target = vec![0.5, 0.5];
    let obj = Objective::isotropic(target.clone(), 1.0).unwrap();
    let noise = NoiseModel::isotropic(2, 0.3).unwrap();
    let sched = SensitivitySchedule::Constant { eta0: 1.0 };
    let dynamics = Dynamics {
        obj: &obj,
        reg: Regularizer::Euclidean,
        region: &region,
        noise: Some(&noise),
        sched,
    };
    let mut cfg = config(1e-3, 5.0, vec![0.0; 2]);
    cfg.target = Some(Primal(target.clone()));
    let paths = run_ensemble(&dynamics, &cfg, 200).unwrap();
    let residuals: Vec<f64> = paths
        .iter()
        .map(|p| {
            fenchel_audit(p, &obj, Regularizer::Euclidean, &region, &target, &sched, Some(&noise))
                .unwrap()
                .final_cum_residual()
        })
        .collect();
    let (m, se) = mean_se(&residuals);
    assert!(m.abs() < 3.0 * se.max(1e-12), "residual mean {m} (se {se})");
}

#[test]
fn strong_order_of_the_one_dimensional_pair() {
    let (sigma, x0, horizon, refine, paths) = (0.5, 0.4, 1.0, 16, 400u64);
    let steps = [16usize, 32, 64, 128, 256];
    let mut err = vec![[0.0f64; 3]; steps.len()];
    for path in 0..paths {
        let fine_n = steps.last().unwrap() * refine;
        let fine_dt = horizon / fine_n as f64;
        let mut fine = vec![0.0; fine_n];
        GaussianStream::new(SEED, path, fine_n).fill_next(&mut fine);
        fine.iter_mut().for_each(|v| *v *= fine_dt.sqrt());
        for (k, &n) in steps.iter().enumerate() {
            // reference on a grid `refine` times finer, built from the same Brownian path
            let chunk = fine_n / (n * refine);
            let w_ref: Vec<f64> = fine.chunks(chunk).map(|c| c.iter().sum()).collect();
            let w: Vec<f64> = w_ref.chunks(refine).map(|c| c.iter().sum()).collect();
            let coarse = hr1d_from_increments(sigma, x0, horizon / n as f64, &w);
            let exact = hr1d_from_increments(sigma, x0, horizon / (n * refine) as f64, &w_ref);
            err[k][0] += (coarse.smd - exact.smd).abs() / paths as f64;
            err[k][1] += (coarse.shd - exact.shd).abs() / paths as f64;
            err[k][2] = err[k][2].max((coarse.smd_dual - exact.smd_dual).abs());
        }
    }
    let slope = |j: usize| {
        let xs: Vec<f64> = steps.iter().map(|&n| (horizon / n as f64).ln()).collect();
        let ys: Vec<f64> = err.iter().map(|e| e[j].ln()).collect();
        let (mx, my) = (
            xs.iter().sum::<f64>() / xs.len() as f64,
            ys.iter().sum::<f64>() / ys.len() as f64,
        );
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    };
    // multiplicative noise in the primal forms: Euler–Maruyama is order ½ there
    for (j, name) in [(0, "smd"), (1, "shd")] {
        let p = slope(j);
        assert!((0.35..0.75).contains(&p), "{name} strong order {p}, errors {err:?}");
    }
    // additive noise in the dual: the update is exact
    for e in &err {
        assert!(e[2] < 1e-12, "dual error {}", e[2]);
    }
}

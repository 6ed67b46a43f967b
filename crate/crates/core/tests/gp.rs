use std::time::Instant;

use emitter_core::gp::{bo_loop, expected_improvement, BoConfig, FnObjective, GpModel, HyperGrid, Kernel};
use emitter_core::rng;
use proptest::prelude::*;
use rand::Rng;

fn points(dim: usize, n: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0..5.0f64, dim), n)
}

fn separated(xs: &[Vec<f64>], min: f64) -> bool {
    xs.iter().enumerate().all(|(i, a)| {
        xs[..i].iter().all(|b| a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt() >= min)
    })
}

proptest! {
    #[test]
    fn posterior_variance_is_never_negative(
        xs in points(2, 1..30),
        ys in prop::collection::vec(-2.0..2.0f64, 30),
        queries in points(2, 20),
        length in 0.1..5.0f64,
    ) {
        let gp = GpModel::fit(&xs, &ys[..xs.len()], Kernel::new(length, 1.0, 1e-6).unwrap()).unwrap();
        for q in queries.iter().chain(&xs) {
            let (mean, var) = gp.posterior(q);
            prop_assert!(mean.is_finite() && var >= 0.0, "{mean} {var}");
        }
    }

    #[test]
    fn nearly_noiseless_fits_interpolate(
        xs in points(2, 1..15),
        ys in prop::collection::vec(-2.0..2.0f64, 15),
    ) {
        prop_assume!(separated(&xs, 0.5));
        let ys = &ys[..xs.len()];
        let gp = GpModel::fit(&xs, ys, Kernel::new(1.0, 1.0, 1e-10).unwrap()).unwrap();
        for (x, y) in xs.iter().zip(ys) {
            prop_assert!((gp.posterior_mean(x) - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn expected_improvement_is_non_negative(
        mean in -10.0..10.0f64,
        sd in 0.0..5.0f64,
        best in -10.0..10.0f64,
        xi in 0.0..1.0f64,
    ) {
        prop_assert!(expected_improvement(mean, sd, best, xi) >= 0.0);
    }

    #[test]
    fn no_improvement_at_the_incumbent(
        xs in points(2, 2..12),
        ys in prop::collection::vec(-2.0..2.0f64, 12),
    ) {
        prop_assume!(separated(&xs, 0.5));
        let ys = &ys[..xs.len()];
        let gp = GpModel::fit(&xs, ys, Kernel::new(1.0, 1.0, 0.0).unwrap()).unwrap();
        let (i, best) = ys.iter().copied().enumerate().fold((0, f64::MIN), |a, (i, y)| if y > a.1 { (i, y) } else { a });
        let (mean, var) = gp.posterior(&xs[i]);
        prop_assert!(expected_improvement(mean, var.sqrt(), best, 0.0) <= 1e-10);
    }
}

#[test]
fn fit_and_queries_at_full_budget_are_fast() {
    let mut r = rng::stream(4, 0);
    let xs: Vec<Vec<f64>> = (0..2000).map(|_| vec![r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)]).collect();
    let ys: Vec<f64> = xs.iter().map(|x| (x[0] * 0.7).sin() * (x[1] * 0.3).cos()).collect();
    let queries: Vec<Vec<f64>> = (0..2000).map(|_| vec![r.random_range(-10.0..10.0), r.random_range(-10.0..10.0)]).collect();
    let start = Instant::now();
    let gp = GpModel::fit_select(&xs, &ys, &HyperGrid::log_spaced(0.1, 10.0, 4, 1e-6)).unwrap();
    let total: f64 = queries.iter().map(|q| gp.posterior(q).1).sum();
    let elapsed = start.elapsed();
    assert!(total.is_finite());
    assert!(elapsed.as_secs_f64() < 60.0, "{elapsed:?}");
}

#[test]
fn fixed_seed_loops_repeat_bitwise() {
    let run = || {
        let mut config = BoConfig::symmetric(2, 3.0);
        config.n_init = 8;
        config.eval_budget = 30;
        config.pool_size = 256;
        config.seed = 9;
        let mut objective = FnObjective(|x: &[f64]| -(x[0] - 1.0).powi(2) - (x[1] + 0.5).powi(2));
        bo_loop(&mut objective, &config).unwrap()
    };
    assert_eq!(run(), run());
}

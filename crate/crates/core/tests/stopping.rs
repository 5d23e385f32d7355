//! Threshold policy, first-passage ensembles and the inverse Gaussian.

use stopwait_core::estimate::{fit_inverse_gaussian, ks_distance, InverseGaussianParams};
use stopwait_core::threshold::{
    brownian_passage_ensemble, first_passage_ensemble, solve_value_function, BrownianSpec, GridSpec, StepDistribution,
};

#[test]
fn value_function_is_a_bellman_fixed_point() {
    let step = StepDistribution::Normal { mean: -0.3, sd: 0.8 };
    let sol = solve_value_function(&step, 0.8, GridSpec::new(-8.0, 40.0, 961), 1e-12).unwrap();
    for (i, &x) in sol.grid.iter().enumerate() {
        let rhs = x + sol.continuation[i].max(0.0);
        assert!((sol.values[i] - rhs).abs() < 1e-9, "x={x}");
    }
    assert!(sol.should_stop(sol.x_star - 1e-9));
    assert!(!sol.should_stop(sol.x_star + 0.1));
    // below the threshold stopping is optimal, so V is the identity there
    for (&x, &v) in sol.grid.iter().zip(&sol.values) {
        if x < sol.x_star - sol.spacing() {
            assert_eq!(v, x);
        }
    }
}

#[test]
fn sharper_discounting_raises_the_threshold() {
    let step = StepDistribution::Discrete(vec![(-1.0, 0.6), (0.5, 0.4)]);
    let grid = GridSpec::new(-10.0, 60.0, 1_401);
    let low = solve_value_function(&step, 0.6, grid, 1e-11).unwrap();
    let high = solve_value_function(&step, 0.95, grid, 1e-11).unwrap();
    assert!(low.x_star > high.x_star, "{} vs {}", low.x_star, high.x_star);
}

#[test]
fn walk_ensembles_are_order_independent() {
    let step = StepDistribution::Normal { mean: -0.5, sd: 1.0 };
    let all = first_passage_ensemble(3.0, 0.0, &step, 17, 10_000, 64).unwrap();
    let head = first_passage_ensemble(3.0, 0.0, &step, 17, 10_000, 16).unwrap();
    assert_eq!(&all[..16], &head[..]);
}

#[test]
fn brownian_times_fit_back_to_target() {
    let target = InverseGaussianParams::new(2.0, 4.0).unwrap();
    let spec = BrownianSpec::for_inverse_gaussian(&target, 0.7);
    let times: Vec<f64> = brownian_passage_ensemble(spec, 1e-3, 8_000, 5, 200.0)
        .unwrap()
        .into_iter()
        .map(|p| p.time)
        .collect();
    let fit = fit_inverse_gaussian(&times).unwrap();
    assert!((fit.mu - 2.0).abs() / 2.0 < 0.03, "{fit:?}");
    assert!((fit.lambda - 4.0).abs() / 4.0 < 0.08, "{fit:?}");
    assert!(ks_distance(&times, |x| target.cdf(x).unwrap()) < 0.025);
}

#[test]
fn cdf_is_the_integral_of_the_pdf() {
    let p = InverseGaussianParams::new(6.1, 5.8).unwrap();
    let mut acc = 0.0;
    let h = 1e-3;
    let mut x = 0.0;
    for target in [1.0, 3.0, 6.1, 15.0, 40.0] {
        while x + h <= target + 1e-12 {
            // Simpson on each cell
            let f = |t: f64| if t <= 0.0 { 0.0 } else { p.pdf(t).unwrap() };
            acc += h / 6.0 * (f(x) + 4.0 * f(x + h / 2.0) + f(x + h));
            x += h;
        }
        assert!((acc - p.cdf(target).unwrap()).abs() < 1e-8, "x={target}");
    }
}

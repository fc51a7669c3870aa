use degenlab_core::bumps::Bump;
use degenlab_core::corpus::{
    corpus_stats, CORPUS_SEED, CORPUS_SIZE, FROZEN_DYADIC_CONSTANT as DYADIC_C,
    FROZEN_INTERPOLATION_CONSTANT as INTERPOLATION_C,
};
use degenlab_core::elliptic::{residual, solve_explicit, support_grid};
use degenlab_core::grid::{GridFunction, LogGrid};
use degenlab_core::indicial::EllipticOp1D;
use degenlab_core::spaces::*;

#[test]
fn corpus_constants_are_frozen() {
    let s = corpus_stats(CORPUS_SEED, CORPUS_SIZE, &NormParams::new(2.0, 0.0).unwrap()).unwrap();
    assert_eq!(s.dyadic_ratios.len(), CORPUS_SIZE);
    for r in s.dyadic_ratios.iter().flatten() {
        assert!(*r >= 1.0 / DYADIC_C * (1.0 - 1e-9) && *r <= DYADIC_C * (1.0 + 1e-9), "{r}");
    }
    for r in &s.interpolation {
        assert!(*r <= INTERPOLATION_C * (1.0 + 1e-9), "{r}");
    }
    assert!((s.dyadic_constant() / DYADIC_C - 1.0).abs() < 1e-9);
    assert!((s.interpolation_constant() / INTERPOLATION_C - 1.0).abs() < 1e-9);
}

#[test]
fn dyadic_norm_of_order_zero_is_within_covering_bounds() {
    // Window weights e^{mθ+σ} differ from e^{θs} by e^{σ(1-θ)}, |σ| < 1.
    let zeta = DyadicCutoff::<f64>::new(2.0);
    let max_cover = (0..=1000).map(|k| zeta.covering_sum(k as f64 / 1000.0)).fold(0.0, f64::max);
    let s = corpus_stats(CORPUS_SEED, 5, &NormParams::new(2.0, 0.0).unwrap()).unwrap();
    let e = std::f64::consts::E;
    for r in &s.dyadic_ratios {
        assert!(r[0] >= (1.05 / e).sqrt() && r[0] <= (max_cover * e).sqrt(), "{}", r[0]);
    }
}

#[test]
fn dyadic_norm_log_shift() {
    let grid = LogGrid::new(-14.0, 14.0, 1120).unwrap();
    let zeta = DyadicCutoff::new(2.0);
    for theta in [-0.5, 0.0, 0.7] {
        let params = NormParams::new(2.0, theta).unwrap();
        let u = GridFunction::sample(grid, |x: f64| (-(x.ln() - 0.3).powi(2)).exp()).unwrap();
        let v = GridFunction::sample(grid, |x: f64| (-(x.ln() + 0.7).powi(2)).exp()).unwrap();
        let ratio = dyadic_norm(&v, 2, &params, &zeta).unwrap() / dyadic_norm(&u, 2, &params, &zeta).unwrap();
        assert!((ratio / (-theta / 2.0f64).exp() - 1.0).abs() < 1e-6, "theta={theta}: {ratio}");
    }
}

fn gaussian_moment(n_cells: usize, theta: f64) -> f64 {
    let grid = LogGrid::new(-10.0, 10.0, n_cells).unwrap();
    let u = GridFunction::sample(grid, |x: f64| (-(x.ln()).powi(2)).exp()).unwrap();
    weighted_lp_norm(&u, &NormParams::new(1.0, theta).unwrap()).unwrap()
}

#[test]
fn quadrature_fourth_order_on_gaussian() {
    for theta in [0.0, 1.0, -2.0] {
        let exact = std::f64::consts::PI.sqrt() * (theta * theta / 4.0f64).exp();
        let errs: Vec<f64> = [25, 50, 100].iter().map(|&n| (gaussian_moment(n, theta) - exact).abs()).collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 3.5, "theta={theta}: {errs:?}");
        }
        let fine = gaussian_moment(2000, theta);
        assert!((fine / exact - 1.0).abs() < 1e-8, "{fine} {exact}");
    }
}

#[test]
fn second_derivative_identity() {
    // x²u'' = v_ss - v_s for v(s) = u(e^s); u = x² e^{-x} checked pointwise.
    let grid = LogGrid::new(-3.0, 2.0, 2000).unwrap();
    let u = GridFunction::sample(grid, |x: f64| x * x * (-x).exp()).unwrap();
    let d = log_derivatives(&u).unwrap();
    for i in 0..grid.n_s() {
        let x = grid.x_node(i);
        let exact = x * x * (2.0 - 4.0 * x + x * x) * (-x).exp();
        let xd = x * (2.0 * x - x * x) * (-x).exp();
        assert!((d.vss[i] - d.vs[i] - exact).abs() < 1e-8, "x={x}");
        assert!((d.vs[i] - xd).abs() < 1e-8, "x={x}");
    }
}

#[test]
fn muckenhoupt_power_weights() {
    let w = AqWindow { t_max: 100.0, r_min: 1e-3, r_max: 100.0, samples: 6 };
    assert!(TimeWeight::Power(0.5).in_aq(2.0));
    assert!(!TimeWeight::Power(1.5).in_aq(2.0));
    let c: f64 = muckenhoupt_constant(TimeWeight::Power(-0.5), 2.0, w).unwrap();
    assert!(c.is_finite() && c >= 1.0);
}

#[test]
fn f32_pipeline() {
    let grid = LogGrid::<f32>::new(-10.0, 10.0, 400).unwrap();
    let u = GridFunction::sample(grid, |x: f32| (-(x.ln()).powi(2)).exp()).unwrap();
    let n = weighted_lp_norm(&u, &NormParams::new(1.0f32, 0.0).unwrap()).unwrap();
    assert!((n - std::f32::consts::PI.sqrt()).abs() < 1e-4);

    let op = EllipticOp1D::<f32>::constant(1.0, -1.0, 4.0).unwrap();
    let b = Bump::<f32>::on_interval(1.0, 2.0);
    let (lo, hi) = b.support();
    let grid = support_grid(lo, hi, 3.0, 4e-3).unwrap();
    let f = GridFunction::sample(grid, |x| b.eval_x(x)).unwrap();
    let params = NormParams::new(2.0f32, 0.0).unwrap();
    let sol = solve_explicit(&op, &f, &params).unwrap();
    assert!(residual(&op, &sol.values, &f, &params).unwrap() < 1e-3);
}

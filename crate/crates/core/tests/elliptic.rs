use degenlab_core::bumps::{random_bumps, Bump};
use degenlab_core::elliptic::*;
use degenlab_core::grid::{GridFunction, LogGrid};
use degenlab_core::indicial::{conjugate_operator, EllipticOp1D, Regime};
use degenlab_core::spaces::{truncated_lp_norm, weighted_lp_norm, NormParams};

fn sample(grid: LogGrid<f64>, b: &Bump<f64>) -> GridFunction<f64> {
    GridFunction::sample(grid, |x| b.eval_x(x)).unwrap()
}

fn diff(a: &GridFunction<f64>, b: &GridFunction<f64>) -> GridFunction<f64> {
    GridFunction::new(a.grid, a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect()).unwrap()
}

/// Four-point Lagrange interpolation in `s`.
fn interp(u: &GridFunction<f64>, s: f64) -> f64 {
    let g = u.grid;
    let t = (s - g.s_min()) / g.h();
    let i = (t.floor() as isize - 1).clamp(0, g.n_cells() as isize - 3) as usize;
    let mut acc = 0.0;
    for j in 0..4 {
        let mut w = 1.0;
        for k in 0..4 {
            if k != j {
                w *= (t - (i + k) as f64) / (j as f64 - k as f64);
            }
        }
        acc += w * u.values[i + j];
    }
    acc
}

#[test]
fn explicit_residual_random_corpus_all_regimes() {
    let bumps = random_bumps(42, 20);
    for c in [1.0, 4.0] {
        let op = EllipticOp1D::constant(1.0, -1.0, c).unwrap();
        let roots = op.roots().unwrap();
        let edge = 2.0 * roots.beta;
        for theta in [0.0, edge + 2.0, -edge - 2.0] {
            let params = NormParams::new(2.0, theta).unwrap();
            for b in &bumps {
                let (lo, hi) = b.support();
                let grid = decay_grid(&roots, 2.0, theta, lo, hi, 5e-4, 1e-8).unwrap();
                let f = sample(grid, b);
                let sol = solve_explicit(&op, &f, &params).unwrap();
                let r = residual(&op, &sol.values, &f, &params).unwrap();
                assert!(r < 1e-8, "c={c} theta={theta} {b:?}: {r}");
            }
        }
    }
}

#[test]
fn wrong_branch_diverges_under_extension() {
    let op = EllipticOp1D::<f64>::constant(1.0, -1.0, 4.0).unwrap();
    let params = NormParams::new(2.0, 6.0).unwrap();
    let b = Bump::on_interval(1.0, 2.0);
    let (lo, hi) = b.support();
    let norm = |branch: Regime, ext: f64| {
        let f = sample(support_grid(lo, hi, ext, 0.01).unwrap(), &b);
        truncated_lp_norm(&solve_branch(&op, &f, branch).unwrap().values, &params).unwrap()
    };
    let good = norm(Regime::AboveRange, 10.0) / norm(Regime::AboveRange, 5.0);
    let bad = norm(Regime::BelowRange, 10.0) / norm(Regime::BelowRange, 5.0);
    assert!((good - 1.0).abs() < 1e-3, "{good}");
    assert!(bad > 1e3, "{bad}");
}

#[test]
fn fd_agrees_with_explicit_on_fine_grid() {
    let op = EllipticOp1D::<f64>::constant(1.0, -1.0, 4.0).unwrap();
    let params = NormParams::new(2.0, 0.0).unwrap();
    let b = Bump::on_interval(1.0, 2.0);
    let grid = LogGrid::new(-0.05, 2f64.ln() + 0.05, 4096).unwrap();
    let f = sample(grid, &b);
    let ue = solve_explicit(&op, &f, &params).unwrap().values;
    let uf = solve_fd(&op, &f).unwrap();
    let e = truncated_lp_norm(&diff(&ue, &uf), &params).unwrap();
    assert!(e <= 1e-6, "{e}");
}

fn manufactured_error(n: usize) -> f64 {
    let op = EllipticOp1D::<f64>::constant(1.0, -1.0, 4.0).unwrap();
    let grid = LogGrid::new(-8.0, 8.0, n).unwrap();
    // u* = e^{-s²}, ℒu* = -u*_ss + 4u* = (6 - 4s²) u*.
    let f = GridFunction::sample(grid, |x: f64| {
        let s = x.ln();
        (6.0 - 4.0 * s * s) * (-s * s).exp()
    })
    .unwrap();
    let exact = GridFunction::sample(grid, |x: f64| (-(x.ln()).powi(2)).exp()).unwrap();
    let u = solve_fd(&op, &f).unwrap();
    truncated_lp_norm(&diff(&u, &exact), &NormParams::new(2.0, 0.0).unwrap()).unwrap()
}

#[test]
fn fd_second_order_convergence() {
    let errs: Vec<f64> = [200, 400, 800, 1600].iter().map(|&n| manufactured_error(n)).collect();
    for w in errs.windows(2) {
        assert!(w[0] / w[1] >= 3.5, "{errs:?}");
    }
}

#[test]
fn dilation_equivariance() {
    let op = EllipticOp1D::<f64>::constant(1.0, -1.0, 4.0).unwrap();
    let params = NormParams::new(2.0, 0.0).unwrap();
    let b = Bump::on_interval(1.0, 2.0);
    let r = 1.7f64;
    let br = b.shifted(r.ln());
    let u = solve_explicit(&op, &sample(LogGrid::with_spacing(-4.0, 4.5, 5e-4).unwrap(), &b), &params).unwrap().values;
    let grid_r = LogGrid::with_spacing(-3.3, 5.1, 7e-4).unwrap();
    let ur = solve_explicit(&op, &sample(grid_r, &br), &params).unwrap().values;
    let mut worst: f64 = 0.0;
    for i in 0..grid_r.n_s() {
        let s = grid_r.s_node(i) - r.ln();
        if s > u.grid.s_min() + 0.01 && s < u.grid.s_max() - 0.01 {
            worst = worst.max((ur.values[i] - interp(&u, s)).abs());
        }
    }
    assert!(worst <= 1e-6 * u.max_abs(), "{worst}");
}

#[test]
fn conjugation_reproduces_solution() {
    let op = EllipticOp1D::<f64>::constant(1.0, -1.0, 4.0).unwrap();
    let alpha = op.roots().unwrap().alpha;
    let conj = conjugate_operator(&op, alpha).unwrap();
    assert!(conj.constants().unwrap().2.abs() < 1e-12);
    let b = Bump::on_interval(1.0, 2.0);
    let grid = support_grid(0.0, 2f64.ln(), 3.0, 5e-4).unwrap();
    let f = sample(grid, &b);
    let fa = GridFunction::sample(grid, |x| x.powf(alpha) * b.eval_x(x)).unwrap();
    let u = solve_branch(&op, &f, Regime::InsideRange).unwrap().values;
    let v = solve_branch(&conj, &fa, Regime::InsideRange).unwrap().values;
    let back = GridFunction::new(grid, v.values.iter().zip(grid.x_nodes()).map(|(v, x)| v * x.powf(-alpha)).collect())
        .unwrap();
    let worst = diff(&u, &back).max_abs();
    assert!(worst <= 1e-6 * u.max_abs(), "{worst}");
}

#[test]
fn residual_grows_linearly_with_perturbation() {
    let op = EllipticOp1D::<f64>::constant(1.0, -1.0, 4.0).unwrap();
    let params = NormParams::new(2.0, 0.0).unwrap();
    let b = Bump::on_interval(1.0, 2.0);
    let grid = support_grid(0.0, 2f64.ln(), 3.0, 5e-4).unwrap();
    let f = sample(grid, &b);
    let u = solve_explicit(&op, &f, &params).unwrap().values;
    let pert = Bump { center: 0.2, half_width: 0.6, amplitude: 1.0 };
    let base = weighted_lp_norm(&f, &params).unwrap();
    let mut prev: Option<f64> = None;
    for eps in [1e-3, 2e-3] {
        let up = GridFunction::new(
            grid,
            u.values.iter().zip(grid.x_nodes()).map(|(v, x)| v + eps * pert.eval_x(x)).collect(),
        )
        .unwrap();
        let r = residual(&op, &up, &f, &params).unwrap();
        let p = GridFunction::sample(grid, |x| eps * pert.eval_x(x)).unwrap();
        let image = weighted_lp_norm(&apply_operator(&op, &p).unwrap(), &params).unwrap() / base;
        assert!((r / image - 1.0).abs() < 1e-4, "{r} {image}");
        if let Some(q) = prev {
            assert!((r / q - 2.0f64).abs() < 1e-4);
        }
        prev = Some(r);
    }
}

#[test]
fn ratio_is_scale_invariant() {
    let op = EllipticOp1D::<f64>::constant(1.0, -1.0, 4.0).unwrap();
    let params = NormParams::new(2.0, 1.0).unwrap();
    let b = Bump::on_interval(1.0, 2.0);
    let grid = support_grid(0.0, 2f64.ln(), 0.3, 1e-3).unwrap();
    let r1 = apriori_ratio(&op, &sample(grid, &b), &params, 0.0).unwrap();
    let r2 = apriori_ratio(&op, &sample(grid, &Bump { amplitude: 7.5, ..b }), &params, 0.0).unwrap();
    assert!((r1.ratio / r2.ratio - 1.0).abs() < 1e-10, "{} {}", r1.ratio, r2.ratio);
    assert!(r2.lhs > r1.lhs);
}

#[test]
fn constant_is_a_homogeneous_solution() {
    let op = EllipticOp1D::<f64>::constant(1.0, 0.0, 0.0).unwrap();
    let grid = LogGrid::new(-2.0, 2.0, 200).unwrap();
    let (u1, u2) = homogeneous_basis(&op, &grid).unwrap();
    assert!(u2.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
    assert!(interior_residual(&op, &u1).unwrap() < 1e-8);
    assert!(interior_residual(&op, &u2).unwrap() < 1e-8);
}

#[test]
fn basis_norms_grow_under_extension_inside_range() {
    let op = EllipticOp1D::<f64>::constant(1.0, -1.0, 4.0).unwrap();
    let params = NormParams::new(2.0, 0.0).unwrap();
    for which in 0..2 {
        let norm = |ext: f64| {
            let (u1, u2) = homogeneous_basis(&op, &LogGrid::new(-ext, ext, 400).unwrap()).unwrap();
            truncated_lp_norm(if which == 0 { &u1 } else { &u2 }, &params).unwrap()
        };
        let (a, b, c) = (norm(2.0), norm(4.0), norm(8.0));
        assert!(a < b && b < c && c / b > 10.0, "{a} {b} {c}");
    }
}

#[test]
fn variable_coefficients_use_fd() {
    use degenlab_core::indicial::Coefficient;
    let op = EllipticOp1D::variable(
        Coefficient::function(|x: f64| 1.0 + 0.2 * (x.ln()).sin()),
        Coefficient::Constant(-1.0),
        Coefficient::Constant(4.0),
    )
    .with_bounds(0.5, 5.0);
    let params = NormParams::new(2.0, 0.0).unwrap();
    let b = Bump::on_interval(1.0, 2.0);
    let grid = support_grid(0.0, 2f64.ln(), 6.0, 2e-3).unwrap();
    let rep = apriori_ratio(&op, &sample(grid, &b), &params, 0.0).unwrap();
    assert!(rep.ratio.is_finite() && rep.ratio > 0.0);
}

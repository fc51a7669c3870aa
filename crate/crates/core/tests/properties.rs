use degenlab_core::grid::{GridFunction, LogGrid};
use degenlab_core::indicial::{
    admissible_theta_range, classify_theta, conjugate_operator, indicial_roots, EllipticOp1D, Regime,
};
use degenlab_core::spaces::{weighted_lp_norm, weighted_sobolev_norm, NormParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn roots_solve_the_quadratic(n_b in -5.0f64..5.0, n_c in -2.0f64..20.0) {
        let disc = (1.0 + n_b).powi(2) + 4.0 * n_c;
        prop_assume!(disc > 1e-6);
        let r = indicial_roots(n_b, n_c).unwrap();
        prop_assert!(r.alpha < r.beta);
        let scale = 1.0 + n_b.abs() + n_c.abs() + r.beta.abs().powi(2);
        for z in [r.alpha, r.beta] {
            prop_assert!((z * z + (1.0 + n_b) * z - n_c).abs() <= 1e-12 * scale);
        }
        prop_assert!((r.alpha + r.beta + 1.0 + n_b).abs() <= 1e-12 * scale);
        prop_assert!((r.alpha * r.beta + n_c).abs() <= 1e-12 * scale);
    }

    #[test]
    fn conjugation_shifts_roots(a in 0.2f64..4.0, b in -3.0f64..3.0, c in 0.5f64..8.0, gamma in -3.0f64..3.0) {
        let op = EllipticOp1D::constant(a, b, c).unwrap();
        let r = op.roots().unwrap();
        let s = conjugate_operator(&op, gamma).unwrap().roots().unwrap();
        let tol = 1e-10 * (1.0 + r.alpha.abs() + r.beta.abs() + gamma.abs());
        prop_assert!((s.alpha - (r.alpha - gamma)).abs() < tol);
        prop_assert!((s.beta - (r.beta - gamma)).abs() < tol);
    }

    #[test]
    fn conjugation_composes(a in 0.2f64..4.0, b in -3.0f64..3.0, c in 0.5f64..8.0, g1 in -2.0f64..2.0, g2 in -2.0f64..2.0) {
        let op = EllipticOp1D::constant(a, b, c).unwrap();
        let two = conjugate_operator(&conjugate_operator(&op, g1).unwrap(), g2).unwrap();
        let one = conjugate_operator(&op, g1 + g2).unwrap();
        let (x, y) = (two.constants().unwrap(), one.constants().unwrap());
        let tol = 1e-10 * (1.0 + a + b.abs() + c) * (1.0 + (g1.abs() + g2.abs()).powi(2));
        prop_assert!((x.0 - y.0).abs() < tol && (x.1 - y.1).abs() < tol && (x.2 - y.2).abs() < tol);
    }

    #[test]
    fn conjugation_at_alpha_removes_zeroth_order(a in 0.2f64..4.0, b in -3.0f64..3.0, c in 0.5f64..8.0) {
        let op = EllipticOp1D::constant(a, b, c).unwrap();
        let alpha = op.roots().unwrap().alpha;
        let (_, _, c2) = conjugate_operator(&op, alpha).unwrap().constants().unwrap();
        prop_assert!(c2.abs() < 1e-10 * (1.0 + c + alpha * alpha * a));
    }

    #[test]
    fn classification_matches_range(n_b in -3.0f64..3.0, n_c in 0.5f64..10.0, p in 1.1f64..4.0, theta in -30.0f64..30.0) {
        let r = indicial_roots(n_b, n_c).unwrap();
        let (lo, hi) = admissible_theta_range(p, &r).unwrap();
        prop_assume!((theta - lo).abs() > 1e-6 && (theta - hi).abs() > 1e-6);
        let want = if theta < lo { Regime::BelowRange } else if theta > hi { Regime::AboveRange } else { Regime::InsideRange };
        prop_assert_eq!(classify_theta(theta, p, &r).unwrap(), want);
    }

    #[test]
    fn norms_are_homogeneous(k in -5.0f64..5.0, mu in -1.0f64..1.0, p in 1.5f64..3.0, theta in -1.0f64..1.0) {
        prop_assume!(k.abs() > 1e-3);
        let grid = LogGrid::new(-12.0, 12.0, 480).unwrap();
        let u = GridFunction::sample(grid, |x: f64| (-(x.ln() - mu).powi(2)).exp()).unwrap();
        let ku = GridFunction::new(grid, u.values.iter().map(|v| k * v).collect()).unwrap();
        let params = NormParams::new(p, theta).unwrap();
        let (a, b) = (weighted_lp_norm(&u, &params).unwrap(), weighted_lp_norm(&ku, &params).unwrap());
        prop_assert!((b - k.abs() * a).abs() <= 1e-12 * b);
        let (a, b) = (weighted_sobolev_norm(&u, 2, &params).unwrap(), weighted_sobolev_norm(&ku, 2, &params).unwrap());
        prop_assert!((b - k.abs() * a).abs() <= 1e-12 * b);
    }

    #[test]
    fn log_shift_scales_norm(shift in -10i32..10, theta in -1.0f64..1.0) {
        // u(e^{-σ} x) has norm e^{σθ/p} ‖u‖ for integer-node shifts σ.
        let h = 0.05;
        let grid = LogGrid::new(-15.0, 15.0, 600).unwrap();
        let sigma = shift as f64 * h;
        let u = GridFunction::sample(grid, |x: f64| (-(x.ln()).powi(2)).exp()).unwrap();
        let v = GridFunction::sample(grid, |x: f64| (-(x.ln() - sigma).powi(2)).exp()).unwrap();
        let params = NormParams::new(2.0, theta).unwrap();
        let ratio = weighted_lp_norm(&v, &params).unwrap() / weighted_lp_norm(&u, &params).unwrap();
        prop_assert!((ratio / (sigma * theta / 2.0).exp() - 1.0).abs() < 1e-9);
    }
}

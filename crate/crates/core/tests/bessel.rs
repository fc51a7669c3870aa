use degenlab_core::bessel::*;
use degenlab_core::quadrature::adaptive;

const ORDERS: [f64; 4] = [0.0, 0.5, 1.0, std::f64::consts::SQRT_2];

#[test]
fn suite_meets_tolerances() {
    let s = bessel_suite(&ORDERS, 40).unwrap();
    assert!(s.max_ode_residual < 1e-9, "{}", s.max_ode_residual);
    assert!(s.max_recurrence_residual < 1e-9, "{}", s.max_recurrence_residual);
    assert!(s.max_half_order_error < 1e-9, "{}", s.max_half_order_error);
    for b in &s.bounds {
        assert!(b.pass, "{b:?}");
    }
}

#[test]
fn matches_adaptive_integral_representation() {
    // K_ν(x) = ∫₀^∞ e^{-x cosh t} cosh(νt) dt, integrated adaptively to a finite cut.
    for &nu in &ORDERS {
        for x in [0.05, 0.7, 3.0, 12.0] {
            let cut = (60.0f64 / x).ln().max(1.0) + 3.0;
            let r = adaptive(|t: f64| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh(), 0.0, cut, 1e-15, 1e-13, 400);
            let want = r.value * (-x).exp();
            let got = bessel_k(nu, x).unwrap();
            assert!((got / want - 1.0).abs() < 1e-11, "nu={nu} x={x}: {got} {want}");
        }
    }
}

#[test]
fn negative_order_is_symmetric() {
    for x in [0.1, 2.0] {
        assert_eq!(bessel_k(-1.3, x).unwrap(), bessel_k(1.3, x).unwrap());
    }
}

#[test]
fn bounds_need_wide_samples() {
    assert!(bessel_k_bounds_check(BesselOrder::new(1.0).unwrap(), &[0.1, 1.0, 5.0]).is_err());
}

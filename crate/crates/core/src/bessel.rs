//! Modified Bessel function of the second kind `K_ν(x)` for real `ν` and `x > 0`.
//!
//! `e^x K_ν(x) = ∫_0^∞ exp(-2x sinh²(t/2)) cosh(νt) dt`, evaluated by the
//! trapezoidal rule, which converges geometrically for this analytic,
//! doubly-exponentially decaying integrand.

use crate::error::{Error, Result};
use crate::fd::fornberg_weights;
use crate::scalar::Real;

/// Order `ν`. Negative orders are accepted since `K_{-ν} = K_ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder<T>(pub T);

impl<T: Real> BesselOrder<T> {
    pub fn new(nu: T) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::InvalidInput(format!("Bessel order must be finite, got {nu}")));
        }
        Ok(Self(nu))
    }
}

/// Trapezoid step giving an aliasing error near `1e-18` relative.
pub fn default_step<T: Real>(x: T) -> T {
    let d = T::one();
    T::lit(2.0) * T::PI() * d / (T::lit(41.5) + x * (T::one() - d.cos()))
}

fn check_x<T: Real>(x: T) -> Result<()> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("K_nu needs finite x > 0, got {x}")));
    }
    Ok(())
}

/// `e^x K_ν(x)` with trapezoid step `h`, summing nodes up to `t_max`.
pub fn bessel_k_scaled_truncated<T: Real>(nu: T, x: T, h: T, t_max: T) -> Result<T> {
    check_x(x)?;
    let nu = nu.abs();
    let two = T::lit(2.0);
    let tiny = T::lit(1e-19);
    let mut sum = T::lit(0.5);
    let mut k = 1usize;
    loop {
        let t = h * T::of_usize(k);
        if t > t_max {
            break;
        }
        let sh = (t * T::lit(0.5)).sinh();
        let term = (-two * x * sh * sh + nu * t).exp() * (T::one() + (-two * nu * t).exp()) * T::lit(0.5);
        sum += term;
        let past_peak = x * t.sinh() > nu;
        if past_peak && term < tiny * sum {
            break;
        }
        k += 1;
        if k > 1_000_000 {
            break;
        }
    }
    Ok(sum * h)
}

/// `e^x K_ν(x)` with step `h` and adaptive truncation.
pub fn bessel_k_scaled_with_step<T: Real>(nu: T, x: T, h: T) -> Result<T> {
    bessel_k_scaled_truncated(nu, x, h, T::infinity())
}

/// `e^x K_ν(x)`; use for large `x` where `K_ν` underflows.
pub fn bessel_k_scaled<T: Real>(nu: T, x: T) -> Result<T> {
    check_x(x)?;
    bessel_k_scaled_with_step(nu, x, default_step(x))
}

/// `K_ν(x)`.
pub fn bessel_k<T: Real>(nu: T, x: T) -> Result<T> {
    Ok(bessel_k_scaled(nu, x)? * (-x).exp())
}

/// Node `t` where the adaptive truncation stops for `(ν, x)`.
pub fn truncation_point<T: Real>(nu: T, x: T) -> Result<T> {
    check_x(x)?;
    let h = default_step(x);
    let nu = nu.abs();
    let two = T::lit(2.0);
    let mut sum = T::lit(0.5);
    let mut k = 1usize;
    loop {
        let t = h * T::of_usize(k);
        let sh = (t * T::lit(0.5)).sinh();
        let term = (-two * x * sh * sh + nu * t).exp();
        sum += term;
        if x * t.sinh() > nu && term < T::lit(1e-19) * sum {
            return Ok(t);
        }
        k += 1;
    }
}

/// `K_{1/2}(x) = √(π/(2x)) e^{-x}`.
pub fn k_half_closed_form<T: Real>(x: T) -> T {
    (T::PI() / (T::lit(2.0) * x)).sqrt() * (-x).exp()
}

/// Log-coordinate step for derivative checks at `x`.
pub fn derivative_step<T: Real>(x: T) -> T {
    T::lit(0.02).min(T::lit(0.05) / x)
}

/// `(K, ∂_s K, ∂_s² K)` at `s = ln x`, scaled by `e^x`, with 6th-order differences.
fn log_derivs(nu: f64, x: f64) -> Result<(f64, f64, f64)> {
    let hs = derivative_step(x);
    let h = default_step(x);
    let offs: Vec<f64> = (-3..=3).map(|k| k as f64).collect();
    let w = fornberg_weights(0.0, &offs, 2);
    let mut vals = [0.0; 7];
    for (j, v) in vals.iter_mut().enumerate() {
        let xj = x * ((j as f64 - 3.0) * hs).exp();
        *v = bessel_k_scaled_with_step(nu, xj, h)? * (x - xj).exp();
    }
    let d1: f64 = w[1].iter().zip(&vals).map(|(a, b)| a * b).sum::<f64>() / hs;
    let d2: f64 = w[2].iter().zip(&vals).map(|(a, b)| a * b).sum::<f64>() / (hs * hs);
    Ok((vals[3], d1, d2))
}

/// Relative residual of `x²K'' + xK' - (x² + ν²)K = 0`, normalized by the sum
/// of the magnitudes of its three terms.
pub fn ode_residual(nu: f64, x: f64) -> Result<f64> {
    let (k, ks, kss) = log_derivs(nu, x)?;
    let t1 = kss - ks;
    let t3 = (x * x + nu * nu) * k;
    Ok((t1 + ks - t3).abs() / (t1.abs() + ks.abs() + t3.abs()))
}

/// Relative residual of `-2K'_ν = K_{ν-1} + K_{ν+1}`.
pub fn recurrence_residual(nu: f64, x: f64) -> Result<f64> {
    let (_, ks, _) = log_derivs(nu, x)?;
    let lhs = -2.0 * ks / x;
    let rhs = bessel_k_scaled(nu - 1.0, x)? + bessel_k_scaled(nu + 1.0, x)?;
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Fitted constants for `K_ν <= N x^{-|ν|}` (`ν ≠ 0`, `x <= 1`),
/// `K_0 <= -N ln x` (`x <= 1/2`) and `K_ν <= N x^{-1/2} e^{-x}` (`x >= 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub nu: f64,
    pub small_x_constant: f64,
    /// `d ln(ratio)/d ln x` between the two smallest samples.
    pub small_x_edge_slope: f64,
    pub large_x_constant: f64,
    /// `d ln(ratio)/d ln x` between the two largest samples.
    pub large_x_edge_slope: f64,
    pub pass: bool,
}

/// Bound check over `samples` (must span `[1e-3, 20]`).
pub fn bessel_k_bounds_check(nu: BesselOrder<f64>, samples: &[f64]) -> Result<BoundsReport> {
    let nu = nu.0.abs();
    let mut xs: Vec<f64> = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if xs.first().is_none_or(|&x| x > 1e-3) || xs.last().is_none_or(|&x| x < 20.0) {
        return Err(Error::InvalidInput("sample grid must span [1e-3, 20]".into()));
    }
    let small: Vec<(f64, f64)> = xs
        .iter()
        .filter(|&&x| if nu == 0.0 { x <= 0.5 } else { x <= 1.0 })
        .map(|&x| {
            let k = bessel_k(nu, x)?;
            Ok((x, if nu == 0.0 { k / (-x.ln()) } else { k * x.powf(nu) }))
        })
        .collect::<Result<_>>()?;
    let large: Vec<(f64, f64)> = xs
        .iter()
        .filter(|&&x| x >= 1.0)
        .map(|&x| Ok((x, bessel_k_scaled(nu, x)? * x.sqrt())))
        .collect::<Result<_>>()?;
    let sup = |v: &[(f64, f64)]| v.iter().map(|p| p.1).fold(0.0, f64::max);
    let slope = |a: (f64, f64), b: (f64, f64)| (b.1.ln() - a.1.ln()) / (b.0.ln() - a.0.ln());
    let small_slope = slope(small[0], small[1]);
    let n = large.len();
    let large_slope = slope(large[n - 2], large[n - 1]);
    let (cs, cl) = (sup(&small), sup(&large));
    let pass =
        cs.is_finite() && cl.is_finite() && cs > 0.0 && cl > 0.0 && small_slope.abs() < 0.1 && large_slope.abs() < 0.1;
    Ok(BoundsReport {
        nu,
        small_x_constant: cs,
        small_x_edge_slope: small_slope,
        large_x_constant: cl,
        large_x_edge_slope: large_slope,
        pass,
    })
}

/// Worst residuals over an order/argument grid plus the bound regimes.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselSuite {
    pub max_ode_residual: f64,
    pub max_recurrence_residual: f64,
    pub max_half_order_error: f64,
    pub bounds: Vec<BoundsReport>,
}

/// Runs the checks for `orders` on `per_decade` log-spaced points of `[1e-2, 20]`;
/// bounds use `[1e-3, 20]`.
pub fn bessel_suite(orders: &[f64], per_decade: usize) -> Result<BesselSuite> {
    let span = |lo: f64, hi: f64| -> Vec<f64> {
        let n = ((hi / lo).log10() * per_decade as f64).ceil() as usize;
        (0..=n).map(|k| lo * (hi / lo).powf(k as f64 / n as f64)).collect()
    };
    let xs = span(1e-2, 20.0);
    let mut out = BesselSuite {
        max_ode_residual: 0.0,
        max_recurrence_residual: 0.0,
        max_half_order_error: 0.0,
        bounds: Vec::new(),
    };
    for &nu in orders {
        for &x in &xs {
            out.max_ode_residual = out.max_ode_residual.max(ode_residual(nu, x)?);
            out.max_recurrence_residual = out.max_recurrence_residual.max(recurrence_residual(nu, x)?);
        }
        out.bounds.push(bessel_k_bounds_check(BesselOrder::new(nu)?, &span(1e-3, 20.0))?);
    }
    for &x in &xs {
        let exact = k_half_closed_form(x);
        out.max_half_order_error = out.max_half_order_error.max(((bessel_k(0.5, x)? - exact) / exact).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_order_closed_form() {
        for x in [1e-3, 0.1, 1.0, 5.0, 30.0] {
            assert_relative_eq!(bessel_k(0.5, x).unwrap(), k_half_closed_form(x), max_relative = 1e-12);
        }
        assert_relative_eq!(bessel_k(0.5f64, 1.0).unwrap(), 0.461_068_504_447_894_4, max_relative = 1e-12);
    }

    #[test]
    fn integer_order_reference_values() {
        // K_0(1), K_1(1), K_0(0.1) to 16 digits.
        assert_relative_eq!(bessel_k(0.0f64, 1.0).unwrap(), 0.421_024_438_240_708_3, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(1.0f64, 1.0).unwrap(), 0.601_907_230_197_234_6, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(0.0f64, 0.1).unwrap(), 2.427_069_024_702_017_f64, max_relative = 1e-12);
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(matches!(bessel_k(1.0f64, 0.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_k(1.0f64, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn ode_and_recurrence() {
        for nu in [0.0, 0.5, 1.0, 2f64.sqrt()] {
            for x in [0.01, 0.3, 1.0, 7.0, 20.0] {
                assert!(ode_residual(nu, x).unwrap() < 1e-9, "ode nu={nu} x={x}");
                assert!(recurrence_residual(nu, x).unwrap() < 1e-9, "rec nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn truncation_converged() {
        for (nu, x) in [(0.0, 1e-3), (1.0, 0.5), (2f64.sqrt(), 20.0)] {
            let h = default_step(x);
            let t = truncation_point(nu, x).unwrap();
            let a = bessel_k_scaled_truncated(nu, x, h, t).unwrap();
            let b = bessel_k_scaled_truncated(nu, x, h, 2.0 * t).unwrap();
            assert!(((a - b) / b).abs() < 1e-12);
        }
    }

    #[test]
    fn f32_evaluation() {
        let v = bessel_k(0.5f32, 1.0).unwrap();
        assert!((v - 0.461_068_5).abs() < 1e-5);
    }
}

//! Indicial roots, admissible weight ranges and the power conjugation of
//! one-dimensional degenerate operators
//! `-x² a u'' + x b u' + (c + λ) u`.
//!
//! `a z² + (b + 1) z - c = 0` and the normalized `z² + (1 + n_b) z - n_c = 0`
//! coincide after division by `a`; this module works with the latter.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::LogGrid;
use crate::scalar::Real;

/// Coefficient of `x`: constant or a function.
#[derive(Clone)]
pub enum Coefficient<T> {
    Constant(T),
    Function(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Real> Coefficient<T> {
    pub fn function<F: Fn(T) -> T + Send + Sync + 'static>(f: F) -> Self {
        Coefficient::Function(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, x: T) -> T {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Function(f) => f(x),
        }
    }

    pub fn as_constant(&self) -> Option<T> {
        match self {
            Coefficient::Constant(c) => Some(*c),
            Coefficient::Function(_) => None,
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Coefficient<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c:?})"),
            Coefficient::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// Declared ellipticity and bound constants: `a ∈ [ν, 1/ν]`, `|b|, |c| <= K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    pub nu: T,
    pub k: T,
}

/// `-x² a u'' + x b u' + (c + λ) u`.
#[derive(Debug, Clone)]
pub struct EllipticOp1D<T> {
    pub a: Coefficient<T>,
    pub b: Coefficient<T>,
    pub c: Coefficient<T>,
    pub lambda: T,
    pub bounds: Option<Bounds<T>>,
}

impl<T: Real> EllipticOp1D<T> {
    pub fn constant(a: T, b: T, c: T) -> Result<Self> {
        if !(a > T::zero()) || !a.is_finite() || !b.is_finite() || !c.is_finite() {
            return Err(Error::InvalidInput(format!("need finite a > 0, b, c; got a={a}, b={b}, c={c}")));
        }
        Ok(Self {
            a: Coefficient::Constant(a),
            b: Coefficient::Constant(b),
            c: Coefficient::Constant(c),
            lambda: T::zero(),
            bounds: None,
        })
    }

    pub fn variable(a: Coefficient<T>, b: Coefficient<T>, c: Coefficient<T>) -> Self {
        Self { a, b, c, lambda: T::zero(), bounds: None }
    }

    pub fn with_lambda(mut self, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("need finite lambda >= 0, got {lambda}")));
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn with_bounds(mut self, nu: T, k: T) -> Self {
        self.bounds = Some(Bounds { nu, k });
        self
    }

    /// `(a, b, c)` when every coefficient is constant.
    pub fn constants(&self) -> Option<(T, T, T)> {
        Some((self.a.as_constant()?, self.b.as_constant()?, self.c.as_constant()?))
    }

    pub fn is_constant(&self) -> bool {
        self.constants().is_some()
    }

    /// Checks positivity of `a` and the declared bounds at every node.
    pub fn validate_on(&self, grid: &LogGrid<T>) -> Result<()> {
        for i in 0..grid.n_s() {
            let x = grid.x_node(i);
            let (a, b, c) = (self.a.eval(x), self.b.eval(x), self.c.eval(x));
            if !(a > T::zero()) || !b.is_finite() || !c.is_finite() {
                return Err(Error::InvalidInput(format!("coefficients invalid at x={x}: a={a}, b={b}, c={c}")));
            }
            if let Some(bd) = self.bounds {
                if a < bd.nu || a > bd.nu.recip() || b.abs() > bd.k || c.abs() > bd.k {
                    return Err(Error::InvalidInput(format!(
                        "coefficients violate declared bounds at x={x}: a={a}, b={b}, c={c}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(n_b, n_c) = (b/a, (c+λ)/a)` for constant coefficients.
    pub fn ratios(&self) -> Result<(T, T)> {
        let (a, b, c) =
            self.constants().ok_or_else(|| Error::InvalidInput("indicial ratios need constant coefficients".into()))?;
        Ok((b / a, (c + self.lambda) / a))
    }

    /// Indicial roots of the operator including `λ`.
    pub fn roots(&self) -> Result<IndicialRoots<T>> {
        let (nb, nc) = self.ratios()?;
        indicial_roots(nb, nc)
    }
}

/// Roots `α < β` of `z² + (1 + n_b) z - n_c = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicialRoots<T> {
    pub n_b: T,
    pub n_c: T,
    pub alpha: T,
    pub beta: T,
    pub discriminant: T,
}

pub fn indicial_roots<T: Real>(n_b: T, n_c: T) -> Result<IndicialRoots<T>> {
    let b = T::one() + n_b;
    let disc = b * b + T::lit(4.0) * n_c;
    if !(disc > T::lit(1e-12)) {
        return Err(Error::NoRealGap { discriminant: disc.to_f64_lossy() });
    }
    let sign = if b >= T::zero() { T::one() } else { -T::one() };
    let q = -(b + sign * disc.sqrt()) * T::lit(0.5);
    let r1 = q;
    let r2 = if q == T::zero() { T::zero() } else { -n_c / q };
    let (alpha, beta) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
    Ok(IndicialRoots { n_b, n_c, alpha, beta, discriminant: disc })
}

/// `(αp, βp)`.
pub fn admissible_theta_range<T: Real>(p: T, roots: &IndicialRoots<T>) -> Result<(T, T)> {
    if !(p > T::one()) {
        return Err(Error::InvalidInput(format!("need p > 1, got {p}")));
    }
    Ok((roots.alpha * p, roots.beta * p))
}

/// Position of `θ` relative to `(αp, βp)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    BelowRange,
    InsideRange,
    AboveRange,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::BelowRange => "below-range",
            Regime::InsideRange => "inside-range",
            Regime::AboveRange => "above-range",
        }
    }
}

/// Classifies `θ`; errors when it sits on an endpoint (to `1e-12` relative).
pub fn classify_theta<T: Real>(theta: T, p: T, roots: &IndicialRoots<T>) -> Result<Regime> {
    let (lo, hi) = admissible_theta_range(p, roots)?;
    let tol = |e: T| T::lit(1e-12) * e.abs().max(T::one());
    for e in [lo, hi] {
        if (theta - e).abs() <= tol(e) {
            return Err(Error::EndpointTheta { theta: theta.to_f64_lossy(), endpoint: e.to_f64_lossy() });
        }
    }
    Ok(if theta < lo {
        Regime::BelowRange
    } else if theta > hi {
        Regime::AboveRange
    } else {
        Regime::InsideRange
    })
}

/// Operator satisfied by `v = x^γ u`:
/// `a' = a`, `b' = 2aγ + b`, `c' = -aγ² - (a+b)γ + c`.
///
/// Its indicial roots are `α - γ`, `β - γ`.
pub fn conjugate_operator<T: Real>(op: &EllipticOp1D<T>, gamma: T) -> Result<EllipticOp1D<T>> {
    let (a, b, c) =
        op.constants().ok_or_else(|| Error::InvalidInput("conjugation needs constant coefficients".into()))?;
    let two = T::lit(2.0);
    let mut out = EllipticOp1D::constant(a, two * a * gamma + b, -a * gamma * gamma - (a + b) * gamma + c)?;
    out.lambda = op.lambda;
    out.bounds = op.bounds;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_roots() {
        let r = indicial_roots(-1.0f64, 4.0).unwrap();
        assert_relative_eq!(r.alpha, -2.0);
        assert_relative_eq!(r.beta, 2.0);
        let r = indicial_roots(0.0f64, 0.0).unwrap();
        assert_eq!((r.alpha, r.beta), (-1.0, 0.0));
        let r = indicial_roots(1.0f64, 3.0).unwrap();
        assert_relative_eq!(r.alpha, -3.0);
        assert_relative_eq!(r.beta, 1.0);
    }

    #[test]
    fn double_root_rejected() {
        assert!(matches!(indicial_roots(-1.0f64, 0.0), Err(Error::NoRealGap { .. })));
        assert!(matches!(indicial_roots(0.0f64, -0.25), Err(Error::NoRealGap { .. })));
    }

    #[test]
    fn ranges() {
        let r = indicial_roots(-1.0f64, 4.0).unwrap();
        assert_eq!(admissible_theta_range(2.0, &r).unwrap(), (-4.0, 4.0));
        let r = indicial_roots(1.0f64, 3.0).unwrap();
        let (lo, hi) = admissible_theta_range(3.0, &r).unwrap();
        assert_relative_eq!(lo, -9.0);
        assert_relative_eq!(hi, 3.0);
        assert!(admissible_theta_range(1.0, &r).is_err());
    }

    #[test]
    fn regimes_and_endpoints() {
        let r = indicial_roots(-1.0f64, 4.0).unwrap();
        assert_eq!(classify_theta(0.0, 2.0, &r).unwrap(), Regime::InsideRange);
        assert_eq!(classify_theta(6.0, 2.0, &r).unwrap(), Regime::AboveRange);
        assert_eq!(classify_theta(-6.0, 2.0, &r).unwrap(), Regime::BelowRange);
        assert!(matches!(classify_theta(4.0, 2.0, &r), Err(Error::EndpointTheta { .. })));
    }

    #[test]
    fn conjugation_examples() {
        let op = EllipticOp1D::constant(1.0f64, -1.0, 4.0).unwrap();
        let v = conjugate_operator(&op, -2.0).unwrap();
        let (a, b, c) = v.constants().unwrap();
        assert_eq!(a, 1.0);
        assert_relative_eq!(b, -5.0);
        assert!(c.abs() < 1e-12);
        let id = conjugate_operator(&op, 0.0).unwrap();
        assert_eq!(id.constants(), op.constants());
        let op = EllipticOp1D::constant(1.0f64, 0.0, 0.0).unwrap();
        let v = conjugate_operator(&op, 1.0).unwrap().constants().unwrap();
        assert_eq!((v.1, v.2), (2.0, -2.0));
    }

    #[test]
    fn validates_bounds() {
        let g = LogGrid::new(-1.0f64, 1.0, 8).unwrap();
        let op = EllipticOp1D::variable(
            Coefficient::function(|x: f64| 1.0 + 0.5 * x.sin()),
            Coefficient::Constant(0.3),
            Coefficient::Constant(1.0),
        )
        .with_bounds(0.5, 2.0);
        assert!(op.validate_on(&g).is_ok());
        let bad = op.clone().with_bounds(0.9, 2.0);
        assert!(bad.validate_on(&g).is_err());
    }
}

//! Tridiagonal systems.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tridiagonal matrix; row `i` reads `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn zeros(n: usize) -> Self {
        Self { lower: vec![T::zero(); n], diag: vec![T::zero(); n], upper: vec![T::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Thomas algorithm. Fails when a pivot falls below `1e-14` times the
    /// magnitude of its row.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(Error::InvalidInput(format!("rhs length {} != {}", rhs.len(), n)));
        }
        let tiny = T::lit(1e-14);
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let mut denom = self.diag[0];
        let row0 = self.diag[0].abs() + if n > 1 { self.upper[0].abs() } else { T::zero() };
        if denom.abs() <= tiny * row0 || !denom.is_finite() {
            return Err(Error::SingularSystem { row: 0, pivot: denom.to_f64_lossy() });
        }
        c[0] = if n > 1 { self.upper[0] / denom } else { T::zero() };
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.lower[i] * c[i - 1];
            let up = if i + 1 < n { self.upper[i] } else { T::zero() };
            let scale = self.lower[i].abs() + self.diag[i].abs() + up.abs();
            if denom.abs() <= tiny * scale || !denom.is_finite() {
                return Err(Error::SingularSystem { row: i, pivot: denom.to_f64_lossy() });
            }
            c[i] = up / denom;
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            let next = d[i + 1];
            d[i] -= c[i] * next;
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_laplacian() {
        let n = 50;
        let mut m = Tridiagonal::<f64>::zeros(n);
        for i in 0..n {
            m.lower[i] = -1.0;
            m.diag[i] = 2.0;
            m.upper[i] = -1.0;
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let b = m.apply(&x);
        let y = m.solve(&b).unwrap();
        for i in 0..n {
            assert!((x[i] - y[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn detects_singular_pivot() {
        let mut m = Tridiagonal::<f64>::zeros(2);
        m.diag = vec![1.0, 1.0];
        m.upper[0] = 1.0;
        m.lower[1] = 1.0;
        assert!(matches!(m.solve(&[1.0, 1.0]), Err(Error::SingularSystem { row: 1, .. })));
    }
}

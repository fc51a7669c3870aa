//! Finite-difference derivatives on uniform grids.

use crate::scalar::Real;

/// Fornberg weights: `w[m][j]` approximates the `m`-th derivative at `x0`
/// from samples at `xs[j]`, for `m <= max_order`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Precomputed stencils for one derivative order and accuracy order on a
/// uniform grid: centred in the interior, one-sided near the ends.
#[derive(Debug, Clone)]
pub struct Stencil<T> {
    order: usize,
    half: usize,
    central: Vec<T>,
    /// `edge[i]`: weights over nodes `0..width` for node `i < half`.
    edge: Vec<Vec<T>>,
}

impl<T: Real> Stencil<T> {
    /// `order` in {1, 2}, `accuracy` even.
    pub fn new(order: usize, accuracy: usize) -> Self {
        assert!(order >= 1 && accuracy >= 2 && accuracy.is_multiple_of(2));
        let half = accuracy / 2;
        let offs: Vec<f64> = (0..=2 * half).map(|k| k as f64 - half as f64).collect();
        let central = fornberg_weights(0.0, &offs, order)[order].iter().map(|&w| T::lit(w)).collect();
        let width = accuracy + order;
        let pts: Vec<f64> = (0..width).map(|k| k as f64).collect();
        let edge = (0..half)
            .map(|i| fornberg_weights(i as f64, &pts, order)[order].iter().map(|&w| T::lit(w)).collect())
            .collect();
        Self { order, half, central, edge }
    }

    pub fn min_points(&self) -> usize {
        (2 * self.half + 1).max(self.edge.first().map_or(0, |e| e.len()))
    }

    /// Applies the stencil to `n` samples read through `get`, writing into `out`.
    pub fn apply_with<G: Fn(usize) -> T>(&self, get: G, n: usize, h: T, out: &mut [T]) {
        assert!(n >= self.min_points(), "too few points for stencil");
        let scale = h.powi(self.order as i32).recip();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = T::zero();
            if i < self.half {
                for (k, w) in self.edge[i].iter().enumerate() {
                    acc += *w * get(k);
                }
            } else if i + self.half >= n {
                let r = n - 1 - i;
                let width = self.edge[r].len();
                let sign = if self.order % 2 == 1 { -T::one() } else { T::one() };
                for (k, w) in self.edge[r].iter().enumerate() {
                    acc += sign * *w * get(n - 1 - k);
                }
                debug_assert!(width <= n);
            } else {
                for (k, w) in self.central.iter().enumerate() {
                    acc += *w * get(i + k - self.half);
                }
            }
            *o = acc * scale;
        }
    }

    pub fn apply(&self, v: &[T], h: T) -> Vec<T> {
        let mut out = vec![T::zero(); v.len()];
        self.apply_with(|k| v[k], v.len(), h, &mut out);
        out
    }
}

/// Derivative of `order` of uniformly sampled `v` with spacing `h`.
pub fn derivative<T: Real>(v: &[T], h: T, order: usize, accuracy: usize) -> Vec<T> {
    Stencil::new(order, accuracy).apply(v, h)
}

/// Derivative along the slow axis of a row-major `rows x cols` array.
pub fn derivative_rows<T: Real>(data: &[T], rows: usize, cols: usize, h: T, st: &Stencil<T>) -> Vec<T> {
    let mut out = vec![T::zero(); data.len()];
    let mut col_out = vec![T::zero(); rows];
    for j in 0..cols {
        st.apply_with(|k| data[k * cols + j], rows, h, &mut col_out);
        for i in 0..rows {
            out[i * cols + j] = col_out[i];
        }
    }
    out
}

/// Derivative along the fast axis of a row-major `rows x cols` array.
pub fn derivative_cols<T: Real>(data: &[T], rows: usize, cols: usize, h: T, st: &Stencil<T>) -> Vec<T> {
    let mut out = vec![T::zero(); data.len()];
    for i in 0..rows {
        let row = &data[i * cols..(i + 1) * cols];
        st.apply_with(|k| row[k], cols, h, &mut out[i * cols..(i + 1) * cols]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fornberg_matches_classic_stencils() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_relative_eq!(w[1][0], -0.5);
        assert_relative_eq!(w[1][2], 0.5);
        assert_relative_eq!(w[2][1], -2.0);
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        assert_relative_eq!(w[2][0], -1.0 / 12.0, epsilon = 1e-15);
        assert_relative_eq!(w[2][2], -2.5, epsilon = 1e-15);
    }

    #[test]
    fn fourth_order_convergence_including_edges() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let v: Vec<f64> = (0..=n).map(|i| (i as f64 * h * 3.0).sin()).collect();
            let d2 = derivative(&v, h, 2, 4);
            (0..=n).map(|i| (d2[i] + 9.0 * (i as f64 * h * 3.0).sin()).abs()).fold(0.0, f64::max)
        };
        let ratio = err(40) / err(80);
        assert!(ratio > 12.0, "ratio {ratio}");
    }

    #[test]
    fn sixth_order_first_derivative() {
        let n = 60;
        let h = 0.05;
        let v: Vec<f64> = (0..=n).map(|i| (i as f64 * h).exp()).collect();
        let d = derivative(&v, h, 1, 6);
        for i in 0..=n {
            assert_relative_eq!(d[i], v[i], max_relative = 1e-8);
        }
    }
}

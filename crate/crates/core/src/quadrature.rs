//! Quadrature rules: Gauss-Legendre, adaptive Gauss-Kronrod and the
//! composite cell rule used for integrals of grid data.

use crate::scalar::Real;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = if n == 1 { 1.0 } else { n as f64 * (z * p1 - p0) / (z * z - 1.0) };
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed-order Gauss-Legendre rule.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre_f64(n);
        Self { nodes: x.into_iter().map(T::lit).collect(), weights: w.into_iter().map(T::lit).collect() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> (Vec<T>, Vec<T>) {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let x = self.nodes.iter().map(|&z| mid + half * z).collect();
        let w = self.weights.iter().map(|&w| half * w).collect();
        (x, w)
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = T::zero();
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(mid + half * *z);
        }
        acc * half
    }

    /// Composite rule over `panels` equal panels.
    pub fn composite<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T, panels: usize) -> T {
        let step = (b - a) / T::of_usize(panels);
        (0..panels)
            .map(|k| {
                let lo = a + step * T::of_usize(k);
                self.integrate(&mut f, lo, lo + step)
            })
            .sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut k = fc * T::lit(WGK[7]);
    let mut g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        k += T::lit(WGK[j]) * s;
        if j % 2 == 1 {
            g += T::lit(WG[j / 2]) * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Globally adaptive 15-point Gauss-Kronrod integration on `[a, b]`.
///
/// Stops when the summed error estimate drops below
/// `max(abs_tol, rel_tol * |value|)` or `max_intervals` is reached.
pub fn adaptive<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    abs_tol: T,
    rel_tol: T,
    max_intervals: usize,
) -> QuadResult<T> {
    if a == b {
        return QuadResult { value: T::zero(), error: T::zero(), intervals: 0 };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let value: T = parts.iter().map(|p| p.2).sum();
        let error: T = parts.iter().map(|p| p.3).sum();
        let tol = abs_tol.max(rel_tol * value.abs());
        if error <= tol || parts.len() >= max_intervals {
            return QuadResult { value, error, intervals: parts.len() };
        }
        let (idx, _) = parts.iter().enumerate().fold(
            (0, T::neg_infinity()),
            |acc, (i, p)| {
                if p.3 > acc.1 {
                    (i, p.3)
                } else {
                    acc
                }
            },
        );
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            let value: T = parts.iter().map(|p| p.2).sum::<T>();
            return QuadResult { value, error, intervals: parts.len() };
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Four-point Gauss-Legendre rule per grid cell with cubic interpolation of
/// nodal data. Interior cells use the centred stencil `c-1..=c+2`; the first
/// and last cells shift the stencil inward.
#[derive(Debug, Clone)]
pub struct CellRule<T> {
    /// Gauss points on [0, 1].
    pub points: [T; 4],
    /// Gauss weights on [0, 1], summing to one.
    pub weights: [T; 4],
    /// `basis[offset][q][k]`: Lagrange weight of stencil node `k` at point `q`
    /// for a cell starting `offset` nodes into the stencil.
    basis: [[[T; 4]; 4]; 3],
}

impl<T: Real> Default for CellRule<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> CellRule<T> {
    pub fn new() -> Self {
        let (x, w) = gauss_legendre_f64(4);
        let pts: [f64; 4] = std::array::from_fn(|q| 0.5 * (x[q] + 1.0));
        let mut basis = [[[T::zero(); 4]; 4]; 3];
        for (offset, b) in basis.iter_mut().enumerate() {
            for q in 0..4 {
                let xi = offset as f64 + pts[q];
                for k in 0..4 {
                    let mut l = 1.0;
                    for j in 0..4 {
                        if j != k {
                            l *= (xi - j as f64) / (k as f64 - j as f64);
                        }
                    }
                    b[q][k] = T::lit(l);
                }
            }
        }
        Self {
            points: std::array::from_fn(|q| T::lit(pts[q])),
            weights: std::array::from_fn(|q| T::lit(0.5 * w[q])),
            basis,
        }
    }

    /// First stencil node and cell offset for cell `c` out of `n_cells >= 3`.
    #[inline]
    pub fn stencil(c: usize, n_cells: usize) -> (usize, usize) {
        if c == 0 {
            (0, 0)
        } else if c + 1 >= n_cells {
            (n_cells - 3, 2)
        } else {
            (c - 1, 1)
        }
    }

    #[inline]
    pub fn basis(&self, offset: usize, q: usize) -> &[T; 4] {
        &self.basis[offset][q]
    }

    /// Interpolated value of nodal `data` at Gauss point `q` of cell `c`.
    #[inline]
    pub fn interp(&self, data: &[T], c: usize, n_cells: usize, q: usize) -> T {
        let (st, off) = Self::stencil(c, n_cells);
        let b = &self.basis[off][q];
        b[0] * data[st] + b[1] * data[st + 1] + b[2] * data[st + 2] + b[3] * data[st + 3]
    }

    /// Strided variant: node `k` of the stencil lives at `data[(st + k) * stride + col]`.
    #[inline]
    pub fn interp_strided(&self, data: &[T], stride: usize, col: usize, c: usize, n_cells: usize, q: usize) -> T {
        let (st, off) = Self::stencil(c, n_cells);
        let b = &self.basis[off][q];
        let mut acc = T::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += *bk * data[(st + k) * stride + col];
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_weights_sum_to_two() {
        for n in [1, 2, 4, 7, 16, 48, 96] {
            let (x, w) = gauss_legendre_f64(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn legendre_exact_for_polynomials() {
        let rule = GaussLegendre::<f64>::new(5);
        let v = rule.integrate(|x| x.powi(9) + 3.0 * x.powi(8), 0.0, 1.0);
        assert_relative_eq!(v, 0.1 + 3.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn kronrod_handles_peaks() {
        let r = adaptive(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-14, 1e-12, 500);
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert_relative_eq!(r.value, exact, max_relative = 1e-11);
    }

    #[test]
    fn cell_rule_exact_for_cubics() {
        let rule = CellRule::<f64>::new();
        let n = 6;
        let h = 0.3;
        let data: Vec<f64> = (0..=n)
            .map(|i| {
                let x = i as f64 * h;
                x * x * x - 2.0 * x + 1.0
            })
            .collect();
        let mut total = 0.0;
        for c in 0..n {
            for q in 0..4 {
                total += h * rule.weights[q] * rule.interp(&data, c, n, q);
            }
        }
        let l = n as f64 * h;
        assert_relative_eq!(total, l.powi(4) / 4.0 - l * l + l, epsilon = 1e-13);
    }
}

//! Logarithmic grids and sampled functions.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform axis `start + k * step`, `k = 0..=n_cells`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAxis<T> {
    pub start: T,
    pub end: T,
    pub n_cells: usize,
}

impl<T: Real> UniformAxis<T> {
    pub fn new(start: T, end: T, n_cells: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || start >= end || n_cells < 1 {
            return Err(Error::InvalidRange(format!(
                "axis needs finite start < end and n_cells >= 1, got [{start}, {end}] with {n_cells}"
            )));
        }
        Ok(Self { start, end, n_cells })
    }

    #[inline]
    pub fn step(&self) -> T {
        (self.end - self.start) / T::of_usize(self.n_cells)
    }

    #[inline]
    pub fn node(&self, k: usize) -> T {
        if k == self.n_cells {
            self.end
        } else {
            self.start + self.step() * T::of_usize(k)
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }
}

/// Grid uniform in `s = ln x_d`, optionally with a transverse axis `x_1`
/// and a time axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid<T> {
    pub s: UniformAxis<T>,
    pub transverse: Option<UniformAxis<T>>,
    pub time: Option<UniformAxis<T>>,
}

/// Builds a one-dimensional log grid with `n_cells >= 2`.
pub fn make_log_grid<T: Real>(s_min: T, s_max: T, n_cells: usize) -> Result<LogGrid<T>> {
    LogGrid::new(s_min, s_max, n_cells)
}

impl<T: Real> LogGrid<T> {
    pub fn new(s_min: T, s_max: T, n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::InvalidRange(format!("need n_cells >= 2, got {n_cells}")));
        }
        Ok(Self { s: UniformAxis::new(s_min, s_max, n_cells)?, transverse: None, time: None })
    }

    /// Grid from `s_min` with spacing close to `h`, ending exactly at `s_max`.
    pub fn with_spacing(s_min: T, s_max: T, h: T) -> Result<Self> {
        if !(h > T::zero()) {
            return Err(Error::InvalidRange(format!("spacing must be positive, got {h}")));
        }
        let n = ((s_max - s_min) / h).ceil().to_usize().unwrap_or(0).max(2);
        Self::new(s_min, s_max, n)
    }

    pub fn with_transverse(mut self, axis: UniformAxis<T>) -> Self {
        self.transverse = Some(axis);
        self
    }

    pub fn with_time(mut self, axis: UniformAxis<T>) -> Self {
        self.time = Some(axis);
        self
    }

    #[inline]
    pub fn s_min(&self) -> T {
        self.s.start
    }

    #[inline]
    pub fn s_max(&self) -> T {
        self.s.end
    }

    #[inline]
    pub fn h(&self) -> T {
        self.s.step()
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.s.n_cells
    }

    #[inline]
    pub fn n_s(&self) -> usize {
        self.s.len()
    }

    #[inline]
    pub fn n_t(&self) -> usize {
        self.transverse.map_or(1, |a| a.len())
    }

    /// Number of spatial nodes.
    #[inline]
    pub fn spatial_len(&self) -> usize {
        self.n_s() * self.n_t()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        if self.transverse.is_some() {
            2
        } else {
            1
        }
    }

    #[inline]
    pub fn s_node(&self, i: usize) -> T {
        self.s.node(i)
    }

    #[inline]
    pub fn x_node(&self, i: usize) -> T {
        self.s.node(i).exp()
    }

    pub fn s_nodes(&self) -> Vec<T> {
        self.s.nodes()
    }

    pub fn x_nodes(&self) -> Vec<T> {
        self.s.nodes().into_iter().map(T::exp).collect()
    }

    /// Same grid restricted to nodes `lo..=hi` of the `s` axis.
    pub fn restrict(&self, lo: usize, hi: usize) -> Result<Self> {
        let mut g = *self;
        g.s = UniformAxis::new(self.s_node(lo), self.s_node(hi), hi - lo)?;
        Ok(g)
    }
}

/// Values on the spatial nodes of a grid, `s`-major: index `i * n_t + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    pub grid: LogGrid<T>,
    pub values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(grid: LogGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.spatial_len() {
            return Err(Error::InvalidInput(format!("expected {} values, got {}", grid.spatial_len(), values.len())));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at node {k}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: LogGrid<T>) -> Self {
        Self { values: vec![T::zero(); grid.spatial_len()], grid }
    }

    /// Samples `f(x_d)` on a one-dimensional grid.
    pub fn sample<F: Fn(T) -> T>(grid: LogGrid<T>, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.spatial_len());
        for i in 0..grid.n_s() {
            let v = f(grid.x_node(i));
            for _ in 0..grid.n_t() {
                values.push(v);
            }
        }
        Self::new(grid, values)
    }

    /// Samples `f(x_1, x_d)` on a two-dimensional grid.
    pub fn sample_2d<F: Fn(T, T) -> T>(grid: LogGrid<T>, f: F) -> Result<Self> {
        let axis = grid.transverse.ok_or_else(|| Error::InvalidInput("grid has no transverse axis".into()))?;
        let x1 = axis.nodes();
        let mut values = Vec::with_capacity(grid.spatial_len());
        for i in 0..grid.n_s() {
            let xd = grid.x_node(i);
            values.extend(x1.iter().map(|&y| f(y, xd)));
        }
        Self::new(grid, values)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.grid.n_t() + j]
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// CSV snapshot with columns `s,x,value` (plus `x1` in two dimensions).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let g = &self.grid;
        match g.transverse {
            None => {
                out.push_str("s,x,value\n");
                for i in 0..g.n_s() {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        fmt_sig(g.s_node(i).to_f64_lossy()),
                        fmt_sig(g.x_node(i).to_f64_lossy()),
                        fmt_sig(self.values[i].to_f64_lossy())
                    );
                }
            }
            Some(axis) => {
                out.push_str("s,x,x1,value\n");
                for i in 0..g.n_s() {
                    for j in 0..axis.len() {
                        let _ = writeln!(
                            out,
                            "{},{},{},{}",
                            fmt_sig(g.s_node(i).to_f64_lossy()),
                            fmt_sig(g.x_node(i).to_f64_lossy()),
                            fmt_sig(axis.node(j).to_f64_lossy()),
                            fmt_sig(self.at(i, j).to_f64_lossy())
                        );
                    }
                }
            }
        }
        out
    }
}

/// Values on a space-time grid, time-major: index `k * spatial_len + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeFunction<T> {
    pub grid: LogGrid<T>,
    pub values: Vec<T>,
}

impl<T: Real> SpaceTimeFunction<T> {
    pub fn new(grid: LogGrid<T>, values: Vec<T>) -> Result<Self> {
        let time = grid.time.ok_or_else(|| Error::InvalidInput("grid has no time axis".into()))?;
        if values.len() != time.len() * grid.spatial_len() {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                time.len() * grid.spatial_len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite space-time value".into()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(t, x_d)` on a one-dimensional space-time grid.
    pub fn sample<F: Fn(T, T) -> T>(grid: LogGrid<T>, f: F) -> Result<Self> {
        let time = grid.time.ok_or_else(|| Error::InvalidInput("grid has no time axis".into()))?;
        let mut values = Vec::with_capacity(time.len() * grid.spatial_len());
        for k in 0..time.len() {
            let t = time.node(k);
            for i in 0..grid.n_s() {
                let v = f(t, grid.x_node(i));
                for _ in 0..grid.n_t() {
                    values.push(v);
                }
            }
        }
        Self::new(grid, values)
    }

    pub fn n_times(&self) -> usize {
        self.grid.time.map_or(0, |a| a.len())
    }

    /// Spatial slice at time index `k`.
    pub fn slice(&self, k: usize) -> GridFunction<T> {
        let n = self.grid.spatial_len();
        let mut g = self.grid;
        g.time = None;
        GridFunction { grid: g, values: self.values[k * n..(k + 1) * n].to_vec() }
    }
}

/// Formats with 12 significant digits in scientific notation.
pub fn fmt_sig(v: f64) -> String {
    format!("{v:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_node_grid() {
        let g = make_log_grid(0.0f64, 1.0, 2).unwrap();
        assert_eq!(g.s_nodes(), vec![0.0, 0.5, 1.0]);
        let x = g.x_nodes();
        assert!((x[1] - 0.5f64.exp()).abs() < 1e-15);
        assert!((x[2] - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(make_log_grid(1.0f64, 1.0, 4).is_err());
        assert!(make_log_grid(0.0f64, 1.0, 1).is_err());
        assert!(make_log_grid(f64::NAN, 1.0, 4).is_err());
    }

    #[test]
    fn rejects_non_finite_values() {
        let g = make_log_grid(0.0f64, 1.0, 2).unwrap();
        assert!(GridFunction::new(g, vec![0.0, f64::INFINITY, 1.0]).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = make_log_grid(0.0f64, 1.0, 2).unwrap();
        let u = GridFunction::sample(g, |x| x).unwrap();
        let csv = u.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("s,x,value\n"));
    }
}

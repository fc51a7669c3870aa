//! Parabolic problems `a₀ u_t - x² a u_xx + x b u_x + c u + λ c₀ u = f`:
//! a Crank-Nicolson stepper in `s = ln x`, mixed norms in time, and the
//! heat-kernel solution behind the exterior-weight growth experiment.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::elliptic::{assemble, Closure};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, LogGrid, SpaceTimeFunction};
use crate::indicial::indicial_roots;
use crate::quadrature::{adaptive, GaussLegendre};
use crate::scalar::Real;
use crate::spaces::{log_derivatives, weighted_lp_norm, NormParams, TimeWeight};

/// Coefficient of `(t, x)`.
#[derive(Clone)]
pub enum SpaceTimeCoefficient<T> {
    Constant(T),
    Function(Arc<dyn Fn(T, T) -> T + Send + Sync>),
}

impl<T: Real> SpaceTimeCoefficient<T> {
    pub fn function<F: Fn(T, T) -> T + Send + Sync + 'static>(f: F) -> Self {
        SpaceTimeCoefficient::Function(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, t: T, x: T) -> T {
        match self {
            SpaceTimeCoefficient::Constant(c) => *c,
            SpaceTimeCoefficient::Function(f) => f(t, x),
        }
    }

    pub fn as_constant(&self) -> Option<T> {
        match self {
            SpaceTimeCoefficient::Constant(c) => Some(*c),
            SpaceTimeCoefficient::Function(_) => None,
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for SpaceTimeCoefficient<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTimeCoefficient::Constant(c) => write!(f, "Constant({c:?})"),
            SpaceTimeCoefficient::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// `a₀ u_t - x² a u_xx + x b u_x + c u + λ c₀ u`.
#[derive(Debug, Clone)]
pub struct ParabolicOp1D<T> {
    pub a0: SpaceTimeCoefficient<T>,
    pub a: SpaceTimeCoefficient<T>,
    pub b: SpaceTimeCoefficient<T>,
    pub c: SpaceTimeCoefficient<T>,
    pub c0: SpaceTimeCoefficient<T>,
    pub lambda: T,
}

impl<T: Real> ParabolicOp1D<T> {
    /// Constant `a, b, c` with `a₀ = c₀ = 1`.
    pub fn constant(a: T, b: T, c: T, lambda: T) -> Result<Self> {
        if !(a > T::zero()) || !(lambda >= T::zero()) {
            return Err(Error::InvalidInput(format!("need a > 0 and lambda >= 0, got a={a}, lambda={lambda}")));
        }
        Ok(Self {
            a0: SpaceTimeCoefficient::Constant(T::one()),
            a: SpaceTimeCoefficient::Constant(a),
            b: SpaceTimeCoefficient::Constant(b),
            c: SpaceTimeCoefficient::Constant(c),
            c0: SpaceTimeCoefficient::Constant(T::one()),
            lambda,
        })
    }

    /// Decay closure when `a, b, c, c₀` are constant and the roots are real.
    pub fn closure(&self) -> Closure<T> {
        let consts = (self.a.as_constant(), self.b.as_constant(), self.c.as_constant(), self.c0.as_constant());
        if let (Some(a), Some(b), Some(c), Some(c0)) = consts {
            if let Ok(r) = indicial_roots(b / a, (c + self.lambda * c0) / a) {
                return Closure::Decay { alpha: r.alpha, beta: r.beta };
            }
        }
        Closure::Dirichlet
    }

    fn nodal(&self, grid: &LogGrid<T>, t: T) -> (Vec<T>, Vec<T>, Vec<T>, Vec<T>) {
        let xs = grid.x_nodes();
        let a0 = xs.iter().map(|&x| self.a0.eval(t, x)).collect();
        let a = xs.iter().map(|&x| self.a.eval(t, x)).collect();
        let b = xs.iter().map(|&x| self.b.eval(t, x)).collect();
        let k = xs.iter().map(|&x| self.c.eval(t, x) + self.lambda * self.c0.eval(t, x)).collect();
        (a0, a, b, k)
    }
}

/// Crank-Nicolson solve with `u = 0` at the first time node, on the
/// space-time grid of `f`.
pub fn solve_parabolic_fd<T: Real>(op: &ParabolicOp1D<T>, f: &SpaceTimeFunction<T>) -> Result<SpaceTimeFunction<T>> {
    let grid = f.grid;
    if grid.transverse.is_some() {
        return Err(Error::InvalidInput("parabolic solver is one-dimensional".into()));
    }
    let time = grid.time.ok_or_else(|| Error::InvalidInput("grid has no time axis".into()))?;
    let n = grid.n_s();
    let dt = time.step();
    let half = T::lit(0.5);
    let closure = op.closure();
    let mut values = vec![T::zero(); time.len() * n];
    let mut a_prev = {
        let (_, a, b, k) = op.nodal(&grid, time.node(0));
        assemble(&grid, &a, &b, &k, closure)
    };
    for step in 0..time.n_cells {
        let (t0, t1) = (time.node(step), time.node(step + 1));
        let (_, a, b, k) = op.nodal(&grid, t1);
        let a_next = assemble(&grid, &a, &b, &k, closure);
        let (a0, ..) = op.nodal(&grid, (t0 + t1) * half);
        let v0 = &values[step * n..(step + 1) * n];
        let g0 = &f.values[step * n..(step + 1) * n];
        let g1 = &f.values[(step + 1) * n..(step + 2) * n];
        let av0 = a_prev.apply(v0);
        let mut m = a_next.clone();
        let mut rhs = vec![T::zero(); n];
        for i in 0..n {
            let d = a0[i] / dt;
            m.lower[i] *= half;
            m.upper[i] *= half;
            m.diag[i] = d + m.diag[i] * half;
            rhs[i] = d * v0[i] - half * av0[i] + half * (g0[i] + g1[i]);
        }
        if closure == Closure::Dirichlet {
            for i in [0, n - 1] {
                m.lower[i] = T::zero();
                m.upper[i] = T::zero();
                m.diag[i] = T::one();
                rhs[i] = T::zero();
            }
        }
        let v1 = m.solve(&rhs)?;
        values[(step + 1) * n..(step + 2) * n].copy_from_slice(&v1);
        a_prev = a_next;
    }
    SpaceTimeFunction::new(grid, values)
}

/// `u_t` by centred differences, one-sided second order at the ends.
pub fn time_derivative<T: Real>(u: &SpaceTimeFunction<T>) -> Result<SpaceTimeFunction<T>> {
    let time = u.grid.time.ok_or_else(|| Error::InvalidInput("grid has no time axis".into()))?;
    let nt = time.len();
    if nt < 3 {
        return Err(Error::InvalidRange("time derivative needs at least 3 time nodes".into()));
    }
    let n = u.grid.spatial_len();
    let dt = time.step();
    let two = T::lit(2.0);
    let at = |k: usize, i: usize| u.values[k * n + i];
    let mut out = vec![T::zero(); nt * n];
    for k in 0..nt {
        for i in 0..n {
            out[k * n + i] = if k == 0 {
                (-T::lit(3.0) * at(0, i) + T::lit(4.0) * at(1, i) - at(2, i)) / (two * dt)
            } else if k == nt - 1 {
                (T::lit(3.0) * at(k, i) - T::lit(4.0) * at(k - 1, i) + at(k - 2, i)) / (two * dt)
            } else {
                (at(k + 1, i) - at(k - 1, i)) / (two * dt)
            };
        }
    }
    SpaceTimeFunction::new(u.grid, out)
}

/// `∫ ℓ_j(t) ω(t) dt` over `[lo, hi]` for the quadratic Lagrange basis on `nodes`.
fn quadratic_weights<T: Real>(nodes: [T; 3], lo: T, hi: T, omega: TimeWeight<T>) -> [T; 3] {
    let basis = |j: usize, t: T| {
        let mut l = T::one();
        for (m, &tm) in nodes.iter().enumerate() {
            if m != j {
                l *= (t - tm) / (nodes[j] - tm);
            }
        }
        l
    };
    let width = hi - lo;
    let near_zero = match omega {
        TimeWeight::ConstantOne => false,
        TimeWeight::Power(_) => lo - T::lit(2.0) * width <= T::zero() && hi + T::lit(2.0) * width >= T::zero(),
    };
    if !near_zero {
        let rule = GaussLegendre::<T>::new(8);
        let (xs, ws) = rule.mapped(lo, hi);
        let mut out = [T::zero(); 3];
        for (x, w) in xs.iter().zip(&ws) {
            let om = omega.eval(*x);
            for (j, o) in out.iter_mut().enumerate() {
                *o += *w * om * basis(j, *x);
            }
        }
        return out;
    }
    let gamma = match omega {
        TimeWeight::Power(g) => g,
        TimeWeight::ConstantOne => T::zero(),
    };
    // μ_k = ∫ t^k |t|^γ dt, split at zero.
    let moment = |k: i32, a: T, b: T| -> T {
        let e = T::of_usize(k as usize) + gamma + T::one();
        let pos = |x: T, y: T| (y.powf(e) - x.powf(e)) / e;
        let mut acc = T::zero();
        if b > T::zero() {
            acc += pos(a.max(T::zero()), b);
        }
        if a < T::zero() {
            let sign = if k % 2 == 0 { T::one() } else { -T::one() };
            acc += sign * pos((-b).max(T::zero()), -a);
        }
        acc
    };
    let mu = [moment(0, lo, hi), moment(1, lo, hi), moment(2, lo, hi)];
    let mut out = [T::zero(); 3];
    for (j, o) in out.iter_mut().enumerate() {
        let others: Vec<T> = (0..3).filter(|&m| m != j).map(|m| nodes[m]).collect();
        let den = (nodes[j] - others[0]) * (nodes[j] - others[1]);
        // (t - p)(t - q) = t² - (p + q) t + p q
        *o = (mu[2] - (others[0] + others[1]) * mu[1] + others[0] * others[1] * mu[0]) / den;
    }
    out
}

/// `∫ g(t) ω(t) dt` for samples `g` on uniform `ts`: quadratic product
/// integration on pairs of cells, a final odd cell taking the quadratic
/// through its last three nodes.
pub fn weighted_time_integral<T: Real>(ts: &[T], g: &[T], omega: TimeWeight<T>) -> Result<T> {
    let n = ts.len();
    if n < 3 || g.len() != n {
        return Err(Error::InvalidInput("time integral needs at least 3 matching samples".into()));
    }
    let mut acc = T::zero();
    let mut k = 0;
    while k + 2 < n {
        let w = quadratic_weights([ts[k], ts[k + 1], ts[k + 2]], ts[k], ts[k + 2], omega);
        acc += w[0] * g[k] + w[1] * g[k + 1] + w[2] * g[k + 2];
        k += 2;
    }
    if k + 1 < n {
        let w = quadratic_weights([ts[n - 3], ts[n - 2], ts[n - 1]], ts[n - 2], ts[n - 1], omega);
        acc += w[0] * g[n - 3] + w[1] * g[n - 2] + w[2] * g[n - 1];
    }
    Ok(acc)
}

/// `(∫_{t_0}^{t_end} ω(t) ‖u(t)‖^q_{L_{p,θ}} dt)^{1/q}`; `t_end` must be a time node.
pub fn mixed_norm<T: Real>(
    u: &SpaceTimeFunction<T>,
    q: T,
    params: &NormParams<T>,
    omega: TimeWeight<T>,
    t_end: T,
) -> Result<T> {
    if !(q > T::one()) {
        return Err(Error::InvalidInput(format!("need q > 1, got {q}")));
    }
    let time = u.grid.time.ok_or_else(|| Error::InvalidInput("grid has no time axis".into()))?;
    let dt = time.step();
    let pos = (t_end - time.start) / dt;
    let last = pos.round();
    if (pos - last).abs() > T::lit(1e-6) || last < T::lit(2.0) || last > T::of_usize(time.n_cells) {
        return Err(Error::InvalidInput(format!("t_end {t_end} is not a time node past the second")));
    }
    let last = last.to_usize().unwrap_or(0);
    let norms: Vec<T> =
        (0..=last).map(|k| weighted_lp_norm(&u.slice(k), params).map(|v| v.powf(q))).collect::<Result<_>>()?;
    let ts: Vec<T> = (0..=last).map(|k| time.node(k)).collect();
    Ok(weighted_time_integral(&ts, &norms, omega)?.powf(q.recip()))
}

/// `x D u` and `x² D² u` slices of a space-time function.
pub fn spatial_derivatives<T: Real>(u: &SpaceTimeFunction<T>) -> Result<(SpaceTimeFunction<T>, SpaceTimeFunction<T>)> {
    let n = u.grid.spatial_len();
    let mut d1 = Vec::with_capacity(u.values.len());
    let mut d2 = Vec::with_capacity(u.values.len());
    for k in 0..u.n_times() {
        let d = log_derivatives(&u.slice(k))?;
        d1.extend_from_slice(&d.vs);
        d2.extend(d.vss.iter().zip(&d.vs).map(|(a, b)| *a - *b));
        debug_assert_eq!(d.vs.len(), n);
    }
    Ok((SpaceTimeFunction::new(u.grid, d1)?, SpaceTimeFunction::new(u.grid, d2)?))
}

/// Terms of `‖u_t‖ + (1+λ)‖u‖ + (1+√λ)‖xDu‖ + ‖x²D²u‖ <= N ‖f‖` in
/// `L_p((0,T); L_{p,θ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicRatioReport<T> {
    pub lambda: T,
    pub u_t: T,
    pub u: T,
    pub xdu: T,
    pub x2d2u: T,
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
}

pub fn parabolic_apriori_ratio<T: Real>(
    op: &ParabolicOp1D<T>,
    f: &SpaceTimeFunction<T>,
    params: &NormParams<T>,
) -> Result<ParabolicRatioReport<T>> {
    let time = f.grid.time.ok_or_else(|| Error::InvalidInput("grid has no time axis".into()))?;
    let (p, t_end) = (params.p, time.end);
    let one = TimeWeight::ConstantOne;
    let rhs = mixed_norm(f, p, params, one, t_end)?;
    if rhs == T::zero() {
        return Err(Error::UndefinedRatio);
    }
    let u = solve_parabolic_fd(op, f)?;
    let ut = time_derivative(&u)?;
    let (d1, d2) = spatial_derivatives(&u)?;
    let n_ut = mixed_norm(&ut, p, params, one, t_end)?;
    let n_u = mixed_norm(&u, p, params, one, t_end)?;
    let n_d1 = mixed_norm(&d1, p, params, one, t_end)?;
    let n_d2 = mixed_norm(&d2, p, params, one, t_end)?;
    let l = op.lambda;
    let lhs = n_ut + (T::one() + l) * n_u + (T::one() + l.sqrt()) * n_d1 + n_d2;
    Ok(ParabolicRatioReport { lambda: l, u_t: n_ut, u: n_u, xdu: n_d1, x2d2u: n_d2, lhs, rhs, ratio: lhs / rhs })
}

/// `erf(p) - erf(q)` for `p > q` without cancellation in the tails.
fn erf_diff(p: f64, q: f64) -> f64 {
    if q > 0.0 {
        libm::erfc(q) - libm::erfc(p)
    } else if p < 0.0 {
        libm::erfc(-p) - libm::erfc(-q)
    } else {
        libm::erf(p) - libm::erf(q)
    }
}

/// Solution of `v_t - a v_yy + c v = 1_{(-1,0)×(0,1)}` on the line (log
/// coordinate `x`), vanishing for `t <= -1`:
/// `v = ∫_{max(t,0)}^{t+1} e^{-cτ} ½[erf(x/(2√(aτ))) - erf((x-1)/(2√(aτ)))] dτ`,
/// integrated in `σ = √τ`.
pub fn heat_kernel_solution(a: f64, c: f64, t: f64, x: f64) -> f64 {
    if t <= -1.0 {
        return 0.0;
    }
    let lo = t.max(0.0).sqrt();
    let hi = (t + 1.0).sqrt();
    let integrand = |sigma: f64| {
        if sigma <= 0.0 {
            return 0.0;
        }
        let r = 2.0 * (a).sqrt() * sigma;
        2.0 * sigma * (-c * sigma * sigma).exp() * 0.5 * erf_diff(x / r, (x - 1.0) / r)
    };
    adaptive(integrand, lo, hi, 0.0, 1e-11, 400).value
}

/// Growth of `N(T) = ∫_{-1}^T ∫ |v(t, x)|^p e^{θx} dx dt` for the heat-kernel
/// solution.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCurve {
    pub t: Vec<f64>,
    pub norm_p: Vec<f64>,
    /// Rate fitted on the last half of the curve.
    pub fitted_rate: f64,
    /// `(a/p) θ² - c p`.
    pub predicted_rate: f64,
    /// Last increment relative to the running total.
    pub last_relative_increment: f64,
}

impl GrowthCurve {
    /// Increments below `1e-6` of the total.
    pub fn bounded(&self) -> bool {
        self.last_relative_increment < 1e-6
    }
}

const GROWTH_DT: f64 = 0.05;

/// `∫ |v(t, x)|^p e^{θ x} dx` by Simpson's rule on a window that follows the
/// peak `2aθt/p` of the weighted integrand.
pub fn weighted_slice_integral(a: f64, c: f64, p: f64, theta: f64, t: f64) -> f64 {
    if t <= -1.0 {
        return 0.0;
    }
    let spread = (a * (t + 1.0)).sqrt();
    let centre = 2.0 * a * theta * t.max(0.0) / p + 0.5;
    let half = 12.0 * spread + 3.0;
    let dx = (spread / 4.0).min(0.05);
    let m = ((2.0 * half / dx / 2.0).ceil() as usize).max(2) * 2;
    let h = 2.0 * half / m as f64;
    let x0 = centre - half;
    let f = |k: usize| {
        let x = x0 + h * k as f64;
        heat_kernel_solution(a, c, t, x).abs().powf(p) * (theta * x).exp()
    };
    let mut acc = f(0) + f(m);
    for k in 1..m {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k);
    }
    acc * h / 3.0
}

/// Weighted norm curve at `t_list` (each `T + 1` a multiple of `0.1`) and the
/// fitted exponential rate of its increments, corrected for the
/// `T^{-(p-1)/2}` prefactor.
pub fn norm_growth_curve(a: f64, c: f64, p: f64, theta: f64, t_list: &[f64]) -> Result<GrowthCurve> {
    if !(a > 0.0 && c > 0.0 && p > 1.0) {
        return Err(Error::InvalidInput("need a > 0, c > 0, p > 1".into()));
    }
    if t_list.len() < 4 || t_list.windows(2).any(|w| w[1] <= w[0]) || t_list[0] <= 0.0 {
        return Err(Error::InvalidInput("t_list needs at least 4 increasing positive entries".into()));
    }
    let pair = 2.0 * GROWTH_DT;
    let idx: Vec<usize> = t_list
        .iter()
        .map(|&t| {
            let k = (t + 1.0) / pair;
            if (k - k.round()).abs() > 1e-9 {
                Err(Error::InvalidInput(format!("T = {t} is not on the 0.1 time lattice from -1")))
            } else {
                Ok(2 * k.round() as usize)
            }
        })
        .collect::<Result<_>>()?;
    let last = *idx.last().unwrap();
    let slices: Vec<f64> = (0..=last)
        .into_par_iter()
        .map(|k| weighted_slice_integral(a, c, p, theta, -1.0 + GROWTH_DT * k as f64))
        .collect();
    let mut cumulative = vec![0.0; last + 1];
    for k in (2..=last).step_by(2) {
        cumulative[k] = cumulative[k - 2] + GROWTH_DT / 3.0 * (slices[k - 2] + 4.0 * slices[k - 1] + slices[k]);
    }
    let norm_p: Vec<f64> = idx.iter().map(|&k| cumulative[k]).collect();
    let start = (t_list.len() / 2).max(1);
    let (mut sx, mut sy, mut sxx, mut sxy, mut cnt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in start..t_list.len() {
        let inc = norm_p[k] - norm_p[k - 1];
        if inc <= 0.0 {
            continue;
        }
        let tm = t_list[k];
        let y = inc.ln() + 0.5 * (p - 1.0) * tm.ln();
        sx += tm;
        sy += y;
        sxx += tm * tm;
        sxy += tm * y;
        cnt += 1.0;
    }
    let fitted_rate = if cnt >= 2.0 { (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) } else { f64::NAN };
    let n = norm_p.len();
    let last_relative_increment = (norm_p[n - 1] - norm_p[n - 2]) / norm_p[n - 1];
    Ok(GrowthCurve {
        t: t_list.to_vec(),
        norm_p,
        fitted_rate,
        predicted_rate: a / p * theta * theta - c * p,
        last_relative_increment,
    })
}

/// `GridFunction` of a time slice, re-exported for callers assembling forcings.
pub fn slice<T: Real>(u: &SpaceTimeFunction<T>, k: usize) -> GridFunction<T> {
    u.slice(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformAxis;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_vanishes_before_forcing() {
        assert_eq!(heat_kernel_solution(1.0, 1.0, -1.0, 0.5), 0.0);
        assert_eq!(heat_kernel_solution(1.0, 1.0, -3.0, 0.5), 0.0);
        assert!(heat_kernel_solution(1.0, 1.0, -0.5, 0.5) > 0.0);
    }

    #[test]
    fn kernel_is_nonnegative() {
        for t in [-0.9, -0.1, 0.0, 0.5, 3.0] {
            for x in [-8.0, -1.0, 0.0, 0.5, 1.0, 4.0, 12.0] {
                assert!(heat_kernel_solution(1.0, 1.0, t, x) >= 0.0);
            }
        }
    }

    #[test]
    fn weighted_constant_time_factor() {
        let ts: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        let g = vec![1.0; ts.len()];
        let v = weighted_time_integral(&ts, &g, TimeWeight::Power(0.5)).unwrap();
        assert_relative_eq!(v, 2.0 / 3.0, epsilon = 1e-13);
        let ts: Vec<f64> = (0..=7).map(|k| k as f64 / 7.0).collect();
        let g: Vec<f64> = ts.iter().map(|t| t * t).collect();
        let v = weighted_time_integral(&ts, &g, TimeWeight::ConstantOne).unwrap();
        assert_relative_eq!(v, 1.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn zero_forcing_zero_solution() {
        let grid = LogGrid::new(-3.0, 3.0, 60).unwrap().with_time(UniformAxis::new(0.0, 1.0, 10).unwrap());
        let f = SpaceTimeFunction::new(grid, vec![0.0; 11 * 61]).unwrap();
        let op = ParabolicOp1D::constant(1.0, -1.0, 1.0, 0.0).unwrap();
        let u = solve_parabolic_fd(&op, &f).unwrap();
        assert!(u.values.iter().all(|v| *v == 0.0));
    }
}

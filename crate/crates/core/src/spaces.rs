//! Weighted norms `L_{p,θ}`, `H^n_{p,θ}`, the dyadic equivalent norm and the
//! A_q constant of power time weights.
//!
//! Every integral is computed in `s = ln x_d`, where the measure
//! `x_d^{θ-1} dx` becomes `e^{θ s} ds` (times `dx_1` in two dimensions).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fd::{derivative_cols, derivative_rows, Stencil};
use crate::grid::{GridFunction, LogGrid};
use crate::quadrature::CellRule;
use crate::scalar::Real;

/// Time weight `ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeWeight<T> {
    ConstantOne,
    /// `ω(t) = |t|^γ`.
    Power(T),
}

impl<T: Real> TimeWeight<T> {
    pub fn eval(&self, t: T) -> T {
        match *self {
            TimeWeight::ConstantOne => T::one(),
            TimeWeight::Power(g) => t.abs().powf(g),
        }
    }

    /// Power weights belong to `A_q` exactly for `γ ∈ (-1, q-1)`.
    pub fn in_aq(&self, q: T) -> bool {
        match *self {
            TimeWeight::ConstantOne => true,
            TimeWeight::Power(g) => g > -T::one() && g < q - T::one(),
        }
    }
}

/// Exponents of the spatial norm and, optionally, of a mixed norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams<T> {
    pub p: T,
    pub theta: T,
    pub q: Option<T>,
    pub time_weight: Option<TimeWeight<T>>,
}

impl<T: Real> NormParams<T> {
    /// Accepts `p >= 1`; the estimates themselves need `p > 1`.
    pub fn new(p: T, theta: T) -> Result<Self> {
        if !(p >= T::one()) || !p.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidInput(format!("need finite p >= 1 and theta, got p={p}, theta={theta}")));
        }
        Ok(Self { p, theta, q: None, time_weight: None })
    }

    pub fn with_mixed(mut self, q: T, omega: TimeWeight<T>) -> Result<Self> {
        if !(q > T::one()) {
            return Err(Error::InvalidInput(format!("need q > 1, got {q}")));
        }
        self.q = Some(q);
        self.time_weight = Some(omega);
        Ok(self)
    }

    pub fn with_theta(mut self, theta: T) -> Self {
        self.theta = theta;
        self
    }
}

/// Integral of a pointwise combination of nodal fields, with the marginal
/// integrands at the four truncation edges (`s_min`, `s_max`, `x1_min`, `x1_max`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub total: T,
    pub edges: [T; 4],
}

impl<T: Real> Integral<T> {
    /// Fails when an edge integrand exceeds `1e-3` of the total.
    pub fn check(&self) -> Result<T> {
        let tol = T::lit(1e-3) * self.total.abs();
        for &e in &self.edges {
            if e.abs() > tol && self.total != T::zero() {
                return Err(Error::TruncationDominated {
                    boundary: e.to_f64_lossy(),
                    interior: self.total.to_f64_lossy(),
                });
            }
        }
        Ok(self.total)
    }
}

const MAX_FIELDS: usize = 8;

/// Integrates `f(s, x1, fields)` over the spatial grid with the cell rule.
pub fn integrate<T, F>(grid: &LogGrid<T>, fields: &[&[T]], f: F) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(T, T, &[T]) -> T + Sync,
{
    let n = grid.n_cells();
    if n < 3 {
        return Err(Error::InvalidRange(format!("quadrature needs at least 3 cells, got {n}")));
    }
    assert!(fields.len() <= MAX_FIELDS);
    let nf = fields.len();
    let rule = CellRule::<T>::new();
    let h = grid.h();
    let s0 = grid.s_min();
    match grid.transverse {
        None => {
            let cells: Vec<T> = (0..n)
                .into_par_iter()
                .map(|c| {
                    let mut buf = [T::zero(); MAX_FIELDS];
                    let sc = s0 + h * T::of_usize(c);
                    let mut acc = T::zero();
                    for q in 0..4 {
                        for (k, fld) in fields.iter().enumerate() {
                            buf[k] = rule.interp(fld, c, n, q);
                        }
                        acc += rule.weights[q] * f(sc + h * rule.points[q], T::zero(), &buf[..nf]);
                    }
                    acc
                })
                .collect();
            let total = cells.into_iter().sum::<T>() * h;
            let node = |i: usize| {
                let mut buf = [T::zero(); MAX_FIELDS];
                for (k, fld) in fields.iter().enumerate() {
                    buf[k] = fld[i];
                }
                f(grid.s_node(i), T::zero(), &buf[..nf])
            };
            Ok(Integral { total, edges: [node(0), node(n), T::zero(), T::zero()] })
        }
        Some(axis) => {
            let m = axis.n_cells;
            if m < 3 {
                return Err(Error::InvalidRange(format!("transverse quadrature needs at least 3 cells, got {m}")));
            }
            let nt = axis.len();
            let k = axis.step();
            let ncol = 4 * m;
            let x1_col: Vec<T> =
                (0..ncol).map(|col| axis.start + k * (T::of_usize(col / 4) + rule.points[col % 4])).collect();
            let w_col: Vec<T> = (0..ncol).map(|col| rule.weights[col % 4]).collect();
            // Interpolate each row to the transverse Gauss columns.
            let rows: Vec<Vec<T>> = fields
                .iter()
                .map(|fld| {
                    let mut out = vec![T::zero(); (n + 1) * ncol];
                    out.par_chunks_mut(ncol).enumerate().for_each(|(i, row)| {
                        let src = &fld[i * nt..(i + 1) * nt];
                        for (col, r) in row.iter_mut().enumerate() {
                            *r = rule.interp(src, col / 4, m, col % 4);
                        }
                    });
                    out
                })
                .collect();
            let cells: Vec<T> = (0..n)
                .into_par_iter()
                .map(|c| {
                    let mut buf = [T::zero(); MAX_FIELDS];
                    let sc = s0 + h * T::of_usize(c);
                    let mut acc = T::zero();
                    for q in 0..4 {
                        let s = sc + h * rule.points[q];
                        let mut row_acc = T::zero();
                        for col in 0..ncol {
                            for (kf, r) in rows.iter().enumerate() {
                                buf[kf] = rule.interp_strided(r, ncol, col, c, n, q);
                            }
                            row_acc += w_col[col] * f(s, x1_col[col], &buf[..nf]);
                        }
                        acc += rule.weights[q] * row_acc;
                    }
                    acc
                })
                .collect();
            let total = cells.into_iter().sum::<T>() * h * k;
            let row_marginal = |i: usize| {
                let mut buf = [T::zero(); MAX_FIELDS];
                let s = grid.s_node(i);
                let mut acc = T::zero();
                for col in 0..ncol {
                    for (kf, r) in rows.iter().enumerate() {
                        buf[kf] = r[i * ncol + col];
                    }
                    acc += w_col[col] * f(s, x1_col[col], &buf[..nf]);
                }
                acc * k
            };
            let col_marginal = |j: usize| {
                let mut buf = [T::zero(); MAX_FIELDS];
                let x1 = axis.node(j);
                let mut acc = T::zero();
                for c in 0..n {
                    let sc = s0 + h * T::of_usize(c);
                    for q in 0..4 {
                        for (kf, fld) in fields.iter().enumerate() {
                            buf[kf] = rule.interp_strided(fld, nt, j, c, n, q);
                        }
                        acc += rule.weights[q] * f(sc + h * rule.points[q], x1, &buf[..nf]);
                    }
                }
                acc * h
            };
            Ok(Integral { total, edges: [row_marginal(0), row_marginal(n), col_marginal(0), col_marginal(m)] })
        }
    }
}

fn lp_integral<T: Real>(u: &GridFunction<T>, params: &NormParams<T>) -> Result<Integral<T>> {
    let (p, theta) = (params.p, params.theta);
    integrate(&u.grid, &[&u.values], |s, _, v| v[0].abs().powf(p) * (theta * s).exp())
}

/// `‖u‖_{L_{p,θ}}` with the truncation check.
pub fn weighted_lp_norm<T: Real>(u: &GridFunction<T>, params: &NormParams<T>) -> Result<T> {
    Ok(lp_integral(u, params)?.check()?.powf(params.p.recip()))
}

/// `‖u‖_{L_{p,θ}}` over the truncated grid, without the truncation check.
pub fn truncated_lp_norm<T: Real>(u: &GridFunction<T>, params: &NormParams<T>) -> Result<T> {
    Ok(lp_integral(u, params)?.total.powf(params.p.recip()))
}

/// Nodal derivatives in log coordinates, 4th-order accurate.
///
/// `vs = x_d ∂_d u`, `vss = ∂_s² v`; in two dimensions also `d1 = ∂_1 u`,
/// `d11 = ∂_1² u` and `d1s = ∂_1 ∂_s v`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDerivatives<T> {
    pub v: Vec<T>,
    pub vs: Vec<T>,
    pub vss: Vec<T>,
    pub d1: Vec<T>,
    pub d11: Vec<T>,
    pub d1s: Vec<T>,
}

pub fn log_derivatives<T: Real>(u: &GridFunction<T>) -> Result<LogDerivatives<T>> {
    log_derivatives_with(u, 4)
}

/// As [`log_derivatives`] with a chosen even accuracy order.
pub fn log_derivatives_with<T: Real>(u: &GridFunction<T>, accuracy: usize) -> Result<LogDerivatives<T>> {
    let g = &u.grid;
    let st1 = Stencil::<T>::new(1, accuracy);
    let st2 = Stencil::<T>::new(2, accuracy);
    let need = st2.min_points();
    if g.n_s() < need || (g.transverse.is_some() && g.n_t() < need) {
        return Err(Error::InvalidRange(format!("derivatives need at least {need} nodes per axis")));
    }
    let (ns, nt, h) = (g.n_s(), g.n_t(), g.h());
    let vs = derivative_rows(&u.values, ns, nt, h, &st1);
    let vss = derivative_rows(&u.values, ns, nt, h, &st2);
    let (d1, d11, d1s) = match g.transverse {
        None => (Vec::new(), Vec::new(), Vec::new()),
        Some(axis) => {
            let k = axis.step();
            (
                derivative_cols(&u.values, ns, nt, k, &st1),
                derivative_cols(&u.values, ns, nt, k, &st2),
                derivative_cols(&vs, ns, nt, k, &st1),
            )
        }
    };
    Ok(LogDerivatives { v: u.values.clone(), vs, vss, d1, d11, d1s })
}

/// `|x D u|` and `|x² D² u|` (Euclidean / Frobenius) from derivative samples.
#[inline]
fn grad_terms<T: Real>(s: T, two_d: bool, f: &[T]) -> (T, T) {
    // f = [v, vs, vss, d1, d11, d1s]
    if !two_d {
        (f[1].abs(), (f[2] - f[1]).abs())
    } else {
        let e = s.exp();
        let g1 = e * f[3];
        let h11 = e * e * f[4];
        let h1d = e * f[5];
        let hdd = f[2] - f[1];
        ((g1 * g1 + f[1] * f[1]).sqrt(), (h11 * h11 + T::lit(2.0) * h1d * h1d + hdd * hdd).sqrt())
    }
}

fn field_refs<T: Real>(d: &LogDerivatives<T>, two_d: bool) -> Vec<&[T]> {
    let mut v: Vec<&[T]> = vec![&d.v, &d.vs, &d.vss];
    if two_d {
        v.extend([&d.d1[..], &d.d11[..], &d.d1s[..]]);
    }
    v
}

/// `(‖u‖, ‖x D u‖, ‖x² D² u‖)` in `L_{p,θ}`, each truncation-checked.
pub fn sobolev_components<T: Real>(u: &GridFunction<T>, params: &NormParams<T>) -> Result<[T; 3]> {
    let d = log_derivatives(u)?;
    sobolev_components_from(&u.grid, &d, params, true)
}

pub fn sobolev_components_from<T: Real>(
    grid: &LogGrid<T>,
    d: &LogDerivatives<T>,
    params: &NormParams<T>,
    checked: bool,
) -> Result<[T; 3]> {
    let two_d = grid.transverse.is_some();
    let fields = field_refs(d, two_d);
    let (p, theta) = (params.p, params.theta);
    let mut out = [T::zero(); 3];
    for (k, o) in out.iter_mut().enumerate() {
        let integral = integrate(grid, &fields, |s, _, f| {
            let val = match k {
                0 => f[0].abs(),
                1 => grad_terms(s, two_d, f).0,
                _ => grad_terms(s, two_d, f).1,
            };
            val.powf(p) * (theta * s).exp()
        })?;
        let total = if checked { integral.check()? } else { integral.total };
        *o = total.powf(p.recip());
    }
    Ok(out)
}

/// `(Σ_{i <= order} ‖x^i D^i u‖^p)^{1/p}`.
pub fn weighted_sobolev_norm<T: Real>(u: &GridFunction<T>, order: usize, params: &NormParams<T>) -> Result<T> {
    if order > 2 {
        return Err(Error::InvalidInput(format!("order must be 0, 1 or 2, got {order}")));
    }
    let comps = sobolev_components(u, params)?;
    let p = params.p;
    Ok(comps[..=order].iter().map(|c| c.powf(p)).sum::<T>().powf(p.recip()))
}

/// Smooth cutoff `ζ(x) = κ φ(ln x)` with `φ(t) = exp(-1/(1-t²))` on `|t| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicCutoff<T> {
    pub kappa: T,
    pub p: T,
    /// Minimum over `s` of `Σ_n ζ^p(e^{s-n})`.
    pub covering_min: T,
}

#[inline]
fn bump_derivs<T: Real>(t: T) -> (T, T, T) {
    let one = T::one();
    if t.abs() >= one {
        return (T::zero(), T::zero(), T::zero());
    }
    let w = one - t * t;
    let phi = (-w.recip()).exp();
    let g = -T::lit(2.0) * t / (w * w);
    let dg = -T::lit(2.0) / (w * w) - T::lit(8.0) * t * t / (w * w * w);
    (phi, phi * g, phi * (g * g + dg))
}

impl<T: Real> DyadicCutoff<T> {
    /// Scales the profile so the covering sum has minimum `1.05`.
    pub fn new(p: T) -> Self {
        let sum = |s: f64| {
            let pf = p.to_f64_lossy();
            bump_derivs(s).0.powf(pf) + bump_derivs(s - 1.0).0.powf(pf)
        };
        let mut min = f64::INFINITY;
        let samples = 20_000;
        for k in 0..=samples {
            min = min.min(sum(k as f64 / samples as f64));
        }
        let kappa = (1.05 / min).powf(1.0 / p.to_f64_lossy());
        let covering_min = T::lit(min * kappa.powf(p.to_f64_lossy()));
        Self { kappa: T::lit(kappa), p, covering_min }
    }

    pub fn eval(&self, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        self.kappa * bump_derivs(x.ln()).0
    }

    /// `ζ(e^σ)` and its first two `σ`-derivatives.
    pub fn log_profile(&self, sigma: T) -> (T, T, T) {
        let (a, b, c) = bump_derivs(sigma);
        (self.kappa * a, self.kappa * b, self.kappa * c)
    }

    /// `Σ_n ζ^p(e^{s-n})` at `s`.
    pub fn covering_sum(&self, s: T) -> T {
        let base = s.floor();
        let mut acc = T::zero();
        for d in -1i32..=2 {
            let n = base + T::lit(d as f64);
            acc += self.log_profile(s - n).0.powf(self.p);
        }
        acc
    }
}

/// `(Σ_m e^{m(θ+d-1)} ‖u(e^m ·) ζ‖^p_{W^n_p})^{1/p}` over every dyadic window
/// meeting the grid.
pub fn dyadic_norm<T: Real>(
    u: &GridFunction<T>,
    order: usize,
    params: &NormParams<T>,
    zeta: &DyadicCutoff<T>,
) -> Result<T> {
    if order > 2 {
        return Err(Error::InvalidInput(format!("order must be 0, 1 or 2, got {order}")));
    }
    lp_integral(u, params)?.check()?;
    let d = log_derivatives(u)?;
    let g = &u.grid;
    let two_d = g.transverse.is_some();
    let (p, theta) = (params.p, params.theta);
    let m_lo = (g.s_min() - T::one()).floor().to_i64().unwrap_or(0);
    let m_hi = (g.s_max() + T::one()).ceil().to_i64().unwrap_or(0);
    let fields = field_refs(&d, two_d);
    let two = T::lit(2.0);
    let mut total = T::zero();
    for m in m_lo..=m_hi {
        let mf = T::lit(m as f64);
        if mf + T::one() <= g.s_min() || mf - T::one() >= g.s_max() {
            continue;
        }
        let em = mf.exp();
        let integral = integrate(g, &fields, |s, _, f| {
            let sigma = s - mf;
            let (z, zs, zss) = zeta.log_profile(sigma);
            if z == T::zero() && zs == T::zero() && zss == T::zero() {
                return T::zero();
            }
            let emsig = (-sigma).exp();
            let w = f[0] * z;
            let ws = f[1] * z + f[0] * zs;
            let wss = f[2] * z + two * f[1] * zs + f[0] * zss;
            let mut acc = w.abs().powf(p);
            if order >= 1 {
                let gd = emsig * ws;
                let g1 = if two_d { em * f[3] * z } else { T::zero() };
                acc += (gd * gd + g1 * g1).sqrt().powf(p);
            }
            if order >= 2 {
                let hdd = emsig * emsig * (wss - ws);
                let (h11, h1d) = if two_d {
                    (em * em * f[4] * z, em * emsig * (f[5] * z + f[3] * zs))
                } else {
                    (T::zero(), T::zero())
                };
                acc += (hdd * hdd + two * h1d * h1d + h11 * h11).sqrt().powf(p);
            }
            acc * (mf * theta + sigma).exp()
        })?;
        total += integral.total;
    }
    Ok(total.powf(p.recip()))
}

/// Sampling window for [`muckenhoupt_constant`]: centres `t` in `±[r_min, t_max]`
/// and `0`, radii in `[r_min, r_max]`, log-spaced with `samples` per decade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AqWindow<T> {
    pub t_max: T,
    pub r_min: T,
    pub r_max: T,
    pub samples: usize,
}

fn power_average(gamma: f64, a: f64, b: f64) -> f64 {
    // Mean of |t|^γ over [a, b].
    let one_side = |lo: f64, hi: f64| -> f64 {
        if gamma <= -1.0 && lo == 0.0 {
            return f64::INFINITY;
        }
        if gamma == -1.0 {
            (hi / lo).ln()
        } else {
            (hi.powf(gamma + 1.0) - lo.powf(gamma + 1.0)) / (gamma + 1.0)
        }
    };
    let integral = if a >= 0.0 {
        one_side(a, b)
    } else if b <= 0.0 {
        one_side(-b, -a)
    } else {
        one_side(0.0, -a) + one_side(0.0, b)
    };
    integral / (b - a)
}

fn logspace(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    (0..=n).map(|k| lo * (hi / lo).powf(k as f64 / n as f64)).collect()
}

fn sampled_aq(gamma: f64, q: f64, w: &AqWindow<f64>, per_decade: usize) -> f64 {
    let radii = logspace(w.r_min, w.r_max, per_decade);
    let mut centres = vec![0.0];
    for t in logspace(w.r_min, w.t_max, per_decade) {
        centres.push(t);
        centres.push(-t);
    }
    let dual = -1.0 / (q - 1.0);
    let mut sup: f64 = 1.0;
    for &t in &centres {
        for &r in &radii {
            let a1 = power_average(gamma, t - r, t);
            let a2 = power_average(gamma * dual, t - r, t);
            sup = sup.max(a1 * a2.powf(q - 1.0));
        }
    }
    sup
}

/// Sampled lower bound for `[ω]_{A_q}` over windows `(t - r, t)`.
///
/// The sampling density is tripled twice; the supremum must settle to a
/// relative change below `1e-2`.
pub fn muckenhoupt_constant<T: Real>(omega: TimeWeight<T>, q: T, window: AqWindow<T>) -> Result<T> {
    if !(q > T::one()) {
        return Err(Error::InvalidInput(format!("need q > 1, got {q}")));
    }
    if window.samples == 0
        || !(window.r_min > T::zero())
        || window.r_min >= window.r_max
        || window.t_max <= window.r_min
    {
        return Err(Error::InvalidInput("window needs 0 < r_min < r_max, r_min < t_max and samples >= 1".into()));
    }
    let gamma = match omega {
        TimeWeight::ConstantOne => return Ok(T::one()),
        TimeWeight::Power(g) => g.to_f64_lossy(),
    };
    let w = AqWindow {
        t_max: window.t_max.to_f64_lossy(),
        r_min: window.r_min.to_f64_lossy(),
        r_max: window.r_max.to_f64_lossy(),
        samples: window.samples,
    };
    let qf = q.to_f64_lossy();
    let mut prev = sampled_aq(gamma, qf, &w, w.samples);
    let mut per = w.samples;
    for _ in 0..2 {
        per *= 3;
        let next = sampled_aq(gamma, qf, &w, per);
        if !next.is_finite() || !prev.is_finite() || (next - prev).abs() > 1e-2 * next {
            return Err(Error::DivergentConstant(next));
        }
        prev = next;
    }
    Ok(T::lit(prev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(h_cells: usize) -> GridFunction<f64> {
        let g = LogGrid::new(-12.0, 12.0, h_cells).unwrap();
        GridFunction::sample(g, |x: f64| (-(x.ln()).powi(2)).exp()).unwrap()
    }

    #[test]
    fn gaussian_lp_norm() {
        let u = gaussian(480);
        let n = weighted_lp_norm(&u, &NormParams::new(1.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(n, std::f64::consts::PI.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn gaussian_h1_norm() {
        let u = gaussian(960);
        let params = NormParams::new(2.0, 0.0).unwrap();
        let n = weighted_sobolev_norm(&u, 1, &params).unwrap();
        // ∫ e^{-2s²} ds + ∫ 4 s² e^{-2s²} ds
        let pi = std::f64::consts::PI;
        let exact = ((pi / 2.0).sqrt() + (pi / 2.0).sqrt() / 1.0).sqrt();
        assert_relative_eq!(n, exact, max_relative = 1e-6);
    }

    #[test]
    fn truncation_is_detected() {
        let g = LogGrid::new(-1.5, 1.5, 64).unwrap();
        let u = GridFunction::sample(g, |x: f64| (-(x.ln()).powi(2)).exp()).unwrap();
        let err = weighted_lp_norm(&u, &NormParams::new(2.0, 0.0).unwrap());
        assert!(matches!(err, Err(Error::TruncationDominated { .. })));
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let g = LogGrid::new(-2.0, 2.0, 64).unwrap();
        let u = GridFunction::zeros(g);
        let params = NormParams::new(2.0, 1.0).unwrap();
        assert_eq!(weighted_lp_norm(&u, &params).unwrap(), 0.0);
        assert_eq!(dyadic_norm(&u, 2, &params, &DyadicCutoff::new(2.0)).unwrap(), 0.0);
    }

    #[test]
    fn cutoff_covers_with_margin() {
        for p in [1.5, 2.0, 3.0] {
            let z = DyadicCutoff::<f64>::new(p);
            for k in 0..1000 {
                assert!(z.covering_sum(-3.0 + k as f64 * 0.006) >= 1.05 - 1e-9);
            }
        }
    }

    #[test]
    fn constant_weight_is_exactly_one() {
        let w = AqWindow { t_max: 10.0, r_min: 1e-3, r_max: 10.0, samples: 4 };
        assert_eq!(muckenhoupt_constant(TimeWeight::ConstantOne, 2.0, w).unwrap(), 1.0);
    }

    #[test]
    fn sqrt_weight_is_in_a2() {
        let w = AqWindow { t_max: 100.0, r_min: 1e-3, r_max: 100.0, samples: 6 };
        let c = muckenhoupt_constant(TimeWeight::Power(0.5), 2.0, w).unwrap();
        assert!(c > 4.0 / 3.0 - 1e-9 && c < 2.0, "{c}");
    }

    #[test]
    fn steep_weight_diverges() {
        let w = AqWindow { t_max: 100.0, r_min: 1e-3, r_max: 100.0, samples: 6 };
        let r = muckenhoupt_constant(TimeWeight::Power(1.5), 2.0, w);
        assert!(matches!(r, Err(Error::DivergentConstant(_))));
    }
}

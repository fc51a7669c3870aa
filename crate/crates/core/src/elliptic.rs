//! Solvers for `-x² a u'' + x b u' + (c + λ) u = f` on `(0, ∞)`.
//!
//! In `s = ln x` the equation reads `-a v'' + (a + b) v' + (c + λ) v = g`
//! with homogeneous solutions `e^{-αs}`, `e^{-βs}`.

use crate::error::{Error, Result};
use crate::fd::Stencil;
use crate::grid::{GridFunction, LogGrid};
use crate::indicial::{classify_theta, EllipticOp1D, IndicialRoots, Regime};
use crate::quadrature::{adaptive, CellRule};
use crate::scalar::Real;
use crate::spaces::{
    log_derivatives, sobolev_components, sobolev_components_from, truncated_lp_norm, weighted_lp_norm, NormParams,
};
use crate::tridiag::Tridiagonal;

/// Exponential representation `c_α e^{-αs} + c_β e^{-βs}` of a solution
/// where the forcing vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail<T> {
    pub c_alpha: T,
    pub c_beta: T,
}

#[derive(Debug, Clone)]
pub struct ExplicitSolution<T> {
    pub values: GridFunction<T>,
    pub branch: Regime,
    pub b1: T,
    pub b2: T,
    pub roots: IndicialRoots<T>,
    /// Exact continuation left of the grid.
    pub left: Tail<T>,
    /// Exact continuation right of the grid.
    pub right: Tail<T>,
}

impl<T: Real> ExplicitSolution<T> {
    pub fn grid(&self) -> &LogGrid<T> {
        &self.values.grid
    }
}

fn require_1d<T: Real>(grid: &LogGrid<T>) -> Result<()> {
    if grid.transverse.is_some() || grid.time.is_some() {
        return Err(Error::InvalidInput("expected a one-dimensional spatial grid".into()));
    }
    Ok(())
}

fn require_margin<T: Real>(f: &GridFunction<T>, margin: usize) -> Result<()> {
    let n = f.values.len();
    if f.values[..margin].iter().chain(&f.values[n - margin..]).any(|v| *v != T::zero()) {
        return Err(Error::InvalidInput(format!("forcing must vanish on the {margin} outermost nodes at each end")));
    }
    Ok(())
}

/// Per-cell kernel integrals and the recurrences behind the explicit formulas.
struct Kernels<T> {
    h: T,
    n: usize,
    rule: CellRule<T>,
}

impl<T: Real> Kernels<T> {
    fn new(grid: &LogGrid<T>) -> Self {
        Self { h: grid.h(), n: grid.n_cells(), rule: CellRule::new() }
    }

    /// `∫_{s_c}^{s_{c+1}} e^{γ (s' - anchor)} g ds'` with the anchor at the
    /// cell's left (`right = false`) or right end.
    fn cell(&self, g: &[T], c: usize, gamma: T, right_anchor: bool) -> T {
        let mut acc = T::zero();
        for q in 0..4 {
            let xi = self.rule.points[q] - if right_anchor { T::one() } else { T::zero() };
            acc += self.rule.weights[q] * (gamma * self.h * xi).exp() * self.rule.interp(g, c, self.n, q);
        }
        acc * self.h
    }

    /// `K_γ(s_i) = ∫_{s_0}^{s_i} e^{γ(s'-s_i)} g ds'`.
    fn left_cumulative(&self, g: &[T], gamma: T) -> Vec<T> {
        let decay = (-gamma * self.h).exp();
        let mut out = vec![T::zero(); self.n + 1];
        for c in 0..self.n {
            out[c + 1] = decay * out[c] + self.cell(g, c, gamma, true);
        }
        out
    }

    /// `J_γ(s_i) = ∫_{s_i}^{s_n} e^{γ(s'-s_i)} g ds'`.
    fn right_tail(&self, g: &[T], gamma: T) -> Vec<T> {
        let growth = (gamma * self.h).exp();
        let mut out = vec![T::zero(); self.n + 1];
        for c in (0..self.n).rev() {
            out[c] = growth * out[c + 1] + self.cell(g, c, gamma, false);
        }
        out
    }

    /// `∫ e^{γ s} g ds` over the grid, with `s` measured from `shift`.
    fn moment(&self, g: &[T], gamma: T, s0: T) -> T {
        (0..self.n).map(|c| self.cell(g, c, gamma, false) * (gamma * (s0 + self.h * T::of_usize(c))).exp()).sum()
    }
}

/// Explicit solution on the branch appropriate for `θ = params.theta`.
pub fn solve_explicit<T: Real>(
    op: &EllipticOp1D<T>,
    f: &GridFunction<T>,
    params: &NormParams<T>,
) -> Result<ExplicitSolution<T>> {
    let roots = op.roots()?;
    let regime = classify_theta(params.theta, params.p, &roots)?;
    solve_branch(op, f, regime)
}

/// Explicit solution on a prescribed branch, regardless of `θ`.
///
/// * below: `u = K[-∫_{-∞}^s e^{α(s'-s)} g + ∫_{-∞}^s e^{β(s'-s)} g]`
/// * above: `u = K[∫_s^∞ e^{α(s'-s)} g - ∫_s^∞ e^{β(s'-s)} g]`
/// * inside: `u = K[∫_s^∞ e^{α(s'-s)} g + ∫_{-∞}^s e^{β(s'-s)} g]`
///
/// with `K = 1/(a(β-α))`.
pub fn solve_branch<T: Real>(op: &EllipticOp1D<T>, f: &GridFunction<T>, branch: Regime) -> Result<ExplicitSolution<T>> {
    let grid = f.grid;
    require_1d(&grid)?;
    let (a, _, _) =
        op.constants().ok_or_else(|| Error::InvalidInput("explicit solution needs constant coefficients".into()))?;
    let roots = op.roots()?;
    if grid.n_cells() < 3 {
        return Err(Error::InvalidRange("explicit solution needs at least 3 cells".into()));
    }
    require_margin(f, 2)?;
    let (al, be) = (roots.alpha, roots.beta);
    let k = (a * (be - al)).recip();
    let g = &f.values;
    let ker = Kernels::new(&grid);
    let s0 = grid.s_min();
    let i_al = ker.moment(g, al, s0);
    let i_be = ker.moment(g, be, s0);
    let zero = Tail { c_alpha: T::zero(), c_beta: T::zero() };
    let (values, b1, b2, left, right) = match branch {
        Regime::BelowRange => {
            let ka = ker.left_cumulative(g, al);
            let kb = ker.left_cumulative(g, be);
            let v: Vec<T> = ka.iter().zip(&kb).map(|(x, y)| k * (*y - *x)).collect();
            (v, T::zero(), T::zero(), zero, Tail { c_alpha: -k * i_al, c_beta: k * i_be })
        }
        Regime::AboveRange => {
            let ja = ker.right_tail(g, al);
            let jb = ker.right_tail(g, be);
            let v: Vec<T> = ja.iter().zip(&jb).map(|(x, y)| k * (*x - *y)).collect();
            (v, k * i_al, -k * i_be, Tail { c_alpha: k * i_al, c_beta: -k * i_be }, zero)
        }
        Regime::InsideRange => {
            let ja = ker.right_tail(g, al);
            let kb = ker.left_cumulative(g, be);
            let v: Vec<T> = ja.iter().zip(&kb).map(|(x, y)| k * (*x + *y)).collect();
            (
                v,
                k * i_al,
                T::zero(),
                Tail { c_alpha: k * i_al, c_beta: T::zero() },
                Tail { c_alpha: T::zero(), c_beta: k * i_be },
            )
        }
    };
    Ok(ExplicitSolution { values: GridFunction::new(grid, values)?, branch, b1, b2, roots, left, right })
}

/// `∫ |A e^{α t} + B e^{β t}|^p e^{-θ t} dt` over `t > 0` (sign `σ = +1`),
/// or with all exponents negated (`σ = -1`). Infinite when divergent.
fn exp_tail_integral<T: Real>(a_val: T, b_val: T, alpha: T, beta: T, p: T, theta: T) -> T {
    let terms: Vec<(T, T)> = [(a_val, alpha), (b_val, beta)].into_iter().filter(|(c, _)| *c != T::zero()).collect();
    if terms.is_empty() {
        return T::zero();
    }
    let fastest = terms.iter().map(|t| t.1).fold(T::neg_infinity(), T::max);
    let rate = theta - fastest * p;
    if !(rate > T::zero()) {
        return T::infinity();
    }
    if terms.len() == 1 {
        return terms[0].0.abs().powf(p) / rate;
    }
    let gap = (beta - alpha).abs();
    let cut = T::lit(40.0) / gap.max(T::lit(1e-3));
    let body = adaptive(
        |t: T| (a_val * (alpha * t).exp() + b_val * (beta * t).exp()).abs().powf(p) * (-theta * t).exp(),
        T::zero(),
        cut,
        T::zero(),
        T::lit(1e-13),
        400,
    );
    let dom = if alpha > beta { a_val } else { b_val };
    body.value + dom.abs().powf(p) * (-rate * cut).exp() / rate
}

/// `(‖u‖, ‖xDu‖, ‖x²D²u‖)` in `L_{p,θ}` for an explicit solution: grid part
/// by quadrature, both tails beyond the grid in closed form.
pub fn explicit_components<T: Real>(sol: &ExplicitSolution<T>, params: &NormParams<T>) -> Result<[T; 3]> {
    let grid = sol.grid();
    let d = log_derivatives(&sol.values)?;
    let inner = sobolev_components_from(grid, &d, params, false)?;
    let (p, theta) = (params.p, params.theta);
    let (al, be) = (sol.roots.alpha, sol.roots.beta);
    let factors = [(T::one(), T::one()), (-al, -be), (al * al + al, be * be + be)];
    let mut out = [T::zero(); 3];
    for k in 0..3 {
        let (fa, fb) = factors[k];
        let (sl, sr) = (grid.s_min(), grid.s_max());
        // left: s = s_l - t
        let la = sol.left.c_alpha * fa * (-al * sl).exp();
        let lb = sol.left.c_beta * fb * (-be * sl).exp();
        let left = (theta * sl).exp() * exp_tail_integral(la, lb, al, be, p, theta);
        // right: s = s_r + t
        let ra = sol.right.c_alpha * fa * (-al * sr).exp();
        let rb = sol.right.c_beta * fb * (-be * sr).exp();
        let right = (theta * sr).exp() * exp_tail_integral(ra, rb, -al, -be, p, -theta);
        out[k] = (inner[k].powf(p) + left + right).powf(p.recip());
    }
    Ok(out)
}

/// Nodal coefficients `(a, b, c + λ)`.
fn nodal_coefficients<T: Real>(op: &EllipticOp1D<T>, grid: &LogGrid<T>) -> (Vec<T>, Vec<T>, Vec<T>) {
    let xs = grid.x_nodes();
    (
        xs.iter().map(|&x| op.a.eval(x)).collect(),
        xs.iter().map(|&x| op.b.eval(x)).collect(),
        xs.iter().map(|&x| op.c.eval(x) + op.lambda).collect(),
    )
}

/// `ℒu` at every node with 4th-order differences in `s`.
pub fn apply_operator<T: Real>(op: &EllipticOp1D<T>, u: &GridFunction<T>) -> Result<GridFunction<T>> {
    require_1d(&u.grid)?;
    let d = log_derivatives(u)?;
    let (a, b, k) = nodal_coefficients(op, &u.grid);
    let values = (0..u.values.len()).map(|i| -a[i] * (d.vss[i] - d.vs[i]) + b[i] * d.vs[i] + k[i] * d.v[i]).collect();
    GridFunction::new(u.grid, values)
}

/// `‖ℒu - f‖ / max(‖f‖, 1e-30)` in `L_{p,θ}` over the grid.
pub fn residual<T: Real>(
    op: &EllipticOp1D<T>,
    u: &GridFunction<T>,
    f: &GridFunction<T>,
    params: &NormParams<T>,
) -> Result<T> {
    if u.grid != f.grid {
        return Err(Error::InvalidInput("u and f must share a grid".into()));
    }
    let lu = apply_operator(op, u)?;
    let r = GridFunction::new(u.grid, lu.values.iter().zip(&f.values).map(|(x, y)| *x - *y).collect())?;
    let num = truncated_lp_norm(&r, params)?;
    let den = truncated_lp_norm(f, params)?.max(T::lit(1e-30));
    Ok(num / den)
}

/// Boundary closure of the discrete operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Closure<T> {
    /// `v' = -α v` at `s_min`, `v' = -β v` at `s_max`.
    Decay {
        alpha: T,
        beta: T,
    },
    Dirichlet,
}

/// Second-order matrix of `-a v'' + (a + b) v' + κ v` with the given closure.
pub fn assemble<T: Real>(grid: &LogGrid<T>, a: &[T], b: &[T], kappa: &[T], closure: Closure<T>) -> Tridiagonal<T> {
    let n = grid.n_s();
    let h = grid.h();
    let two = T::lit(2.0);
    let (h2, h1) = ((h * h).recip(), (two * h).recip());
    let mut m = Tridiagonal::zeros(n);
    for i in 0..n {
        let drift = a[i] + b[i];
        m.lower[i] = -a[i] * h2 - drift * h1;
        m.diag[i] = two * a[i] * h2 + kappa[i];
        m.upper[i] = -a[i] * h2 + drift * h1;
    }
    match closure {
        Closure::Decay { alpha, beta } => {
            let (a0, d0) = (a[0], a[0] + b[0]);
            m.diag[0] = two * a0 * h2 - two * a0 * alpha / h - d0 * alpha + kappa[0];
            m.upper[0] = -two * a0 * h2;
            m.lower[0] = T::zero();
            let l = n - 1;
            let (an, dn) = (a[l], a[l] + b[l]);
            m.diag[l] = two * an * h2 + two * an * beta / h - dn * beta + kappa[l];
            m.lower[l] = -two * an * h2;
            m.upper[l] = T::zero();
        }
        Closure::Dirichlet => {
            for i in [0, n - 1] {
                m.lower[i] = T::zero();
                m.upper[i] = T::zero();
                m.diag[i] = T::one();
            }
        }
    }
    m
}

/// Closure used by the finite-difference solvers for `op`.
pub fn closure_for<T: Real>(op: &EllipticOp1D<T>) -> Closure<T> {
    match op.roots() {
        Ok(r) => Closure::Decay { alpha: r.alpha, beta: r.beta },
        Err(_) => Closure::Dirichlet,
    }
}

/// Second-order finite-difference solve on the grid of `f`.
pub fn solve_fd<T: Real>(op: &EllipticOp1D<T>, f: &GridFunction<T>) -> Result<GridFunction<T>> {
    let grid = f.grid;
    require_1d(&grid)?;
    op.validate_on(&grid)?;
    let (a, b, k) = nodal_coefficients(op, &grid);
    let closure = closure_for(op);
    let m = assemble(&grid, &a, &b, &k, closure);
    let mut rhs = f.values.clone();
    if closure == Closure::Dirichlet {
        let n = rhs.len();
        rhs[0] = T::zero();
        rhs[n - 1] = T::zero();
    }
    GridFunction::new(grid, m.solve(&rhs)?)
}

/// Measured constant of `(1+λ)‖u‖ + (1+√λ)‖xDu‖ + ‖x²D²u‖ <= N ‖f‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport<T> {
    pub theta: T,
    pub p: T,
    pub lambda: T,
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
    /// `(‖u‖, ‖xDu‖, ‖x²D²u‖)`.
    pub components: [T; 3],
}

/// Solves with `λ` and assembles the ratio. Constant-coefficient operators
/// use the explicit solution with exact tails; others the finite-difference
/// solve with truncation-checked norms.
pub fn apriori_ratio<T: Real>(
    op: &EllipticOp1D<T>,
    f: &GridFunction<T>,
    params: &NormParams<T>,
    lambda: T,
) -> Result<RatioReport<T>> {
    let op = op.clone().with_lambda(lambda)?;
    let rhs = weighted_lp_norm(f, params)?;
    if rhs == T::zero() {
        return Err(Error::UndefinedRatio);
    }
    let components = if op.is_constant() {
        let sol = solve_explicit(&op, f, params)?;
        explicit_components(&sol, params)?
    } else {
        sobolev_components(&solve_fd(&op, f)?, params)?
    };
    let lhs = (T::one() + lambda) * components[0] + (T::one() + lambda.sqrt()) * components[1] + components[2];
    Ok(RatioReport { theta: params.theta, p: params.p, lambda, lhs, rhs, ratio: lhs / rhs, components })
}

/// Samples of `x^{-α}` and `x^{-β}`.
pub fn homogeneous_basis<T: Real>(
    op: &EllipticOp1D<T>,
    grid: &LogGrid<T>,
) -> Result<(GridFunction<T>, GridFunction<T>)> {
    let r = op.roots()?;
    Ok((GridFunction::sample(*grid, |x| x.powf(-r.alpha))?, GridFunction::sample(*grid, |x| x.powf(-r.beta))?))
}

/// Largest pointwise `|ℒu|` relative to the size of its terms, skipping
/// three nodes at each end.
pub fn interior_residual<T: Real>(op: &EllipticOp1D<T>, u: &GridFunction<T>) -> Result<T> {
    let d = log_derivatives(u)?;
    let (a, b, k) = nodal_coefficients(op, &u.grid);
    let n = u.values.len();
    let mut worst = T::zero();
    for i in 3..n.saturating_sub(3) {
        let t = [-a[i] * (d.vss[i] - d.vs[i]), b[i] * d.vs[i], k[i] * d.v[i]];
        let scale = t.iter().map(|x| x.abs()).sum::<T>().max(d.v[i].abs());
        if scale > T::zero() {
            worst = worst.max((t[0] + t[1] + t[2]).abs() / scale);
        }
    }
    Ok(worst)
}

/// Grid of spacing close to `h` covering `[lo - margin, hi + margin]`.
pub fn support_grid<T: Real>(lo: T, hi: T, margin: T, h: T) -> Result<LogGrid<T>> {
    LogGrid::with_spacing(lo - margin, hi + margin, h)
}

/// Grid long enough that `|u|^p e^{θs}` decays by `decay` beyond the
/// support `[lo, hi]` for the branch selected by `θ`.
pub fn decay_grid<T: Real>(
    roots: &IndicialRoots<T>,
    p: T,
    theta: T,
    lo: T,
    hi: T,
    h: T,
    decay: T,
) -> Result<LogGrid<T>> {
    let regime = classify_theta(theta, p, roots)?;
    let (ap, bp) = (roots.alpha * p, roots.beta * p);
    let (left_rate, right_rate) = match regime {
        Regime::InsideRange => (theta - ap, bp - theta),
        Regime::BelowRange => (T::infinity(), ap - theta),
        Regime::AboveRange => (theta - bp, T::infinity()),
    };
    let span = |r: T| (decay.recip().ln() / r).max(T::one()).min(T::lit(2000.0));
    LogGrid::with_spacing(lo - span(left_rate), hi + span(right_rate), h)
}

/// Stencil accuracy used throughout for `s`-derivatives.
pub fn default_stencils<T: Real>() -> (Stencil<T>, Stencil<T>) {
    (Stencil::new(1, 4), Stencil::new(2, 4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bumps::Bump;
    use approx::assert_relative_eq;

    fn setup(theta: f64) -> (EllipticOp1D<f64>, GridFunction<f64>, NormParams<f64>) {
        let op = EllipticOp1D::constant(1.0, -1.0, 4.0).unwrap();
        let params = NormParams::new(2.0, theta).unwrap();
        let bump = Bump::on_interval(1.0, 2.0);
        let (lo, hi) = bump.support();
        let grid = decay_grid(&op.roots().unwrap(), 2.0, theta, lo, hi, 5e-4, 1e-8).unwrap();
        let f = GridFunction::sample(grid, |x| bump.eval_x(x)).unwrap();
        (op, f, params)
    }

    #[test]
    fn explicit_residual_inside_and_above() {
        for theta in [0.0, 6.0, -6.0] {
            let (op, f, params) = setup(theta);
            let sol = solve_explicit(&op, &f, &params).unwrap();
            let r = residual(&op, &sol.values, &f, &params).unwrap();
            assert!(r < 1e-8, "theta {theta}: residual {r}");
            assert!(weighted_lp_norm(&sol.values, &params).unwrap().is_finite());
        }
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let (op, f, params) = setup(0.0);
        let z = GridFunction::zeros(f.grid);
        let sol = solve_explicit(&op, &z, &params).unwrap();
        assert!(sol.values.values.iter().all(|v| *v == 0.0));
        assert_eq!((sol.b1, sol.b2), (0.0, 0.0));
        let u = solve_fd(&op, &z).unwrap();
        assert!(u.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn residual_of_zero_is_one() {
        let (op, f, params) = setup(0.0);
        let r = residual(&op, &GridFunction::zeros(f.grid), &f, &params).unwrap();
        assert_relative_eq!(r, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn tails_match_long_grid() {
        let (op, f, params) = setup(0.0);
        let sol = solve_explicit(&op, &f, &params).unwrap();
        let long = explicit_components(&sol, &params).unwrap();
        let bump = Bump::on_interval(1.0, 2.0);
        let short_grid = support_grid(0.0, 2f64.ln(), 0.25, 1e-3).unwrap();
        let fs = GridFunction::sample(short_grid, |x| bump.eval_x(x)).unwrap();
        let short = explicit_components(&solve_explicit(&op, &fs, &params).unwrap(), &params).unwrap();
        for k in 0..3 {
            assert_relative_eq!(long[k], short[k], max_relative = 1e-7);
        }
    }

    #[test]
    fn undefined_ratio_for_zero_forcing() {
        let (op, f, params) = setup(0.0);
        let z = GridFunction::zeros(f.grid);
        assert!(matches!(apriori_ratio(&op, &z, &params, 0.0), Err(Error::UndefinedRatio)));
    }

    #[test]
    fn basis_is_annihilated() {
        let op = EllipticOp1D::constant(1.0, -1.0, 4.0).unwrap();
        let g = LogGrid::new(-2.0, 2.0, 400).unwrap();
        let (u1, u2) = homogeneous_basis(&op, &g).unwrap();
        assert!(interior_residual(&op, &u1).unwrap() < 1e-8);
        assert!(interior_residual(&op, &u2).unwrap() < 1e-8);
    }
}

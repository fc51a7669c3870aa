//! Constructive optimality experiments showing the admissible `θ`-range is sharp.
//!
//! All multi-dimensional experiments run in `d = 2` with the transverse
//! variable `x₁` and the normal variable `x = x_d = e^s`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::bessel_k;
use crate::bumps::{mollifier, Bump};
use crate::elliptic::{apriori_ratio, support_grid};
use crate::error::{Error, Result};
use crate::fd::derivative;
use crate::grid::{GridFunction, LogGrid, UniformAxis};
use crate::indicial::{indicial_roots, EllipticOp1D, IndicialRoots};
use crate::parabolic::norm_growth_curve;
use crate::quadrature::GaussLegendre;
use crate::spaces::{log_derivatives_with, truncated_lp_norm, weighted_lp_norm, weighted_sobolev_norm, NormParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Below,
    AtMost,
    Above,
    AtLeast,
}

impl Rule {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Rule::Below => value < threshold,
            Rule::AtMost => value <= threshold,
            Rule::Above => value > threshold,
            Rule::AtLeast => value >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub rule: Rule,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessVerdict {
    pub experiment: String,
    pub parameters: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub curves: Vec<Curve>,
    pub pass: bool,
}

impl SharpnessVerdict {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.into(),
            parameters: BTreeMap::new(),
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            curves: Vec::new(),
            pass: true,
        }
    }

    pub fn param(&mut self, key: &str, value: f64) -> &mut Self {
        self.parameters.insert(key.into(), value);
        self
    }

    pub fn metric(&mut self, key: &str, value: f64) -> &mut Self {
        self.metrics.insert(key.into(), value);
        self
    }

    pub fn check(&mut self, name: &str, value: f64, rule: Rule, threshold: f64) -> &mut Self {
        let pass = rule.holds(value, threshold);
        self.checks.push(Check { name: name.into(), value, rule, threshold, pass });
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }

    /// Combines verdicts under one id, prefixing every name with its part label.
    pub fn merge(experiment: &str, parts: &[(&str, SharpnessVerdict)]) -> Self {
        let mut out = Self::new(experiment);
        for (label, v) in parts {
            let key = |k: &str| {
                if label.is_empty() {
                    k.to_string()
                } else {
                    format!("{label}.{k}")
                }
            };
            out.parameters.extend(v.parameters.iter().map(|(k, x)| (key(k), *x)));
            out.metrics.extend(v.metrics.iter().map(|(k, x)| (key(k), *x)));
            out.checks.extend(v.checks.iter().map(|c| Check { name: key(&c.name), ..c.clone() }));
            out.curves.extend(v.curves.iter().map(|c| Curve { name: key(&c.name).replace('.', "_"), ..c.clone() }));
        }
        out.pass = out.recompute();
        out
    }

    /// Recomputes the pass flag from the recorded checks.
    pub fn recompute(&self) -> bool {
        self.checks.iter().all(|c| c.rule.holds(c.value, c.threshold))
    }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Cutoffs `τ_n(x) = η_n(x^δ)`, the normal profile `ζ` and the transverse bump `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFamily {
    pub delta: f64,
}

impl CutoffFamily {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!("delta must lie in (0,1), got {delta}")));
        }
        Ok(Self { delta })
    }

    /// 0 for `y <= 1/(2n)`, 1 for `y >= 1/n`.
    pub fn eta(&self, n: u64, y: f64) -> f64 {
        smooth_step(2.0 * n as f64 * y - 1.0)
    }

    pub fn tau(&self, n: u64, x: f64) -> f64 {
        self.eta(n, x.powf(self.delta))
    }

    pub fn tau_s(&self, n: u64, s: f64) -> f64 {
        self.eta(n, (self.delta * s).exp())
    }

    /// 1 on `(0, 1]`, 0 on `[2, ∞)`.
    pub fn zeta(&self, x: f64) -> f64 {
        1.0 - smooth_step(x - 1.0)
    }

    /// Supported in `[-1, 1]`.
    pub fn w(&self, x1: f64) -> f64 {
        mollifier(x1)
    }

    /// `ln` of the smallest `x` at which `τ_n` is nonzero.
    pub fn s_required(&self, n: u64) -> f64 {
        -(2.0 * n as f64).ln() / self.delta
    }

    /// Smallest `C` with `x|τ_n'| <= Cδ` and `x²|τ_n''| <= Cδ` on the grid nodes, over all `n`.
    pub fn derivative_constant(&self, n_list: &[u64], grid: &LogGrid<f64>) -> Result<f64> {
        let s = grid.s_nodes();
        let h = grid.h();
        let mut c: f64 = 0.0;
        for &n in n_list {
            let tau: Vec<f64> = s.iter().map(|&si| self.tau_s(n, si)).collect();
            let ts = derivative(&tau, h, 1, 4);
            let tss = derivative(&tau, h, 2, 4);
            for (a, b) in ts.iter().zip(&tss) {
                c = c.max(a.abs()).max((b - a).abs());
            }
        }
        Ok(c / self.delta)
    }
}

/// `ℒ v = -v_ss - e^{2s} ∂₁₁ v + c v`, i.e. `-x²Δ - x∂_x + c` in `d = 2`.
fn apply_endpoint_op(u: &GridFunction<f64>, c: f64, accuracy: usize) -> Result<GridFunction<f64>> {
    let d = log_derivatives_with(u, accuracy)?;
    let nt = u.grid.n_t();
    let vals: Vec<f64> = (0..u.values.len())
        .map(|idx| {
            let e2 = (2.0 * u.grid.s_node(idx / nt)).exp();
            -d.vss[idx] - e2 * d.d11[idx] + c * d.v[idx]
        })
        .collect();
    GridFunction::new(u.grid, vals)
}

/// `ℒ* v = -v_ss - 2v_s - e^{2s} ∂₁₁ v + (c - 1) v`.
fn apply_adjoint_op(v: &GridFunction<f64>, c: f64) -> Result<GridFunction<f64>> {
    let d = log_derivatives_with(v, 6)?;
    let nt = v.grid.n_t();
    let vals: Vec<f64> = (0..v.values.len())
        .map(|idx| {
            let e2 = (2.0 * v.grid.s_node(idx / nt)).exp();
            -d.vss[idx] - 2.0 * d.vs[idx] - e2 * d.d11[idx] + (c - 1.0) * d.v[idx]
        })
        .collect();
    GridFunction::new(v.grid, vals)
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyConfig {
    pub p: f64,
    pub c: f64,
    pub delta: f64,
    pub n_list: Vec<u64>,
    /// Interior control weight.
    pub control_theta: f64,
    pub h: f64,
    pub dx1: f64,
    /// Defaults to one unit below the deepest cutoff.
    pub s_min: Option<f64>,
    pub tolerance: f64,
}

impl Default for HardyConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            c: 1.0,
            delta: 0.5,
            n_list: vec![4, 16, 64, 256],
            control_theta: 0.0,
            h: 0.01,
            dx1: 0.025,
            s_min: None,
            tolerance: 0.15,
        }
    }
}

/// One `n` of the cutoff family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyRun {
    pub n: u64,
    pub u_norm_p: f64,
    pub f_norm_p: f64,
    pub ratio: f64,
    pub control_ratio: f64,
}

/// Norms of `τ_n u` and `ℒ(τ_n u)` at the endpoint `θ = αp`, and the control ratio.
pub fn hardy_runs(cfg: &HardyConfig) -> Result<Vec<HardyRun>> {
    if !(cfg.p > 1.0 && cfg.c > 0.0) || cfg.n_list.is_empty() || cfg.n_list.contains(&0) {
        return Err(Error::InvalidInput("need p > 1, c > 0 and a nonempty list of positive n".into()));
    }
    let fam = CutoffFamily::new(cfg.delta)?;
    let n_max = *cfg.n_list.iter().max().unwrap_or(&1);
    let required = fam.s_required(n_max);
    let s_min = cfg.s_min.unwrap_or(required - 1.0);
    if s_min > required {
        return Err(Error::GridTooShallow { required, actual: s_min });
    }
    let m = (2.5 / cfg.dx1).round().max(3.0) as usize;
    let grid =
        LogGrid::with_spacing(s_min, 2f64.ln() + 0.25, cfg.h)?.with_transverse(UniformAxis::new(-1.25, 1.25, m)?);
    let alpha = -cfg.c.sqrt();
    let theta = alpha * cfg.p;
    let u = GridFunction::sample_2d(grid, |x1, x| x.powf(-alpha) * fam.w(x1) * fam.zeta(x))?;
    let end = NormParams::new(cfg.p, theta)?;
    let ctl = NormParams::new(cfg.p, cfg.control_theta)?;
    let nt = grid.n_t();
    cfg.n_list
        .iter()
        .map(|&n| {
            let vals: Vec<f64> =
                u.values.iter().enumerate().map(|(idx, &v)| v * fam.tau_s(n, grid.s_node(idx / nt))).collect();
            let tu = GridFunction::new(grid, vals)?;
            let f = apply_endpoint_op(&tu, cfg.c, 4)?;
            let u_p = weighted_lp_norm(&tu, &end)?.powf(cfg.p);
            let f_p = weighted_lp_norm(&f, &end)?.powf(cfg.p);
            let control_ratio = weighted_lp_norm(&tu, &ctl)? / weighted_lp_norm(&f, &ctl)?;
            Ok(HardyRun { n, u_norm_p: u_p, f_norm_p: f_p, ratio: (u_p / f_p).powf(1.0 / cfg.p), control_ratio })
        })
        .collect()
}

/// Cutoff divergence at `θ = αp` for a single `δ`.
pub fn hardy_endpoint_experiment(cfg: &HardyConfig) -> Result<SharpnessVerdict> {
    let runs = hardy_runs(cfg)?;
    let fam = CutoffFamily::new(cfg.delta)?;
    let log_n: Vec<f64> = runs.iter().map(|r| (r.n as f64).ln()).collect();
    let u_slope = fit_slope(&log_n, &runs.iter().map(|r| r.u_norm_p).collect::<Vec<_>>());
    let f_slope = fit_slope(&log_n, &runs.iter().map(|r| r.f_norm_p).collect::<Vec<_>>());
    let deriv_grid = LogGrid::with_spacing(fam.s_required(*cfg.n_list.iter().max().unwrap()) - 1.0, 1.0, cfg.h)?;
    let cbound = fam.derivative_constant(&cfg.n_list, &deriv_grid)?;

    let mut v = SharpnessVerdict::new("hardy-endpoint");
    v.param("p", cfg.p).param("c", cfg.c).param("delta", cfg.delta).param("theta", -cfg.c.sqrt() * cfg.p);
    v.param("control_theta", cfg.control_theta);
    v.metric("u_slope", u_slope).metric("f_slope", f_slope).metric("cutoff_constant", cbound);
    v.metric("u_slope_times_delta", u_slope * cfg.delta);
    v.metric("f_slope_over_delta_pow", f_slope / cfg.delta.powf(cfg.p - 1.0));
    let mut curve = Curve::new("hardy_n", &["n", "u_norm_p", "f_norm_p", "ratio", "control_ratio"]);
    for r in &runs {
        curve.push(vec![r.n as f64, r.u_norm_p, r.f_norm_p, r.ratio, r.control_ratio]);
    }
    v.curves.push(curve);

    let min_growth = runs.windows(2).map(|w| w[1].ratio / w[0].ratio).fold(f64::INFINITY, f64::min);
    v.check("ratio_strictly_increasing", min_growth, Rule::Above, 1.0);
    let k = runs.len();
    let control_change = if k >= 2 { (runs[k - 1].control_ratio / runs[k - 2].control_ratio - 1.0).abs() } else { 0.0 };
    v.check("control_ratio_change", control_change, Rule::Below, 1e-2);
    v.check("u_slope_positive", u_slope, Rule::Above, 0.0);
    Ok(v)
}

/// Compares per-`δ` Hardy verdicts: `u`-slope `∝ δ⁻¹`, `f`-slope `∝ δ^{p-1}`.
pub fn hardy_delta_scaling(runs: &[SharpnessVerdict], tolerance: f64) -> Result<SharpnessVerdict> {
    if runs.len() < 2 {
        return Err(Error::InvalidInput("delta scaling needs at least two delta values".into()));
    }
    let get = |v: &SharpnessVerdict, k: &str| -> Result<f64> {
        v.metrics
            .get(k)
            .or_else(|| v.parameters.get(k))
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("verdict lacks {k}")))
    };
    let mut out = SharpnessVerdict::new("hardy-delta-scaling");
    let p = get(&runs[0], "p")?;
    out.param("p", p).param("tolerance", tolerance);
    let mut curve = Curve::new("hardy_slopes", &["delta", "u_slope", "f_slope"]);
    for r in runs {
        curve.push(vec![get(r, "delta")?, get(r, "u_slope")?, get(r, "f_slope")?]);
    }
    let base = &curve.rows[0];
    let mut worst_u: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for row in &curve.rows[1..] {
        let q = row[0] / base[0];
        worst_u = worst_u.max((row[1] / base[1] * q - 1.0).abs());
        worst_f = worst_f.max((row[2] / base[2] / q.powf(p - 1.0) - 1.0).abs());
    }
    out.curves.push(curve);
    out.metric("u_scaling_deviation", worst_u).metric("f_scaling_deviation", worst_f);
    out.check("u_slope_scales_inverse_delta", worst_u, Rule::AtMost, tolerance);
    out.check("f_slope_scales_delta_pow", worst_f, Rule::AtMost, tolerance);
    Ok(out)
}

/// Weighted-norm growth of the heat-kernel counterexample for `θ` outside `[-p√(c/a), p√(c/a)]`.
pub fn parabolic_divergence_experiment(
    a: f64,
    c: f64,
    p: f64,
    theta: f64,
    t_list: &[f64],
    tolerance: f64,
) -> Result<SharpnessVerdict> {
    if !(a > 0.0 && c > 0.0) {
        return Err(Error::InvalidInput("need a > 0 and c > 0".into()));
    }
    let edge = p * (c / a).sqrt();
    if theta.abs() <= edge {
        return Err(Error::InvalidInput(format!("|theta| = {} must exceed p sqrt(c/a) = {edge}", theta.abs())));
    }
    let (run, control) =
        rayon::join(|| norm_growth_curve(a, c, p, theta, t_list), || norm_growth_curve(a, c, p, 0.0, t_list));
    let (run, control) = (run?, control?);
    let mut v = SharpnessVerdict::new("parabolic-divergence");
    v.param("a", a).param("c", c).param("p", p).param("theta", theta).param("control_theta", 0.0);
    v.metric("fitted_rate", run.fitted_rate).metric("predicted_rate", run.predicted_rate);
    v.metric("control_last_relative_increment", control.last_relative_increment);
    let mut curve = Curve::new("growth", &["T", "norm_p", "control_norm_p"]);
    for k in 0..run.t.len() {
        curve.push(vec![run.t[k], run.norm_p[k], control.norm_p[k]]);
    }
    v.curves.push(curve);
    v.check("rate_relative_error", (run.fitted_rate / run.predicted_rate - 1.0).abs(), Rule::AtMost, tolerance);
    v.check("control_last_relative_increment", control.last_relative_increment, Rule::Below, 1e-6);
    Ok(v)
}

/// Frequency profile `η(ξ) = A exp(k - k/(1-t²))`, `t = (ξ - 1.5)/0.5`, supported in `[1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaSpec {
    pub amplitude: f64,
    pub sharpness: f64,
}

impl Default for EtaSpec {
    fn default() -> Self {
        Self { amplitude: 1.0, sharpness: 8.0 }
    }
}

impl EtaSpec {
    pub fn eval(&self, xi: f64) -> f64 {
        let t = (xi - 1.5) / 0.5;
        let w = 1.0 - t * t;
        if w <= 0.0 {
            0.0
        } else {
            self.amplitude * (self.sharpness - self.sharpness / w).exp()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonuniqueConfig {
    pub c: f64,
    pub p: f64,
    pub theta: f64,
    pub control_theta: f64,
    pub eta: EtaSpec,
    pub s_max: f64,
    /// Successively deeper lower ends of the log grid.
    pub s_min_list: Vec<f64>,
    pub h: f64,
    pub x1_half_width: f64,
    pub dx1: f64,
    pub panels: usize,
    pub order: usize,
    pub residual_tolerance: f64,
    pub stability_tolerance: f64,
    pub control_growth: f64,
}

impl Default for NonuniqueConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            p: 2.0,
            theta: 3.0,
            control_theta: 1.5,
            eta: EtaSpec::default(),
            s_max: 3.5,
            s_min_list: vec![-8.0, -12.0, -16.0],
            h: 0.02,
            x1_half_width: 20.0,
            dx1: 0.05,
            panels: 8,
            order: 8,
            residual_tolerance: 1e-5,
            stability_tolerance: 1e-2,
            control_growth: 2.0,
        }
    }
}

/// `u(x₁, x) = (2/√(2π)) ∫₁² cos(ξ x₁) K_{√c}(ξ x) η(ξ) dξ` on the grid, by composite Gauss–Legendre.
pub fn bessel_superposition(
    grid: &LogGrid<f64>,
    c: f64,
    eta: &EtaSpec,
    panels: usize,
    order: usize,
) -> Result<GridFunction<f64>> {
    let axis = grid.transverse.ok_or_else(|| Error::InvalidInput("superposition needs a transverse axis".into()))?;
    let rule = GaussLegendre::<f64>::new(order);
    let width = 1.0 / panels as f64;
    let mut xi = Vec::with_capacity(panels * order);
    let mut wt = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let (lo, hi) = (1.0 + k as f64 * width, 1.0 + (k + 1) as f64 * width);
        let (pts, ws) = rule.mapped(lo, hi);
        for (x, w) in pts.into_iter().zip(ws) {
            let e = eta.eval(x);
            if e != 0.0 {
                xi.push(x);
                wt.push(w * e * 2.0 / (2.0 * std::f64::consts::PI).sqrt());
            }
        }
    }
    let nu = c.sqrt();
    let x1 = axis.nodes();
    let cos_tab: Vec<f64> = x1.iter().flat_map(|&y| xi.iter().map(move |&k| (k * y).cos())).collect();
    let nk = xi.len();
    let nt = x1.len();
    let rows: Vec<Vec<f64>> = (0..grid.n_s())
        .into_par_iter()
        .map(|i| {
            let x = grid.x_node(i);
            let kv: Vec<f64> =
                xi.iter().zip(&wt).map(|(&k, &w)| Ok(w * bessel_k(nu, k * x)?)).collect::<Result<_>>()?;
            Ok((0..nt).map(|j| cos_tab[j * nk..(j + 1) * nk].iter().zip(&kv).map(|(a, b)| a * b).sum()).collect())
        })
        .collect::<Result<_>>()?;
    GridFunction::new(*grid, rows.concat())
}

fn crop(u: &GridFunction<f64>, lo: usize, hi: usize, margin_t: usize) -> Result<GridFunction<f64>> {
    let g = &u.grid;
    let axis = g.transverse.ok_or_else(|| Error::InvalidInput("crop needs a transverse axis".into()))?;
    let nt = g.n_t();
    let m = axis.n_cells - 2 * margin_t;
    let k = axis.step();
    let new_axis = UniformAxis::new(axis.start + k * margin_t as f64, axis.start + k * (margin_t + m) as f64, m)?;
    let grid = LogGrid::new(g.s_node(lo), g.s_node(hi), hi - lo)?.with_transverse(new_axis);
    let mut vals = Vec::with_capacity((hi - lo + 1) * (m + 1));
    for i in lo..=hi {
        vals.extend_from_slice(&u.values[i * nt + margin_t..i * nt + margin_t + m + 1]);
    }
    GridFunction::new(grid, vals)
}

/// Kernel element of `ℒ` in `H²_{p,θ}` for `θ > √c p`.
pub fn nonuniqueness_2d(cfg: &NonuniqueConfig) -> Result<SharpnessVerdict> {
    let edge = cfg.c.sqrt() * cfg.p;
    if !(cfg.c > 0.0 && cfg.p > 1.0) || cfg.theta <= edge {
        return Err(Error::InvalidInput(format!("need c > 0, p > 1 and theta > sqrt(c) p = {edge}")));
    }
    if cfg.s_min_list.len() < 2 || cfg.s_min_list.windows(2).any(|w| w[1] >= w[0]) || cfg.s_min_list[0] >= cfg.s_max {
        return Err(Error::InvalidInput(
            "s_min_list needs at least two strictly decreasing entries below s_max".into(),
        ));
    }
    let deepest = *cfg.s_min_list.last().unwrap();
    let n_cells = ((cfg.s_max - deepest) / cfg.h).round() as usize;
    let m = (2.0 * cfg.x1_half_width / cfg.dx1).round() as usize;
    let grid = LogGrid::new(deepest, deepest + n_cells as f64 * cfg.h, n_cells)?.with_transverse(UniformAxis::new(
        -cfg.x1_half_width,
        cfg.x1_half_width,
        m,
    )?);
    let (coarse, fine) = rayon::join(
        || bessel_superposition(&grid, cfg.c, &cfg.eta, cfg.panels, cfg.order),
        || bessel_superposition(&grid, cfg.c, &cfg.eta, 2 * cfg.panels, cfg.order),
    );
    let (coarse, u) = (coarse?, fine?);
    let scale = u.max_abs();
    if scale == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let richardson = coarse.values.iter().zip(&u.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
    if richardson > 1e-8 {
        return Err(Error::OscillatoryQuadrature { estimate: richardson });
    }

    let params = NormParams::new(cfg.p, cfg.theta)?;
    let lu = apply_endpoint_op(&u, cfg.c, 6)?;
    let (ns, margin) = (grid.n_s(), 3);
    let interior_u = crop(&u, margin, ns - 1 - margin, margin)?;
    let interior_r = crop(&lu, margin, ns - 1 - margin, margin)?;
    let residual = truncated_lp_norm(&interior_r, &params)? / truncated_lp_norm(&interior_u, &params)?;

    let control = NormParams::new(cfg.p, cfg.control_theta)?;
    let mut curve = Curve::new("deepening", &["s_min", "h2_norm", "control_norm"]);
    for &s_min in &cfg.s_min_list {
        let lo = ((s_min - deepest) / cfg.h).round() as usize;
        let part = crop(&u, lo, ns - 1, 0)?;
        let h2 = weighted_sobolev_norm(&part, 2, &params)?;
        let ctl = truncated_lp_norm(&part, &control)?;
        curve.push(vec![s_min, h2, ctl]);
    }
    let rows = &curve.rows;
    let stability = rows.windows(2).map(|w| (w[1][1] / w[0][1] - 1.0).abs()).fold(0.0, f64::max);
    let growth = rows.windows(2).map(|w| w[1][2] / w[0][2]).fold(f64::INFINITY, f64::min);

    let mut v = SharpnessVerdict::new("nonuniqueness-2d");
    v.param("c", cfg.c).param("p", cfg.p).param("theta", cfg.theta).param("control_theta", cfg.control_theta);
    v.metric("richardson_estimate", richardson).metric("residual", residual);
    v.metric("h2_norm", rows.last().unwrap()[1])
        .metric("max_relative_change", stability)
        .metric("min_control_growth", growth);
    v.curves.push(curve);
    v.check("relative_residual", residual, Rule::Below, cfg.residual_tolerance);
    v.check("h2_norm_relative_change", stability, Rule::AtMost, cfg.stability_tolerance);
    v.check("control_growth_per_deepening", growth, Rule::AtLeast, cfg.control_growth);
    Ok(v)
}

/// Roots of `z² - 2z - (c - 1) = 0`, the indicial equation of `-x²Δ - 3x∂_x + c - 1`.
pub fn adjoint_roots(c: f64) -> Result<IndicialRoots<f64>> {
    indicial_roots(-3.0, c - 1.0)
}

/// Relative discrepancy `|⟨ℒu, v⟩ - ⟨u, ℒ*v⟩|` in `L₂(dx₁ dx)`, scaled by `‖u‖‖v‖`.
pub fn adjoint_identity_check(c: f64, u: &GridFunction<f64>, v: &GridFunction<f64>) -> Result<f64> {
    if u.grid != v.grid || u.grid.transverse.is_none() {
        return Err(Error::InvalidInput("adjoint check needs two functions on the same 2D grid".into()));
    }
    let g = &u.grid;
    let (ns, nt) = (g.n_s(), g.n_t());
    for (name, f) in [("u", u), ("v", v)] {
        for i in 0..ns {
            for j in 0..nt {
                let near = i <= 3 || i + 3 >= ns - 1 || j <= 3 || j + 3 >= nt - 1;
                if near && f.values[i * nt + j] != 0.0 {
                    return Err(Error::SupportViolation(format!("{name} is nonzero within 3 cells of the boundary")));
                }
            }
        }
    }
    let lu = apply_endpoint_op(u, c, 6)?;
    let lv = apply_adjoint_op(v, c)?;
    let pair = |a: &GridFunction<f64>, b: &GridFunction<f64>| -> Result<f64> {
        Ok(crate::spaces::integrate(g, &[&a.values, &b.values], |s, _, f| f[0] * f[1] * s.exp())?.total)
    };
    let diff = (pair(&lu, v)? - pair(u, &lv)?).abs();
    let l2 = NormParams::new(2.0, 1.0)?;
    let scale = truncated_lp_norm(u, &l2)? * truncated_lp_norm(v, &l2)?;
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// Seeded pair of product bumps in `(s, x₁)` supported well inside `[-3, 3]²`.
pub fn random_bump_pair(seed: u64, grid: &LogGrid<f64>) -> Result<(GridFunction<f64>, GridFunction<f64>)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut make = || {
        let (s0, y0) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (ws, wy) = (rng.gen_range(0.3..0.8), rng.gen_range(0.3..0.8));
        let amp: f64 = rng.gen_range(0.5..2.0);
        GridFunction::sample_2d(*grid, move |x1, x| {
            amp * mollifier((x.ln() - s0) / ws) * mollifier((x1 - y0) / wy)
        })
    };
    Ok((make()?, make()?))
}

/// Default grid of the adjoint experiment.
pub fn adjoint_grid() -> Result<LogGrid<f64>> {
    Ok(LogGrid::new(-3.0, 3.0, 600)?.with_transverse(UniformAxis::new(-3.0, 3.0, 600)?))
}

/// Adjoint pairing over `pairs` seeded bump pairs plus the adjoint root check.
pub fn adjoint_experiment(c: f64, seed: u64, pairs: usize, tolerance: f64) -> Result<SharpnessVerdict> {
    let grid = adjoint_grid()?;
    let disc: Vec<f64> = (0..pairs as u64)
        .into_par_iter()
        .map(|k| {
            let (u, v) = random_bump_pair(seed.wrapping_add(k), &grid)?;
            adjoint_identity_check(c, &u, &v)
        })
        .collect::<Result<_>>()?;
    let roots = adjoint_roots(c)?;
    let sc = c.sqrt();
    let root_err = (roots.alpha - (1.0 - sc)).abs().max((roots.beta - (1.0 + sc)).abs());
    let mut v = SharpnessVerdict::new("adjoint-identity");
    v.param("c", c).param("seed", seed as f64).param("pairs", pairs as f64);
    v.metric("adjoint_alpha", roots.alpha).metric("adjoint_beta", roots.beta);
    let worst = disc.iter().copied().fold(0.0, f64::max);
    v.metric("max_discrepancy", worst);
    let mut curve = Curve::new("pairs", &["pair", "discrepancy"]);
    for (k, d) in disc.iter().enumerate() {
        curve.push(vec![k as f64, *d]);
    }
    v.curves.push(curve);
    v.check("max_pairing_discrepancy", worst, Rule::Below, tolerance);
    v.check("adjoint_root_error", root_err, Rule::AtMost, 1e-12);
    Ok(v)
}

/// Measured `N̂(θ)` as `θ` approaches `αp` from inside, for the verdict bundle.
pub fn endpoint_blowup_curve(
    op: &EllipticOp1D<f64>,
    p: f64,
    distances: &[f64],
    forcings: &[Bump<f64>],
    h: f64,
) -> Result<Curve> {
    let roots = op.roots()?;
    let mut curve = Curve::new("endpoint_blowup", &["theta", "distance", "n_hat"]);
    for &d in distances {
        let theta = roots.alpha * p + d;
        let params = NormParams::new(p, theta)?;
        let n_hat = forcings
            .par_iter()
            .map(|b| {
                let (lo, hi) = b.support();
                let f = GridFunction::sample(support_grid(lo, hi, 0.3, h)?, |x| b.eval_x(x))?;
                Ok(apriori_ratio(op, &f, &params, 0.0)?.ratio)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        curve.push(vec![theta, d, n_hat]);
    }
    Ok(curve)
}

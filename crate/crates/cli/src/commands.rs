//! Command table: key parsing, dispatch and verdict assembly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use degenlab_core::bessel::bessel_suite;
use degenlab_core::bumps::{random_bumps, Bump};
use degenlab_core::corpus::{
    corpus_stats, CORPUS_SEED, CORPUS_SIZE, FROZEN_DYADIC_CONSTANT, FROZEN_INTERPOLATION_CONSTANT,
};
use degenlab_core::elliptic::{decay_grid, explicit_components, residual, solve_branch, solve_explicit, solve_fd};
use degenlab_core::grid::{GridFunction, LogGrid};
use degenlab_core::indicial::{classify_theta, EllipticOp1D, Regime};
use degenlab_core::parabolic::{heat_kernel_solution, norm_growth_curve};
use degenlab_core::sharpness::{
    adjoint_experiment, endpoint_blowup_curve, hardy_delta_scaling, hardy_endpoint_experiment, nonuniqueness_2d,
    parabolic_divergence_experiment, Curve, EtaSpec, HardyConfig, NonuniqueConfig, Rule, SharpnessVerdict,
};
use degenlab_core::spaces::{truncated_lp_norm, weighted_lp_norm, NormParams};
use degenlab_core::sweep::{n_hat, sweep_theta, SweepConfig, SweepStatus};

use crate::config::Params;
use crate::error::CliError;
use crate::report::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    EllipticSolve,
    EllipticFd,
    ParabolicCauchy,
    HeatKernel,
    BesselCheck,
    Norms,
    SweepTheta,
    SharpnessHardy,
    SharpnessParabolic,
    SharpnessNonunique,
    SharpnessAdjoint,
    SharpnessAll,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::EllipticSolve,
        Command::EllipticFd,
        Command::ParabolicCauchy,
        Command::HeatKernel,
        Command::BesselCheck,
        Command::Norms,
        Command::SweepTheta,
        Command::SharpnessHardy,
        Command::SharpnessParabolic,
        Command::SharpnessNonunique,
        Command::SharpnessAdjoint,
        Command::SharpnessAll,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::EllipticSolve => "elliptic-solve",
            Command::EllipticFd => "elliptic-fd",
            Command::ParabolicCauchy => "parabolic-cauchy",
            Command::HeatKernel => "heat-kernel",
            Command::BesselCheck => "bessel-check",
            Command::Norms => "norms",
            Command::SweepTheta => "sweep-theta",
            Command::SharpnessHardy => "sharpness-hardy",
            Command::SharpnessParabolic => "sharpness-parabolic",
            Command::SharpnessNonunique => "sharpness-nonunique",
            Command::SharpnessAdjoint => "sharpness-adjoint",
            Command::SharpnessAll => "sharpness-all",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("command: unknown command `{s}`")))
    }
}

/// Everything a command produces before report assembly.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub metrics: BTreeMap<String, f64>,
    pub verdicts: Vec<SharpnessVerdict>,
    pub tables: Vec<Table>,
}

impl Outcome {
    fn push_verdict(&mut self, v: SharpnessVerdict) {
        for c in &v.curves {
            self.tables.push(Table::from_curve(&v.experiment, c));
        }
        self.verdicts.push(v);
    }
}

/// Validated arguments of one command.
#[derive(Debug, Clone)]
pub enum Job {
    EllipticSolve(SolveArgs),
    EllipticFd(FdArgs),
    ParabolicCauchy(CauchyArgs),
    HeatKernel(KernelArgs),
    BesselCheck(BesselArgs),
    Norms(NormsArgs),
    SweepTheta(SweepArgs),
    SharpnessHardy(HardyArgs),
    SharpnessParabolic(ParabolicArgs),
    SharpnessNonunique(NonuniqueConfig),
    SharpnessAdjoint(AdjointArgs),
    SharpnessAll(Box<AllArgs>),
}

impl Job {
    /// Reads every key of `command` from `p`; errors surface in `Params::finish`.
    pub fn parse(command: Command, p: &mut Params) -> Job {
        match command {
            Command::EllipticSolve => Job::EllipticSolve(SolveArgs::parse(p)),
            Command::EllipticFd => Job::EllipticFd(FdArgs::parse(p)),
            Command::ParabolicCauchy => Job::ParabolicCauchy(CauchyArgs::parse(p)),
            Command::HeatKernel => Job::HeatKernel(KernelArgs::parse(p)),
            Command::BesselCheck => Job::BesselCheck(BesselArgs::parse(p)),
            Command::Norms => Job::Norms(NormsArgs::parse(p)),
            Command::SweepTheta => Job::SweepTheta(SweepArgs::parse(p)),
            Command::SharpnessHardy => Job::SharpnessHardy(HardyArgs::parse(p)),
            Command::SharpnessParabolic => Job::SharpnessParabolic(ParabolicArgs::parse(p)),
            Command::SharpnessNonunique => Job::SharpnessNonunique(parse_nonunique(p)),
            Command::SharpnessAdjoint => Job::SharpnessAdjoint(AdjointArgs::parse(p)),
            Command::SharpnessAll => Job::SharpnessAll(Box::new(AllArgs::parse(p))),
        }
    }

    pub fn execute(&self) -> Result<Outcome, CliError> {
        match self {
            Job::EllipticSolve(a) => a.run(),
            Job::EllipticFd(a) => a.run(),
            Job::ParabolicCauchy(a) => a.run(),
            Job::HeatKernel(a) => a.run(),
            Job::BesselCheck(a) => a.run(),
            Job::Norms(a) => a.run(),
            Job::SweepTheta(a) => a.run(),
            Job::SharpnessHardy(a) => single(a.run()?),
            Job::SharpnessParabolic(a) => single(a.run()?),
            Job::SharpnessNonunique(cfg) => single(nonuniqueness_2d(cfg)?),
            Job::SharpnessAdjoint(a) => single(a.run()?),
            Job::SharpnessAll(a) => a.run(),
        }
    }
}

fn single(v: SharpnessVerdict) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    out.push_verdict(v);
    Ok(out)
}

fn ensure_increasing(p: &mut Params, key: &str, xs: &[f64]) {
    p.require(xs.windows(2).all(|w| w[1] > w[0]), key, "must be strictly increasing");
}

#[derive(Debug, Clone, Copy)]
pub struct OpArgs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
}

impl OpArgs {
    fn parse(p: &mut Params, c_default: f64) -> Self {
        let a = p.f64("a", 1.0);
        let b = p.f64("b", -1.0);
        let c = p.f64("c", c_default);
        let lambda = p.f64("lambda", 0.0);
        p.require(a > 0.0, "a", "must be positive");
        p.require(lambda >= 0.0, "lambda", "must be nonnegative");
        Self { a, b, c, lambda }
    }

    fn op(&self) -> Result<EllipticOp1D<f64>, CliError> {
        Ok(EllipticOp1D::constant(self.a, self.b, self.c)?.with_lambda(self.lambda)?)
    }
}

fn parse_p(p: &mut Params) -> f64 {
    let v = p.f64("p", 2.0);
    p.require(v > 1.0, "p", "must exceed 1");
    v
}

fn parse_support(p: &mut Params) -> (f64, f64) {
    let lo = p.f64("f_lo", 1.0);
    let hi = p.f64("f_hi", 2.0);
    p.require(lo > 0.0 && hi > lo, "f_lo", "forcing support needs 0 < f_lo < f_hi");
    (lo, hi)
}

#[derive(Debug, Clone)]
pub struct SolveArgs {
    pub op: OpArgs,
    pub p: f64,
    pub theta: f64,
    pub support: (f64, f64),
    pub h: f64,
    pub decay: f64,
    pub tolerance: f64,
}

impl SolveArgs {
    fn parse(p: &mut Params) -> Self {
        let op = OpArgs::parse(p, 4.0);
        let s = Self {
            op,
            p: parse_p(p),
            theta: p.f64("theta", 0.0),
            support: parse_support(p),
            h: p.f64("h", 5e-4),
            decay: p.f64("decay", 1e-8),
            tolerance: p.f64("residual_tolerance", 1e-8),
        };
        p.require(s.h > 0.0 && s.h < 0.5, "h", "must lie in (0, 0.5)");
        p.require(s.decay > 0.0 && s.decay < 1.0, "decay", "must lie in (0, 1)");
        s
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let op = self.op.op()?;
        let roots = op.roots()?;
        let params = NormParams::new(self.p, self.theta)?;
        let bump = Bump::on_interval(self.support.0, self.support.1);
        let (lo, hi) = bump.support();
        let grid = decay_grid(&roots, self.p, self.theta, lo, hi, self.h, self.decay)?;
        let f = GridFunction::sample(grid, |x| bump.eval_x(x))?;
        let sol = solve_explicit(&op, &f, &params)?;
        let r = residual(&op, &sol.values, &f, &params)?;
        let comps = explicit_components(&sol, &params)?;

        let mut v = SharpnessVerdict::new("elliptic-solve");
        v.param("a", self.op.a).param("b", self.op.b).param("c", self.op.c).param("lambda", self.op.lambda);
        v.param("p", self.p).param("theta", self.theta);
        v.metric("alpha", roots.alpha).metric("beta", roots.beta).metric("b1", sol.b1).metric("b2", sol.b2);
        v.metric("norm_u", comps[0]).metric("norm_xdu", comps[1]).metric("norm_x2d2u", comps[2]);
        v.metric("norm_f", weighted_lp_norm(&f, &params)?);
        v.check("relative_residual", r, Rule::Below, self.tolerance);

        let mut out = Outcome::default();
        out.metrics.insert("grid_cells".into(), grid.n_cells() as f64);
        out.tables.push(solution_table("solution", &[("u", &sol.values), ("f", &f)]));
        out.push_verdict(v);
        out.metrics.insert("branch_inside".into(), (sol.branch == Regime::InsideRange) as u8 as f64);
        Ok(out)
    }
}

/// Columns `s, x` followed by one column per field, all on the first field's grid.
fn solution_table(name: &str, fields: &[(&str, &GridFunction<f64>)]) -> Table {
    let mut cols = vec!["s", "x"];
    cols.extend(fields.iter().map(|f| f.0));
    let mut t = Table::new(name, &cols);
    let grid = fields[0].1.grid;
    for i in 0..grid.n_s() {
        let mut row = vec![Cell::Num(grid.s_node(i)), Cell::Num(grid.x_node(i))];
        row.extend(fields.iter().map(|f| Cell::Num(f.1.values[i])));
        t.rows.push(row);
    }
    t
}

#[derive(Debug, Clone)]
pub struct FdArgs {
    pub op: OpArgs,
    pub p: f64,
    pub theta: f64,
    pub support: (f64, f64),
    pub n_cells: usize,
    pub margin: f64,
    pub tolerance: f64,
    pub mms_cells: Vec<u64>,
    pub min_factor: f64,
}

impl FdArgs {
    fn parse(p: &mut Params) -> Self {
        let s = Self {
            op: OpArgs::parse(p, 4.0),
            p: parse_p(p),
            theta: p.f64("theta", 0.0),
            support: parse_support(p),
            n_cells: p.usize("n_cells", 4096),
            margin: p.f64("margin", 0.05),
            tolerance: p.f64("tolerance", 1e-6),
            mms_cells: p.u64_list("mms_cells", &[200, 400, 800, 1600]),
            min_factor: p.f64("min_factor", 3.5),
        };
        p.require(s.n_cells >= 16, "n_cells", "must be at least 16");
        p.require(s.margin >= 0.0, "margin", "must be nonnegative");
        p.require(
            s.mms_cells.len() >= 2 && s.mms_cells.windows(2).all(|w| w[1] == 2 * w[0]) && s.mms_cells[0] >= 16,
            "mms_cells",
            "needs at least two entries, each double the previous, starting at 16 or more",
        );
        s
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let op = self.op.op()?;
        let (a, b, k) = (self.op.a, self.op.b, self.op.c + self.op.lambda);
        let params = NormParams::new(self.p, self.theta)?;
        let bump = Bump::on_interval(self.support.0, self.support.1);
        let grid = LogGrid::new(self.support.0.ln() - self.margin, self.support.1.ln() + self.margin, self.n_cells)?;
        let f = GridFunction::sample(grid, |x| bump.eval_x(x))?;
        let ue = solve_branch(&op, &f, Regime::InsideRange)?.values;
        let uf = solve_fd(&op, &f)?;
        let disc = truncated_lp_norm(&difference(&uf, &ue)?, &params)?;

        // u* = e^{-s²}: ℒu* = [-a(4s² - 2) - 2(a + b)s + k] u*.
        let mms = NormParams::new(self.p, 0.0)?;
        let mut conv = Table::new("convergence", &["n_cells", "error", "factor"]);
        let mut errors = Vec::new();
        for &n in &self.mms_cells {
            let g = LogGrid::new(-8.0, 8.0, n as usize)?;
            let exact = GridFunction::sample(g, |x: f64| (-(x.ln()).powi(2)).exp())?;
            let rhs = GridFunction::sample(g, |x: f64| {
                let s = x.ln();
                (-a * (4.0 * s * s - 2.0) - 2.0 * (a + b) * s + k) * (-s * s).exp()
            })?;
            let e = truncated_lp_norm(&difference(&solve_fd(&op, &rhs)?, &exact)?, &mms)?;
            let factor = errors.last().map(|prev: &f64| Cell::Num(prev / e)).unwrap_or(Cell::Empty);
            conv.rows.push(vec![Cell::Num(n as f64), Cell::Num(e), factor]);
            errors.push(e);
        }
        let min_factor = errors.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);

        let mut v = SharpnessVerdict::new("elliptic-fd");
        v.param("n_cells", self.n_cells as f64).param("p", self.p).param("theta", self.theta);
        v.metric("finest_mms_error", *errors.last().unwrap_or(&f64::NAN));
        v.check("fd_explicit_discrepancy", disc, Rule::AtMost, self.tolerance);
        v.check("min_convergence_factor", min_factor, Rule::AtLeast, self.min_factor);

        let mut out = Outcome::default();
        out.tables.push(solution_table("solution", &[("u_fd", &uf), ("u_explicit", &ue)]));
        out.tables.push(conv);
        out.push_verdict(v);
        Ok(out)
    }
}

fn difference(a: &GridFunction<f64>, b: &GridFunction<f64>) -> Result<GridFunction<f64>, CliError> {
    Ok(GridFunction::new(a.grid, a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect())?)
}

fn default_t_list() -> Vec<f64> {
    (1..=12).map(f64::from).collect()
}

#[derive(Debug, Clone)]
pub struct CauchyArgs {
    pub a: f64,
    pub c: f64,
    pub p: f64,
    pub theta: f64,
    pub t_list: Vec<f64>,
    pub tolerance: f64,
}

impl CauchyArgs {
    fn parse(p: &mut Params) -> Self {
        let s = Self {
            a: p.f64("a", 1.0),
            c: p.f64("c", 1.0),
            p: parse_p(p),
            theta: p.f64("theta", 3.0),
            t_list: p.f64_list("t_list", &default_t_list()),
            tolerance: p.f64("tolerance", 0.1),
        };
        p.require(s.a > 0.0, "a", "must be positive");
        p.require(s.c > 0.0, "c", "must be positive");
        ensure_increasing(p, "t_list", &s.t_list);
        s
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let edge = self.p * (self.c / self.a).sqrt();
        let mut out = Outcome::default();
        let v = if self.theta.abs() > edge {
            parabolic_divergence_experiment(self.a, self.c, self.p, self.theta, &self.t_list, self.tolerance)?
        } else {
            bounded_growth_verdict(self.a, self.c, self.p, self.theta, &self.t_list)?
        };
        out.metrics.insert("range_edge".into(), edge);
        out.push_verdict(v);
        Ok(out)
    }
}

/// Verdict that the heat-kernel norm curve saturates for `|θ| <= p√(c/a)`.
fn bounded_growth_verdict(a: f64, c: f64, p: f64, theta: f64, t_list: &[f64]) -> Result<SharpnessVerdict, CliError> {
    let g = norm_growth_curve(a, c, p, theta, t_list)?;
    let mut v = SharpnessVerdict::new("parabolic-bounded");
    v.param("a", a).param("c", c).param("p", p).param("theta", theta);
    v.metric("fitted_rate", g.fitted_rate).metric("predicted_rate", g.predicted_rate);
    v.check("last_relative_increment", g.last_relative_increment, Rule::Below, 1e-6);
    let mut curve = Curve::new("growth", &["t", "norm_p"]);
    for (t, n) in g.t.iter().zip(&g.norm_p) {
        curve.push(vec![*t, *n]);
    }
    v.curves.push(curve);
    Ok(v)
}

#[derive(Debug, Clone)]
pub struct KernelArgs {
    pub a: f64,
    pub c: f64,
    pub t_list: Vec<f64>,
    pub x_list: Vec<f64>,
}

impl KernelArgs {
    fn parse(p: &mut Params) -> Self {
        let s = Self {
            a: p.f64("a", 1.0),
            c: p.f64("c", 1.0),
            t_list: p.f64_list("t_list", &[1.0, 2.0, 4.0]),
            x_list: p.f64_list("x_list", &[1.0, 2.0, 4.0]),
        };
        p.require(s.a > 0.0, "a", "must be positive");
        p.require(s.c > 0.0, "c", "must be positive");
        p.require(s.t_list.iter().all(|&t| t >= 1.0), "t_list", "entries must be at least 1");
        p.require(s.x_list.iter().all(|&x| x >= 1.0), "x_list", "entries must be at least 1");
        s
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let mut table = Table::new("heat_kernel", &["t", "x", "v", "envelope", "ratio"]);
        let mut m = f64::INFINITY;
        for &t in &self.t_list {
            for &x in &self.x_list {
                let v = heat_kernel_solution(self.a, self.c, t, x);
                let env = t.powf(-0.5) * (-x * x / (4.0 * self.a * t) - self.c * t).exp();
                m = m.min(v / env);
                table.rows.push([t, x, v, env, v / env].into_iter().map(Cell::Num).collect());
            }
        }
        let mut v = SharpnessVerdict::new("heat-kernel");
        v.param("a", self.a).param("c", self.c);
        v.check("lower_bound_constant", m, Rule::Above, 0.0);
        let mut out = Outcome::default();
        out.tables.push(table);
        out.push_verdict(v);
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct BesselArgs {
    pub orders: Vec<f64>,
    pub per_decade: usize,
    pub tolerance: f64,
}

impl BesselArgs {
    fn parse(p: &mut Params) -> Self {
        let s = Self {
            orders: p.f64_list("orders", &[0.0, 0.5, 1.0, std::f64::consts::SQRT_2]),
            per_decade: p.usize("per_decade", 40),
            tolerance: p.f64("tolerance", 1e-9),
        };
        p.require(s.per_decade >= 2, "per_decade", "must be at least 2");
        s
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let suite = bessel_suite(&self.orders, self.per_decade)?;
        let mut v = SharpnessVerdict::new("bessel-check");
        v.param("per_decade", self.per_decade as f64);
        v.check("max_ode_residual", suite.max_ode_residual, Rule::AtMost, self.tolerance);
        v.check("max_recurrence_residual", suite.max_recurrence_residual, Rule::AtMost, self.tolerance);
        v.check("max_half_order_error", suite.max_half_order_error, Rule::AtMost, self.tolerance);
        let mut table = Table::new(
            "bounds",
            &["nu", "small_x_constant", "small_x_edge_slope", "large_x_constant", "large_x_edge_slope", "pass"],
        );
        let failed = suite.bounds.iter().filter(|b| !b.pass).count();
        for b in &suite.bounds {
            table.rows.push(vec![
                Cell::Num(b.nu),
                Cell::Num(b.small_x_constant),
                Cell::Num(b.small_x_edge_slope),
                Cell::Num(b.large_x_constant),
                Cell::Num(b.large_x_edge_slope),
                Cell::Text(b.pass.to_string()),
            ]);
        }
        v.check("failed_bound_regimes", failed as f64, Rule::AtMost, 0.0);
        let mut out = Outcome::default();
        out.tables.push(table);
        out.push_verdict(v);
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct NormsArgs {
    pub p: f64,
    pub theta: f64,
    pub seed: u64,
    pub corpus_size: usize,
    pub dyadic_bound: f64,
    pub interpolation_bound: f64,
    pub min_order: f64,
}

impl NormsArgs {
    fn parse(p: &mut Params) -> Self {
        let s = Self {
            p: p.f64("p", 2.0),
            theta: p.f64("theta", 0.0),
            seed: p.u64("seed", CORPUS_SEED),
            corpus_size: p.usize("corpus_size", CORPUS_SIZE),
            dyadic_bound: p.f64("dyadic_bound", FROZEN_DYADIC_CONSTANT * (1.0 + 1e-9)),
            interpolation_bound: p.f64("interpolation_bound", FROZEN_INTERPOLATION_CONSTANT * (1.0 + 1e-9)),
            min_order: p.f64("min_order", 3.5),
        };
        p.require(s.p >= 1.0, "p", "must be at least 1");
        p.require(s.corpus_size > 0, "corpus_size", "corpus must not be empty");
        s
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let params = NormParams::new(self.p, self.theta)?;
        let stats = corpus_stats(self.seed, self.corpus_size, &params)?;
        let mut corpus =
            Table::new("corpus", &["index", "dyadic_ratio_0", "dyadic_ratio_1", "dyadic_ratio_2", "interpolation"]);
        for (k, (r, i)) in stats.dyadic_ratios.iter().zip(&stats.interpolation).enumerate() {
            corpus.rows.push([k as f64, r[0], r[1], r[2], *i].into_iter().map(Cell::Num).collect());
        }

        let exact = std::f64::consts::PI.sqrt() * (self.theta * self.theta / 4.0).exp();
        let gauss = NormParams::new(1.0, self.theta)?;
        let mut quad = Table::new("quadrature", &["n_cells", "error", "order"]);
        let mut errors: Vec<f64> = Vec::new();
        for n in [25usize, 50, 100] {
            let g = LogGrid::new(-10.0, 10.0, n)?;
            let u = GridFunction::sample(g, |x: f64| (-(x.ln()).powi(2)).exp())?;
            let e = (weighted_lp_norm(&u, &gauss)? - exact).abs();
            let order = errors.last().map(|prev| Cell::Num((prev / e).log2())).unwrap_or(Cell::Empty);
            quad.rows.push(vec![Cell::Num(n as f64), Cell::Num(e), order]);
            errors.push(e);
        }
        let min_order = errors.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);

        let mut v = SharpnessVerdict::new("norms");
        v.param("p", self.p).param("theta", self.theta).param("corpus_size", self.corpus_size as f64);
        v.check("dyadic_constant", stats.dyadic_constant(), Rule::AtMost, self.dyadic_bound);
        v.check("interpolation_constant", stats.interpolation_constant(), Rule::AtMost, self.interpolation_bound);
        v.check("quadrature_order", min_order, Rule::AtLeast, self.min_order);
        let mut out = Outcome::default();
        out.tables.push(corpus);
        out.tables.push(quad);
        out.push_verdict(v);
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct SweepArgs {
    pub op: OpArgs,
    pub p: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_step: f64,
    pub probes: Option<Vec<f64>>,
    pub reference_theta: f64,
    pub seed: u64,
    pub corpus_size: usize,
    pub h: f64,
    pub growth_threshold: f64,
    pub blowup_factor: f64,
}

impl SweepArgs {
    fn parse(p: &mut Params) -> Self {
        let op = OpArgs::parse(p, 4.0);
        let probes = p.f64_list("probes", &[]);
        let s = Self {
            op,
            p: parse_p(p),
            theta_min: p.f64("theta_min", -5.0),
            theta_max: p.f64("theta_max", 5.0),
            theta_step: p.f64("theta_step", 0.25),
            probes: (!probes.is_empty()).then_some(probes),
            reference_theta: p.f64("reference_theta", 0.0),
            seed: p.u64("seed", 2024),
            corpus_size: p.usize("corpus_size", 20),
            h: p.f64("h", 2e-3),
            growth_threshold: p.f64("growth_threshold", 1.5),
            blowup_factor: p.f64("blowup_factor", 10.0),
        };
        p.require(s.theta_max > s.theta_min, "theta_max", "must exceed theta_min");
        p.require(s.theta_step > 0.0, "theta_step", "must be positive");
        p.require(
            s.theta_step <= 0.0 || (s.theta_max - s.theta_min) / s.theta_step <= 1e5,
            "theta_step",
            "sweep has more than 1e5 points",
        );
        p.require(s.corpus_size > 0, "corpus_size", "forcing corpus must not be empty");
        p.require(s.h > 0.0 && s.h < 0.5, "h", "must lie in (0, 0.5)");
        s
    }

    fn thetas(&self) -> Vec<f64> {
        let n = ((self.theta_max - self.theta_min) / self.theta_step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.theta_min + k as f64 * self.theta_step).collect()
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let base = EllipticOp1D::constant(self.op.a, self.op.b, self.op.c)?;
        let r0 = base.roots()?;
        let (lo0, hi0) = (r0.alpha * self.p, r0.beta * self.p);
        if !(self.theta_min < lo0 && self.theta_max > hi0) {
            return Err(CliError::Config(format!(
                "theta_min: sweep [{}, {}] must straddle the range ({lo0}, {hi0})",
                self.theta_min, self.theta_max
            )));
        }
        let roots = self.op.op()?.roots()?;
        let (lo, hi) = (roots.alpha * self.p, roots.beta * self.p);
        let probes = self.probes.clone().unwrap_or_else(|| vec![lo0 + 1e-2, hi0 - 1e-2]);
        let forcings = random_bumps(self.seed, self.corpus_size);
        let cfg = SweepConfig { p: self.p, lambda: self.op.lambda, h: self.h, growth_threshold: self.growth_threshold };

        let mut thetas = self.thetas();
        thetas.extend(&probes);
        thetas.sort_by(f64::total_cmp);
        thetas.dedup();
        let rows = sweep_theta(&base, &forcings, &thetas, &cfg)?;

        let inside = |t: f64| t > lo && t < hi;
        let mut table = Table::new("sweep", &["theta", "N_hat", "solver_status"]);
        for r in &rows {
            let n = r.n_hat.map(Cell::Num).unwrap_or(Cell::Empty);
            table.rows.push(vec![Cell::Num(r.theta), n, Cell::Text(r.status.as_str().into())]);
        }
        let inside_not_finite = rows.iter().filter(|r| inside(r.theta) && r.n_hat.is_none()).count();
        let outside: Vec<_> = rows.iter().filter(|r| r.theta < lo || r.theta > hi).collect();

        let mut v = SharpnessVerdict::new("sweep-theta");
        v.param("a", self.op.a).param("b", self.op.b).param("c", self.op.c).param("lambda", self.op.lambda);
        v.param("p", self.p).param("range_lo", lo).param("range_hi", hi);
        v.check("inside_rows_without_estimate", inside_not_finite as f64, Rule::AtMost, 0.0);
        if self.op.lambda == 0.0 {
            let reference = n_hat(&base, &forcings, self.reference_theta, &cfg)?;
            v.metric("n_hat_reference", reference);
            let mut worst = f64::INFINITY;
            for &t in &probes {
                let n = n_hat(&base, &forcings, t, &cfg)?;
                worst = worst.min(n / reference);
            }
            v.check("min_probe_blowup", worst, Rule::AtLeast, self.blowup_factor);
            let undetected = outside.iter().filter(|r| r.status != SweepStatus::Divergent).count();
            v.check("outside_rows_not_flagged", undetected as f64, Rule::AtMost, 0.0);
        } else {
            let missing = outside.iter().filter(|r| r.n_hat.is_none()).count();
            v.metric("outside_rows_without_estimate", missing as f64);
        }
        let mut out = Outcome::default();
        out.tables.push(table);
        out.push_verdict(v);
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct HardyArgs {
    pub base: HardyConfig,
    pub deltas: Vec<f64>,
    pub endpoint: Option<EndpointArgs>,
}

impl HardyArgs {
    fn parse(p: &mut Params) -> Self {
        let d = HardyConfig::default();
        let s_min = p.f64("s_min", f64::NAN);
        let base = HardyConfig {
            p: parse_p(p),
            c: p.f64("c", d.c),
            delta: d.delta,
            n_list: p.u64_list("n_list", &d.n_list),
            control_theta: p.f64("control_theta", d.control_theta),
            h: p.f64("h", d.h),
            dx1: p.f64("dx1", d.dx1),
            s_min: (!s_min.is_nan()).then_some(s_min),
            tolerance: p.f64("tolerance", d.tolerance),
        };
        let deltas = p.f64_list("deltas", &[0.25, 0.5]);
        p.require(base.c > 0.0, "c", "must be positive");
        p.require(deltas.iter().all(|&x| x > 0.0 && x < 1.0), "deltas", "entries must lie in (0, 1)");
        p.require(
            base.n_list.len() >= 2 && base.n_list.windows(2).all(|w| w[1] > w[0]) && base.n_list[0] >= 1,
            "n_list",
            "needs at least two strictly increasing positive entries",
        );
        p.require(base.h > 0.0 && base.dx1 > 0.0, "h", "grid steps must be positive");
        Self { base, deltas, endpoint: None }
    }

    fn run(&self) -> Result<SharpnessVerdict, CliError> {
        let runs: Vec<SharpnessVerdict> = self
            .deltas
            .iter()
            .map(|&delta| hardy_endpoint_experiment(&HardyConfig { delta, ..self.base.clone() }))
            .collect::<Result<_, _>>()?;
        let mut parts: Vec<(String, SharpnessVerdict)> =
            runs.iter().map(|r| (format!("delta_{}", r.parameters["delta"]).replace('.', "p"), r.clone())).collect();
        if runs.len() >= 2 {
            parts.push(("scaling".into(), hardy_delta_scaling(&runs, self.base.tolerance)?));
        }
        if let Some(e) = &self.endpoint {
            let mut v = SharpnessVerdict::new("elliptic-endpoint");
            v.curves.push(e.curve()?);
            parts.push(("endpoint".into(), v));
        }
        let parts: Vec<(&str, SharpnessVerdict)> = parts.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        Ok(SharpnessVerdict::merge("sharpness-hardy", &parts))
    }
}

#[derive(Debug, Clone)]
pub struct ParabolicArgs {
    pub a: f64,
    pub c: f64,
    pub p: f64,
    pub thetas: Vec<f64>,
    pub control_theta: f64,
    pub t_list: Vec<f64>,
    pub tolerance: f64,
}

impl ParabolicArgs {
    fn parse(p: &mut Params) -> Self {
        let s = Self {
            a: p.f64("a", 1.0),
            c: p.f64("c", 1.0),
            p: parse_p(p),
            thetas: p.f64_list("thetas", &[3.0, 2.5]),
            control_theta: p.f64("control_theta", 0.0),
            t_list: p.f64_list("t_list", &default_t_list()),
            tolerance: p.f64("tolerance", 0.1),
        };
        p.require(s.a > 0.0, "a", "must be positive");
        p.require(s.c > 0.0, "c", "must be positive");
        ensure_increasing(p, "t_list", &s.t_list);
        s
    }

    fn run(&self) -> Result<SharpnessVerdict, CliError> {
        let mut parts = Vec::new();
        for &theta in &self.thetas {
            let v = parabolic_divergence_experiment(self.a, self.c, self.p, theta, &self.t_list, self.tolerance)?;
            parts.push((format!("theta_{theta}").replace('.', "p"), v));
        }
        parts.push((
            "control".into(),
            bounded_growth_verdict(self.a, self.c, self.p, self.control_theta, &self.t_list)?,
        ));
        let parts: Vec<(&str, SharpnessVerdict)> = parts.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        Ok(SharpnessVerdict::merge("sharpness-parabolic", &parts))
    }
}

fn parse_nonunique(p: &mut Params) -> NonuniqueConfig {
    let d = NonuniqueConfig::default();
    let cfg = NonuniqueConfig {
        c: p.f64("c", d.c),
        p: parse_p(p),
        theta: p.f64("theta", d.theta),
        control_theta: p.f64("control_theta", d.control_theta),
        eta: EtaSpec {
            amplitude: p.f64("eta_amplitude", d.eta.amplitude),
            sharpness: p.f64("eta_sharpness", d.eta.sharpness),
        },
        s_max: p.f64("s_max", d.s_max),
        s_min_list: p.f64_list("s_min_list", &d.s_min_list),
        h: p.f64("h", d.h),
        x1_half_width: p.f64("x1_half_width", d.x1_half_width),
        dx1: p.f64("dx1", d.dx1),
        panels: p.usize("panels", d.panels),
        order: p.usize("order", d.order),
        residual_tolerance: p.f64("residual_tolerance", d.residual_tolerance),
        stability_tolerance: p.f64("stability_tolerance", d.stability_tolerance),
        control_growth: p.f64("control_growth", d.control_growth),
    };
    p.require(cfg.c > 0.0, "c", "must be positive");
    p.require(
        cfg.s_min_list.len() >= 2 && cfg.s_min_list.windows(2).all(|w| w[1] < w[0]) && cfg.s_min_list[0] < cfg.s_max,
        "s_min_list",
        "needs at least two strictly decreasing entries below s_max",
    );
    p.require(cfg.h > 0.0 && cfg.dx1 > 0.0 && cfg.x1_half_width > 0.0, "h", "grid steps and width must be positive");
    p.require(cfg.panels > 0 && cfg.order > 0, "panels", "panels and order must be positive");
    p.require(cfg.eta.sharpness > 0.0, "eta_sharpness", "must be positive");
    cfg
}

#[derive(Debug, Clone)]
pub struct AdjointArgs {
    pub c: f64,
    pub seed: u64,
    pub pairs: usize,
    pub tolerance: f64,
}

impl AdjointArgs {
    fn parse(p: &mut Params) -> Self {
        let s = Self {
            c: p.f64("c", 1.0),
            seed: p.u64("seed", 7),
            pairs: p.usize("pairs", 10),
            tolerance: p.f64("tolerance", 1e-6),
        };
        p.require(s.c > 0.0, "c", "must be positive");
        p.require(s.pairs > 0, "pairs", "must be positive");
        s
    }

    fn run(&self) -> Result<SharpnessVerdict, CliError> {
        Ok(adjoint_experiment(self.c, self.seed, self.pairs, self.tolerance)?)
    }
}

/// Approach of `N̂(θ)` to `αp` recorded alongside the endpoint experiment.
#[derive(Debug, Clone)]
pub struct EndpointArgs {
    pub op: OpArgs,
    pub p: f64,
    pub distances: Vec<f64>,
    pub seed: u64,
    pub corpus_size: usize,
    pub h: f64,
}

impl EndpointArgs {
    fn parse(p: &mut Params) -> Self {
        let op = OpArgs::parse(p, 4.0);
        let s = Self {
            op,
            p: parse_p(p),
            distances: p.f64_list("distances", &[1.0, 0.1, 0.01]),
            seed: p.u64("seed", 2024),
            corpus_size: p.usize("corpus_size", 5),
            h: p.f64("h", 2e-3),
        };
        p.require(s.distances.iter().all(|&d| d > 0.0), "distances", "entries must be positive");
        p.require(s.corpus_size > 0, "corpus_size", "forcing corpus must not be empty");
        p.require(s.h > 0.0 && s.h < 0.5, "h", "must lie in (0, 0.5)");
        s
    }

    fn curve(&self) -> Result<Curve, CliError> {
        let op = EllipticOp1D::constant(self.op.a, self.op.b, self.op.c)?;
        let roots = op.roots()?;
        classify_theta(roots.alpha * self.p + self.distances[0], self.p, &roots)?;
        Ok(endpoint_blowup_curve(&op, self.p, &self.distances, &random_bumps(self.seed, self.corpus_size), self.h)?)
    }
}

#[derive(Debug, Clone)]
pub struct AllArgs {
    pub hardy: HardyArgs,
    pub parabolic: ParabolicArgs,
    pub nonunique: NonuniqueConfig,
    pub adjoint: AdjointArgs,
}

impl AllArgs {
    fn parse(p: &mut Params) -> Self {
        let mut hardy = HardyArgs::parse(p.scoped("hardy"));
        hardy.endpoint = Some(EndpointArgs::parse(p.scoped("endpoint")));
        let parabolic = ParabolicArgs::parse(p.scoped("parabolic"));
        let nonunique = parse_nonunique(p.scoped("nonunique"));
        let adjoint = AdjointArgs::parse(p.scoped("adjoint"));
        p.scoped("");
        Self { hardy, parabolic, nonunique, adjoint }
    }

    fn run(&self) -> Result<Outcome, CliError> {
        let ((hardy, parabolic), (nonunique, adjoint)) = rayon::join(
            || rayon::join(|| self.hardy.run(), || self.parabolic.run()),
            || rayon::join(|| nonuniqueness_2d(&self.nonunique).map_err(CliError::from), || self.adjoint.run()),
        );
        let mut out = Outcome::default();
        for v in [hardy?, parabolic?, nonunique?, adjoint?] {
            out.push_verdict(v);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.as_str().parse::<Command>().unwrap(), c);
        }
        assert!("elliptic".parse::<Command>().is_err());
    }

    #[test]
    fn sweep_lattice_includes_both_ends() {
        let raw = RawConfig::default();
        let mut p = Params::new(&raw);
        let s = SweepArgs::parse(&mut p);
        let t = s.thetas();
        assert_eq!(t.len(), 41);
        assert_eq!(t[0], -5.0);
        assert!((t[40] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn scoped_keys_for_all() {
        let mut raw = RawConfig::default();
        raw.set("hardy.deltas=0.25").unwrap();
        raw.set("adjoint.pairs=3").unwrap();
        let mut p = Params::new(&raw);
        let a = AllArgs::parse(&mut p);
        p.finish().unwrap();
        assert_eq!(a.hardy.deltas, vec![0.25]);
        assert_eq!(a.adjoint.pairs, 3);
    }
}

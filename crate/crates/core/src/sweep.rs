//! Sweep of the measured a priori constant `N̂(θ)` across and beyond the
//! admissible range.

use rayon::prelude::*;
use serde::Serialize;

use crate::bumps::Bump;
use crate::elliptic::{apriori_ratio, solve_branch, support_grid};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::indicial::{classify_theta, EllipticOp1D, Regime};
use crate::spaces::{truncated_lp_norm, NormParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepStatus {
    Finite,
    /// `θ` equals an end of the range.
    Endpoint,
    /// The in-range construction has a norm that grows with the grid.
    Divergent,
}

impl SweepStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepStatus::Finite => "finite",
            SweepStatus::Endpoint => "endpoint",
            SweepStatus::Divergent => "divergent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub n_hat: Option<f64>,
    pub status: SweepStatus,
    /// Norm growth of the in-range construction between extents 20 and 40.
    pub growth: Option<f64>,
}

/// Settings of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub p: f64,
    pub lambda: f64,
    pub h: f64,
    /// Ratio of truncated norms on extents 40 and 20 flagging divergence.
    pub growth_threshold: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { p: 2.0, lambda: 0.0, h: 2e-3, growth_threshold: 1.5 }
    }
}

/// Largest ratio over the forcing corpus at `θ`.
pub fn n_hat(op: &EllipticOp1D<f64>, forcings: &[Bump<f64>], theta: f64, cfg: &SweepConfig) -> Result<f64> {
    if forcings.is_empty() {
        return Err(Error::InvalidInput("empty forcing corpus".into()));
    }
    let params = NormParams::new(cfg.p, theta)?;
    let ratios: Vec<f64> = forcings
        .par_iter()
        .map(|b| {
            let (lo, hi) = b.support();
            let grid = support_grid(lo, hi, 0.3, cfg.h)?;
            let f = GridFunction::sample(grid, |x| b.eval_x(x))?;
            Ok(apriori_ratio(op, &f, &params, cfg.lambda)?.ratio)
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Truncated `L_{p,θ}` norms of the in-range construction on grids extending
/// `20` and `40` beyond the support; returns their ratio.
pub fn inside_branch_growth(op: &EllipticOp1D<f64>, forcing: &Bump<f64>, theta: f64, p: f64) -> Result<f64> {
    let params = NormParams::new(p, theta)?;
    let (lo, hi) = forcing.support();
    let norm = |ext: f64| -> Result<f64> {
        let grid = support_grid(lo, hi, ext, 0.02)?;
        let f = GridFunction::sample(grid, |x| forcing.eval_x(x))?;
        truncated_lp_norm(&solve_branch(op, &f, Regime::InsideRange)?.values, &params)
    };
    Ok(norm(40.0)? / norm(20.0)?)
}

pub fn sweep_theta(
    op: &EllipticOp1D<f64>,
    forcings: &[Bump<f64>],
    thetas: &[f64],
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    if forcings.is_empty() {
        return Err(Error::InvalidInput("empty forcing corpus".into()));
    }
    let op = op.clone().with_lambda(cfg.lambda)?;
    let roots = op.roots()?;
    thetas
        .iter()
        .map(|&theta| match classify_theta(theta, cfg.p, &roots) {
            Err(Error::EndpointTheta { .. }) => {
                Ok(SweepRow { theta, n_hat: None, status: SweepStatus::Endpoint, growth: None })
            }
            Err(e) => Err(e),
            Ok(Regime::InsideRange) => {
                let base = op.clone().with_lambda(0.0)?;
                Ok(SweepRow {
                    theta,
                    n_hat: Some(n_hat(&base, forcings, theta, cfg)?),
                    status: SweepStatus::Finite,
                    growth: None,
                })
            }
            Ok(_) => {
                let growth = inside_branch_growth(&op, &forcings[0], theta, cfg.p)?;
                if growth > cfg.growth_threshold {
                    Ok(SweepRow { theta, n_hat: None, status: SweepStatus::Divergent, growth: Some(growth) })
                } else {
                    let base = op.clone().with_lambda(0.0)?;
                    Ok(SweepRow {
                        theta,
                        n_hat: Some(n_hat(&base, forcings, theta, cfg)?),
                        status: SweepStatus::Finite,
                        growth: Some(growth),
                    })
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bumps::random_bumps;

    fn op() -> EllipticOp1D<f64> {
        EllipticOp1D::constant(1.0, -1.0, 4.0).unwrap()
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(matches!(sweep_theta(&op(), &[], &[0.0], &SweepConfig::default()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn statuses_by_regime() {
        let rows =
            sweep_theta(&op(), &random_bumps(1, 3), &[-5.0, -4.0, 0.0, 4.0, 5.0], &SweepConfig::default()).unwrap();
        let st: Vec<SweepStatus> = rows.iter().map(|r| r.status).collect();
        use SweepStatus::*;
        assert_eq!(st, vec![Divergent, Endpoint, Finite, Endpoint, Divergent]);
        assert!(rows[2].n_hat.unwrap().is_finite());
    }

    #[test]
    fn large_lambda_is_finite_everywhere() {
        let cfg = SweepConfig { lambda: 10.0, ..Default::default() };
        let rows = sweep_theta(&op(), &random_bumps(1, 2), &[-5.0, 0.0, 5.0], &cfg).unwrap();
        assert!(rows.iter().all(|r| r.status == SweepStatus::Finite && r.n_hat.is_some()));
    }
}

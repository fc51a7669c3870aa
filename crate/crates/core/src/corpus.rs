//! Corpus-wide norm constants: dyadic equivalence and interpolation.

use rayon::prelude::*;

use crate::bumps::log_gaussian_corpus;
use crate::error::Result;
use crate::grid::{GridFunction, LogGrid};
use crate::spaces::{dyadic_norm, sobolev_components, weighted_sobolev_norm, DyadicCutoff, NormParams};

/// Seed of the frozen log-Gaussian corpus.
pub const CORPUS_SEED: u64 = 20_240_601;
pub const CORPUS_SIZE: usize = 20;

/// Measured on the frozen corpus at `p = 2, θ = 0` and kept as regression bounds.
pub const FROZEN_DYADIC_CONSTANT: f64 = 16.035865177681504;
pub const FROZEN_INTERPOLATION_CONSTANT: f64 = 0.844568078317446;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    /// `dyadic_norm / weighted_sobolev_norm` for orders 0, 1, 2.
    pub dyadic_ratios: Vec<[f64; 3]>,
    /// `‖xDu‖ / (‖u‖_{H²}^{1/2} ‖u‖^{1/2})`.
    pub interpolation: Vec<f64>,
}

impl CorpusStats {
    /// Smallest `C` with `1/C <= ratio <= C` over the corpus and all orders.
    pub fn dyadic_constant(&self) -> f64 {
        self.dyadic_ratios.iter().flatten().map(|&r| r.max(1.0 / r)).fold(1.0, f64::max)
    }

    pub fn interpolation_constant(&self) -> f64 {
        self.interpolation.iter().copied().fold(0.0, f64::max)
    }
}

pub fn corpus_grid() -> Result<LogGrid<f64>> {
    LogGrid::new(-14.0, 14.0, 1120)
}

pub fn corpus_stats(seed: u64, count: usize, params: &NormParams<f64>) -> Result<CorpusStats> {
    let grid = corpus_grid()?;
    let zeta = DyadicCutoff::new(params.p);
    let rows: Vec<([f64; 3], f64)> = log_gaussian_corpus(seed, count)
        .par_iter()
        .map(|mix| {
            let u = GridFunction::sample(grid, |x| mix.eval_x(x))?;
            let mut r = [0.0; 3];
            for (order, ri) in r.iter_mut().enumerate() {
                *ri = dyadic_norm(&u, order, params, &zeta)? / weighted_sobolev_norm(&u, order, params)?;
            }
            let comps = sobolev_components(&u, params)?;
            let h2 = weighted_sobolev_norm(&u, 2, params)?;
            Ok((r, comps[1] / (h2 * comps[0]).sqrt()))
        })
        .collect::<Result<_>>()?;
    Ok(CorpusStats {
        dyadic_ratios: rows.iter().map(|r| r.0).collect(),
        interpolation: rows.iter().map(|r| r.1).collect(),
    })
}

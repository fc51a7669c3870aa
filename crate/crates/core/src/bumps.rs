//! Smooth compactly supported test functions and seeded random families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Real;

/// `exp(-1/(1-t²))` on `|t| < 1`, zero elsewhere.
#[inline]
pub fn mollifier<T: Real>(t: T) -> T {
    let w = T::one() - t * t;
    if w <= T::zero() {
        T::zero()
    } else {
        (-w.recip()).exp()
    }
}

/// Bump `A φ((s - s0)/w)` in the log coordinate `s = ln x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump<T> {
    pub center: T,
    pub half_width: T,
    pub amplitude: T,
}

impl<T: Real> Bump<T> {
    /// Bump whose support is `[x_lo, x_hi]` in `x`.
    pub fn on_interval(x_lo: T, x_hi: T) -> Self {
        let (l, h) = (x_lo.ln(), x_hi.ln());
        Self { center: (l + h) * T::lit(0.5), half_width: (h - l) * T::lit(0.5), amplitude: T::one() }
    }

    #[inline]
    pub fn eval_s(&self, s: T) -> T {
        self.amplitude * mollifier((s - self.center) / self.half_width)
    }

    #[inline]
    pub fn eval_x(&self, x: T) -> T {
        self.eval_s(x.ln())
    }

    /// Support in `s`.
    pub fn support(&self) -> (T, T) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn shifted(&self, ds: T) -> Self {
        Self { center: self.center + ds, ..*self }
    }
}

/// `count` bumps with centre in `[-1, 1]`, half width in `[0.3, 0.8]`,
/// amplitude in `[0.5, 2]`.
pub fn random_bumps(seed: u64, count: usize) -> Vec<Bump<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Bump {
            center: rng.gen_range(-1.0..1.0),
            half_width: rng.gen_range(0.3..0.8),
            amplitude: rng.gen_range(0.5..2.0),
        })
        .collect()
}

/// `Σ_k w_k exp(-(ln x - μ_k)² / (2σ_k²))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGaussianMixture {
    pub components: Vec<(f64, f64, f64)>,
}

impl LogGaussianMixture {
    pub fn eval_s(&self, s: f64) -> f64 {
        self.components.iter().map(|&(w, mu, sigma)| w * (-(s - mu).powi(2) / (2.0 * sigma * sigma)).exp()).sum()
    }

    pub fn eval_x(&self, x: f64) -> f64 {
        self.eval_s(x.ln())
    }
}

/// Frozen corpus of mixtures with 1 to 3 components, weights in `[-1, 2]`,
/// means in `[-1.5, 1.5]` and widths in `[0.4, 1.2]`.
pub fn log_gaussian_corpus(seed: u64, count: usize) -> Vec<LogGaussianMixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let mut components: Vec<(f64, f64, f64)> =
                (0..k).map(|_| (rng.gen_range(-1.0..2.0), rng.gen_range(-1.5..1.5), rng.gen_range(0.4..1.2))).collect();
            components[0].0 = components[0].0.abs() + 0.5;
            LogGaussianMixture { components }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_families_are_reproducible() {
        assert_eq!(random_bumps(7, 5), random_bumps(7, 5));
        assert_eq!(log_gaussian_corpus(3, 4), log_gaussian_corpus(3, 4));
        for b in random_bumps(11, 50) {
            assert!((-1.0..1.0).contains(&b.center));
            assert!((0.3..0.8).contains(&b.half_width));
        }
    }

    #[test]
    fn interval_bump_support() {
        let b = Bump::on_interval(1.0f64, 2.0);
        assert_eq!(b.eval_x(1.0), 0.0);
        assert!(b.eval_x(1.4) > 0.0);
        assert_eq!(b.eval_x(2.0), 0.0);
    }
}

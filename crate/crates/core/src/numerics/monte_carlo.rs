//! Seeded Monte Carlo integration over boxes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::Estimate;

/// Unbiased Monte Carlo estimate of the integral of `f` over an
/// axis-aligned box, with its standard error.
///
/// Samples are drawn from a counter-style seeded stream and the sums are
/// accumulated blockwise in a fixed order, so the estimate is bitwise
/// reproducible for a fixed `(bounds, samples, seed)`.
pub fn monte_carlo_box(
    f: impl Fn(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    if bounds.is_empty() {
        return Err(Error::InvalidInput("empty integration box".into()));
    }
    let mut volume = 1.0;
    for &(lo, hi) in bounds {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("bad box side [{lo}, {hi}]")));
        }
        volume *= hi - lo;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const BLOCK: usize = 4096;
    let mut block_sums = Vec::with_capacity(samples / BLOCK + 1);
    let mut block_sq_sums = Vec::with_capacity(samples / BLOCK + 1);
    let mut sum = 0.0;
    let mut sq_sum = 0.0;
    let mut x = vec![0.0f64; bounds.len()];

    for i in 0..samples {
        for (xj, &(lo, hi)) in x.iter_mut().zip(bounds) {
            let u: f64 = rng.random();
            *xj = lo + u * (hi - lo);
        }
        let v = f(&x);
        if v.is_nan() {
            return Err(Error::NonFinite(format!("integrand at {x:?}")));
        }
        sum += v;
        sq_sum += v * v;
        if (i + 1) % BLOCK == 0 {
            block_sums.push(sum);
            block_sq_sums.push(sq_sum);
            sum = 0.0;
            sq_sum = 0.0;
        }
    }
    block_sums.push(sum);
    block_sq_sums.push(sq_sum);

    let total: f64 = block_sums.iter().sum();
    let total_sq: f64 = block_sq_sums.iter().sum();
    let m = samples as f64;
    let mean = total / m;
    let var = (total_sq / m - mean * mean).max(0.0);
    Ok(Estimate {
        value: volume * mean,
        error: volume * (var / m).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_unit_box() {
        let est = monte_carlo_box(|_| 1.0, &[(0.0, 1.0), (0.0, 1.0)], 1000, 3).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.error, 0.0);
    }

    #[test]
    fn quadratic_moment() {
        // int over [0,1]^2 of (u^2 + v^2) = 2/3
        let est = monte_carlo_box(
            |x| x[0] * x[0] + x[1] * x[1],
            &[(0.0, 1.0), (0.0, 1.0)],
            200_000,
            5,
        )
        .unwrap();
        assert!(
            (est.value - 2.0 / 3.0).abs() <= 3.0 * est.error,
            "got {} +- {}",
            est.value,
            est.error
        );
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        let run = || {
            monte_carlo_box(|x| (x[0] * 7.3).sin() * x[1], &[(0.0, 2.0), (-1.0, 1.0)], 50_000, 99)
                .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
    }

    #[test]
    fn standard_error_scales_like_inverse_sqrt() {
        let se = |m: usize| {
            monte_carlo_box(|x| (x[0] * 9.0).cos(), &[(0.0, 1.0)], m, 17)
                .unwrap()
                .error
        };
        let ratio = se(10_000) / se(1_000_000);
        // expect ~10, allow a factor of 2 either way
        assert!(ratio > 5.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(monte_carlo_box(|_| 1.0, &[(0.0, 1.0)], 0, 0).is_err());
        assert!(monte_carlo_box(|_| 1.0, &[(1.0, 0.0)], 10, 0).is_err());
    }
}

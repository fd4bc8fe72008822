//! Smooth test functions for the invariant functionals.

use crate::error::{Error, Result};
use crate::numerics::grid::{GridFunction, PchipInterpolant};

/// Smooth compactly supported bump
/// `rho(t) = exp(1 - 1/(1 - ((t-c)/w)^2))` for `|t - c| < w`, zero outside.
///
/// The template peaks at 1 at the center and vanishes with all derivatives
/// at the support boundary `[c - w, c + w]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpFunction {
    center: f64,
    half_width: f64,
}

impl BumpFunction {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !(center.is_finite() && half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bump requires finite center and positive half-width, got ({center}, {half_width})"
            )));
        }
        Ok(Self { center, half_width })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.half_width;
        if !(u.abs() < 1.0) {
            return 0.0;
        }
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    }

    /// Integral over the support, by trapezoid on a fine grid. All template
    /// derivatives vanish at the endpoints, so the trapezoid rule converges
    /// superalgebraically here.
    pub fn integral(&self) -> f64 {
        const N: usize = 8193;
        let (a, b) = self.support();
        let h = (b - a) / (N - 1) as f64;
        let mut sum = 0.0;
        for i in 1..N - 1 {
            sum += self.eval(a + i as f64 * h);
        }
        sum * h
    }
}

/// A scalar test function on the nonnegative half-line.
///
/// Production paths use `Bump`; `Sampled` carries grid data produced by the
/// transform machinery; `ExpDecay` is a test-mode function without compact
/// support, truncated at `cutoff`.
#[derive(Debug, Clone)]
pub enum TestFunction {
    Bump(BumpFunction),
    Sampled(SampledFunction),
    ExpDecay { rate: f64, cutoff: f64 },
}

impl TestFunction {
    pub fn from_grid(grid: GridFunction) -> Self {
        Self::Sampled(SampledFunction::new(grid))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Bump(b) => b.eval(t),
            Self::Sampled(s) => s.eval(t),
            Self::ExpDecay { rate, cutoff } => {
                if t <= *cutoff {
                    (-rate * t).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper end of the (effective) support.
    pub fn support_hi(&self) -> f64 {
        match self {
            Self::Bump(b) => b.support().1,
            Self::Sampled(s) => s.grid.hi(),
            Self::ExpDecay { cutoff, .. } => *cutoff,
        }
    }
}

/// Grid data interpreted as a function vanishing outside the grid interval.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    grid: GridFunction,
    interp: PchipInterpolant,
}

impl SampledFunction {
    pub fn new(grid: GridFunction) -> Self {
        let interp = PchipInterpolant::new(&grid);
        Self { grid, interp }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.grid.lo() || t > self.grid.hi() {
            0.0
        } else {
            self.interp.eval(t)
        }
    }

    pub fn grid(&self) -> &GridFunction {
        &self.grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_support_and_smooth_peak() {
        let b = BumpFunction::new(2.0, 1.0).unwrap();
        assert_eq!(b.eval(2.0), 1.0);
        assert_eq!(b.eval(1.0), 0.0);
        assert_eq!(b.eval(3.0), 0.0);
        assert_eq!(b.eval(10.0), 0.0);
        assert!(b.eval(2.5) > 0.0 && b.eval(2.5) < 1.0);
        // no NaN even for infinite arguments
        assert_eq!(b.eval(f64::INFINITY), 0.0);
    }

    #[test]
    fn bump_integral_scales_with_width() {
        let b1 = BumpFunction::new(0.0, 1.0).unwrap();
        let b2 = BumpFunction::new(5.0, 2.5).unwrap();
        let ratio = b2.integral() / b1.integral();
        assert!((ratio - 2.5).abs() < 1e-12, "ratio {ratio}");
    }

    #[test]
    fn bump_rejects_bad_width() {
        assert!(BumpFunction::new(1.0, 0.0).is_err());
        assert!(BumpFunction::new(1.0, -2.0).is_err());
    }

    #[test]
    fn sampled_function_vanishes_outside_grid() {
        let g = GridFunction::from_fn(1.0, 3.0, 33, |x| x).unwrap();
        let f = TestFunction::from_grid(g);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(3.5), 0.0);
        assert!((f.eval(2.0) - 2.0).abs() < 1e-12);
    }
}

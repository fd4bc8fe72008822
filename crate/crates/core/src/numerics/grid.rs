//! Uniformly sampled functions on an interval.
//!
//! `GridFunction` is the substrate of all transform numerics: Abel
//! transforms, differentiation and reconstruction all operate on uniform
//! grids with both endpoints included.

use crate::error::{Error, Result};

/// A function sampled at `N >= 2` uniformly spaced nodes on `[lo, hi]`,
/// endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!(
                "grid interval [{lo}, {hi}] is not a finite nonempty interval"
            )));
        }
        if values.len() < 2 {
            return Err(Error::GridTooCoarse {
                got: values.len(),
                min: 2,
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("grid value {bad}")));
        }
        Ok(Self { lo, hi, values })
    }

    /// Sample a closure at `n` uniform nodes on `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooCoarse { got: n, min: 2 });
        }
        let step = (hi - lo) / (n - 1) as f64;
        let values = (0..n).map(|i| f(lo + i as f64 * step)).collect();
        Self::new(lo, hi, values)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // N >= 2 by construction
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.values.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Apply `f` to every value, keeping the grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.lo, self.hi, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Combine two grid functions node by node; grids must match.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.len() != other.len()
            || (self.lo - other.lo).abs() > 1e-12
            || (self.hi - other.hi).abs() > 1e-12
        {
            return Err(Error::InvalidInput("grid mismatch in zip_map".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.lo, self.hi, values)
    }

    /// Piecewise-linear evaluation; `x` is clamped to `[lo, hi]`.
    pub fn sample_linear(&self, x: f64) -> f64 {
        let x = x.clamp(self.lo, self.hi);
        let h = self.step();
        let pos = (x - self.lo) / h;
        let i = (pos.floor() as usize).min(self.len() - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Second-order finite differences: central at interior nodes, one-sided
/// three-point stencils at the ends.
pub fn differentiate(g: &GridFunction) -> Result<GridFunction> {
    let n = g.len();
    if n < 3 {
        return Err(Error::GridTooCoarse { got: n, min: 3 });
    }
    let h = g.step();
    let v = g.values();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    GridFunction::new(g.lo(), g.hi(), d)
}

/// Monotone cubic (Fritsch–Carlson) interpolant with precomputed node slopes.
///
/// Evaluation clamps to the grid interval, so the interpolant extends
/// constantly outside `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct PchipInterpolant {
    grid: GridFunction,
    slopes: Vec<f64>,
}

impl PchipInterpolant {
    pub fn new(grid: &GridFunction) -> Self {
        let n = grid.len();
        let h = grid.step();
        let v = grid.values();
        let deltas: Vec<f64> = (0..n - 1).map(|i| (v[i + 1] - v[i]) / h).collect();
        let mut slopes = vec![0.0; n];
        for i in 1..n - 1 {
            let (d0, d1) = (deltas[i - 1], deltas[i]);
            slopes[i] = if d0 * d1 > 0.0 {
                2.0 * d0 * d1 / (d0 + d1)
            } else {
                0.0
            };
        }
        slopes[0] = end_slope(deltas[0], *deltas.get(1).unwrap_or(&deltas[0]));
        slopes[n - 1] = end_slope(deltas[n - 2], if n > 2 { deltas[n - 3] } else { deltas[n - 2] });
        Self {
            grid: grid.clone(),
            slopes,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.grid;
        let x = x.clamp(g.lo(), g.hi());
        let h = g.step();
        let pos = (x - g.lo()) / h;
        let i = (pos.floor() as usize).min(g.len() - 2);
        let t = pos - i as f64;
        let (y0, y1) = (g.values()[i], g.values()[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2)
    }
}

// Quadratic (Lagrange) extrapolation through three samples.
pub(crate) fn quadratic_extrapolate(xs: [f64; 3], ys: [f64; 3], x: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..3 {
        let mut term = ys[i];
        for j in 0..3 {
            if i != j {
                term *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        total += term;
    }
    total
}

// Shape-preserving one-sided end slope.
fn end_slope(d_near: f64, d_far: f64) -> f64 {
    let s = (3.0 * d_near - d_far) / 2.0;
    if s * d_near <= 0.0 {
        0.0
    } else if s.abs() > 3.0 * d_near.abs() {
        3.0 * d_near
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_degenerate_input() {
        assert!(GridFunction::new(0.0, 1.0, vec![1.0]).is_err());
        assert!(GridFunction::new(1.0, 0.0, vec![1.0, 2.0]).is_err());
        assert!(GridFunction::new(0.0, 1.0, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn differentiate_square() {
        let g = GridFunction::from_fn(0.0, 1.0, 101, |x| x * x).unwrap();
        let d = differentiate(&g).unwrap();
        let max_err = d
            .nodes()
            .zip(d.values())
            .map(|(x, &v)| (v - 2.0 * x).abs())
            .fold(0.0, f64::max);
        assert!(max_err <= 1e-3, "max error {max_err}");
    }

    #[test]
    fn differentiate_constant_is_exactly_zero() {
        let g = GridFunction::from_fn(0.0, 2.0, 33, |_| 7.5).unwrap();
        let d = differentiate(&g).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn differentiate_second_order_convergence() {
        let err = |n: usize| {
            let g = GridFunction::from_fn(0.0, 1.0, n, f64::sin).unwrap();
            let d = differentiate(&g).unwrap();
            // interior nodes only
            d.nodes()
                .zip(d.values())
                .skip(1)
                .take(n - 2)
                .map(|(x, &v)| (v - x.cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(101), err(201));
        let ratio = e1 / e2;
        assert!(ratio > 3.0 && ratio < 5.0, "observed ratio {ratio}");
    }

    #[test]
    fn differentiate_needs_three_nodes() {
        let g = GridFunction::new(0.0, 1.0, vec![0.0, 1.0]).unwrap();
        assert!(differentiate(&g).is_err());
    }

    #[test]
    fn pchip_reproduces_linear_data() {
        let g = GridFunction::from_fn(0.0, 1.0, 9, |x| 3.0 * x - 1.0).unwrap();
        let p = PchipInterpolant::new(&g);
        for k in 0..50 {
            let x = k as f64 / 49.0;
            assert!((p.eval(x) - (3.0 * x - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn pchip_is_accurate_on_smooth_data() {
        let g = GridFunction::from_fn(0.0, 1.0, 257, |x| (2.0 * x).sin()).unwrap();
        let p = PchipInterpolant::new(&g);
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            assert!((p.eval(x) - (2.0 * x).sin()).abs() < 5e-6);
        }
    }
}

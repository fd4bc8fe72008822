//! U(n)-invariant symplectic potentials on the standard simplex.
//!
//! The potentials considered here are `g = g_0 + h(sum x_i)` with `g_0` the
//! Guillemin potential of the simplex. The metric depends on `h` only
//! through `h''`, so a profile stores `h''` on `[0, 1]` and everything else
//! is closed-form algebra:
//!
//! * `U(t) = 1/(1-t) + h''(t)`,
//! * `Hess(g)(x) = diag(1/x_i) + U(t) J` with `J` the all-ones matrix,
//! * `det Hess(g) = (1/(1-t) + t h''(t)) / prod x_i`,
//! * `V(mu) = sqrt(1/(1-mu) + mu h''(mu))`.
//!
//! A profile is admissible when the determinant numerator stays positive,
//! i.e. `1 + t(1-t) h''(t) > 0` on `[0, 1]`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{quadratic_extrapolate, GridFunction, PchipInterpolant};

#[derive(Debug, Clone)]
enum ProfileRepr {
    /// `h''(t) = sum_k c_k t^k`
    Poly(Vec<f64>),
    /// `h''` sampled on `[0, 1]`, evaluated by monotone cubic interpolation
    Grid(PchipInterpolant),
}

/// The radial profile of a U(n)-invariant metric: `h''` on `[0, 1]` plus
/// the ambient dimension.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    repr: ProfileRepr,
    n: usize,
}

impl RadialProfile {
    /// Profile with polynomial `h''`; an empty coefficient list means
    /// `h'' = 0` (the Fubini–Study baseline).
    pub fn polynomial(coeffs: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension must be >= 1".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("polynomial coefficient".into()));
        }
        Ok(Self {
            repr: ProfileRepr::Poly(coeffs),
            n,
        })
    }

    /// Profile with sampled `h''`; the grid must cover `[0, 1]`.
    pub fn from_grid(grid: GridFunction, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension must be >= 1".into()));
        }
        if grid.lo().abs() > 1e-9 || (grid.hi() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "profile grid must cover [0, 1], got [{}, {}]",
                grid.lo(),
                grid.hi()
            )));
        }
        Ok(Self {
            repr: ProfileRepr::Grid(PchipInterpolant::new(&grid)),
            n,
        })
    }

    pub fn fubini_study(n: usize) -> Self {
        Self::polynomial(vec![], n).expect("n >= 1")
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// `h''(t)`; `t` is clamped to `[0, 1]`.
    pub fn hpp(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match &self.repr {
            ProfileRepr::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck),
            ProfileRepr::Grid(p) => p.eval(t),
        }
    }

    /// `h(t)` in the gauge `h(0) = h'(0) = 0`. Only needed when values of
    /// the potential itself matter; the metric ignores affine terms of `h`.
    pub fn h(&self, t: f64) -> f64 {
        match &self.repr {
            ProfileRepr::Poly(c) => {
                // integrate twice: c_k t^k -> c_k t^{k+2} / ((k+1)(k+2))
                c.iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (k, &ck)| {
                        acc * t + ck / ((k + 1) as f64 * (k + 2) as f64)
                    })
                    * t
                    * t
            }
            ProfileRepr::Grid(_) => {
                // h(t) = int_0^t (t - s) h''(s) ds
                const PANELS: usize = 256;
                if t <= 0.0 {
                    return 0.0;
                }
                crate::numerics::integrate_singular(
                    |s| (t - s) * self.hpp(s),
                    0.0,
                    t,
                    crate::numerics::SingularEnd::None,
                    PANELS,
                )
                .unwrap_or(f64::NAN)
            }
        }
    }

    /// `U(t) = 1/(1-t) + h''(t)`, the rank-one coefficient of the Hessian.
    pub fn u_value(&self, t: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::OutsideDomain(format!(
                "U(t) needs 0 <= t < 1, got {t}"
            )));
        }
        Ok(1.0 / (1.0 - t) + self.hpp(t))
    }

    /// `V(mu) = sqrt(1/(1-mu) + mu h''(mu))` for `0 <= mu < 1`.
    pub fn v_value(&self, mu: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::OutsideDomain(format!(
                "V(mu) needs 0 <= mu < 1, got {mu}"
            )));
        }
        let radicand = 1.0 / (1.0 - mu) + mu * self.hpp(mu);
        if radicand <= 0.0 {
            return Err(Error::InvalidProfile(format!(
                "determinant numerator {radicand} <= 0 at mu = {mu}"
            )));
        }
        Ok(radicand.sqrt())
    }

    /// Validity margin `1 + t(1-t) h''(t)`; positivity on `[0, 1]` is the
    /// sharp interior condition for the potential to define a metric.
    pub fn validity_margin(&self, t: f64) -> f64 {
        1.0 + t * (1.0 - t) * self.hpp(t)
    }

    /// `Hess(g)(x) = diag(1/x_i) + U(t) J` at an interior point.
    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let t = self.check_interior(x)?;
        let u = self.u_value(t)?;
        let n = x.len();
        let mut m = DMatrix::from_element(n, n, u);
        for i in 0..n {
            m[(i, i)] += 1.0 / x[i];
        }
        Ok(m)
    }

    /// `alpha^t Hess(g)(x) alpha = sum alpha_i^2/x_i + U(t) (sum alpha_i)^2`.
    ///
    /// For `alpha = (1,-1,0,...,0)` the rank-one term cancels exactly, so
    /// the value is independent of the profile.
    pub fn quadratic_form(&self, alpha: &[f64], x: &[f64]) -> Result<f64> {
        if alpha.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: alpha.len(),
            });
        }
        let t = self.check_interior(x)?;
        let u = self.u_value(t)?;
        let mut diag = 0.0;
        let mut alpha_sum = 0.0;
        for (&a, &xi) in alpha.iter().zip(x) {
            diag += a * a / xi;
            alpha_sum += a;
        }
        Ok(diag + u * alpha_sum * alpha_sum)
    }

    /// `det Hess(g)(x) = (1/(1-t) + t h''(t)) / prod x_i`.
    pub fn det_hessian(&self, x: &[f64]) -> Result<f64> {
        let t = self.check_interior(x)?;
        let numerator = 1.0 / (1.0 - t) + t * self.hpp(t);
        let denom: f64 = x.iter().product();
        Ok(numerator / denom)
    }

    /// Sampled admissibility check: the determinant numerator must stay
    /// positive on a dense grid of `[0, 1]`, and positive definiteness of
    /// the Hessian is spot-checked at random interior points through the
    /// closed-form leading principal minors.
    pub fn is_valid(&self) -> ValidityReport {
        const GRID: usize = 10_001;
        let mut min_margin = f64::INFINITY;
        let mut argmin = 0.0;
        for i in 0..GRID {
            let t = i as f64 / (GRID - 1) as f64;
            let m = self.validity_margin(t);
            if m < min_margin {
                min_margin = m;
                argmin = t;
            }
        }
        let mut valid = min_margin > 0.0;
        let mut message = if valid {
            format!("determinant numerator positive; min margin {min_margin:.6e} at t = {argmin:.4}")
        } else {
            format!("determinant numerator {min_margin:.6e} <= 0 at t = {argmin:.4}")
        };

        let mut spot_checks = 0;
        if valid {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            'points: for _ in 0..32 {
                let x = random_interior_point(&mut rng, self.n);
                let t: f64 = x.iter().sum();
                let u = match self.u_value(t) {
                    Ok(u) => u,
                    Err(_) => continue,
                };
                // k-th leading principal minor: (1 + U * sum_{i<=k} x_i) / prod_{i<=k} x_i
                let mut partial = 0.0;
                for &xi in &x {
                    partial += xi;
                    if 1.0 + u * partial <= 0.0 {
                        valid = false;
                        message = format!(
                            "leading principal minor nonpositive at x = {x:?} (partial sum {partial:.4})"
                        );
                        break 'points;
                    }
                }
                spot_checks += 1;
            }
        }

        ValidityReport {
            valid,
            min_margin,
            argmin_t: argmin,
            spot_checks,
            message,
        }
    }

    // Returns t = sum x_i after checking strict interiority.
    fn check_interior(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if x.iter().any(|&xi| xi <= 0.0) {
            return Err(Error::OutsideDomain(format!("nonpositive coordinate in {x:?}")));
        }
        let t: f64 = x.iter().sum();
        if t >= 1.0 {
            return Err(Error::OutsideDomain(format!(
                "sum of coordinates {t} >= 1"
            )));
        }
        Ok(t)
    }
}

/// Outcome of the admissibility check, with the observed minimum of the
/// determinant numerator.
#[derive(Debug, Clone)]
pub struct ValidityReport {
    pub valid: bool,
    pub min_margin: f64,
    pub argmin_t: f64,
    pub spot_checks: usize,
    pub message: String,
}

/// Invert `V(mu) = sqrt(1/(1-mu) + mu h''(mu))` on a grid:
/// `h''(mu) = (V^2 - 1/(1-mu)) / mu` for `mu > 0`. If the grid starts at
/// `mu = 0` the first value is filled by quadratic extrapolation from the
/// three smallest positive nodes.
pub fn recover_hpp_from_v(vgrid: &GridFunction) -> Result<GridFunction> {
    if vgrid.hi() >= 1.0 {
        return Err(Error::OutsideDomain(format!(
            "V grid must live in [0, 1), got hi = {}",
            vgrid.hi()
        )));
    }
    if vgrid.values().iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidInput("nonpositive V value".into()));
    }
    let n = vgrid.len();
    let mut hpp = vec![0.0; n];
    let mut first_positive = None;
    for i in 0..n {
        let mu = vgrid.node(i);
        if mu <= 0.0 {
            continue;
        }
        if first_positive.is_none() {
            first_positive = Some(i);
        }
        let v = vgrid.values()[i];
        hpp[i] = (v * v - 1.0 / (1.0 - mu)) / mu;
    }
    if let Some(i0) = first_positive {
        if i0 > 0 {
            if n < i0 + 3 {
                return Err(Error::GridTooCoarse { got: n, min: i0 + 3 });
            }
            for i in 0..i0 {
                let mu = vgrid.node(i);
                hpp[i] = quadratic_extrapolate(
                    [vgrid.node(i0), vgrid.node(i0 + 1), vgrid.node(i0 + 2)],
                    [hpp[i0], hpp[i0 + 1], hpp[i0 + 2]],
                    mu,
                );
            }
        }
    }
    GridFunction::new(vgrid.lo(), vgrid.hi(), hpp)
}

pub(crate) fn random_interior_point(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    // exponential spacings give a uniform point of the open simplex;
    // shrink slightly to stay away from the boundary
    loop {
        let e: Vec<f64> = (0..=n)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let total: f64 = e.iter().sum();
        if total > 0.0 && e.iter().all(|&v| v > 0.0) {
            return e[..n].iter().map(|&v| 0.998 * v / total + 1e-4).collect();
        }
    }
}

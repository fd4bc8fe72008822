//! The equivariant spectral invariant, its raw 2n-dimensional form, and
//! the correspondence between the two test-function slots.
//!
//! For a profile `g = g_0 + h(sum x_i)` on the simplex `P` the invariant is
//!
//! `F(g)[alpha, rho] = int_P rho(alpha^t Hess(g) alpha) sqrt(det Hess(g)) dx`.
//!
//! The raw invariant integrates
//! `F(alpha^t Hess(g) alpha + xi^t Hess^{-1}(g) xi)` over `P x R^n`; its
//! radial reduction collapses the momentum directions to
//! `rho(t) = int_0^infty F(t + r^2) r^{n-1} dr` times the area of the unit
//! sphere, so the two computations are directly comparable. Both directions
//! of that correspondence are implemented: [`rho_from_f`] by quadrature and
//! [`f_from_rho`] by differentiation (`n = 2`), induction (`n >= 3`) and
//! right-sided Abel inversion (`n = 1`).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abel::{self, AbelSide};
use crate::error::{Error, Result};
use crate::metric::RadialProfile;
use crate::numerics::{
    differentiate, gamma_half_integer, integrate_simplex, integrate_singular, monte_carlo_box,
    Estimate, GridFunction, SimplexScheme, SingularEnd, TestFunction,
};

/// Area of the unit sphere `S^{n-1}`: `2 pi^{n/2} / Gamma(n/2)`.
///
/// This is the constant suppressed by radial reduction; carrying it
/// explicitly keeps the raw and reduced invariants numerically comparable.
pub fn sphere_area(n: usize) -> f64 {
    assert!(n >= 1);
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Quadrature request for the simplex integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub scheme: SimplexScheme,
    pub budget: usize,
    pub seed: u64,
}

/// A full invariant evaluation request.
#[derive(Debug, Clone)]
pub struct InvariantRequest<'a> {
    pub profile: &'a RadialProfile,
    pub alpha: Vec<f64>,
    pub rho: TestFunction,
    pub quadrature: QuadratureSpec,
}

/// `int_P rho(alpha^t Hess(g) alpha) sqrt(det Hess(g)) dx`.
///
/// The integrand blows up like the Dirichlet weight
/// `prod x_i^{-1/2} (1 - t)^{-1/2}` at the boundary, which is exactly what
/// the simplex schemes are built for.
pub fn spectral_invariant(req: &InvariantRequest) -> Result<Estimate> {
    let profile = req.profile;
    let n = profile.dimension();
    if req.alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: req.alpha.len(),
        });
    }
    let report = profile.is_valid();
    if !report.valid {
        return Err(Error::InvalidProfile(report.message));
    }
    let alpha = &req.alpha;
    let rho = &req.rho;
    let f = |x: &[f64]| {
        let t: f64 = x.iter().sum();
        let hpp = profile.hpp(t);
        let u = 1.0 / (1.0 - t) + hpp;
        let mut diag = 0.0;
        let mut alpha_sum = 0.0;
        for (&a, &xi) in alpha.iter().zip(x) {
            diag += a * a / xi;
            alpha_sum += a;
        }
        let q = diag + u * alpha_sum * alpha_sum;
        let det = (1.0 / (1.0 - t) + t * hpp) / x.iter().product::<f64>();
        rho.eval(q) * det.sqrt()
    };
    integrate_simplex(f, n, req.quadrature.scheme, req.quadrature.budget, req.quadrature.seed)
}

/// How to evaluate the raw invariant over `P x R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawMode {
    /// Radial reduction: `sphere_area(n) * int_P rho_F(Q(x)) sqrt(det) dx`
    /// with `rho_F` computed by [`rho_from_f`]. `budget` is quadrature
    /// points per axis.
    Reduced,
    /// Direct seeded Monte Carlo over `P x box`, the box sized from the
    /// support of `F` and the closed-form `Hess^{-1}` quadratic form.
    /// `budget` is the sample count.
    BruteForce,
}

/// The raw invariant `int_{P x R^n} F(Q(x) + xi^t Hess^{-1} xi) dx dxi`.
pub fn raw_invariant(
    profile: &RadialProfile,
    alpha: &[f64],
    f: &TestFunction,
    mode: RawMode,
    budget: usize,
    seed: u64,
) -> Result<Estimate> {
    let n = profile.dimension();
    if alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: alpha.len(),
        });
    }
    let report = profile.is_valid();
    if !report.valid {
        return Err(Error::InvalidProfile(report.message));
    }
    match mode {
        RawMode::Reduced => {
            let support_hi = f.support_hi();
            if support_hi <= 0.0 {
                return Ok(Estimate { value: 0.0, error: 0.0 });
            }
            let rho_grid = rho_from_f(f, n, support_hi, 2049)?;
            let req = InvariantRequest {
                profile,
                alpha: alpha.to_vec(),
                rho: TestFunction::from_grid(rho_grid),
                quadrature: QuadratureSpec {
                    scheme: SimplexScheme::TensorDuffy,
                    budget,
                    seed,
                },
            };
            let est = spectral_invariant(&req)?;
            let area = sphere_area(n);
            Ok(Estimate {
                value: area * est.value,
                error: area * est.error,
            })
        }
        RawMode::BruteForce => brute_force_raw(profile, alpha, f, budget, seed),
    }
}

// Quadratic form of Hess^{-1} by Sherman-Morrison:
//   xi^t Hess^{-1} xi = sum x_i xi_i^2 - U (sum x_i xi_i)^2 / (1 + U t);
// the denominator is the determinant numerator, positive for valid profiles.
fn inverse_hessian_form(profile: &RadialProfile, x: &[f64], xi: &[f64], t: f64) -> f64 {
    let u = 1.0 / (1.0 - t) + profile.hpp(t);
    let mut diag = 0.0;
    let mut mixed = 0.0;
    for (&xv, &xiv) in x.iter().zip(xi) {
        diag += xv * xiv * xiv;
        mixed += xv * xiv;
    }
    diag - u * mixed * mixed / (1.0 + u * t)
}

fn brute_force_raw(
    profile: &RadialProfile,
    alpha: &[f64],
    f: &TestFunction,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    let n = profile.dimension();
    let support_hi = f.support_hi();
    if support_hi <= 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }

    // Scan the simplex for the region where Q(x) < sup supp F; the
    // momentum box must contain every ellipsoid
    // {xi : xi^t Hess^{-1} xi <= S - Q(x)}, whose bounding half-width in
    // direction i is sqrt((S - Q) H_ii).
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    const SCAN: usize = 200_000;
    let mut x_lo = vec![f64::INFINITY; n];
    let mut x_hi = vec![f64::NEG_INFINITY; n];
    let mut xi_half = vec![0.0f64; n];
    let mut feasible = 0usize;
    for _ in 0..SCAN {
        let x = sample_open_simplex(&mut rng, n);
        let t: f64 = x.iter().sum();
        let q = match profile.quadratic_form(alpha, &x) {
            Ok(q) => q,
            Err(_) => continue,
        };
        if q >= support_hi {
            continue;
        }
        feasible += 1;
        let u = 1.0 / (1.0 - t) + profile.hpp(t);
        for i in 0..n {
            x_lo[i] = x_lo[i].min(x[i]);
            x_hi[i] = x_hi[i].max(x[i]);
            let h_ii = 1.0 / x[i] + u;
            xi_half[i] = xi_half[i].max(((support_hi - q) * h_ii).sqrt());
        }
    }
    if feasible == 0 {
        // Q exceeds the support of F everywhere; the integrand vanishes
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }

    let mut bounds = Vec::with_capacity(2 * n);
    for i in 0..n {
        let pad = 0.05 * (x_hi[i] - x_lo[i]) + 1e-3;
        bounds.push(((x_lo[i] - pad).max(0.0), (x_hi[i] + pad).min(1.0)));
    }
    for i in 0..n {
        let r = 1.15 * xi_half[i];
        if !(r.is_finite() && r <= 1e4) {
            return Err(Error::Degenerate(format!(
                "momentum box half-width {r:.3e} in direction {i}; the support \
                 of F meets a degenerate region (alpha components nearly cancel)"
            )));
        }
        bounds.push((-r, r));
    }

    let integrand = |y: &[f64]| {
        let (x, xi) = y.split_at(n);
        if x.iter().any(|&v| v <= 0.0) {
            return 0.0;
        }
        let t: f64 = x.iter().sum();
        if t >= 1.0 {
            return 0.0;
        }
        let hpp = profile.hpp(t);
        let u = 1.0 / (1.0 - t) + hpp;
        let mut diag = 0.0;
        let mut alpha_sum = 0.0;
        for (&a, &xv) in alpha.iter().zip(x) {
            diag += a * a / xv;
            alpha_sum += a;
        }
        let q = diag + u * alpha_sum * alpha_sum;
        if q >= support_hi {
            return 0.0;
        }
        f.eval(q + inverse_hessian_form(profile, x, xi, t))
    };
    monte_carlo_box(integrand, &bounds, samples, seed)
}

fn sample_open_simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let e: Vec<f64> = (0..=n)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let total: f64 = e.iter().sum();
        if total > 0.0 && e.iter().all(|&v| v > 0.0) {
            return e[..n].iter().map(|&v| v / total).collect();
        }
    }
}

/// The radial average `rho(t) = int_0^infty F(t + r^2) r^{n-1} dr`,
/// sampled on `[0, t_hi]`.
///
/// In the integrated variable the kernel is
/// `(1/2) F(s) (s - t)^{(n-2)/2}` on `[t, S]`; the left-end substitution
/// `s = t + u^2` makes the integrand smooth for every `n >= 1`.
pub fn rho_from_f(f: &TestFunction, n: usize, t_hi: f64, nodes: usize) -> Result<GridFunction> {
    if n == 0 {
        return Err(Error::InvalidInput("radial power needs n >= 1".into()));
    }
    if !(t_hi > 0.0) {
        return Err(Error::InvalidInput(format!("t_hi must be positive, got {t_hi}")));
    }
    let support_hi = f.support_hi();
    const PANELS: usize = 96;
    let half_power = (n as f64 - 2.0) / 2.0;
    GridFunction::from_fn(0.0, t_hi, nodes, |t| {
        if support_hi - t < 1e-14 {
            return 0.0;
        }
        integrate_singular(
            |s| 0.5 * f.eval(s) * (s - t).powf(half_power),
            t,
            support_hi,
            SingularEnd::Left,
            PANELS,
        )
        .unwrap_or(f64::NAN)
    })
}

/// Solve `rho(t) = int_0^infty F(t + r^2) r^{n-1} dr` for `F` on the grid
/// of `rho`.
///
/// * `n = 2`: `F = -2 rho'`.
/// * `n >= 3`: with `f(t) = int_0^t F - int_0^infty F` one has
///   `rho = -((n-2)/2) int_0^infty f(t + r^2) r^{n-3} dr`, so `f` solves the
///   level `n - 2` problem for `-2 rho / (n-2)` and `F = f'`.
/// * `n = 1`: `rho(t) = (1/2) int_t^infty F(s) (s - t)^{-1/2} ds` is a
///   right-sided half-order integral; the inverse is
///   `F = -(2/pi) d/ds int_s^infty rho(t) (t - s)^{-1/2} dt`.
pub fn f_from_rho(rho: &GridFunction, n: usize) -> Result<GridFunction> {
    if n == 0 {
        return Err(Error::InvalidInput("radial power needs n >= 1".into()));
    }
    let tail = rho.values()[rho.len() - 1].abs();
    if tail > 1e-6 * rho.max_abs().max(1e-300) {
        return Err(Error::InvalidInput(format!(
            "rho must vanish at the right grid end, got {tail:.3e}"
        )));
    }
    match n {
        1 => {
            let f = abel::inverse(rho, AbelSide::Right)?;
            f.map(|v| 2.0 * v)
        }
        2 => {
            let d = differentiate(rho)?;
            d.map(|v| -2.0 * v)
        }
        _ => {
            let scaled = rho.map(|v| -2.0 * v / (n as f64 - 2.0))?;
            let f = f_from_rho(&scaled, n - 2)?;
            differentiate(&f)
        }
    }
}

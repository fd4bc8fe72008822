//! Quadrature with inverse-square-root endpoint singularities and
//! iterated-integral drivers over the standard simplex.
//!
//! Every singular kernel that appears downstream is exactly
//! `1/sqrt(linear)`, so the substitution `mu = a + u^2` (or `mu = b - u^2`)
//! produces a smooth integrand and composite Gauss–Legendre panels converge
//! at full order. No weighted rule tables are needed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::Estimate;

/// Which end of the interval carries the `1/sqrt` blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularEnd {
    None,
    Left,
    Right,
    Both,
}

// 4-point Gauss-Legendre nodes/weights on [-1, 1].
const GL4_NODES: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.3478548451374538,
    0.6521451548625461,
    0.6521451548625461,
    0.3478548451374538,
];

fn gl4_panels(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        for k in 0..4 {
            sum += GL4_WEIGHTS[k] * f(mid + half * GL4_NODES[k]);
        }
    }
    sum * 0.5 * (b - a) / panels as f64
}

/// Integrate `f` on `[a, b]` where `f` may blow up like `1/sqrt` at the
/// flagged end(s). `panels` is the composite panel count (split between the
/// halves for `Both`). Deterministic for fixed inputs.
pub fn integrate_singular(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    end: SingularEnd,
    panels: usize,
) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidInput(format!(
            "integration interval [{a}, {b}] is empty"
        )));
    }
    let panels = panels.max(1);
    let value = match end {
        SingularEnd::None => gl4_panels(&f, a, b, panels),
        SingularEnd::Left => {
            // mu = a + u^2 removes the left singularity
            let g = |u: f64| 2.0 * u * f(a + u * u);
            gl4_panels(&g, 0.0, (b - a).sqrt(), panels)
        }
        SingularEnd::Right => {
            let g = |u: f64| 2.0 * u * f(b - u * u);
            gl4_panels(&g, 0.0, (b - a).sqrt(), panels)
        }
        SingularEnd::Both => {
            let mid = 0.5 * (a + b);
            let half = (panels / 2).max(1);
            let width = (mid - a).sqrt();
            let gl = |u: f64| 2.0 * u * f(a + u * u);
            let gr = |u: f64| 2.0 * u * f(b - u * u);
            gl4_panels(&gl, 0.0, width, half) + gl4_panels(&gr, 0.0, (b - mid).sqrt(), half)
        }
    };
    if value.is_nan() {
        return Err(Error::NonFinite("integrate_singular".into()));
    }
    Ok(value)
}

/// Quadrature scheme for the open-simplex driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexScheme {
    /// Map the simplex to a cube and neutralize the boundary singularities
    /// by per-axis square-root substitutions.
    TensorDuffy,
    /// Seeded importance sampling with the Dirichlet(1/2,...,1/2) density,
    /// which matches the known `prod x_i^{-1/2} (1-sum x)^{-1/2}` weight.
    MonteCarlo,
}

/// Integrate `f` over the open standard simplex in `R^n`.
///
/// `f` may blow up like `prod x_i^{-1/2} (1 - sum x_i)^{-1/2}` at the
/// boundary. For `TensorDuffy`, `budget` is the number of quadrature points
/// per axis (at least 8); for `MonteCarlo` it is the sample count. The error
/// field of the estimate is a refinement difference (tensor) or a standard
/// error (Monte Carlo).
pub fn integrate_simplex(
    f: impl Fn(&[f64]) -> f64,
    n: usize,
    scheme: SimplexScheme,
    budget: usize,
    seed: u64,
) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::InvalidInput("simplex dimension must be >= 1".into()));
    }
    match scheme {
        SimplexScheme::TensorDuffy => {
            if budget < 8 {
                return Err(Error::InvalidInput(format!(
                    "tensor budget {budget} gives fewer than 8 points per axis"
                )));
            }
            let panels = (budget / 8).max(1);
            let value = tensor_duffy(&f, n, panels)?;
            let coarse = tensor_duffy(&f, n, (panels / 2).max(1))?;
            Ok(Estimate {
                value,
                error: (value - coarse).abs(),
            })
        }
        SimplexScheme::MonteCarlo => {
            if budget == 0 {
                return Err(Error::InvalidInput("Monte Carlo budget must be positive".into()));
            }
            dirichlet_importance(&f, n, budget, seed)
        }
    }
}

// Per-axis nodes for the unit interval with both ends substituted:
// [0, 1/2] via u = q^2 and [1/2, 1] via u = 1 - q^2. Returns (u, weight).
fn axis_nodes(panels_per_half: usize) -> Vec<(f64, f64)> {
    let q_hi = 0.5f64.sqrt();
    let h = q_hi / panels_per_half as f64;
    let mut nodes = Vec::with_capacity(8 * panels_per_half);
    for p in 0..panels_per_half {
        let mid = (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        for k in 0..4 {
            let q = mid + half * GL4_NODES[k];
            let w = GL4_WEIGHTS[k] * half * 2.0 * q;
            nodes.push((q * q, w)); // left half
            nodes.push((1.0 - q * q, w)); // right half
        }
    }
    nodes
}

// Stick-breaking map from the unit cube to the simplex:
//   x_j = u_j * prod_{i<j} (1 - u_i),   jacobian = prod_j (1 - u_j)^{n-1-j}.
// Combined with the axis substitutions this renders Dirichlet-type
// integrands smooth.
fn tensor_duffy(f: &impl Fn(&[f64]) -> f64, n: usize, panels_per_half: usize) -> Result<f64> {
    let nodes = axis_nodes(panels_per_half);
    let m = nodes.len();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0f64; n];
    let mut sum = 0.0;
    loop {
        let mut weight = 1.0;
        let mut prefix = 1.0;
        for j in 0..n {
            let (u, w) = nodes[idx[j]];
            x[j] = u * prefix;
            weight *= w * (1.0 - u).powi((n - 1 - j) as i32);
            prefix *= 1.0 - u;
        }
        let fx = f(&x);
        if fx.is_nan() {
            return Err(Error::NonFinite(format!("integrand at {x:?}")));
        }
        sum += weight * fx;

        // odometer over the n-fold tensor grid
        let mut j = 0;
        loop {
            idx[j] += 1;
            if idx[j] < m {
                break;
            }
            idx[j] = 0;
            j += 1;
            if j == n {
                return Ok(sum);
            }
        }
    }
}

// Gamma(k/2) for positive integer k, exact in closed form.
pub(crate) fn gamma_half_integer(k: usize) -> f64 {
    assert!(k >= 1);
    if k % 2 == 0 {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        let mut v = std::f64::consts::PI.sqrt();
        let mut j = k as i64 - 2;
        while j >= 1 {
            v *= j as f64 / 2.0;
            j -= 2;
        }
        v
    }
}

// Importance sampling from Dirichlet(1/2,...,1/2) on the simplex
// (n+1 parameters, the last slot owned by 1 - sum x). The normalization of
// the weight function prod x_i^{-1/2} (1-t)^{-1/2} over the simplex is
// Z = Gamma(1/2)^{n+1} / Gamma((n+1)/2).
fn dirichlet_importance(
    f: &impl Fn(&[f64]) -> f64,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = std::f64::consts::PI.sqrt().powi(n as i32 + 1) / gamma_half_integer(n + 1);

    const BLOCK: usize = 4096;
    let mut block_sums = Vec::with_capacity(samples / BLOCK + 1);
    let mut block_sq_sums = Vec::with_capacity(samples / BLOCK + 1);
    let mut sum = 0.0;
    let mut sq_sum = 0.0;
    let mut x = vec![0.0f64; n];
    let mut g = vec![0.0f64; n + 1];

    for i in 0..samples {
        // Gamma(1/2) variates via half chi-square
        loop {
            let mut total = 0.0;
            for gj in g.iter_mut() {
                let zv: f64 = StandardNormal.sample(&mut rng);
                *gj = 0.5 * zv * zv;
                total += *gj;
            }
            if g.iter().all(|&v| v > 0.0) && total > 0.0 {
                let mut sqrt_weight = (g[n] / total).sqrt(); // (1-t)^{1/2}
                for j in 0..n {
                    x[j] = g[j] / total;
                    sqrt_weight *= x[j].sqrt();
                }
                let ratio = f(&x) * sqrt_weight;
                if ratio.is_nan() {
                    return Err(Error::NonFinite("Monte Carlo integrand".into()));
                }
                sum += ratio;
                sq_sum += ratio * ratio;
                break;
            }
        }
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
        value: z * mean,
        error: z * (var / m).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn inverse_sqrt_left() {
        let v = integrate_singular(|x| 1.0 / x.sqrt(), 0.0, 1.0, SingularEnd::Left, 32).unwrap();
        assert!((v - 2.0).abs() <= 1e-10, "got {v}");
    }

    #[test]
    fn arcsine_integral_both_ends() {
        let v = integrate_singular(
            |x| 1.0 / (x * (1.0 - x)).sqrt(),
            0.0,
            1.0,
            SingularEnd::Both,
            64,
        )
        .unwrap();
        assert!((v - PI).abs() <= 1e-8, "got {v}");
    }

    #[test]
    fn polynomial_exactness_without_singularity() {
        let v = integrate_singular(|x| x, 0.0, 1.0, SingularEnd::None, 4).unwrap();
        assert!((v - 0.5).abs() <= 1e-12);
        let v2 = integrate_singular(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, SingularEnd::None, 4)
            .unwrap();
        assert!((v2 - (9.0 - 1.5 + 6.0)).abs() <= 1e-12, "got {v2}");
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(integrate_singular(|x| x, 1.0, 1.0, SingularEnd::None, 8).is_err());
        assert!(integrate_singular(|x| x, 2.0, 1.0, SingularEnd::Left, 8).is_err());
    }

    #[test]
    fn refinement_improves_singular_integral() {
        // integrand smooth after substitution but not polynomial
        let exact = 2.0 * (1.0f64.sin() - 0.0);
        let err = |panels| {
            let v = integrate_singular(
                |x: f64| x.sqrt().cos() / x.sqrt(),
                0.0,
                1.0,
                SingularEnd::Left,
                panels,
            )
            .unwrap();
            // antiderivative of cos(sqrt(x))/sqrt(x) is 2 sin(sqrt(x))
            (v - exact).abs()
        };
        let (e1, e2) = (err(1), err(2));
        assert!(e1 / e2 >= 3.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn simplex_volume_is_exact() {
        let est = integrate_simplex(|_| 1.0, 2, SimplexScheme::TensorDuffy, 64, 0).unwrap();
        assert!((est.value - 0.5).abs() <= 1e-12, "got {}", est.value);
        let est3 = integrate_simplex(|_| 1.0, 3, SimplexScheme::TensorDuffy, 64, 0).unwrap();
        assert!((est3.value - 1.0 / 6.0).abs() <= 1e-12, "got {}", est3.value);
    }

    #[test]
    fn dirichlet_integral_n2() {
        // int over simplex of (x1 x2 (1-x1-x2))^{-1/2} = Gamma(1/2)^3 / Gamma(3/2) = 2 pi
        let f = |x: &[f64]| 1.0 / (x[0] * x[1] * (1.0 - x[0] - x[1])).sqrt();
        let est = integrate_simplex(f, 2, SimplexScheme::TensorDuffy, 256, 0).unwrap();
        assert!((est.value - 2.0 * PI).abs() <= 1e-4, "got {}", est.value);
    }

    #[test]
    fn dirichlet_integral_n3() {
        // Gamma(1/2)^4 / Gamma(2) = pi^2
        let f = |x: &[f64]| 1.0 / (x[0] * x[1] * x[2] * (1.0 - x[0] - x[1] - x[2])).sqrt();
        let est = integrate_simplex(f, 3, SimplexScheme::TensorDuffy, 128, 0).unwrap();
        assert!((est.value - PI * PI).abs() <= 1e-3, "got {}", est.value);
    }

    #[test]
    fn monte_carlo_matches_dirichlet_weight_exactly() {
        // the importance density equals the integrand up to Z, so the
        // estimator has zero variance
        let f = |x: &[f64]| 1.0 / (x[0] * x[1] * (1.0 - x[0] - x[1])).sqrt();
        let est = integrate_simplex(f, 2, SimplexScheme::MonteCarlo, 10_000, 7).unwrap();
        assert!((est.value - 2.0 * PI).abs() <= 1e-9, "got {}", est.value);
        assert!(est.error <= 1e-9);
    }

    #[test]
    fn monte_carlo_smooth_integrand() {
        // int_simplex x1 dx = 1/6 for n = 2
        let est = integrate_simplex(|x| x[0], 2, SimplexScheme::MonteCarlo, 200_000, 11).unwrap();
        assert!(
            (est.value - 1.0 / 6.0).abs() <= 4.0 * est.error,
            "got {} +- {}",
            est.value,
            est.error
        );
    }

    #[test]
    fn budget_too_small_rejected() {
        assert!(integrate_simplex(|_| 1.0, 2, SimplexScheme::TensorDuffy, 7, 0).is_err());
        assert!(integrate_simplex(|_| 1.0, 2, SimplexScheme::MonteCarlo, 0, 0).is_err());
    }

    #[test]
    fn gamma_half_integer_values() {
        let sp = PI.sqrt();
        assert!((gamma_half_integer(1) - sp).abs() < 1e-15); // Gamma(1/2)
        assert!((gamma_half_integer(2) - 1.0).abs() < 1e-15); // Gamma(1)
        assert!((gamma_half_integer(3) - sp / 2.0).abs() < 1e-15); // Gamma(3/2)
        assert!((gamma_half_integer(4) - 1.0).abs() < 1e-15); // Gamma(2)
        assert!((gamma_half_integer(5) - 0.75 * sp).abs() < 1e-15); // Gamma(5/2)
        assert!((gamma_half_integer(6) - 2.0).abs() < 1e-15); // Gamma(3)
    }
}

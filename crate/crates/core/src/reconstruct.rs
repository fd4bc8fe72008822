//! From the invariant to the profile: the change of variables on the
//! half-simplex, the spectrally determined function `f_u`, and the nested
//! inversion that recovers `h''`.
//!
//! With `alpha = (1, -1, 0, ..., 0)` the invariant collapses to a weighted
//! integral of `f_u(nu)`, `nu >= 4`, and in the coordinates
//! `s_1 = 1 - 4/nu`, `s_k = 1 - mu_k` the function `f_u` is an
//! `(n-1)`-fold half-order fractional integral of `V(1 - s)` where
//! `V(mu) = sqrt(1/(1-mu) + mu h''(mu))`. `V(1 - s)` carries an exact
//! `s^{-1/2}` factor, so the first transform runs through the weighted
//! kernel path with the smooth cofactor
//! `W(s) = sqrt(s) V(1 - s) = sqrt(1 + s(1-s) h''(1-s))`.
//! Inverting the transforms and the definition of `V` recovers `h''`.

use std::io::{self, Write};

use crate::abel::{self, AbelSide};
use crate::error::{Error, Result};
use crate::invariant::{spectral_invariant, InvariantRequest, QuadratureSpec};
use crate::metric::RadialProfile;
use crate::numerics::{
    integrate_singular, BumpFunction, GridFunction, SimplexScheme, SingularEnd, TestFunction,
};

/// A point of the `(nu, mu_2, ..., mu_n)` region
/// `0 < 4/nu < mu_2 < ... < mu_n < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuMuPoint {
    nu: f64,
    mu: Vec<f64>,
}

impl NuMuPoint {
    pub fn new(nu: f64, mu: Vec<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidInput("mu must hold mu_2, ..., mu_n".into()));
        }
        if !nu.is_finite() || nu <= 4.0 {
            return Err(Error::OutsideDomain(format!("nu must exceed 4, got {nu}")));
        }
        if 4.0 / nu >= mu[0] {
            return Err(Error::OutsideDomain(format!(
                "need 4/nu < mu_2, got 4/{nu} >= {}",
                mu[0]
            )));
        }
        for w in mu.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::OutsideDomain(format!(
                    "mu must be strictly increasing, got {w:?}"
                )));
            }
        }
        let last = *mu.last().unwrap();
        if last >= 1.0 {
            return Err(Error::OutsideDomain(format!("mu_n must be < 1, got {last}")));
        }
        Ok(Self { nu, mu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `(mu_2, ..., mu_n)`.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Ambient dimension `n`.
    pub fn dimension(&self) -> usize {
        self.mu.len() + 1
    }
}

/// Inverse change of variables: recovers the interior simplex point with
/// `x_1 > x_2` from `(nu, mu)`:
/// `x_{1,2} = (mu_2 ± sqrt(mu_2^2 - 4 mu_2 / nu)) / 2`,
/// `x_k = mu_k - mu_{k-1}` for `k >= 3`.
pub fn cov_inverse(p: &NuMuPoint) -> Result<Vec<f64>> {
    let mu2 = p.mu[0];
    let disc = mu2 * mu2 - 4.0 * mu2 / p.nu;
    if disc <= 0.0 {
        return Err(Error::Degenerate(format!(
            "discriminant {disc} <= 0 (x_1 = x_2 locus)"
        )));
    }
    let root = disc.sqrt();
    let mut x = Vec::with_capacity(p.dimension());
    x.push(0.5 * (mu2 + root));
    x.push(0.5 * (mu2 - root));
    for w in p.mu.windows(2) {
        x.push(w[1] - w[0]);
    }
    Ok(x)
}

/// Forward change of variables on `{x interior, x_1 > x_2}`:
/// `nu = 1/x_1 + 1/x_2`, `mu_k = x_1 + ... + x_k`.
pub fn cov_forward(x: &[f64]) -> Result<NuMuPoint> {
    if x.len() < 2 {
        return Err(Error::InvalidInput("need at least two coordinates".into()));
    }
    if x.iter().any(|&v| v <= 0.0) || x.iter().sum::<f64>() >= 1.0 {
        return Err(Error::OutsideDomain(format!("{x:?} is not interior")));
    }
    if x[0] <= x[1] {
        return Err(Error::OutsideDomain(format!(
            "x_1 <= x_2 ({} <= {}); the symmetry locus is excluded",
            x[0], x[1]
        )));
    }
    let nu = 1.0 / x[0] + 1.0 / x[1];
    let mut mu = Vec::with_capacity(x.len() - 1);
    let mut partial = x[0] + x[1];
    mu.push(partial);
    for &xv in &x[2..] {
        partial += xv;
        mu.push(partial);
    }
    NuMuPoint::new(nu, mu)
}

/// Volume-form factor of the change of variables:
/// `dx = mu_2 / (nu^2 sqrt(mu_2^2 - 4 mu_2 / nu)) dnu dmu`.
pub fn jacobian_factor(nu: f64, mu2: f64) -> Result<f64> {
    let disc = mu2 * mu2 - 4.0 * mu2 / nu;
    if disc <= 0.0 {
        return Err(Error::Degenerate(format!(
            "discriminant {disc} <= 0 at nu = {nu}, mu_2 = {mu2}"
        )));
    }
    Ok(mu2 / (nu * nu * disc.sqrt()))
}

// Smooth cofactor W(s) = sqrt(s) V(1-s) on the s-grid [0, s_hi].
fn w_cofactor_grid(profile: &RadialProfile, s_hi: f64, nodes: usize) -> Result<GridFunction> {
    let mut bad: Option<f64> = None;
    let grid = GridFunction::from_fn(0.0, s_hi, nodes, |s| {
        let t = 1.0 - s;
        let margin = 1.0 + t * (1.0 - t) * profile.hpp(t);
        if margin <= 0.0 {
            bad = Some(t);
            return 1.0;
        }
        margin.sqrt()
    })?;
    if let Some(t) = bad {
        return Err(Error::InvalidProfile(format!(
            "determinant numerator nonpositive at t = {t}"
        )));
    }
    Ok(grid)
}

/// `f_u(nu)` for a single `nu > 4` by the s-coordinate route: an
/// `(n-1)`-fold left-sided transform of `V(1-s)` evaluated at
/// `s_1 = 1 - 4/nu`.
pub fn fu_forward(profile: &RadialProfile, nu: f64, abel_n: usize) -> Result<f64> {
    let n = profile.dimension();
    if n < 2 {
        return Err(Error::InvalidInput("f_u requires n >= 2".into()));
    }
    if !(nu > 4.0) {
        return Err(Error::OutsideDomain(format!("f_u needs nu > 4, got {nu}")));
    }
    let s1 = 1.0 - 4.0 / nu;
    if n == 2 {
        let w = w_cofactor_grid(profile, s1, abel_n)?;
        abel::forward_inv_sqrt_at_hi(&w)
    } else {
        let g = fu_profile(profile, s1, abel_n)?;
        Ok(g.values()[g.len() - 1])
    }
}

/// `f_u` on the whole grid `s_1 in [0, s_max]` in one pass. The node at
/// `s_1 = 0` carries the continuous limit (`nu -> 4`).
pub fn fu_profile(profile: &RadialProfile, s_max: f64, abel_n: usize) -> Result<GridFunction> {
    let n = profile.dimension();
    if n < 2 {
        return Err(Error::InvalidInput("f_u requires n >= 2".into()));
    }
    if !(s_max > 0.0 && s_max < 1.0) {
        return Err(Error::InvalidInput(format!(
            "s_max must lie in (0, 1), got {s_max}"
        )));
    }
    let w = w_cofactor_grid(profile, s_max, abel_n)?;
    // k-fold transforms of V(1-s) alternate between smooth data (k odd)
    // and sqrt(s)-carrier data (k even); route each step accordingly
    let mut g = abel::forward_inv_sqrt(&w)?;
    for k in 1..n - 1 {
        g = if k % 2 == 0 {
            abel::forward_of_sqrt_data(&g)?
        } else {
            abel::forward(&g, AbelSide::Left)?
        };
    }
    Ok(g)
}

/// `f_u(nu)` by nested quadrature in the original `mu` coordinates;
/// independent oracle for the s-coordinate identification. Supported for
/// `n` in `{2, 3}` (cost grows quickly with `n`).
pub fn fu_direct(profile: &RadialProfile, nu: f64, panels: usize) -> Result<f64> {
    let n = profile.dimension();
    if !(nu > 4.0) {
        return Err(Error::OutsideDomain(format!("f_u needs nu > 4, got {nu}")));
    }
    let a = 4.0 / nu;
    let v = |mu: f64| {
        let radicand = 1.0 / (1.0 - mu) + mu * profile.hpp(mu);
        radicand.max(0.0).sqrt()
    };
    match n {
        2 => integrate_singular(
            |mu| v(mu) / (mu - a).sqrt(),
            a,
            1.0,
            SingularEnd::Both,
            panels,
        ),
        3 => integrate_singular(
            |mu2| {
                let inner = integrate_singular(
                    |mu3| v(mu3) / (mu3 - mu2).sqrt(),
                    mu2,
                    1.0,
                    SingularEnd::Both,
                    panels,
                )
                .unwrap_or(f64::NAN);
                inner / (mu2 - a).sqrt()
            },
            a,
            1.0,
            SingularEnd::Both,
            panels,
        ),
        _ => Err(Error::InvalidInput(format!(
            "fu_direct supports n in {{2, 3}}, got {n}"
        ))),
    }
}

/// Extract `f_u(nu_0)` from invariant values alone: evaluate the invariant
/// with `alpha = (1, -1, 0, ..., 0)` and bumps of shrinking width centered
/// at `nu_0`, normalize by `2 nu_0^{-3/2} int rho`, and extrapolate the
/// width to zero (Richardson in `w^2`).
///
/// `budget` is the tensor quadrature budget per axis; pass 0 to size it
/// automatically from the bump width (narrow bumps need finer panels).
pub fn invariant_to_fu(
    profile: &RadialProfile,
    nu0: f64,
    widths: &[f64],
    budget: usize,
    seed: u64,
) -> Result<f64> {
    let n = profile.dimension();
    if n < 2 {
        return Err(Error::InvalidInput("extraction requires n >= 2".into()));
    }
    if !(nu0 > 4.0) {
        return Err(Error::OutsideDomain(format!("nu_0 must exceed 4, got {nu0}")));
    }
    if widths.is_empty() {
        return Err(Error::InvalidInput("width schedule is empty".into()));
    }
    for w in widths.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::InvalidInput("widths must strictly decrease".into()));
        }
    }
    if widths[0] >= nu0 - 4.0 {
        return Err(Error::InvalidInput(format!(
            "bump support [{}, {}] crosses nu = 4",
            nu0 - widths[0],
            nu0 + widths[0]
        )));
    }
    if widths[widths.len() - 1] < 1e-8 * nu0 {
        return Err(Error::InvalidInput("width below usable resolution".into()));
    }

    let mut alpha = vec![0.0; n];
    alpha[0] = 1.0;
    alpha[1] = -1.0;

    let mut w2 = Vec::with_capacity(widths.len());
    let mut estimates = Vec::with_capacity(widths.len());
    for &w in widths {
        let bump = BumpFunction::new(nu0, w)?;
        let normalization = 2.0 * nu0.powf(-1.5) * bump.integral();
        let req = InvariantRequest {
            profile,
            alpha: alpha.clone(),
            rho: TestFunction::Bump(bump),
            quadrature: QuadratureSpec {
                scheme: SimplexScheme::TensorDuffy,
                budget: if budget > 0 { budget } else { auto_budget(nu0, w) },
                seed,
            },
        };
        let est = spectral_invariant(&req)?;
        w2.push(w * w);
        estimates.push(est.value / normalization);
    }

    // Neville extrapolation in w^2 to width zero
    let k = estimates.len();
    let mut table = estimates;
    for level in 1..k {
        for i in 0..k - level {
            let (z0, z1) = (w2[i], w2[i + level]);
            table[i] = (z0 * table[i + 1] - z1 * table[i]) / (z0 - z1);
        }
    }
    Ok(table[0])
}

// A width-w bump at nu_0 occupies ~ 2 w / nu_0^{3/2} of the substituted
// axis; keep several panels across it.
fn auto_budget(nu0: f64, w: f64) -> usize {
    let needed = (12.0 * nu0.powf(1.5) / w).ceil() as usize;
    needed.clamp(256, 8192)
}

/// Options for the reconstruction pipeline.
#[derive(Debug, Clone, Copy)]
pub struct ReconstructOptions {
    /// Apply a 3-point binomial smoother before each inversion (for noisy
    /// extracted data).
    pub presmooth: bool,
    /// The `mu` window over which errors against a reference are measured.
    pub window: (f64, f64),
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            presmooth: false,
            window: (0.05, 0.95),
        }
    }
}

/// Result of a reconstruction run: the recovered `V` and `h''` on the
/// ascending `mu` grid, plus error metrics against a reference profile
/// when one is supplied.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub n: usize,
    pub abel_n: usize,
    pub nu_max: f64,
    /// Ascending `mu` nodes, `mu = 1 - s`, covering `[4/nu_max, 1]`.
    pub mu: Vec<f64>,
    pub v_recovered: Vec<f64>,
    pub hpp_recovered: Vec<f64>,
    pub hpp_reference: Option<Vec<f64>>,
    pub sup_error: Option<f64>,
    pub l2_error: Option<f64>,
    /// Error window actually used (intersection with the covered range).
    pub window: (f64, f64),
    /// The `mu = 1` endpoint is outside the invertible range and is filled
    /// by linear extrapolation.
    pub endpoint_filled: bool,
}

impl ReconstructionReport {
    /// Covered `mu` range `[4/nu_max, 1)` plus the extrapolated endpoint.
    pub fn covered_mu(&self) -> (f64, f64) {
        (self.mu[0], self.mu[self.mu.len() - 2])
    }

    /// CSV with columns `mu,V_recovered,hpp_recovered,hpp_reference,abs_error`
    /// and a trailing summary line.
    pub fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "mu,V_recovered,hpp_recovered,hpp_reference,abs_error")?;
        for i in 0..self.mu.len() {
            match &self.hpp_reference {
                Some(r) => writeln!(
                    out,
                    "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                    self.mu[i],
                    self.v_recovered[i],
                    self.hpp_recovered[i],
                    r[i],
                    (self.hpp_recovered[i] - r[i]).abs()
                )?,
                None => writeln!(
                    out,
                    "{:.12e},{:.12e},{:.12e},,",
                    self.mu[i], self.v_recovered[i], self.hpp_recovered[i]
                )?,
            }
        }
        writeln!(
            out,
            "# summary: sup_error={} l2_error={} N={} n={} nu_max={:.6e}",
            self.sup_error.map_or("n/a".into(), |e| format!("{e:.6e}")),
            self.l2_error.map_or("n/a".into(), |e| format!("{e:.6e}")),
            self.abel_n,
            self.n,
            self.nu_max,
        )
    }
}

/// Invert the `(n-1)`-fold transform on `f_u` data sampled over
/// `s_1 in [0, s_max]`, recover `V` and then `h''` on `mu = 1 - s`, and
/// compare against a reference profile when given.
pub fn reconstruct_profile(
    fu_data: &GridFunction,
    n: usize,
    reference: Option<&RadialProfile>,
    opts: ReconstructOptions,
) -> Result<ReconstructionReport> {
    if n < 2 {
        return Err(Error::InvalidInput("reconstruction requires n >= 2".into()));
    }
    if fu_data.lo().abs() > 1e-12 || fu_data.hi() >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "f_u data must be sampled on [0, s_max] with s_max < 1, got [{}, {}]",
            fu_data.lo(),
            fu_data.hi()
        )));
    }

    // peel off the transforms one at a time; before step `i` the data is a
    // (n-1-i)-fold transform of V(1-s), which carries a sqrt(s) factor when
    // that count is even
    let mut v_tilde = fu_data.clone();
    for step in 0..n - 1 {
        let fold = n - 1 - step;
        v_tilde = if fold % 2 == 0 {
            abel::inverse_sqrt_data(&v_tilde, opts.presmooth)?
        } else {
            abel::inverse_with(&v_tilde, AbelSide::Left, opts.presmooth)?
        };
    }

    let m = v_tilde.len();
    // nodes s > 0 are trustworthy; s = 0 (mu = 1) is the flagged endpoint
    if v_tilde.values()[1..].iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidInput(
            "recovered V is nonpositive; data is corrupted or the grid is too coarse".into(),
        ));
    }

    let s_max = fu_data.hi();
    let nu_max = 4.0 / (1.0 - s_max);
    let mu_lo = 1.0 - s_max;

    // reverse onto the ascending mu grid; mu_i = 1 - s_{m-1-i}
    let mut mu = Vec::with_capacity(m);
    let mut v_rec = Vec::with_capacity(m);
    for i in 0..m {
        mu.push(1.0 - v_tilde.node(m - 1 - i));
        v_rec.push(v_tilde.values()[m - 1 - i]);
    }
    mu[m - 1] = 1.0;

    let mut hpp = vec![0.0; m];
    for i in 0..m - 1 {
        let v = v_rec[i];
        hpp[i] = (v * v - 1.0 / (1.0 - mu[i])) / mu[i];
    }
    // mu = 1 endpoint: linear extrapolation for both h'' and V
    hpp[m - 1] = 2.0 * hpp[m - 2] - hpp[m - 3];
    v_rec[m - 1] = 2.0 * v_rec[m - 2] - v_rec[m - 3];

    let (mut sup_error, mut l2_error, mut reference_hpp) = (None, None, None);
    if let Some(prof) = reference {
        let refs: Vec<f64> = mu.iter().map(|&m| prof.hpp(m.min(1.0))).collect();
        let lo = opts.window.0.max(mu_lo);
        let hi = opts.window.1.min(mu[m - 2]);
        let mut sup = 0.0f64;
        let mut sq = 0.0f64;
        let mut count = 0usize;
        for i in 0..m {
            if mu[i] < lo || mu[i] > hi {
                continue;
            }
            let e = (hpp[i] - refs[i]).abs();
            sup = sup.max(e);
            sq += e * e;
            count += 1;
        }
        if count == 0 {
            return Err(Error::InvalidInput(format!(
                "error window [{lo}, {hi}] contains no grid nodes"
            )));
        }
        sup_error = Some(sup);
        l2_error = Some((sq / count as f64).sqrt());
        reference_hpp = Some(refs);
    }

    Ok(ReconstructionReport {
        n,
        abel_n: m,
        nu_max,
        mu,
        v_recovered: v_rec,
        hpp_recovered: hpp,
        hpp_reference: reference_hpp,
        sup_error,
        l2_error,
        window: opts.window,
        endpoint_filled: true,
    })
}

/// Convenience round trip: forward `f_u` from a profile, reconstruct, and
/// report errors against that same profile.
pub fn round_trip(
    profile: &RadialProfile,
    nu_max: f64,
    abel_n: usize,
    opts: ReconstructOptions,
) -> Result<ReconstructionReport> {
    if !(nu_max > 4.0) {
        return Err(Error::InvalidInput(format!(
            "nu_max must exceed 4, got {nu_max}"
        )));
    }
    let s_max = 1.0 - 4.0 / nu_max;
    let fu = fu_profile(profile, s_max, abel_n)?;
    reconstruct_profile(&fu, profile.dimension(), Some(profile), opts)
}

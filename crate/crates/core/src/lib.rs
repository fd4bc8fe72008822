//! Equivariant spectral invariants of U(n)-invariant toric Kähler metrics
//! on CP^n, and reconstruction of the metric profile from them.
//!
//! The library computes the invariant functional
//! `F(g)[alpha, rho] = int_P rho(alpha^t Hess(g) alpha) sqrt(det Hess(g)) dx`
//! over the moment simplex for potentials `g = g_0 + h(sum x_i)`, reduces it
//! with the profile-determined change of variables to the one-variable
//! function `f_u`, and inverts the resulting nested fractional integrals to
//! recover the profile `h''` — a verifiable numerical round trip.
//!
//! Module map:
//! * [`polytope`] — facet presentations and the Guillemin potential,
//! * [`metric`] — radial profiles and closed-form Hessian algebra,
//! * [`numerics`] — grids, singular quadrature, simplex integration, Monte Carlo,
//! * [`abel`] — the half-order fractional integral operator and its inverse,
//! * [`invariant`] — the spectral invariant and the `rho <-> F` correspondence,
//! * [`reconstruct`] — the `(nu, mu)` change of variables, `f_u`, and the
//!   reconstruction pipeline.

pub mod abel;
pub mod error;
pub mod invariant;
pub mod metric;
pub mod numerics;
pub mod polytope;
pub mod reconstruct;

pub use error::{Error, Result};

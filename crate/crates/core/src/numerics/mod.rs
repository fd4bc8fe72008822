//! Grids, interpolation, singular quadrature, simplex integration and
//! seeded Monte Carlo.

mod bump;
mod grid;
mod monte_carlo;
mod quadrature;

pub use bump::{BumpFunction, SampledFunction, TestFunction};
pub use grid::{differentiate, GridFunction, PchipInterpolant};
pub use monte_carlo::monte_carlo_box;
pub use quadrature::{integrate_simplex, integrate_singular, SimplexScheme, SingularEnd};

pub(crate) use grid::quadratic_extrapolate;
pub(crate) use quadrature::gamma_half_integer;

/// A numerical value together with an error proxy (refinement difference
/// for deterministic quadrature, standard error for Monte Carlo).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

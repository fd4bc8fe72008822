//! Delzant polytopes given by facet data, and the Guillemin potential.
//!
//! A polytope is stored as the intersection of half-spaces
//! `l_i(x) = <x, u_i> - lambda_i >= 0`. The canonical symplectic potential
//! attached to the facet data is `g_0 = sum_i l_i log(l_i) - l_i`, extended
//! to the boundary by `0 log 0 = 0`.

use crate::error::{Error, Result};

/// One half-space constraint `<x, normal> - offset >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A polytope in facet presentation. Only the standard simplex is
/// constructed here; arbitrary facet data is stored without checking the
/// Delzant condition.
#[derive(Debug, Clone, PartialEq)]
pub struct DelzantPolytope {
    dimension: usize,
    facets: Vec<Facet>,
}

impl DelzantPolytope {
    pub fn new(dimension: usize, facets: Vec<Facet>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("polytope dimension must be >= 1".into()));
        }
        if facets.is_empty() {
            return Err(Error::InvalidInput("polytope needs at least one facet".into()));
        }
        for f in &facets {
            if f.normal.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: f.normal.len(),
                });
            }
            if f.normal.iter().all(|&c| c == 0.0) {
                return Err(Error::InvalidInput("facet normal is zero".into()));
            }
        }
        Ok(Self { dimension, facets })
    }

    /// The moment polytope of CP^n: facets `x_i >= 0` for `i = 1..n` and
    /// `1 - sum x_i >= 0`, so `d = n + 1`.
    pub fn standard_simplex(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("simplex dimension must be >= 1".into()));
        }
        let mut facets = Vec::with_capacity(n + 1);
        for i in 0..n {
            let mut normal = vec![0.0; n];
            normal[i] = 1.0;
            facets.push(Facet {
                normal,
                offset: 0.0,
            });
        }
        facets.push(Facet {
            normal: vec![-1.0; n],
            offset: -1.0,
        });
        Self::new(n, facets)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Evaluate all facet functions `l_i(x)`. The point is interior exactly
    /// when every entry is strictly positive.
    pub fn facet_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(self
            .facets
            .iter()
            .map(|f| {
                f.normal
                    .iter()
                    .zip(x)
                    .map(|(u, xi)| u * xi)
                    .sum::<f64>()
                    - f.offset
            })
            .collect())
    }

    pub fn is_interior(&self, x: &[f64]) -> Result<bool> {
        Ok(self.facet_values(x)?.iter().all(|&l| l > 0.0))
    }

    /// `g_0(x) = sum_i l_i(x) log l_i(x) - l_i(x)` on the closed polytope.
    ///
    /// Facet values below the positivity threshold contribute zero
    /// (the continuous extension of `t log t - t` minus the `-l` part,
    /// which also vanishes there). Errors if `x` lies outside.
    pub fn guillemin_potential(&self, x: &[f64]) -> Result<f64> {
        let values = self.facet_values(x)?;
        let mut total = 0.0;
        for &l in &values {
            if l < -1e-12 {
                return Err(Error::OutsideDomain(format!(
                    "facet value {l} negative at {x:?}"
                )));
            }
            if l > 1e-300 {
                total += l * l.ln() - l;
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_n1_is_unit_interval() {
        let p = DelzantPolytope::standard_simplex(1).unwrap();
        assert_eq!(p.num_facets(), 2);
        let v = p.facet_values(&[0.25]).unwrap();
        assert_eq!(v, vec![0.25, 0.75]);
    }

    #[test]
    fn simplex_rejects_n0() {
        assert!(DelzantPolytope::standard_simplex(0).is_err());
    }

    #[test]
    fn facet_values_n2() {
        let p = DelzantPolytope::standard_simplex(2).unwrap();
        let v = p.facet_values(&[0.2, 0.3]).unwrap();
        assert!((v[0] - 0.2).abs() < 1e-15);
        assert!((v[1] - 0.3).abs() < 1e-15);
        assert!((v[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn facet_values_boundary_point() {
        let p = DelzantPolytope::standard_simplex(2).unwrap();
        let v = p.facet_values(&[0.5, 0.5]).unwrap();
        assert_eq!(v[2], 0.0);
        assert!(!p.is_interior(&[0.5, 0.5]).unwrap());
    }

    #[test]
    fn facet_values_centroid_and_n3() {
        let p2 = DelzantPolytope::standard_simplex(2).unwrap();
        let v = p2.facet_values(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        for &l in &v {
            assert!((l - 1.0 / 3.0).abs() < 1e-15);
        }
        let p3 = DelzantPolytope::standard_simplex(3).unwrap();
        let v3 = p3.facet_values(&[0.1, 0.2, 0.3]).unwrap();
        let expected = [0.1, 0.2, 0.3, 0.4];
        for (a, b) in v3.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn exterior_point_flagged() {
        let p = DelzantPolytope::standard_simplex(2).unwrap();
        let v = p.facet_values(&[0.6, 0.6]).unwrap();
        assert!((v[2] + 0.2).abs() < 1e-15);
        assert!(!p.is_interior(&[0.6, 0.6]).unwrap());
    }

    #[test]
    fn dimension_mismatch() {
        let p = DelzantPolytope::standard_simplex(2).unwrap();
        assert!(p.facet_values(&[0.1]).is_err());
    }

    #[test]
    fn guillemin_midpoint_n1() {
        let p = DelzantPolytope::standard_simplex(1).unwrap();
        let g = p.guillemin_potential(&[0.5]).unwrap();
        let expected = -1.0 - std::f64::consts::LN_2;
        assert!((g - expected).abs() < 1e-12, "got {g}");
    }

    #[test]
    fn guillemin_centroid_n2() {
        let p = DelzantPolytope::standard_simplex(2).unwrap();
        let g = p.guillemin_potential(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        let expected = (1.0f64 / 3.0).ln() - 1.0;
        assert!((g - expected).abs() < 1e-12, "got {g}");
    }

    #[test]
    fn guillemin_vertex_is_minus_one() {
        for n in 1..=4 {
            let p = DelzantPolytope::standard_simplex(n).unwrap();
            let g = p.guillemin_potential(&vec![0.0; n]).unwrap();
            assert!((g + 1.0).abs() < 1e-15, "n={n} got {g}");
        }
    }

    #[test]
    fn guillemin_outside_errors() {
        let p = DelzantPolytope::standard_simplex(2).unwrap();
        assert!(p.guillemin_potential(&[0.7, 0.7]).is_err());
        assert!(p.guillemin_potential(&[-0.1, 0.2]).is_err());
    }
}

//! Sampled functions on a [`SphereGrid`].

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::UnitVector;
use crate::quadrature::SphereGrid;

/// Values of a function at the nodes of a grid, in node order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    /// Evaluates `f` at every node.
    pub fn sample<F>(grid: Arc<SphereGrid>, f: F) -> Self
    where
        F: Fn(&UnitVector) -> f64 + Sync,
    {
        let values = grid.nodes().par_iter().map(&f).collect();
        Self { grid, values }
    }

    pub fn try_sample<F>(grid: Arc<SphereGrid>, f: F) -> Result<Self>
    where
        F: Fn(&UnitVector) -> Result<f64> + Sync,
    {
        let values = grid
            .nodes()
            .par_iter()
            .map(&f)
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup-norm distance to `other` on the same grid.
    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// `||f||_{L^2}` by quadrature.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        self.grid.integrate(&sq).unwrap_or(f64::NAN).sqrt()
    }
}

/// `sum_i w_i f(eta_i)`.
pub fn integrate_sphere(f: &GridFunction) -> f64 {
    f.grid
        .weights()
        .iter()
        .zip(&f.values)
        .map(|(w, v)| w * v)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sphere_measure;
    use crate::quadrature::sphere_grid;

    #[test]
    fn rejects_bad_payloads() {
        let g = Arc::new(sphere_grid(3, 4, 4).unwrap());
        assert!(matches!(
            GridFunction::new(g.clone(), vec![0.0; 3]),
            Err(Error::LengthMismatch {
                expected: 16,
                found: 3
            })
        ));
        let mut v = vec![0.0; 16];
        v[5] = f64::NAN;
        assert_eq!(GridFunction::new(g, v), Err(Error::NonFinite(5)));
    }

    #[test]
    fn integrate_examples() {
        for (d, l, m) in [(3, 8, 8), (4, 6, 8)] {
            let g = Arc::new(sphere_grid(d, l, m).unwrap());
            let one = GridFunction::sample(g.clone(), |_| 1.0);
            assert!((integrate_sphere(&one) - sphere_measure(d)).abs() < 1e-12);
            let x1 = GridFunction::sample(g.clone(), |p| p.coords()[0]);
            assert!(integrate_sphere(&x1).abs() < 1e-13);
            let sq = GridFunction::sample(g, |p| p.coords().iter().map(|c| c * c).sum());
            assert!((integrate_sphere(&sq) - sphere_measure(d)).abs() < 1e-12);
        }
    }
}

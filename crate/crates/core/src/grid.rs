//! Periodic torus domain and grid-sampled scalar fields.
//!
//! All space is a torus of side `L` in one or two dimensions; grids are
//! cell-centered so that cell-volume quadrature turns the convolution of a
//! constant field into exactly (discrete kernel mass) * constant.

use crate::error::{Error, Result};

/// Positions and displacements are stored as `[f64; 2]`; the second
/// component is zero in one dimension.
pub type Point = [f64; 2];

/// A periodic box of side `L` with a uniform cell-centered grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusDomain {
    dim: usize,
    side: f64,
    cells_per_side: usize,
}

impl TorusDomain {
    pub fn new(dim: usize, side: f64, cells_per_side: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} unsupported (1 or 2)"
            )));
        }
        if !(side > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "side length {side} must be positive"
            )));
        }
        if cells_per_side == 0 {
            return Err(Error::InvalidParameter(
                "grid needs at least one cell per side".into(),
            ));
        }
        Ok(Self {
            dim,
            side,
            cells_per_side,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    /// Total number of grid cells (`n` in 1-d, `n^2` in 2-d).
    pub fn cell_count(&self) -> usize {
        self.cells_per_side.pow(self.dim as u32)
    }

    /// Grid spacing `h = L / n`.
    pub fn spacing(&self) -> f64 {
        self.side / self.cells_per_side as f64
    }

    /// Volume of one grid cell, `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume of the whole torus, `L^d`.
    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Map a coordinate difference to its minimum image in `[-L/2, L/2]`.
    pub fn min_image_coord(&self, dx: f64) -> f64 {
        dx - self.side * (dx / self.side).round()
    }

    pub fn min_image(&self, dx: Point) -> Point {
        let mut out = [0.0; 2];
        for k in 0..self.dim {
            out[k] = self.min_image_coord(dx[k]);
        }
        out
    }

    /// Torus distance between two points.
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        let mut s = 0.0;
        for k in 0..self.dim {
            let d = self.min_image_coord(a[k] - b[k]);
            s += d * d;
        }
        s.sqrt()
    }

    /// Wrap a point into the fundamental box `[0, L)^d`.
    pub fn wrap(&self, x: Point) -> Point {
        let mut out = [0.0; 2];
        for k in 0..self.dim {
            let mut v = x[k].rem_euclid(self.side);
            if v >= self.side {
                v = 0.0;
            }
            out[k] = v;
        }
        out
    }

    /// Center of the cell with flat index `idx` (row-major in 2-d).
    pub fn cell_center(&self, idx: usize) -> Point {
        let h = self.spacing();
        match self.dim {
            1 => [(idx as f64 + 0.5) * h, 0.0],
            _ => {
                let n = self.cells_per_side;
                let ix = idx % n;
                let iy = idx / n;
                [(ix as f64 + 0.5) * h, (iy as f64 + 0.5) * h]
            }
        }
    }

    /// Flat index of the cell containing `x` (wrapped onto the torus).
    pub fn cell_of(&self, x: Point) -> usize {
        let h = self.spacing();
        let n = self.cells_per_side;
        let w = self.wrap(x);
        let ix = ((w[0] / h) as usize).min(n - 1);
        match self.dim {
            1 => ix,
            _ => {
                let iy = ((w[1] / h) as usize).min(n - 1);
                ix + n * iy
            }
        }
    }

    /// Check that a point lies inside the fundamental box.
    pub fn contains(&self, x: Point) -> bool {
        (0..self.dim).all(|k| x[k] >= 0.0 && x[k] < self.side)
    }
}

/// A nonnegative-by-convention function sampled at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: TorusDomain,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(domain: TorusDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.cell_count() {
            return Err(Error::DomainMismatch);
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: TorusDomain) -> Self {
        Self {
            domain,
            values: vec![0.0; domain.cell_count()],
        }
    }

    pub fn constant(domain: TorusDomain, c: f64) -> Self {
        Self {
            domain,
            values: vec![c; domain.cell_count()],
        }
    }

    /// Sample `f` at every cell center.
    pub fn from_fn(domain: TorusDomain, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..domain.cell_count())
            .map(|i| f(domain.cell_center(i)))
            .collect();
        Self { domain, values }
    }

    pub fn domain(&self) -> TorusDomain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Value at the cell containing position `x`.
    pub fn at(&self, x: Point) -> f64 {
        self.values[self.domain.cell_of(x)]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Volume-weighted l1 norm, `sum |v_i| h^d`.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.domain.cell_volume()
    }

    /// Cell-volume quadrature of the field over the torus.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.domain.cell_volume()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            domain: self.domain,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(Self {
            domain: self.domain,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// In-place `self += scale * other`.
    pub fn axpy(&mut self, scale: f64, other: &Self) {
        debug_assert_eq!(self.domain, other.domain);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Cell-centered sampling of an analytic field description.
///
/// This is the generic entry point behind the field discretizers; dedicated
/// constructors exist for rates and potentials.
pub fn discretize(domain: TorusDomain, f: impl Fn(Point) -> f64) -> ScalarField {
    ScalarField::from_fn(domain, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn min_image_folds_into_half_box() {
        let dom = TorusDomain::new(1, 10.0, 16).unwrap();
        assert_relative_eq!(dom.min_image_coord(7.0), -3.0);
        assert_relative_eq!(dom.min_image_coord(-7.0), 3.0);
        assert_relative_eq!(dom.min_image_coord(3.0), 3.0);
    }

    #[test]
    fn cell_round_trip() {
        let dom = TorusDomain::new(2, 4.0, 8).unwrap();
        for idx in 0..dom.cell_count() {
            let c = dom.cell_center(idx);
            assert_eq!(dom.cell_of(c), idx);
        }
    }

    #[test]
    fn constant_field_discretizes_exactly() {
        let dom = TorusDomain::new(1, 8.0, 64).unwrap();
        let f = discretize(dom, |_| 3.0);
        assert!(f.values().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn sinusoid_samples_bounded_by_analytic_max() {
        let dom = TorusDomain::new(1, 10.0, 64).unwrap();
        let l = dom.side();
        let f = discretize(dom, |x| {
            1.0 + 0.5 * (2.0 * std::f64::consts::PI * x[0] / l).sin()
        });
        assert!(f.max() <= 1.5 + 1e-15);
        assert!(f.min() >= 0.5 - 1e-15);
    }

    #[test]
    fn mass_uses_cell_volume() {
        let dom = TorusDomain::new(2, 2.0, 10).unwrap();
        let f = ScalarField::constant(dom, 1.5);
        assert_relative_eq!(f.mass(), 1.5 * 4.0, epsilon = 1e-12);
    }
}

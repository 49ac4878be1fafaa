//! Piecewise-constant signals on dyadic grids.
//!
//! A signal stores one value per finest cell. All function-level arithmetic
//! (integrals, inner products, averages) accounts for the cell measure; cell
//! values are plain samples.

use crate::dyadic::{DyadicInterval, DyadicRectangle, Grid1D, Grid2D};
use crate::error::{Error, Result};
use crate::sums::{pairwise_map_sum, pairwise_sum};

fn check_finite(values: &[f64]) -> Result<()> {
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    Ok(())
}

/// Signal on `[0,1)` with `2^n` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Signal1D {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                want: grid.cells(),
            });
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.cells()],
        }
    }

    pub fn constant(grid: Grid1D, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.cells()],
        }
    }

    /// Indicator of a dyadic interval (1 on it, 0 elsewhere).
    pub fn indicator(grid: Grid1D, iv: &DyadicInterval) -> Result<Self> {
        grid.check_region(iv)?;
        let mut out = Self::zeros(grid);
        for c in iv.cell_range(grid.resolution()) {
            out.values[c as usize] = 1.0;
        }
        Ok(out)
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, cell: u64) -> f64 {
        self.values[cell as usize]
    }

    /// Average over a dyadic interval no finer than the grid.
    pub fn average_over(&self, iv: &DyadicInterval) -> Result<f64> {
        self.grid.check_region(iv)?;
        let r = iv.cell_range(self.grid.resolution());
        let count = (r.end - r.start) as usize;
        Ok(pairwise_sum(&self.values[r.start as usize..r.end as usize]) / count as f64)
    }

    /// Global mean.
    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    /// L^2 inner product (with cell measure).
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let m = self.grid.cell_measure();
        Ok(pairwise_map_sum(self.values.len(), &|i| self.values[i] * other.values[i]) * m)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "resolutions {} vs {}",
                self.grid.resolution(),
                other.grid.resolution()
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn linf_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// Signal on the unit square with `2^n1 x 2^n2` cells, row-major in x.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal2D {
    grid: Grid2D,
    values: Vec<f64>,
}

impl Signal2D {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                want: grid.cells(),
            });
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.cells()],
        }
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.cells()],
        }
    }

    /// Indicator of a dyadic rectangle.
    pub fn indicator(grid: Grid2D, r: &DyadicRectangle) -> Result<Self> {
        grid.check_region(r)?;
        let mut out = Self::zeros(grid);
        for c in grid.rect_cells(r) {
            out.values[c] = 1.0;
        }
        Ok(out)
    }

    /// Tensor product `b(x) c(y)`.
    pub fn from_tensor(b: &Signal1D, c: &Signal1D) -> Result<Self> {
        let grid = Grid2D::new(b.grid().resolution(), c.grid().resolution())?;
        let mut values = Vec::with_capacity(grid.cells());
        for ix in 0..grid.x_cells() {
            let bv = b.values()[ix];
            for iy in 0..grid.y_cells() {
                values.push(bv * c.values()[iy]);
            }
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, ix: u64, iy: u64) -> f64 {
        self.values[self.grid.cell_index(ix, iy)]
    }

    /// Row `f(., y)` at a fixed finest y-cell, as a 1D signal in x.
    pub fn fixed_y_row(&self, iy: u64) -> Signal1D {
        let vals = (0..self.grid.x_cells() as u64)
            .map(|ix| self.value(ix, iy))
            .collect();
        Signal1D {
            grid: self.grid.x_axis(),
            values: vals,
        }
    }

    /// Column `f(x, .)` at a fixed finest x-cell, as a 1D signal in y.
    pub fn fixed_x_col(&self, ix: u64) -> Signal1D {
        let base = ix as usize * self.grid.y_cells();
        Signal1D {
            grid: self.grid.y_axis(),
            values: self.values[base..base + self.grid.y_cells()].to_vec(),
        }
    }

    /// The reflected signal `(x, y) -> f(y, x)` on the transposed grid.
    pub fn transposed(&self) -> Signal2D {
        let g = self.grid.transposed();
        let mut values = vec![0.0; g.cells()];
        for ix in 0..self.grid.x_cells() as u64 {
            for iy in 0..self.grid.y_cells() as u64 {
                values[g.cell_index(iy, ix)] = self.value(ix, iy);
            }
        }
        Signal2D { grid: g, values }
    }

    pub fn average_over(&self, r: &DyadicRectangle) -> Result<f64> {
        self.grid.check_region(r)?;
        let cells: Vec<usize> = self.grid.rect_cells(r).collect();
        Ok(pairwise_map_sum(cells.len(), &|i| self.values[cells[i]]) / cells.len() as f64)
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let m = self.grid.cell_measure();
        Ok(pairwise_map_sum(self.values.len(), &|i| self.values[i] * other.values[i]) * m)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "resolutions ({},{}) vs ({},{})",
                self.grid.n1(),
                self.grid.n2(),
                other.grid.n1(),
                other.grid.n2()
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn linf_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length_and_nonfinite() {
        let g = Grid1D::new(2).unwrap();
        assert!(Signal1D::new(g, vec![1.0; 3]).is_err());
        assert!(matches!(
            Signal1D::new(g, vec![1.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite(1))
        ));
    }

    #[test]
    fn averages_are_exact_cell_means() {
        let g = Grid1D::new(2).unwrap();
        let f = Signal1D::new(g, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let left = DyadicInterval::new(1, 0).unwrap();
        assert_eq!(f.average_over(&left).unwrap(), 0.5);
        assert_eq!(f.average_over(&DyadicInterval::root()).unwrap(), 0.25);
        assert!(f.average_over(&DyadicInterval::new(3, 0).unwrap()).is_err());
    }

    #[test]
    fn inner_product_uses_cell_measure() {
        let g = Grid1D::new(1).unwrap();
        let f = Signal1D::new(g, vec![2.0, 4.0]).unwrap();
        // integral of f^2 = (4 + 16)/2
        assert_eq!(f.inner_product(&f).unwrap(), 10.0);
    }

    #[test]
    fn row_major_layout_is_x_major() {
        let g = Grid2D::new(1, 2).unwrap();
        let f = Signal2D::new(g, (0..8).map(|v| v as f64).collect()).unwrap();
        assert_eq!(f.value(0, 3), 3.0);
        assert_eq!(f.value(1, 0), 4.0);
        assert_eq!(f.fixed_y_row(0).values(), &[0.0, 4.0]);
        assert_eq!(f.fixed_x_col(1).values(), &[4.0, 5.0, 6.0, 7.0]);
    }

    #[test]
    fn transpose_reflects() {
        let g = Grid2D::new(1, 2).unwrap();
        let f = Signal2D::new(g, (0..8).map(|v| v as f64).collect()).unwrap();
        let t = f.transposed();
        for ix in 0..2 {
            for iy in 0..4 {
                assert_eq!(f.value(ix, iy), t.value(iy, ix));
            }
        }
        assert_eq!(t.transposed(), f);
    }

    #[test]
    fn tensor_product_values() {
        let b = Signal1D::new(Grid1D::new(1).unwrap(), vec![1.0, 2.0]).unwrap();
        let c = Signal1D::new(Grid1D::new(1).unwrap(), vec![3.0, 5.0]).unwrap();
        let f = Signal2D::from_tensor(&b, &c).unwrap();
        assert_eq!(f.values(), &[3.0, 5.0, 6.0, 10.0]);
    }

    #[test]
    fn rect_average() {
        let g = Grid2D::new(1, 1).unwrap();
        let f = Signal2D::new(g, vec![1.0, 3.0, 5.0, 7.0]).unwrap();
        assert_eq!(
            f.average_over(&DyadicRectangle::unit_square()).unwrap(),
            4.0
        );
        let left_col = DyadicRectangle::from_parts(1, 0, 0, 0).unwrap();
        assert_eq!(f.average_over(&left_col).unwrap(), 2.0);
    }
}

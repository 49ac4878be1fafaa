//! Dyadic geometry on the unit interval and unit square.
//!
//! An interval is addressed by `(level, index)`: level `j` splits `[0,1)`
//! into `2^j` pieces of measure `2^-j`, and `index k` picks
//! `[k 2^-j, (k+1) 2^-j)`. Rectangles are products of two intervals. Grids
//! fix the finest resolution per axis; cells are the finest intervals (or
//! rectangles) of a grid.

use crate::error::{Error, Result};
use std::fmt;

/// Hard cap on per-axis resolution. `2^16` cells per axis is far beyond what
/// the dense algorithms here are meant for, and keeping indices this small
/// lets cell sets live in flat bitmasks.
pub const MAX_RESOLUTION: u32 = 16;

/// Half-open dyadic interval `[k 2^-j, (k+1) 2^-j)` inside `[0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    level: u32,
    index: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, index: u64) -> Result<Self> {
        if level > MAX_RESOLUTION {
            return Err(Error::InvalidResolution(level));
        }
        if index >= 1u64 << level {
            return Err(Error::InvalidIndex { level, index });
        }
        Ok(Self { level, index })
    }

    /// The whole of `[0,1)`.
    pub fn root() -> Self {
        Self { level: 0, index: 0 }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn measure(&self) -> f64 {
        2f64.powi(-(self.level as i32))
    }

    /// Left endpoint, for display purposes.
    pub fn left_endpoint(&self) -> f64 {
        self.index as f64 * self.measure()
    }

    /// Children at the next finer level. Panics past [`MAX_RESOLUTION`];
    /// callers stay within a validated grid.
    pub fn children(&self) -> (Self, Self) {
        assert!(
            self.level < MAX_RESOLUTION,
            "children would exceed max resolution"
        );
        let l = Self {
            level: self.level + 1,
            index: 2 * self.index,
        };
        let r = Self {
            level: self.level + 1,
            index: 2 * self.index + 1,
        };
        (l, r)
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| Self {
            level: self.level - 1,
            index: self.index / 2,
        })
    }

    /// Whether `other` is contained in `self` (as sets; equality counts).
    pub fn contains(&self, other: &Self) -> bool {
        other.level >= self.level && (other.index >> (other.level - self.level)) == self.index
    }

    /// Range of level-`n` cell indices covered by this interval.
    /// Requires `self.level <= n`.
    pub fn cell_range(&self, n: u32) -> std::ops::Range<u64> {
        debug_assert!(self.level <= n);
        let w = n - self.level;
        (self.index << w)..((self.index + 1) << w)
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I({},{})", self.level, self.index)
    }
}

/// Dyadic rectangle `I x J` in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicRectangle {
    pub x: DyadicInterval,
    pub y: DyadicInterval,
}

impl DyadicRectangle {
    pub fn new(x: DyadicInterval, y: DyadicInterval) -> Self {
        Self { x, y }
    }

    pub fn from_parts(lx: u32, kx: u64, ly: u32, ky: u64) -> Result<Self> {
        Ok(Self {
            x: DyadicInterval::new(lx, kx)?,
            y: DyadicInterval::new(ly, ky)?,
        })
    }

    pub fn unit_square() -> Self {
        Self {
            x: DyadicInterval::root(),
            y: DyadicInterval::root(),
        }
    }

    pub fn measure(&self) -> f64 {
        self.x.measure() * self.y.measure()
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.x.contains(&other.x) && self.y.contains(&other.y)
    }
}

impl fmt::Display for DyadicRectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.x, self.y)
    }
}

/// Resolution of a one-dimensional grid: `2^n` cells on `[0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid1D {
    n: u32,
}

impl Grid1D {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_RESOLUTION {
            return Err(Error::InvalidResolution(n));
        }
        Ok(Self { n })
    }

    pub fn resolution(&self) -> u32 {
        self.n
    }

    pub fn cells(&self) -> usize {
        1usize << self.n
    }

    pub fn cell_measure(&self) -> f64 {
        2f64.powi(-(self.n as i32))
    }

    /// Number of cancellative intervals, i.e. levels `0..n`.
    pub fn detail_count(&self) -> usize {
        (1usize << self.n) - 1
    }

    /// Checks that `iv` is no finer than the grid.
    pub fn check_region(&self, iv: &DyadicInterval) -> Result<()> {
        if iv.level() > self.n {
            return Err(Error::SubgridRegion(format!(
                "{iv} is finer than resolution {}",
                self.n
            )));
        }
        Ok(())
    }

    /// The cell (finest interval) with the given index.
    pub fn cell(&self, k: u64) -> DyadicInterval {
        DyadicInterval::new(self.n, k).expect("cell index in range")
    }
}

/// Resolution of a two-dimensional grid: `2^n1 x 2^n2` cells on the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid2D {
    n1: u32,
    n2: u32,
}

impl Grid2D {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n1 == 0 || n1 > MAX_RESOLUTION {
            return Err(Error::InvalidResolution(n1));
        }
        if n2 == 0 || n2 > MAX_RESOLUTION {
            return Err(Error::InvalidResolution(n2));
        }
        Ok(Self { n1, n2 })
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn x_axis(&self) -> Grid1D {
        Grid1D { n: self.n1 }
    }

    pub fn y_axis(&self) -> Grid1D {
        Grid1D { n: self.n2 }
    }

    pub fn x_cells(&self) -> usize {
        1usize << self.n1
    }

    pub fn y_cells(&self) -> usize {
        1usize << self.n2
    }

    pub fn cells(&self) -> usize {
        self.x_cells() * self.y_cells()
    }

    pub fn cell_measure(&self) -> f64 {
        2f64.powi(-((self.n1 + self.n2) as i32))
    }

    /// Row-major (x-major) linear index of a cell.
    pub fn cell_index(&self, ix: u64, iy: u64) -> usize {
        debug_assert!(ix < self.x_cells() as u64 && iy < self.y_cells() as u64);
        (ix as usize) * self.y_cells() + iy as usize
    }

    pub fn cell_coords(&self, linear: usize) -> (u64, u64) {
        let w = self.y_cells();
        ((linear / w) as u64, (linear % w) as u64)
    }

    pub fn check_region(&self, r: &DyadicRectangle) -> Result<()> {
        if r.x.level() > self.n1 || r.y.level() > self.n2 {
            return Err(Error::SubgridRegion(format!(
                "{r} is finer than resolution ({},{})",
                self.n1, self.n2
            )));
        }
        Ok(())
    }

    /// Linear indices of the cells covered by a rectangle, row-major.
    pub fn rect_cells<'a>(&'a self, r: &DyadicRectangle) -> impl Iterator<Item = usize> + 'a {
        let xr = r.x.cell_range(self.n1);
        let yr = r.y.cell_range(self.n2);
        xr.flat_map(move |ix| yr.clone().map(move |iy| self.cell_index(ix, iy)))
    }

    /// Number of cells covered by a rectangle.
    pub fn rect_cell_count(&self, r: &DyadicRectangle) -> usize {
        1usize << ((self.n1 - r.x.level()) + (self.n2 - r.y.level()))
    }

    pub fn transposed(&self) -> Grid2D {
        Grid2D {
            n1: self.n2,
            n2: self.n1,
        }
    }
}

/// All cancellative intervals (levels `0..n`) in level-major order.
pub fn cancellative_intervals(n: u32) -> impl Iterator<Item = DyadicInterval> {
    (0..n).flat_map(|j| (0..1u64 << j).map(move |k| DyadicInterval::new(j, k).expect("in range")))
}

/// All intervals of levels `0..=n` in level-major order.
pub fn all_intervals(n: u32) -> impl Iterator<Item = DyadicInterval> {
    (0..=n).flat_map(|j| (0..1u64 << j).map(move |k| DyadicInterval::new(j, k).expect("in range")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_measures_and_endpoints() {
        let i = DyadicInterval::new(2, 3).unwrap();
        assert_eq!(i.measure(), 0.25);
        assert_eq!(i.left_endpoint(), 0.75);
        assert_eq!(DyadicInterval::root().measure(), 1.0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(DyadicInterval::new(2, 4).is_err());
        assert!(DyadicInterval::new(17, 0).is_err());
        assert!(Grid1D::new(0).is_err());
        assert!(Grid1D::new(17).is_err());
        assert!(Grid2D::new(3, 0).is_err());
    }

    #[test]
    fn containment_matches_endpoint_arithmetic() {
        // Oracle: compare endpoints as exact rationals k/2^j scaled to a
        // common denominator.
        let ivs: Vec<DyadicInterval> = all_intervals(4).collect();
        for a in &ivs {
            for b in &ivs {
                let scale_a = 1u64 << (8 - a.level());
                let scale_b = 1u64 << (8 - b.level());
                let (a0, a1) = (a.index() * scale_a, (a.index() + 1) * scale_a);
                let (b0, b1) = (b.index() * scale_b, (b.index() + 1) * scale_b);
                let want = a0 <= b0 && b1 <= a1;
                assert_eq!(a.contains(b), want, "{a} contains {b}");
            }
        }
    }

    #[test]
    fn children_partition_parent() {
        let i = DyadicInterval::new(3, 5).unwrap();
        let (l, r) = i.children();
        assert!(i.contains(&l) && i.contains(&r));
        assert_eq!(l.measure() + r.measure(), i.measure());
        assert_eq!(l.parent(), Some(i));
        assert_eq!(r.parent(), Some(i));
    }

    #[test]
    fn cell_ranges_cover_exactly() {
        let i = DyadicInterval::new(2, 1).unwrap();
        assert_eq!(i.cell_range(5), 8..16);
        assert_eq!(i.cell_range(2), 1..2);
    }

    #[test]
    fn grid_counts() {
        let g = Grid2D::new(3, 2).unwrap();
        assert_eq!(g.cells(), 32);
        assert_eq!(g.cell_index(1, 1), 5);
        assert_eq!(g.cell_coords(5), (1, 1));
        let r = DyadicRectangle::from_parts(1, 0, 1, 1).unwrap();
        assert_eq!(g.rect_cell_count(&r), 8);
        assert_eq!(g.rect_cells(&r).count(), 8);
        assert!((r.measure() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn interval_enumeration_counts() {
        assert_eq!(cancellative_intervals(3).count(), 7);
        assert_eq!(all_intervals(3).count(), 15);
    }

    #[test]
    fn subgrid_region_rejected() {
        let g = Grid1D::new(2).unwrap();
        assert!(g.check_region(&DyadicInterval::new(3, 0).unwrap()).is_err());
        assert!(g.check_region(&DyadicInterval::new(2, 3).unwrap()).is_ok());
    }
}

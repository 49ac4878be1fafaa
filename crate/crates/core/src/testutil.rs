//! Shared helpers for unit tests: seeded RNG and brute-force oracles that
//! evaluate basis functions pointwise instead of going through the pyramid
//! transforms.

use crate::dyadic::{DyadicInterval, DyadicRectangle, Grid1D, Grid2D};
use crate::haar::pow2_half;
use crate::signal::{Signal1D, Signal2D};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_signal_1d(grid: Grid1D, rng: &mut ChaCha8Rng) -> Signal1D {
    let vals: Vec<f64> = (0..grid.cells())
        .map(|_| StandardNormal.sample(rng))
        .collect();
    Signal1D::new(grid, vals).expect("finite")
}

pub fn random_signal_2d(grid: Grid2D, rng: &mut ChaCha8Rng) -> Signal2D {
    let vals: Vec<f64> = (0..grid.cells())
        .map(|_| StandardNormal.sample(rng))
        .collect();
    Signal2D::new(grid, vals).expect("finite")
}

/// Value of `h_iv` on a level-`n` cell.
pub fn haar_cell_value(iv: &DyadicInterval, cell: u64, n: u32) -> f64 {
    let cell_iv = DyadicInterval::new(n, cell).expect("cell");
    if !iv.contains(&cell_iv) {
        return 0.0;
    }
    let (left, _) = iv.children();
    let sign = if left.contains(&cell_iv) { 1.0 } else { -1.0 };
    sign * pow2_half(iv.level() as i32)
}

/// `h_iv` sampled on a grid.
pub fn haar_signal_1d(grid: Grid1D, iv: &DyadicInterval) -> Signal1D {
    let n = grid.resolution();
    let vals = (0..grid.cells() as u64)
        .map(|c| haar_cell_value(iv, c, n))
        .collect();
    Signal1D::new(grid, vals).expect("finite")
}

/// `h_I x h_J` sampled on a grid.
pub fn haar_signal_2d(grid: Grid2D, r: &DyadicRectangle) -> Signal2D {
    Signal2D::from_tensor(
        &haar_signal_1d(grid.x_axis(), &r.x),
        &haar_signal_1d(grid.y_axis(), &r.y),
    )
    .expect("same grid")
}

/// Direct `<f, h_iv>` by summing cells.
pub fn naive_haar_coeff_1d(f: &Signal1D, iv: &DyadicInterval) -> f64 {
    let n = f.grid().resolution();
    let m = f.grid().cell_measure();
    (0..f.grid().cells() as u64)
        .map(|c| f.value(c) * haar_cell_value(iv, c, n) * m)
        .sum()
}

/// Direct `<f, h_I x h_J>`.
pub fn naive_cc_coeff_2d(f: &Signal2D, r: &DyadicRectangle) -> f64 {
    let g = f.grid();
    let m = g.cell_measure();
    let mut acc = 0.0;
    for ix in 0..g.x_cells() as u64 {
        for iy in 0..g.y_cells() as u64 {
            acc += f.value(ix, iy)
                * haar_cell_value(&r.x, ix, g.n1())
                * haar_cell_value(&r.y, iy, g.n2())
                * m;
        }
    }
    acc
}

/// Direct `<f, h_I x 1>`.
pub fn naive_cm_coeff_2d(f: &Signal2D, i: &DyadicInterval) -> f64 {
    let g = f.grid();
    let m = g.cell_measure();
    let mut acc = 0.0;
    for ix in 0..g.x_cells() as u64 {
        for iy in 0..g.y_cells() as u64 {
            acc += f.value(ix, iy) * haar_cell_value(i, ix, g.n1()) * m;
        }
    }
    acc
}

/// Direct `<f, 1 x h_J>`.
pub fn naive_mc_coeff_2d(f: &Signal2D, j: &DyadicInterval) -> f64 {
    let g = f.grid();
    let m = g.cell_measure();
    let mut acc = 0.0;
    for ix in 0..g.x_cells() as u64 {
        for iy in 0..g.y_cells() as u64 {
            acc += f.value(ix, iy) * haar_cell_value(j, iy, g.n2()) * m;
        }
    }
    acc
}

/// Direct `<f, h_I x chibar_J>` (Haar in x, normalised indicator in y).
pub fn naive_mixed_haar_avg(f: &Signal2D, jx: u32, kx: u64, jy: u32, ky: u64) -> f64 {
    let g = f.grid();
    let i = DyadicInterval::new(jx, kx).unwrap();
    let j = DyadicInterval::new(jy, ky).unwrap();
    let m = g.cell_measure();
    let jbar = 1.0 / j.measure();
    let mut acc = 0.0;
    for ix in 0..g.x_cells() as u64 {
        for iy in j.cell_range(g.n2()) {
            acc += f.value(ix, iy) * haar_cell_value(&i, ix, g.n1()) * jbar * m;
        }
    }
    acc
}

/// Direct `<f, chibar_I x h_J>`.
pub fn naive_mixed_avg_haar(f: &Signal2D, jx: u32, kx: u64, jy: u32, ky: u64) -> f64 {
    let g = f.grid();
    let i = DyadicInterval::new(jx, kx).unwrap();
    let j = DyadicInterval::new(jy, ky).unwrap();
    let m = g.cell_measure();
    let ibar = 1.0 / i.measure();
    let mut acc = 0.0;
    for ix in i.cell_range(g.n1()) {
        for iy in 0..g.y_cells() as u64 {
            acc += f.value(ix, iy) * ibar * haar_cell_value(&j, iy, g.n2()) * m;
        }
    }
    acc
}

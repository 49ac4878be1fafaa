//! Haar transforms on dyadic grids.
//!
//! Convention: `h_I = |I|^{-1/2} (chi_left - chi_right)`, positive on the
//! left child, so `{1} u {h_I}` is an orthonormal basis of L^2[0,1) over the
//! cancellative intervals (levels `0..n`). On the square the tensor family
//! `{1, h_I x 1, 1 x h_J, h_I x h_J}` is orthonormal, which splits the
//! coefficients into four blocks: `mm` (global mean), `cm` (x-cancellative,
//! y-mean), `mc` (x-mean, y-cancellative), `cc` (both cancellative).
//!
//! Forward and inverse run the O(2^n) pyramid recursion per line; the 2D
//! transform is the tensor composition of line transforms. Coefficients are
//! stored densely in level-major ("heap") order: offset `2^j - 1 + k` for
//! interval `(j, k)`.

use crate::dyadic::{DyadicInterval, DyadicRectangle, Grid1D, Grid2D};
use crate::error::{Error, Result};
use crate::signal::{Signal1D, Signal2D};
use crate::sums::pairwise_map_sum;

/// `2^(j/2)` with one rounding at most (exact for even `j`).
pub fn pow2_half(j: i32) -> f64 {
    let q = j.div_euclid(2);
    let r = j.rem_euclid(2);
    let base = 2f64.powi(q);
    if r == 0 {
        base
    } else {
        base * std::f64::consts::SQRT_2
    }
}

/// Level-major offset of interval `(level, index)` among all cancellative
/// intervals: `2^level - 1 + index`.
pub fn heap_offset(level: u32, index: u64) -> usize {
    ((1u64 << level) - 1 + index) as usize
}

/// Inverse of [`heap_offset`].
pub fn interval_from_offset(offset: usize) -> DyadicInterval {
    let level = usize::BITS - 1 - (offset + 1).leading_zeros();
    let index = (offset + 1) as u64 - (1u64 << level);
    DyadicInterval::new(level, index).expect("offset encodes a valid interval")
}

/// Pyramid transform of one line of `2^n` cell values.
/// Returns the global mean and the detail coefficients in heap order.
fn forward_raw(n: u32, values: &[f64]) -> (f64, Vec<f64>) {
    debug_assert_eq!(values.len(), 1 << n);
    let mut detail = vec![0.0; (1 << n) - 1];
    let mut level = values.to_vec();
    for j in (0..n).rev() {
        let half = 1usize << j;
        let scale = 0.5 * pow2_half(-(j as i32));
        let mut coarse = vec![0.0; half];
        for k in 0..half {
            let a = level[2 * k];
            let b = level[2 * k + 1];
            coarse[k] = 0.5 * (a + b);
            detail[heap_offset(j, k as u64)] = scale * (a - b);
        }
        level = coarse;
    }
    (level[0], detail)
}

/// Inverse pyramid: reconstruct `2^n` cell values from mean plus details.
fn inverse_raw(n: u32, mean: f64, detail: &[f64]) -> Vec<f64> {
    debug_assert_eq!(detail.len(), (1usize << n) - 1);
    let mut level = vec![mean];
    for j in 0..n {
        let half = 1usize << j;
        let scale = pow2_half(j as i32);
        let mut fine = vec![0.0; 2 * half];
        for k in 0..half {
            let d = detail[heap_offset(j, k as u64)] * scale;
            fine[2 * k] = level[k] + d;
            fine[2 * k + 1] = level[k] - d;
        }
        level = fine;
    }
    level
}

/// Haar coefficients of a 1D signal: global mean plus one detail per
/// cancellative interval, heap order.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoeffs1D {
    grid: Grid1D,
    mean: f64,
    detail: Vec<f64>,
}

impl HaarCoeffs1D {
    pub fn forward(f: &Signal1D) -> Self {
        let (mean, detail) = forward_raw(f.grid().resolution(), f.values());
        Self {
            grid: f.grid(),
            mean,
            detail,
        }
    }

    pub fn inverse(&self) -> Signal1D {
        let vals = inverse_raw(self.grid.resolution(), self.mean, &self.detail);
        Signal1D::new(self.grid, vals).expect("reconstruction is finite")
    }

    pub fn from_parts(grid: Grid1D, mean: f64, detail: Vec<f64>) -> Result<Self> {
        if detail.len() != grid.detail_count() {
            return Err(Error::LengthMismatch {
                got: detail.len(),
                want: grid.detail_count(),
            });
        }
        if !mean.is_finite() {
            return Err(Error::NonFinite(0));
        }
        if let Some(p) = detail.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(p));
        }
        Ok(Self { grid, mean, detail })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            mean: 0.0,
            detail: vec![0.0; grid.detail_count()],
        }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn set_mean(&mut self, m: f64) {
        self.mean = m;
    }

    pub fn detail(&self) -> &[f64] {
        &self.detail
    }

    pub fn detail_mut(&mut self) -> &mut [f64] {
        &mut self.detail
    }

    fn check_cancellative(&self, iv: &DyadicInterval) -> Result<()> {
        if iv.level() >= self.grid.resolution() {
            return Err(Error::InvalidParameter(format!(
                "{iv} has no cancellative coefficient at resolution {}",
                self.grid.resolution()
            )));
        }
        Ok(())
    }

    pub fn detail_at(&self, iv: &DyadicInterval) -> Result<f64> {
        self.check_cancellative(iv)?;
        Ok(self.detail[heap_offset(iv.level(), iv.index())])
    }

    pub fn set_detail(&mut self, iv: &DyadicInterval, v: f64) -> Result<()> {
        self.check_cancellative(iv)?;
        self.detail[heap_offset(iv.level(), iv.index())] = v;
        Ok(())
    }

    /// Iterate `(interval, coefficient)` in level-major order.
    pub fn iter(&self) -> impl Iterator<Item = (DyadicInterval, f64)> + '_ {
        self.detail
            .iter()
            .enumerate()
            .map(|(o, &v)| (interval_from_offset(o), v))
    }

    /// Coefficient-space inner product; equals the signal-space L^2 inner
    /// product by orthonormality.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("coefficient grids differ".into()));
        }
        Ok(self.mean * other.mean
            + pairwise_map_sum(self.detail.len(), &|i| self.detail[i] * other.detail[i]))
    }

    pub fn norm_l2(&self) -> f64 {
        self.dot(self).expect("same grid").sqrt()
    }
}

/// Haar coefficients of a 2D signal in the four tensor blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoeffs2D {
    grid: Grid2D,
    mm: f64,
    cm: Vec<f64>,
    mc: Vec<f64>,
    cc: Vec<f64>,
}

impl HaarCoeffs2D {
    pub fn forward(f: &Signal2D) -> Self {
        let g = f.grid();
        let (xc, yc) = (g.x_cells(), g.y_cells());
        let ydet_len = yc - 1;

        // Transform each x-row along y.
        let mut row_mean = vec![0.0; xc];
        let mut ydet = vec![0.0; xc * ydet_len];
        for ix in 0..xc {
            let (m, d) = forward_raw(g.n2(), &f.values()[ix * yc..(ix + 1) * yc]);
            row_mean[ix] = m;
            ydet[ix * ydet_len..(ix + 1) * ydet_len].copy_from_slice(&d);
        }

        // Transform the y-means along x: global mean + cm block.
        let (mm, cm) = forward_raw(g.n1(), &row_mean);

        // Transform each y-detail column along x: mc + cc blocks.
        let mut mc = vec![0.0; ydet_len];
        let mut cc = vec![0.0; (xc - 1) * ydet_len];
        let mut col = vec![0.0; xc];
        for oy in 0..ydet_len {
            for ix in 0..xc {
                col[ix] = ydet[ix * ydet_len + oy];
            }
            let (m, d) = forward_raw(g.n1(), &col);
            mc[oy] = m;
            for (ox, v) in d.into_iter().enumerate() {
                cc[ox * ydet_len + oy] = v;
            }
        }

        Self {
            grid: g,
            mm,
            cm,
            mc,
            cc,
        }
    }

    pub fn inverse(&self) -> Signal2D {
        let g = self.grid;
        let (xc, yc) = (g.x_cells(), g.y_cells());
        let ydet_len = yc - 1;

        // Invert along x: per y-detail column and for the mean column.
        let row_mean = inverse_raw(g.n1(), self.mm, &self.cm);
        let mut ydet = vec![0.0; xc * ydet_len];
        let mut col_det = vec![0.0; xc - 1];
        for oy in 0..ydet_len {
            for (ox, slot) in col_det.iter_mut().enumerate() {
                *slot = self.cc[ox * ydet_len + oy];
            }
            let col = inverse_raw(g.n1(), self.mc[oy], &col_det);
            for (ix, v) in col.into_iter().enumerate() {
                ydet[ix * ydet_len + oy] = v;
            }
        }

        // Invert along y per x-row.
        let mut values = vec![0.0; g.cells()];
        for ix in 0..xc {
            let row = inverse_raw(
                g.n2(),
                row_mean[ix],
                &ydet[ix * ydet_len..(ix + 1) * ydet_len],
            );
            values[ix * yc..(ix + 1) * yc].copy_from_slice(&row);
        }
        Signal2D::new(g, values).expect("reconstruction is finite")
    }

    pub fn from_parts(
        grid: Grid2D,
        mm: f64,
        cm: Vec<f64>,
        mc: Vec<f64>,
        cc: Vec<f64>,
    ) -> Result<Self> {
        let (xd, yd) = (grid.x_cells() - 1, grid.y_cells() - 1);
        if cm.len() != xd {
            return Err(Error::LengthMismatch {
                got: cm.len(),
                want: xd,
            });
        }
        if mc.len() != yd {
            return Err(Error::LengthMismatch {
                got: mc.len(),
                want: yd,
            });
        }
        if cc.len() != xd * yd {
            return Err(Error::LengthMismatch {
                got: cc.len(),
                want: xd * yd,
            });
        }
        for v in std::iter::once(&mm)
            .chain(cm.iter())
            .chain(mc.iter())
            .chain(cc.iter())
        {
            if !v.is_finite() {
                return Err(Error::NonFinite(0));
            }
        }
        Ok(Self {
            grid,
            mm,
            cm,
            mc,
            cc,
        })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        let (xd, yd) = (grid.x_cells() - 1, grid.y_cells() - 1);
        Self {
            grid,
            mm: 0.0,
            cm: vec![0.0; xd],
            mc: vec![0.0; yd],
            cc: vec![0.0; xd * yd],
        }
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn mm(&self) -> f64 {
        self.mm
    }

    pub fn set_mm(&mut self, v: f64) {
        self.mm = v;
    }

    pub fn cm(&self) -> &[f64] {
        &self.cm
    }

    pub fn mc(&self) -> &[f64] {
        &self.mc
    }

    pub fn cc(&self) -> &[f64] {
        &self.cc
    }

    pub fn cm_mut(&mut self) -> &mut [f64] {
        &mut self.cm
    }

    pub fn mc_mut(&mut self) -> &mut [f64] {
        &mut self.mc
    }

    pub fn cc_mut(&mut self) -> &mut [f64] {
        &mut self.cc
    }

    pub fn cc_index(&self, ox: usize, oy: usize) -> usize {
        ox * (self.grid.y_cells() - 1) + oy
    }

    fn check_cc(&self, r: &DyadicRectangle) -> Result<()> {
        if r.x.level() >= self.grid.n1() || r.y.level() >= self.grid.n2() {
            return Err(Error::InvalidParameter(format!(
                "{r} has no cc coefficient at resolution ({},{})",
                self.grid.n1(),
                self.grid.n2()
            )));
        }
        Ok(())
    }

    pub fn cc_at(&self, r: &DyadicRectangle) -> Result<f64> {
        self.check_cc(r)?;
        let ox = heap_offset(r.x.level(), r.x.index());
        let oy = heap_offset(r.y.level(), r.y.index());
        Ok(self.cc[self.cc_index(ox, oy)])
    }

    pub fn set_cc(&mut self, r: &DyadicRectangle, v: f64) -> Result<()> {
        self.check_cc(r)?;
        let ox = heap_offset(r.x.level(), r.x.index());
        let oy = heap_offset(r.y.level(), r.y.index());
        let i = self.cc_index(ox, oy);
        self.cc[i] = v;
        Ok(())
    }

    /// Iterate `(rectangle, cc coefficient)` in x-major level-major order.
    pub fn iter_cc(&self) -> impl Iterator<Item = (DyadicRectangle, f64)> + '_ {
        let yd = self.grid.y_cells() - 1;
        self.cc.iter().enumerate().map(move |(i, &v)| {
            let (ox, oy) = (i / yd, i % yd);
            (
                DyadicRectangle::new(interval_from_offset(ox), interval_from_offset(oy)),
                v,
            )
        })
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("coefficient grids differ".into()));
        }
        Ok(self.mm * other.mm
            + pairwise_map_sum(self.cm.len(), &|i| self.cm[i] * other.cm[i])
            + pairwise_map_sum(self.mc.len(), &|i| self.mc[i] * other.mc[i])
            + pairwise_map_sum(self.cc.len(), &|i| self.cc[i] * other.cc[i]))
    }

    pub fn norm_l2(&self) -> f64 {
        self.dot(self).expect("same grid").sqrt()
    }

    /// Coefficients of the reflected signal `f(y, x)`; cc blocks transpose,
    /// cm and mc swap.
    pub fn transposed(&self) -> HaarCoeffs2D {
        let g = self.grid.transposed();
        let (xd, yd) = (self.grid.x_cells() - 1, self.grid.y_cells() - 1);
        let mut cc = vec![0.0; xd * yd];
        for ox in 0..xd {
            for oy in 0..yd {
                cc[oy * xd + ox] = self.cc[ox * yd + oy];
            }
        }
        HaarCoeffs2D {
            grid: g,
            mm: self.mm,
            cm: self.mc.clone(),
            mc: self.cm.clone(),
            cc,
        }
    }
}

/// Which axis a slice transform integrated against Haar functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Haar coefficients taken along one axis only.
///
/// For `axis = Y` this maps each cancellative `J` to the 1D signal
/// `x -> <f(x, .), h_J>` plus the complementary mean line
/// `x -> <f(x, .)>`; together they reassemble `f` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceCoeffs {
    axis: Axis,
    grid: Grid2D,
    mean: Signal1D,
    slices: Vec<Signal1D>,
}

impl SliceCoeffs {
    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    /// The complementary mean line (a signal on the untransformed axis).
    pub fn mean(&self) -> &Signal1D {
        &self.mean
    }

    /// Slices in heap order over the transformed axis.
    pub fn slices(&self) -> &[Signal1D] {
        &self.slices
    }

    pub fn slice_at(&self, iv: &DyadicInterval) -> Result<&Signal1D> {
        let n = match self.axis {
            Axis::X => self.grid.n1(),
            Axis::Y => self.grid.n2(),
        };
        if iv.level() >= n {
            return Err(Error::InvalidParameter(format!(
                "{iv} has no slice at resolution {n}"
            )));
        }
        Ok(&self.slices[heap_offset(iv.level(), iv.index())])
    }

    /// Exact reconstruction from slices plus the mean line.
    pub fn reassemble(&self) -> Signal2D {
        let g = self.grid;
        match self.axis {
            Axis::Y => {
                let yc = g.y_cells();
                let mut values = vec![0.0; g.cells()];
                let mut det = vec![0.0; yc - 1];
                for ix in 0..g.x_cells() {
                    for (oy, s) in self.slices.iter().enumerate() {
                        det[oy] = s.values()[ix];
                    }
                    let row = inverse_raw(g.n2(), self.mean.values()[ix], &det);
                    values[ix * yc..(ix + 1) * yc].copy_from_slice(&row);
                }
                Signal2D::new(g, values).expect("finite")
            }
            Axis::X => {
                let (xc, yc) = (g.x_cells(), g.y_cells());
                let mut values = vec![0.0; g.cells()];
                let mut det = vec![0.0; xc - 1];
                for iy in 0..yc {
                    for (ox, s) in self.slices.iter().enumerate() {
                        det[ox] = s.values()[iy];
                    }
                    let col = inverse_raw(g.n1(), self.mean.values()[iy], &det);
                    for (ix, v) in col.into_iter().enumerate() {
                        values[ix * yc + iy] = v;
                    }
                }
                Signal2D::new(g, values).expect("finite")
            }
        }
    }
}

/// Haar-transform one axis of a 2D signal, leaving the other in cell space.
pub fn slice_transform(f: &Signal2D, axis: Axis) -> SliceCoeffs {
    let g = f.grid();
    match axis {
        Axis::Y => {
            let yc = g.y_cells();
            let mut mean_vals = vec![0.0; g.x_cells()];
            let mut det = vec![vec![0.0; g.x_cells()]; yc - 1];
            for ix in 0..g.x_cells() {
                let (m, d) = forward_raw(g.n2(), &f.values()[ix * yc..(ix + 1) * yc]);
                mean_vals[ix] = m;
                for (oy, v) in d.into_iter().enumerate() {
                    det[oy][ix] = v;
                }
            }
            SliceCoeffs {
                axis,
                grid: g,
                mean: Signal1D::new(g.x_axis(), mean_vals).expect("finite"),
                slices: det
                    .into_iter()
                    .map(|v| Signal1D::new(g.x_axis(), v).expect("finite"))
                    .collect(),
            }
        }
        Axis::X => {
            let (xc, yc) = (g.x_cells(), g.y_cells());
            let mut mean_vals = vec![0.0; yc];
            let mut det = vec![vec![0.0; yc]; xc - 1];
            let mut col = vec![0.0; xc];
            for iy in 0..yc {
                for (ix, slot) in col.iter_mut().enumerate() {
                    *slot = f.values()[ix * yc + iy];
                }
                let (m, d) = forward_raw(g.n1(), &col);
                mean_vals[iy] = m;
                for (ox, v) in d.into_iter().enumerate() {
                    det[ox][iy] = v;
                }
            }
            SliceCoeffs {
                axis,
                grid: g,
                mean: Signal1D::new(g.y_axis(), mean_vals).expect("finite"),
                slices: det
                    .into_iter()
                    .map(|v| Signal1D::new(g.y_axis(), v).expect("finite"))
                    .collect(),
            }
        }
    }
}

/// Averages of a 1D signal at every level, `levels[j][k] = <f>_{(j,k)}`.
#[derive(Debug, Clone)]
pub struct AvgPyramid1D {
    levels: Vec<Vec<f64>>,
}

impl AvgPyramid1D {
    pub fn build(f: &Signal1D) -> Self {
        let n = f.grid().resolution();
        let mut levels = vec![Vec::new(); (n + 1) as usize];
        levels[n as usize] = f.values().to_vec();
        for j in (0..n).rev() {
            let fine = &levels[(j + 1) as usize];
            let mut coarse = vec![0.0; 1 << j];
            for (k, c) in coarse.iter_mut().enumerate() {
                *c = 0.5 * (fine[2 * k] + fine[2 * k + 1]);
            }
            levels[j as usize] = coarse;
        }
        Self { levels }
    }

    pub fn avg(&self, level: u32, index: u64) -> f64 {
        self.levels[level as usize][index as usize]
    }

    pub fn level(&self, level: u32) -> &[f64] {
        &self.levels[level as usize]
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }
}

/// Averages of a 2D signal over every dyadic rectangle, all level pairs.
#[derive(Debug, Clone)]
pub struct AvgPyramid2D {
    n1: u32,
    n2: u32,
    // levels[jx * (n2 + 1) + jy][kx * 2^jy + ky]
    levels: Vec<Vec<f64>>,
}

impl AvgPyramid2D {
    pub fn build(f: &Signal2D) -> Self {
        let g = f.grid();
        let (n1, n2) = (g.n1(), g.n2());
        let stride = (n2 + 1) as usize;
        let mut levels = vec![Vec::new(); (n1 + 1) as usize * stride];

        levels[n1 as usize * stride + n2 as usize] = f.values().to_vec();
        // Reduce along y at the finest x-level.
        for jy in (0..n2).rev() {
            let fine = &levels[n1 as usize * stride + (jy + 1) as usize];
            let w = 1usize << (jy + 1);
            let mut coarse = vec![0.0; (1usize << n1) * (w / 2)];
            for kx in 0..1usize << n1 {
                for ky in 0..w / 2 {
                    coarse[kx * (w / 2) + ky] =
                        0.5 * (fine[kx * w + 2 * ky] + fine[kx * w + 2 * ky + 1]);
                }
            }
            levels[n1 as usize * stride + jy as usize] = coarse;
        }
        // Reduce along x at every y-level.
        for jy in 0..=n2 {
            for jx in (0..n1).rev() {
                let fine = &levels[(jx + 1) as usize * stride + jy as usize];
                let w = 1usize << jy;
                let mut coarse = vec![0.0; (1usize << jx) * w];
                for kx in 0..1usize << jx {
                    for ky in 0..w {
                        coarse[kx * w + ky] =
                            0.5 * (fine[2 * kx * w + ky] + fine[(2 * kx + 1) * w + ky]);
                    }
                }
                levels[jx as usize * stride + jy as usize] = coarse;
            }
        }
        Self { n1, n2, levels }
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    #[inline]
    pub fn avg(&self, jx: u32, jy: u32, kx: u64, ky: u64) -> f64 {
        let stride = (self.n2 + 1) as usize;
        self.levels[jx as usize * stride + jy as usize][(kx << jy | ky) as usize]
    }

    pub fn avg_rect(&self, r: &DyadicRectangle) -> f64 {
        self.avg(r.x.level(), r.y.level(), r.x.index(), r.y.index())
    }
}

/// Generalised coefficients `<f, u_I x v_J>` where each factor is either the
/// Haar function or the normalised indicator, read off an average pyramid.
#[derive(Debug, Clone)]
pub struct MixedPyramid {
    avg: AvgPyramid2D,
}

impl MixedPyramid {
    pub fn build(f: &Signal2D) -> Self {
        Self {
            avg: AvgPyramid2D::build(f),
        }
    }

    /// `<f>_{I x J}` for any levels up to the grid resolution.
    #[inline]
    pub fn avg_avg(&self, jx: u32, jy: u32, kx: u64, ky: u64) -> f64 {
        self.avg.avg(jx, jy, kx, ky)
    }

    /// `<f, h_I x chibar_J>`; requires `jx < n1`.
    #[inline]
    pub fn haar_avg(&self, jx: u32, jy: u32, kx: u64, ky: u64) -> f64 {
        let s = 0.5 * pow2_half(-(jx as i32));
        s * (self.avg.avg(jx + 1, jy, 2 * kx, ky) - self.avg.avg(jx + 1, jy, 2 * kx + 1, ky))
    }

    /// `<f, chibar_I x h_J>`; requires `jy < n2`.
    #[inline]
    pub fn avg_haar(&self, jx: u32, jy: u32, kx: u64, ky: u64) -> f64 {
        let s = 0.5 * pow2_half(-(jy as i32));
        s * (self.avg.avg(jx, jy + 1, kx, 2 * ky) - self.avg.avg(jx, jy + 1, kx, 2 * ky + 1))
    }

    /// `<f, h_I x h_J>`; requires `jx < n1`, `jy < n2`.
    #[inline]
    pub fn haar_haar(&self, jx: u32, jy: u32, kx: u64, ky: u64) -> f64 {
        let s = 0.25 * pow2_half(-(jx as i32)) * pow2_half(-(jy as i32));
        s * (self.avg.avg(jx + 1, jy + 1, 2 * kx, 2 * ky)
            - self.avg.avg(jx + 1, jy + 1, 2 * kx, 2 * ky + 1)
            - self.avg.avg(jx + 1, jy + 1, 2 * kx + 1, 2 * ky)
            + self.avg.avg(jx + 1, jy + 1, 2 * kx + 1, 2 * ky + 1))
    }

    pub fn avg_pyramid(&self) -> &AvgPyramid2D {
        &self.avg
    }
}

/// Per-cell sum of level-indexed contributions over all containing
/// intervals: `out[cell] = sum_{j < depth} per_level[j][cell >> (n - j)]`.
pub(crate) fn sum_over_ancestors(n: u32, per_level: &[Vec<f64>]) -> Vec<f64> {
    let depth = per_level.len() as u32;
    assert!(depth >= 1 && depth <= n + 1);
    let mut acc = per_level[0].clone();
    debug_assert_eq!(acc.len(), 1);
    for j in 1..depth {
        let cur = &per_level[j as usize];
        debug_assert_eq!(cur.len(), 1 << j);
        let mut next = vec![0.0; 1 << j];
        for (k, val) in next.iter_mut().enumerate() {
            *val = acc[k >> 1] + cur[k];
        }
        acc = next;
    }
    let shift = n + 1 - depth;
    (0..1usize << n).map(|c| acc[c >> shift]).collect()
}

/// Per-cell max-over-ancestors analogue of [`sum_over_ancestors`].
pub(crate) fn max_over_ancestors(n: u32, per_level: &[Vec<f64>]) -> Vec<f64> {
    let depth = per_level.len() as u32;
    assert!(depth >= 1 && depth <= n + 1);
    let mut acc = per_level[0].clone();
    for j in 1..depth {
        let cur = &per_level[j as usize];
        let mut next = vec![0.0; 1 << j];
        for (k, val) in next.iter_mut().enumerate() {
            *val = acc[k >> 1].max(cur[k]);
        }
        acc = next;
    }
    let shift = n + 1 - depth;
    (0..1usize << n).map(|c| acc[c >> shift]).collect()
}

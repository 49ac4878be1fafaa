//! Paraproducts on the interval and the square.
//!
//! A one-parameter paraproduct is determined by an exponent pair
//! `(e_f, e_g)` with `e = 1` selecting the Haar coefficient and `e = 0`
//! the normalized average; the output exponent is the mod-2 sum:
//!
//! ```text
//! para(f, g) = sum_I <f, h_I^{e_f}> <g, h_I^{e_g}> h_I^{e_f + e_g}
//! ```
//!
//! with `h_I^1 = h_I`, `h_I^0 = chi_I / |I|`, and `I` running over the
//! cancellative intervals. Bi-parameter forms take one pair per axis
//! (nine combinations). The classical operators with a frozen symbol are
//! wrappers over this engine:
//!
//! | name | signature | action |
//! |------|-----------|--------|
//! | `Pi1` | `(0,1),(0,1)` | `sum <f>_R g_R h_R` |
//! | `Pi1Adjoint` | `(1,1),(1,1)` | `sum f_R g_R chi_R / |R|` |
//! | `Pi2` | `(1,0),(1,0)` | `sum f_R <g>_R h_R` |
//! | `Pi3` | `(0,1),(1,0)` | `sum <f_J>_I <g_I>_J h_I x h_J` |
//! | `Pi4` | `(0,1),(1,1)` | `sum <f_J>_I g_R h_I x chi_J / |J|` |
//!
//! and on the line `PiG = (0,1)`, `PiGPrime = (1,1)`,
//! `PiGDoublePrime = (1,0)`. Adjoints swap the output exponent into the
//! `f` slot, so every adjoint is again a plain signature with the same
//! frozen symbol.
//!
//! Everything here is exact: the finite product expansions reproduce
//! `f * g` up to float rounding, and the engine agrees with the naive
//! quadruple sums tested against it.

use crate::dyadic::{Grid1D, Grid2D};
use crate::error::{Error, Result};
use crate::haar::{
    heap_offset, interval_from_offset, sum_over_ancestors, AvgPyramid1D, HaarCoeffs1D,
    HaarCoeffs2D, MixedPyramid,
};
use crate::signal::{Signal1D, Signal2D};
use crate::sums::pairwise_map_sum;
use std::fmt;
use std::str::FromStr;

/// Exponent pair for one axis; `(0,0)` is excluded because both factors
/// would be averages and the term is not a paraproduct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpsPair {
    f_bit: u8,
    g_bit: u8,
}

impl EpsPair {
    pub fn new(f_bit: u8, g_bit: u8) -> Result<Self> {
        if f_bit > 1 || g_bit > 1 {
            return Err(Error::InvalidParameter(format!(
                "exponents must be 0 or 1, got ({f_bit},{g_bit})"
            )));
        }
        if f_bit == 0 && g_bit == 0 {
            return Err(Error::InvalidParameter(
                "exponent pair (0,0) is not a paraproduct".into(),
            ));
        }
        Ok(EpsPair { f_bit, g_bit })
    }

    pub fn f_bit(&self) -> u8 {
        self.f_bit
    }

    pub fn g_bit(&self) -> u8 {
        self.g_bit
    }

    pub fn out_bit(&self) -> u8 {
        (self.f_bit + self.g_bit) % 2
    }

    /// Signature of the adjoint: the output exponent moves to the `f`
    /// slot and the symbol keeps its own.
    pub fn adjoint(&self) -> EpsPair {
        EpsPair {
            f_bit: self.out_bit(),
            g_bit: self.g_bit,
        }
    }

    pub fn all() -> [EpsPair; 3] {
        [
            EpsPair { f_bit: 0, g_bit: 1 },
            EpsPair { f_bit: 1, g_bit: 0 },
            EpsPair { f_bit: 1, g_bit: 1 },
        ]
    }
}

impl fmt::Display for EpsPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.f_bit, self.g_bit)
    }
}

impl FromStr for EpsPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        if bytes.len() != 2 || !bytes.iter().all(|b| *b == b'0' || *b == b'1') {
            return Err(Error::Malformed(format!(
                "exponent pair must be two binary digits, got {s:?}"
            )));
        }
        EpsPair::new(bytes[0] - b'0', bytes[1] - b'0')
    }
}

/// Bi-parameter signature: one exponent pair per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature2D {
    pub x: EpsPair,
    pub y: EpsPair,
}

impl Signature2D {
    pub fn new(x: EpsPair, y: EpsPair) -> Self {
        Signature2D { x, y }
    }

    pub fn adjoint(&self) -> Signature2D {
        Signature2D {
            x: self.x.adjoint(),
            y: self.y.adjoint(),
        }
    }

    /// The nine bi-parameter signatures in row-major exponent order.
    pub fn all() -> [Signature2D; 9] {
        let ps = EpsPair::all();
        let mut out = [Signature2D { x: ps[0], y: ps[0] }; 9];
        for (i, x) in ps.iter().enumerate() {
            for (j, y) in ps.iter().enumerate() {
                out[3 * i + j] = Signature2D { x: *x, y: *y };
            }
        }
        out
    }
}

impl fmt::Display for Signature2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl FromStr for Signature2D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (x, y) = s.split_once(',').ok_or_else(|| {
            Error::Malformed(format!("expected \"xx,yy\" exponent pattern, got {s:?}"))
        })?;
        Ok(Signature2D::new(x.parse()?, y.parse()?))
    }
}

/// Per-interval data for one exponent: Haar coefficients or averages,
/// indexed by heap offset over cancellative intervals.
fn channel_1d(f: &Signal1D, bit: u8) -> Vec<f64> {
    let count = f.grid().detail_count();
    if bit == 1 {
        HaarCoeffs1D::forward(f).detail().to_vec()
    } else {
        let p = AvgPyramid1D::build(f);
        (0..count)
            .map(|o| {
                let iv = interval_from_offset(o);
                p.avg(iv.level(), iv.index())
            })
            .collect()
    }
}

/// Turns per-interval values into cell values: Haar synthesis for
/// exponent 1, ancestor paint-down of `chi_I / |I|` for exponent 0.
fn synthesize_line(grid: Grid1D, vals: &[f64], out_bit: u8) -> Vec<f64> {
    let n = grid.resolution();
    if out_bit == 1 {
        HaarCoeffs1D::from_parts(grid, 0.0, vals.to_vec())
            .expect("heap-shaped detail")
            .inverse()
            .into_values()
    } else {
        let per_level: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let w = 2f64.powi(j as i32);
                (0..1u64 << j)
                    .map(|k| vals[heap_offset(j, k)] * w)
                    .collect()
            })
            .collect();
        sum_over_ancestors(n, &per_level)
    }
}

/// One-parameter paraproduct, exact over all cancellative intervals.
pub fn para_one(sig: EpsPair, f: &Signal1D, g: &Signal1D) -> Result<Signal1D> {
    f.check_same_grid(g)?;
    let grid = f.grid();
    let fc = channel_1d(f, sig.f_bit());
    let gc = channel_1d(g, sig.g_bit());
    let vals: Vec<f64> = fc.iter().zip(&gc).map(|(a, b)| a * b).collect();
    Signal1D::new(grid, synthesize_line(grid, &vals, sig.out_bit()))
}

fn mixed_value(p: &MixedPyramid, bx: u8, by: u8, jx: u32, jy: u32, kx: u64, ky: u64) -> f64 {
    match (bx, by) {
        (0, 0) => p.avg_avg(jx, jy, kx, ky),
        (1, 0) => p.haar_avg(jx, jy, kx, ky),
        (0, 1) => p.avg_haar(jx, jy, kx, ky),
        _ => p.haar_haar(jx, jy, kx, ky),
    }
}

/// Symbol-side per-rectangle values for a fixed exponent pair.
fn channel_2d(p: &MixedPyramid, grid: Grid2D, bx: u8, by: u8) -> Vec<f64> {
    let (xd, yd) = (grid.x_cells() - 1, grid.y_cells() - 1);
    let mut vals = vec![0.0; xd * yd];
    for ox in 0..xd {
        let i = interval_from_offset(ox);
        for oy in 0..yd {
            let j = interval_from_offset(oy);
            vals[ox * yd + oy] = mixed_value(p, bx, by, i.level(), j.level(), i.index(), j.index());
        }
    }
    vals
}

/// Core synthesis: per-rectangle values to a 2D signal, one pass in `y`
/// for every cancellative `I`, then one pass in `x` for every cell row.
fn synthesize_plane(grid: Grid2D, vals: &[f64], out_x: u8, out_y: u8) -> Signal2D {
    let (xd, yd) = (grid.x_cells() - 1, grid.y_cells() - 1);
    let mut profiles: Vec<Vec<f64>> = Vec::with_capacity(xd);
    for ox in 0..xd {
        let line = &vals[ox * yd..(ox + 1) * yd];
        profiles.push(synthesize_line(grid.y_axis(), line, out_y));
    }
    let mut out = vec![0.0; grid.cells()];
    let mut column = vec![0.0; xd];
    for iy in 0..grid.y_cells() {
        for (ox, prof) in profiles.iter().enumerate() {
            column[ox] = prof[iy];
        }
        let xline = synthesize_line(grid.x_axis(), &column, out_x);
        for (ix, v) in xline.iter().enumerate() {
            out[ix * grid.y_cells() + iy] = *v;
        }
    }
    Signal2D::new(grid, out).expect("finite synthesis")
}

fn para_two_with(sig: Signature2D, grid: Grid2D, fp: &MixedPyramid, g_vals: &[f64]) -> Signal2D {
    let f_vals = channel_2d(fp, grid, sig.x.f_bit(), sig.y.f_bit());
    let vals: Vec<f64> = f_vals.iter().zip(g_vals).map(|(a, b)| a * b).collect();
    synthesize_plane(grid, &vals, sig.x.out_bit(), sig.y.out_bit())
}

/// Bi-parameter paraproduct, exact over all cancellative rectangles.
pub fn para_two(sig: Signature2D, f: &Signal2D, g: &Signal2D) -> Result<Signal2D> {
    f.check_same_grid(g)?;
    let grid = f.grid();
    let fp = MixedPyramid::build(f);
    let gp = MixedPyramid::build(g);
    let g_vals = channel_2d(&gp, grid, sig.x.g_bit(), sig.y.g_bit());
    Ok(para_two_with(sig, grid, &fp, &g_vals))
}

/// One-parameter operators with a frozen symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind1D {
    /// `sum <f>_I g_I h_I`
    PiG,
    /// `sum f_I g_I chi_I / |I|`, the adjoint of `PiG`
    PiGPrime,
    /// `sum f_I <g>_I h_I`, self-adjoint
    PiGDoublePrime,
}

impl OperatorKind1D {
    pub fn signature(self) -> EpsPair {
        let (f, g) = match self {
            OperatorKind1D::PiG => (0, 1),
            OperatorKind1D::PiGPrime => (1, 1),
            OperatorKind1D::PiGDoublePrime => (1, 0),
        };
        EpsPair::new(f, g).expect("named signatures are valid")
    }
}

impl std::str::FromStr for OperatorKind1D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pig" => Ok(OperatorKind1D::PiG),
            "pigp" => Ok(OperatorKind1D::PiGPrime),
            "pigpp" => Ok(OperatorKind1D::PiGDoublePrime),
            other => Err(Error::InvalidParameter(format!(
                "unknown one-parameter operator token {other:?}"
            ))),
        }
    }
}

/// Bi-parameter operators with a frozen symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind2D {
    Pi1,
    Pi1Adjoint,
    Pi2,
    Pi3,
    Pi4,
}

impl OperatorKind2D {
    pub fn signature(self) -> Signature2D {
        let ((a, b), (c, d)) = match self {
            OperatorKind2D::Pi1 => ((0, 1), (0, 1)),
            OperatorKind2D::Pi1Adjoint => ((1, 1), (1, 1)),
            OperatorKind2D::Pi2 => ((1, 0), (1, 0)),
            OperatorKind2D::Pi3 => ((0, 1), (1, 0)),
            OperatorKind2D::Pi4 => ((0, 1), (1, 1)),
        };
        Signature2D::new(
            EpsPair::new(a, b).expect("named signatures are valid"),
            EpsPair::new(c, d).expect("named signatures are valid"),
        )
    }
}

impl std::str::FromStr for OperatorKind2D {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi1" => Ok(OperatorKind2D::Pi1),
            "pi1t" => Ok(OperatorKind2D::Pi1Adjoint),
            "pi2" => Ok(OperatorKind2D::Pi2),
            "pi3" => Ok(OperatorKind2D::Pi3),
            "pi4" => Ok(OperatorKind2D::Pi4),
            other => Err(Error::InvalidParameter(format!(
                "unknown two-parameter operator token {other:?}"
            ))),
        }
    }
}

/// A one-parameter operator with its symbol fixed at construction; the
/// symbol-side channel is precomputed so repeated application only pays
/// for the operand.
#[derive(Debug, Clone)]
pub struct NamedOperator1D {
    kind: OperatorKind1D,
    g: Signal1D,
    g_channel: Vec<f64>,
}

impl NamedOperator1D {
    pub fn new(kind: OperatorKind1D, g: Signal1D) -> Self {
        let g_channel = channel_1d(&g, kind.signature().g_bit());
        NamedOperator1D { kind, g, g_channel }
    }

    pub fn from_coeffs(kind: OperatorKind1D, g: HaarCoeffs1D) -> Self {
        Self::new(kind, g.inverse())
    }

    pub fn kind(&self) -> OperatorKind1D {
        self.kind
    }

    pub fn symbol(&self) -> &Signal1D {
        &self.g
    }

    fn run(&self, sig: EpsPair, f: &Signal1D) -> Result<Signal1D> {
        f.check_same_grid(&self.g)?;
        let fc = channel_1d(f, sig.f_bit());
        let vals: Vec<f64> = fc.iter().zip(&self.g_channel).map(|(a, b)| a * b).collect();
        Signal1D::new(f.grid(), synthesize_line(f.grid(), &vals, sig.out_bit()))
    }

    pub fn apply(&self, f: &Signal1D) -> Result<Signal1D> {
        self.run(self.kind.signature(), f)
    }

    pub fn adjoint_apply(&self, f: &Signal1D) -> Result<Signal1D> {
        self.run(self.kind.signature().adjoint(), f)
    }
}

/// A bi-parameter operator with its symbol fixed at construction.
#[derive(Debug, Clone)]
pub struct NamedOperator2D {
    kind: OperatorKind2D,
    g: Signal2D,
    g_channel: Vec<f64>,
}

impl NamedOperator2D {
    pub fn new(kind: OperatorKind2D, g: Signal2D) -> Self {
        let sig = kind.signature();
        let gp = MixedPyramid::build(&g);
        let g_channel = channel_2d(&gp, g.grid(), sig.x.g_bit(), sig.y.g_bit());
        NamedOperator2D { kind, g, g_channel }
    }

    pub fn from_coeffs(kind: OperatorKind2D, g: HaarCoeffs2D) -> Self {
        Self::new(kind, g.inverse())
    }

    pub fn kind(&self) -> OperatorKind2D {
        self.kind
    }

    pub fn symbol(&self) -> &Signal2D {
        &self.g
    }

    fn run(&self, sig: Signature2D, f: &Signal2D) -> Result<Signal2D> {
        f.check_same_grid(&self.g)?;
        let fp = MixedPyramid::build(f);
        Ok(para_two_with(sig, f.grid(), &fp, &self.g_channel))
    }

    pub fn apply(&self, f: &Signal2D) -> Result<Signal2D> {
        self.run(self.kind.signature(), f)
    }

    pub fn adjoint_apply(&self, f: &Signal2D) -> Result<Signal2D> {
        self.run(self.kind.signature().adjoint(), f)
    }
}

/// `(<T f, f'>, <f, T* f'>)`; the two numbers agree up to rounding.
pub fn adjoint_pair_check_1d(
    op: &NamedOperator1D,
    f: &Signal1D,
    fp: &Signal1D,
) -> Result<(f64, f64)> {
    let a = op.apply(f)?.inner_product(fp)?;
    let b = f.inner_product(&op.adjoint_apply(fp)?)?;
    Ok((a, b))
}

/// `(<T f, f'>, <f, T* f'>)` for most operators; for `Pi4` the pair is
/// the cross identity `(<Pi4_g f, f'>, <Pi3_{f'} f, g>)`, which moves
/// the symbol rather than transposing the signature.
pub fn adjoint_pair_check_2d(
    op: &NamedOperator2D,
    f: &Signal2D,
    fp: &Signal2D,
) -> Result<(f64, f64)> {
    if op.kind() == OperatorKind2D::Pi4 {
        let a = op.apply(f)?.inner_product(fp)?;
        let cross = NamedOperator2D::new(OperatorKind2D::Pi3, fp.clone());
        let b = cross.apply(f)?.inner_product(op.symbol())?;
        return Ok((a, b));
    }
    let a = op.apply(f)?.inner_product(fp)?;
    let b = f.inner_product(&op.adjoint_apply(fp)?)?;
    Ok((a, b))
}

/// Residual of the transpose identity for `Pi4` with a coefficient-
/// symmetric symbol on a square grid: applying the adjoint to the
/// transposed operand reproduces the transposed image.
pub fn transpose_symmetry_check(g: &HaarCoeffs2D, f: &Signal2D) -> Result<f64> {
    let grid = g.grid();
    if grid.n1() != grid.n2() {
        return Err(Error::DimensionMismatch(format!(
            "transpose symmetry needs a square grid, got ({}, {})",
            grid.n1(),
            grid.n2()
        )));
    }
    if f.grid() != grid {
        return Err(Error::GridMismatch(format!(
            "operand on {:?}, symbol on {:?}",
            f.grid(),
            grid
        )));
    }
    let gt = g.transposed();
    let scale = g.cc().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in g.cc().iter().zip(gt.cc()) {
        if (a - b).abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidParameter(
                "symmetry precondition violated: symbol coefficients are not transpose-symmetric"
                    .into(),
            ));
        }
    }
    let op = NamedOperator2D::from_coeffs(OperatorKind2D::Pi4, g.clone());
    let lhs = op.adjoint_apply(&f.transposed())?.transposed();
    let rhs = op.apply(f)?;
    lhs.linf_diff(&rhs)
}

/// Average over `x` of every finest row, as a signal on the `y` axis.
fn x_mean_profile(f: &Signal2D) -> Signal1D {
    let g = f.grid();
    let vals: Vec<f64> = (0..g.y_cells())
        .map(|iy| {
            pairwise_map_sum(g.x_cells(), &|ix| f.values()[ix * g.y_cells() + iy])
                / g.x_cells() as f64
        })
        .collect();
    Signal1D::new(g.y_axis(), vals).expect("finite averages")
}

/// Average over `y` of every finest column, as a signal on the `x` axis.
fn y_mean_profile(f: &Signal2D) -> Signal1D {
    let g = f.grid();
    let vals: Vec<f64> = (0..g.x_cells())
        .map(|ix| {
            pairwise_map_sum(g.y_cells(), &|iy| f.values()[ix * g.y_cells() + iy])
                / g.y_cells() as f64
        })
        .collect();
    Signal1D::new(g.x_axis(), vals).expect("finite averages")
}

/// The three paraproducts plus the product of means; equals `f * g`
/// exactly on the interval.
pub fn product_expansion_1d(f: &Signal1D, g: &Signal1D) -> Result<Signal1D> {
    f.check_same_grid(g)?;
    let mut acc = Signal1D::constant(f.grid(), f.mean() * g.mean());
    for sig in EpsPair::all() {
        acc = acc.add(&para_one(sig, f, g)?)?;
    }
    Ok(acc)
}

/// Max deviation of the expansion from the pointwise product.
pub fn product_expansion_residual_1d(f: &Signal1D, g: &Signal1D) -> Result<f64> {
    product_expansion_1d(f, g)?.linf_diff(&f.mul(g)?)
}

/// The nine paraproducts plus the mean-block corrections: the product of
/// the `x`-mean profiles, plus the product of the `y`-mean profiles,
/// minus the doubly counted product of global means. Equals `f * g`
/// exactly on the square.
pub fn product_expansion_2d(f: &Signal2D, g: &Signal2D) -> Result<Signal2D> {
    f.check_same_grid(g)?;
    let grid = f.grid();
    let mut acc = Signal2D::constant(grid, -f.mean() * g.mean());
    for sig in Signature2D::all() {
        acc = acc.add(&para_two(sig, f, g)?)?;
    }
    let row_term = Signal2D::from_tensor(
        &Signal1D::constant(grid.x_axis(), 1.0),
        &x_mean_profile(f).mul(&x_mean_profile(g))?,
    )?;
    let col_term = Signal2D::from_tensor(
        &y_mean_profile(f).mul(&y_mean_profile(g))?,
        &Signal1D::constant(grid.y_axis(), 1.0),
    )?;
    acc.add(&row_term)?.add(&col_term)
}

/// Max deviation of the 2D expansion from the pointwise product.
pub fn product_expansion_residual_2d(f: &Signal2D, g: &Signal2D) -> Result<f64> {
    product_expansion_2d(f, g)?.linf_diff(&f.mul(g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{DyadicInterval, DyadicRectangle};
    use crate::functionals::{maximal_1d, mixed_operator, square_2d, strong_maximal_2d, MixedKind};
    use crate::testutil::*;
    use proptest::prelude::*;

    fn naive_para_one(sig: EpsPair, f: &Signal1D, g: &Signal1D) -> Signal1D {
        let grid = f.grid();
        let n = grid.resolution();
        let mut out = vec![0.0; grid.cells()];
        for iv in crate::dyadic::cancellative_intervals(n) {
            let fv = if sig.f_bit() == 1 {
                naive_haar_coeff_1d(f, &iv)
            } else {
                f.average_over(&iv).unwrap()
            };
            let gv = if sig.g_bit() == 1 {
                naive_haar_coeff_1d(g, &iv)
            } else {
                g.average_over(&iv).unwrap()
            };
            for cell in 0..grid.cells() as u64 {
                let basis = if sig.out_bit() == 1 {
                    haar_cell_value(&iv, cell, n)
                } else if iv.contains(&DyadicInterval::new(n, cell).unwrap()) {
                    1.0 / iv.measure()
                } else {
                    0.0
                };
                out[cell as usize] += fv * gv * basis;
            }
        }
        Signal1D::new(grid, out).unwrap()
    }

    fn naive_para_two(sig: Signature2D, f: &Signal2D, g: &Signal2D) -> Signal2D {
        let grid = f.grid();
        let (n1, n2) = (grid.n1(), grid.n2());
        let mut out = vec![0.0; grid.cells()];
        let channel = |h: &Signal2D, bx: u8, by: u8, jx: u32, kx: u64, jy: u32, ky: u64| {
            let r = DyadicRectangle::from_parts(jx, kx, jy, ky).unwrap();
            match (bx, by) {
                (0, 0) => h.average_over(&r).unwrap(),
                (1, 0) => naive_mixed_haar_avg(h, jx, kx, jy, ky),
                (0, 1) => naive_mixed_avg_haar(h, jx, kx, jy, ky),
                _ => naive_cc_coeff_2d(h, &r),
            }
        };
        for jx in 0..n1 {
            for kx in 0..1u64 << jx {
                let i = DyadicInterval::new(jx, kx).unwrap();
                for jy in 0..n2 {
                    for ky in 0..1u64 << jy {
                        let j = DyadicInterval::new(jy, ky).unwrap();
                        let fv = channel(f, sig.x.f_bit(), sig.y.f_bit(), jx, kx, jy, ky);
                        let gv = channel(g, sig.x.g_bit(), sig.y.g_bit(), jx, kx, jy, ky);
                        for cx in 0..grid.x_cells() as u64 {
                            let bx = if sig.x.out_bit() == 1 {
                                haar_cell_value(&i, cx, n1)
                            } else if i.contains(&DyadicInterval::new(n1, cx).unwrap()) {
                                1.0 / i.measure()
                            } else {
                                0.0
                            };
                            if bx == 0.0 {
                                continue;
                            }
                            for cy in 0..grid.y_cells() as u64 {
                                let by = if sig.y.out_bit() == 1 {
                                    haar_cell_value(&j, cy, n2)
                                } else if j.contains(&DyadicInterval::new(n2, cy).unwrap()) {
                                    1.0 / j.measure()
                                } else {
                                    0.0
                                };
                                out[cx as usize * grid.y_cells() + cy as usize] +=
                                    fv * gv * bx * by;
                            }
                        }
                    }
                }
            }
        }
        Signal2D::new(grid, out).unwrap()
    }

    #[test]
    fn signature_parsing_and_adjoints() {
        let p: EpsPair = "01".parse().unwrap();
        assert_eq!(p, EpsPair::new(0, 1).unwrap());
        assert_eq!(p.out_bit(), 1);
        assert_eq!(p.adjoint(), EpsPair::new(1, 1).unwrap());
        assert_eq!(p.adjoint().adjoint(), p);
        assert!("00".parse::<EpsPair>().is_err());
        assert!("2x".parse::<EpsPair>().is_err());

        let s: Signature2D = "01,11".parse().unwrap();
        assert_eq!(s, OperatorKind2D::Pi4.signature());
        assert_eq!(s.adjoint().to_string(), "11,01");
        assert_eq!(Signature2D::all().len(), 9);
    }

    #[test]
    fn named_signature_table() {
        use OperatorKind2D::*;
        assert_eq!(Pi1.signature().to_string(), "01,01");
        assert_eq!(Pi1.signature().adjoint(), Pi1Adjoint.signature());
        assert_eq!(Pi1Adjoint.signature().adjoint(), Pi1.signature());
        assert_eq!(Pi2.signature().adjoint(), Pi2.signature());
        assert_eq!(Pi3.signature().adjoint().to_string(), "11,10");
        assert_eq!(Pi4.signature().adjoint().to_string(), "11,01");
        assert_eq!(
            OperatorKind1D::PiG.signature().adjoint(),
            OperatorKind1D::PiGPrime.signature()
        );
        assert_eq!(
            OperatorKind1D::PiGDoublePrime.signature().adjoint(),
            OperatorKind1D::PiGDoublePrime.signature()
        );
    }

    #[test]
    fn para_one_textbook_cases() {
        let grid = crate::dyadic::Grid1D::new(3).unwrap();
        let one = Signal1D::constant(grid, 1.0);
        let root = haar_signal_1d(grid, &DyadicInterval::root());

        // Averaging a constant leaves only the symbol's coefficients.
        let got = para_one(EpsPair::new(0, 1).unwrap(), &one, &root).unwrap();
        assert!(got.linf_diff(&root).unwrap() < 1e-12);

        // Two root Haar factors collapse to the constant 1.
        let got = para_one(EpsPair::new(1, 1).unwrap(), &root, &root).unwrap();
        assert!(got.linf_diff(&one).unwrap() < 1e-12);
    }

    #[test]
    fn para_one_matches_naive_sum() {
        let mut r = rng(301);
        let grid = crate::dyadic::Grid1D::new(4).unwrap();
        for _ in 0..3 {
            let f = random_signal_1d(grid, &mut r);
            let g = random_signal_1d(grid, &mut r);
            for sig in EpsPair::all() {
                let fast = para_one(sig, &f, &g).unwrap();
                let slow = naive_para_one(sig, &f, &g);
                assert!(fast.linf_diff(&slow).unwrap() < 1e-11, "signature {sig}");
            }
        }
    }

    #[test]
    fn para_two_textbook_cases() {
        let grid = Grid2D::new(3, 2).unwrap();
        let one = Signal2D::constant(grid, 1.0);
        let r0 = DyadicRectangle::from_parts(1, 0, 1, 1).unwrap();
        let hr = haar_signal_2d(grid, &r0);

        let got = para_two(OperatorKind2D::Pi1.signature(), &one, &hr).unwrap();
        assert!(got.linf_diff(&hr).unwrap() < 1e-12);

        // Tensor factors landing in a single surviving term.
        let i0 = DyadicInterval::new(1, 1).unwrap();
        let j0 = DyadicInterval::new(1, 0).unwrap();
        let f = Signal2D::from_tensor(
            &Signal1D::constant(grid.x_axis(), 1.0),
            &haar_signal_1d(grid.y_axis(), &j0),
        )
        .unwrap();
        let g = Signal2D::from_tensor(
            &haar_signal_1d(grid.x_axis(), &i0),
            &Signal1D::constant(grid.y_axis(), 1.0),
        )
        .unwrap();
        let want = Signal2D::from_tensor(
            &haar_signal_1d(grid.x_axis(), &i0),
            &haar_signal_1d(grid.y_axis(), &j0),
        )
        .unwrap();
        let got = para_two(OperatorKind2D::Pi3.signature(), &f, &g).unwrap();
        assert!(got.linf_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn para_two_matches_naive_sum_all_signatures() {
        let mut r = rng(307);
        let grid = Grid2D::new(2, 3).unwrap();
        let f = random_signal_2d(grid, &mut r);
        let g = random_signal_2d(grid, &mut r);
        for sig in Signature2D::all() {
            let fast = para_two(sig, &f, &g).unwrap();
            let slow = naive_para_two(sig, &f, &g);
            assert!(fast.linf_diff(&slow).unwrap() < 1e-10, "signature {sig}");
        }
    }

    #[test]
    fn product_expansion_1d_is_exact() {
        let mut r = rng(311);
        let grid = crate::dyadic::Grid1D::new(6).unwrap();
        for _ in 0..5 {
            let f = random_signal_1d(grid, &mut r);
            let g = random_signal_1d(grid, &mut r);
            assert!(product_expansion_residual_1d(&f, &g).unwrap() < 1e-10);
        }
    }

    #[test]
    fn product_expansion_2d_is_exact() {
        let mut r = rng(313);
        let grid = Grid2D::new(4, 4).unwrap();
        for _ in 0..3 {
            let f = random_signal_2d(grid, &mut r);
            let g = random_signal_2d(grid, &mut r);
            assert!(product_expansion_residual_2d(&f, &g).unwrap() < 1e-10);
        }
    }

    #[test]
    fn named_operator_examples() {
        let mut r = rng(317);
        let grid = Grid2D::new(3, 3).unwrap();
        let f = random_signal_2d(grid, &mut r);

        // Pi2 with constant symbol: keeps exactly the cc block.
        let op = NamedOperator2D::new(OperatorKind2D::Pi2, Signal2D::constant(grid, 1.0));
        let got = op.apply(&f).unwrap();
        let c = HaarCoeffs2D::forward(&f);
        let mut cc_only = HaarCoeffs2D::zeros(grid);
        cc_only.cc_mut().copy_from_slice(c.cc());
        assert!(got.linf_diff(&cc_only.inverse()).unwrap() < 1e-11);

        // Pi4 single-term case.
        let i0 = DyadicInterval::new(1, 1).unwrap();
        let j0 = DyadicInterval::new(2, 1).unwrap();
        let g = Signal2D::from_tensor(
            &haar_signal_1d(grid.x_axis(), &i0),
            &haar_signal_1d(grid.y_axis(), &j0),
        )
        .unwrap();
        let f = Signal2D::from_tensor(
            &Signal1D::constant(grid.x_axis(), 1.0),
            &haar_signal_1d(grid.y_axis(), &j0),
        )
        .unwrap();
        let op = NamedOperator2D::new(OperatorKind2D::Pi4, g);
        let got = op.apply(&f).unwrap();
        let indicator_j0 = Signal1D::new(
            grid.y_axis(),
            (0..grid.y_cells() as u64)
                .map(|cy| {
                    if j0.contains(&DyadicInterval::new(3, cy).unwrap()) {
                        1.0 / j0.measure()
                    } else {
                        0.0
                    }
                })
                .collect(),
        )
        .unwrap();
        let want =
            Signal2D::from_tensor(&haar_signal_1d(grid.x_axis(), &i0), &indicator_j0).unwrap();
        assert!(got.linf_diff(&want).unwrap() < 1e-12);

        // Constant 1D symbol scales the oscillatory part.
        let g1 = crate::dyadic::Grid1D::new(4).unwrap();
        let f1 = random_signal_1d(g1, &mut r);
        let op = NamedOperator1D::new(OperatorKind1D::PiGDoublePrime, Signal1D::constant(g1, 3.0));
        let got = op.apply(&f1).unwrap();
        let want = f1
            .sub(&Signal1D::constant(g1, f1.mean()))
            .unwrap()
            .scaled(3.0);
        assert!(got.linf_diff(&want).unwrap() < 1e-11);
    }

    #[test]
    fn named_operators_agree_with_engine() {
        let mut r = rng(331);
        let grid = Grid2D::new(3, 2).unwrap();
        let f = random_signal_2d(grid, &mut r);
        let g = random_signal_2d(grid, &mut r);
        for kind in [
            OperatorKind2D::Pi1,
            OperatorKind2D::Pi1Adjoint,
            OperatorKind2D::Pi2,
            OperatorKind2D::Pi3,
            OperatorKind2D::Pi4,
        ] {
            let op = NamedOperator2D::new(kind, g.clone());
            let direct = para_two(kind.signature(), &f, &g).unwrap();
            assert!(op.apply(&f).unwrap().linf_diff(&direct).unwrap() < 1e-12);
        }
    }

    #[test]
    fn adjoint_pairs_agree() {
        let mut r = rng(337);
        let g1 = crate::dyadic::Grid1D::new(6).unwrap();
        for kind in [
            OperatorKind1D::PiG,
            OperatorKind1D::PiGPrime,
            OperatorKind1D::PiGDoublePrime,
        ] {
            let op = NamedOperator1D::new(kind, random_signal_1d(g1, &mut r));
            let f = random_signal_1d(g1, &mut r);
            let fp = random_signal_1d(g1, &mut r);
            let (a, b) = adjoint_pair_check_1d(&op, &f, &fp).unwrap();
            assert!(
                (a - b).abs() < 1e-10 * a.abs().max(1.0),
                "{kind:?}: {a} vs {b}"
            );
        }

        let g2 = Grid2D::new(3, 3).unwrap();
        for kind in [
            OperatorKind2D::Pi1,
            OperatorKind2D::Pi1Adjoint,
            OperatorKind2D::Pi2,
            OperatorKind2D::Pi3,
            OperatorKind2D::Pi4,
        ] {
            let op = NamedOperator2D::new(kind, random_signal_2d(g2, &mut r));
            let f = random_signal_2d(g2, &mut r);
            let fp = random_signal_2d(g2, &mut r);
            let (a, b) = adjoint_pair_check_2d(&op, &f, &fp).unwrap();
            assert!(
                (a - b).abs() < 1e-10 * a.abs().max(1.0),
                "{kind:?}: {a} vs {b}"
            );
        }

        // Zero pairing partner.
        let op = NamedOperator2D::new(OperatorKind2D::Pi1, random_signal_2d(g2, &mut r));
        let f = random_signal_2d(g2, &mut r);
        let (a, b) = adjoint_pair_check_2d(&op, &f, &Signal2D::zeros(g2)).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
    }

    #[test]
    fn transpose_symmetry() {
        let mut r = rng(347);
        let grid = Grid2D::new(3, 3).unwrap();

        // Symmetric tensor symbol.
        let i0 = DyadicInterval::new(1, 0).unwrap();
        let sym = Signal2D::from_tensor(
            &haar_signal_1d(grid.x_axis(), &i0),
            &haar_signal_1d(grid.y_axis(), &i0),
        )
        .unwrap();
        let f = random_signal_2d(grid, &mut r);
        let res = transpose_symmetry_check(&HaarCoeffs2D::forward(&sym), &f).unwrap();
        assert!(res < 1e-10, "residual {res}");

        // Symmetrized random symbol.
        let raw = HaarCoeffs2D::forward(&random_signal_2d(grid, &mut r));
        let rt = raw.transposed();
        let mut both = HaarCoeffs2D::zeros(grid);
        for i in 0..both.cc().len() {
            both.cc_mut()[i] = 0.5 * (raw.cc()[i] + rt.cc()[i]);
        }
        let res = transpose_symmetry_check(&both, &f).unwrap();
        assert!(res < 1e-10, "residual {res}");

        // Asymmetric symbol is refused.
        let asym = HaarCoeffs2D::forward(&random_signal_2d(grid, &mut r));
        assert!(matches!(
            transpose_symmetry_check(&asym, &f),
            Err(Error::InvalidParameter(_))
        ));

        // Zero symbol: zero residual.
        let res = transpose_symmetry_check(&HaarCoeffs2D::zeros(grid), &f).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn pointwise_domination_pi2() {
        let mut r = rng(353);
        let grid = Grid2D::new(3, 3).unwrap();
        for _ in 0..10 {
            let f = random_signal_2d(grid, &mut r);
            let g = random_signal_2d(grid, &mut r);
            let op = NamedOperator2D::new(OperatorKind2D::Pi2, g.clone());
            let s_out = square_2d(&op.apply(&f).unwrap());
            let bound_a = square_2d(&f);
            let bound_b = strong_maximal_2d(&g);
            for i in 0..grid.cells() {
                let lhs = s_out.values()[i];
                let rhs = bound_a.values()[i] * bound_b.values()[i];
                assert!(
                    lhs <= rhs * (1.0 + 1e-12) + 1e-12,
                    "cell {i}: {lhs} > {rhs}"
                );
            }
        }
    }

    #[test]
    fn pointwise_domination_pi3() {
        let mut r = rng(359);
        let grid = Grid2D::new(3, 3).unwrap();
        for _ in 0..10 {
            let f = random_signal_2d(grid, &mut r);
            let g = random_signal_2d(grid, &mut r);
            let op = NamedOperator2D::new(OperatorKind2D::Pi3, g.clone());
            let s_out = square_2d(&op.apply(&f).unwrap());
            let bound_a = mixed_operator(&f, MixedKind::S2M1);
            let bound_b = mixed_operator(&g, MixedKind::M2S1);
            for i in 0..grid.cells() {
                let lhs = s_out.values()[i];
                let rhs = bound_a.values()[i] * bound_b.values()[i];
                assert!(
                    lhs <= rhs * (1.0 + 1e-12) + 1e-12,
                    "cell {i}: {lhs} > {rhs}"
                );
            }
        }
    }

    #[test]
    fn pi3_image_stays_inside_tensor_support() {
        let mut r = rng(367);
        let grid = Grid2D::new(3, 3).unwrap();
        let r0 = DyadicRectangle::from_parts(1, 1, 1, 0).unwrap();
        let f = haar_signal_2d(grid, &r0);
        for kind in [OperatorKind2D::Pi3, OperatorKind2D::Pi4] {
            let op = NamedOperator2D::new(kind, random_signal_2d(grid, &mut r));
            let img = op.apply(&f).unwrap();
            for ix in 0..grid.x_cells() as u64 {
                for iy in 0..grid.y_cells() as u64 {
                    let inside = r0.x.contains(&DyadicInterval::new(3, ix).unwrap())
                        && r0.y.contains(&DyadicInterval::new(3, iy).unwrap());
                    if !inside {
                        assert!(
                            img.value(ix, iy).abs() < 1e-12,
                            "{kind:?} leaked outside the support"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn maximal_bound_consistency_for_named_1d() {
        // PiG output coefficient at I is <f>_I g_I, so its square function
        // is bounded by M(f) S(g) pointwise.
        let mut r = rng(373);
        let g1 = crate::dyadic::Grid1D::new(5).unwrap();
        let f = random_signal_1d(g1, &mut r);
        let g = random_signal_1d(g1, &mut r);
        let op = NamedOperator1D::new(OperatorKind1D::PiG, g.clone());
        let s_out = crate::functionals::square_1d(&op.apply(&f).unwrap());
        let mf = maximal_1d(&f);
        let sg = crate::functionals::square_1d(&g);
        for i in 0..g1.cells() {
            assert!(s_out.values()[i] <= mf.values()[i] * sg.values()[i] * (1.0 + 1e-12) + 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_expansion_1d(fv in prop::collection::vec(-8.0f64..8.0, 16),
                             gv in prop::collection::vec(-8.0f64..8.0, 16)) {
            let grid = crate::dyadic::Grid1D::new(4).unwrap();
            let f = Signal1D::new(grid, fv).unwrap();
            let g = Signal1D::new(grid, gv).unwrap();
            prop_assert!(product_expansion_residual_1d(&f, &g).unwrap() < 1e-10);
        }

        #[test]
        fn prop_para_linear_in_f(av in prop::collection::vec(-4.0f64..4.0, 16),
                                 bv in prop::collection::vec(-4.0f64..4.0, 16),
                                 gv in prop::collection::vec(-4.0f64..4.0, 16),
                                 s in -3.0f64..3.0) {
            let grid = crate::dyadic::Grid1D::new(4).unwrap();
            let a = Signal1D::new(grid, av).unwrap();
            let b = Signal1D::new(grid, bv).unwrap();
            let g = Signal1D::new(grid, gv).unwrap();
            for sig in EpsPair::all() {
                let lhs = para_one(sig, &a.scaled(s).add(&b).unwrap(), &g).unwrap();
                let rhs = para_one(sig, &a, &g).unwrap().scaled(s)
                    .add(&para_one(sig, &b, &g).unwrap()).unwrap();
                prop_assert!(lhs.linf_diff(&rhs).unwrap() < 1e-9);
            }
        }

        #[test]
        fn prop_adjoint_identity_2d(fv in prop::collection::vec(-4.0f64..4.0, 16),
                                    pv in prop::collection::vec(-4.0f64..4.0, 16),
                                    gv in prop::collection::vec(-4.0f64..4.0, 16)) {
            let grid = Grid2D::new(2, 2).unwrap();
            let f = Signal2D::new(grid, fv).unwrap();
            let fp = Signal2D::new(grid, pv).unwrap();
            let g = Signal2D::new(grid, gv).unwrap();
            for sig in Signature2D::all() {
                let a = para_two(sig, &f, &g).unwrap().inner_product(&fp).unwrap();
                let b = f.inner_product(&para_two(sig.adjoint(), &fp, &g).unwrap()).unwrap();
                prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
            }
        }
    }
}

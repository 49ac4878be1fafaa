//! Square functions, maximal functions, and the norm family built on them.
//!
//! Pointwise functionals:
//!
//! - `maximal_1d`: `M(f)(x) = sup |<f>_I|` over dyadic `I` containing `x`
//!   (all levels `0..=n`, so the cell value itself participates);
//! - `strong_maximal_2d`: the same sup over dyadic rectangles, all level
//!   pairs;
//! - `square_1d` / `square_2d`: `S(f) = (sum <f,h_I>^2 chi_I/|I|)^{1/2}`
//!   over cancellative intervals (rectangles), so only the cc block enters
//!   in 2D;
//! - `mixed_operator`: the four square/maximal compositions, e.g.
//!   `S2M1(f)(x,y) = (sum_J M(f_J)^2(x) chi_J(y)/|J|)^{1/2}` where `f_J` is
//!   the y-slice coefficient line.
//!
//! Scalar norms are dispatched through [`NormKind`]: plain `L^p`
//! (quasi-norms computed literally for `p < 1`), square- and maximal-based
//! Hardy norms, line BMO, product BMO (exact by subset enumeration on tiny
//! grids, otherwise a documented candidate-family heuristic), and the two
//! slice-wise mixed norms.
//!
//! The `_eps` variants thread a smoothing constant into every square root;
//! the ratio-ascent search in the opnorm module uses them to keep
//! finite-difference gradients stable near zeros. Public entry points use
//! `eps = 0` and are exact.

use crate::error::{Error, Result};
use crate::haar::{
    heap_offset, interval_from_offset, max_over_ancestors, slice_transform, sum_over_ancestors,
    AvgPyramid1D, AvgPyramid2D, Axis, HaarCoeffs1D, HaarCoeffs2D,
};
use crate::signal::{Signal1D, Signal2D};
use crate::sparse::{level_set_rectangles, sparse_extract};
use crate::sums::pairwise_map_sum;

/// Norm selector. `p`-type parameters must be positive; only `Lp` accepts
/// infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Lp(f64),
    HpSquare(f64),
    HpMaximal(f64),
    BmoLine,
    ProductBmoExact,
    ProductBmoHeuristic,
    SliceBmoSup,
    SliceHrLr(f64),
}

impl NormKind {
    fn check_exponent(p: f64, allow_inf: bool) -> Result<()> {
        if p.is_nan() || p <= 0.0 || (!allow_inf && p.is_infinite()) {
            return Err(Error::InvalidParameter(format!("exponent {p}")));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NormKind::Lp(p) => Self::check_exponent(p, true),
            NormKind::HpSquare(p) | NormKind::HpMaximal(p) | NormKind::SliceHrLr(p) => {
                Self::check_exponent(p, false)
            }
            _ => Ok(()),
        }
    }
}

/// Resolves a norm token like `hp-square` or `hp-square:1.5`. An inline
/// exponent wins over `p`; `r` only feeds `slice-hr-lr`. Kinds that take
/// no exponent ignore both.
pub fn parse_norm_kind(token: &str, p: Option<f64>, r: Option<f64>) -> Result<NormKind> {
    let (name, inline) = match token.split_once(':') {
        Some((n, x)) => {
            let v: f64 = x.parse().map_err(|_| {
                Error::InvalidParameter(format!("bad exponent {x:?} in norm spec {token:?}"))
            })?;
            (n, Some(v))
        }
        None => (token, None),
    };
    let exponent = |fallback: Option<f64>| -> Result<f64> {
        inline.or(fallback).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "norm kind {name:?} needs an exponent, inline as {name}:<value> or given separately"
            ))
        })
    };
    match name {
        "lp" => Ok(NormKind::Lp(exponent(p)?)),
        "hp-square" => Ok(NormKind::HpSquare(exponent(p)?)),
        "hp-maximal" => Ok(NormKind::HpMaximal(exponent(p)?)),
        "bmo-line" => Ok(NormKind::BmoLine),
        "product-bmo-exact" => Ok(NormKind::ProductBmoExact),
        "product-bmo-heuristic" => Ok(NormKind::ProductBmoHeuristic),
        "slice-bmo-sup" => Ok(NormKind::SliceBmoSup),
        "slice-hr-lr" => Ok(NormKind::SliceHrLr(exponent(r.or(p))?)),
        other => Err(Error::InvalidParameter(format!(
            "unknown norm kind {other:?}"
        ))),
    }
}

/// `(sum |v|^p m)^{1/p}`, or `max |v|` for `p = inf`.
fn lp_of_values(values: &[f64], cell_measure: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let s = pairwise_map_sum(values.len(), &|i| values[i].abs().powf(p)) * cell_measure;
    s.powf(1.0 / p)
}

pub fn lp_norm_1d(f: &Signal1D, p: f64) -> Result<f64> {
    NormKind::Lp(p).validate()?;
    Ok(lp_of_values(f.values(), f.grid().cell_measure(), p))
}

pub fn lp_norm_2d(f: &Signal2D, p: f64) -> Result<f64> {
    NormKind::Lp(p).validate()?;
    Ok(lp_of_values(f.values(), f.grid().cell_measure(), p))
}

/// Dyadic maximal function over all containing intervals (levels `0..=n`).
pub fn maximal_1d(f: &Signal1D) -> Signal1D {
    let n = f.grid().resolution();
    let pyr = AvgPyramid1D::build(f);
    let per_level: Vec<Vec<f64>> = (0..=n)
        .map(|j| pyr.level(j).iter().map(|v| v.abs()).collect())
        .collect();
    Signal1D::new(f.grid(), max_over_ancestors(n, &per_level)).expect("finite")
}

/// Strong maximal function: sup of `|<f>_R|` over all dyadic rectangles
/// containing the point, every level pair.
pub fn strong_maximal_2d(f: &Signal2D) -> Signal2D {
    let g = f.grid();
    let (n1, n2) = (g.n1(), g.n2());
    let pyr = AvgPyramid2D::build(f);
    let mut out = vec![0.0f64; g.cells()];
    for jx in 0..=n1 {
        for jy in 0..=n2 {
            let sx = n1 - jx;
            let sy = n2 - jy;
            for ix in 0..g.x_cells() as u64 {
                let kx = ix >> sx;
                let row = ix as usize * g.y_cells();
                for iy in 0..g.y_cells() as u64 {
                    let a = pyr.avg(jx, jy, kx, iy >> sy).abs();
                    let slot = &mut out[row + iy as usize];
                    if a > *slot {
                        *slot = a;
                    }
                }
            }
        }
    }
    Signal2D::new(g, out).expect("finite")
}

pub(crate) fn square_1d_eps(f: &Signal1D, eps: f64) -> Signal1D {
    let n = f.grid().resolution();
    let c = HaarCoeffs1D::forward(f);
    let per_level: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let w = 2f64.powi(j as i32);
            (0..1u64 << j)
                .map(|k| {
                    let d = c.detail()[heap_offset(j, k)];
                    d * d * w
                })
                .collect()
        })
        .collect();
    let acc = sum_over_ancestors(n, &per_level);
    Signal1D::new(
        f.grid(),
        acc.into_iter().map(|v| (v + eps).sqrt()).collect(),
    )
    .expect("finite")
}

/// Square function `S(f) = (sum_I <f,h_I>^2 chi_I/|I|)^{1/2}`.
pub fn square_1d(f: &Signal1D) -> Signal1D {
    square_1d_eps(f, 0.0)
}

pub(crate) fn square_2d_coeffs_eps(c: &HaarCoeffs2D, eps: f64) -> Signal2D {
    let g = c.grid();
    let (n1, n2) = (g.n1(), g.n2());
    let yd = g.y_cells() - 1;
    let mut acc = vec![0.0f64; g.cells()];
    for jx in 0..n1 {
        for jy in 0..n2 {
            let w = 2f64.powi((jx + jy) as i32);
            let (sx, sy) = (n1 - jx, n2 - jy);
            for ix in 0..g.x_cells() as u64 {
                let ox = heap_offset(jx, ix >> sx);
                let row = ix as usize * g.y_cells();
                for iy in 0..g.y_cells() as u64 {
                    let oy = heap_offset(jy, iy >> sy);
                    let v = c.cc()[ox * yd + oy];
                    acc[row + iy as usize] += v * v * w;
                }
            }
        }
    }
    Signal2D::new(g, acc.into_iter().map(|v| (v + eps).sqrt()).collect()).expect("finite")
}

pub(crate) fn square_2d_eps(f: &Signal2D, eps: f64) -> Signal2D {
    square_2d_coeffs_eps(&HaarCoeffs2D::forward(f), eps)
}

/// Bi-parameter square function over cc rectangles,
/// `S(f) = (sum_R <f,h_R>^2 chi_R/|R|)^{1/2}`.
pub fn square_2d(f: &Signal2D) -> Signal2D {
    square_2d_eps(f, 0.0)
}

/// Square function straight from a coefficient block (mean blocks ignored,
/// matching the definition).
pub fn square_2d_coeffs(c: &HaarCoeffs2D) -> Signal2D {
    square_2d_coeffs_eps(c, 0.0)
}

fn bmo_line_eps(f: &Signal1D, eps: f64) -> f64 {
    let c = HaarCoeffs1D::forward(f);
    // energy[o] = sum of squared details over cancellative descendants of o.
    let count = c.detail().len();
    let mut energy = vec![0.0f64; count];
    for o in (0..count).rev() {
        let d = c.detail()[o];
        let mut e = d * d;
        let (cl, cr) = (2 * o + 1, 2 * o + 2);
        if cr < count {
            e += energy[cl] + energy[cr];
        }
        energy[o] = e;
    }
    let mut best = 0.0f64;
    for (o, e) in energy.iter().enumerate() {
        let j = interval_from_offset(o).level();
        let v = (e * 2f64.powi(j as i32) + eps).sqrt();
        if v > best {
            best = v;
        }
    }
    best
}

/// Line BMO: `sup_I (|I|^{-1} sum_{I' subset I} <f, h_{I'}>^2)^{1/2}`.
pub fn bmo_line(f: &Signal1D) -> f64 {
    bmo_line_eps(f, 0.0)
}

/// Energy of cc coefficients whose rectangle lies inside a cell set,
/// computed with an inclusion count per rectangle (O(cells + rects) after
/// the prefix table).
fn cc_energy_in(c: &HaarCoeffs2D, omega: &[bool]) -> f64 {
    let g = c.grid();
    let (xc, yc) = (g.x_cells(), g.y_cells());
    // prefix[ix][iy] = number of omega cells in [0,ix) x [0,iy).
    let mut prefix = vec![0u32; (xc + 1) * (yc + 1)];
    let w = yc + 1;
    for ix in 0..xc {
        for iy in 0..yc {
            let inside = omega[ix * yc + iy] as u32;
            prefix[(ix + 1) * w + (iy + 1)] = prefix[ix * w + (iy + 1)] + prefix[(ix + 1) * w + iy]
                - prefix[ix * w + iy]
                + inside;
        }
    }
    let count_in = |x0: usize, x1: usize, y0: usize, y1: usize| -> u32 {
        // Add the corners before subtracting to stay in unsigned range.
        prefix[x1 * w + y1] + prefix[x0 * w + y0] - prefix[x0 * w + y1] - prefix[x1 * w + y0]
    };
    let mut acc = 0.0;
    for (r, v) in c.iter_cc() {
        if v == 0.0 {
            continue;
        }
        let xr = r.x.cell_range(g.n1());
        let yr = r.y.cell_range(g.n2());
        let full = ((xr.end - xr.start) * (yr.end - yr.start)) as u32;
        if count_in(
            xr.start as usize,
            xr.end as usize,
            yr.start as usize,
            yr.end as usize,
        ) == full
        {
            acc += v * v;
        }
    }
    acc
}

/// Exact product BMO by enumerating every nonempty union of finest cells.
/// Only for tiny grids (`n1 + n2 <= 4`).
pub fn product_bmo_exact(f: &Signal2D) -> Result<f64> {
    product_bmo_exact_coeffs(&HaarCoeffs2D::forward(f))
}

pub fn product_bmo_exact_coeffs(c: &HaarCoeffs2D) -> Result<f64> {
    let g = c.grid();
    if g.n1() + g.n2() > 4 {
        return Err(Error::Unsupported(format!(
            "exact product BMO enumerates 2^(2^(n1+n2)) cell subsets; ({},{}) exceeds n1+n2 <= 4",
            g.n1(),
            g.n2()
        )));
    }
    let cells = g.cells();
    let cell_measure = g.cell_measure();
    // Bitmask per cc rectangle over the <= 16 cells.
    let masks: Vec<(u32, f64)> = c
        .iter_cc()
        .filter(|(_, v)| *v != 0.0)
        .map(|(r, v)| {
            let mut m = 0u32;
            for cell in g.rect_cells(&r) {
                m |= 1 << cell;
            }
            (m, v * v)
        })
        .collect();
    let mut best = 0.0f64;
    for omega in 1u32..(1u32 << cells) {
        let mut energy = 0.0;
        for &(m, e) in &masks {
            if m & omega == m {
                energy += e;
            }
        }
        if energy > 0.0 {
            let measure = omega.count_ones() as f64 * cell_measure;
            let v = energy / measure;
            if v > best {
                best = v;
            }
        }
    }
    Ok(best.sqrt())
}

/// Largest `k` with `2^k < x`; requires `x > 0` and finite.
pub(crate) fn dyadic_floor_strict(x: f64) -> i32 {
    debug_assert!(x > 0.0 && x.is_finite());
    let mut k = x.log2().floor() as i32;
    while 2f64.powi(k) >= x {
        k -= 1;
    }
    while 2f64.powi(k + 1) < x {
        k += 1;
    }
    k
}

/// `k` values whose powers `2^k` cut every distinct superlevel set of a
/// nonnegative sample set: from just below the minimum positive value up to
/// just below the maximum.
pub(crate) fn dyadic_threshold_range(values: &[f64]) -> Option<std::ops::RangeInclusive<i32>> {
    let mut minpos = f64::INFINITY;
    let mut max = 0.0f64;
    for &v in values {
        let a = v.abs();
        if a > 0.0 {
            minpos = minpos.min(a);
            max = max.max(a);
        }
    }
    if max == 0.0 {
        return None;
    }
    Some(dyadic_floor_strict(minpos)..=dyadic_floor_strict(max))
}

/// Max candidate value over nested superlevel sets `{key > lambda}` of the
/// given thresholds. Cells are admitted in decreasing key order; a
/// rectangle's energy enters once all its cells are inside.
fn superlevel_candidate_max(c: &HaarCoeffs2D, keys: &[f64], thresholds: &[f64]) -> f64 {
    let g = c.grid();
    let (n1, n2) = (g.n1(), g.n2());
    let yd = g.y_cells() - 1;
    let cell_measure = g.cell_measure();

    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap().then(a.cmp(&b)));
    let mut lambdas = thresholds.to_vec();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());

    // Remaining-cell count per cc rectangle.
    let mut remaining: Vec<u32> = c
        .iter_cc()
        .map(|(r, _)| g.rect_cell_count(&r) as u32)
        .collect();
    let mut energy = 0.0f64;
    let mut admitted = 0usize;
    let mut pos = 0usize;
    let mut best = 0.0f64;

    for lambda in lambdas {
        while pos < order.len() && keys[order[pos]] > lambda {
            let cell = order[pos];
            let (ix, iy) = g.cell_coords(cell);
            for jx in 0..n1 {
                let ox = heap_offset(jx, ix >> (n1 - jx));
                for jy in 0..n2 {
                    let oy = heap_offset(jy, iy >> (n2 - jy));
                    let idx = ox * yd + oy;
                    remaining[idx] -= 1;
                    if remaining[idx] == 0 {
                        let v = c.cc()[idx];
                        energy += v * v;
                    }
                }
            }
            admitted += 1;
            pos += 1;
        }
        if admitted > 0 && energy > 0.0 {
            let v = energy / (admitted as f64 * cell_measure);
            if v > best {
                best = v;
            }
        }
    }
    best.sqrt()
}

/// Candidate-family lower bound for product BMO.
///
/// Candidates: every single dyadic rectangle; superlevel sets of `S(f)` at
/// each distinct value; dyadic superlevel sets of the strong maximal
/// function; unions of the sparse families extracted from level-set
/// rectangle covers. The maximal-function and level-set candidates are
/// generated from the coefficient-magnitude signal so the result is
/// invariant under sign flips of cc coefficients, like the exact norm.
pub fn product_bmo_heuristic(f: &Signal2D) -> f64 {
    product_bmo_heuristic_coeffs(&HaarCoeffs2D::forward(f))
}

pub fn product_bmo_heuristic_coeffs(c: &HaarCoeffs2D) -> f64 {
    let g = c.grid();
    let yd = g.y_cells() - 1;
    let mut best = 0.0f64;

    // Single rectangles, via the nested energy table
    // E[I][J] = sum of cc^2 over rectangles inside I x J (any levels).
    let (xa, ya) = (2 * g.x_cells() - 1, 2 * g.y_cells() - 1);
    let mut a = vec![0.0f64; xa * ya];
    // First sweep: descendants in y at fixed cancellative I.
    for ox in 0..g.x_cells() - 1 {
        for oy in (0..ya).rev() {
            let mut e = 0.0;
            if oy < yd {
                let v = c.cc()[ox * yd + oy];
                e += v * v;
            }
            let (cl, cr) = (2 * oy + 1, 2 * oy + 2);
            if cr < ya {
                e += a[ox * ya + cl] + a[ox * ya + cr];
            }
            a[ox * ya + oy] = e;
        }
    }
    // Second sweep: descendants in x.
    let mut e_table = vec![0.0f64; xa * ya];
    for ox in (0..xa).rev() {
        for oy in 0..ya {
            let mut e = if ox < g.x_cells() - 1 {
                a[ox * ya + oy]
            } else {
                0.0
            };
            let (cl, cr) = (2 * ox + 1, 2 * ox + 2);
            if cr < xa {
                e += e_table[cl * ya + oy] + e_table[cr * ya + oy];
            }
            e_table[ox * ya + oy] = e;
        }
    }
    for ox in 0..xa {
        let jx = interval_from_offset(ox).level();
        for oy in 0..ya {
            let jy = interval_from_offset(oy).level();
            let v = e_table[ox * ya + oy] * 2f64.powi((jx + jy) as i32);
            if v > best * best {
                best = v.sqrt();
            }
        }
    }

    // Sign-invariant auxiliary data: S(f) and the magnitude synthesis.
    let s = square_2d_coeffs(c);
    let mut abs_coeffs = HaarCoeffs2D::zeros(g);
    for (i, v) in c.cc().iter().enumerate() {
        abs_coeffs.cc_mut()[i] = v.abs();
    }
    let f_abs = abs_coeffs.inverse();
    let m_abs = strong_maximal_2d(&f_abs);

    // Superlevel sets of S at each distinct value.
    let mut distinct: Vec<f64> = s.values().to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    best = best.max(superlevel_candidate_max(c, s.values(), &distinct));

    // Dyadic superlevel sets of the strong maximal function.
    if let Some(krange) = dyadic_threshold_range(m_abs.values()) {
        let thresholds: Vec<f64> = krange.clone().map(|k| 2f64.powi(k)).collect();
        best = best.max(superlevel_candidate_max(c, m_abs.values(), &thresholds));

        // Unions of sparse families over level-set rectangle covers.
        for k in krange {
            let lambda = 2f64.powi(k);
            let fam = level_set_rectangles(&f_abs, lambda);
            if fam.rects().is_empty() {
                continue;
            }
            let sf = sparse_extract(&fam);
            let mut omega = vec![false; g.cells()];
            for r in sf.family().rects() {
                for cell in g.rect_cells(r) {
                    omega[cell] = true;
                }
            }
            let count = omega.iter().filter(|b| **b).count();
            if count == 0 {
                continue;
            }
            let energy = cc_energy_in(c, &omega);
            if energy > 0.0 {
                let v = (energy / (count as f64 * g.cell_measure())).sqrt();
                if v > best {
                    best = v;
                }
            }
        }
    }

    best
}

fn slice_bmo_sup_eps(f: &Signal2D, eps: f64) -> f64 {
    let mut best = 0.0f64;
    for iy in 0..f.grid().y_cells() as u64 {
        let v = bmo_line_eps(&f.fixed_y_row(iy), eps);
        if v > best {
            best = v;
        }
    }
    best
}

/// `sup_y ||f(., y)||_BMO` over finest rows.
pub fn slice_bmo_sup(f: &Signal2D) -> f64 {
    slice_bmo_sup_eps(f, 0.0)
}

fn slice_hr_lr_eps(f: &Signal2D, r: f64, eps: f64) -> Result<f64> {
    NormKind::SliceHrLr(r).validate()?;
    let g = f.grid();
    let row_measure = g.y_axis().cell_measure();
    let total = pairwise_map_sum(g.y_cells(), &|iy| {
        let row = f.fixed_y_row(iy as u64);
        let s = square_1d_eps(&row, eps);
        lp_of_values(s.values(), g.x_axis().cell_measure(), r).powf(r)
    }) * row_measure;
    Ok(total.powf(1.0 / r))
}

/// `(integral over rows of ||f(., y)||_{H^r}^r dy)^{1/r}` with the
/// square-based row norm.
pub fn slice_hr_lr(f: &Signal2D, r: f64) -> Result<f64> {
    slice_hr_lr_eps(f, r, 0.0)
}

/// The four square/maximal compositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedKind {
    /// `(sum_J M(f_J)^2(x) chi_J(y)/|J|)^{1/2}`
    S2M1,
    /// `sup_{x in I} (sum_J <f_J>_I^2 chi_J(y)/|J|)^{1/2}`
    M1S2,
    /// `(sum_I M(f_I)^2(y) chi_I(x)/|I|)^{1/2}`
    S1M2,
    /// `sup_{y in J} (sum_I <f_I>_J^2 chi_I(x)/|I|)^{1/2}`
    M2S1,
}

fn s2m1_eps(f: &Signal2D, eps: f64) -> Signal2D {
    let g = f.grid();
    let n2 = g.n2();
    let sl = slice_transform(f, Axis::Y);
    let mut acc = vec![0.0f64; g.cells()];
    for (oy, slice) in sl.slices().iter().enumerate() {
        let j = interval_from_offset(oy);
        let w = 2f64.powi(j.level() as i32);
        let m = maximal_1d(slice);
        for iy in j.cell_range(n2) {
            for ix in 0..g.x_cells() {
                let mv = m.values()[ix];
                acc[ix * g.y_cells() + iy as usize] += mv * mv * w;
            }
        }
    }
    Signal2D::new(g, acc.into_iter().map(|v| (v + eps).sqrt()).collect()).expect("finite")
}

fn m1s2_eps(f: &Signal2D, eps: f64) -> Signal2D {
    let g = f.grid();
    let (n1, n2) = (g.n1(), g.n2());
    let sl = slice_transform(f, Axis::Y);
    // Per-slice average pyramids in x.
    let pyramids: Vec<AvgPyramid1D> = sl.slices().iter().map(AvgPyramid1D::build).collect();
    let mut sup = vec![0.0f64; g.cells()];
    for jx in 0..=n1 {
        for kx in 0..1u64 << jx {
            // D[iy] = sum over J containing iy of <f_J>_I^2 / |J|.
            let per_level: Vec<Vec<f64>> = (0..n2)
                .map(|jy| {
                    let w = 2f64.powi(jy as i32);
                    (0..1u64 << jy)
                        .map(|ky| {
                            let v = pyramids[heap_offset(jy, ky)].avg(jx, kx);
                            v * v * w
                        })
                        .collect()
                })
                .collect();
            let d = sum_over_ancestors(n2, &per_level);
            let cell_lo = kx << (n1 - jx);
            let cell_hi = (kx + 1) << (n1 - jx);
            for ix in cell_lo..cell_hi {
                let row = ix as usize * g.y_cells();
                for (iy, dv) in d.iter().enumerate() {
                    let slot = &mut sup[row + iy];
                    if *dv > *slot {
                        *slot = *dv;
                    }
                }
            }
        }
    }
    Signal2D::new(g, sup.into_iter().map(|v| (v + eps).sqrt()).collect()).expect("finite")
}

pub(crate) fn mixed_operator_eps(f: &Signal2D, kind: MixedKind, eps: f64) -> Signal2D {
    match kind {
        MixedKind::S2M1 => s2m1_eps(f, eps),
        MixedKind::M1S2 => m1s2_eps(f, eps),
        MixedKind::S1M2 => s2m1_eps(&f.transposed(), eps).transposed(),
        MixedKind::M2S1 => m1s2_eps(&f.transposed(), eps).transposed(),
    }
}

/// Pointwise mixed square/maximal composition.
pub fn mixed_operator(f: &Signal2D, kind: MixedKind) -> Signal2D {
    mixed_operator_eps(f, kind, 0.0)
}

pub(crate) fn norm_1d_eps(f: &Signal1D, kind: NormKind, eps: f64) -> Result<f64> {
    kind.validate()?;
    match kind {
        NormKind::Lp(p) => lp_norm_1d(f, p),
        NormKind::HpSquare(p) => {
            let s = square_1d_eps(f, eps);
            Ok(lp_of_values(s.values(), f.grid().cell_measure(), p))
        }
        NormKind::HpMaximal(p) => {
            let m = maximal_1d(f);
            Ok(lp_of_values(m.values(), f.grid().cell_measure(), p))
        }
        NormKind::BmoLine => Ok(bmo_line_eps(f, eps)),
        other => Err(Error::DimensionMismatch(format!(
            "{other:?} is not defined for 1D signals"
        ))),
    }
}

/// Scalar norm of a 1D signal.
pub fn norm_1d(f: &Signal1D, kind: NormKind) -> Result<f64> {
    norm_1d_eps(f, kind, 0.0)
}

pub(crate) fn norm_2d_eps(f: &Signal2D, kind: NormKind, eps: f64) -> Result<f64> {
    kind.validate()?;
    match kind {
        NormKind::Lp(p) => lp_norm_2d(f, p),
        NormKind::HpSquare(p) => {
            let s = square_2d_eps(f, eps);
            Ok(lp_of_values(s.values(), f.grid().cell_measure(), p))
        }
        NormKind::HpMaximal(p) => {
            let m = strong_maximal_2d(f);
            Ok(lp_of_values(m.values(), f.grid().cell_measure(), p))
        }
        NormKind::ProductBmoExact => product_bmo_exact(f),
        NormKind::ProductBmoHeuristic => Ok(product_bmo_heuristic(f)),
        NormKind::SliceBmoSup => Ok(slice_bmo_sup_eps(f, eps)),
        NormKind::SliceHrLr(r) => slice_hr_lr_eps(f, r, eps),
        NormKind::BmoLine => Err(Error::DimensionMismatch(
            "BmoLine is a 1D norm; see SliceBmoSup for rows of a 2D signal".into(),
        )),
    }
}

/// Scalar norm of a 2D signal.
pub fn norm_2d(f: &Signal2D, kind: NormKind) -> Result<f64> {
    norm_2d_eps(f, kind, 0.0)
}

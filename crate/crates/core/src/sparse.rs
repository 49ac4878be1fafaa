//! Rectangle families: Carleson constants, greedy sparse extraction,
//! overlap profiles, level-set covers, and contracting-family maximal
//! averages.
//!
//! Open sets are unions of finest cells, represented by [`CellSet`]
//! bitsets. All measures are exact dyadic rationals evaluated in f64, and
//! the density checks compare integer cell counts, so the sparse witness
//! properties are exact rather than approximate.

use crate::dyadic::{DyadicRectangle, Grid2D};
use crate::error::{Error, Result};
use crate::signal::Signal2D;
use crate::sums::pairwise_map_sum;

/// Bitset over the finest cells of a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSet {
    cells: usize,
    words: Vec<u64>,
}

impl CellSet {
    pub fn new(cells: usize) -> Self {
        CellSet {
            cells,
            words: vec![0; cells.div_ceil(64)],
        }
    }

    pub fn for_grid(grid: Grid2D) -> Self {
        Self::new(grid.cells())
    }

    pub fn from_cells(cells: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(cells);
        for c in members {
            s.insert(c);
        }
        s
    }

    /// Cells of the superlevel set `{|f| > lambda}`.
    pub fn superlevel(f: &Signal2D, lambda: f64) -> Self {
        Self::from_cells(
            f.grid().cells(),
            f.values()
                .iter()
                .enumerate()
                .filter(|(_, v)| v.abs() > lambda)
                .map(|(i, _)| i),
        )
    }

    pub fn capacity(&self) -> usize {
        self.cells
    }

    pub fn insert(&mut self, cell: usize) {
        debug_assert!(cell < self.cells);
        self.words[cell / 64] |= 1u64 << (cell % 64);
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.words[cell / 64] >> (cell % 64) & 1 == 1
    }

    pub fn insert_rect(&mut self, grid: Grid2D, r: &DyadicRectangle) {
        for cell in grid.rect_cells(r) {
            self.insert(cell);
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn union_with(&mut self, other: &CellSet) {
        debug_assert_eq!(self.cells, other.cells);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset_of(&self, other: &CellSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &CellSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cells).filter(|c| self.contains(*c))
    }
}

/// Finite collection of dyadic rectangles on one grid, without duplicates.
/// An optional integer label per rectangle supports level-set bookkeeping.
#[derive(Debug, Clone)]
pub struct RectFamily {
    grid: Grid2D,
    rects: Vec<DyadicRectangle>,
    labels: Option<Vec<i32>>,
}

impl RectFamily {
    pub fn new(grid: Grid2D) -> Self {
        RectFamily {
            grid,
            rects: Vec::new(),
            labels: None,
        }
    }

    pub fn from_rects(grid: Grid2D, rects: Vec<DyadicRectangle>) -> Result<Self> {
        let mut fam = Self::new(grid);
        for r in rects {
            fam.push(r)?;
        }
        Ok(fam)
    }

    pub fn push(&mut self, r: DyadicRectangle) -> Result<()> {
        self.grid.check_region(&r)?;
        if self.rects.contains(&r) {
            return Err(Error::DuplicateRectangle(r.to_string()));
        }
        if self.labels.is_some() {
            return Err(Error::InvalidParameter(
                "cannot push to a labeled family; set labels last".into(),
            ));
        }
        self.rects.push(r);
        Ok(())
    }

    /// Attach one integer label per rectangle, in family order.
    pub fn set_labels(&mut self, labels: Vec<i32>) -> Result<()> {
        if labels.len() != self.rects.len() {
            return Err(Error::LengthMismatch {
                got: labels.len(),
                want: self.rects.len(),
            });
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn rects(&self) -> &[DyadicRectangle] {
        &self.rects
    }

    pub fn labels(&self) -> Option<&[i32]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn union(&self) -> CellSet {
        let mut u = CellSet::for_grid(self.grid);
        for r in &self.rects {
            u.insert_rect(self.grid, r);
        }
        u
    }
}

/// Every dyadic rectangle whose levels are both below `n`; the `n^2`
/// level pairs each tile the square once, so the family covers it `n^2`
/// times and its Carleson constant is exactly `n^2`.
pub fn generation_family(grid: Grid2D, n: u32) -> Result<RectFamily> {
    if n == 0 || n > grid.n1() || n > grid.n2() {
        return Err(Error::InvalidParameter(format!(
            "generation count {n} outside 1..=min(n1, n2)"
        )));
    }
    let mut rects = Vec::new();
    for jx in 0..n {
        for jy in 0..n {
            for kx in 0..1u64 << jx {
                for ky in 0..1u64 << jy {
                    rects.push(DyadicRectangle::from_parts(jx, kx, jy, ky)?);
                }
            }
        }
    }
    RectFamily::from_rects(grid, rects)
}

/// A rectangle family together with disjoint witness pieces `E_R` of
/// density at least `density` inside each rectangle.
#[derive(Debug, Clone)]
pub struct SparseFamily {
    family: RectFamily,
    witnesses: Vec<CellSet>,
    density: f64,
    union_ratio: f64,
}

impl SparseFamily {
    /// Validating constructor for hand-built families; the extraction
    /// diagnostic `union_ratio` is set to 1.
    pub fn from_parts(family: RectFamily, witnesses: Vec<CellSet>, density: f64) -> Result<Self> {
        let sf = SparseFamily {
            family,
            witnesses,
            density,
            union_ratio: 1.0,
        };
        sf.validate()?;
        Ok(sf)
    }

    pub fn family(&self) -> &RectFamily {
        &self.family
    }

    pub fn witnesses(&self) -> &[CellSet] {
        &self.witnesses
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// `|union of kept| / |union of the input family|` from extraction.
    pub fn union_ratio(&self) -> f64 {
        self.union_ratio
    }

    /// Checks the witness structure exactly: one piece per rectangle,
    /// contained in it, pairwise disjoint, of density at least `density`.
    pub fn validate(&self) -> Result<()> {
        let grid = self.family.grid();
        if self.witnesses.len() != self.family.len() {
            return Err(Error::LengthMismatch {
                got: self.witnesses.len(),
                want: self.family.len(),
            });
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "density {} outside (0, 1]",
                self.density
            )));
        }
        let mut seen = CellSet::for_grid(grid);
        for (r, e) in self.family.rects().iter().zip(&self.witnesses) {
            let mut rset = CellSet::for_grid(grid);
            rset.insert_rect(grid, r);
            if !e.is_subset_of(&rset) {
                return Err(Error::Malformed(format!("witness escapes {r}")));
            }
            if e.intersects(&seen) {
                return Err(Error::Malformed(format!("witness of {r} overlaps another")));
            }
            // Density compared through integer counts; exact for density 1/2.
            let need = self.density * grid.rect_cell_count(r) as f64;
            if (e.count() as f64) < need - 1e-9 {
                return Err(Error::Malformed(format!(
                    "witness of {r} has {} of {} cells, below density {}",
                    e.count(),
                    grid.rect_cell_count(r),
                    self.density
                )));
            }
            seen.union_with(e);
        }
        Ok(())
    }
}

/// Greedy half-sparse extraction. Rectangles are visited in decreasing
/// measure, ties broken lexicographically on (level_x, index_x, level_y,
/// index_y); a rectangle is kept when at least half of it is uncovered by
/// the previously kept ones, and that uncovered part becomes its witness.
pub fn sparse_extract(fam: &RectFamily) -> SparseFamily {
    let grid = fam.grid();
    let mut order: Vec<&DyadicRectangle> = fam.rects().iter().collect();
    order.sort_by_key(|r| {
        (
            r.x.level() + r.y.level(),
            r.x.level(),
            r.x.index(),
            r.y.level(),
            r.y.index(),
        )
    });

    let mut covered = CellSet::for_grid(grid);
    let mut kept = RectFamily::new(grid);
    let mut witnesses = Vec::new();
    for r in order {
        let total = grid.rect_cell_count(r);
        let free = CellSet::from_cells(
            grid.cells(),
            grid.rect_cells(r).filter(|c| !covered.contains(*c)),
        );
        if 2 * free.count() >= total {
            kept.push(*r).expect("no duplicates in a valid family");
            covered.union_with(&free);
            witnesses.push(free);
        }
    }

    let kept_union = kept.union().count();
    let all_union = fam.union().count();
    let union_ratio = if all_union == 0 {
        1.0
    } else {
        kept_union as f64 / all_union as f64
    };
    SparseFamily {
        family: kept,
        witnesses,
        density: 0.5,
        union_ratio,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarlesonMode {
    Exact,
    Restricted,
}

fn carleson_ratio(fam: &RectFamily, omega: &CellSet) -> f64 {
    let grid = fam.grid();
    let denom = omega.count();
    if denom == 0 {
        return 0.0;
    }
    let mut num = 0.0;
    for r in fam.rects() {
        if grid.rect_cells(r).all(|c| omega.contains(c)) {
            num += r.measure();
        }
    }
    num / (denom as f64 * grid.cell_measure())
}

fn carleson_over_subfamilies(fam: &RectFamily) -> f64 {
    let grid = fam.grid();
    let m = fam.len();
    let rect_sets: Vec<CellSet> = fam
        .rects()
        .iter()
        .map(|r| {
            let mut s = CellSet::for_grid(grid);
            s.insert_rect(grid, r);
            s
        })
        .collect();
    let mut best = 0.0f64;
    for mask in 1u32..(1u32 << m) {
        let mut omega = CellSet::for_grid(grid);
        for (i, rs) in rect_sets.iter().enumerate() {
            if mask >> i & 1 == 1 {
                omega.union_with(rs);
            }
        }
        best = best.max(carleson_ratio(fam, &omega));
    }
    best
}

fn carleson_over_cell_subsets(fam: &RectFamily) -> f64 {
    let grid = fam.grid();
    let cells = grid.cells();
    let mut best = 0.0f64;
    for mask in 1u32..(1u32 << cells) {
        let omega = CellSet::from_cells(cells, (0..cells).filter(|c| mask >> c & 1 == 1));
        best = best.max(carleson_ratio(fam, &omega));
    }
    best
}

fn carleson_greedy(fam: &RectFamily) -> f64 {
    let grid = fam.grid();
    let mut chosen = vec![false; fam.len()];
    let mut omega = CellSet::for_grid(grid);
    let mut current = 0.0f64;
    loop {
        let mut best_gain = current;
        let mut best_idx = None;
        for (i, r) in fam.rects().iter().enumerate() {
            if chosen[i] {
                continue;
            }
            let mut cand = omega.clone();
            cand.insert_rect(grid, r);
            let ratio = carleson_ratio(fam, &cand);
            if ratio > best_gain + 1e-15 {
                best_gain = ratio;
                best_idx = Some(i);
            }
        }
        match best_idx {
            Some(i) => {
                chosen[i] = true;
                omega.insert_rect(grid, &fam.rects()[i]);
                current = best_gain;
            }
            None => return current,
        }
    }
}

/// Packing constant `sup_Omega sum_{R inside Omega} |R| / |Omega|`.
///
/// Exact mode reduces the sup over open sets to unions of subfamilies
/// (the optimal set can be shrunk to the union of the rectangles it
/// contains), enumerable for at most 16 rectangles; on grids with
/// `n1 + n2 <= 4` it falls back to enumerating all cell subsets.
/// Restricted mode enumerates subfamilies when possible, otherwise runs a
/// greedy ratio ascent, and never exceeds the exact value.
pub fn carleson_constant(fam: &RectFamily, mode: CarlesonMode) -> Result<f64> {
    if fam.is_empty() {
        return Ok(0.0);
    }
    let grid = fam.grid();
    match mode {
        CarlesonMode::Exact => {
            if fam.len() <= 16 {
                Ok(carleson_over_subfamilies(fam))
            } else if grid.n1() + grid.n2() <= 4 {
                Ok(carleson_over_cell_subsets(fam))
            } else {
                Err(Error::Unsupported(format!(
                    "exact Carleson needs <= 16 rectangles (got {}) or n1+n2 <= 4",
                    fam.len()
                )))
            }
        }
        CarlesonMode::Restricted => {
            if fam.len() <= 16 {
                Ok(carleson_over_subfamilies(fam))
            } else {
                Ok(carleson_greedy(fam))
            }
        }
    }
}

/// Overlap profile `||sum chi_R||_p / |union|^{1/p}`; near 1 for families
/// that behave like disjoint ones.
pub fn jn_profile(sf: &SparseFamily, p: f64) -> Result<f64> {
    if p <= 0.0 || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent {p}")));
    }
    let fam = sf.family();
    let grid = fam.grid();
    let mut overlap = vec![0u32; grid.cells()];
    for r in fam.rects() {
        for c in grid.rect_cells(r) {
            overlap[c] += 1;
        }
    }
    let union_cells = overlap.iter().filter(|c| **c > 0).count();
    if union_cells == 0 {
        return Err(Error::Degenerate("empty family".into()));
    }
    let norm_p = (pairwise_map_sum(grid.cells(), &|i| (overlap[i] as f64).powf(p))
        * grid.cell_measure())
    .powf(1.0 / p);
    Ok(norm_p / (union_cells as f64 * grid.cell_measure()).powf(1.0 / p))
}

fn level_set_rectangles_impl(g: &Signal2D, lambda: f64, max_jx: u32, max_jy: u32) -> RectFamily {
    let grid = g.grid();
    let pyr = crate::haar::AvgPyramid2D::build(g);
    // Per level pair: which rectangles qualify, and which sit under a
    // qualifying proper superset. Parents are filled first.
    let mut fam = RectFamily::new(grid);
    let slots = ((max_jx + 1) * (max_jy + 1)) as usize;
    let mut qual: Vec<Vec<bool>> = vec![Vec::new(); slots];
    let mut dominated: Vec<Vec<bool>> = vec![Vec::new(); slots];
    let slot = |jx: u32, jy: u32| (jx * (max_jy + 1) + jy) as usize;
    let mut order: Vec<(u32, u32)> = (0..=max_jx)
        .flat_map(|jx| (0..=max_jy).map(move |jy| (jx, jy)))
        .collect();
    order.sort_by_key(|(jx, jy)| jx + jy);
    for (jx, jy) in order {
        let count = 1usize << (jx + jy);
        let mut q = vec![false; count];
        let mut d = vec![false; count];
        for kx in 0..1u64 << jx {
            for ky in 0..1u64 << jy {
                let idx = (kx << jy | ky) as usize;
                q[idx] = pyr.avg(jx, jy, kx, ky).abs() > lambda;
                let mut dom = false;
                if jx > 0 {
                    let pidx = ((kx >> 1) << jy | ky) as usize;
                    let ps = slot(jx - 1, jy);
                    dom |= qual[ps][pidx] || dominated[ps][pidx];
                }
                if jy > 0 {
                    let pidx = (kx << (jy - 1) | ky >> 1) as usize;
                    let ps = slot(jx, jy - 1);
                    dom |= qual[ps][pidx] || dominated[ps][pidx];
                }
                d[idx] = dom;
                if q[idx] && !dom {
                    let r = DyadicRectangle::from_parts(jx, kx, jy, ky).expect("valid levels");
                    fam.push(r).expect("each rectangle visited once");
                }
            }
        }
        qual[slot(jx, jy)] = q;
        dominated[slot(jx, jy)] = d;
    }
    fam
}

/// Maximal dyadic rectangles (any level pair, including finest) whose
/// signal average exceeds `lambda` in absolute value. Their union equals
/// the strong maximal superlevel set `{M(g) > lambda}` cellwise.
pub fn level_set_rectangles(g: &Signal2D, lambda: f64) -> RectFamily {
    let grid = g.grid();
    level_set_rectangles_impl(g, lambda, grid.n1(), grid.n2())
}

/// Same cover restricted to level pairs below the finest on both axes,
/// so every rectangle in the family carries a Haar coefficient.
pub fn level_set_rectangles_capped(g: &Signal2D, lambda: f64) -> RectFamily {
    let grid = g.grid();
    if grid.n1() == 0 || grid.n2() == 0 {
        return RectFamily::new(grid);
    }
    level_set_rectangles_impl(g, lambda, grid.n1() - 1, grid.n2() - 1)
}

/// Validates a contracting chain: nonempty sets, each contained in the
/// previous one with at most half its cells.
pub fn validate_contracting(grid: Grid2D, omegas: &[CellSet]) -> Result<()> {
    for (i, o) in omegas.iter().enumerate() {
        if o.capacity() != grid.cells() {
            return Err(Error::GridMismatch(format!(
                "set {i} sized for {} cells, grid has {}",
                o.capacity(),
                grid.cells()
            )));
        }
        if o.is_empty() {
            return Err(Error::NotContracting(format!("set {i} is empty")));
        }
        if i > 0 {
            let prev = &omegas[i - 1];
            if !o.is_subset_of(prev) {
                return Err(Error::NotContracting(format!(
                    "set {i} is not contained in set {}",
                    i - 1
                )));
            }
            if 2 * o.count() > prev.count() {
                return Err(Error::NotContracting(format!(
                    "set {i} has {} cells, more than half of {}",
                    o.count(),
                    prev.count()
                )));
            }
        }
    }
    Ok(())
}

/// Pointwise sup of `|g|`-averages over the containing sets of a
/// contracting chain; zero where no set contains the cell.
pub fn contracting_family_maximal(g: &Signal2D, omegas: &[CellSet]) -> Result<Signal2D> {
    let grid = g.grid();
    validate_contracting(grid, omegas)?;
    let mut out = vec![0.0f64; grid.cells()];
    for o in omegas {
        let cells: Vec<usize> = o.iter().collect();
        let avg =
            pairwise_map_sum(cells.len(), &|i| g.values()[cells[i]].abs()) / cells.len() as f64;
        for &c in &cells {
            if avg > out[c] {
                out[c] = avg;
            }
        }
    }
    Signal2D::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::strong_maximal_2d;
    use crate::testutil::*;

    fn rect(lx: u32, kx: u64, ly: u32, ky: u64) -> DyadicRectangle {
        DyadicRectangle::from_parts(lx, kx, ly, ky).unwrap()
    }

    #[test]
    fn cellset_basics() {
        let mut s = CellSet::new(100);
        s.insert(0);
        s.insert(63);
        s.insert(64);
        s.insert(99);
        assert_eq!(s.count(), 4);
        assert!(s.contains(63) && s.contains(64));
        assert!(!s.contains(1));
        let t = CellSet::from_cells(100, [0, 64]);
        assert!(t.is_subset_of(&s));
        assert!(!s.is_subset_of(&t));
        assert!(s.intersects(&t));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 63, 64, 99]);
    }

    #[test]
    fn family_rejects_duplicates_and_foreign_rects() {
        let g = Grid2D::new(2, 2).unwrap();
        let mut fam = RectFamily::new(g);
        fam.push(rect(1, 0, 1, 1)).unwrap();
        assert!(matches!(
            fam.push(rect(1, 0, 1, 1)),
            Err(Error::DuplicateRectangle(_))
        ));
        // Finer than the grid.
        assert!(fam.push(rect(3, 0, 1, 0)).is_err());
        assert_eq!(fam.len(), 1);
    }

    #[test]
    fn extract_keeps_disjoint_discards_covered() {
        let g = Grid2D::new(2, 2).unwrap();
        // Two disjoint rectangles: both kept, witnesses are the rectangles.
        let fam = RectFamily::from_rects(g, vec![rect(1, 0, 0, 0), rect(1, 1, 0, 0)]).unwrap();
        let sf = sparse_extract(&fam);
        assert_eq!(sf.family().len(), 2);
        sf.validate().unwrap();
        for (r, e) in sf.family().rects().iter().zip(sf.witnesses()) {
            assert_eq!(e.count(), g.rect_cell_count(r));
        }
        assert_eq!(sf.union_ratio(), 1.0);

        // Nested pair: outer first, inner fully covered and dropped.
        let fam = RectFamily::from_rects(g, vec![rect(1, 0, 0, 0), rect(0, 0, 0, 0)]).unwrap();
        let sf = sparse_extract(&fam);
        assert_eq!(sf.family().len(), 1);
        assert_eq!(sf.family().rects()[0], rect(0, 0, 0, 0));
        assert_eq!(sf.union_ratio(), 1.0);
    }

    #[test]
    fn extract_random_family_passes_witness_check() {
        let mut r = rng(211);
        use rand::Rng;
        let g = Grid2D::new(5, 5).unwrap();
        let mut fam = RectFamily::new(g);
        let mut added = 0;
        while added < 50 {
            let lx = r.gen_range(0..=5);
            let ly = r.gen_range(0..=5);
            let kx = r.gen_range(0..1u64 << lx);
            let ky = r.gen_range(0..1u64 << ly);
            if fam.push(rect(lx, kx, ly, ky)).is_ok() {
                added += 1;
            }
        }
        let sf = sparse_extract(&fam);
        sf.validate().unwrap();
        assert!(sf.union_ratio() > 0.0 && sf.union_ratio() <= 1.0);
        // Witnesses cover the kept union exactly.
        let mut w = CellSet::for_grid(g);
        for e in sf.witnesses() {
            w.union_with(e);
        }
        assert_eq!(w, sf.family().union());
    }

    #[test]
    fn carleson_examples() {
        let g = Grid2D::new(2, 2).unwrap();
        let fam = RectFamily::from_rects(g, vec![rect(0, 0, 0, 0)]).unwrap();
        assert_eq!(carleson_constant(&fam, CarlesonMode::Exact).unwrap(), 1.0);

        let fam = RectFamily::from_rects(g, vec![rect(0, 0, 0, 0), rect(1, 0, 0, 0)]).unwrap();
        let c = carleson_constant(&fam, CarlesonMode::Exact).unwrap();
        assert!((c - 1.5).abs() < 1e-14);

        for n in [1u32, 2] {
            let fam = generation_family(g, n).unwrap();
            let c = carleson_constant(&fam, CarlesonMode::Exact).unwrap();
            assert!((c - (n * n) as f64).abs() < 1e-12, "n = {n}: constant {c}");
            let r = carleson_constant(&fam, CarlesonMode::Restricted).unwrap();
            assert!(r <= c + 1e-12);
        }
    }

    #[test]
    fn carleson_exact_cell_subsets_agree_with_subfamilies() {
        // Small enough for both strategies; they must agree.
        let g = Grid2D::new(2, 2).unwrap();
        let fam = RectFamily::from_rects(
            g,
            vec![rect(1, 0, 1, 0), rect(1, 0, 1, 1), rect(2, 1, 0, 0)],
        )
        .unwrap();
        let by_subfam = carleson_over_subfamilies(&fam);
        let by_cells = carleson_over_cell_subsets(&fam);
        assert!((by_subfam - by_cells).abs() < 1e-12);
    }

    #[test]
    fn carleson_exact_cap() {
        let g = Grid2D::new(4, 4).unwrap();
        let fam = generation_family(g, 3).unwrap();
        assert!(fam.len() > 16);
        assert!(matches!(
            carleson_constant(&fam, CarlesonMode::Exact),
            Err(Error::Unsupported(_))
        ));
        // Restricted still runs and lands at the covering count.
        let r = carleson_constant(&fam, CarlesonMode::Restricted).unwrap();
        assert!(r <= 9.0 + 1e-12);
        assert!(r >= 1.0);
    }

    #[test]
    fn jn_profile_examples() {
        let g = Grid2D::new(2, 2).unwrap();
        let fam = RectFamily::from_rects(g, vec![rect(1, 0, 1, 1)]).unwrap();
        let sf = sparse_extract(&fam);
        assert!((jn_profile(&sf, 2.0).unwrap() - 1.0).abs() < 1e-14);

        // Disjoint equal rectangles: indicator of the union, profile 1.
        let fam = RectFamily::from_rects(
            g,
            vec![rect(1, 0, 1, 0), rect(1, 1, 1, 0), rect(1, 0, 1, 1)],
        )
        .unwrap();
        let sf = sparse_extract(&fam);
        for p in [0.5, 1.0, 2.0] {
            assert!((jn_profile(&sf, p).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(jn_profile(&sf, 0.0).is_err());
    }

    #[test]
    fn level_sets_match_strong_maximal_superlevels() {
        let mut r = rng(223);
        let g = Grid2D::new(4, 4).unwrap();
        for _ in 0..5 {
            let f = random_signal_2d(g, &mut r);
            let m = strong_maximal_2d(&f);
            for lambda in [0.1, 0.5, 1.0] {
                let fam = level_set_rectangles(&f, lambda);
                let union = fam.union();
                for c in 0..g.cells() {
                    let want = m.values()[c] > lambda;
                    assert_eq!(union.contains(c), want, "cell {c} at lambda {lambda}");
                }
                // Maximality: no family member contains another.
                for (i, a) in fam.rects().iter().enumerate() {
                    for (j, b) in fam.rects().iter().enumerate() {
                        if i != j {
                            assert!(!(a.x.contains(&b.x) && a.y.contains(&b.y)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn level_sets_constant_signal() {
        let g = Grid2D::new(3, 2).unwrap();
        let f = Signal2D::constant(g, -2.0);
        let fam = level_set_rectangles(&f, 1.0);
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.rects()[0], DyadicRectangle::unit_square());
        assert!(level_set_rectangles(&f, 2.0).is_empty());
        assert!(level_set_rectangles(&f, 5.0).is_empty());
    }

    #[test]
    fn capped_level_sets_stay_cancellative() {
        let mut r = rng(227);
        let g = Grid2D::new(3, 3).unwrap();
        let f = random_signal_2d(g, &mut r);
        let fam = level_set_rectangles_capped(&f, 0.4);
        for rect in fam.rects() {
            assert!(rect.x.level() < 3 && rect.y.level() < 3);
        }
    }

    #[test]
    fn contracting_maximal_matches_enumeration() {
        let mut r = rng(229);
        let g = Grid2D::new(3, 3).unwrap();
        let f = random_signal_2d(g, &mut r);
        // Nested dyadic boxes: full square, left half, bottom-left quarter cells.
        let full = CellSet::from_cells(g.cells(), 0..g.cells());
        let half = {
            let mut s = CellSet::for_grid(g);
            s.insert_rect(g, &rect(1, 0, 0, 0));
            s
        };
        let quarter = {
            let mut s = CellSet::for_grid(g);
            s.insert_rect(g, &rect(1, 0, 1, 0));
            s
        };
        let omegas = vec![full, half, quarter];
        let got = contracting_family_maximal(&f, &omegas).unwrap();
        for c in 0..g.cells() {
            let mut want = 0.0f64;
            for o in &omegas {
                if o.contains(c) {
                    let cells: Vec<usize> = o.iter().collect();
                    let avg = cells.iter().map(|i| f.values()[*i].abs()).sum::<f64>()
                        / cells.len() as f64;
                    want = want.max(avg);
                }
            }
            assert!((got.values()[c] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn contracting_validation_rejects_bad_chains() {
        let g = Grid2D::new(2, 2).unwrap();
        let full = CellSet::from_cells(g.cells(), 0..g.cells());
        let most = CellSet::from_cells(g.cells(), 0..g.cells() - 1);
        // Not halving.
        assert!(matches!(
            validate_contracting(g, &[full.clone(), most]),
            Err(Error::NotContracting(_))
        ));
        // Not nested.
        let left = CellSet::from_cells(g.cells(), 0..8);
        let right = CellSet::from_cells(g.cells(), 8..12);
        assert!(matches!(
            validate_contracting(g, &[left, right]),
            Err(Error::NotContracting(_))
        ));
        // Empty member.
        assert!(matches!(
            validate_contracting(g, &[full, CellSet::for_grid(g)]),
            Err(Error::NotContracting(_))
        ));
    }
}

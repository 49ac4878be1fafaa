//! Operator norm estimation and structured witnesses.
//!
//! Three families of tools live here. `opnorm_l2` and `opnorm_dense`
//! compute spectral norms of a named operator on the cell space, the
//! first matrix-free via power iteration on `T*T`, the second by dense
//! singular value decomposition for small grids. `opnorm_search`
//! maximizes a ratio of arbitrary norm kinds over cancellative
//! coefficient inputs by seeded finite-difference ascent.
//! `level_set_witness` and `row_slice_witness` build the structured
//! lower-bound inputs tied to level sets of the strong maximal function
//! and to per-row slice symbols. The rest of the module holds the
//! per-cell matrix upper bound for `Pi4`, the Sylvester walk for
//! Hadamard matrices, the two sign-pattern coefficient builders, and an
//! estimator for the sign-insensitive pairing norm.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeMap;

use crate::dyadic::{DyadicInterval, DyadicRectangle, Grid2D};
use crate::error::{Error, Result};
use crate::functionals::{
    dyadic_threshold_range, lp_norm_2d, mixed_operator, norm_1d, norm_1d_eps, norm_2d, norm_2d_eps,
    square_2d, strong_maximal_2d, MixedKind, NormKind,
};
use crate::haar::{heap_offset, pow2_half, AvgPyramid1D, HaarCoeffs1D, HaarCoeffs2D, MixedPyramid};
use crate::paraproduct::{NamedOperator1D, NamedOperator2D, OperatorKind1D, OperatorKind2D};
use crate::signal::{Signal1D, Signal2D};
use crate::sparse::{level_set_rectangles_capped, sparse_extract, CellSet, RectFamily};

const EIG_TOL: f64 = 1e-10;
const MAX_POWER_ITERS: usize = 10_000;
const FD_STEP: f64 = 1e-5;
const NORM_SMOOTHING: f64 = 1e-12;
const DENSE_CAP: usize = 4096;
const L2_SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PowerIteration,
    DenseSpectral,
    RatioAscent,
    StructuredLevel,
    StructuredRow,
    MatrixViewBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundType {
    Lower,
    Upper,
    TwoSided,
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub restarts: usize,
    pub residual: f64,
    pub seed: Option<u64>,
    pub converged: bool,
}

/// Norm estimate with the input achieving it (for lower and two-sided
/// bounds) and convergence bookkeeping. The witness is stored as cell
/// values; upper bounds carry none.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OpNormReport {
    pub value: f64,
    pub witness: Option<Vec<f64>>,
    pub method: Method,
    pub bound_type: BoundType,
    pub diagnostics: Diagnostics,
}

/// Linear map on the cell space of a grid, with an adjoint.
pub trait LinearGridOp {
    fn unknowns(&self) -> usize;
    fn apply_cells(&self, x: &[f64]) -> Vec<f64>;
    fn adjoint_cells(&self, x: &[f64]) -> Vec<f64>;
}

impl LinearGridOp for NamedOperator1D {
    fn unknowns(&self) -> usize {
        self.symbol().grid().cells()
    }

    fn apply_cells(&self, x: &[f64]) -> Vec<f64> {
        let f = Signal1D::new(self.symbol().grid(), x.to_vec()).expect("length matches grid");
        self.apply(&f).expect("same grid").into_values()
    }

    fn adjoint_cells(&self, x: &[f64]) -> Vec<f64> {
        let f = Signal1D::new(self.symbol().grid(), x.to_vec()).expect("length matches grid");
        self.adjoint_apply(&f).expect("same grid").into_values()
    }
}

impl LinearGridOp for NamedOperator2D {
    fn unknowns(&self) -> usize {
        self.symbol().grid().cells()
    }

    fn apply_cells(&self, x: &[f64]) -> Vec<f64> {
        let f = Signal2D::new(self.symbol().grid(), x.to_vec()).expect("length matches grid");
        self.apply(&f).expect("same grid").into_values()
    }

    fn adjoint_cells(&self, x: &[f64]) -> Vec<f64> {
        let f = Signal2D::new(self.symbol().grid(), x.to_vec()).expect("length matches grid");
        self.adjoint_apply(&f).expect("same grid").into_values()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    crate::sums::pairwise_map_sum(a.len(), &|i| a[i] * b[i])
}

fn l2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Spectral norm on `L^2` by power iteration on `T*T`. Runs until the
/// relative eigenvalue change drops below 1e-10 or 10^4 iterations; the
/// reported value is the ratio achieved by the returned witness, so the
/// two always agree exactly.
pub fn opnorm_l2(op: &impl LinearGridOp) -> OpNormReport {
    let dim = op.unknowns();
    let mut rng = ChaCha8Rng::seed_from_u64(L2_SEED);
    let mut v: Vec<f64> = (0..dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let nv = l2(&v);
    if nv > 0.0 {
        v.iter_mut().for_each(|x| *x /= nv);
    }

    let mut mu_prev = 0.0;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..MAX_POWER_ITERS {
        iterations = it + 1;
        let w = op.apply_cells(&v);
        let mu = dot(&w, &w);
        if mu == 0.0 {
            residual = 0.0;
            converged = true;
            break;
        }
        residual = (mu - mu_prev).abs() / mu;
        if it > 0 && residual < EIG_TOL {
            converged = true;
            break;
        }
        mu_prev = mu;
        let z = op.adjoint_cells(&w);
        let nz = l2(&z);
        if nz == 0.0 {
            converged = true;
            break;
        }
        v = z;
        v.iter_mut().for_each(|x| *x /= nz);
    }

    let value = l2(&op.apply_cells(&v));
    OpNormReport {
        value,
        witness: Some(v),
        method: Method::PowerIteration,
        bound_type: if converged {
            BoundType::TwoSided
        } else {
            BoundType::Lower
        },
        diagnostics: Diagnostics {
            iterations,
            restarts: 1,
            residual,
            seed: Some(L2_SEED),
            converged,
        },
    }
}

/// Spectral norm by dense assembly and SVD; refuses more than 4096
/// unknowns.
pub fn opnorm_dense(op: &impl LinearGridOp) -> Result<f64> {
    let dim = op.unknowns();
    if dim > DENSE_CAP {
        return Err(Error::Unsupported(format!(
            "dense spectral factorization capped at {DENSE_CAP} unknowns, got {dim}"
        )));
    }
    if dim == 0 {
        return Ok(0.0);
    }
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut basis = vec![0.0; dim];
    for j in 0..dim {
        basis[j] = 1.0;
        let col = op.apply_cells(&basis);
        basis[j] = 0.0;
        for (i, v) in col.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m.singular_values().max())
}

/// Restart count, per-restart iteration cap, and the RNG seed for
/// ratio ascent.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            restarts: 16,
            iterations: 500,
            seed: 7,
        }
    }
}

impl SearchBudget {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.iterations == 0 {
            return Err(Error::InvalidParameter(
                "search budget needs at least one restart and one iteration".into(),
            ));
        }
        Ok(())
    }
}

fn normalize(x: &mut [f64]) {
    let n = l2(x);
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Projected gradient ascent from one starting point. The objective is
/// scale-invariant, so iterates are kept on the unit sphere; `coord_cap`
/// switches to sampled-coordinate gradients for large parameter counts.
fn ascend(
    mut x: Vec<f64>,
    eval: &dyn Fn(&[f64]) -> f64,
    project: &dyn Fn(&mut [f64]),
    iterations: usize,
    coord_cap: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, f64, usize) {
    project(&mut x);
    normalize(&mut x);
    let mut val = eval(&x);
    let mut step = 0.25;
    let mut used = 0;
    for _ in 0..iterations {
        used += 1;
        let coords: Vec<usize> = match coord_cap {
            Some(c) if c < x.len() => rand::seq::index::sample(rng, x.len(), c).into_vec(),
            _ => (0..x.len()).collect(),
        };
        let mut grad = vec![0.0; x.len()];
        let mut flat = true;
        let mut probe = x.clone();
        for &i in &coords {
            let old = probe[i];
            probe[i] = old + FD_STEP;
            let d = (eval(&probe) - val) / FD_STEP;
            probe[i] = old;
            if d != 0.0 {
                flat = false;
            }
            grad[i] = d;
        }
        if flat {
            break;
        }
        normalize(&mut grad);
        let mut s = step;
        let mut accepted = false;
        while s > 1e-10 {
            let mut cand: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + s * g).collect();
            project(&mut cand);
            normalize(&mut cand);
            let cv = eval(&cand);
            if cv > val {
                x = cand;
                val = cv;
                step = (s * 2.0).min(0.5);
                accepted = true;
                break;
            }
            s *= 0.25;
        }
        if !accepted {
            break;
        }
    }
    (x, val, used)
}

fn no_projection(_: &mut [f64]) {}

type ScoreFn<'a> = Box<dyn Fn(&[f64]) -> f64 + 'a>;
type ExactScoreFn<'a> = Box<dyn Fn(&[f64]) -> Result<f64> + 'a>;
type SynthFn<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;

struct RatioSearch<'a> {
    dim: usize,
    eval_eps: ScoreFn<'a>,
    eval_exact: ExactScoreFn<'a>,
    synth_cells: SynthFn<'a>,
}

fn run_ratio_search(
    search: &RatioSearch,
    budget: &SearchBudget,
    warm: Option<&[f64]>,
) -> Result<OpNormReport> {
    budget.validate()?;
    if let Some(w) = warm {
        if w.len() != search.dim {
            return Err(Error::LengthMismatch {
                got: w.len(),
                want: search.dim,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut best_params = vec![0.0; search.dim];
    let mut best_val = 0.0;
    let mut total_iters = 0;

    if let Some(w) = warm {
        let (x, v, used) = ascend(
            w.to_vec(),
            &search.eval_eps,
            &no_projection,
            budget.iterations,
            None,
            &mut rng,
        );
        total_iters += used;
        if v > best_val {
            best_val = v;
            best_params = x;
        }
    }
    for _ in 0..budget.restarts {
        let init: Vec<f64> = (0..search.dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let (x, v, used) = ascend(
            init,
            &search.eval_eps,
            &no_projection,
            budget.iterations,
            None,
            &mut rng,
        );
        total_iters += used;
        if v > best_val {
            best_val = v;
            best_params = x;
        }
    }

    let exact = if best_val > 0.0 {
        (search.eval_exact)(&best_params)?
    } else {
        0.0
    };
    let (value, witness) = if exact > 0.0 {
        (exact, (search.synth_cells)(&best_params))
    } else {
        (0.0, vec![0.0; search.dim])
    };
    Ok(OpNormReport {
        value,
        witness: Some(witness),
        method: Method::RatioAscent,
        bound_type: BoundType::Lower,
        diagnostics: Diagnostics {
            iterations: total_iters,
            restarts: budget.restarts,
            residual: (best_val - value).abs(),
            seed: Some(budget.seed),
            converged: true,
        },
    })
}

fn synth_1d(op: &NamedOperator1D, params: &[f64]) -> Signal1D {
    let grid = op.symbol().grid();
    HaarCoeffs1D::from_parts(grid, 0.0, params.to_vec())
        .expect("parameter length matches grid")
        .inverse()
}

fn synth_2d(op: &NamedOperator2D, params: &[f64]) -> Signal2D {
    let grid = op.symbol().grid();
    let cm = vec![0.0; grid.x_cells() - 1];
    let mc = vec![0.0; grid.y_cells() - 1];
    HaarCoeffs2D::from_parts(grid, 0.0, cm, mc, params.to_vec())
        .expect("parameter length matches grid")
        .inverse()
}

/// Best ratio `out_norm(T f) / in_norm(f)` over cancellative-coefficient
/// inputs on the line, found by seeded ascent; reports a lower bound with
/// its witness.
pub fn opnorm_search_1d(
    op: &NamedOperator1D,
    in_norm: NormKind,
    out_norm: NormKind,
    budget: &SearchBudget,
) -> Result<OpNormReport> {
    opnorm_search_1d_from(op, in_norm, out_norm, budget, None)
}

/// `opnorm_search_1d` with an optional warm-start coefficient vector,
/// ascended before the seeded restarts.
pub fn opnorm_search_1d_from(
    op: &NamedOperator1D,
    in_norm: NormKind,
    out_norm: NormKind,
    budget: &SearchBudget,
    warm: Option<&[f64]>,
) -> Result<OpNormReport> {
    in_norm.validate()?;
    out_norm.validate()?;
    let grid = op.symbol().grid();
    // Vet norm arity once so the closures cannot fail.
    norm_1d(&Signal1D::zeros(grid), in_norm)?;
    norm_1d(&Signal1D::zeros(grid), out_norm)?;
    let dim = grid.cells() - 1;
    let search = RatioSearch {
        dim,
        eval_eps: Box::new(move |params| {
            let f = synth_1d(op, params);
            let tf = op.apply(&f).expect("same grid");
            let i = norm_1d_eps(&f, in_norm, NORM_SMOOTHING).expect("arity vetted");
            let o = norm_1d_eps(&tf, out_norm, NORM_SMOOTHING).expect("arity vetted");
            if i > 0.0 {
                o / i
            } else {
                0.0
            }
        }),
        eval_exact: Box::new(move |params| {
            let f = synth_1d(op, params);
            let tf = op.apply(&f)?;
            let i = norm_1d(&f, in_norm)?;
            let o = norm_1d(&tf, out_norm)?;
            Ok(if i > 0.0 { o / i } else { 0.0 })
        }),
        synth_cells: Box::new(move |params| synth_1d(op, params).into_values()),
    };
    run_ratio_search(&search, budget, warm)
}

/// Best ratio `out_norm(T f) / in_norm(f)` over cancellative-coefficient
/// inputs on the plane. Restart inits are drawn from one seeded stream,
/// so enlarging the restart count never lowers the result.
pub fn opnorm_search_2d(
    op: &NamedOperator2D,
    in_norm: NormKind,
    out_norm: NormKind,
    budget: &SearchBudget,
) -> Result<OpNormReport> {
    opnorm_search_2d_from(op, in_norm, out_norm, budget, None)
}

/// `opnorm_search_2d` with an optional warm-start cc-coefficient vector.
pub fn opnorm_search_2d_from(
    op: &NamedOperator2D,
    in_norm: NormKind,
    out_norm: NormKind,
    budget: &SearchBudget,
    warm: Option<&[f64]>,
) -> Result<OpNormReport> {
    in_norm.validate()?;
    out_norm.validate()?;
    let grid = op.symbol().grid();
    norm_2d(&Signal2D::zeros(grid), in_norm)?;
    norm_2d(&Signal2D::zeros(grid), out_norm)?;
    let dim = (grid.x_cells() - 1) * (grid.y_cells() - 1);
    let search = RatioSearch {
        dim,
        eval_eps: Box::new(move |params| {
            let f = synth_2d(op, params);
            let tf = op.apply(&f).expect("same grid");
            let i = norm_2d_eps(&f, in_norm, NORM_SMOOTHING).expect("arity vetted");
            let o = norm_2d_eps(&tf, out_norm, NORM_SMOOTHING).expect("arity vetted");
            if i > 0.0 {
                o / i
            } else {
                0.0
            }
        }),
        eval_exact: Box::new(move |params| {
            let f = synth_2d(op, params);
            let tf = op.apply(&f)?;
            let i = norm_2d(&f, in_norm)?;
            let o = norm_2d(&tf, out_norm)?;
            Ok(if i > 0.0 { o / i } else { 0.0 })
        }),
        synth_cells: Box::new(move |params| synth_2d(op, params).into_values()),
    };
    run_ratio_search(&search, budget, warm)
}

/// Labeled sparse families per threshold, norms of the built input and
/// its `Pi2` image, and the strict square-function lower bound check on
/// the covered cells.
#[derive(Debug, Clone)]
pub struct LevelWitnessReport {
    pub q: f64,
    pub t: f64,
    pub family: RectFamily,
    pub input_norm: f64,
    pub output_norm: f64,
    pub ratio: f64,
    pub level_check: bool,
    pub min_margin: f64,
}

/// Builds the structured lower-bound input for `Pi2` from the dyadic
/// level sets of the strong maximal function of `g`.
///
/// For each threshold `2^k` in the dyadic span of `M(g)`, the maximal
/// cancellative rectangles of the level set are thinned to a ½-sparse
/// family `C_k`; each rectangle gets the largest such `k` as label, and
/// the input is `f = Σ 2^{t·label(R)} |R|^{1/2} h_R` with `t = r/p`. The
/// report carries `‖f‖` in the square-function `p`-norm, the image norm
/// at `q` with `1/q = 1/p + 1/r`, their ratio, and the verification that
/// the image's square function exceeds `2^{(1+t)k}` on every cell
/// covered by `C_k`.
pub fn level_set_witness(g: &Signal2D, p: f64, r: f64) -> Result<(Signal2D, LevelWitnessReport)> {
    if p <= 0.0 || !p.is_finite() || r <= 0.0 || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "exponents must be positive and finite, got p = {p}, r = {r}"
        )));
    }
    let grid = g.grid();
    let m = strong_maximal_2d(g);
    let range = dyadic_threshold_range(m.values())
        .ok_or_else(|| Error::Degenerate("strong maximal function vanishes".into()))?;
    let t = r / p;
    let q = 1.0 / (1.0 / p + 1.0 / r);

    let mut selected: Vec<(i32, Vec<DyadicRectangle>)> = Vec::new();
    for k in range {
        let fam = level_set_rectangles_capped(g, 2f64.powi(k));
        if fam.is_empty() {
            continue;
        }
        let sf = sparse_extract(&fam);
        selected.push((k, sf.family().rects().to_vec()));
    }
    if selected.is_empty() {
        return Err(Error::Degenerate(
            "no cancellative level-set rectangles at any threshold".into(),
        ));
    }

    // Largest threshold index wins as the label; thresholds ascend here.
    let mut labels: BTreeMap<(u32, u64, u32, u64), i32> = BTreeMap::new();
    for (k, rects) in &selected {
        for rect in rects {
            labels.insert(
                (
                    rect.x.level(),
                    rect.x.index(),
                    rect.y.level(),
                    rect.y.index(),
                ),
                *k,
            );
        }
    }

    let mut coeffs = HaarCoeffs2D::zeros(grid);
    let mut rects = Vec::with_capacity(labels.len());
    let mut label_vec = Vec::with_capacity(labels.len());
    for (&(lx, kx, ly, ky), &k) in &labels {
        let rect = DyadicRectangle::from_parts(lx, kx, ly, ky)?;
        coeffs.set_cc(&rect, 2f64.powf(t * k as f64) * rect.measure().sqrt())?;
        rects.push(rect);
        label_vec.push(k);
    }
    let mut family = RectFamily::from_rects(grid, rects)?;
    family.set_labels(label_vec)?;

    let f = coeffs.inverse();
    let input_norm = norm_2d(&f, NormKind::HpSquare(p))?;
    let image = NamedOperator2D::new(OperatorKind2D::Pi2, g.clone()).apply(&f)?;
    let output_norm = norm_2d(&image, NormKind::HpSquare(q))?;
    let ratio = output_norm / input_norm;

    let sq = square_2d(&image);
    let mut level_check = true;
    let mut min_margin = f64::INFINITY;
    for (k, rects) in &selected {
        let threshold = 2f64.powf((1.0 + t) * *k as f64);
        let mut covered = CellSet::for_grid(grid);
        for rect in rects {
            covered.insert_rect(grid, rect);
        }
        for cell in covered.iter() {
            let v = sq.values()[cell];
            min_margin = min_margin.min(v / threshold);
            if v <= threshold || v.is_nan() {
                level_check = false;
            }
        }
    }

    let report = LevelWitnessReport {
        q,
        t,
        family,
        input_norm,
        output_norm,
        ratio,
        level_check,
        min_margin,
    };
    Ok((f, report))
}

/// Per-row outcome inside [`RowWitnessReport`]: the row interval, the
/// one-dimensional search value for its slice symbol, and the symbol's
/// coefficient norm.
#[derive(Debug, Clone)]
pub struct RowReport {
    pub interval: DyadicInterval,
    pub value: f64,
    pub symbol_norm: f64,
}

#[derive(Debug, Clone)]
pub struct RowWitnessReport {
    pub q: f64,
    pub rows: Vec<RowReport>,
    pub input_norm: f64,
    pub output_norm: f64,
    pub ratio: f64,
    pub slice_quantity: f64,
}

fn haar_value(level: u32, index: u64, resolution: u32, cell: u64) -> f64 {
    let span = 1u64 << (resolution - level);
    let start = index * span;
    debug_assert!(cell >= start && cell < start + span);
    if cell < start + span / 2 {
        pow2_half(level as i32)
    } else {
        -pow2_half(level as i32)
    }
}

/// Builds the structured lower-bound input for `Pi3` by searching each
/// row's slice symbol separately.
///
/// For every interval `J` in `rows`, the one-parameter symbol with
/// coefficients `⟨g_I⟩_J` is attacked by a warm-started 1D search on the
/// classical paraproduct from `H^p` to `H^q`, `1/q = 1/p + 1/r`; each
/// unit-normalized witness `f_J` enters the assembled input
/// `f(x,y) = Σ_J |J|^{1/2} f_J(x) h_J(y)`. The report compares the mixed
/// square-maximal input norm against the image's square-function norm
/// and records the aggregate slice quantity
/// `Σ_J ∫ (Σ_I ⟨g_I⟩_J² χ_I/|I|)^{r/2}`.
pub fn row_slice_witness(
    g: &Signal2D,
    p: f64,
    r: f64,
    rows: &[DyadicInterval],
    budget: &SearchBudget,
) -> Result<(Signal2D, RowWitnessReport)> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("empty row set".into()));
    }
    if p <= 0.0 || !p.is_finite() || r <= 0.0 || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "exponents must be positive and finite, got p = {p}, r = {r}"
        )));
    }
    let grid = g.grid();
    let n1 = grid.n1();
    let n2 = grid.n2();
    for row in rows {
        if row.level() >= n2 {
            return Err(Error::InvalidParameter(format!(
                "row interval at level {} admits no cancellative Haar function at resolution {n2}",
                row.level()
            )));
        }
    }
    for (i, a) in rows.iter().enumerate() {
        for b in rows.iter().skip(i + 1) {
            if a.contains(b) || b.contains(a) {
                return Err(Error::InvalidParameter(
                    "row intervals must be pairwise disjoint".into(),
                ));
            }
        }
    }

    let q = 1.0 / (1.0 / p + 1.0 / r);
    let pyramids = MixedPyramid::build(g);
    let x_grid = grid.x_axis();
    let x_cells = grid.x_cells();
    let mut assembled = Signal2D::zeros(grid);
    let mut warm: Option<Vec<f64>> = None;
    let mut row_reports = Vec::with_capacity(rows.len());
    let mut symbols: Vec<Vec<f64>> = Vec::with_capacity(rows.len());

    for row in rows {
        let mut details = vec![0.0; x_cells - 1];
        for jx in 0..n1 {
            for kx in 0..(1u64 << jx) {
                details[heap_offset(jx, kx)] = pyramids.haar_avg(jx, row.level(), kx, row.index());
            }
        }
        let symbol_norm = l2(&details);
        symbols.push(details.clone());
        if symbol_norm == 0.0 {
            row_reports.push(RowReport {
                interval: *row,
                value: 0.0,
                symbol_norm,
            });
            continue;
        }

        let symbol = HaarCoeffs1D::from_parts(x_grid, 0.0, details)?.inverse();
        let op = NamedOperator1D::new(OperatorKind1D::PiG, symbol);
        let report = opnorm_search_1d_from(
            &op,
            NormKind::HpSquare(p),
            NormKind::HpSquare(q),
            budget,
            warm.as_deref(),
        )?;
        let cells = report.witness.clone().unwrap_or_else(|| vec![0.0; x_cells]);
        let mut f_row = Signal1D::new(x_grid, cells)?;
        let row_norm = norm_1d(&f_row, NormKind::HpSquare(p))?;
        if row_norm > 0.0 {
            f_row = f_row.scaled(1.0 / row_norm);
        }
        warm = Some(HaarCoeffs1D::forward(&f_row).detail().to_vec());

        let scale = row.measure().sqrt();
        let span = 1u64 << (n2 - row.level());
        let start = row.index() * span;
        for iy in start..start + span {
            let h = haar_value(row.level(), row.index(), n2, iy);
            for ix in 0..x_cells as u64 {
                let idx = grid.cell_index(ix, iy);
                assembled.values_mut()[idx] += scale * f_row.values()[ix as usize] * h;
            }
        }
        row_reports.push(RowReport {
            interval: *row,
            value: report.value,
            symbol_norm,
        });
    }

    let input_norm = lp_norm_2d(&mixed_operator(&assembled, MixedKind::S2M1), p)?;
    let image = NamedOperator2D::new(OperatorKind2D::Pi3, g.clone()).apply(&assembled)?;
    let output_norm = norm_2d(&image, NormKind::HpSquare(q))?;
    let ratio = if input_norm > 0.0 {
        output_norm / input_norm
    } else {
        0.0
    };

    // Per row, integrate (sum over I of coeff^2 / |I|)^{r/2} in x.
    let mut slice_quantity = 0.0;
    for details in &symbols {
        let mut total = 0.0;
        for ix in 0..x_cells as u64 {
            let mut density = 0.0;
            for jx in 0..n1 {
                let kx = ix >> (n1 - jx);
                let c = details[heap_offset(jx, kx)];
                density += c * c * 2f64.powi(jx as i32);
            }
            total += density.powf(r / 2.0);
        }
        slice_quantity += total / x_cells as f64;
    }

    let report = RowWitnessReport {
        q,
        rows: row_reports,
        input_norm,
        output_norm,
        ratio,
        slice_quantity,
    };
    Ok((assembled, report))
}

/// Rescaled coefficient matrix seen from one finest cell: entry
/// `(jx, jy)` is the coefficient of the level-`(jx, jy)` rectangle
/// containing the cell, divided by the square root of its measure.
#[derive(Debug, Clone)]
pub struct PointMatrix {
    pub ix: u64,
    pub iy: u64,
    pub entries: DMatrix<f64>,
}

pub fn point_matrix(g: &HaarCoeffs2D, ix: u64, iy: u64) -> Result<PointMatrix> {
    let grid = g.grid();
    if ix >= grid.x_cells() as u64 || iy >= grid.y_cells() as u64 {
        return Err(Error::InvalidParameter(format!(
            "cell ({ix}, {iy}) outside a {}x{} grid",
            grid.x_cells(),
            grid.y_cells()
        )));
    }
    let n1 = grid.n1();
    let n2 = grid.n2();
    let entries = DMatrix::from_fn(n1 as usize, n2 as usize, |jxi, jyi| {
        let jx = jxi as u32;
        let jy = jyi as u32;
        let rect = DyadicRectangle::from_parts(jx, ix >> (n1 - jx), jy, iy >> (n2 - jy))
            .expect("containing rectangle");
        g.cc_at(&rect).expect("cancellative levels") / rect.measure().sqrt()
    });
    Ok(PointMatrix { ix, iy, entries })
}

/// Upper bound for the `Pi4` operator norm: the largest spectral norm of
/// the per-cell rescaled coefficient matrices.
pub fn pi4_matrix_bound(g: &HaarCoeffs2D) -> OpNormReport {
    let grid = g.grid();
    let mut value = 0.0f64;
    if grid.n1() > 0 && grid.n2() > 0 {
        for ix in 0..grid.x_cells() as u64 {
            for iy in 0..grid.y_cells() as u64 {
                let pm = point_matrix(g, ix, iy).expect("cell in range");
                value = value.max(pm.entries.singular_values().max());
            }
        }
    }
    OpNormReport {
        value,
        witness: None,
        method: Method::MatrixViewBound,
        bound_type: BoundType::Upper,
        diagnostics: Diagnostics {
            iterations: 0,
            restarts: 0,
            residual: 0.0,
            seed: None,
            converged: true,
        },
    }
}

/// Sylvester doubling: a ±1 matrix with `H Hᵀ = n I`; `n` must be a
/// power of two.
pub fn sylvester_hadamard(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "Hadamard order must be a positive power of two, got {n}"
        )));
    }
    let mut m = DMatrix::from_element(1, 1, 1.0);
    while m.nrows() < n {
        let s = m.nrows();
        m = DMatrix::from_fn(2 * s, 2 * s, |i, j| {
            let v = m[(i % s, j % s)];
            if i >= s && j >= s {
                -v
            } else {
                v
            }
        });
    }
    Ok(m)
}

fn check_example_grid(grid: Grid2D, n: usize) -> Result<()> {
    if grid.n1() != grid.n2() {
        return Err(Error::DimensionMismatch(format!(
            "square grid required, got ({}, {})",
            grid.n1(),
            grid.n2()
        )));
    }
    if n == 0 || (grid.n1() as usize) < n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= n <= resolution, got n = {n} at resolution {}",
            grid.n1()
        )));
    }
    Ok(())
}

/// Coefficients `H_{i,j} |R|^{1/2}` on every rectangle of the first `n`
/// level generations, with `H` the Sylvester-Hadamard matrix. Their
/// per-cell matrix is a copy of `H`, so the matrix bound is `√n` while
/// the unit-square energy witness gives `n`.
pub fn build_hadamard_example(grid: Grid2D, n: usize) -> Result<HaarCoeffs2D> {
    check_example_grid(grid, n)?;
    let h = sylvester_hadamard(n)?;
    let mut coeffs = HaarCoeffs2D::zeros(grid);
    for i in 0..n as u32 {
        for j in 0..n as u32 {
            let sign = h[(i as usize, j as usize)];
            for kx in 0..(1u64 << i) {
                for ky in 0..(1u64 << j) {
                    let rect = DyadicRectangle::from_parts(i, kx, j, ky)?;
                    coeffs.set_cc(&rect, sign * rect.measure().sqrt())?;
                }
            }
        }
    }
    Ok(coeffs)
}

/// Diagonal variant: coefficient `|R|^{1/2}` on level-`(i, i)`
/// rectangles for `i < n`, zero elsewhere. Per-cell matrices are
/// identities (bound 1) while the unit-square witness gives `√n`.
pub fn build_identity_example(grid: Grid2D, n: usize) -> Result<HaarCoeffs2D> {
    check_example_grid(grid, n)?;
    let mut coeffs = HaarCoeffs2D::zeros(grid);
    for i in 0..n as u32 {
        for kx in 0..(1u64 << i) {
            for ky in 0..(1u64 << i) {
                let rect = DyadicRectangle::from_parts(i, kx, i, ky)?;
                coeffs.set_cc(&rect, rect.measure().sqrt())?;
            }
        }
    }
    Ok(coeffs)
}

/// Two-sided estimate of the sign-insensitive pairing norm
/// `sup Σ |g_R| ⟨|f_J|⟩_I ⟨|f'_I|⟩_J` over unit `L^p` × `L^{p'}` balls:
/// a projected-ascent lower bound with its witness pair, and the matrix
/// bound of `|g|` as upper bound.
#[derive(Debug, Clone)]
pub struct StrongerNormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub f: Signal2D,
    pub f_prime: Signal2D,
    pub diagnostics: Diagnostics,
}

fn abs_pairing(gabs: &HaarCoeffs2D, f: &Signal2D, fp: &Signal2D) -> f64 {
    let grid = gabs.grid();
    let x_grid = grid.x_axis();
    let y_grid = grid.y_axis();
    let x_cells = grid.x_cells();
    let y_cells = grid.y_cells();

    // Per cancellative y-interval: averages in x of |⟨f(x, ·), h_J⟩|.
    let col_coeffs: Vec<Vec<f64>> = (0..x_cells as u64)
        .map(|ix| HaarCoeffs1D::forward(&f.fixed_x_col(ix)).detail().to_vec())
        .collect();
    let f_avgs: Vec<AvgPyramid1D> = (0..y_cells - 1)
        .map(|joff| {
            let vals: Vec<f64> = (0..x_cells).map(|ix| col_coeffs[ix][joff].abs()).collect();
            AvgPyramid1D::build(&Signal1D::new(x_grid, vals).expect("x length"))
        })
        .collect();
    let rowp_coeffs: Vec<Vec<f64>> = (0..y_cells as u64)
        .map(|iy| HaarCoeffs1D::forward(&fp.fixed_y_row(iy)).detail().to_vec())
        .collect();
    let fp_avgs: Vec<AvgPyramid1D> = (0..x_cells - 1)
        .map(|ioff| {
            let vals: Vec<f64> = (0..y_cells).map(|iy| rowp_coeffs[iy][ioff].abs()).collect();
            AvgPyramid1D::build(&Signal1D::new(y_grid, vals).expect("y length"))
        })
        .collect();

    let mut total = 0.0;
    for (rect, v) in gabs.iter_cc() {
        if v == 0.0 {
            continue;
        }
        let ioff = heap_offset(rect.x.level(), rect.x.index());
        let joff = heap_offset(rect.y.level(), rect.y.index());
        let a = f_avgs[joff].avg(rect.x.level(), rect.x.index());
        let b = fp_avgs[ioff].avg(rect.y.level(), rect.y.index());
        total += v.abs() * a * b;
    }
    total
}

pub fn stronger_norm_estimate(
    g: &HaarCoeffs2D,
    p: f64,
    budget: &SearchBudget,
) -> Result<StrongerNormEstimate> {
    budget.validate()?;
    if p <= 1.0 || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "pairing norm needs finite p > 1, got {p}"
        )));
    }
    let p_conj = p / (p - 1.0);
    let grid = g.grid();
    let cells = grid.cells();

    let mut gabs = HaarCoeffs2D::zeros(grid);
    for (i, v) in g.cc().iter().enumerate() {
        gabs.cc_mut()[i] = v.abs();
    }
    let upper = pi4_matrix_bound(&gabs).value;

    let eval = |z: &[f64]| -> f64 {
        let f = Signal2D::new(grid, z[..cells].to_vec()).expect("length");
        let fp = Signal2D::new(grid, z[cells..].to_vec()).expect("length");
        let nf = lp_norm_2d(&f, p).expect("finite");
        let nfp = lp_norm_2d(&fp, p_conj).expect("finite");
        if nf > 0.0 && nfp > 0.0 {
            abs_pairing(&gabs, &f, &fp) / (nf * nfp)
        } else {
            0.0
        }
    };
    let clamp = |z: &mut [f64]| {
        z.iter_mut().for_each(|v| {
            if *v < 0.0 {
                *v = 0.0;
            }
        });
    };

    let dim = 2 * cells;
    let coord_cap = if dim > 128 { Some(64) } else { None };
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut best = (vec![0.0; dim], 0.0);
    let mut total_iters = 0;
    for _ in 0..budget.restarts {
        let init: Vec<f64> = (0..dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let (z, v, used) = ascend(init, &eval, &clamp, budget.iterations, coord_cap, &mut rng);
        total_iters += used;
        if v > best.1 {
            best = (z, v);
        }
    }

    let f = Signal2D::new(grid, best.0[..cells].to_vec())?;
    let f_prime = Signal2D::new(grid, best.0[cells..].to_vec())?;
    Ok(StrongerNormEstimate {
        lower: best.1,
        upper,
        f,
        f_prime,
        diagnostics: Diagnostics {
            iterations: total_iters,
            restarts: budget.restarts,
            residual: 0.0,
            seed: Some(budget.seed),
            converged: true,
        },
    })
}

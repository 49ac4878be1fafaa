//! Batch property suites over seeded corpora.
//!
//! Each suite runs one family of checks (transform calculus, product
//! expansion, dualities, pointwise dominations, sparse machinery, atomic
//! decomposition, operator norms, witness constructions, the
//! Hadamard/identity gap examples, product BMO bracketing, transpose
//! symmetry) and reports a pass/fail line per check with the measured
//! envelope. The command-line `verify` subcommand and the release gates
//! both drive these functions, so tolerances live here.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::atoms::atomic_decompose;
use crate::corpus::{
    cell_noise_1d as random_signal_1d, cell_noise_2d as random_signal_2d, gaussian_signal_1d,
    generate_corpus, Distribution,
};
use crate::dyadic::{DyadicRectangle, Grid1D, Grid2D};
use crate::error::{Error, Result};
use crate::functionals::{
    bmo_line, lp_norm_2d, mixed_operator, norm_2d, product_bmo_exact_coeffs,
    product_bmo_heuristic_coeffs, slice_bmo_sup, square_2d, strong_maximal_2d, MixedKind, NormKind,
};
use crate::haar::{HaarCoeffs1D, HaarCoeffs2D};
use crate::opnorm::{
    build_hadamard_example, build_identity_example, level_set_witness, opnorm_dense, opnorm_l2,
    opnorm_search_2d, pi4_matrix_bound, stronger_norm_estimate, SearchBudget,
};
use crate::paraproduct::{
    adjoint_pair_check_1d, adjoint_pair_check_2d, product_expansion_residual_1d,
    product_expansion_residual_2d, transpose_symmetry_check, NamedOperator1D, NamedOperator2D,
    OperatorKind1D, OperatorKind2D,
};
use crate::signal::{Signal1D, Signal2D};
use crate::sparse::{
    carleson_constant, generation_family, jn_profile, level_set_rectangles, sparse_extract,
    CarlesonMode, CellSet,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub lines: Vec<CheckLine>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.into(),
            lines: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.lines.push(CheckLine {
            name: name.into(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    /// Plain-text table, one line per check.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            let tag = if l.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "[{tag}] {}/{}: {}", self.suite, l.name, l.detail);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.suite,
            "passed": self.passed(),
            "checks": self.lines.iter().map(|l| serde_json::json!({
                "name": l.name,
                "passed": l.passed,
                "detail": l.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Haar roundtrip and Parseval identities on random signals, cycling
/// through resolutions up to `max_n` per axis.
pub fn check_calculus(count: usize, max_n: u32, seed: u64) -> Result<SuiteReport> {
    if count == 0 || max_n == 0 {
        return Err(Error::InvalidParameter(
            "count and max_n must be positive".into(),
        ));
    }
    let mut r = rng(seed);
    let mut rt1 = 0.0f64;
    let mut pv1 = 0.0f64;
    let mut rt2 = 0.0f64;
    let mut pv2 = 0.0f64;
    for i in 0..count {
        let n = 1 + (i as u32 % max_n);
        let f = random_signal_1d(Grid1D::new(n)?, &mut r);
        let c = HaarCoeffs1D::forward(&f);
        rt1 = rt1.max(c.inverse().linf_diff(&f)?);
        pv1 = pv1.max((c.norm_l2() - lp_1d(&f)).abs());

        let n1 = 1 + (i as u32 % max_n);
        let n2 = 1 + ((i as u32 / max_n) % max_n);
        let g = random_signal_2d(Grid2D::new(n1, n2)?, &mut r);
        let c2 = HaarCoeffs2D::forward(&g);
        rt2 = rt2.max(c2.inverse().linf_diff(&g)?);
        pv2 = pv2.max((c2.norm_l2() - lp_norm_2d(&g, 2.0)?).abs());
    }
    let tol = 1e-10;
    let mut rep = SuiteReport::new("calculus");
    rep.push(
        "roundtrip-1d",
        rt1 <= tol,
        format!("max abs error {rt1:.3e}"),
    );
    rep.push(
        "parseval-1d",
        pv1 <= tol,
        format!("max abs error {pv1:.3e}"),
    );
    rep.push(
        "roundtrip-2d",
        rt2 <= tol,
        format!("max abs error {rt2:.3e}"),
    );
    rep.push(
        "parseval-2d",
        pv2 <= tol,
        format!("max abs error {pv2:.3e}"),
    );
    Ok(rep)
}

fn lp_1d(f: &Signal1D) -> f64 {
    crate::functionals::lp_norm_1d(f, 2.0).expect("valid exponent")
}

/// Pointwise product expansion residuals in one and two dimensions.
pub fn check_expansion(count: usize, seed: u64) -> Result<SuiteReport> {
    let mut r = rng(seed);
    let g1 = Grid1D::new(6)?;
    let g2 = Grid2D::new(4, 4)?;
    let mut worst1 = 0.0f64;
    let mut worst2 = 0.0f64;
    for _ in 0..count {
        let f = random_signal_1d(g1, &mut r);
        let g = random_signal_1d(g1, &mut r);
        worst1 = worst1.max(product_expansion_residual_1d(&f, &g)?);
        let f = random_signal_2d(g2, &mut r);
        let g = random_signal_2d(g2, &mut r);
        worst2 = worst2.max(product_expansion_residual_2d(&f, &g)?);
    }
    let tol = 1e-10;
    let mut rep = SuiteReport::new("expansion");
    rep.push(
        "product-1d",
        worst1 <= tol,
        format!("max residual {worst1:.3e}"),
    );
    rep.push(
        "product-2d",
        worst2 <= tol,
        format!("max residual {worst2:.3e}"),
    );
    Ok(rep)
}

/// Adjoint pairings for every named operator, including the symbol-moving
/// cross identity for the fourth bi-parameter form.
pub fn check_duality(count: usize, seed: u64) -> Result<SuiteReport> {
    let mut r = rng(seed);
    let g1 = Grid1D::new(5)?;
    let g2 = Grid2D::new(3, 3)?;
    let mut worst1 = 0.0f64;
    let mut worst2 = 0.0f64;
    for _ in 0..count {
        let g = random_signal_1d(g1, &mut r);
        let f = random_signal_1d(g1, &mut r);
        let fp = random_signal_1d(g1, &mut r);
        for kind in [
            OperatorKind1D::PiG,
            OperatorKind1D::PiGPrime,
            OperatorKind1D::PiGDoublePrime,
        ] {
            let op = NamedOperator1D::new(kind, g.clone());
            let (a, b) = adjoint_pair_check_1d(&op, &f, &fp)?;
            worst1 = worst1.max((a - b).abs());
        }
        let g = random_signal_2d(g2, &mut r);
        let f = random_signal_2d(g2, &mut r);
        let fp = random_signal_2d(g2, &mut r);
        for kind in [
            OperatorKind2D::Pi1,
            OperatorKind2D::Pi1Adjoint,
            OperatorKind2D::Pi2,
            OperatorKind2D::Pi3,
            OperatorKind2D::Pi4,
        ] {
            let op = NamedOperator2D::new(kind, g.clone());
            let (a, b) = adjoint_pair_check_2d(&op, &f, &fp)?;
            worst2 = worst2.max((a - b).abs());
        }
    }
    let tol = 1e-10;
    let mut rep = SuiteReport::new("duality");
    rep.push(
        "pairings-1d",
        worst1 <= tol,
        format!("max residual {worst1:.3e}"),
    );
    rep.push(
        "pairings-2d",
        worst2 <= tol,
        format!("max residual {worst2:.3e}"),
    );
    Ok(rep)
}

fn max_violation(lhs: &Signal2D, rhs: &Signal2D) -> f64 {
    lhs.values()
        .iter()
        .zip(rhs.values())
        .fold(f64::NEG_INFINITY, |m, (a, b)| m.max(a - b))
}

/// Cell-exact domination chains between square functions, maximal
/// functions, and their mixed compositions.
pub fn check_pointwise(count: usize, n: u32, seed: u64) -> Result<SuiteReport> {
    let grid = Grid2D::new(n, n)?;
    let mut r = rng(seed);
    let mut v1 = f64::NEG_INFINITY;
    let mut v2 = f64::NEG_INFINITY;
    let mut v3 = f64::NEG_INFINITY;
    for _ in 0..count {
        let f = random_signal_2d(grid, &mut r);
        let g = random_signal_2d(grid, &mut r);

        let pi2 = NamedOperator2D::new(OperatorKind2D::Pi2, g.clone());
        let lhs = square_2d(&pi2.apply(&f)?);
        let sf = square_2d(&f);
        let mg = strong_maximal_2d(&g);
        let prod = Signal2D::new(
            grid,
            sf.values()
                .iter()
                .zip(mg.values())
                .map(|(a, b)| a * b)
                .collect(),
        )?;
        v1 = v1.max(max_violation(&lhs, &prod));

        let pi3 = NamedOperator2D::new(OperatorKind2D::Pi3, g.clone());
        let lhs = square_2d(&pi3.apply(&f)?);
        let s2m1 = mixed_operator(&f, MixedKind::S2M1);
        let m2s1 = mixed_operator(&g, MixedKind::M2S1);
        let prod = Signal2D::new(
            grid,
            s2m1.values()
                .iter()
                .zip(m2s1.values())
                .map(|(a, b)| a * b)
                .collect(),
        )?;
        v2 = v2.max(max_violation(&lhs, &prod));

        let m1s2 = mixed_operator(&f, MixedKind::M1S2);
        let s2m1 = mixed_operator(&f, MixedKind::S2M1);
        v3 = v3.max(max_violation(&m1s2, &s2m1));
    }
    let tol = 1e-12;
    let mut rep = SuiteReport::new("pointwise");
    rep.push(
        "square-of-second-form",
        v1 <= tol,
        format!("worst margin {v1:.3e}"),
    );
    rep.push(
        "square-of-third-form",
        v2 <= tol,
        format!("worst margin {v2:.3e}"),
    );
    rep.push(
        "mixed-compositions",
        v3 <= tol,
        format!("worst margin {v3:.3e}"),
    );
    Ok(rep)
}

/// Sparse extraction density/disjointness, level-set union identity,
/// covering constants of the generation families, and the distributional
/// profile envelopes.
pub fn check_sparse(count: usize, seed: u64) -> Result<SuiteReport> {
    let grid = Grid2D::new(4, 4)?;
    let mut r = rng(seed);
    let mut extract_ok = true;
    let mut union_ok = true;
    let mut jn: Vec<(f64, f64, f64)> = vec![(f64::INFINITY, f64::NEG_INFINITY, 0.0); 3];
    let ps = [0.5, 1.0, 2.0];
    for _ in 0..count {
        let g = random_signal_2d(grid, &mut r);
        let m = strong_maximal_2d(&g);
        let top = m.values().iter().fold(0.0f64, |a, v| a.max(*v));
        for j in 1..=3 {
            let lambda = top * 2f64.powi(-j);
            let fam = level_set_rectangles(&g, lambda);
            if fam.is_empty() {
                continue;
            }
            let sf = sparse_extract(&fam);
            if sf.validate().is_err() {
                extract_ok = false;
            }
            let union = fam.union();
            let level = CellSet::superlevel(&m, lambda);
            if !union.is_subset_of(&level) || !level.is_subset_of(&union) {
                union_ok = false;
            }
            for (slot, p) in ps.iter().enumerate() {
                let v = jn_profile(&sf, *p)?;
                let e = &mut jn[slot];
                e.0 = e.0.min(v);
                e.1 = e.1.max(v);
                e.2 = v;
            }
        }
    }
    let mut rep = SuiteReport::new("sparse");
    rep.push(
        "extract-density",
        extract_ok,
        "half-density and disjointness".into(),
    );
    rep.push(
        "level-set-union",
        union_ok,
        "union matches maximal superlevel".into(),
    );
    let mut carleson_ok = true;
    let mut carleson_detail = String::new();
    for n in [1u32, 2] {
        let fam = generation_family(Grid2D::new(2, 2)?, n)?;
        let c = carleson_constant(&fam, CarlesonMode::Exact)?;
        let want = (n * n) as f64;
        if c != want {
            carleson_ok = false;
        }
        let _ = write!(carleson_detail, "n={n}: {c} ");
    }
    rep.push(
        "carleson-generations",
        carleson_ok,
        carleson_detail.trim().into(),
    );
    for (slot, p) in ps.iter().enumerate() {
        let (lo, hi, _) = jn[slot];
        let ok = lo.is_finite() && hi.is_finite() && lo >= 0.0;
        rep.push(
            &format!("jn-profile-p{p}"),
            ok,
            format!("envelope [{lo:.4e}, {hi:.4e}]"),
        );
    }
    Ok(rep)
}

/// Atomic decomposition invariants plus the quasi-norm envelope of the
/// scalar sums against the square-function norm.
pub fn check_atomic(count: usize, seed: u64) -> Result<SuiteReport> {
    let grid = Grid2D::new(4, 4)?;
    let mut r = rng(seed);
    let mut rep = SuiteReport::new("atomic");
    let mut recon_worst = 0.0f64;
    let mut valid_ok = true;
    let mut env = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    let ps = [0.5, 1.0, 2.0];
    for _ in 0..count {
        let f = random_signal_2d(grid, &mut r);
        let mut c = HaarCoeffs2D::forward(&f);
        c.set_mm(0.0);
        c.cm_mut().iter_mut().for_each(|v| *v = 0.0);
        c.mc_mut().iter_mut().for_each(|v| *v = 0.0);
        let f_cc = c.inverse();
        for (slot, p) in ps.iter().enumerate() {
            let s = if *p > 1.0 { 2.0 * p } else { 2.0 };
            let d = atomic_decompose(&f, *p, s)?;
            if d.validate().is_err() {
                valid_ok = false;
            }
            recon_worst = recon_worst.max(d.reconstruction().linf_diff(&f_cc)?);
            let denom = norm_2d(&f_cc, NormKind::HpSquare(*p))?;
            if denom > 0.0 {
                let ratio = d.hp_estimate() / denom;
                env[slot].0 = env[slot].0.min(ratio);
                env[slot].1 = env[slot].1.max(ratio);
            }
        }
    }
    rep.push(
        "invariants",
        valid_ok,
        "support, scalars, atom norms".into(),
    );
    rep.push(
        "reconstruction",
        recon_worst <= 1e-10,
        format!("max abs error {recon_worst:.3e}"),
    );
    for (slot, p) in ps.iter().enumerate() {
        let (lo, hi) = env[slot];
        let ok = lo >= 1e-2 && hi <= 1e2;
        rep.push(
            &format!("envelope-p{p}"),
            ok,
            format!("scalar-sum/square-norm in [{lo:.4e}, {hi:.4e}]"),
        );
    }
    Ok(rep)
}

/// Power iteration against the dense spectral oracle on every named
/// operator, plus the rank-one closed form.
pub fn check_opnorm(seed: u64) -> Result<SuiteReport> {
    let mut r = rng(seed);
    let g2 = Grid2D::new(3, 3)?;
    let g1 = Grid1D::new(3)?;
    let mut rep = SuiteReport::new("opnorm");
    let mut worst = 0.0f64;
    let sym2 = random_signal_2d(g2, &mut r);
    for kind in [
        OperatorKind2D::Pi1,
        OperatorKind2D::Pi1Adjoint,
        OperatorKind2D::Pi2,
        OperatorKind2D::Pi3,
        OperatorKind2D::Pi4,
    ] {
        let op = NamedOperator2D::new(kind, sym2.clone());
        let power = opnorm_l2(&op).value;
        let dense = opnorm_dense(&op)?;
        if dense > 0.0 {
            worst = worst.max((power - dense).abs() / dense);
        }
    }
    let sym1 = random_signal_1d(g1, &mut r);
    for kind in [
        OperatorKind1D::PiG,
        OperatorKind1D::PiGPrime,
        OperatorKind1D::PiGDoublePrime,
    ] {
        let op = NamedOperator1D::new(kind, sym1.clone());
        let power = opnorm_l2(&op).value;
        let dense = opnorm_dense(&op)?;
        if dense > 0.0 {
            worst = worst.max((power - dense).abs() / dense);
        }
    }
    rep.push(
        "spectral-oracle",
        worst <= 1e-6,
        format!("max relative gap {worst:.3e}"),
    );

    let rect = DyadicRectangle::from_parts(1, 0, 2, 1)?;
    let mut hc = HaarCoeffs2D::zeros(g2);
    hc.set_cc(&rect, 1.0)?;
    let op = NamedOperator2D::new(OperatorKind2D::Pi1, hc.inverse());
    let value = opnorm_l2(&op).value;
    let want = 1.0 / rect.measure().sqrt();
    rep.push(
        "rank-one",
        (value - want).abs() <= 1e-8,
        format!("value {value:.12} vs {want:.12}"),
    );
    Ok(rep)
}

/// Level-set witness construction at `(p, r) = (2, 2)`: per-symbol
/// strict level check and the ratio envelope against the symbol norm.
pub fn check_level_witness(count: usize, seed: u64) -> Result<SuiteReport> {
    let grid = Grid2D::new(5, 5)?;
    let corpus = generate_corpus(grid, Distribution::Gaussian, count, seed)?;
    let mut level_ok = true;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut big_c = f64::NEG_INFINITY;
    let mut small_c = f64::INFINITY;
    for g in &corpus {
        let (_, w) = level_set_witness(g, 2.0, 2.0)?;
        if !w.level_check {
            level_ok = false;
        }
        let gn = norm_2d(g, NormKind::HpSquare(2.0))?;
        if gn <= 0.0 {
            continue;
        }
        let envelope = w.ratio / gn;
        lo = lo.min(envelope);
        hi = hi.max(envelope);
        big_c = big_c.max(w.input_norm / gn);
        small_c = small_c.min(envelope);
    }
    let mut rep = SuiteReport::new("level-witness");
    rep.push(
        "strict-levels",
        level_ok,
        "square function exceeds its tier".into(),
    );
    rep.push(
        "ratio-envelope",
        lo >= 1.0 / 64.0 && hi <= 64.0,
        format!("ratio/symbol-norm in [{lo:.4e}, {hi:.4e}], C={big_c:.4e}, c={small_c:.4e}"),
    );
    Ok(rep)
}

/// Tensor symbols `b ⊗ 1`: the slice norm collapses to the line norm of
/// `b`, and search lower bounds stay within a fixed bracket of it.
pub fn check_tensor_search(count: usize, seed: u64, budget: &SearchBudget) -> Result<SuiteReport> {
    let axis = Grid1D::new(4)?;
    let grid = Grid2D::new(4, 4)?;
    let mut r = rng(seed);
    let mut collapse_worst = 0.0f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..count {
        let b = gaussian_signal_1d(axis, &mut r);
        let vals: Vec<f64> = (0..grid.x_cells())
            .flat_map(|ix| std::iter::repeat_n(b.value(ix as u64), grid.y_cells()))
            .collect();
        let g = Signal2D::new(grid, vals)?;
        let line = bmo_line(&b);
        collapse_worst = collapse_worst.max((slice_bmo_sup(&g) - line).abs());
        if line <= 0.0 {
            continue;
        }
        let op = NamedOperator2D::new(OperatorKind2D::Pi3, g);
        for p in [1.0, 2.0] {
            let found =
                opnorm_search_2d(&op, NormKind::HpSquare(p), NormKind::HpSquare(p), budget)?;
            let ratio = found.value / line;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    let mut rep = SuiteReport::new("tensor");
    rep.push(
        "slice-collapse",
        collapse_worst <= 1e-12,
        format!("max abs gap {collapse_worst:.3e}"),
    );
    rep.push(
        "search-envelope",
        lo >= 1.0 / 64.0 && hi <= 64.0,
        format!("search/line-norm in [{lo:.4e}, {hi:.4e}]"),
    );
    Ok(rep)
}

fn cc_energy_sqrt(c: &HaarCoeffs2D) -> f64 {
    crate::sums::pairwise_map_sum(c.cc().len(), &|i| c.cc()[i] * c.cc()[i]).sqrt()
}

/// The doubling-matrix and diagonal coefficient families: matrix view
/// bounds, unit-square energy witnesses, spectral norms, and the
/// sign-insensitive pairing estimate.
pub fn check_examples(ns: &[usize], budget: &SearchBudget) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("examples");
    for &n in ns {
        let grid = Grid2D::new(n as u32, n as u32)?;
        let root_n = (n as f64).sqrt();

        let had = build_hadamard_example(grid, n)?;
        let mb = pi4_matrix_bound(&had).value;
        rep.push(
            &format!("matrix-bound-n{n}"),
            (mb - root_n).abs() <= 1e-9,
            format!("{mb:.12} vs sqrt({n})"),
        );
        let w = cc_energy_sqrt(&had);
        rep.push(
            &format!("square-witness-n{n}"),
            (w - n as f64).abs() <= 1e-12 * n as f64,
            format!("{w:.12} vs {n}"),
        );
        let op = NamedOperator2D::from_coeffs(OperatorKind2D::Pi4, had.clone());
        let l2 = opnorm_l2(&op).value;
        rep.push(
            &format!("spectral-gap-n{n}"),
            l2 <= root_n + 1e-6,
            format!("spectral {l2:.9} <= sqrt({n}) + 1e-6"),
        );
        let heur = product_bmo_heuristic_coeffs(&had);
        rep.push(
            &format!("bmo-floor-n{n}"),
            heur >= n as f64 - 1e-9,
            format!("heuristic {heur:.9} >= {n}"),
        );

        let id = build_identity_example(grid, n)?;
        let mb = pi4_matrix_bound(&id).value;
        let w = cc_energy_sqrt(&id);
        rep.push(
            &format!("identity-matrix-bound-n{n}"),
            (mb - 1.0).abs() <= 1e-9,
            format!("{mb:.12} vs 1"),
        );
        rep.push(
            &format!("identity-witness-n{n}"),
            (w - root_n).abs() <= 1e-12 * root_n.max(1.0),
            format!("{w:.12} vs sqrt({n})"),
        );
        let est = stronger_norm_estimate(&id, 2.0, budget)?;
        rep.push(
            &format!("identity-pairing-n{n}"),
            est.lower <= est.upper + 1e-6 && est.upper <= 2.0 + 1e-9,
            format!("pairing in [{:.6}, {:.6}] <= 2", est.lower, est.upper),
        );
    }
    Ok(rep)
}

fn single_rect_sup(c: &HaarCoeffs2D) -> f64 {
    let rects: Vec<(DyadicRectangle, f64)> = c.iter_cc().collect();
    let mut best = 0.0f64;
    for (r, _) in &rects {
        let mut energy = 0.0;
        for (rp, v) in &rects {
            if r.contains(rp) {
                energy += v * v;
            }
        }
        best = best.max((energy / r.measure()).sqrt());
    }
    best
}

/// Brackets the product BMO heuristic between the single-rectangle sup
/// and the exact brute-force value, and checks sign-flip invariance of
/// the exact value.
pub fn check_product_bmo(count: usize, seed: u64) -> Result<SuiteReport> {
    let grid = Grid2D::new(2, 2)?;
    let mut r = rng(seed);
    let mut upper_ok = true;
    let mut lower_ok = true;
    let mut flip_worst = 0.0f64;
    for _ in 0..count {
        let f = random_signal_2d(grid, &mut r);
        let c = HaarCoeffs2D::forward(&f);
        let exact = product_bmo_exact_coeffs(&c)?;
        let heur = product_bmo_heuristic_coeffs(&c);
        if heur > exact + 1e-12 {
            upper_ok = false;
        }
        if heur < single_rect_sup(&c) - 1e-12 {
            lower_ok = false;
        }
        let mut flipped = c.clone();
        for v in flipped.cc_mut() {
            if rand::Rng::gen_bool(&mut r, 0.5) {
                *v = -*v;
            }
        }
        let exact_flipped = product_bmo_exact_coeffs(&flipped)?;
        flip_worst = flip_worst.max((exact - exact_flipped).abs());
    }
    let mut rep = SuiteReport::new("product-bmo");
    rep.push(
        "heuristic-below-exact",
        upper_ok,
        "brute force dominates".into(),
    );
    rep.push(
        "heuristic-above-rectangles",
        lower_ok,
        "single-rectangle floor".into(),
    );
    rep.push(
        "sign-invariance",
        flip_worst <= 1e-12,
        format!("max abs change {flip_worst:.3e}"),
    );
    Ok(rep)
}

/// Transpose identity for coefficient-symmetric symbols.
pub fn check_transpose(count: usize, seed: u64) -> Result<SuiteReport> {
    let grid = Grid2D::new(4, 4)?;
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let raw = HaarCoeffs2D::forward(&random_signal_2d(grid, &mut r));
        let t = raw.transposed();
        let mut sym = raw.clone();
        for (v, w) in sym.cc_mut().iter_mut().zip(t.cc()) {
            *v = 0.5 * (*v + w);
        }
        let f = random_signal_2d(grid, &mut r);
        worst = worst.max(transpose_symmetry_check(&sym, &f)?);
    }
    let mut rep = SuiteReport::new("transpose");
    rep.push(
        "symmetric-symbols",
        worst <= 1e-10,
        format!("max residual {worst:.3e}"),
    );
    Ok(rep)
}

/// Suite selector for the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Calculus,
    Expansion,
    Duality,
    Pointwise,
    Sparse,
    Atomic,
    Opnorm,
    LevelWitness,
    Tensor,
    Examples,
    ProductBmo,
    Transpose,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Calculus,
        Suite::Expansion,
        Suite::Duality,
        Suite::Pointwise,
        Suite::Sparse,
        Suite::Atomic,
        Suite::Opnorm,
        Suite::LevelWitness,
        Suite::Tensor,
        Suite::Examples,
        Suite::ProductBmo,
        Suite::Transpose,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            Suite::Calculus => "calculus",
            Suite::Expansion => "expansion",
            Suite::Duality => "duality",
            Suite::Pointwise => "pointwise",
            Suite::Sparse => "sparse",
            Suite::Atomic => "atomic",
            Suite::Opnorm => "opnorm",
            Suite::LevelWitness => "level-witness",
            Suite::Tensor => "tensor",
            Suite::Examples => "examples",
            Suite::ProductBmo => "product-bmo",
            Suite::Transpose => "transpose",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|v| v.token() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

/// Runs one suite with moderate command-line defaults; `count` and `n`
/// override the corpus size and grid resolution where they apply.
pub fn run_suite(
    suite: Suite,
    count: Option<usize>,
    n: Option<u32>,
    seed: u64,
) -> Result<SuiteReport> {
    let c = |d: usize| count.unwrap_or(d);
    match suite {
        Suite::Calculus => check_calculus(c(50), n.unwrap_or(6), seed),
        Suite::Expansion => check_expansion(c(25), seed),
        Suite::Duality => check_duality(c(25), seed),
        Suite::Pointwise => check_pointwise(c(50), n.unwrap_or(5), seed),
        Suite::Sparse => check_sparse(c(25), seed),
        Suite::Atomic => check_atomic(c(25), seed),
        Suite::Opnorm => check_opnorm(seed),
        Suite::LevelWitness => check_level_witness(c(10), seed),
        Suite::Tensor => check_tensor_search(
            c(3),
            seed,
            &SearchBudget {
                restarts: 3,
                iterations: 80,
                seed,
            },
        ),
        Suite::Examples => check_examples(
            &[2, 4],
            &SearchBudget {
                restarts: 2,
                iterations: 60,
                seed,
            },
        ),
        Suite::ProductBmo => check_product_bmo(c(20), seed),
        Suite::Transpose => check_transpose(c(20), seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_passes(rep: &SuiteReport) {
        assert!(rep.passed(), "suite failed:\n{}", rep.table());
        assert!(!rep.lines.is_empty());
    }

    #[test]
    fn calculus_suite_passes() {
        assert_passes(&check_calculus(20, 5, 1).unwrap());
    }

    #[test]
    fn expansion_suite_passes() {
        assert_passes(&check_expansion(10, 2).unwrap());
    }

    #[test]
    fn duality_suite_passes() {
        assert_passes(&check_duality(10, 3).unwrap());
    }

    #[test]
    fn pointwise_suite_passes() {
        assert_passes(&check_pointwise(10, 4, 4).unwrap());
    }

    #[test]
    fn sparse_suite_passes() {
        assert_passes(&check_sparse(10, 5).unwrap());
    }

    #[test]
    fn atomic_suite_passes() {
        assert_passes(&check_atomic(10, 6).unwrap());
    }

    #[test]
    fn opnorm_suite_passes() {
        assert_passes(&check_opnorm(7).unwrap());
    }

    #[test]
    fn level_witness_suite_passes() {
        assert_passes(&check_level_witness(5, 8).unwrap());
    }

    #[test]
    fn tensor_suite_passes() {
        let budget = SearchBudget {
            restarts: 2,
            iterations: 50,
            seed: 9,
        };
        assert_passes(&check_tensor_search(2, 9, &budget).unwrap());
    }

    #[test]
    fn examples_suite_passes_small() {
        let budget = SearchBudget {
            restarts: 1,
            iterations: 30,
            seed: 10,
        };
        assert_passes(&check_examples(&[2], &budget).unwrap());
    }

    #[test]
    fn product_bmo_suite_passes() {
        assert_passes(&check_product_bmo(5, 10).unwrap());
    }

    #[test]
    fn transpose_suite_passes() {
        assert_passes(&check_transpose(5, 11).unwrap());
    }

    #[test]
    fn suite_tokens_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.token().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
        let rep = run_suite(Suite::Expansion, Some(3), None, 1).unwrap();
        assert_passes(&rep);
        assert!(rep.to_json()["passed"].as_bool().unwrap());
        assert!(rep.table().contains("[PASS]"));
    }
}

//! Atoms supported on open sets and the contracting atomic decomposition.
//!
//! An atom is a cc-coefficient block whose rectangles all sit inside an
//! open set `Omega` (a union of finest cells), normalized so its signal
//! has `L^s` norm at most `|Omega|^{1/s}`. `atomic_decompose` splits the
//! cancellative part of a signal along the dyadic superlevel sets of its
//! square function, thinned so consecutive sets halve in measure, and
//! rescales each coefficient shell into an atom. The reconstruction
//! `sum a_i f_i` recovers the cancellative part exactly.

use crate::dyadic::Grid2D;
use crate::error::{Error, Result};
use crate::functionals::{dyadic_threshold_range, lp_norm_2d, square_2d_coeffs};
use crate::haar::HaarCoeffs2D;
use crate::paraproduct::{NamedOperator2D, OperatorKind2D};
use crate::signal::Signal2D;
use crate::sparse::{validate_contracting, CellSet};

/// Coefficient block supported inside an open set, with the `L^s`
/// normalization bound checked exactly.
#[derive(Debug, Clone)]
pub struct Atom {
    support: CellSet,
    coeffs: HaarCoeffs2D,
    s: f64,
}

impl Atom {
    pub fn new(support: CellSet, coeffs: HaarCoeffs2D, s: f64) -> Result<Self> {
        let atom = Atom { support, coeffs, s };
        atom.validate()?;
        Ok(atom)
    }

    pub fn grid(&self) -> Grid2D {
        self.coeffs.grid()
    }

    pub fn support(&self) -> &CellSet {
        &self.support
    }

    pub fn coeffs(&self) -> &HaarCoeffs2D {
        &self.coeffs
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }

    pub fn signal(&self) -> Signal2D {
        self.coeffs.inverse()
    }

    pub fn support_measure(&self) -> f64 {
        self.support.count() as f64 * self.grid().cell_measure()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.cc().iter().all(|v| *v == 0.0)
    }

    /// Checks the defining properties: pure cc block, every nonzero
    /// coefficient's rectangle inside the support, `L^s` norm within
    /// `|Omega|^{1/s}` up to 1e-12 slack.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid();
        if self.s <= 1.0 || !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "atom exponent s must be finite and > 1, got {}",
                self.s
            )));
        }
        if self.support.capacity() != grid.cells() {
            return Err(Error::GridMismatch(format!(
                "support sized for {} cells, grid has {}",
                self.support.capacity(),
                grid.cells()
            )));
        }
        if self.coeffs.mm() != 0.0
            || self.coeffs.cm().iter().any(|v| *v != 0.0)
            || self.coeffs.mc().iter().any(|v| *v != 0.0)
        {
            return Err(Error::Malformed(
                "atom carries non-cancellative coefficients".into(),
            ));
        }
        for (r, v) in self.coeffs.iter_cc() {
            if v != 0.0 && !grid.rect_cells(&r).all(|c| self.support.contains(c)) {
                return Err(Error::Malformed(format!(
                    "coefficient rectangle {r} escapes the support"
                )));
            }
        }
        if !self.is_zero() {
            let norm = lp_norm_2d(&self.signal(), self.s)?;
            let bound = self.support_measure().powf(1.0 / self.s);
            if norm > bound * (1.0 + 1e-12) + 1e-12 {
                return Err(Error::Malformed(format!(
                    "atom L^{} norm {norm} exceeds bound {bound}",
                    self.s
                )));
            }
        }
        Ok(())
    }
}

/// Contracting open sets, scalars, and atoms with
/// `sum a_i f_i = cancellative part of f`.
#[derive(Debug, Clone)]
pub struct AtomicDecomposition {
    grid: Grid2D,
    p: f64,
    s: f64,
    omegas: Vec<CellSet>,
    scalars: Vec<f64>,
    atoms: Vec<Atom>,
}

impl AtomicDecomposition {
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn exponent_p(&self) -> f64 {
        self.p
    }

    pub fn exponent_s(&self) -> f64 {
        self.s
    }

    pub fn omegas(&self) -> &[CellSet] {
        &self.omegas
    }

    pub fn scalars(&self) -> &[f64] {
        &self.scalars
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `sum a_i f_i` as a signal.
    pub fn reconstruction(&self) -> Signal2D {
        let mut acc = Signal2D::zeros(self.grid);
        for (a, atom) in self.scalars.iter().zip(&self.atoms) {
            acc = acc.add(&atom.signal().scaled(*a)).expect("same grid");
        }
        acc
    }

    /// `(sum a_i^p |Omega_i|)^{1/p}`, the atomic side of the Hardy-norm
    /// comparison.
    pub fn hp_estimate(&self) -> f64 {
        let cm = self.grid.cell_measure();
        let total: f64 = self
            .scalars
            .iter()
            .zip(&self.omegas)
            .map(|(a, o)| a.powf(self.p) * o.count() as f64 * cm)
            .sum();
        total.powf(1.0 / self.p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scalars.len() != self.atoms.len() || self.omegas.len() != self.atoms.len() {
            return Err(Error::LengthMismatch {
                got: self.scalars.len(),
                want: self.atoms.len(),
            });
        }
        validate_contracting(self.grid, &self.omegas)?;
        for (a, atom) in self.scalars.iter().zip(&self.atoms) {
            if *a < 0.0 || a.is_nan() {
                return Err(Error::InvalidParameter(format!("negative scalar {a}")));
            }
            atom.validate()?;
        }
        Ok(())
    }
}

/// Splits the cancellative part of `f` into atoms along the halved
/// superlevel sets of its square function. Requires `s > max(1, p)`; a
/// zero cancellative block yields an empty decomposition.
pub fn atomic_decompose(f: &Signal2D, p: f64, s: f64) -> Result<AtomicDecomposition> {
    if p <= 0.0 || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent p = {p}")));
    }
    if s <= p.max(1.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "atom exponent s = {s} must exceed max(1, p) = {}",
            p.max(1.0)
        )));
    }
    let grid = f.grid();
    let coeffs = HaarCoeffs2D::forward(f);
    let empty = AtomicDecomposition {
        grid,
        p,
        s,
        omegas: Vec::new(),
        scalars: Vec::new(),
        atoms: Vec::new(),
    };
    if coeffs.cc().iter().all(|v| *v == 0.0) {
        return Ok(empty);
    }

    let sq = square_2d_coeffs(&coeffs);
    let krange = match dyadic_threshold_range(sq.values()) {
        Some(r) => r,
        None => return Ok(empty),
    };

    // Superlevel sets at dyadic thresholds, keeping only levels that at
    // least halve the previous kept measure.
    let mut kept: Vec<CellSet> = Vec::new();
    for k in krange {
        let omega = CellSet::superlevel(&sq, 2f64.powi(k));
        if omega.is_empty() {
            break;
        }
        match kept.last() {
            None => kept.push(omega),
            Some(prev) => {
                if 2 * omega.count() <= prev.count() {
                    kept.push(omega);
                }
            }
        }
    }

    // Deepest kept set containing each coefficient rectangle; nesting
    // makes containment monotone, so scan from the innermost outward.
    let mut shells: Vec<HaarCoeffs2D> =
        (0..kept.len()).map(|_| HaarCoeffs2D::zeros(grid)).collect();
    for (r, v) in coeffs.iter_cc() {
        if v == 0.0 {
            continue;
        }
        let depth = kept
            .iter()
            .rposition(|o| grid.rect_cells(&r).all(|c| o.contains(c)))
            .expect("every coefficient rectangle lies in the outermost superlevel set");
        shells[depth].set_cc(&r, v).expect("cancellative rectangle");
    }

    let mut omegas = Vec::new();
    let mut scalars = Vec::new();
    let mut atoms = Vec::new();
    for (omega, shell) in kept.into_iter().zip(shells) {
        if shell.cc().iter().all(|v| *v == 0.0) {
            continue;
        }
        let measure = omega.count() as f64 * grid.cell_measure();
        let a = lp_norm_2d(&shell.inverse(), s)? / measure.powf(1.0 / s);
        let mut scaled = HaarCoeffs2D::zeros(grid);
        for (i, v) in shell.cc().iter().enumerate() {
            scaled.cc_mut()[i] = v / a;
        }
        omegas.push(omega.clone());
        scalars.push(a);
        atoms.push(Atom {
            support: omega,
            coeffs: scaled,
            s,
        });
    }

    Ok(AtomicDecomposition {
        grid,
        p,
        s,
        omegas,
        scalars,
        atoms,
    })
}

/// Result of probing an operator on one atom: whether the image stays
/// inside the support, the largest leaked value, and the `L^q` size
/// relative to `|Omega|^{1/q}`.
#[derive(Debug, Clone, Copy)]
pub struct LocalImageReport {
    pub support_contained: bool,
    pub max_outside: f64,
    pub lq_ratio: f64,
}

/// Applies `Pi3` or `Pi4` to an atom and reports support containment and
/// the `L^q` ratio. `q` must lie in `(1, s)`.
pub fn local_image_check(op: &NamedOperator2D, atom: &Atom, q: f64) -> Result<LocalImageReport> {
    match op.kind() {
        OperatorKind2D::Pi3 | OperatorKind2D::Pi4 => {}
        other => {
            return Err(Error::InvalidParameter(format!(
                "locality check applies to Pi3 and Pi4, not {other:?}"
            )))
        }
    }
    if !(q > 1.0 && q < atom.exponent()) {
        return Err(Error::InvalidParameter(format!(
            "q = {q} outside (1, s) with s = {}",
            atom.exponent()
        )));
    }
    let image = op.apply(&atom.signal())?;
    let mut max_outside = 0.0f64;
    for (c, v) in image.values().iter().enumerate() {
        if !atom.support().contains(c) {
            max_outside = max_outside.max(v.abs());
        }
    }
    let scale = image.max_abs().max(1.0);
    let support_contained = max_outside <= 1e-12 * scale;
    let lq_ratio = if atom.support().is_empty() {
        0.0
    } else {
        lp_norm_2d(&image, q)? / atom.support_measure().powf(1.0 / q)
    };
    Ok(LocalImageReport {
        support_contained,
        max_outside,
        lq_ratio,
    })
}

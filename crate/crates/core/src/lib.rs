//! Dyadic Haar calculus on the unit interval and unit square.
//!
//! The crate implements, exactly on finite dyadic grids:
//!
//! - Haar transforms (1D, 2D tensor blocks, per-axis slices) with exact
//!   reconstruction and energy identities;
//! - square functions, dyadic maximal functions (including the strong
//!   maximal function over rectangles), line and product BMO functionals,
//!   and mixed square/maximal compositions;
//! - one- and bi-parameter paraproducts for every cancellation signature,
//!   the named frozen-symbol operators built from them, their exact
//!   adjoints, and the finite product-expansion identity;
//! - Carleson/sparse rectangle machinery: sparse extraction with witness
//!   sets, Carleson constants, level-set rectangle covers, and atomic
//!   decompositions over contracting open sets;
//! - an operator-norm laboratory: matrix-free power iteration with dense
//!   cross-check, projected ratio ascent between arbitrary norm pairs,
//!   structured lower-bound witnesses, and the pointwise matrix-view upper
//!   bound with its Hadamard/identity extremal examples.
//!
//! The `dyadlab` binary exposes the same operations as a CLI with JSON
//! interchange formats; `dyadlab-ffi` wraps a C ABI around the core types.

pub mod atoms;
pub mod corpus;
pub mod dyadic;
pub mod error;
pub mod functionals;
pub mod haar;
pub mod io;
pub mod opnorm;
pub mod paraproduct;
pub mod signal;
pub mod sparse;
mod sums;
pub mod verify;

#[cfg(test)]
pub(crate) mod testutil;

pub use dyadic::{DyadicInterval, DyadicRectangle, Grid1D, Grid2D, MAX_RESOLUTION};
pub use error::{Error, Result};
pub use haar::{Axis, HaarCoeffs1D, HaarCoeffs2D, SliceCoeffs};
pub use signal::{Signal1D, Signal2D};

/// Crate version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

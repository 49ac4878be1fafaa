//! Seeded corpora of random signals, reproducible down to file bytes.
//!
//! Three families cover the use cases: dense Gaussian coefficients,
//! sparse-support coefficients, and tensor products of two random
//! one-dimensional factors. Generation is deterministic per seed, and
//! item `i` of a corpus draws from its own stream, so corpora can be
//! produced in any order or in parallel without changing the output.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::dyadic::{Grid1D, Grid2D};
use crate::error::{Error, Result};
use crate::haar::{HaarCoeffs1D, HaarCoeffs2D};
use crate::io;
use crate::signal::{Signal1D, Signal2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Independent standard normal cancellative coefficients.
    Gaussian,
    /// Normal coefficients on a small random subset of rectangles,
    /// roughly one in sixteen.
    Sparse,
    /// Product of two independent one-dimensional Gaussian signals.
    Tensor,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            Distribution::Gaussian => "gaussian",
            Distribution::Sparse => "sparse",
            Distribution::Tensor => "tensor",
        };
        f.write_str(tag)
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Distribution::Gaussian),
            "sparse" => Ok(Distribution::Sparse),
            "tensor" => Ok(Distribution::Tensor),
            other => Err(Error::InvalidParameter(format!(
                "unknown distribution tag {other:?}, expected gaussian, sparse, or tensor"
            ))),
        }
    }
}

pub fn gaussian_signal_1d(grid: Grid1D, rng: &mut ChaCha8Rng) -> Signal1D {
    let detail: Vec<f64> = (0..grid.cells() - 1)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    HaarCoeffs1D::from_parts(grid, 0.0, detail)
        .expect("detail length matches grid")
        .inverse()
}

/// Independent standard normal cell values; unlike the coefficient
/// families, means and one-parameter blocks are nonzero in general.
pub fn cell_noise_1d(grid: Grid1D, rng: &mut ChaCha8Rng) -> Signal1D {
    let vals: Vec<f64> = (0..grid.cells())
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Signal1D::new(grid, vals).expect("normal samples are finite")
}

pub fn cell_noise_2d(grid: Grid2D, rng: &mut ChaCha8Rng) -> Signal2D {
    let vals: Vec<f64> = (0..grid.cells())
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Signal2D::new(grid, vals).expect("normal samples are finite")
}

/// Draws one signal from the given family. Mean blocks stay zero, so
/// the output is determined by its cancellative coefficients.
pub fn generate_signal(grid: Grid2D, dist: Distribution, rng: &mut ChaCha8Rng) -> Signal2D {
    match dist {
        Distribution::Gaussian => {
            let mut c = HaarCoeffs2D::zeros(grid);
            for v in c.cc_mut() {
                *v = rng.sample::<f64, _>(StandardNormal);
            }
            c.inverse()
        }
        Distribution::Sparse => {
            let mut c = HaarCoeffs2D::zeros(grid);
            let len = c.cc().len();
            let picks = (len / 16).max(1).min(len);
            let chosen = rand::seq::index::sample(rng, len, picks);
            for i in chosen {
                c.cc_mut()[i] = rng.sample::<f64, _>(StandardNormal);
            }
            c.inverse()
        }
        Distribution::Tensor => {
            let b = gaussian_signal_1d(grid.x_axis(), rng);
            let c = gaussian_signal_1d(grid.y_axis(), rng);
            Signal2D::from_tensor(&b, &c).expect("axes from the same grid")
        }
    }
}

fn item_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Generates `count` signals; item `i` depends only on `(seed, i)`.
pub fn generate_corpus(
    grid: Grid2D,
    dist: Distribution,
    count: usize,
    seed: u64,
) -> Result<Vec<Signal2D>> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "corpus count must be at least 1".into(),
        ));
    }
    Ok((0..count)
        .map(|i| generate_signal(grid, dist, &mut item_rng(seed, i)))
        .collect())
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Manifest {
    pub version: String,
    pub distribution: String,
    pub resolution: [u32; 2],
    pub count: usize,
    pub seed: u64,
    pub files: Vec<ManifestEntry>,
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes a corpus as `signal_NNN.json` files plus `manifest.json`
/// listing a SHA-256 digest per file.
pub fn write_corpus(
    dir: &Path,
    grid: Grid2D,
    dist: Distribution,
    count: usize,
    seed: u64,
) -> Result<Manifest> {
    let signals = generate_corpus(grid, dist, count, seed)?;
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(signals.len());
    for (i, signal) in signals.iter().enumerate() {
        let name = format!("signal_{i:03}.json");
        let text = io::signal_2d_json(signal)?;
        std::fs::write(dir.join(&name), &text)?;
        files.push(ManifestEntry {
            name,
            sha256: hex_digest(text.as_bytes()),
        });
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        distribution: dist.to_string(),
        resolution: [grid.n1(), grid.n2()],
        count,
        seed,
        files,
    };
    let manifest_text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(dir.join("manifest.json"), manifest_text)?;
    Ok(manifest)
}

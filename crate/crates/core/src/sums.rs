//! Pairwise (cascade) summation.
//!
//! All integral-type reductions in this crate go through these helpers so
//! that accumulated rounding stays O(log n) in the number of terms instead of
//! O(n). The transform recursions are pairwise by construction; everything
//! else (inner products, L^p sums, energy totals) calls in here.

const LINEAR_CUTOFF: usize = 32;

/// Sum of a slice with pairwise splitting.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LINEAR_CUTOFF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Pairwise sum of `f(i)` for `i` in `0..n` without materialising a buffer.
pub fn pairwise_map_sum(n: usize, f: &impl Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, f: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= LINEAR_CUTOFF {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    go(0, n, &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..7).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 21.0);
        assert_eq!(pairwise_map_sum(7, &|i| i as f64), 21.0);
    }

    #[test]
    fn large_sum_stays_close_to_exact() {
        // 1/(k+1) summed over 1e5 terms; compare against Kahan as reference.
        let n = 100_000;
        let (mut kahan, mut c) = (0.0f64, 0.0f64);
        for i in 0..n {
            let x = 1.0 / (i as f64 + 1.0);
            let y = x - c;
            let t = kahan + y;
            c = (t - kahan) - y;
            kahan = t;
        }
        let got = pairwise_map_sum(n, &|i| 1.0 / (i as f64 + 1.0));
        assert!(
            (got - kahan).abs() < 1e-11,
            "pairwise {got} vs kahan {kahan}"
        );
    }
}

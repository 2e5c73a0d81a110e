//! Parallel/sequential execution helpers.
//!
//! With the `parallel` feature (default) these run on rayon; without it
//! they run sequentially. Both lanes are written so that results are
//! bit-identical: order-preserving maps, lowest-index searches, and
//! floating-point sums reduced over a fixed chunking.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk size for deterministic floating-point reductions.
const SUM_CHUNK: usize = 1024;

/// Order-preserving map over a slice.
pub fn map_slice<T: Sync, U: Send, F: Fn(&T) -> U + Sync + Send>(items: &[T], f: F) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Order-preserving map over an index range.
pub fn map_range<U: Send, F: Fn(usize) -> U + Sync + Send>(n: usize, f: F) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Lowest-index item satisfying the predicate.
pub fn find_first<T: Sync, F: Fn(&T) -> bool + Sync + Send>(items: &[T], pred: F) -> Option<usize> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().position_first(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().position(pred)
    }
}

/// True if every item satisfies the predicate.
pub fn all<T: Sync, F: Fn(&T) -> bool + Sync + Send>(items: &[T], pred: F) -> bool {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().all(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().all(pred)
    }
}

/// Sum of `f` over `0..n`, reduced over fixed-size chunks so the result
/// does not depend on thread count or on the `parallel` feature.
pub fn sum_indexed<F: Fn(usize) -> f64 + Sync + Send>(n: usize, f: F) -> f64 {
    let chunk_sums = sum_chunks(n, &f);
    chunk_sums.iter().sum()
}

fn sum_chunks<F: Fn(usize) -> f64 + Sync + Send>(n: usize, f: &F) -> Vec<f64> {
    let bounds: Vec<(usize, usize)> = (0..n)
        .step_by(SUM_CHUNK)
        .map(|lo| (lo, usize::min(lo + SUM_CHUNK, n)))
        .collect();
    #[cfg(feature = "parallel")]
    {
        bounds
            .par_iter()
            .map(|&(lo, hi)| (lo..hi).map(f).sum::<f64>())
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        bounds
            .iter()
            .map(|&(lo, hi)| (lo..hi).map(f).sum::<f64>())
            .collect()
    }
}

/// Maximum of `f` over `0..n` under the usual f64 order (NaN-free inputs).
pub fn max_indexed<F: Fn(usize) -> f64 + Sync + Send>(n: usize, f: F) -> f64 {
    let bounds: Vec<(usize, usize)> = (0..n)
        .step_by(SUM_CHUNK)
        .map(|lo| (lo, usize::min(lo + SUM_CHUNK, n)))
        .collect();
    let per_chunk: Vec<f64> = {
        #[cfg(feature = "parallel")]
        {
            bounds
                .par_iter()
                .map(|&(lo, hi)| (lo..hi).map(&f).fold(f64::NEG_INFINITY, f64::max))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            bounds
                .iter()
                .map(|&(lo, hi)| (lo..hi).map(&f).fold(f64::NEG_INFINITY, f64::max))
                .collect()
        }
    };
    per_chunk.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Sequential twin of [`map_slice`], kept unconditionally compiled so
/// benchmarks can compare the two lanes within one build.
pub fn map_slice_seq<T, U, F: Fn(&T) -> U>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Sequential twin of [`sum_indexed`] (same chunking, same result).
pub fn sum_indexed_seq<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    (0..n)
        .step_by(SUM_CHUNK)
        .map(|lo| (lo..usize::min(lo + SUM_CHUNK, n)).map(&f).sum::<f64>())
        .sum()
}

//! Sparse feature vectors with 0-based, strictly increasing indices.

use std::fmt;

/// A sparse real vector stored as parallel index/value arrays.
///
/// Indices are 0-based and strictly increasing. Explicit zeros are allowed
/// (they are kept as given), which matters only for the sparsity pattern.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, value)` pairs in any order.
    ///
    /// Panics on duplicate indices.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut pairs: Vec<(usize, f64)> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(i, _)| i);
        assert!(
            pairs.windows(2).all(|w| w[0].0 < w[1].0),
            "duplicate index in sparse vector"
        );
        let (indices, values) = pairs.into_iter().unzip();
        Self { indices, values }
    }

    /// Builds a vector from already-sorted parts. Caller guarantees ordering.
    pub(crate) fn from_sorted_parts(indices: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(indices.len(), values.len());
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices, values }
    }

    /// Keeps every entry of `dense`, including zeros.
    pub fn from_dense(dense: &[f64]) -> Self {
        Self {
            indices: (0..dense.len()).collect(),
            values: dense.to_vec(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    /// One past the largest stored index, or 0 when empty.
    pub fn dim_hint(&self) -> usize {
        self.indices.last().map_or(0, |&i| i + 1)
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Inner product with a dense vector. Indices beyond `dense.len()` count as zero.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter()
            .filter(|&(i, _)| i < dense.len())
            .map(|(i, v)| v * dense[i])
            .sum()
    }

    /// `dense += scale * self`.
    pub fn axpy_into(&self, scale: f64, dense: &mut [f64]) {
        for (i, v) in self.iter() {
            dense[i] += scale * v;
        }
    }

    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * scale).collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim.max(self.dim_hint())];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }
}

impl fmt::Display for SparseVec {
    /// LIBSVM feature syntax with 1-based indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, v) in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            // `{:?}` on f64 prints the shortest representation that round-trips.
            write!(f, "{}:{:?}", i + 1, v)?;
        }
        Ok(())
    }
}

/// Dense dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

//! LIBSVM dataset loading, per-sample normalization, and seeded orderings.
//!
//! Files use the usual `<label> <index>:<value> ...` layout with 1-based,
//! strictly increasing indices. Indices are shifted to 0-based on load.
//! Anything after `#` on a line is a comment.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::sparse::SparseVec;

/// Binary class label. Positives are the (usually rare) class of interest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// `+1.0` or `-1.0`.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    /// Decision rule shared by every learner: `score >= 0` predicts positive.
    #[inline]
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "+1",
            Label::Negative => "-1",
        })
    }
}

/// Why a single line failed to parse.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LineError {
    #[error("empty line")]
    Empty,
    #[error("label `{0}` is not numeric")]
    BadLabel(String),
    #[error("label `{0}` is not binary (expected +1, 1 or -1)")]
    NonBinaryLabel(String),
    #[error("malformed feature token `{0}`")]
    MalformedToken(String),
    #[error("feature index must be >= 1, got {0}")]
    IndexBelowOne(i64),
    #[error("feature index {index} does not increase (previous {previous})")]
    NonIncreasingIndex { previous: usize, index: usize },
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: LineError,
    },
    #[error("line {line}: feature vector is all zeros")]
    ZeroVector { line: usize },
    #[error("feature vector is all zeros")]
    ZeroFeatures,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dimension override {requested} is smaller than the observed dimension {observed}")]
    DimensionTooSmall { requested: usize, observed: usize },
    #[error("fold count {k} out of range for {n} examples (need 2 <= k <= n)")]
    FoldCount { k: usize, n: usize },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One labeled sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub label: Label,
    pub features: SparseVec,
}

impl Example {
    pub fn new(label: Label, features: SparseVec) -> Self {
        Self { label, features }
    }

    pub fn nnz(&self) -> usize {
        self.features.nnz()
    }
}

impl fmt::Display for Example {
    /// Serializes back to a LIBSVM line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if !self.features.is_empty() {
            write!(f, " {}", self.features)?;
        }
        Ok(())
    }
}

/// Parses one LIBSVM line (comments allowed).
pub fn parse_libsvm_line(line: &str) -> Result<Example, LineError> {
    let content = line.split('#').next().unwrap_or("").trim();
    let mut tokens = content.split_whitespace();
    let label_tok = tokens.next().ok_or(LineError::Empty)?;
    let label_val: f64 = label_tok
        .parse()
        .map_err(|_| LineError::BadLabel(label_tok.to_string()))?;
    let label = if label_val == 1.0 {
        Label::Positive
    } else if label_val == -1.0 {
        Label::Negative
    } else {
        return Err(LineError::NonBinaryLabel(label_tok.to_string()));
    };

    let mut indices = Vec::new();
    let mut values = Vec::new();
    for tok in tokens {
        let (idx_str, val_str) = tok
            .split_once(':')
            .ok_or_else(|| LineError::MalformedToken(tok.to_string()))?;
        let idx: i64 = idx_str
            .parse()
            .map_err(|_| LineError::MalformedToken(tok.to_string()))?;
        let val: f64 = val_str
            .parse()
            .map_err(|_| LineError::MalformedToken(tok.to_string()))?;
        if !val.is_finite() {
            return Err(LineError::MalformedToken(tok.to_string()));
        }
        if idx < 1 {
            return Err(LineError::IndexBelowOne(idx));
        }
        let zero_based = (idx - 1) as usize;
        if let Some(&prev) = indices.last() {
            if zero_based <= prev {
                return Err(LineError::NonIncreasingIndex {
                    previous: prev + 1,
                    index: zero_based + 1,
                });
            }
        }
        indices.push(zero_based);
        values.push(val);
    }
    Ok(Example::new(label, SparseVec::from_sorted_parts(indices, values)))
}

/// Scales the features to unit Euclidean norm.
pub fn normalize(example: &Example) -> Result<Example, DataError> {
    let norm = example.features.norm();
    if norm == 0.0 {
        return Err(DataError::ZeroFeatures);
    }
    Ok(Example::new(example.label, example.features.scaled(1.0 / norm)))
}

/// An immutable, normalized dataset.
#[derive(Clone, Debug)]
pub struct Dataset {
    examples: Vec<Example>,
    dim: usize,
    t_pos: usize,
    t_neg: usize,
}

impl Dataset {
    /// Wraps already-prepared examples. `dim` is raised to cover every index.
    pub fn from_examples(examples: Vec<Example>, dim: usize) -> Result<Self, DataError> {
        if examples.is_empty() {
            return Err(DataError::EmptyDataset);
        }
        let observed = examples
            .iter()
            .map(|e| e.features.dim_hint())
            .max()
            .unwrap_or(0);
        let t_pos = examples.iter().filter(|e| e.label.is_positive()).count();
        let t_neg = examples.len() - t_pos;
        Ok(Self {
            examples,
            dim: dim.max(observed),
            t_pos,
            t_neg,
        })
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Feature dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_pos(&self) -> usize {
        self.t_pos
    }

    pub fn t_neg(&self) -> usize {
        self.t_neg
    }

    /// New dataset holding the examples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, DataError> {
        let examples = indices.iter().map(|&i| self.examples[i].clone()).collect();
        Self::from_examples(examples, self.dim)
    }

    pub fn split_folds(&self, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, DataError> {
        split_folds(self.len(), k, seed)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    /// Force a larger dimension, e.g. when a test split uses higher indices.
    pub dim_override: Option<usize>,
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    load_dataset_with(path, LoadOptions::default())
}

pub fn load_dataset_with(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text, opts)
}

/// Parses and normalizes a whole LIBSVM document. Blank and comment-only
/// lines are skipped; line numbers in errors are 1-based.
pub fn parse_dataset(text: &str, opts: LoadOptions) -> Result<Dataset, DataError> {
    let mut examples = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let raw = parse_libsvm_line(line).map_err(|source| DataError::Parse {
            line: lineno,
            source,
        })?;
        let ex = normalize(&raw).map_err(|_| DataError::ZeroVector { line: lineno })?;
        examples.push(ex);
    }
    if examples.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let observed = examples
        .iter()
        .map(|e| e.features.dim_hint())
        .max()
        .unwrap_or(0);
    let dim = match opts.dim_override {
        Some(requested) if requested < observed => {
            return Err(DataError::DimensionTooSmall {
                requested,
                observed,
            })
        }
        Some(requested) => requested,
        None => observed,
    };
    Dataset::from_examples(examples, dim)
}

/// Seeded random ordering of `0..n`.
///
/// The generator is ChaCha8 seeded through `seed_from_u64`, and the shuffle is
/// the backward Fisher–Yates walk drawing `j` uniformly from `0..=i` with
/// Lemire's widening-multiply rejection method on raw 64-bit outputs. Both
/// pieces are fully specified, so a given `(n, seed)` yields the same ordering
/// on every platform.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = bounded(&mut rng, i as u64 + 1) as usize;
        order.swap(i, j);
    }
    order
}

/// Uniform draw from `0..range` (range > 0).
fn bounded(rng: &mut impl RngCore, range: u64) -> u64 {
    let threshold = range.wrapping_neg() % range;
    loop {
        let m = (rng.next_u64() as u128) * (range as u128);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// Splits a seeded permutation of `0..n` into `k` contiguous folds. The first
/// `n % k` folds hold one extra element.
pub fn split_folds(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, DataError> {
    if k < 2 || k > n {
        return Err(DataError::FoldCount { k, n });
    }
    let order = permutation(n, seed);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

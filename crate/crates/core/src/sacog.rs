//! Sketched adaptive-regularized learners.
//!
//! [`SketchedModel`] keeps a dense mean `mu` and steps with
//! `mu -= eta (g - S^T H S g)`, where `S, H` come from a dense [`OjaSketch`].
//!
//! [`SparseSketchedModel`] never stores `mu`. It keeps the split
//! `mu = w + Z^T b` with `Z` from the [`SparseOjaSketch`], so a round only
//! touches the support of `x` plus `O(m^2)` small-matrix work.

use crate::data::Label;
use crate::learner::{Learner, LearnerError};
use crate::losses::{self, LossVariant};
use crate::sketch::{to_sketch_vector, OjaSketch, SketchError, SketchInit, SparseOjaSketch};
use crate::sparse::SparseVec;

/// Sketch configuration shared by both learners.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SketchOptions {
    /// Sketch size `m`.
    pub size: usize,
    pub init: SketchInit,
    /// Advance the sketch only on every `k`-th eligible round (rounds 1, 1+k, ...).
    pub lazy: Option<usize>,
    /// Advance the sketch only on rounds with positive loss.
    pub on_loss_only: bool,
}

impl Default for SketchOptions {
    fn default() -> Self {
        Self {
            size: 5,
            init: SketchInit::Canonical,
            lazy: None,
            on_loss_only: false,
        }
    }
}

impl SketchOptions {
    pub fn with_size(size: usize) -> Self {
        Self {
            size,
            ..Self::default()
        }
    }

    fn advances(&self, round: u64, loss: f64) -> bool {
        if self.on_loss_only && loss <= 0.0 {
            return false;
        }
        match self.lazy {
            Some(k) if k > 1 => (round - 1).is_multiple_of(k as u64),
            _ => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SketchParams {
    pub eta: f64,
    pub gamma: f64,
    pub variant: LossVariant,
}

/// SACOG: dense mean over a dense Oja sketch.
#[derive(Clone, Debug)]
pub struct SketchedModel {
    mu: Vec<f64>,
    sketch: OjaSketch,
    params: SketchParams,
    opts: SketchOptions,
    round: u64,
}

impl SketchedModel {
    pub fn new(dim: usize, params: SketchParams, opts: SketchOptions) -> Result<Self, SketchError> {
        Ok(Self {
            mu: vec![0.0; dim],
            sketch: OjaSketch::new(opts.size, dim, opts.init)?,
            params,
            opts,
            round: 0,
        })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sketch(&self) -> &OjaSketch {
        &self.sketch
    }

    pub fn params(&self) -> &SketchParams {
        &self.params
    }

    /// One round; returns the loss at the pre-update mean.
    pub fn step(&mut self, x: &SparseVec, y: Label, rho: f64) -> f64 {
        self.round += 1;
        let variant = self.params.variant;
        let l = losses::loss(variant, x.dot_dense(&self.mu), y, rho);
        if self.opts.advances(self.round, l) {
            self.sketch.update(&to_sketch_vector(x, self.params.gamma));
        }
        let slope = losses::score_slope(variant, y, rho, l);
        if slope != 0.0 {
            let g = x.scaled(slope);
            let corr = self.sketch.correction(&g);
            let eta = self.params.eta;
            for (m, c) in self.mu.iter_mut().zip(&corr) {
                *m += eta * c;
            }
            g.axpy_into(-eta, &mut self.mu);
        }
        l
    }
}

impl Learner for SketchedModel {
    fn score(&self, x: &SparseVec) -> f64 {
        x.dot_dense(&self.mu)
    }

    fn update(&mut self, x: &SparseVec, y: Label, rho: f64) -> Result<(), LearnerError> {
        self.step(x, y, rho);
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.mu.clone()
    }
}

/// SSACOG: `mu = w + Z^T b` over a [`SparseOjaSketch`].
#[derive(Clone, Debug)]
pub struct SparseSketchedModel {
    w: Vec<f64>,
    b: Vec<f64>,
    sketch: SparseOjaSketch,
    params: SketchParams,
    opts: SketchOptions,
    round: u64,
    ops: u64,
}

impl SparseSketchedModel {
    pub fn new(dim: usize, params: SketchParams, opts: SketchOptions) -> Result<Self, SketchError> {
        let sketch = SparseOjaSketch::new(opts.size, dim, opts.init)?;
        Ok(Self {
            w: vec![0.0; dim],
            b: vec![0.0; opts.size],
            sketch,
            params,
            opts,
            round: 0,
            ops: 0,
        })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn sketch(&self) -> &SparseOjaSketch {
        &self.sketch
    }

    /// Scalar multiply-adds spent so far, sketch included.
    pub fn ops(&self) -> u64 {
        self.ops + self.sketch.ops()
    }

    /// `w . x + b . (Z x)` in `O(m s)`.
    pub fn lazy_score(&self, x: &SparseVec) -> f64 {
        let zx = self.sketch.z_mul(x);
        x.dot_dense(&self.w) + zx.iter().zip(&self.b).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `w + Z^T b`. Allocates a dense `d`-vector.
    pub fn materialize_mu(&self) -> Vec<f64> {
        let mut mu = self.w.clone();
        let ztb = self.sketch.z().tr_mul_vec(&self.b);
        for (m, v) in mu.iter_mut().zip(ztb) {
            *m += v;
        }
        mu
    }

    /// One round; returns the loss at the pre-update weights.
    ///
    /// The loss uses the pre-update state. When the sketch advances, `Z`
    /// gains `delta x_hat^T`, and `w` absorbs `-x_hat (delta . b)` so the
    /// implied `mu` only moves by the gradient step. That compensation is
    /// applied on zero-loss rounds too.
    pub fn step(&mut self, x: &SparseVec, y: Label, rho: f64) -> Result<f64, SketchError> {
        self.round += 1;
        let variant = self.params.variant;
        let m = self.b.len() as u64;
        let s = x.nnz() as u64;
        let l = losses::loss(variant, self.lazy_score(x), y, rho);
        self.ops += m * s + s;

        if self.opts.advances(self.round, l) {
            let xhat = to_sketch_vector(x, self.params.gamma);
            self.sketch.update(&xhat)?;
            let db: f64 = self
                .sketch
                .last_delta()
                .iter()
                .zip(&self.b)
                .map(|(d, b)| d * b)
                .sum();
            if db != 0.0 {
                xhat.axpy_into(-db, &mut self.w);
            }
            self.ops += m + s;
        }

        let slope = losses::score_slope(variant, y, rho, l);
        if slope != 0.0 {
            let g = x.scaled(slope);
            let eta = self.params.eta;
            g.axpy_into(-eta, &mut self.w);
            let zg = self.sketch.z_mul(&g);
            let db = self.sketch.core_apply(&zg);
            for (b, v) in self.b.iter_mut().zip(db) {
                *b += eta * v;
            }
            self.ops += s + m * s + 2 * m * m + m;
        }
        Ok(l)
    }
}

impl Learner for SparseSketchedModel {
    fn score(&self, x: &SparseVec) -> f64 {
        self.lazy_score(x)
    }

    fn update(&mut self, x: &SparseVec, y: Label, rho: f64) -> Result<(), LearnerError> {
        self.step(x, y, rho)?;
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.materialize_mu()
    }
}

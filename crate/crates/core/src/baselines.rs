//! First-order reference learners: Perceptron, PA-I and cost-sensitive OGD.

use crate::data::Label;
use crate::learner::{Learner, LearnerError};
use crate::losses::{self, LossVariant};
use crate::sparse::SparseVec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Baseline {
    Perceptron,
    /// Passive-Aggressive with aggressiveness cap `c`.
    PassiveAggressive { c: f64 },
    /// Cost-sensitive online gradient descent with learning rate `eta`.
    Cog { eta: f64, variant: LossVariant },
}

/// A dense weight vector plus the rule that updates it.
#[derive(Clone, Debug)]
pub struct LinearModel {
    w: Vec<f64>,
    kind: Baseline,
}

impl LinearModel {
    pub fn new(dim: usize, kind: Baseline) -> Self {
        Self {
            w: vec![0.0; dim],
            kind,
        }
    }

    pub fn from_weights(w: Vec<f64>, kind: Baseline) -> Self {
        Self { w, kind }
    }

    pub fn kind(&self) -> Baseline {
        self.kind
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// `(w . x, sign)` with ties going to the positive class.
    pub fn predict_scored(&self, x: &SparseVec) -> (f64, Label) {
        let s = x.dot_dense(&self.w);
        (s, Label::from_score(s))
    }

    /// Mistake-driven update: add `y x` when `y (w . x) <= 0`.
    pub fn perceptron_step(&mut self, x: &SparseVec, y: Label) {
        let s = x.dot_dense(&self.w);
        if y.sign() * s <= 0.0 {
            x.axpy_into(y.sign(), &mut self.w);
        }
    }

    /// PA-I: `tau = min(C, hinge / |x|^2)`, `w += tau y x`.
    pub fn pa1_step(&mut self, x: &SparseVec, y: Label, c: f64) {
        let s = x.dot_dense(&self.w);
        let hinge = (1.0 - y.sign() * s).max(0.0);
        let sq = x.norm_squared();
        if hinge <= 0.0 || sq == 0.0 {
            return;
        }
        let tau = c.min(hinge / sq);
        x.axpy_into(tau * y.sign(), &mut self.w);
    }

    /// One cost-sensitive gradient step `w -= eta g` on an active loss.
    pub fn cog_step(&mut self, x: &SparseVec, y: Label, rho: f64, eta: f64, variant: LossVariant) {
        let s = x.dot_dense(&self.w);
        let l = losses::loss(variant, s, y, rho);
        let slope = losses::score_slope(variant, y, rho, l);
        if slope != 0.0 {
            x.axpy_into(-eta * slope, &mut self.w);
        }
    }
}

impl Learner for LinearModel {
    fn score(&self, x: &SparseVec) -> f64 {
        x.dot_dense(&self.w)
    }

    fn update(&mut self, x: &SparseVec, y: Label, rho: f64) -> Result<(), LearnerError> {
        match self.kind {
            Baseline::Perceptron => self.perceptron_step(x, y),
            Baseline::PassiveAggressive { c } => self.pa1_step(x, y, c),
            Baseline::Cog { eta, variant } => self.cog_step(x, y, rho, eta, variant),
        }
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.w.clone()
    }
}

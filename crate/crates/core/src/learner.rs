use thiserror::Error;

use crate::data::Label;
use crate::sketch::SketchError;
use crate::sparse::SparseVec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error(transparent)]
    Sketch(#[from] SketchError),
}

/// An online linear classifier driven by the predict-then-update loop.
pub trait Learner: Send {
    /// Current decision score for `x`.
    fn score(&self, x: &SparseVec) -> f64;

    /// Incorporates the revealed label. `rho` is the class bias for this round.
    fn update(&mut self, x: &SparseVec, y: Label, rho: f64) -> Result<(), LearnerError>;

    /// The effective weight vector (length `d`).
    fn weights(&self) -> Vec<f64>;

    fn predict(&self, x: &SparseVec) -> Label {
        Label::from_score(self.score(x))
    }
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn score(&self, x: &SparseVec) -> f64 {
        (**self).score(x)
    }

    fn update(&mut self, x: &SparseVec, y: Label, rho: f64) -> Result<(), LearnerError> {
        (**self).update(x, y, rho)
    }

    fn weights(&self) -> Vec<f64> {
        (**self).weights()
    }
}

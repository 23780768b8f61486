//! Cost-sensitive online binary classification.
//!
//! Learners share the [`learner::Learner`] trait and are driven by the
//! prequential loop in [`harness`]: predict `sign(score)`, reveal the label,
//! update.

pub mod acog;
pub mod baselines;
pub mod data;
pub mod dense;
pub mod harness;
pub mod learner;
pub mod losses;
pub mod metrics;
pub mod sacog;
pub mod sketch;
pub mod sparse;

pub use data::{Dataset, Example, Label};
pub use learner::{Learner, LearnerError};
pub use losses::{CostModel, LossVariant, Metric, RhoMode};
pub use sparse::SparseVec;

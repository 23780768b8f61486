//! Cost-sensitive hinge surrogates and the class-bias parameter `rho`.
//!
//! Both surrogates upper-bound the weighted mistake indicator
//! `rho * [positive mistake] + [negative mistake]`:
//!
//! * variant I moves the margin target for positives to `rho`
//!   (`max(0, w_y - y s)`), so positives trigger updates more often;
//! * variant II scales the whole hinge by the class weight
//!   (`w_y * max(0, 1 - y s)`), so positive updates are larger.
//!
//! Here `w_y` is [`class_weight`] and `s` is the model score.

use thiserror::Error;

use crate::data::Label;
use crate::sparse::SparseVec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostModelError {
    #[error("weights {0} and {1} must lie in [0, 1] and sum to 1")]
    InvalidWeights(f64, f64),
    #[error("the negative-class weight must be positive")]
    ZeroNegativeWeight,
    #[error("oracle rho for the sum metric needs the dataset class counts")]
    MissingCounts,
    #[error("oracle rho needs at least one positive example")]
    NoPositives,
    #[error("rho must be positive and finite, got {0}")]
    NonPositiveRho(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossVariant {
    /// Margin-shifted hinge.
    I,
    /// Slope-scaled hinge.
    II,
}

impl LossVariant {
    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Self::I),
            2 => Some(Self::II),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Self::I => 1,
            Self::II => 2,
        }
    }
}

/// Which performance measure the run optimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// Weighted sensitivity + specificity (maximize).
    Sum,
    /// Weighted misclassification cost (minimize).
    Cost,
}

/// How `rho` is supplied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RhoMode {
    /// From the full dataset's class counts (sum) or the cost weights (cost).
    Oracle,
    /// Add-one smoothed running estimate of the class ratio from labels seen so far.
    Laplace,
    /// A user-supplied constant.
    Fixed(f64),
}

/// Metric weights plus the bias parameter `rho` and its estimation state.
#[derive(Clone, Debug, PartialEq)]
pub struct CostModel {
    metric: Metric,
    alpha_p: f64,
    alpha_n: f64,
    c_p: f64,
    c_n: f64,
    rho_mode: RhoMode,
    seen_pos: u64,
    seen_neg: u64,
}

fn check_pair(p: f64, n: f64) -> Result<(), CostModelError> {
    let in_unit = |v: f64| (0.0..=1.0).contains(&v);
    if !in_unit(p) || !in_unit(n) || ((p + n) - 1.0).abs() > 1e-9 {
        return Err(CostModelError::InvalidWeights(p, n));
    }
    if n <= 0.0 {
        return Err(CostModelError::ZeroNegativeWeight);
    }
    Ok(())
}

impl CostModel {
    /// Both weight pairs are stored so either metric can be reported; `metric`
    /// decides which pair defines `rho`.
    pub fn new(
        metric: Metric,
        (alpha_p, alpha_n): (f64, f64),
        (c_p, c_n): (f64, f64),
        rho_mode: RhoMode,
    ) -> Result<Self, CostModelError> {
        check_pair(alpha_p, alpha_n)?;
        check_pair(c_p, c_n)?;
        if let RhoMode::Fixed(r) = rho_mode {
            if !(r > 0.0 && r.is_finite()) {
                return Err(CostModelError::NonPositiveRho(r));
            }
        }
        let cm = Self {
            metric,
            alpha_p,
            alpha_n,
            c_p,
            c_n,
            rho_mode,
            seen_pos: 0,
            seen_neg: 0,
        };
        // Rho must be usable from the first round in every mode that does not
        // wait for dataset counts.
        if !(metric == Metric::Sum && rho_mode == RhoMode::Oracle) {
            let r = cm.current_rho();
            if !(r > 0.0 && r.is_finite()) {
                return Err(CostModelError::NonPositiveRho(r));
            }
        }
        Ok(cm)
    }

    /// The experimental defaults: `alpha_p = alpha_n = 0.5`, `c_p = 0.9`, `c_n = 0.1`.
    pub fn with_defaults(metric: Metric, rho_mode: RhoMode) -> Result<Self, CostModelError> {
        Self::new(metric, (0.5, 0.5), (0.9, 0.1), rho_mode)
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn rho_mode(&self) -> RhoMode {
        self.rho_mode
    }

    pub fn alpha(&self) -> (f64, f64) {
        (self.alpha_p, self.alpha_n)
    }

    pub fn costs(&self) -> (f64, f64) {
        (self.c_p, self.c_n)
    }

    pub fn seen(&self) -> (u64, u64) {
        (self.seen_pos, self.seen_neg)
    }

    /// Running estimate of `T_n / T_p`: `(seen_neg + 1) / (seen_pos + 1)`.
    pub fn ratio_estimate(&self) -> f64 {
        (self.seen_neg as f64 + 1.0) / (self.seen_pos as f64 + 1.0)
    }

    fn current_rho(&self) -> f64 {
        match (self.rho_mode, self.metric) {
            (RhoMode::Fixed(r), _) => r,
            (_, Metric::Cost) => self.c_p / self.c_n,
            (RhoMode::Laplace, Metric::Sum) => {
                self.alpha_p * self.ratio_estimate() / self.alpha_n
            }
            (RhoMode::Oracle, Metric::Sum) => f64::NAN,
        }
    }

    /// Resolves `rho` for the configured mode. `counts` is `(T_p, T_n)` of the
    /// full dataset and is required only for the sum metric in oracle mode.
    pub fn resolve_rho(&self, counts: Option<(usize, usize)>) -> Result<f64, CostModelError> {
        let rho = match (self.rho_mode, self.metric) {
            (RhoMode::Oracle, Metric::Sum) => {
                let (t_pos, t_neg) = counts.ok_or(CostModelError::MissingCounts)?;
                if t_pos == 0 {
                    return Err(CostModelError::NoPositives);
                }
                self.alpha_p * t_neg as f64 / (self.alpha_n * t_pos as f64)
            }
            _ => self.current_rho(),
        };
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(CostModelError::NonPositiveRho(rho));
        }
        Ok(rho)
    }

    /// Feeds a revealed label to the Laplace estimator. No-op in the other modes.
    pub fn observe_label(&mut self, y: Label) {
        if self.rho_mode != RhoMode::Laplace {
            return;
        }
        match y {
            Label::Positive => self.seen_pos += 1,
            Label::Negative => self.seen_neg += 1,
        }
    }
}

/// `rho` for positives, 1 for negatives.
#[inline]
pub fn class_weight(y: Label, rho: f64) -> f64 {
    match y {
        Label::Positive => rho,
        Label::Negative => 1.0,
    }
}

/// Surrogate loss at `score = mu . x`.
#[inline]
pub fn loss(variant: LossVariant, score: f64, y: Label, rho: f64) -> f64 {
    let margin = y.sign() * score;
    match variant {
        LossVariant::I => (class_weight(y, rho) - margin).max(0.0),
        LossVariant::II => class_weight(y, rho) * (1.0 - margin).max(0.0),
    }
}

/// Derivative of the loss with respect to the score, given the loss value.
/// Zero when the loss is zero, including exactly at the hinge kink.
#[inline]
pub fn score_slope(variant: LossVariant, y: Label, rho: f64, loss_value: f64) -> f64 {
    if loss_value <= 0.0 {
        return 0.0;
    }
    match variant {
        LossVariant::I => -y.sign(),
        LossVariant::II => -class_weight(y, rho) * y.sign(),
    }
}

/// Subgradient of the loss with respect to the weights: `score_slope * x`.
pub fn subgradient(
    variant: LossVariant,
    x: &SparseVec,
    y: Label,
    rho: f64,
    loss_value: f64,
) -> SparseVec {
    let slope = score_slope(variant, y, rho, loss_value);
    if slope == 0.0 {
        return SparseVec::new();
    }
    x.scaled(slope)
}

//! Confusion counts, the weighted sum and cost metrics, and regret tracking.

use thiserror::Error;

use crate::baselines::{Baseline, LinearModel};
use crate::data::{Dataset, Label};
use crate::losses::{self, LossVariant};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no {0} examples seen; the weighted sum is undefined")]
    EmptyClass(&'static str),
    #[error("regret slope needs at least {need} rounds, got {got}")]
    TooFewRounds { got: usize, need: usize },
}

/// Labels seen and mistakes made, per class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub t_pos: u64,
    pub t_neg: u64,
    pub m_pos: u64,
    pub m_neg: u64,
}

impl ConfusionCounts {
    pub fn record(&mut self, predicted: Label, truth: Label) {
        let wrong = (predicted != truth) as u64;
        match truth {
            Label::Positive => {
                self.t_pos += 1;
                self.m_pos += wrong;
            }
            Label::Negative => {
                self.t_neg += 1;
                self.m_neg += wrong;
            }
        }
    }

    pub fn merge(&self, other: &ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            t_pos: self.t_pos + other.t_pos,
            t_neg: self.t_neg + other.t_neg,
            m_pos: self.m_pos + other.m_pos,
            m_neg: self.m_neg + other.m_neg,
        }
    }

    pub fn mistakes(&self) -> u64 {
        self.m_pos + self.m_neg
    }

    /// Fraction of positives classified correctly; `None` without positives.
    pub fn sensitivity(&self) -> Option<f64> {
        (self.t_pos > 0).then(|| (self.t_pos - self.m_pos) as f64 / self.t_pos as f64)
    }

    /// Fraction of negatives classified correctly; `None` without negatives.
    pub fn specificity(&self) -> Option<f64> {
        (self.t_neg > 0).then(|| (self.t_neg - self.m_neg) as f64 / self.t_neg as f64)
    }
}

/// What the weighted sum does with a class that never appeared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EmptyClassPolicy {
    #[default]
    Error,
    /// The empty class contributes its full weight.
    Perfect,
}

/// `alpha_p * sensitivity + alpha_n * specificity`.
pub fn sum_metric(cc: &ConfusionCounts, alpha_p: f64, alpha_n: f64) -> Result<f64, MetricsError> {
    sum_metric_with(cc, alpha_p, alpha_n, EmptyClassPolicy::Error)
}

pub fn sum_metric_with(
    cc: &ConfusionCounts,
    alpha_p: f64,
    alpha_n: f64,
    policy: EmptyClassPolicy,
) -> Result<f64, MetricsError> {
    let rate = |r: Option<f64>, name| match (r, policy) {
        (Some(v), _) => Ok(v),
        (None, EmptyClassPolicy::Perfect) => Ok(1.0),
        (None, EmptyClassPolicy::Error) => Err(MetricsError::EmptyClass(name)),
    };
    let sens = rate(cc.sensitivity(), "positive")?;
    let spec = rate(cc.specificity(), "negative")?;
    Ok(alpha_p * sens + alpha_n * spec)
}

/// `c_p * M_p + c_n * M_n`, in raw units.
pub fn cost_metric(cc: &ConfusionCounts, c_p: f64, c_n: f64) -> f64 {
    c_p * cc.m_pos as f64 + c_n * cc.m_neg as f64
}

/// Running online and comparator losses.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegretTrace {
    cumulative_loss: f64,
    comparator_loss: f64,
    online: Vec<f64>,
    comparator: Vec<f64>,
}

impl RegretTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one round's losses. Both must be nonnegative.
    pub fn push(&mut self, online_loss: f64, comparator_loss: f64) {
        debug_assert!(online_loss >= 0.0 && comparator_loss >= 0.0);
        self.cumulative_loss += online_loss;
        self.comparator_loss += comparator_loss;
        self.online.push(self.cumulative_loss);
        self.comparator.push(self.comparator_loss);
    }

    pub fn len(&self) -> usize {
        self.online.len()
    }

    pub fn is_empty(&self) -> bool {
        self.online.is_empty()
    }

    pub fn cumulative_loss(&self) -> f64 {
        self.cumulative_loss
    }

    pub fn comparator_loss(&self) -> f64 {
        self.comparator_loss
    }

    pub fn regret(&self) -> f64 {
        self.cumulative_loss - self.comparator_loss
    }

    /// Regret after each round.
    pub fn regrets(&self) -> Vec<f64> {
        self.online
            .iter()
            .zip(&self.comparator)
            .map(|(a, b)| a - b)
            .collect()
    }

    pub fn cumulative_series(&self) -> &[f64] {
        &self.online
    }

    pub fn comparator_series(&self) -> &[f64] {
        &self.comparator
    }
}

/// `sum_t loss_t(w)` over the dataset in its stored order.
pub fn total_loss(ds: &Dataset, w: &[f64], rho: f64, variant: LossVariant) -> f64 {
    ds.examples()
        .iter()
        .map(|e| losses::loss(variant, e.features.dot_dense(w), e.label, rho))
        .sum()
}

/// Approximate minimizer of the cumulative loss.
///
/// Epoch `k` is one cost-sensitive gradient pass over `ds` with step
/// `eta0 / sqrt(k)`, continuing from the previous epoch's iterate. Returns
/// the post-epoch iterate with the lowest total loss.
pub fn fit_comparator(
    ds: &Dataset,
    rho: f64,
    variant: LossVariant,
    epochs: usize,
    eta0: f64,
) -> Vec<f64> {
    assert!(epochs >= 1, "epochs must be at least 1");
    let mut model = LinearModel::new(ds.dim(), Baseline::Perceptron);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 1..=epochs {
        let eta = eta0 / (k as f64).sqrt();
        for e in ds.examples() {
            model.cog_step(&e.features, e.label, rho, eta, variant);
        }
        let l = total_loss(ds, model.w(), rho, variant);
        if best.as_ref().is_none_or(|(b, _)| l < *b) {
            best = Some((l, model.w().to_vec()));
        }
    }
    best.map(|(_, w)| w).unwrap_or_default()
}

/// Minimum number of rounds accepted by [`regret_slope`].
pub const MIN_SLOPE_ROUNDS: usize = 100;

/// Least-squares slope of `log(max(regret_t, 1))` against `log t` over the
/// second half of the series (`t` is 1-based).
pub fn regret_slope(regrets: &[f64]) -> Result<f64, MetricsError> {
    let n = regrets.len();
    if n < MIN_SLOPE_ROUNDS {
        return Err(MetricsError::TooFewRounds {
            got: n,
            need: MIN_SLOPE_ROUNDS,
        });
    }
    let pts: Vec<(f64, f64)> = (n / 2..n)
        .map(|i| (((i + 1) as f64).ln(), regrets[i].max(1.0).ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Mean and sample standard deviation (divisor `n - 1`; 0 for one value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

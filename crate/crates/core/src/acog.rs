//! Adaptive-regularized cost-sensitive online gradient descent.
//!
//! The weight vector is a Gaussian belief `N(mu, Sigma)`. On every round whose
//! surrogate loss is positive, the covariance takes the rank-one Woodbury
//! shrink
//!
//! ```text
//! Sigma' = Sigma - (Sigma x)(Sigma x)^T / (gamma + x^T Sigma x)
//! ```
//!
//! and the mean steps along the covariance-preconditioned subgradient,
//! `mu' = mu - eta Sigma' g` (or with the pre-update `Sigma` under
//! [`UpdateRule::OldSigma`]). Predictions use `mu` only.

use thiserror::Error;

use crate::data::Label;
use crate::learner::{Learner, LearnerError};
use crate::losses::{self, LossVariant};
use crate::sparse::SparseVec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcogError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("learning rate must be positive and finite, got {0}")]
    BadEta(f64),
    #[error("regularization gamma must be positive and finite, got {0}")]
    BadGamma(f64),
}

/// Which covariance the mean step uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UpdateRule {
    /// The freshly shrunk `Sigma_{t+1}`.
    #[default]
    NewSigma,
    /// The pre-update `Sigma_t`, as AROW does.
    OldSigma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovarianceMode {
    Full,
    Diagonal,
}

/// Covariance storage. `Full` is a row-major `d x d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Covariance {
    Full { dim: usize, data: Vec<f64> },
    Diagonal(Vec<f64>),
}

impl Covariance {
    pub fn identity(dim: usize, mode: CovarianceMode) -> Self {
        match mode {
            CovarianceMode::Full => {
                let mut data = vec![0.0; dim * dim];
                for i in 0..dim {
                    data[i * dim + i] = 1.0;
                }
                Covariance::Full { dim, data }
            }
            CovarianceMode::Diagonal => Covariance::Diagonal(vec![1.0; dim]),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Covariance::Full { dim, .. } => *dim,
            Covariance::Diagonal(d) => d.len(),
        }
    }

    pub fn mode(&self) -> CovarianceMode {
        match self {
            Covariance::Full { .. } => CovarianceMode::Full,
            Covariance::Diagonal(_) => CovarianceMode::Diagonal,
        }
    }

    /// Entry `(i, j)`; zero off the diagonal in diagonal mode.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Covariance::Full { dim, data } => data[i * dim + j],
            Covariance::Diagonal(d) if i == j => d[i],
            Covariance::Diagonal(_) => 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            Covariance::Full { dim, data } => (0..*dim).map(|i| data[i * dim + i]).sum(),
            Covariance::Diagonal(d) => d.iter().sum(),
        }
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Covariance::Full { data, .. } => data.clone(),
            Covariance::Diagonal(d) => {
                let n = d.len();
                let mut out = vec![0.0; n * n];
                for (i, v) in d.iter().enumerate() {
                    out[i * n + i] = *v;
                }
                out
            }
        }
    }

    /// `Sigma v` for sparse `v`.
    pub fn mul_sparse(&self, v: &SparseVec) -> Vec<f64> {
        match self {
            Covariance::Full { dim, data } => {
                let mut out = vec![0.0; *dim];
                // Sigma is symmetric: accumulate columns as rows.
                for (j, vj) in v.iter() {
                    let row = &data[j * dim..(j + 1) * dim];
                    for (o, s) in out.iter_mut().zip(row) {
                        *o += s * vj;
                    }
                }
                out
            }
            Covariance::Diagonal(d) => {
                let mut out = vec![0.0; d.len()];
                for (j, vj) in v.iter() {
                    out[j] = d[j] * vj;
                }
                out
            }
        }
    }

    /// `x^T Sigma x`.
    pub fn quad_form(&self, x: &SparseVec) -> f64 {
        match self {
            Covariance::Full { .. } => x.dot_dense(&self.mul_sparse(x)),
            Covariance::Diagonal(d) => x.iter().map(|(i, v)| d[i] * v * v).sum(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Covariance::Full { data, .. } => data.iter().all(|v| v.is_finite()),
            Covariance::Diagonal(d) => d.iter().all(|v| v.is_finite()),
        }
    }
}

/// Rank-one Woodbury shrink of `sigma` along `x`.
///
/// Full mode subtracts `u u^T / (gamma + x^T u)` with `u = Sigma x` and then
/// averages the matrix with its transpose. Diagonal mode updates
/// `s_i -= s_i^2 x_i^2 / (gamma + sum_j s_j x_j^2)` on the support of `x`.
pub fn covariance_update(sigma: &mut Covariance, x: &SparseVec, gamma: f64) {
    match sigma {
        Covariance::Full { dim, data } => {
            let n = *dim;
            let u = {
                let mut u = vec![0.0; n];
                for (j, xj) in x.iter() {
                    let row = &data[j * n..(j + 1) * n];
                    for (o, s) in u.iter_mut().zip(row) {
                        *o += s * xj;
                    }
                }
                u
            };
            let denom = gamma + x.dot_dense(&u);
            let scaled: Vec<f64> = u.iter().map(|v| v / denom).collect();
            for i in 0..n {
                let ui = u[i];
                if ui == 0.0 {
                    continue;
                }
                let row = &mut data[i * n..(i + 1) * n];
                for (r, s) in row.iter_mut().zip(&scaled) {
                    *r -= ui * s;
                }
            }
            symmetrize(data, n);
        }
        Covariance::Diagonal(d) => {
            let denom = gamma + x.iter().map(|(i, v)| d[i] * v * v).sum::<f64>();
            for (i, v) in x.iter() {
                d[i] -= d[i] * d[i] * v * v / denom;
            }
        }
    }
}

fn symmetrize(data: &mut [f64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
            data[i * n + j] = avg;
            data[j * n + i] = avg;
        }
    }
}

/// `mu -= eta * sigma_used * g`.
pub fn mean_update(mu: &mut [f64], sigma_used: &Covariance, g: &SparseVec, eta: f64) {
    if g.is_empty() {
        return;
    }
    let step = sigma_used.mul_sparse(g);
    for (m, s) in mu.iter_mut().zip(step) {
        *m -= eta * s;
    }
}

/// Hyperparameters of one ACOG learner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcogParams {
    pub eta: f64,
    pub gamma: f64,
    pub variant: LossVariant,
    pub update_rule: UpdateRule,
}

impl AcogParams {
    pub fn new(eta: f64, gamma: f64, variant: LossVariant) -> Self {
        Self {
            eta,
            gamma,
            variant,
            update_rule: UpdateRule::NewSigma,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GaussianModel {
    mu: Vec<f64>,
    sigma: Covariance,
    params: AcogParams,
}

impl GaussianModel {
    /// `mu = 0`, `Sigma = I`.
    pub fn init(dim: usize, mode: CovarianceMode, params: AcogParams) -> Result<Self, AcogError> {
        if dim == 0 {
            return Err(AcogError::ZeroDimension);
        }
        if !(params.eta > 0.0 && params.eta.is_finite()) {
            return Err(AcogError::BadEta(params.eta));
        }
        if !(params.gamma > 0.0 && params.gamma.is_finite()) {
            return Err(AcogError::BadGamma(params.gamma));
        }
        Ok(Self {
            mu: vec![0.0; dim],
            sigma: Covariance::identity(dim, mode),
            params,
        })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &Covariance {
        &self.sigma
    }

    /// Replaces the covariance. Test hook for checking that predictions ignore it.
    pub fn set_sigma(&mut self, sigma: Covariance) {
        assert_eq!(sigma.dim(), self.mu.len());
        self.sigma = sigma;
    }

    pub fn params(&self) -> &AcogParams {
        &self.params
    }

    /// One round. Returns the loss suffered before the update.
    pub fn step(&mut self, x: &SparseVec, y: Label, rho: f64, variant: LossVariant) -> f64 {
        let score = x.dot_dense(&self.mu);
        let l = losses::loss(variant, score, y, rho);
        if l <= 0.0 {
            return l;
        }
        let g = losses::subgradient(variant, x, y, rho, l);
        match self.params.update_rule {
            UpdateRule::NewSigma => {
                covariance_update(&mut self.sigma, x, self.params.gamma);
                mean_update(&mut self.mu, &self.sigma, &g, self.params.eta);
            }
            UpdateRule::OldSigma => {
                mean_update(&mut self.mu, &self.sigma, &g, self.params.eta);
                covariance_update(&mut self.sigma, x, self.params.gamma);
            }
        }
        debug_assert!(self.mu.iter().all(|v| v.is_finite()) && self.sigma.is_finite());
        l
    }
}

impl Learner for GaussianModel {
    fn score(&self, x: &SparseVec) -> f64 {
        x.dot_dense(&self.mu)
    }

    fn update(&mut self, x: &SparseVec, y: Label, rho: f64) -> Result<(), LearnerError> {
        let variant = self.params.variant;
        self.step(x, y, rho, variant);
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.mu.clone()
    }
}

#![allow(dead_code)]

use std::path::PathBuf;

use costsense::data::{load_dataset, Dataset, Example, Label};
use costsense::learner::{Learner, LearnerError};
use costsense::losses::{self, LossVariant};
use costsense::SparseVec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// The german credit set, if the converted file is present.
pub fn german() -> Option<Dataset> {
    let p = data_dir().join("german.numer");
    p.exists().then(|| load_dataset(&p).expect("german.numer parses"))
}

pub fn flip(y: Label) -> Label {
    match y {
        Label::Positive => Label::Negative,
        Label::Negative => Label::Positive,
    }
}

/// Unit-norm vector over `0..d`, each coordinate present with probability
/// `density` (at least one coordinate always).
pub fn random_unit(rng: &mut ChaCha8Rng, d: usize, density: f64) -> SparseVec {
    loop {
        let mut pairs = Vec::new();
        for i in 0..d {
            if rng.random::<f64>() < density {
                let v: f64 = StandardNormal.sample(rng);
                pairs.push((i, v));
            }
        }
        let x = SparseVec::from_pairs(pairs);
        let n = x.norm();
        if n > 1e-3 {
            return x.scaled(1.0 / n);
        }
    }
}

pub fn random_label(rng: &mut ChaCha8Rng) -> Label {
    if rng.random::<bool>() {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// `t` dense unit-norm Gaussian points labelled by a random hyperplane, with
/// each label flipped independently with probability `noise`.
pub fn noisy_separable(t: usize, d: usize, noise: f64, seed: u64) -> Dataset {
    let mut rng = rng(seed);
    let w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let ex = (0..t)
        .map(|_| {
            let x = random_unit(&mut rng, d, 1.0);
            let mut y = Label::from_score(x.dot_dense(&w));
            if rng.random::<f64>() < noise {
                y = flip(y);
            }
            Example::new(y, x)
        })
        .collect();
    Dataset::from_examples(ex, d).unwrap()
}

/// Gradient descent whose step grows linearly with the round.
pub struct Divergent {
    pub w: Vec<f64>,
    pub t: f64,
    pub eta0: f64,
    pub variant: LossVariant,
}

impl Learner for Divergent {
    fn score(&self, x: &SparseVec) -> f64 {
        x.dot_dense(&self.w)
    }

    fn update(&mut self, x: &SparseVec, y: Label, rho: f64) -> Result<(), LearnerError> {
        self.t += 1.0;
        let l = losses::loss(self.variant, x.dot_dense(&self.w), y, rho);
        let slope = losses::score_slope(self.variant, y, rho, l);
        x.axpy_into(-self.eta0 * self.t * slope, &mut self.w);
        Ok(())
    }

    fn weights(&self) -> Vec<f64> {
        self.w.clone()
    }
}

/// `(log det A, tr A)` for `A = I + sum_t x_t x_t^T / gamma`.
pub fn precision_stats(ds: &Dataset, gamma: f64) -> (f64, f64) {
    let d = ds.dim();
    let mut a = nalgebra::DMatrix::<f64>::identity(d, d);
    for e in ds.examples() {
        let x = nalgebra::DVector::from_vec(e.features.to_dense(d));
        a += &x * x.transpose() / gamma;
    }
    let logdet = a.clone().symmetric_eigen().eigenvalues.iter().map(|v| v.ln()).sum();
    (logdet, a.trace())
}

/// Largest `|V V^T - I|` entry.
pub fn orthonormality_error(v: &costsense::dense::Matrix) -> f64 {
    let g = v.gram();
    let mut worst: f64 = 0.0;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

mod common;

use common::{random_label, random_unit, rng};
use costsense::acog::{covariance_update, AcogParams, Covariance, CovarianceMode, GaussianModel};
use costsense::baselines::{Baseline, LinearModel};
use costsense::data::Label;
use costsense::learner::Learner;
use costsense::losses::{self, LossVariant};
use costsense::sacog::{SketchOptions, SketchParams, SketchedModel, SparseSketchedModel};
use costsense::SparseVec;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

fn variant(two: bool) -> LossVariant {
    if two {
        LossVariant::II
    } else {
        LossVariant::I
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn woodbury_matches_direct_inverse(
        d in 1usize..10, t in 1usize..120, gamma in 0.2f64..5.0,
        density in 0.2f64..1.0, p_active in 0.0f64..1.0, seed in 0u64..10_000,
        diag in any::<bool>(),
    ) {
        let mut r = rng(seed);
        let mode = if diag { CovarianceMode::Diagonal } else { CovarianceMode::Full };
        let mut sigma = Covariance::identity(d, mode);
        let mut precision = DMatrix::<f64>::identity(d, d);
        for _ in 0..t {
            let x = random_unit(&mut r, d, density);
            if r.random::<f64>() < p_active {
                covariance_update(&mut sigma, &x, gamma);
                let xv = DVector::from_vec(x.to_dense(d));
                precision += &xv * xv.transpose() / gamma;
            }
        }
        if mode == CovarianceMode::Full {
            let inv = precision.try_inverse().unwrap();
            for i in 0..d {
                for j in 0..d {
                    prop_assert!((sigma.get(i, j) - inv[(i, j)]).abs() < 1e-8);
                }
            }
        }
        // symmetric, positive diagonal, trace never above d
        for i in 0..d {
            prop_assert!(sigma.get(i, i) > 0.0);
            for j in 0..d {
                prop_assert_eq!(sigma.get(i, j), sigma.get(j, i));
            }
        }
        prop_assert!(sigma.trace() <= d as f64 + 1e-12);
    }

    #[test]
    fn acog_mistakes_dominated_by_cumulative_loss(
        d in 2usize..12, t in 1usize..200, rho in 0.2f64..8.0, eta in 0.01f64..20.0,
        two in any::<bool>(), seed in 0u64..10_000, diag in any::<bool>(),
    ) {
        let v = variant(two);
        let mode = if diag { CovarianceMode::Diagonal } else { CovarianceMode::Full };
        let mut m = GaussianModel::init(d, mode, AcogParams::new(eta, 1.0, v)).unwrap();
        let mut r = rng(seed);
        let (mut mp, mut mn, mut cum) = (0.0, 0.0, 0.0);
        for _ in 0..t {
            let x = random_unit(&mut r, d, 0.6);
            let y = random_label(&mut r);
            if m.predict(&x) != y {
                match y {
                    Label::Positive => mp += 1.0,
                    Label::Negative => mn += 1.0,
                }
            }
            cum += m.step(&x, y, rho, v);
            prop_assert!(m.mu().iter().all(|x| x.is_finite()));
        }
        prop_assert!(rho * mp + mn <= cum + 1e-9);
    }

    #[test]
    fn huge_gamma_tracks_cog(
        d in 1usize..15, eta in 0.01f64..2.0, rho in 0.5f64..4.0,
        two in any::<bool>(), seed in 0u64..10_000,
    ) {
        let v = variant(two);
        let mut a = GaussianModel::init(d, CovarianceMode::Full, AcogParams::new(eta, 1e12, v)).unwrap();
        let mut c = LinearModel::new(d, Baseline::Cog { eta, variant: v });
        let mut r = rng(seed);
        for _ in 0..300 {
            let x = random_unit(&mut r, d, 0.7);
            let y = random_label(&mut r);
            a.update(&x, y, rho).unwrap();
            c.update(&x, y, rho).unwrap();
            for (p, q) in a.mu().iter().zip(c.w()) {
                prop_assert!((p - q).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn sacog_and_ssacog_agree(
        d in 2usize..40, t in 1usize..300, m_idx in 0usize..3, density in 0.1f64..1.0,
        eta in 0.05f64..5.0, rho in 0.3f64..5.0, gamma in 0.5f64..2.0,
        two in any::<bool>(), seed in 0u64..10_000,
    ) {
        let m = [1usize, 3, 5][m_idx].min(d);
        let params = SketchParams { eta, gamma, variant: variant(two) };
        let opts = SketchOptions::with_size(m);
        let mut dense = SketchedModel::new(d, params, opts).unwrap();
        let mut sparse = SparseSketchedModel::new(d, params, opts).unwrap();
        let mut r = rng(seed);
        for _ in 0..t {
            let x = random_unit(&mut r, d, density);
            let y = random_label(&mut r);
            let (sd, ss) = (dense.score(&x), sparse.lazy_score(&x));
            prop_assert!((sd - ss).abs() <= 1e-6 * sd.abs().max(1.0));
            let mu = sparse.materialize_mu();
            prop_assert!((ss - x.dot_dense(&mu)).abs() <= 1e-10 * ss.abs().max(1.0));
            dense.update(&x, y, rho).unwrap();
            sparse.update(&x, y, rho).unwrap();
        }
        let mu = sparse.materialize_mu();
        for (a, b) in dense.mu().iter().zip(&mu) {
            prop_assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn ssacog_touches_only_the_support(
        d in 20usize..300, nnz in 1usize..5, t in 1usize..40, seed in 0u64..10_000,
    ) {
        let params = SketchParams { eta: 0.5, gamma: 1.0, variant: LossVariant::II };
        let mut sp = SparseSketchedModel::new(d, params, SketchOptions::with_size(3)).unwrap();
        let mut r = rng(seed);
        for _ in 0..t {
            let idx: std::collections::BTreeSet<usize> = (0..nnz).map(|_| r.random_range(0..d)).collect();
            let x = SparseVec::from_pairs(idx.into_iter().map(|i| (i, r.random_range(-1.0..1.0))));
            let before = sp.w().to_vec();
            sp.update(&x, random_label(&mut r), 2.0).unwrap();
            for (i, (a, b)) in sp.w().iter().zip(&before).enumerate() {
                if a != b {
                    prop_assert!(x.indices().contains(&i));
                }
            }
        }
    }
}

#[test]
fn first_coordinate_stream_is_exact_for_one_direction() {
    let mut r = rng(5);
    for trial in 0..20 {
        let d = r.random_range(1..8);
        let gamma = r.random_range(0.3..3.0);
        let mut full = Covariance::identity(d, CovarianceMode::Full);
        let mut dense = costsense::sketch::OjaSketch::new(1, d, Default::default()).unwrap();
        let mut sparse = costsense::sketch::SparseOjaSketch::new(1, d, Default::default()).unwrap();
        for t in 1..=100 {
            let a: f64 = r.random_range(0.2..2.0) * if r.random::<bool>() { 1.0 } else { -1.0 };
            let x = SparseVec::from_pairs([(0, a)]);
            covariance_update(&mut full, &x, gamma);
            let xhat = costsense::sketch::to_sketch_vector(&x, gamma);
            dense.update(&xhat);
            sparse.update(&xhat).unwrap();
            let want = full.to_dense();
            for got in [dense.reconstruct_sigma(), sparse.reconstruct_sigma()] {
                for (g, w) in got.as_slice().iter().zip(&want) {
                    assert!((g - w).abs() <= 1e-9, "trial {trial} t {t}: {g} vs {w}");
                }
            }
        }
    }
}

#[test]
fn subgradient_inequality_on_random_points() {
    let mut r = rng(9);
    for _ in 0..2000 {
        let v = variant(r.random::<bool>());
        let rho = r.random_range(0.1..10.0);
        let y = random_label(&mut r);
        let (s, s2) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let l = losses::loss(v, s, y, rho);
        let slope = losses::score_slope(v, y, rho, l);
        assert!(losses::loss(v, s2, y, rho) >= l + slope * (s2 - s) - 1e-12);
    }
}

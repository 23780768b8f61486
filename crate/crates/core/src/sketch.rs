//! Streaming low-rank approximations of the accumulated second-moment matrix.
//!
//! Both sketches run Oja's iteration with step `1/t` on the to-sketch vectors
//! `x_hat = x / sqrt(gamma)`:
//!
//! ```text
//! Lambda_t = (1 - 1/t) Lambda_{t-1} + (1/t) (V x_hat)^2
//! V_t      = orth(V_{t-1} + (1/t) (V x_hat) x_hat^T)
//! ```
//!
//! With `S = (t Lambda)^{1/2} V` and `H = diag(1 / (1 + t Lambda_i))` the
//! implied covariance is `Sigma = I - S^T H S`.
//!
//! [`OjaSketch`] stores `V` densely and re-orthonormalizes it every round in
//! `O(m^2 d)`. [`SparseOjaSketch`] factors `V = F Z`, where `Z` only ever
//! receives rank-one updates on the support of `x_hat` and the small `m x m`
//! matrix `F` is recomputed by Gram–Schmidt in the inner product
//! `<a, b> = a^T K b` with `K = Z Z^T` maintained incrementally.

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::dense::Matrix;
use crate::sparse::SparseVec;

/// Below this norm a row is treated as collapsed.
const COLLAPSE_TOL: f64 = 1e-10;
/// Residual overlap that triggers a second projection pass.
const REORTH_TOL: f64 = 1e-10;
/// `beta^T K beta` values in `[-NEG_TOL, 0)` are rounding noise.
const NEG_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SketchError {
    #[error("sketch size {m} must satisfy 1 <= m <= d = {d}")]
    SizeOutOfRange { m: usize, d: usize },
    #[error("Gram matrix is not positive semidefinite (beta^T K beta = {0})")]
    NotPsd(f64),
    #[error("sketch basis lost rank: {kept} of {m} directions survive orthonormalization")]
    RankLoss { kept: usize, m: usize },
}

/// Initial orthonormal basis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SketchInit {
    /// The first `m` canonical basis vectors.
    #[default]
    Canonical,
    /// Orthonormalized Gaussian rows from a seeded ChaCha8 stream.
    Random { seed: u64 },
}

fn initial_basis(m: usize, d: usize, init: SketchInit) -> Result<Matrix, SketchError> {
    if m == 0 || m > d {
        return Err(SketchError::SizeOutOfRange { m, d });
    }
    Ok(match init {
        SketchInit::Canonical => Matrix::canonical_rows(m, d),
        SketchInit::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data = (0..m * d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let mut v = Matrix::from_row_major(m, d, data);
            orthonormalize_rows(&mut v);
            v
        }
    })
}

/// The scaled input `x / sqrt(gamma)`.
pub fn to_sketch_vector(x: &SparseVec, gamma: f64) -> SparseVec {
    if gamma == 1.0 {
        return x.clone();
    }
    x.scaled(1.0 / gamma.sqrt())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Modified Gram–Schmidt on the rows of `v`, in place.
///
/// A row whose overlap with earlier rows still exceeds `1e-10` after one pass
/// gets a second pass. A row that collapses below `1e-10` is replaced by the
/// first canonical vector that survives orthogonalization against the
/// earlier rows. Returns the number of such replacements.
pub fn orthonormalize_rows(v: &mut Matrix) -> usize {
    let (m, d) = (v.rows(), v.cols());
    let mut reseeds = 0;
    for i in 0..m {
        let original = dot(v.row(i), v.row(i)).sqrt();
        project_out_previous(v, i);
        let mut norm = dot(v.row(i), v.row(i)).sqrt();
        if norm > COLLAPSE_TOL * original.max(1.0) {
            let overlap = (0..i)
                .map(|j| dot(v.row(i), v.row(j)).abs())
                .fold(0.0, f64::max);
            if overlap > REORTH_TOL * norm {
                project_out_previous(v, i);
                norm = dot(v.row(i), v.row(i)).sqrt();
            }
        }
        if norm <= COLLAPSE_TOL * original.max(1.0) {
            warn!("sketch row {i} collapsed during orthonormalization; reseeding");
            reseeds += 1;
            norm = reseed_row(v, i, d);
        }
        for x in v.row_mut(i) {
            *x /= norm;
        }
    }
    reseeds
}

fn project_out_previous(v: &mut Matrix, i: usize) {
    for j in 0..i {
        let r = dot(v.row(i), v.row(j));
        if r == 0.0 {
            continue;
        }
        let (head, tail) = v.row_pair_mut(j, i);
        for (a, b) in tail.iter_mut().zip(head) {
            *a -= r * b;
        }
    }
}

fn reseed_row(v: &mut Matrix, i: usize, d: usize) -> f64 {
    for k in 0..d {
        let row = v.row_mut(i);
        row.iter_mut().for_each(|x| *x = 0.0);
        row[k] = 1.0;
        project_out_previous(v, i);
        project_out_previous(v, i);
        let norm = dot(v.row(i), v.row(i)).sqrt();
        if norm > 0.5 {
            return norm;
        }
    }
    unreachable!("m <= d guarantees a surviving canonical direction")
}

/// Dense Oja sketch with orthonormal eigenvector estimates `V` (`m x d`).
#[derive(Clone, Debug)]
pub struct OjaSketch {
    t: u64,
    lambda: Vec<f64>,
    v: Matrix,
    h: Vec<f64>,
    reseeds: usize,
}

impl OjaSketch {
    /// `t = 0`, `Lambda = 0`, `H = 1`, `S = 0` and an orthonormal `V`.
    pub fn new(m: usize, d: usize, init: SketchInit) -> Result<Self, SketchError> {
        let v = initial_basis(m, d, init)?;
        Ok(Self {
            t: 0,
            lambda: vec![0.0; m],
            v,
            h: vec![1.0; m],
            reseeds: 0,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn m(&self) -> usize {
        self.v.rows()
    }

    pub fn d(&self) -> usize {
        self.v.cols()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Rows replaced after collapsing, over the sketch's lifetime.
    pub fn reseeds(&self) -> usize {
        self.reseeds
    }

    /// `t * Lambda_i` per direction, i.e. the squared row norms of `S`.
    fn scale(&self) -> impl Iterator<Item = f64> + '_ {
        let t = self.t as f64;
        self.lambda.iter().map(move |l| t * l)
    }

    /// `S = (t Lambda)^{1/2} V`.
    pub fn sketch_matrix(&self) -> Matrix {
        let mut s = self.v.clone();
        for (i, sc) in self.scale().collect::<Vec<_>>().into_iter().enumerate() {
            let r = sc.sqrt();
            s.row_mut(i).iter_mut().for_each(|x| *x *= r);
        }
        s
    }

    pub fn update(&mut self, xhat: &SparseVec) {
        self.t += 1;
        let step = 1.0 / self.t as f64;
        let proj: Vec<f64> = (0..self.m()).map(|i| xhat.dot_dense(self.v.row(i))).collect();
        for (l, p) in self.lambda.iter_mut().zip(&proj) {
            *l = (1.0 - step) * *l + step * p * p;
        }
        for (i, p) in proj.iter().enumerate() {
            xhat.axpy_into(step * p, self.v.row_mut(i));
        }
        self.reseeds += orthonormalize_rows(&mut self.v);
        let t = self.t as f64;
        for (h, l) in self.h.iter_mut().zip(&self.lambda) {
            *h = 1.0 / (1.0 + t * l);
        }
    }

    /// `S^T H S g = sum_i (t Lambda_i H_i) (v_i . g) v_i`.
    pub fn correction(&self, g: &SparseVec) -> Vec<f64> {
        let mut out = vec![0.0; self.d()];
        for (i, (sc, h)) in self.scale().zip(&self.h).enumerate() {
            let coef = sc * h * g.dot_dense(self.v.row(i));
            if coef != 0.0 {
                for (o, v) in out.iter_mut().zip(self.v.row(i)) {
                    *o += coef * v;
                }
            }
        }
        out
    }

    /// `I_d - S^T H S`. Diagnostic only: allocates `d x d`.
    pub fn reconstruct_sigma(&self) -> Matrix {
        let weights: Vec<f64> = self.scale().zip(&self.h).map(|(s, h)| s * h).collect();
        reconstruct(&self.v, &weights)
    }
}

fn reconstruct(basis: &Matrix, weights: &[f64]) -> Matrix {
    let d = basis.cols();
    let mut sigma = Matrix::identity(d);
    for (i, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let row = basis.row(i);
        for a in 0..d {
            let ra = w * row[a];
            if ra == 0.0 {
                continue;
            }
            for b in 0..d {
                sigma[(a, b)] -= ra * row[b];
            }
        }
    }
    sigma
}

/// Output of the Gram-matrix Gram–Schmidt: `L Q = F` and `Q K Q^T = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    /// `m x r`, lower-triangular in the kept columns.
    pub l: Matrix,
    /// `r x m`; `r < m` only when some rows of `F` were dependent under `K`.
    pub q: Matrix,
}

/// Gram–Schmidt on the rows of `F` under `<a, b> = a^T K b`.
///
/// For each row `f`: `alpha = Q K f`, `beta = f - Q^T alpha`, `c = sqrt(beta^T K beta)`.
/// Rows with `c < 1e-10` are dependent and contribute no row to `Q`. Each row
/// is projected twice (classical Gram–Schmidt with reorthogonalization), which
/// leaves `L Q = F` exact up to rounding.
pub fn decompose(f: &Matrix, k: &Matrix) -> Result<Decomposition, SketchError> {
    decompose_counted(f, k).map(|(dec, _)| dec)
}

/// As [`decompose`], also returning the number of scalar multiply-adds.
pub(crate) fn decompose_counted(
    f: &Matrix,
    k: &Matrix,
) -> Result<(Decomposition, u64), SketchError> {
    let m = f.rows();
    assert_eq!(f.cols(), m);
    assert_eq!((k.rows(), k.cols()), (m, m));
    let mut ops = 0u64;
    let mut q_rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    // Row i of L, indexed by kept Q row.
    let mut l_rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut beta = f.row(i).to_vec();
        let mut alpha = vec![0.0; q_rows.len()];
        for _pass in 0..2 {
            let kb = k.mul_vec(&beta);
            ops += (m * m) as u64;
            let a: Vec<f64> = q_rows.iter().map(|q| dot(q, &kb)).collect();
            for (q, aj) in q_rows.iter().zip(&a) {
                for (b, qv) in beta.iter_mut().zip(q) {
                    *b -= aj * qv;
                }
            }
            ops += (2 * q_rows.len() * m) as u64;
            for (acc, aj) in alpha.iter_mut().zip(&a) {
                *acc += aj;
            }
        }
        let c2 = dot(&beta, &k.mul_vec(&beta));
        ops += (m * m + m) as u64;
        if c2 < -NEG_TOL {
            return Err(SketchError::NotPsd(c2));
        }
        let c = c2.max(0.0).sqrt();
        if c >= COLLAPSE_TOL {
            q_rows.push(beta.iter().map(|b| b / c).collect());
            alpha.push(c);
        }
        l_rows.push(alpha);
    }
    let r = q_rows.len();
    let l_rows: Vec<Vec<f64>> = l_rows
        .into_iter()
        .map(|mut row| {
            row.resize(r, 0.0);
            row
        })
        .collect();
    let l = if r == 0 {
        Matrix::zeros(m, 0)
    } else {
        Matrix::from_rows(&l_rows)
    };
    let q = if r == 0 {
        Matrix::zeros(0, m)
    } else {
        Matrix::from_rows(&q_rows)
    };
    Ok((Decomposition { l, q }, ops))
}

/// Oja sketch whose basis `V = F Z` admits sparse updates.
#[derive(Clone, Debug)]
pub struct SparseOjaSketch {
    t: u64,
    lambda: Vec<f64>,
    f: Matrix,
    z: Matrix,
    k: Matrix,
    h: Vec<f64>,
    last_delta: Vec<f64>,
    ops: u64,
}

impl SparseOjaSketch {
    /// `t = 0`, `F = K = I`, `H = 1`, `Lambda = 0`, `Z` orthonormal rows.
    pub fn new(m: usize, d: usize, init: SketchInit) -> Result<Self, SketchError> {
        let z = initial_basis(m, d, init)?;
        let k = match init {
            SketchInit::Canonical => Matrix::identity(m),
            SketchInit::Random { .. } => z.gram(),
        };
        Ok(Self {
            t: 0,
            lambda: vec![0.0; m],
            f: Matrix::identity(m),
            z,
            k,
            h: vec![1.0; m],
            last_delta: vec![0.0; m],
            ops: 0,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn m(&self) -> usize {
        self.f.rows()
    }

    pub fn d(&self) -> usize {
        self.z.cols()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn f(&self) -> &Matrix {
        &self.f
    }

    pub fn z(&self) -> &Matrix {
        &self.z
    }

    /// Incrementally maintained `Z Z^T`.
    pub fn k(&self) -> &Matrix {
        &self.k
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// `delta_t` from the latest update; `Z_t - Z_{t-1} = delta_t x_hat^T`.
    pub fn last_delta(&self) -> &[f64] {
        &self.last_delta
    }

    /// Scalar multiply-adds spent inside updates so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// `Z v` for sparse `v`, in `O(m s)`.
    pub fn z_mul(&self, v: &SparseVec) -> Vec<f64> {
        (0..self.m()).map(|i| v.dot_dense(self.z.row(i))).collect()
    }

    /// `diag(t Lambda_i H_i)`.
    pub fn weights(&self) -> Vec<f64> {
        let t = self.t as f64;
        self.lambda
            .iter()
            .zip(&self.h)
            .map(|(l, h)| t * l * h)
            .collect()
    }

    /// `F^T diag(t Lambda H) F u` for an `m`-vector `u`.
    pub fn core_apply(&self, u: &[f64]) -> Vec<f64> {
        let fu = self.f.mul_vec(u);
        let scaled: Vec<f64> = fu.iter().zip(self.weights()).map(|(a, w)| a * w).collect();
        self.f.tr_mul_vec(&scaled)
    }

    /// The orthonormal basis `F Z` (dense, `m x d`).
    pub fn basis(&self) -> Matrix {
        self.f.matmul(&self.z)
    }

    /// `Z Z^T` recomputed from scratch.
    pub fn gram_from_scratch(&self) -> Matrix {
        self.z.gram()
    }

    /// `I - Z^T F^T (t Lambda H) F Z`. Diagnostic only.
    pub fn reconstruct_sigma(&self) -> Matrix {
        reconstruct(&self.basis(), &self.weights())
    }

    pub fn update(&mut self, xhat: &SparseVec) -> Result<(), SketchError> {
        let m = self.m();
        let s = xhat.nnz();
        self.t += 1;
        let step = 1.0 / self.t as f64;

        let zx = self.z_mul(xhat);
        let proj = self.f.mul_vec(&zx);
        self.ops += (m * s + m * m) as u64;
        for (l, p) in self.lambda.iter_mut().zip(&proj) {
            *l = (1.0 - step) * *l + step * p * p;
        }

        // delta = F^{-1} Gamma F Z x_hat; Gamma is a multiple of I, so the
        // F factors cancel.
        let delta: Vec<f64> = zx.iter().map(|v| step * v).collect();
        let xx = xhat.norm_squared();
        for a in 0..m {
            for b in 0..m {
                self.k[(a, b)] += zx[a] * delta[b] + delta[a] * zx[b] + xx * delta[a] * delta[b];
            }
        }
        for (a, da) in delta.iter().enumerate() {
            if *da != 0.0 {
                xhat.axpy_into(*da, self.z.row_mut(a));
            }
        }
        self.ops += (m * m + m * s + s) as u64;

        let (dec, dec_ops) = decompose_counted(&self.f, &self.k)?;
        self.ops += dec_ops;
        if dec.q.rows() < m {
            return Err(SketchError::RankLoss {
                kept: dec.q.rows(),
                m,
            });
        }
        self.f = dec.q;

        let t = self.t as f64;
        for (h, l) in self.h.iter_mut().zip(&self.lambda) {
            *h = 1.0 / (1.0 + t * l);
        }
        self.last_delta = delta;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sv(pairs: &[(usize, f64)]) -> SparseVec {
        SparseVec::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn to_sketch_vector_cases() {
        assert_eq!(to_sketch_vector(&sv(&[(0, 2.0)]), 4.0), sv(&[(0, 1.0)]));
        let x = sv(&[(1, 0.3), (4, -2.0)]);
        assert_eq!(to_sketch_vector(&x, 1.0), x);
        assert!(to_sketch_vector(&SparseVec::new(), 3.0).is_empty());
    }

    #[test]
    fn init_state() {
        let sk = OjaSketch::new(2, 4, SketchInit::Canonical).unwrap();
        assert_eq!(sk.v(), &Matrix::canonical_rows(2, 4));
        assert_eq!(sk.h(), &[1.0, 1.0]);
        assert_eq!(sk.lambda(), &[0.0, 0.0]);
        assert_eq!(sk.sketch_matrix(), Matrix::zeros(2, 4));
        assert_eq!(sk.reconstruct_sigma(), Matrix::identity(4));

        assert!(matches!(
            OjaSketch::new(0, 4, SketchInit::Canonical),
            Err(SketchError::SizeOutOfRange { .. })
        ));
        assert!(matches!(
            OjaSketch::new(5, 4, SketchInit::Canonical),
            Err(SketchError::SizeOutOfRange { .. })
        ));

        let sp = SparseOjaSketch::new(2, 4, SketchInit::Canonical).unwrap();
        assert_eq!(sp.z(), &Matrix::canonical_rows(2, 4));
        assert_eq!(sp.k(), &Matrix::identity(2));
        assert_eq!(sp.f(), &Matrix::identity(2));
        assert_eq!(sp.h(), &[1.0, 1.0]);
        assert_eq!(sp.lambda(), &[0.0, 0.0]);
        assert!(SparseOjaSketch::new(3, 2, SketchInit::Canonical).is_err());
    }

    #[test]
    fn random_init_is_orthonormal_and_seeded() {
        let a = OjaSketch::new(3, 7, SketchInit::Random { seed: 9 }).unwrap();
        let b = OjaSketch::new(3, 7, SketchInit::Random { seed: 9 }).unwrap();
        assert_eq!(a.v(), b.v());
        assert!(a.v().gram().max_abs_diff(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn oja_update_hand_example() {
        let mut sk = OjaSketch::new(1, 2, SketchInit::Canonical).unwrap();
        sk.update(&sv(&[(0, 2.0)]));
        assert_eq!(sk.t(), 1);
        assert_eq!(sk.lambda(), &[4.0]);
        assert_eq!(sk.v().row(0), &[1.0, 0.0]);
        assert_eq!(sk.sketch_matrix().row(0), &[2.0, 0.0]);
        assert_abs_diff_eq!(sk.h()[0], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(sk.reconstruct_sigma()[(0, 0)], 0.2, epsilon = 1e-15);

        sk.update(&sv(&[(1, 1.0)]));
        assert_eq!(sk.lambda(), &[2.0]);
        assert_eq!(sk.v().row(0), &[1.0, 0.0]);
        assert_eq!(sk.sketch_matrix().row(0), &[2.0, 0.0]);
        assert_abs_diff_eq!(sk.h()[0], 0.2, epsilon = 1e-15);
    }

    #[test]
    fn repeated_direction_fixed_point() {
        let c = 0.7;
        let mut sk = OjaSketch::new(1, 3, SketchInit::Canonical).unwrap();
        for t in 1..=50u64 {
            sk.update(&sv(&[(0, c)]));
            assert_abs_diff_eq!(sk.lambda()[0], c * c, epsilon = 1e-14);
            let s = sk.sketch_matrix();
            assert_abs_diff_eq!(s[(0, 0)], (t as f64).sqrt() * c, epsilon = 1e-12);
            assert_eq!(s[(0, 1)], 0.0);
        }
    }

    #[test]
    fn decompose_identity() {
        let dec = decompose(&Matrix::identity(3), &Matrix::identity(3)).unwrap();
        assert_eq!(dec.l, Matrix::identity(3));
        assert_eq!(dec.q, Matrix::identity(3));
    }

    #[test]
    fn decompose_scaled_gram() {
        let k = Matrix::from_rows(&[vec![4.0, 0.0], vec![0.0, 1.0]]);
        let dec = decompose(&Matrix::identity(2), &k).unwrap();
        assert_eq!(dec.l, Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]));
        assert_eq!(dec.q, Matrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 1.0]]));
        assert_eq!(dec.l.matmul(&dec.q), Matrix::identity(2));
        let qkq = dec.q.matmul(&k).matmul(&dec.q.transpose());
        assert_eq!(qkq, Matrix::identity(2));
    }

    #[test]
    fn decompose_drops_dependent_rows() {
        // second row of F equals the first
        let f = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]]);
        let dec = decompose(&f, &Matrix::identity(2)).unwrap();
        assert_eq!(dec.q.rows(), 1);
        assert_eq!(dec.l.cols(), 1);
        assert!(dec.l.matmul(&dec.q).max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn decompose_rejects_indefinite_gram() {
        let k = Matrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(
            decompose(&Matrix::identity(2), &k),
            Err(SketchError::NotPsd(_))
        ));
    }

    #[test]
    fn sparse_update_zero_vector() {
        let mut sp = SparseOjaSketch::new(2, 3, SketchInit::Canonical).unwrap();
        sp.update(&sv(&[(0, 1.0), (2, 0.5)])).unwrap();
        sp.update(&sv(&[(1, 0.8)])).unwrap();
        let (lambda, z, f) = (sp.lambda().to_vec(), sp.z().clone(), sp.f().clone());
        sp.update(&SparseVec::new()).unwrap();
        for (a, b) in sp.lambda().iter().zip(&lambda) {
            assert_abs_diff_eq!(*a, b * (1.0 - 1.0 / 3.0), epsilon = 1e-15);
        }
        assert_eq!(sp.z(), &z);
        assert!(sp.f().max_abs_diff(&f) < 1e-12);
        assert_eq!(sp.last_delta(), &[0.0, 0.0]);
    }

    #[test]
    fn sparse_update_touches_only_support() {
        let mut sp = SparseOjaSketch::new(3, 10, SketchInit::Canonical).unwrap();
        sp.update(&sv(&[(0, 0.5), (4, 0.5), (7, 0.7)])).unwrap();
        let before = sp.z().clone();
        let x = sv(&[(1, 0.3), (4, -0.2), (9, 0.9)]);
        sp.update(&x).unwrap();
        for i in 0..3 {
            for j in 0..10 {
                if !x.indices().contains(&j) {
                    assert_eq!(sp.z()[(i, j)], before[(i, j)]);
                }
                let expected = before[(i, j)] + sp.last_delta()[i] * x.get(j);
                assert_abs_diff_eq!(sp.z()[(i, j)], expected, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn sparse_matches_dense_single_direction() {
        let mut dense = OjaSketch::new(1, 2, SketchInit::Canonical).unwrap();
        let mut sparse = SparseOjaSketch::new(1, 2, SketchInit::Canonical).unwrap();
        for t in 0..100 {
            let x = sv(&[(0, 0.2 + 0.01 * t as f64)]);
            dense.update(&x);
            sparse.update(&x).unwrap();
            assert!(dense.reconstruct_sigma().max_abs_diff(&sparse.reconstruct_sigma()) < 1e-9);
        }
    }

    #[test]
    fn orthonormalize_reseeds_collapsed_row() {
        let mut v = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]]);
        let reseeds = orthonormalize_rows(&mut v);
        assert_eq!(reseeds, 1);
        assert_eq!(v.row(1), &[0.0, 1.0, 0.0]);
        assert!(v.gram().max_abs_diff(&Matrix::identity(2)) < 1e-15);
    }
}

//! Seeded random states, unitaries and channels used by the samplers,
//! optimizers and property harnesses.
//!
//! Every stream is a `ChaCha8Rng` keyed by `(seed, stream)`, so parallel work
//! split by index reproduces bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, c, CMat, CVec};
use crate::operator::{Decomposition, DensityOperator};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVec {
    let v = CVec::from_fn(dim, |_, _| c(gaussian(rng), gaussian(rng)));
    let n = v.norm();
    v / linalg::real(n)
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    DensityOperator::from_trusted(linalg::projector_onto(&random_vector(rng, dim)))
}

/// Random state of the given rank from the induced (Ginibre) measure.
pub fn random_state_with_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityOperator {
    let g = ginibre(rng, dim, rank.clamp(1, dim));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    DensityOperator::from_trusted(linalg::hermitian_part(&(m / linalg::real(tr))))
}

/// Random state with a rank drawn uniformly from `1..=dim`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    let rank = rng.random_range(1..=dim);
    random_state_with_rank(rng, dim, rank)
}

/// Full-rank random state.
pub fn random_full_rank<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    random_state_with_rank(rng, dim, dim)
}

/// Haar-random unitary via phase-corrected QR.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    linalg::qr_orthonormalize(&ginibre(rng, n, n))
}

/// Random `rows x cols` matrix with orthonormal columns.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    linalg::qr_orthonormalize(&ginibre(rng, rows, cols))
}

/// `⊕_k U_k` with Haar-random blocks.
pub fn block_unitary<R: Rng + ?Sized>(rng: &mut R, l: &Decomposition) -> CMat {
    let n = l.total();
    let mut u = linalg::zeros(n, n);
    for r in l.ranges() {
        let b = haar_unitary(rng, r.len());
        u.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&b);
    }
    u
}

/// Random block-diagonal state: random block weights times random block
/// states.
pub fn block_diagonal_state<R: Rng + ?Sized>(rng: &mut R, l: &Decomposition) -> DensityOperator {
    let n = l.total();
    let w: Vec<f64> = (0..l.len()).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = w.iter().sum();
    let mut m = linalg::zeros(n, n);
    for (k, r) in l.ranges().into_iter().enumerate() {
        let s = random_state(rng, r.len());
        let block = s.matrix() * linalg::real(w[k] / total);
        m.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&block);
    }
    DensityOperator::from_trusted(m)
}

/// Kraus operators of a random channel: blocks of a random isometry
/// `C^d -> C^d ⊗ C^n`.
pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_kraus: usize) -> Vec<CMat> {
    let v = random_isometry(rng, dim * n_kraus, dim);
    (0..n_kraus)
        .map(|i| v.rows(i * dim, dim).into_owned())
        .collect()
}

/// Random probability vector from the flat Dirichlet distribution.
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random Hermitian matrix with Gaussian entries scaled by `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> CMat {
    let g = ginibre(rng, n, n);
    linalg::hermitian_part(&g) * linalg::real(scale)
}

//! Reference construction of a uniformly random orthogonal map sending one
//! unit vector to another, at `O(n³)` cost. Used only to benchmark the
//! statistics of the algebraic rotations.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `R`'s diagonal moved into `Q`.
pub fn haar_orthogonal<R: rand::Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Reflection through the hyperplane bisecting `x` and `y`, which swaps the
/// two unit vectors. Identity when they coincide.
pub fn mediator_reflection(x: &[f64], y: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let w = DVector::from_iterator(n, x.iter().zip(y).map(|(a, b)| a - b));
    let len = w.norm();
    if len < 1e-15 {
        return DMatrix::identity(n, n);
    }
    let w = w / len;
    DMatrix::identity(n, n) - 2.0 * &w * w.transpose()
}

/// Orthogonal `Q` with `Q x = y`, uniformly distributed among all such maps.
///
/// A Haar matrix `G` moves `x` to a uniform point `G x`, and the mediator
/// reflection then carries `G x` onto `y`.
///
/// # Panics
/// If `x` and `y` differ in length.
pub fn random_orthogonal_oracle(x: &[f64], y: &[f64], seed: u64) -> DMatrix<f64> {
    assert_eq!(x.len(), y.len(), "oracle inputs must have equal length");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = haar_orthogonal(x.len(), &mut rng);
    let gx = &g * DVector::from_column_slice(x);
    mediator_reflection(gx.as_slice(), y) * g
}

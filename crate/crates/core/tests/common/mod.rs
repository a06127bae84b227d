#![allow(dead_code)]

use dexcite::StateVec;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec<R: Rng>(n: usize, scale: f64, rng: &mut R) -> StateVec {
    StateVec::new((0..n).map(|_| rng.gen_range(-scale..scale)).collect())
}

/// Haar-ish random orthogonal matrix from the QR factor of a Gaussian-like
/// matrix, with column signs fixed so that R has a positive diagonal.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

pub fn apply(q: &DMatrix<f64>, v: &StateVec) -> StateVec {
    let x = q * nalgebra::DVector::from_column_slice(v.as_slice());
    StateVec::new(x.as_slice().to_vec())
}

pub fn rotate2(theta: f64, v: [f64; 2]) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

#![allow(dead_code)]

use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xy_ergodicity::dynamics::DensityMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat<c64> {
    Mat::from_fn(rows, cols, |_, _| {
        c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// `A A† / tr(A A†)` with `A` of the given rank.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> DensityMatrix {
    let a = random_complex(rng, dim, rank);
    let m = &a * a.adjoint();
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    let m = Mat::from_fn(dim, dim, |r, c| m[(r, c)] / tr);
    DensityMatrix::new(m).expect("AA† is a state")
}

/// Haar-ish random unitary from the QR factor of a Gaussian-like matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> Mat<c64> {
    let a = random_complex(rng, dim, dim);
    a.qr().compute_Q()
}

pub fn kron(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

pub fn conjugate(u: &Mat<c64>, rho: &DensityMatrix) -> DensityMatrix {
    let m = u * rho.matrix() * u.adjoint();
    let n = m.nrows();
    // restore exact Hermiticity lost to rounding
    let h = Mat::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    DensityMatrix::new(h).expect("unitary conjugation preserves states")
}

pub fn max_abs_diff(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    let mut m: f64 = 0.0;
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            m = m.max((a[(r, c)] - b[(r, c)]).norm());
        }
    }
    m
}

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specasym_core::cmat::{ComplexMatrix, C64};
use specasym_core::contour::CutPair;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Random eigenvalues with modulus in [0.5, 3], pairwise at least 0.1 apart
/// and at least `clearance` away from both rays of every pair in `cuts`.
pub fn spread_spectrum(r: &mut ChaCha8Rng, n: usize, cuts: &[CutPair], clearance: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(n);
    while out.len() < n {
        let z = C64::from_polar(r.gen_range(0.5..3.0), r.gen_range(0.0..std::f64::consts::TAU));
        let ok_rays = cuts.iter().all(|cp| cp.ray_distance(z) >= clearance);
        let ok_sep = out.iter().all(|w| (w - z).norm() >= 0.1);
        if ok_rays && ok_sep {
            out.push(z);
        }
    }
    out
}

/// `V diag(values) V^{-1}` with a moderately conditioned random `V`.
pub fn similar_to_diag(r: &mut ChaCha8Rng, values: &[C64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = values.len();
    let amp = 0.4 / (n as f64).sqrt();
    let mut v = ComplexMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            v[(i, j)] += c(r.gen_range(-amp..amp), r.gen_range(-amp..amp));
        }
    }
    let vi = v.inverse().expect("perturbed identity is invertible");
    (&(&v * &ComplexMatrix::diag(values)) * &vi, v)
}

pub fn random_matrix(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        }
    }
    m
}

//! Seeded generators for the randomized checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specasym_core::cmat::{ComplexMatrix, C64};
use specasym_core::contour::CutPair;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn cx(r: &mut ChaCha8Rng, amp: f64) -> C64 {
    C64::new(r.gen_range(-amp..amp), r.gen_range(-amp..amp))
}

/// `n` eigenvalues with modulus in `[0.5, 3]`, pairwise at least 0.1
/// apart and at least `clearance` away from every cut ray.
pub fn spread_spectrum(r: &mut ChaCha8Rng, n: usize, cuts: &[CutPair], clearance: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(n);
    while out.len() < n {
        let z = C64::from_polar(r.gen_range(0.5..3.0), r.gen_range(0.0..std::f64::consts::TAU));
        let ok_rays = cuts.iter().all(|cp| cp.ray_distance(z) >= clearance);
        if ok_rays && out.iter().all(|w| (w - z).norm() >= 0.1) {
            out.push(z);
        }
    }
    out
}

/// Real eigenvalues of both signs with modulus in `[0.5, 3]`, 0.1 apart.
pub fn real_spectrum(r: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(n);
    while out.len() < n {
        let v = r.gen_range(0.5..3.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let z = C64::new(v, 0.0);
        if out.iter().all(|w| (w - z).norm() >= 0.1) {
            out.push(z);
        }
    }
    out
}

/// `V diag(values) V^{-1}` with `V` a random perturbation of the identity.
pub fn similar_to_diag(r: &mut ChaCha8Rng, values: &[C64]) -> ComplexMatrix {
    let n = values.len();
    let amp = 0.4 / (n as f64).sqrt();
    let mut v = ComplexMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            v[(i, j)] += cx(r, amp);
        }
    }
    let vi = v.inverse().expect("perturbed identity is invertible");
    &(&v * &ComplexMatrix::diag(values)) * &vi
}

pub fn random_matrix(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = cx(r, 1.0);
        }
    }
    m
}

/// Cayley transform of a random Hermitian matrix.
pub fn random_unitary(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(r, n);
    let h = &g + &g.adjoint();
    let i = ComplexMatrix::scalar(n, C64::new(0.0, 1.0));
    let den = (&h + &i).inverse().expect("h + i is invertible for Hermitian h");
    &(&h - &i) * &den
}

//! Quadrature rules and compensated accumulation.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::cmat::{C64, ZERO};

/// Neumaier-compensated accumulator for a complex buffer.
///
/// Summation order is whatever order `add` is called in; callers iterate
/// nodes in ascending index so results are reproducible bit for bit.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: Vec<C64>,
    comp: Vec<C64>,
}

#[inline]
fn two_sum(s: f64, c: f64, x: f64) -> (f64, f64) {
    let t = s + x;
    let c = if s.abs() >= x.abs() { c + ((s - t) + x) } else { c + ((x - t) + s) };
    (t, c)
}

impl CompensatedSum {
    pub fn new(len: usize) -> Self {
        Self { sum: vec![ZERO; len], comp: vec![ZERO; len] }
    }

    pub fn len(&self) -> usize {
        self.sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sum.is_empty()
    }

    /// Adds `w * x[i]` to slot `i`.
    pub fn add_scaled(&mut self, w: C64, x: &[C64]) {
        debug_assert_eq!(x.len(), self.sum.len());
        for i in 0..x.len() {
            let v = w * x[i];
            let (sr, cr) = two_sum(self.sum[i].re, self.comp[i].re, v.re);
            let (si, ci) = two_sum(self.sum[i].im, self.comp[i].im, v.im);
            self.sum[i] = C64::new(sr, si);
            self.comp[i] = C64::new(cr, ci);
        }
    }

    pub fn finish(&self) -> Vec<C64> {
        self.sum.iter().zip(&self.comp).map(|(s, c)| s + c).collect()
    }
}

/// Compensated sum of a scalar sequence in the given order.
pub fn kahan_sum<I: IntoIterator<Item = C64>>(it: I) -> C64 {
    let mut acc = CompensatedSum::new(1);
    for z in it {
        acc.add_scaled(C64::new(1.0, 0.0), &[z]);
    }
    acc.finish()[0]
}

/// Gauss-Legendre nodes and weights on [-1, 1] via the Golub-Welsch
/// eigenproblem, returned in ascending node order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], 2.0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrize so the rule is exactly antipodal-invariant.
    for i in 0..n / 2 {
        let k = n - 1 - i;
        let x = 0.5 * (pairs[k].0 - pairs[i].0);
        let w = 0.5 * (pairs[k].1 + pairs[i].1);
        pairs[i] = (-x, w);
        pairs[k] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

//! Truncated multivariate Taylor series with matrix coefficients.
//!
//! A [`Jet`] of order `K` in `nv` variables stores the Taylor coefficients
//! `f_beta / beta!` for all multi-indices with `|beta| <= K`, each an
//! `r x r` complex matrix. Products, inverses and derivatives are exact up
//! to the truncation order, which is how the symbol calculus gets clean
//! high-order covariable derivatives without finite differences.

use std::sync::OnceLock;

use crate::cmat::{gemm_acc, ComplexMatrix, SingularMatrix, C64, ONE, ZERO};

/// Largest supported total order.
pub const MAX_JET_ORDER: usize = 12;
/// Largest supported number of variables.
pub const MAX_VARS: usize = 4;

pub type Multi = [u8; MAX_VARS];

/// Monomial tables for a fixed number of variables.
pub struct JetShape {
    pub nv: usize,
    pub monos: Vec<Multi>,
    pub degree: Vec<usize>,
    /// `deg_start[d]` is the index of the first monomial of degree `d`.
    pub deg_start: Vec<usize>,
    add: Vec<u16>,
}

impl JetShape {
    fn build(nv: usize) -> Self {
        let mut monos = Vec::new();
        let mut degree = Vec::new();
        let mut deg_start = Vec::new();
        for d in 0..=MAX_JET_ORDER {
            deg_start.push(monos.len());
            let mut cur = [0u8; MAX_VARS];
            enumerate(nv, 0, d, &mut cur, &mut monos);
            degree.resize(monos.len(), d);
        }
        deg_start.push(monos.len());
        let n = monos.len();
        let index_of = |m: &Multi| -> Option<usize> {
            let d: usize = m.iter().map(|&x| x as usize).sum();
            if d > MAX_JET_ORDER {
                return None;
            }
            (deg_start[d]..deg_start[d + 1]).find(|&k| &monos[k] == m)
        };
        let mut add = vec![u16::MAX; n * n];
        for i in 0..n {
            for j in 0..n {
                if degree[i] + degree[j] > MAX_JET_ORDER {
                    continue;
                }
                let mut s = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    s[v] = monos[i][v] + monos[j][v];
                }
                add[i * n + j] = index_of(&s).expect("monomial table is closed under addition") as u16;
            }
        }
        Self { nv, monos, degree, deg_start, add }
    }

    pub fn len_for(&self, order: usize) -> usize {
        self.deg_start[order + 1]
    }

    #[inline]
    pub fn sum_index(&self, i: usize, j: usize) -> usize {
        self.add[i * self.monos.len() + j] as usize
    }

    pub fn index_of(&self, m: &Multi) -> Option<usize> {
        let d: usize = m.iter().map(|&x| x as usize).sum();
        if d > MAX_JET_ORDER {
            return None;
        }
        (self.deg_start[d]..self.deg_start[d + 1]).find(|&k| &self.monos[k] == m)
    }
}

fn enumerate(nv: usize, v: usize, remaining: usize, cur: &mut Multi, out: &mut Vec<Multi>) {
    if v + 1 == nv {
        cur[v] = remaining as u8;
        out.push(*cur);
        cur[v] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        cur[v] = k as u8;
        enumerate(nv, v + 1, remaining - k, cur, out);
    }
    cur[v] = 0;
}

/// Shared monomial tables for `nv` variables.
pub fn shape(nv: usize) -> &'static JetShape {
    static SHAPES: [OnceLock<JetShape>; MAX_VARS] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    assert!((1..=MAX_VARS).contains(&nv), "jets support 1..=4 variables");
    SHAPES[nv - 1].get_or_init(|| JetShape::build(nv))
}

fn factorial(k: u8) -> f64 {
    (1..=k as u32).map(|x| x as f64).product()
}

pub fn multi_factorial(m: &Multi) -> f64 {
    m.iter().map(|&k| factorial(k)).product()
}

pub fn multi_order(m: &Multi) -> usize {
    m.iter().map(|&k| k as usize).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    nv: usize,
    order: usize,
    dim: usize,
    data: Vec<C64>,
}

impl Jet {
    pub fn zeros(nv: usize, order: usize, dim: usize) -> Self {
        assert!(order <= MAX_JET_ORDER);
        let len = shape(nv).len_for(order) * dim * dim;
        Self { nv, order, dim, data: vec![ZERO; len] }
    }

    pub fn constant(m: &ComplexMatrix, nv: usize, order: usize) -> Self {
        let mut j = Self::zeros(nv, order, m.dim());
        j.data[..m.dim() * m.dim()].copy_from_slice(m.as_slice());
        j
    }

    /// The coordinate jet `x_i + h_i` as a multiple of the identity.
    pub fn variable(i: usize, value: f64, nv: usize, order: usize, dim: usize) -> Self {
        let mut j = Self::constant(&ComplexMatrix::scalar(dim, C64::new(value, 0.0)), nv, order);
        if order >= 1 {
            let mut m = [0u8; MAX_VARS];
            m[i] = 1;
            let k = shape(nv).index_of(&m).unwrap();
            for d in 0..dim {
                j.data[k * dim * dim + d * dim + d] = ONE;
            }
        }
        j
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &'static JetShape {
        shape(self.nv)
    }

    pub fn n_coeffs(&self) -> usize {
        self.data.len() / (self.dim * self.dim)
    }

    pub fn coeff(&self, k: usize) -> &[C64] {
        let s = self.dim * self.dim;
        &self.data[k * s..(k + 1) * s]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut [C64] {
        let s = self.dim * self.dim;
        &mut self.data[k * s..(k + 1) * s]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn value(&self) -> ComplexMatrix {
        ComplexMatrix::from_row_major(self.dim, self.coeff(0).to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    /// Keeps terms of degree `<= order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let len = shape(self.nv).len_for(order) * self.dim * self.dim;
        Self { nv: self.nv, order, dim: self.dim, data: self.data[..len].to_vec() }
    }

    /// `self += c * other` on the terms `self` keeps.
    pub fn add_scaled(&mut self, c: C64, other: &Jet) {
        assert_eq!(self.dim, other.dim);
        assert!(other.order >= self.order, "cannot add a lower-order jet");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { nv: self.nv, order: self.order, dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    /// `out += a * b`, truncated at `out.order`.
    pub fn mul_acc(out: &mut Jet, a: &Jet, b: &Jet) {
        let k = out.order;
        assert!(a.order >= k && b.order >= k, "operands must reach the output order");
        assert!(a.dim == out.dim && b.dim == out.dim);
        let sh = shape(out.nv);
        let r = out.dim;
        let s = r * r;
        for i in 0..sh.len_for(k) {
            let ai = &a.data[i * s..(i + 1) * s];
            if ai.iter().all(|z| *z == ZERO) {
                continue;
            }
            let di = sh.degree[i];
            for j in 0..sh.len_for(k - di) {
                let bj = &b.data[j * s..(j + 1) * s];
                let o = sh.sum_index(i, j);
                gemm_acc(r, ai, bj, &mut out.data[o * s..(o + 1) * s]);
            }
        }
    }

    pub fn mul(a: &Jet, b: &Jet, order: usize) -> Jet {
        let order = order.min(a.order).min(b.order);
        let mut out = Jet::zeros(a.nv, order, a.dim);
        Jet::mul_acc(&mut out, a, b);
        out
    }

    /// Multiplicative inverse, degree by degree.
    pub fn inverse(&self) -> Result<Jet, SingularMatrix> {
        let r = self.dim;
        let s = r * r;
        let a0inv = self.value().inverse()?;
        let mut out = Jet::zeros(self.nv, self.order, r);
        out.data[..s].copy_from_slice(a0inv.as_slice());
        let sh = shape(self.nv);
        for d in 1..=self.order {
            let (lo, hi) = (sh.deg_start[d], sh.deg_start[d + 1]);
            // acc_g = sum over |beta| >= 1 of a_beta b_{g - beta}
            let mut acc = vec![ZERO; (hi - lo) * s];
            for i in sh.deg_start[1]..sh.len_for(d) {
                let ai = &self.data[i * s..(i + 1) * s];
                if ai.iter().all(|z| *z == ZERO) {
                    continue;
                }
                let dj = d - sh.degree[i];
                for j in sh.deg_start[dj]..sh.deg_start[dj + 1] {
                    let g = sh.sum_index(i, j) - lo;
                    gemm_acc(r, ai, &out.data[j * s..(j + 1) * s], &mut acc[g * s..(g + 1) * s]);
                }
            }
            for g in lo..hi {
                let mut bg = vec![ZERO; s];
                gemm_acc(r, a0inv.as_slice(), &acc[(g - lo) * s..(g - lo + 1) * s], &mut bg);
                for (o, v) in out.data[g * s..(g + 1) * s].iter_mut().zip(bg) {
                    *o = -v;
                }
            }
        }
        Ok(out)
    }

    /// Partial derivative `d^beta`, an exact jet of order `order - |beta|`.
    pub fn deriv(&self, beta: &Multi) -> Jet {
        let b = multi_order(beta);
        assert!(b <= self.order, "derivative exceeds jet order");
        let sh = shape(self.nv);
        let bi = sh.index_of(beta).expect("derivative multi-index in range");
        let new_order = self.order - b;
        let mut out = Jet::zeros(self.nv, new_order, self.dim);
        let s = self.dim * self.dim;
        for g in 0..sh.len_for(new_order) {
            let src = sh.sum_index(g, bi);
            let mut factor = 1.0;
            for v in 0..MAX_VARS {
                let (gv, bv) = (sh.monos[g][v] as u32, beta[v] as u32);
                for t in gv + 1..=gv + bv {
                    factor *= t as f64;
                }
            }
            let f = C64::new(factor, 0.0);
            for (o, x) in out.data[g * s..(g + 1) * s].iter_mut().zip(&self.data[src * s..(src + 1) * s]) {
                *o = f * x;
            }
        }
        out
    }

    /// The derivative `d^beta f` at the expansion point.
    pub fn derivative_at_point(&self, beta: &Multi) -> ComplexMatrix {
        let sh = shape(self.nv);
        let k = sh.index_of(beta).expect("multi-index in range");
        ComplexMatrix::from_row_major(self.dim, self.coeff(k).to_vec()).scale(C64::new(multi_factorial(beta), 0.0))
    }

    /// Scalar jet raised to a real power; requires a positive real value.
    pub fn scalar_powf(&self, p: f64) -> Jet {
        assert_eq!(self.dim, 1);
        let v0 = self.data[0];
        assert!(v0.re > 0.0 && v0.im == 0.0, "scalar_powf needs a positive base");
        // (v0 (1 + u))^p with u nilpotent in the truncated algebra
        let mut u = self.scale(ONE / v0);
        u.data[0] = ZERO;
        let mut out = Jet::zeros(self.nv, self.order, 1);
        out.data[0] = ONE;
        let mut power = out.clone();
        let mut binom = 1.0;
        for k in 1..=self.order {
            binom *= (p - (k as f64 - 1.0)) / k as f64;
            power = Jet::mul(&power, &u, self.order);
            out.add_scaled(C64::new(binom, 0.0), &power);
        }
        out.scale(C64::new(v0.re.powf(p), 0.0))
    }

    /// Scalar jet times the `dim x dim` identity.
    pub fn scalar_to_identity(&self, dim: usize) -> Jet {
        assert_eq!(self.dim, 1);
        let mut out = Jet::zeros(self.nv, self.order, dim);
        for k in 0..self.n_coeffs() {
            let c = self.data[k];
            let dst = out.coeff_mut(k);
            for d in 0..dim {
                dst[d * dim + d] = c;
            }
        }
        out
    }

    /// Scalar jet times a constant matrix.
    pub fn scalar_times(&self, m: &ComplexMatrix) -> Jet {
        assert_eq!(self.dim, 1);
        let dim = m.dim();
        let mut out = Jet::zeros(self.nv, self.order, dim);
        for k in 0..self.n_coeffs() {
            let c = self.data[k];
            if c == ZERO {
                continue;
            }
            for (o, x) in out.coeff_mut(k).iter_mut().zip(m.as_slice()) {
                *o = c * x;
            }
        }
        out
    }

    /// Trace of every coefficient, as a scalar jet.
    pub fn trace(&self) -> Jet {
        let mut out = Jet::zeros(self.nv, self.order, 1);
        let r = self.dim;
        for k in 0..self.n_coeffs() {
            let c = self.coeff(k);
            out.data[k] = (0..r).map(|d| c[d * r + d]).sum();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        assert_eq!(shape(2).len_for(3), 10);
        assert_eq!(shape(3).len_for(2), 10);
        assert_eq!(shape(4).len_for(1), 5);
    }

    #[test]
    fn product_of_variables() {
        let x = Jet::variable(0, 2.0, 2, 3, 1);
        let y = Jet::variable(1, -1.0, 2, 3, 1);
        let p = Jet::mul(&x, &y, 3);
        // xy at (2,-1): value -2, d/dx = -1, d/dy = 2, d2/dxdy = 1
        assert!((p.derivative_at_point(&[0, 0, 0, 0])[(0, 0)].re + 2.0).abs() < 1e-15);
        assert!((p.derivative_at_point(&[1, 0, 0, 0])[(0, 0)].re + 1.0).abs() < 1e-15);
        assert!((p.derivative_at_point(&[0, 1, 0, 0])[(0, 0)].re - 2.0).abs() < 1e-15);
        assert!((p.derivative_at_point(&[1, 1, 0, 0])[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_of_scalar_series() {
        // 1/(x) at x=2: derivatives (-1)^k k! / 2^{k+1}
        let x = Jet::variable(0, 2.0, 1, 5, 1);
        let inv = x.inverse().unwrap();
        for k in 0..=5u8 {
            let d = inv.derivative_at_point(&[k, 0, 0, 0])[(0, 0)].re;
            let expect = (-1f64).powi(k as i32) * factorial(k) / 2f64.powi(k as i32 + 1);
            assert!((d - expect).abs() < 1e-13 * expect.abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn powf_matches_closed_form() {
        // (x^2 + y^2)^{-1/2} at (3,4)
        let x = Jet::variable(0, 3.0, 2, 2, 1);
        let y = Jet::variable(1, 4.0, 2, 2, 1);
        let mut s = Jet::mul(&x, &x, 2);
        Jet::mul_acc(&mut s, &y, &y);
        let r = s.scalar_powf(-0.5);
        assert!((r.value()[(0, 0)].re - 0.2).abs() < 1e-15);
        // d/dx |xi|^{-1} = -x/|xi|^3
        let dx = r.derivative_at_point(&[1, 0, 0, 0])[(0, 0)].re;
        assert!((dx + 3.0 / 125.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_shift() {
        let x = Jet::variable(0, 1.5, 1, 4, 1);
        let x3 = Jet::mul(&Jet::mul(&x, &x, 4), &x, 4);
        let d = x3.deriv(&[2, 0, 0, 0]);
        assert_eq!(d.order(), 2);
        // d2/dx2 x^3 = 6x
        assert!((d.value()[(0, 0)].re - 9.0).abs() < 1e-14);
        assert!((d.derivative_at_point(&[1, 0, 0, 0])[(0, 0)].re - 6.0).abs() < 1e-14);
    }
}

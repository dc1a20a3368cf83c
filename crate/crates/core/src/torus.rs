//! Flat tori and finite Fourier series of jets.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::cmat::{ComplexMatrix, C64, ZERO};
use crate::jet::{Jet, MAX_VARS};

/// Integer frequency vector, unused trailing slots are zero.
pub type Freq = [i32; MAX_VARS];

pub const ZERO_FREQ: Freq = [0; MAX_VARS];

/// `R^n / (L_1 Z x ... x L_n Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Torus {
    periods: Vec<f64>,
}

impl Torus {
    pub fn standard(n: usize) -> Self {
        Self::new(vec![TAU; n])
    }

    pub fn new(periods: Vec<f64>) -> Self {
        assert!((1..=MAX_VARS).contains(&periods.len()), "torus dimension must be 1..=4");
        assert!(periods.iter().all(|&l| l.is_finite() && l > 0.0), "periods must be positive");
        Self { periods }
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn volume(&self) -> f64 {
        self.periods.iter().product()
    }

    /// Angular wave number along axis `i` for frequency `k`.
    pub fn wave(&self, i: usize, k: i32) -> f64 {
        TAU * k as f64 / self.periods[i]
    }

    /// Phase `2 pi <k, x / L>` of a Fourier mode.
    pub fn phase(&self, k: &Freq, x: &[f64]) -> f64 {
        (0..self.dim()).map(|i| self.wave(i, k[i]) * x[i]).sum()
    }
}

/// A trigonometric polynomial in `x` whose coefficients are jets in `xi`.
#[derive(Clone, Debug, PartialEq)]
pub struct FJet {
    pub modes: BTreeMap<Freq, Jet>,
    nv: usize,
    order: usize,
    dim: usize,
}

impl FJet {
    pub fn zero(nv: usize, order: usize, dim: usize) -> Self {
        Self { modes: BTreeMap::new(), nv, order, dim }
    }

    pub fn from_mode(k: Freq, jet: Jet) -> Self {
        let (nv, order, dim) = (jet.nv(), jet.order(), jet.dim());
        let mut modes = BTreeMap::new();
        modes.insert(k, jet);
        Self { modes, nv, order, dim }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn mode0(&self) -> Option<&Jet> {
        self.modes.get(&ZERO_FREQ)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self {
            modes: self.modes.iter().map(|(k, j)| (*k, j.truncate(order))).collect(),
            nv: self.nv,
            order,
            dim: self.dim,
        }
    }

    /// `self += c * other`; `other` must reach `self.order`.
    pub fn add_scaled(&mut self, c: C64, other: &FJet) {
        for (k, j) in &other.modes {
            let order = self.order;
            let entry = self.modes.entry(*k).or_insert_with(|| Jet::zeros(j.nv(), order, j.dim()));
            entry.add_scaled(c, j);
        }
    }

    /// `out += a * b` with Fourier convolution, truncated at `out.order`.
    pub fn mul_acc(out: &mut FJet, a: &FJet, b: &FJet) {
        for (ka, ja) in &a.modes {
            for (kb, jb) in &b.modes {
                let mut k = ZERO_FREQ;
                for i in 0..MAX_VARS {
                    k[i] = ka[i] + kb[i];
                }
                let order = out.order;
                let entry = out.modes.entry(k).or_insert_with(|| Jet::zeros(ja.nv(), order, ja.dim()));
                Jet::mul_acc(entry, ja, jb);
            }
        }
    }

    pub fn mul(a: &FJet, b: &FJet, order: usize) -> FJet {
        let order = order.min(a.order).min(b.order);
        let mut out = FJet::zero(a.nv, order, a.dim);
        FJet::mul_acc(&mut out, a, b);
        out
    }

    pub fn scale(&self, c: C64) -> FJet {
        let mut out = self.clone();
        for j in out.modes.values_mut() {
            *j = j.scale(c);
        }
        out
    }

    /// `xi`-derivative of every mode.
    pub fn deriv_xi(&self, beta: &[u8; MAX_VARS]) -> FJet {
        let b: usize = beta.iter().map(|&x| x as usize).sum();
        FJet {
            modes: self.modes.iter().map(|(k, j)| (*k, j.deriv(beta))).collect(),
            nv: self.nv,
            order: self.order - b,
            dim: self.dim,
        }
    }

    /// Applies `prod_i (c * w_i)^{alpha_i}` per mode: `c = i` gives `d_x^alpha`,
    /// `c = 1` gives `D_x^alpha` with `D = -i d`.
    pub fn deriv_x(&self, torus: &Torus, alpha: &[u8; MAX_VARS], c: C64) -> FJet {
        let mut out = FJet::zero(self.nv, self.order, self.dim);
        for (k, j) in &self.modes {
            let mut f = C64::new(1.0, 0.0);
            for i in 0..torus.dim() {
                for _ in 0..alpha[i] {
                    f *= c * torus.wave(i, k[i]);
                }
            }
            if f != ZERO {
                out.modes.insert(*k, j.scale(f));
            }
        }
        out
    }

    /// Sums the modes at `x`, keeping the jet in `xi`.
    pub fn at_x(&self, torus: &Torus, x: &[f64]) -> Jet {
        let mut out = Jet::zeros(self.nv, self.order, self.dim);
        for (k, j) in &self.modes {
            let ph = torus.phase(k, x);
            out.add_scaled(C64::new(ph.cos(), ph.sin()), j);
        }
        out
    }

    /// Value at `x`, at the jet's base point.
    pub fn value_at(&self, torus: &Torus, x: &[f64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for (k, j) in &self.modes {
            let ph = torus.phase(k, x);
            out += &j.value().scale(C64::new(ph.cos(), ph.sin()));
        }
        out
    }

    /// Trace of the base value of every mode.
    pub fn trace_modes(&self) -> BTreeMap<Freq, C64> {
        self.modes.iter().map(|(k, j)| (*k, j.value().trace())).collect()
    }

    /// Drops modes whose coefficients are all below `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.modes.retain(|k, j| *k == ZERO_FREQ || j.max_abs() > tol);
    }
}

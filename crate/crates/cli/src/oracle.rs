//! Direct application of polynomial-symbol operators to trigonometric
//! polynomials, independent of the composition formula.

use std::collections::{BTreeMap, BTreeSet};

use specasym_core::cmat::{C64, ZERO};
use specasym_core::symbol::{SymbolExpansion, SymbolTerm};
use specasym_core::torus::Freq;

/// Scalar trigonometric polynomial `sum u_k e^{i k.x}` on the standard torus.
pub type Trig = BTreeMap<Freq, C64>;

/// `Op(a) u` for scalar symbols that are polynomial in `xi`: a term
/// `c e^{i f.x} xi^beta` sends `e^{i k.x}` to `c k^beta e^{i (k+f).x}`.
pub fn apply_terms(terms: &[Vec<SymbolTerm>], u: &Trig) -> Trig {
    let mut out = Trig::new();
    for (k, uk) in u {
        for t in terms.iter().flatten() {
            let mut w = *uk * t.coeff[(0, 0)];
            for i in 0..4 {
                w *= (k[i] as f64).powi(t.xi_pow[i] as i32);
            }
            let mut kk = *k;
            for i in 0..4 {
                kk[i] += t.freq[i];
            }
            *out.entry(kk).or_insert(ZERO) += w;
        }
    }
    out
}

/// Quantizes components `0..=depth` of a scalar symbol at integer covectors.
pub fn apply_symbol(s: &SymbolExpansion, depth: usize, u: &Trig) -> Result<Trig, specasym_core::CalcError> {
    let n = s.n();
    let mut out = Trig::new();
    for (k, uk) in u {
        let xi: Vec<f64> = k[..n].iter().map(|&v| v as f64).collect();
        for j in 0..=depth {
            let f = s.component(j).fourier_raw(&xi)?;
            for (m, jet) in &f.modes {
                let mut kk = *k;
                for i in 0..4 {
                    kk[i] += m[i];
                }
                *out.entry(kk).or_insert(ZERO) += jet.value()[(0, 0)] * uk;
            }
        }
    }
    Ok(out)
}

pub fn trig_dist(a: &Trig, b: &Trig) -> f64 {
    let keys: BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(ZERO) - b.get(k).copied().unwrap_or(ZERO)).norm())
        .fold(0.0, f64::max)
}

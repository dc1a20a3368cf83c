//! Reference operators used by the verification suites.
//!
//! Every operator here is a differential operator with constant principal
//! part, so it is odd-class. Lower-order terms carry a few Fourier modes.

use std::f64::consts::PI;

use crate::cmat::{ComplexMatrix, C64, I, ZERO};
use crate::contour::CutPair;
use crate::dirac::{CliffordData, FourierField};
use crate::jet::Multi;
use crate::symbol::{unit, SymbolExpansion, SymbolTerm};
use crate::torus::{Freq, Torus};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn f(k: &[i32]) -> Freq {
    let mut out = [0; 4];
    out[..k.len()].copy_from_slice(k);
    out
}

fn sq(i: usize) -> Multi {
    let mut m = [0; 4];
    m[i] = 2;
    m
}

pub fn pauli() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
    ]
}

/// `cos(k.x) M` as two Fourier terms.
pub fn cos_terms(k: Freq, m: &ComplexMatrix) -> Vec<SymbolTerm> {
    let neg = k.map(|v| -v);
    let h = m.scale(c(0.5, 0.0));
    vec![SymbolTerm::new(h.clone()).freq(k), SymbolTerm::new(h).freq(neg)]
}

/// `sin(k.x) M` as two Fourier terms.
pub fn sin_terms(k: Freq, m: &ComplexMatrix) -> Vec<SymbolTerm> {
    let neg = k.map(|v| -v);
    let h = m.scale(c(0.0, -0.5));
    vec![SymbolTerm::new(h.clone()).freq(k), SymbolTerm::new(-&h).freq(neg)]
}

/// A named test operator with cut pairs that avoid its principal spectrum.
#[derive(Clone, Debug)]
pub struct TestOperator {
    pub name: &'static str,
    pub symbol: SymbolExpansion,
    pub cuts: Vec<CutPair>,
    pub selfadjoint: bool,
}

/// `|xi|^2 + V(x)` on `T^2`, `V = 0.3 cos x1 + 0.2 sin x2`.
pub fn scalar_laplace_t2() -> TestOperator {
    let one = ComplexMatrix::identity(1);
    let lap = (0..2).map(|i| SymbolTerm::new(one.clone()).xi(sq(i))).collect();
    let mut v = cos_terms(f(&[1, 0]), &one.scale(c(0.3, 0.0)));
    v.extend(sin_terms(f(&[0, 1]), &one.scale(c(0.2, 0.0))));
    let symbol = SymbolExpansion::explicit(Torus::standard(2), 1, 2, vec![lap, vec![], v]).unwrap();
    TestOperator {
        name: "scalar-laplace-t2",
        symbol,
        cuts: vec![CutPair::new(PI / 2.0, 3.0 * PI / 2.0).unwrap(), CutPair::new(0.5, 1.5).unwrap()],
        selfadjoint: true,
    }
}

/// `sigma.xi + A(x)` on `T^2` with Hermitian `A`.
pub fn dirac_potential_t2() -> TestOperator {
    let s = pauli();
    let p1 = vec![SymbolTerm::new(s[0].clone()).xi(unit(0)), SymbolTerm::new(s[1].clone()).xi(unit(1))];
    let mut p0 = cos_terms(f(&[1, 0]), &s[2].scale(c(0.4, 0.0)));
    p0.extend(sin_terms(f(&[0, 1]), &ComplexMatrix::identity(2).scale(c(0.3, 0.0))));
    p0.push(SymbolTerm::new(s[0].scale(c(0.2, 0.0))));
    let symbol = SymbolExpansion::explicit(Torus::standard(2), 2, 1, vec![p1, p0]).unwrap();
    TestOperator {
        name: "dirac-potential-t2",
        symbol,
        cuts: vec![CutPair::up_down(), CutPair::new(1.0, 4.0).unwrap()],
        selfadjoint: true,
    }
}

/// Non-unitary similarity used by the non-selfadjoint operators.
fn similarity() -> (ComplexMatrix, ComplexMatrix) {
    let s = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.5, 0.2)], vec![c(-0.3, 0.1), c(1.2, 0.0)]]);
    let inv = s.inverse().unwrap();
    (s, inv)
}

/// `e^{i phi} S (sigma.xi) S^{-1} + B cos x1 + C sin x2` on `T^2`.
pub fn non_selfadjoint_t2() -> TestOperator {
    let (s, si) = similarity();
    let rot = C64::from_polar(1.0, 0.4);
    let sig = pauli();
    let p1 = (0..2)
        .map(|i| SymbolTerm::new((&(&s * &sig[i]) * &si).scale(rot)).xi(unit(i)))
        .collect();
    let b = ComplexMatrix::from_rows(&[vec![c(0.2, 0.1), c(0.0, 0.3)], vec![c(0.1, 0.0), c(-0.1, 0.2)]]);
    let cm = ComplexMatrix::from_rows(&[vec![c(0.0, -0.2), c(0.15, 0.0)], vec![c(0.25, 0.05), c(0.1, 0.0)]]);
    let mut p0 = cos_terms(f(&[1, 0]), &b);
    p0.extend(sin_terms(f(&[0, 1]), &cm));
    let symbol = SymbolExpansion::explicit(Torus::standard(2), 2, 1, vec![p1, p0]).unwrap();
    TestOperator {
        name: "non-selfadjoint-t2",
        symbol,
        // eigenvalue arguments are 0.4 and 0.4 + pi
        cuts: vec![CutPair::new(0.0, PI / 2.0).unwrap(), CutPair::new(1.0, 4.0).unwrap()],
        selfadjoint: false,
    }
}

/// Second-order non-normal system on `T^3` with eigenvalue arguments 0.3
/// and 2.2 and an `x_1`-dependent zeroth-order term.
pub fn non_selfadjoint_t3() -> TestOperator {
    let (s, si) = similarity();
    let conj = |m: ComplexMatrix| &(&s * &m) * &si;
    let e1 = C64::from_polar(1.0, 0.3);
    let e2 = C64::from_polar(1.0, 2.2);
    let mut p2 = Vec::new();
    for i in 0..3 {
        p2.push(SymbolTerm::new(conj(ComplexMatrix::diag(&[e1, e2]))).xi(sq(i)));
    }
    let mut mix = [0u8; 4];
    mix[0] = 1;
    mix[1] = 1;
    p2.push(SymbolTerm::new(conj(ComplexMatrix::from_rows(&[vec![ZERO, c(0.4, 0.0)], vec![ZERO, ZERO]]))).xi(mix));
    let m1 = [
        ComplexMatrix::from_rows(&[vec![c(0.1, 0.2), c(0.0, 0.1)], vec![c(0.3, 0.0), c(0.0, 0.0)]]),
        ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.2, 0.0)], vec![c(0.0, -0.1), c(0.1, 0.0)]]),
        ComplexMatrix::from_rows(&[vec![c(-0.2, 0.0), c(0.0, 0.0)], vec![c(0.1, 0.1), c(0.05, 0.0)]]),
    ];
    let p1 = (0..3).map(|i| SymbolTerm::new(m1[i].clone()).xi(unit(i))).collect();
    let b = ComplexMatrix::from_rows(&[vec![c(0.3, 0.0), c(0.1, -0.1)], vec![c(0.0, 0.2), c(-0.2, 0.1)]]);
    let mut p0 = cos_terms(f(&[1, 0, 0]), &b);
    p0.push(SymbolTerm::new(ComplexMatrix::scalar(2, c(0.1, 0.05))));
    let symbol = SymbolExpansion::explicit(Torus::standard(3), 2, 2, vec![p2, p1, p0]).unwrap();
    TestOperator {
        name: "non-selfadjoint-t3",
        symbol,
        cuts: vec![
            CutPair::new(1.0, 3.0).unwrap(),
            CutPair::new(6.0, 7.0).unwrap(),
            CutPair::new(0.1, 2.5).unwrap(),
        ],
        selfadjoint: false,
    }
}

/// Indefinite second-order selfadjoint system on `T^3`.
pub fn selfadjoint_t3() -> TestOperator {
    let s = pauli();
    let mut p2: Vec<SymbolTerm> = (0..3).map(|i| SymbolTerm::new(s[2].clone()).xi(sq(i))).collect();
    let mut mix = [0u8; 4];
    mix[0] = 1;
    mix[2] = 1;
    p2.push(SymbolTerm::new(s[0].clone()).xi(mix));
    let b = [s[0].scale(c(0.3, 0.0)), s[1].scale(c(0.2, 0.0)), ComplexMatrix::identity(2).scale(c(0.1, 0.0))];
    let p1 = (0..3).map(|i| SymbolTerm::new(b[i].clone()).xi(unit(i))).collect();
    let mut p0 = cos_terms(f(&[0, 1, 0]), &s[0]);
    p0.push(SymbolTerm::new(ComplexMatrix::identity(2).scale(c(0.5, 0.0))));
    let symbol = SymbolExpansion::explicit(Torus::standard(3), 2, 2, vec![p2, p1, p0]).unwrap();
    TestOperator {
        name: "selfadjoint-t3",
        symbol,
        cuts: vec![CutPair::up_down(), CutPair::new(0.5, 2.0).unwrap()],
        selfadjoint: true,
    }
}

/// Operators on which projection identities are checked.
pub fn projection_battery() -> Vec<TestOperator> {
    vec![scalar_laplace_t2(), dirac_potential_t2(), non_selfadjoint_t2(), non_selfadjoint_t3()]
}

/// Odd-class first-order operators on `T^2`.
pub fn first_order_t2() -> Vec<TestOperator> {
    vec![dirac_potential_t2(), non_selfadjoint_t2()]
}

fn cos_field(k: Freq, m: &ComplexMatrix) -> FourierField {
    cos_terms(k, m).into_iter().map(|t| (t.freq, t.coeff)).collect()
}

fn sin_field(k: Freq, m: &ComplexMatrix) -> FourierField {
    sin_terms(k, m).into_iter().map(|t| (t.freq, t.coeff)).collect()
}

/// Rank-2 non-abelian twist on `T^2`:
/// `A_1 = 0.3 cos x2 sigma_1 + 0.2 sigma_3`, `A_2 = 0.25 sin x1 sigma_2`.
pub fn twisted_dirac_t2() -> CliffordData {
    let s = pauli();
    let mut a1 = cos_field(f(&[0, 1]), &s[0].scale(c(0.3, 0.0)));
    a1.insert(f(&[]), s[2].scale(c(0.2, 0.0)));
    let a2 = sin_field(f(&[1, 0]), &s[1].scale(c(0.25, 0.0)));
    CliffordData::new(Torus::standard(2), 2, vec![a1, a2]).expect("Hermitian twist")
}

/// Rank-2 non-abelian twist on `T^4` with modes in every direction.
pub fn twisted_dirac_t4() -> CliffordData {
    let s = pauli();
    let mut a1 = cos_field(f(&[0, 1, 0, 0]), &s[0].scale(c(0.3, 0.0)));
    a1.insert(f(&[]), s[2].scale(c(0.1, 0.0)));
    let a = vec![
        a1,
        sin_field(f(&[0, 0, 1, 0]), &s[1].scale(c(0.2, 0.0))),
        cos_field(f(&[1, 0, 0, 1]), &ComplexMatrix::identity(2).scale(c(0.25, 0.0))),
        cos_field(f(&[1, 0, 0, 0]), &s[2].scale(c(0.15, 0.0))),
    ];
    CliffordData::new(Torus::standard(4), 2, a).expect("Hermitian twist")
}

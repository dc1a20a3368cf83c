//! Twisted Dirac operators on flat even-dimensional tori.
//!
//! Conventions: `D = sum_i gamma^i (D_i + A_i)` with `D_i = -i d_i` and
//! Hermitian `A_i`, so the symbol is `sum gamma^i xi_i + sum gamma^i A_i`.
//! The curvature is `F_ij = d_i A_j - d_j A_i + i [A_i, A_j]` and
//! `c(F) = -i sum_{i<j} gamma^i gamma^j F_ij`, which makes
//! `D^2 = (D + A)^2 + c(F)` hold exactly and `c(F)` Hermitian.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::battery::pauli;
use crate::cmat::{ComplexMatrix, C64, I, ONE, ZERO};
use crate::error::{CalcError, CalcResult};
use crate::jet::Multi;
use crate::residue::{res_total, residue_density, DensityField};
use crate::resolvent::power_expansion;
use crate::sphere::SphereRule;
use crate::symbol::{compose, unit, EvalCache, SymbolExpansion, SymbolTerm};
use crate::torus::{Freq, Torus, ZERO_FREQ};

/// Trigonometric polynomial with matrix coefficients, keyed by frequency.
pub type FourierField = BTreeMap<Freq, ComplexMatrix>;

const HERMITIAN_FIELD_TOL: f64 = 1e-12;

/// `Gamma(n/2)` for the supported dimensions.
fn gamma_half(n: usize) -> f64 {
    match n {
        2 | 4 => 1.0,
        _ => unreachable!("dimension checked on construction"),
    }
}

/// Clifford generators and chirality for `n = 2, 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordCore {
    pub n: usize,
    pub gamma: Vec<ComplexMatrix>,
    pub chirality: ComplexMatrix,
}

impl CliffordCore {
    pub fn spin_dim(&self) -> usize {
        self.chirality.dim()
    }
}

/// Pauli matrices for `n = 2`; `sigma_1 (x) sigma_j` and `sigma_2 (x) 1` for
/// `n = 4`. All entries lie in `{0, +-1, +-i}`.
pub fn clifford_generators(n: usize) -> CalcResult<CliffordCore> {
    let s = pauli();
    let id2 = ComplexMatrix::identity(2);
    match n {
        2 => Ok(CliffordCore { n, gamma: vec![s[0].clone(), s[1].clone()], chirality: s[2].clone() }),
        4 => {
            let mut gamma: Vec<ComplexMatrix> = s.iter().map(|sj| s[0].kron(sj)).collect();
            gamma.push(s[1].kron(&id2));
            Ok(CliffordCore { n, gamma, chirality: s[2].kron(&id2) })
        }
        _ => Err(CalcError::UnsupportedDimension(n)),
    }
}

/// Clifford module over a flat torus twisted by a unitary connection.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordData {
    pub core: CliffordCore,
    pub torus: Torus,
    pub twist_rank: usize,
    /// `A_i(x)` as Fourier data, one field per coordinate direction.
    pub connection: Vec<FourierField>,
}

impl CliffordData {
    pub fn untwisted(n: usize) -> CalcResult<Self> {
        Self::new(Torus::standard(n), 1, vec![FourierField::new(); n])
    }

    pub fn new(torus: Torus, twist_rank: usize, connection: Vec<FourierField>) -> CalcResult<Self> {
        let n = torus.dim();
        let core = clifford_generators(n)?;
        if twist_rank == 0 || connection.len() != n {
            return Err(CalcError::Mismatch(format!(
                "need rank >= 1 and {n} connection fields, got rank {twist_rank} and {} fields",
                connection.len()
            )));
        }
        for (i, a) in connection.iter().enumerate() {
            for (k, m) in a {
                if m.dim() != twist_rank {
                    return Err(CalcError::Mismatch(format!("A_{} has a {}x{} coefficient", i + 1, m.dim(), m.dim())));
                }
                if k[n..].iter().any(|&v| v != 0) {
                    return Err(CalcError::Mismatch(format!("A_{} has a frequency outside T^{n}", i + 1)));
                }
                // A_i(x) is Hermitian for all x iff its coefficients pair up
                let neg = k.map(|v| -v);
                let partner = a.get(&neg).map(|p| p.adjoint()).unwrap_or_else(|| ComplexMatrix::zeros(twist_rank));
                let dev = m.dist(&partner);
                if dev > HERMITIAN_FIELD_TOL * m.norm_fro().max(1.0) {
                    return Err(CalcError::NotSelfadjoint { deviation: dev });
                }
            }
        }
        Ok(Self { core, torus, twist_rank, connection })
    }

    pub fn n(&self) -> usize {
        self.core.n
    }

    /// Rank of the twisted bundle `S (x) E`.
    pub fn fiber_dim(&self) -> usize {
        self.core.spin_dim() * self.twist_rank
    }

    fn lift(&self, g: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
        g.kron(m)
    }

    fn twist_identity(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.twist_rank)
    }
}

fn add_into(out: &mut FourierField, k: Freq, m: ComplexMatrix) {
    match out.get_mut(&k) {
        Some(v) => *v = &*v + &m,
        None => {
            out.insert(k, m);
        }
    }
}

fn field_product(a: &FourierField, b: &FourierField) -> FourierField {
    let mut out = FourierField::new();
    for (ka, ma) in a {
        for (kb, mb) in b {
            let mut k = ZERO_FREQ;
            for i in 0..k.len() {
                k[i] = ka[i] + kb[i];
            }
            add_into(&mut out, k, ma * mb);
        }
    }
    out
}

fn field_deriv(a: &FourierField, torus: &Torus, i: usize) -> FourierField {
    a.iter()
        .filter(|(k, _)| k[i] != 0)
        .map(|(k, m)| (*k, m.scale(C64::new(0.0, torus.wave(i, k[i])))))
        .collect()
}

fn field_combine(a: &FourierField, ca: C64, b: &FourierField, cb: C64) -> FourierField {
    let mut out = FourierField::new();
    for (k, m) in a {
        add_into(&mut out, *k, m.scale(ca));
    }
    for (k, m) in b {
        add_into(&mut out, *k, m.scale(cb));
    }
    out
}

/// `F_ij`, stored for every ordered pair.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistCurvature {
    pub f: Vec<Vec<FourierField>>,
}

impl TwistCurvature {
    pub fn new(data: &CliffordData) -> Self {
        let n = data.n();
        let a = &data.connection;
        let mut f = vec![vec![FourierField::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let curl = field_combine(&field_deriv(&a[j], &data.torus, i), ONE, &field_deriv(&a[i], &data.torus, j), -ONE);
                let comm = field_combine(&field_product(&a[i], &a[j]), ONE, &field_product(&a[j], &a[i]), -ONE);
                f[i][j] = field_combine(&curl, ONE, &comm, I);
            }
        }
        Self { f }
    }

    pub fn at(&self, torus: &Torus, i: usize, j: usize, x: &[f64]) -> Option<ComplexMatrix> {
        let mut it = self.f[i][j].iter();
        let (k0, m0) = it.next()?;
        let mut acc = m0.scale(C64::from_polar(1.0, torus.phase(k0, x)));
        for (k, m) in it {
            acc = &acc + &m.scale(C64::from_polar(1.0, torus.phase(k, x)));
        }
        Some(acc)
    }
}

fn terms_of(field: &FourierField, lift: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Vec<SymbolTerm> {
    field.iter().map(|(k, m)| SymbolTerm::new(lift(m)).freq(*k)).collect()
}

/// Full symbol of the twisted Dirac operator.
pub fn dirac_symbol(data: &CliffordData) -> SymbolExpansion {
    let n = data.n();
    let id = data.twist_identity();
    let p1 = (0..n).map(|i| SymbolTerm::new(data.lift(&data.core.gamma[i], &id)).xi(unit(i))).collect();
    let mut p0 = Vec::new();
    for i in 0..n {
        p0.extend(terms_of(&data.connection[i], |m| data.lift(&data.core.gamma[i], m)));
    }
    SymbolExpansion::explicit(data.torus.clone(), data.fiber_dim(), 1, vec![p1, p0])
        .expect("Dirac data was validated on construction")
}

/// Order-zero endomorphism `c(F)` as symbol terms.
pub fn clifford_curvature(data: &CliffordData) -> Vec<SymbolTerm> {
    let curv = TwistCurvature::new(data);
    let n = data.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let g = (&data.core.gamma[i] * &data.core.gamma[j]).scale(-I);
            out.extend(terms_of(&curv.f[i][j], |m| data.lift(&g, m)));
        }
    }
    out
}

/// Symbol of the connection Laplacian `sum (D_i + A_i)^2`:
/// `|xi|^2 + 2 sum A_i xi_i + sum (A_i^2 - i d_i A_i)`.
pub fn connection_laplacian(data: &CliffordData) -> SymbolExpansion {
    SymbolExpansion::explicit(data.torus.clone(), data.fiber_dim(), 2, laplacian_terms(data))
        .expect("Laplacian terms are well formed")
}

fn laplacian_terms(data: &CliffordData) -> Vec<Vec<SymbolTerm>> {
    let n = data.n();
    let s = ComplexMatrix::identity(data.core.spin_dim());
    let lift = |m: &ComplexMatrix| s.kron(m);
    let id = ComplexMatrix::identity(data.fiber_dim());
    let mut p2 = Vec::new();
    for i in 0..n {
        let mut sq: Multi = [0; 4];
        sq[i] = 2;
        p2.push(SymbolTerm::new(id.clone()).xi(sq));
    }
    let mut p1 = Vec::new();
    let mut p0 = Vec::new();
    for i in 0..n {
        let a = &data.connection[i];
        p1.extend(terms_of(a, |m| lift(&m.scale(C64::new(2.0, 0.0)))).into_iter().map(|t| t.xi(unit(i))));
        let zeroth = field_combine(&field_product(a, a), ONE, &field_deriv(a, &data.torus, i), -I);
        p0.extend(terms_of(&zeroth, lift));
    }
    vec![p2, p1, p0]
}

#[derive(Clone, Debug)]
pub struct LichnerowiczReport {
    /// `D # D` from the composition formula.
    pub square: SymbolExpansion,
    /// Connection Laplacian plus `c(F)`.
    pub predicted: SymbolExpansion,
    pub curvature: Vec<SymbolTerm>,
    /// Largest coefficient mismatch over all components, modes and the
    /// sampled covectors.
    pub deviation: f64,
}

pub fn lichnerowicz_square(data: &CliffordData) -> CalcResult<LichnerowiczReport> {
    let d = dirac_symbol(data);
    let square = compose(&d, &d, 2)?;
    let curvature = clifford_curvature(data);
    let mut comps = laplacian_terms(data);
    comps[2].extend(curvature.iter().cloned());
    let predicted = SymbolExpansion::explicit(data.torus.clone(), data.fiber_dim(), 2, comps)?;
    let rule = SphereRule::new(data.n(), 4);
    let mut deviation = 0.0f64;
    let orders = [Some(0); 3];
    for xi in &rule.points {
        let a = square.eval_jets(xi, &orders, &mut EvalCache::new())?;
        let b = predicted.eval_jets(xi, &orders, &mut EvalCache::new())?;
        for (fa, fb) in a.iter().zip(&b) {
            let mut diff = fa.clone();
            diff.add_scaled(-ONE, fb);
            for jet in diff.modes.values() {
                deviation = deviation.max(jet.max_abs());
            }
        }
    }
    Ok(LichnerowiczReport { square, predicted, curvature, deviation })
}

/// Fiber-traced heat coefficients of `D^2` on a flat torus.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatCoefficients {
    pub a0: DensityField,
    pub a1: DensityField,
}

/// Traced `a_j(D^2)(x)`; only `j = 0, 1` have closed forms here.
pub fn heat_density(data: &CliffordData, j: usize) -> CalcResult<DensityField> {
    let n = data.n();
    let pref = (4.0 * PI).powf(-(n as f64) / 2.0);
    match j {
        0 => {
            let mut modes = BTreeMap::new();
            modes.insert(ZERO_FREQ, C64::new(pref * data.fiber_dim() as f64, 0.0));
            Ok(DensityField::from_modes(&data.torus, modes))
        }
        1 => {
            // -(4 pi)^{-n/2} / 12 (r_M + 2 c(F)) with r_M = 0
            let mut modes: BTreeMap<Freq, C64> = BTreeMap::new();
            for t in clifford_curvature(data) {
                *modes.entry(t.freq).or_insert(ZERO) += t.coeff.trace() * (-pref / 12.0 * 2.0);
            }
            Ok(DensityField::from_modes(&data.torus, modes))
        }
        _ => Err(CalcError::HeatCoefficientUnavailable { index: j }),
    }
}

pub fn heat_coefficients(data: &CliffordData) -> CalcResult<HeatCoefficients> {
    Ok(HeatCoefficients { a0: heat_density(data, 0)?, a1: heat_density(data, 1)? })
}

/// Why a Dirac gap vanishes without computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vanishing {
    /// Odd `k`: the chirality grading kills the traced residue density.
    Chirality,
    /// `k <= 0`: `D^{-k}` is a differential operator.
    Differential,
    /// `k > n`: `D^{-k}` has no component of degree `-n`.
    BelowResidueOrder,
}

impl Vanishing {
    pub fn describe(&self) -> &'static str {
        match self {
            Vanishing::Chirality => "odd power: chirality anticommutes with the symbol, traced residue density is zero",
            Vanishing::Differential => "non-positive power: differential operator, residue is zero",
            Vanishing::BelowResidueOrder => "power above dimension: no symbol component of degree -n",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiracAsymmetry {
    pub n: usize,
    pub k: i32,
    /// `i pi Res D^{-k}`.
    pub residue_route: C64,
    pub res_pk: C64,
    /// `i pi \int tr [2/(l-1)! a_{n/2-l}]` with `l = k/2`.
    pub heat_route: Option<C64>,
    /// Relative distance between the two routes.
    pub discrepancy: Option<f64>,
    pub heat_error: Option<CalcError>,
    pub vanishing: Option<Vanishing>,
    /// Largest traced residue density of `D^{-k}`, recorded for odd `k`.
    pub density_bound: Option<f64>,
    pub depth: usize,
}

/// Closed-form `2 i pi (4 pi)^{-n/2} rk vol / Gamma(n/2)`.
pub fn leading_gap(data: &CliffordData) -> C64 {
    let n = data.n();
    C64::new(0.0, 2.0 * PI * (4.0 * PI).powf(-(n as f64) / 2.0) / gamma_half(n))
        * (data.fiber_dim() as f64 * data.torus.volume())
}

pub fn dirac_asymmetry(data: &CliffordData, k: i32) -> CalcResult<DiracAsymmetry> {
    let n = data.n() as i32;
    let ipi = C64::new(0.0, PI);
    let mut out = DiracAsymmetry {
        n: data.n(),
        k,
        residue_route: ZERO,
        res_pk: ZERO,
        heat_route: None,
        discrepancy: None,
        heat_error: None,
        vanishing: None,
        density_bound: None,
        depth: 0,
    };
    if k <= 0 {
        out.vanishing = Some(Vanishing::Differential);
        return Ok(out);
    }
    if k > n {
        out.vanishing = Some(Vanishing::BelowResidueOrder);
        return Ok(out);
    }
    let p = dirac_symbol(data);
    let depth = (n - k) as usize;
    let pk = power_expansion(&p, k, depth)?;
    out.depth = depth;
    if k % 2 == 1 {
        out.vanishing = Some(Vanishing::Chirality);
        let dens = residue_density(&pk)?;
        out.density_bound = Some(dens.max_abs());
        return Ok(out);
    }
    out.res_pk = res_total(&pk)?;
    out.residue_route = ipi * out.res_pk;
    let l = (k / 2) as usize;
    match heat_density(data, data.n() / 2 - l) {
        Ok(a) => {
            let fact: f64 = (1..l).map(|v| v as f64).product();
            let heat = ipi * a.integrate() * (2.0 / fact);
            let scale = leading_gap(data).norm();
            out.discrepancy = Some((heat - out.residue_route).norm() / scale);
            out.heat_route = Some(heat);
        }
        Err(e) => out.heat_error = Some(e),
    }
    Ok(out)
}

/// `((2 pi)^{-n} |S^{n-1}|, 2 (4 pi)^{-n/2} / Gamma(n/2))`, the left side
/// from the numerical cosphere rule.
pub fn sphere_constant_check(n: usize) -> CalcResult<(f64, f64)> {
    if n != 2 && n != 4 {
        return Err(CalcError::UnsupportedDimension(n));
    }
    let lhs = (2.0 * PI).powi(-(n as i32)) * SphereRule::default_for(n).total_weight();
    let rhs = 2.0 * (4.0 * PI).powf(-(n as f64) / 2.0) / gamma_half(n);
    Ok((lhs, rhs))
}

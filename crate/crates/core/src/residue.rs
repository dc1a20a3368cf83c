//! Residue densities, total residues and the zeta/eta asymmetry quantities
//! computed from them.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::cmat::{C64, ZERO};
use crate::contour::CutPair;
use crate::error::{CalcError, CalcResult};
use crate::quadrature::kahan_sum;
use crate::resolvent::power_expansion;
use crate::sectorial::{projection_expansion_with, ProjectionConfig};
use crate::sphere::{scan_points, sphere_area, SphereRule};
use crate::symbol::{compose, odd_class_check, EvalCache, SymbolExpansion, SCAN_RESOLUTION};
use crate::torus::{Freq, Torus};

/// Acceptance bound for fast-path discrepancies and local gap violations.
pub const GAP_TOL: f64 = 1e-7;
/// Relative Hermiticity defect tolerated by the eta routines.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A fiber-traced density on the torus, stored both as Fourier modes and as
/// values on the uniform grid that resolves those modes.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityField {
    torus: Torus,
    modes: BTreeMap<Freq, C64>,
    grid: Vec<usize>,
    values: Vec<C64>,
}

impl DensityField {
    pub fn zero(torus: &Torus) -> Self {
        Self::from_modes(torus, BTreeMap::new())
    }

    /// Samples the trigonometric polynomial on the smallest grid with
    /// `2K_i + 1` points per axis, `K_i` the largest frequency along axis `i`.
    pub fn from_modes(torus: &Torus, modes: BTreeMap<Freq, C64>) -> Self {
        let n = torus.dim();
        let grid: Vec<usize> = (0..n)
            .map(|i| 2 * modes.keys().map(|k| k[i].unsigned_abs() as usize).max().unwrap_or(0) + 1)
            .collect();
        let total: usize = grid.iter().product();
        let mut field = Self { torus: torus.clone(), modes, grid, values: Vec::with_capacity(total) };
        for g in 0..total {
            let x = field.point(g);
            field.values.push(field.at(&x));
        }
        field
    }

    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    pub fn modes(&self) -> &BTreeMap<Freq, C64> {
        &self.modes
    }

    /// Points per axis.
    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    /// Values in row-major grid order, last axis fastest.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Coordinates of grid point `g`.
    pub fn point(&self, mut g: usize) -> Vec<f64> {
        let n = self.grid.len();
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let idx = g % self.grid[i];
            g /= self.grid[i];
            x[i] = self.torus.periods()[i] * idx as f64 / self.grid[i] as f64;
        }
        x
    }

    pub fn at(&self, x: &[f64]) -> C64 {
        kahan_sum(self.modes.iter().map(|(k, c)| c * C64::from_polar(1.0, self.torus.phase(k, x))))
    }

    /// Uniform-grid rule, exact for the stored modes.
    pub fn integrate(&self) -> C64 {
        let cell = self.torus.volume() / self.values.len() as f64;
        kahan_sum(self.values.iter().copied()) * cell
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `a * self + b * other`, resampled on a grid fine enough for both.
    pub fn combine(&self, a: C64, other: &DensityField, b: C64) -> DensityField {
        let mut modes: BTreeMap<Freq, C64> = BTreeMap::new();
        for (k, v) in &self.modes {
            *modes.entry(*k).or_insert(ZERO) += a * v;
        }
        for (k, v) in &other.modes {
            *modes.entry(*k).or_insert(ZERO) += b * v;
        }
        DensityField::from_modes(&self.torus, modes)
    }

    /// Largest spread of the grid values around their mean.
    pub fn variation(&self) -> f64 {
        let mean = self.integrate() / self.torus.volume();
        self.values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max)
    }
}

/// Component index holding the degree `-n` part of `q`, if any.
fn residue_index(q: &SymbolExpansion) -> Option<usize> {
    let j = q.order() + q.n() as i32;
    (j >= 0).then_some(j as usize)
}

/// Residue density with the default cosphere rule.
pub fn residue_density(q: &SymbolExpansion) -> CalcResult<DensityField> {
    residue_density_with(q, &SphereRule::default_for(q.n()))
}

/// `(2 pi)^{-n} \int_{|xi|=1} tr q_{-n}(x, xi)` as a trigonometric polynomial.
pub fn residue_density_with(q: &SymbolExpansion, rule: &SphereRule) -> CalcResult<DensityField> {
    let torus = q.torus();
    let Some(j) = residue_index(q) else {
        return Ok(DensityField::zero(torus));
    };
    if q.is_differential() {
        return Ok(DensityField::zero(torus));
    }
    if j > q.available_depth() {
        return Err(CalcError::DepthInsufficient { needed: j, depth: q.available_depth() });
    }
    let mut orders = vec![None; j + 1];
    orders[j] = Some(0);
    let rows: Vec<CalcResult<BTreeMap<Freq, C64>>> = rule
        .points
        .par_iter()
        .map(|xi| Ok(q.eval_jets(xi, &orders, &mut EvalCache::new())?[j].trace_modes()))
        .collect();
    let rows = rows.into_iter().collect::<CalcResult<Vec<_>>>()?;
    let mut keys: Vec<Freq> = rows.iter().flat_map(|r| r.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    let scale = TAU.powi(-(q.n() as i32));
    let modes = keys
        .into_iter()
        .map(|k| {
            let s = kahan_sum(rows.iter().zip(&rule.weights).map(|(r, w)| r.get(&k).copied().unwrap_or(ZERO) * *w));
            (k, s * scale)
        })
        .collect();
    Ok(DensityField::from_modes(torus, modes))
}

/// Noncommutative residue: the torus integral of the residue density.
pub fn res_total(q: &SymbolExpansion) -> CalcResult<C64> {
    Ok(residue_density(q)?.integrate())
}

/// Smallest depth at which `Pi P^{-k}` carries its degree `-n` component.
pub fn required_depth(p: &SymbolExpansion, k: i32) -> usize {
    (p.n() as i32 - k * p.order()).max(0) as usize
}

/// Fast-path value `(i pi / m) Res P^{-k}` and its distance to the gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FastPath {
    pub value: C64,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymmetryReport {
    pub operator: String,
    pub cuts: CutPair,
    pub k: i32,
    pub gap: C64,
    pub res_pk: C64,
    pub res_pi_pk: C64,
    /// Present when `p` is odd-class of odd order on an even torus with its
    /// principal spectrum in the split cone of the cuts.
    pub fast_path: Option<FastPath>,
    pub depth: usize,
    pub tol: f64,
}

impl AsymmetryReport {
    pub fn named(mut self, id: impl Into<String>) -> Self {
        self.operator = id.into();
        self
    }
}

fn check_depth(p: &SymbolExpansion, k: i32, depth: usize) -> CalcResult<()> {
    let needed = required_depth(p, k);
    if depth < needed {
        return Err(CalcError::DepthInsufficient { needed, depth });
    }
    Ok(())
}

/// `true` when every sampled principal eigenvalue lies in the open double
/// sector `(theta, theta') u (theta + pi, theta' + pi)`.
pub fn in_split_cone(p: &SymbolExpansion, cuts: &CutPair) -> CalcResult<bool> {
    let pts = scan_points(p.n(), SCAN_RESOLUTION);
    let hits: Vec<CalcResult<bool>> = pts
        .par_iter()
        .map(|xi| {
            let pm = p.principal_at(xi)?;
            Ok(crate::spectral::eigenvalues(&pm)?.into_iter().all(|z| cuts.contains(z) || cuts.contains(-z)))
        })
        .collect();
    for h in hits {
        if !h? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the odd-dimension-parity shortcut for the gap applies to `p`.
pub fn fast_path_applies(p: &SymbolExpansion, cuts: &CutPair) -> CalcResult<bool> {
    if p.order().rem_euclid(2) != 1 || !p.n().is_multiple_of(2) {
        return Ok(false);
    }
    if !odd_class_check(p)?.holds {
        return Ok(false);
    }
    in_split_cone(p, cuts)
}

/// `zeta_theta(P; k) - zeta_theta'(P; k) = (2 i pi / m) Res Pi P^{-k}`.
///
/// The residue is a trace, so it is computed as `Res P^{-k} Pi`: in that
/// order the composition takes no `xi`-derivatives of the projection and
/// the resolvent recursion runs on plain values instead of Taylor jets.
pub fn zeta_gap(p: &SymbolExpansion, cuts: CutPair, k: i32, depth: usize) -> CalcResult<AsymmetryReport> {
    zeta_gap_with(p, cuts, k, depth, ProjectionConfig::default())
}

pub fn zeta_gap_with(
    p: &SymbolExpansion,
    cuts: CutPair,
    k: i32,
    depth: usize,
    cfg: ProjectionConfig,
) -> CalcResult<AsymmetryReport> {
    check_depth(p, k, depth)?;
    let m = p.order() as f64;
    let pk = power_expansion(p, k, depth)?;
    let pi = projection_expansion_with(p, cuts, depth, cfg)?;
    let r = compose(&pk, &pi, depth)?;
    let res_pi_pk = res_total(&r)?;
    let res_pk = res_total(&pk)?;
    let gap = C64::new(0.0, TAU / m) * res_pi_pk;
    let fast_path = if fast_path_applies(p, &cuts)? {
        let value = C64::new(0.0, PI / m) * res_pk;
        Some(FastPath { value, discrepancy: (value - gap).norm() })
    } else {
        None
    };
    Ok(AsymmetryReport { operator: String::new(), cuts, k, gap, res_pk, res_pi_pk, fast_path, depth, tol: GAP_TOL })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalGapReport {
    /// `c_R(x)` for `R = Pi P^{-k}`.
    pub r_density: DensityField,
    /// `c_{P^{-k}}(x)`.
    pub pk_density: DensityField,
    /// Largest value of `|2 c_R - c_{P^{-k}}|` on the common grid.
    pub violation: f64,
    pub fast_path: bool,
}

pub fn local_gap_density(p: &SymbolExpansion, cuts: CutPair, k: i32, depth: usize) -> CalcResult<LocalGapReport> {
    local_gap_density_with(p, cuts, k, depth, ProjectionConfig::default())
}

pub fn local_gap_density_with(
    p: &SymbolExpansion,
    cuts: CutPair,
    k: i32,
    depth: usize,
    cfg: ProjectionConfig,
) -> CalcResult<LocalGapReport> {
    check_depth(p, k, depth)?;
    let pk = power_expansion(p, k, depth)?;
    let pi = projection_expansion_with(p, cuts, depth, cfg)?;
    let r = compose(&pi, &pk, depth)?;
    let r_density = residue_density(&r)?;
    let pk_density = residue_density(&pk)?;
    let violation = r_density.combine(C64::new(2.0, 0.0), &pk_density, C64::new(-1.0, 0.0)).max_abs();
    Ok(LocalGapReport { r_density, pk_density, violation, fast_path: fast_path_applies(p, &cuts)? })
}

/// Worst relative Hermiticity defect of `p_m` on the cosphere scan.
pub fn hermiticity_defect(p: &SymbolExpansion) -> CalcResult<f64> {
    let pts = scan_points(p.n(), SCAN_RESOLUTION);
    let rows: Vec<CalcResult<f64>> = pts
        .par_iter()
        .map(|xi| {
            let pm = p.principal_at(xi)?;
            Ok(pm.dist(&pm.adjoint()) / pm.norm_fro().max(f64::MIN_POSITIVE))
        })
        .collect();
    rows.into_iter().try_fold(0.0, |acc, r| Ok(f64::max(acc, r?)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaReport {
    pub k: i32,
    pub value: f64,
    /// Imaginary part discarded from the residue combination.
    pub imaginary_residual: f64,
    pub res_pk: C64,
    /// `Res Pi_- P^{-k}` with `Pi_-` cut along the imaginary axis.
    pub res_minus_pk: C64,
    pub depth: usize,
}

/// `res_{s=k} eta(P; s) = Res F|P|^{-k} / m`. With `F = 1 - 2 Pi_-` and
/// `P^{-k} = F^k |P|^{-k}` this is `(Res P^{-k} - 2 Res Pi_- P^{-k}) / m` for
/// even `k` and `Res P^{-k} / m` for odd `k`.
pub fn eta_residue(p: &SymbolExpansion, k: i32, depth: usize) -> CalcResult<EtaReport> {
    let deviation = hermiticity_defect(p)?;
    if deviation > HERMITIAN_TOL {
        return Err(CalcError::NotSelfadjoint { deviation });
    }
    check_depth(p, k, depth)?;
    let m = p.order() as f64;
    let pk = power_expansion(p, k, depth)?;
    let res_pk = res_total(&pk)?;
    let res_minus_pk = if k.rem_euclid(2) == 0 {
        // trace property, as in zeta_gap
        let minus = projection_expansion_with(p, CutPair::up_down(), depth, ProjectionConfig::default())?;
        res_total(&compose(&pk, &minus, depth)?)?
    } else {
        ZERO
    };
    let z = (res_pk - res_minus_pk * 2.0) / m;
    Ok(EtaReport { k, value: z.re, imaginary_residual: z.im.abs(), res_pk, res_minus_pk, depth })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    /// `(1/i)(zeta_up - zeta_down)(n)` from the gap residue.
    pub gap_value: f64,
    /// `pi (2 pi)^{-n} \int_{S*M} tr p_m^{-n}` from direct matrix powers.
    pub closed_form: f64,
    pub floor: f64,
    pub positive: bool,
    /// Imaginary part of `(1/i)` times the gap, expected to vanish.
    pub imaginary_residual: f64,
}

/// Positivity of the `k = n` gap for selfadjoint odd-class first-order `p`
/// on an even torus.
pub fn positivity_check(p: &SymbolExpansion, depth: usize) -> CalcResult<PositivityReport> {
    let n = p.n();
    if p.order() != 1 || !n.is_multiple_of(2) {
        return Err(CalcError::Precondition(format!(
            "positivity needs order 1 on an even torus, got order {} on T^{}",
            p.order(),
            n
        )));
    }
    let deviation = hermiticity_defect(p)?;
    if deviation > HERMITIAN_TOL {
        return Err(CalcError::NotSelfadjoint { deviation });
    }
    if !odd_class_check(p)?.holds {
        return Err(CalcError::Precondition("positivity needs an odd-class symbol".into()));
    }
    let report = zeta_gap(p, CutPair::up_down(), n as i32, depth)?;
    let g = report.gap / C64::new(0.0, 1.0);
    let rule = SphereRule::default_for(n);
    let rows: Vec<CalcResult<f64>> = rule
        .points
        .par_iter()
        .map(|xi| {
            let inv = p.principal_at(xi)?.inverse().map_err(|e| CalcError::SingularFiber { min_singular_value: e.pivot })?;
            Ok(inv.pow(n as u32).trace().re)
        })
        .collect();
    let rows = rows.into_iter().collect::<CalcResult<Vec<f64>>>()?;
    let integral = kahan_sum(rows.iter().zip(&rule.weights).map(|(v, w)| C64::new(v * w, 0.0))).re;
    let vol = p.torus().volume();
    let closed_form = PI * TAU.powi(-(n as i32)) * vol * integral;
    let scale = PI * TAU.powi(-(n as i32)) * vol * sphere_area(n) * p.fiber_dim() as f64;
    let floor = 1e-6 * scale;
    Ok(PositivityReport {
        gap_value: g.re,
        closed_form,
        floor,
        positive: g.re > floor && closed_form > floor,
        imaginary_residual: g.im.abs(),
    })
}

/// Residue of the projection itself, which vanishes for every projection.
pub fn projection_residue(p: &SymbolExpansion, cuts: CutPair) -> CalcResult<C64> {
    let depth = p.n();
    res_total(&projection_expansion_with(p, cuts, depth, ProjectionConfig::default())?)
}

//! Symbol expansion of sectorial projections.
//!
//! `pi_{-j}(x, xi) = (-1/2 pi i) \oint q_{-m-j}(x, xi, lambda) d lambda` with the
//! contour made of one circle per enclosed eigenvalue cluster of
//! `p_m(xi)`. The integrand only has poles at eigenvalues of `p_m`, so the
//! circles need clearance from the other eigenvalues, not from the cut rays.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::cmat::{ComplexMatrix, C64};
use crate::contour::{ContourSpec, CutPair};
use crate::error::{CalcError, CalcResult};
use crate::jet::Jet;
use crate::resolvent::ResolventPlan;
use crate::spectral::{eigen_oracle, eigenvalues, KernelConfig};
use crate::sphere::scan_points;
use crate::symbol::{EvalCache, Kind, SymbolExpansion, SCAN_RESOLUTION};
use crate::torus::{FJet, ZERO_FREQ};

/// Trapezoid nodes per fiber circle. Each circle has radius half the
/// distance to the nearest excluded eigenvalue and the enclosed poles have
/// bounded order, so the aliasing error decays like `2^{-nodes}`.
pub const FIBER_NODES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionConfig {
    /// Trapezoid nodes per enclosing circle.
    pub nodes: usize,
    pub kernel: KernelConfig,
    /// Circles must be this many times wider than the cluster they enclose.
    pub clearance_ratio: f64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        Self { nodes: FIBER_NODES, kernel: KernelConfig::default(), clearance_ratio: 10.0 }
    }
}

pub(crate) struct ProjectionData {
    pub(crate) p: SymbolExpansion,
    pub(crate) cuts: CutPair,
    pub(crate) cfg: ProjectionConfig,
}

pub fn projection_expansion(p: &SymbolExpansion, cuts: CutPair, depth: usize) -> CalcResult<SymbolExpansion> {
    projection_expansion_with(p, cuts, depth, ProjectionConfig::default())
}

pub fn projection_expansion_with(
    p: &SymbolExpansion,
    cuts: CutPair,
    depth: usize,
    cfg: ProjectionConfig,
) -> CalcResult<SymbolExpansion> {
    if depth > p.available_depth() {
        return Err(CalcError::DepthUnavailable { requested: depth, available: p.available_depth() });
    }
    p.ellipticity_certificate()?;
    cut_scan(p, &cuts, &cfg.kernel)?;
    Ok(SymbolExpansion::from_parts(
        p.torus().clone(),
        p.fiber_dim(),
        0,
        depth,
        false,
        Kind::Projection(Box::new(ProjectionData { p: p.clone(), cuts, cfg })),
    ))
}

/// Checks that no principal eigenvalue meets a cut ray on the cosphere scan.
fn cut_scan(p: &SymbolExpansion, cuts: &CutPair, cfg: &KernelConfig) -> CalcResult<()> {
    let pts = scan_points(p.n(), SCAN_RESOLUTION);
    pts.par_iter()
        .map(|xi| {
            let pm = p.principal_at(xi)?;
            let scale = pm.norm_fro().max(1.0);
            for z in eigenvalues(&pm)? {
                if cuts.ray_distance(z) <= cfg.ray_clearance * scale {
                    return Err(CalcError::EigenvalueOnCut { eigenvalue: z, xi: xi.clone() });
                }
            }
            Ok(())
        })
        .collect::<CalcResult<Vec<()>>>()
        .map(|_| ())
}

pub(crate) fn eval_projection(
    data: &ProjectionData,
    xi: &[f64],
    orders: &[Option<usize>],
    depth: usize,
    cache: &mut EvalCache,
) -> CalcResult<Vec<FJet>> {
    let p = &data.p;
    let (n, r) = (p.n(), p.fiber_dim());
    let trimmed: Vec<Option<usize>> = orders.iter().enumerate().map(|(j, o)| if j > depth { None } else { *o }).collect();
    let zero = |o: Option<usize>| FJet::zero(n, o.unwrap_or(0), r);
    let mut out: Vec<FJet> = trimmed.iter().map(|o| zero(*o)).collect();
    if trimmed.iter().all(|o| o.is_none()) {
        return Ok(out);
    }
    let plan = ResolventPlan::new(p, xi, &trimmed, cache)?;
    let pm = plan.principal_value();
    let clusters = eigen_oracle(&pm, &data.cfg.kernel)?;
    let scale = pm.norm_fro().max(1.0);
    for c in &clusters {
        if data.cuts.ray_distance(c.eigenvalue) <= data.cfg.kernel.ray_clearance * scale {
            return Err(CalcError::EigenvalueOnCut { eigenvalue: c.eigenvalue, xi: xi.to_vec() });
        }
    }
    let inside: Vec<usize> = (0..clusters.len()).filter(|&i| data.cuts.contains(clusters[i].eigenvalue)).collect();
    if inside.is_empty() {
        return Ok(out);
    }
    if inside.len() == clusters.len() {
        // the contour encloses the whole spectrum: pi_0 = 1 and the lower
        // components integrate q_{-m-j} = O(lambda^{-2}) to zero
        if let Some(k) = trimmed[0] {
            out[0] = FJet::from_mode(ZERO_FREQ, Jet::constant(&ComplexMatrix::identity(r), n, k));
        }
        return Ok(out);
    }
    let factor = C64::new(0.0, 1.0 / (2.0 * PI));
    for &i in &inside {
        let mu = clusters[i].eigenvalue;
        let gap = clusters
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, c)| (c.eigenvalue - mu).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = gap / 2.0;
        let clearance = radius - clusters[i].radius;
        if radius <= data.cfg.clearance_ratio * clusters[i].radius || clearance <= data.cfg.kernel.contour_tolerance * scale {
            return Err(CalcError::ClearanceFailure { clearance, xi: xi.to_vec() });
        }
        let gamma = ContourSpec::circle(mu, radius, data.cfg.nodes);
        for (lam, w) in gamma.nodes.iter().zip(&gamma.weights) {
            let q = plan.eval(*lam, false)?;
            // (-1 / 2 pi i) w = (i / 2 pi) w
            let c = factor * w;
            for ((o, qj), want) in out.iter_mut().zip(&q).zip(&trimmed) {
                if want.is_some() && !qj.modes.is_empty() {
                    o.add_scaled(c, qj);
                }
            }
        }
    }
    for (j, o) in trimmed.iter().enumerate() {
        if let Some(k) = o {
            out[j] = out[j].truncate(*k);
        }
    }
    Ok(out)
}

/// `true` iff no eigenvalue of `p_m` on the cosphere scan has its argument
/// in the closed sector `[theta, theta']`.
pub fn smoothing_check(p: &SymbolExpansion, cuts: &CutPair) -> CalcResult<bool> {
    let cfg = KernelConfig::default();
    let pts = scan_points(p.n(), SCAN_RESOLUTION);
    let hits: Vec<CalcResult<bool>> = pts
        .par_iter()
        .map(|xi| {
            let pm = p.principal_at(xi)?;
            let scale = pm.norm_fro().max(1.0);
            Ok(eigenvalues(&pm)?
                .into_iter()
                .any(|z| cuts.contains(z) || cuts.ray_distance(z) <= cfg.ray_clearance * scale))
        })
        .collect();
    for h in hits {
        if h? {
            return Ok(false);
        }
    }
    Ok(true)
}

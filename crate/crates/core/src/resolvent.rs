//! Resolvent symbols, parametrices and integer powers.
//!
//! With `q_{-m} = (p_m - lambda)^{-1}`, the lower components solve
//! `q_{-m-j} = -q_{-m} sum (1/alpha!) d_xi^alpha p_{m-k} D_x^alpha q_{-m-l}`
//! over `|alpha| + k + l = j`, `l < j`, with `D_x = -i d_x`. At `lambda = 0`
//! the same recursion produces a parametrix.

use std::collections::HashMap;

use crate::cmat::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{CalcError, CalcResult};
use crate::jet::{multi_factorial, shape, Jet, Multi};
use crate::symbol::{compose, norm, EvalCache, Kind, SymbolExpansion};
use crate::torus::{FJet, Torus, ZERO_FREQ};

/// Relative singular-value floor for `p_m - lambda`.
pub const SING_TOL: f64 = 1e-12;

/// Precomputed covector data for the resolvent recursion at one fiber.
pub(crate) struct ResolventPlan {
    torus: Torus,
    n: usize,
    dim: usize,
    principal: Jet,
    /// Order at which each `q_j` is produced, `None` if not needed.
    orders: Vec<Option<usize>>,
    /// `(1/alpha!) d_xi^alpha p_k` for every `(k, alpha)` in use.
    coeffs: Vec<FJet>,
    /// For each `j`: terms `(l, alpha, coefficient index)`.
    terms: Vec<Vec<(usize, Multi, usize)>>,
}

impl ResolventPlan {
    pub(crate) fn new(p: &SymbolExpansion, xi: &[f64], orders: &[Option<usize>], cache: &mut EvalCache) -> CalcResult<Self> {
        let n = p.n();
        let len = orders.len();
        // q_j feeds every q_i with i > j at the order of q_i
        let mut e: Vec<Option<usize>> = vec![None; len];
        let mut run: Option<usize> = None;
        for j in (0..len).rev() {
            run = match (run, orders[j]) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            e[j] = run;
        }
        let mut p_req: Vec<Option<usize>> = vec![None; len.max(1)];
        let bump = |slot: &mut Option<usize>, v: usize| *slot = Some(slot.map_or(v, |x| x.max(v)));
        if let Some(e0) = e.first().copied().flatten() {
            bump(&mut p_req[0], e0);
        }
        for j in 1..len {
            if let Some(ej) = e[j] {
                for k in 0..=j {
                    bump(&mut p_req[k], ej + j - k);
                }
            }
        }
        let pj = p.eval_jets(xi, &p_req, cache)?;
        let principal = match pj[0].modes.iter().find(|(k, j)| **k != ZERO_FREQ && !j.is_zero()) {
            Some(_) => return Err(CalcError::XDependentPrincipal),
            None => pj[0].mode0().cloned().unwrap_or_else(|| Jet::zeros(n, p_req[0].unwrap_or(0), p.fiber_dim())),
        };
        let sh = shape(n);
        let mut coeffs = Vec::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut terms = vec![Vec::new(); len];
        for j in 1..len {
            if e[j].is_none() {
                continue;
            }
            for l in 0..j {
                for k in 0..=(j - l) {
                    let s = j - l - k;
                    // q_{-m} does not depend on x, so D_x^alpha kills it
                    if (l == 0 && s > 0) || pj[k].modes.is_empty() {
                        continue;
                    }
                    for g in sh.deg_start[s]..sh.deg_start[s + 1] {
                        let alpha = sh.monos[g];
                        let ci = *index.entry((k, g)).or_insert_with(|| {
                            let d = if s == 0 { pj[k].clone() } else { pj[k].deriv_xi(&alpha) };
                            coeffs.push(d.scale(C64::new(1.0 / multi_factorial(&alpha), 0.0)));
                            coeffs.len() - 1
                        });
                        terms[j].push((l, alpha, ci));
                    }
                }
            }
        }
        Ok(Self { torus: p.torus().clone(), n, dim: p.fiber_dim(), principal, orders: e, coeffs, terms })
    }

    pub(crate) fn principal_value(&self) -> ComplexMatrix {
        self.principal.value()
    }

    /// Components `q_j` at `lambda`. With `certify`, a singular-value test
    /// guards the inverse; otherwise only the LU pivot check applies.
    pub(crate) fn eval(&self, lambda: C64, certify: bool) -> CalcResult<Vec<FJet>> {
        let len = self.orders.len();
        let Some(e0) = self.orders.first().copied().flatten() else {
            return Ok(vec![FJet::zero(self.n, 0, self.dim); len]);
        };
        let mut shifted = self.principal.truncate(e0);
        let diag = shifted.coeff_mut(0);
        for d in 0..self.dim {
            diag[d * self.dim + d] -= lambda;
        }
        let base = shifted.value();
        let scale = base.norm_max().max(1.0);
        if certify {
            let s = base.min_singular_value();
            if s <= SING_TOL * scale {
                return Err(CalcError::LambdaOnSpectrum { lambda, distance: s });
            }
        }
        let q0 = shifted
            .inverse()
            .map_err(|e| CalcError::LambdaOnSpectrum { lambda, distance: e.pivot })?;
        let q0 = FJet::from_mode(ZERO_FREQ, q0);
        let mut q: Vec<FJet> = Vec::with_capacity(len);
        q.push(q0.clone());
        let mut dx_cache: HashMap<(usize, Multi), FJet> = HashMap::new();
        for j in 1..len {
            let Some(ej) = self.orders[j] else {
                q.push(FJet::zero(self.n, 0, self.dim));
                continue;
            };
            let mut s = FJet::zero(self.n, ej, self.dim);
            for (l, alpha, ci) in &self.terms[j] {
                let c = &self.coeffs[*ci];
                if alpha.iter().all(|&a| a == 0) {
                    FJet::mul_acc(&mut s, c, &q[*l]);
                } else {
                    let dq = dx_cache
                        .entry((*l, *alpha))
                        .or_insert_with(|| q[*l].deriv_x(&self.torus, alpha, ONE));
                    if !dq.modes.is_empty() {
                        FJet::mul_acc(&mut s, c, dq);
                    }
                }
            }
            let mut qj = FJet::mul(&q0, &s, ej);
            qj = qj.scale(-ONE);
            q.push(qj);
        }
        Ok(q)
    }
}

pub(crate) fn eval_parametrix(
    p: &SymbolExpansion,
    xi: &[f64],
    orders: &[Option<usize>],
    depth: usize,
    cache: &mut EvalCache,
) -> CalcResult<Vec<FJet>> {
    let trimmed: Vec<Option<usize>> = orders.iter().enumerate().map(|(j, o)| if j > depth { None } else { *o }).collect();
    let plan = ResolventPlan::new(p, xi, &trimmed, cache)?;
    let mut out = plan.eval(ZERO, false).map_err(|e| match e {
        CalcError::LambdaOnSpectrum { distance, .. } => CalcError::SingularFiber { min_singular_value: distance },
        other => other,
    })?;
    for (j, o) in orders.iter().enumerate() {
        if o.is_none() || j > depth {
            out[j] = FJet::zero(p.n(), o.unwrap_or(0), p.fiber_dim());
        } else {
            out[j] = out[j].truncate(o.unwrap());
        }
    }
    Ok(out)
}

/// The resolvent expansion `q(x, xi, lambda)` of an elliptic symbol.
#[derive(Clone, Debug)]
pub struct ResolventExpansion {
    p: SymbolExpansion,
    depth: usize,
}

pub fn resolvent_expansion(p: &SymbolExpansion, depth: usize) -> CalcResult<ResolventExpansion> {
    if depth > p.available_depth() {
        return Err(CalcError::DepthUnavailable { requested: depth, available: p.available_depth() });
    }
    p.ellipticity_certificate()?;
    Ok(ResolventExpansion { p: p.clone(), depth })
}

impl ResolventExpansion {
    pub fn symbol(&self) -> &SymbolExpansion {
        &self.p
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Fourier data of `q_{-m-j}` at `(xi, lambda)` for `j = 0..=depth`, jets
    /// of the requested orders.
    pub fn eval_jets(&self, xi: &[f64], lambda: C64, orders: &[Option<usize>]) -> CalcResult<Vec<FJet>> {
        let trimmed: Vec<Option<usize>> =
            orders.iter().enumerate().map(|(j, o)| if j > self.depth { None } else { *o }).collect();
        let plan = ResolventPlan::new(&self.p, xi, &trimmed, &mut EvalCache::new())?;
        plan.eval(lambda, true)
    }

    pub fn component(&self, j: usize) -> ParametrizedComponent {
        ParametrizedComponent { resolvent: self.clone(), index: j }
    }
}

/// One component `q_{-m-j}` of a resolvent expansion.
#[derive(Clone, Debug)]
pub struct ParametrizedComponent {
    pub resolvent: ResolventExpansion,
    pub index: usize,
}

impl ParametrizedComponent {
    pub fn degree(&self) -> i32 {
        -self.resolvent.p.order() - self.index as i32
    }

    pub fn eval_raw(&self, x: &[f64], xi: &[f64], lambda: C64) -> CalcResult<ComplexMatrix> {
        let mut orders = vec![None; self.index + 1];
        orders[self.index] = Some(0);
        let f = self.resolvent.eval_jets(xi, lambda, &orders)?;
        Ok(f[self.index].value_at(self.resolvent.p.torus(), x))
    }

    /// Evaluates through the unit covector using
    /// `q(x, t xi, t^m lambda) = t^{-m-j} q(x, xi, lambda)`.
    pub fn eval(&self, x: &[f64], xi: &[f64], lambda: C64) -> CalcResult<ComplexMatrix> {
        let t = norm(xi);
        assert!(t > 0.0, "covector must be nonzero");
        let unit: Vec<f64> = xi.iter().map(|v| v / t).collect();
        let m = self.resolvent.p.order();
        let v = self.eval_raw(x, &unit, lambda / t.powi(m))?;
        Ok(v.scale(C64::new(t.powi(self.degree()), 0.0)))
    }
}

/// Symbol-level parametrix of `p`, truncated at `depth`.
pub fn parametrix(p: &SymbolExpansion, depth: usize) -> CalcResult<SymbolExpansion> {
    if depth > p.available_depth() {
        return Err(CalcError::DepthUnavailable { requested: depth, available: p.available_depth() });
    }
    p.ellipticity_certificate()?;
    Ok(SymbolExpansion::from_parts(
        p.torus().clone(),
        p.fiber_dim(),
        -p.order(),
        depth,
        false,
        Kind::Parametrix { p: p.clone() },
    ))
}

/// `P^{-k}` at symbol level: a parametrix power for `k > 0`, repeated
/// composition of `p` for `k < 0`, the identity for `k = 0`.
pub fn power_expansion(p: &SymbolExpansion, k: i32, depth: usize) -> CalcResult<SymbolExpansion> {
    if depth > p.available_depth() {
        return Err(CalcError::DepthUnavailable { requested: depth, available: p.available_depth() });
    }
    if k == 0 {
        return Ok(SymbolExpansion::identity(p.torus().clone(), p.fiber_dim()));
    }
    let base = if k > 0 { parametrix(p, depth)? } else { p.clone() };
    let mut acc = base.clone();
    for _ in 1..k.unsigned_abs() {
        acc = compose(&acc, &base, depth)?;
    }
    Ok(acc)
}

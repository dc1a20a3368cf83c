//! Classical matrix-valued symbols on flat tori.
//!
//! A [`SymbolExpansion`] is an immutable node in a small expression graph:
//! explicit term lists at the leaves, and composition, parametrices and
//! sectorial projections as interior nodes. Evaluation at a covector `xi`
//! returns, per homogeneous component, a finite Fourier series in `x` whose
//! coefficients are Taylor jets in `xi`. Composition accepts any finite set
//! of Fourier modes; wherever a resolvent is formed the principal symbol
//! must be independent of `x`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::cmat::{ComplexMatrix, C64, I, ONE};
use crate::error::{CalcError, CalcResult};
use crate::jet::{multi_factorial, multi_order, shape, Jet, Multi, MAX_JET_ORDER, MAX_VARS};
use crate::sectorial::ProjectionData;
use crate::sphere::scan_points;
use crate::torus::{FJet, Freq, Torus, ZERO_FREQ};

/// Tolerance used by [`odd_class_check`] and related parity checks.
pub const PARITY_TOL: f64 = 1e-10;
/// Samples per angular axis of the ellipticity scan.
pub const SCAN_RESOLUTION: usize = 64;
/// Minimum singular value accepted by the ellipticity certificate.
pub const ELLIPTIC_FLOOR: f64 = 1e-6;

/// One term `coeff * e^{i k.x} * xi^beta * |xi|^p` of an explicit component.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTerm {
    pub freq: Freq,
    pub xi_pow: Multi,
    pub norm_pow: i32,
    pub coeff: ComplexMatrix,
}

impl SymbolTerm {
    pub fn new(coeff: ComplexMatrix) -> Self {
        Self { freq: ZERO_FREQ, xi_pow: [0; MAX_VARS], norm_pow: 0, coeff }
    }

    pub fn xi(mut self, pow: Multi) -> Self {
        self.xi_pow = pow;
        self
    }

    pub fn norm(mut self, p: i32) -> Self {
        self.norm_pow = p;
        self
    }

    pub fn freq(mut self, k: Freq) -> Self {
        self.freq = k;
        self
    }

    pub fn degree(&self) -> i32 {
        multi_order(&self.xi_pow) as i32 + self.norm_pow
    }
}

/// Unit multi-index along axis `i`.
pub fn unit(i: usize) -> Multi {
    let mut m = [0u8; MAX_VARS];
    m[i] = 1;
    m
}

pub(crate) enum Kind {
    Explicit(Vec<Vec<SymbolTerm>>),
    Identity,
    Compose { a: SymbolExpansion, b: SymbolExpansion, phase: C64 },
    Parametrix { p: SymbolExpansion },
    Projection(Box<ProjectionData>),
}

pub(crate) struct Inner {
    torus: Torus,
    fiber_dim: usize,
    order: i32,
    depth: usize,
    exact: bool,
    pub(crate) kind: Kind,
    ellipticity: OnceLock<CalcResult<f64>>,
}

/// An asymptotic expansion `a_m + a_{m-1} + ... + a_{m-J}`.
#[derive(Clone)]
pub struct SymbolExpansion(Arc<Inner>);

impl std::fmt::Debug for SymbolExpansion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.0.kind {
            Kind::Explicit(_) => "explicit",
            Kind::Identity => "identity",
            Kind::Compose { .. } => "compose",
            Kind::Parametrix { .. } => "parametrix",
            Kind::Projection(_) => "projection",
        };
        f.debug_struct("SymbolExpansion")
            .field("kind", &kind)
            .field("order", &self.0.order)
            .field("depth", &self.0.depth)
            .field("fiber_dim", &self.0.fiber_dim)
            .field("n", &self.0.torus.dim())
            .finish()
    }
}

/// Per-evaluation memo keyed by node identity, so shared subgraphs such as
/// `b # b` are evaluated once per fiber.
#[derive(Default)]
pub struct EvalCache {
    map: HashMap<usize, Vec<Option<FJet>>>,
}

impl EvalCache {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SymbolExpansion {
    pub(crate) fn from_parts(torus: Torus, fiber_dim: usize, order: i32, depth: usize, exact: bool, kind: Kind) -> Self {
        Self(Arc::new(Inner { torus, fiber_dim, order, depth, exact, kind, ellipticity: OnceLock::new() }))
    }

    /// Builds an expansion from explicit term lists, `components[j]` holding
    /// the terms of degree `order - j`. Components past the list are zero.
    pub fn explicit(torus: Torus, fiber_dim: usize, order: i32, components: Vec<Vec<SymbolTerm>>) -> CalcResult<Self> {
        let n = torus.dim();
        for (j, comp) in components.iter().enumerate() {
            for t in comp {
                if t.coeff.dim() != fiber_dim {
                    return Err(CalcError::Mismatch(format!("term in component {j} has fiber dimension {}", t.coeff.dim())));
                }
                if t.degree() != order - j as i32 {
                    return Err(CalcError::Mismatch(format!(
                        "term in component {j} has degree {}, expected {}",
                        t.degree(),
                        order - j as i32
                    )));
                }
                if t.xi_pow[n..].iter().any(|&e| e != 0) || t.freq[n..].iter().any(|&k| k != 0) {
                    return Err(CalcError::Mismatch(format!("term in component {j} uses more than {n} variables")));
                }
            }
        }
        let depth = components.len().saturating_sub(1);
        Ok(Self::from_parts(torus, fiber_dim, order, depth, true, Kind::Explicit(components)))
    }

    pub fn identity(torus: Torus, fiber_dim: usize) -> Self {
        Self::from_parts(torus, fiber_dim, 0, 0, true, Kind::Identity)
    }

    pub fn torus(&self) -> &Torus {
        &self.0.torus
    }

    pub fn n(&self) -> usize {
        self.0.torus.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.0.fiber_dim
    }

    pub fn order(&self) -> i32 {
        self.0.order
    }

    /// Truncation depth `J`; for exact expansions the number of stored
    /// components minus one.
    pub fn depth(&self) -> usize {
        self.0.depth
    }

    /// Exact expansions have every component available, zero past `depth`.
    pub fn is_exact(&self) -> bool {
        self.0.exact
    }

    pub fn available_depth(&self) -> usize {
        if self.0.exact {
            usize::MAX
        } else {
            self.0.depth
        }
    }

    pub fn same_node(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn component(&self, j: usize) -> HomogeneousComponent {
        HomogeneousComponent { expansion: self.clone(), index: j, alpha_x: [0; MAX_VARS], alpha_xi: [0; MAX_VARS] }
    }

    /// `true` if the expansion is a finite list of polynomial-in-`xi` terms.
    pub fn is_differential(&self) -> bool {
        match &self.0.kind {
            Kind::Explicit(c) => c.iter().flatten().all(|t| t.norm_pow == 0),
            Kind::Identity => true,
            Kind::Compose { a, b, .. } => a.is_differential() && b.is_differential(),
            _ => false,
        }
    }

    /// Jets of components `0..orders.len()` at the covector `xi`; `orders[j]`
    /// is the Taylor order wanted for component `j`, `None` skips it.
    pub fn eval_jets(&self, xi: &[f64], orders: &[Option<usize>], cache: &mut EvalCache) -> CalcResult<Vec<FJet>> {
        let n = self.n();
        assert_eq!(xi.len(), n, "covector dimension mismatch");
        if let Some(k) = orders.iter().flatten().copied().max() {
            if k > MAX_JET_ORDER {
                return Err(CalcError::OrderExceeded { requested: k, max: MAX_JET_ORDER });
            }
        }
        let key = Arc::as_ptr(&self.0) as usize;
        let mut want: Vec<Option<usize>> = orders.to_vec();
        if let Some(prev) = cache.map.get(&key) {
            let covered = want.iter().enumerate().all(|(j, o)| match o {
                None => true,
                Some(k) => prev.get(j).and_then(|p| p.as_ref()).is_some_and(|p| p.order() >= *k),
            });
            if covered {
                return Ok(want
                    .iter()
                    .enumerate()
                    .map(|(j, o)| match o {
                        None => FJet::zero(n, 0, self.fiber_dim()),
                        Some(k) => prev[j].as_ref().unwrap().truncate(*k),
                    })
                    .collect());
            }
            // widen the request so the cache keeps the larger evaluation
            if want.len() < prev.len() {
                want.resize(prev.len(), None);
            }
            for (j, p) in prev.iter().enumerate() {
                if let Some(p) = p {
                    want[j] = Some(want[j].map_or(p.order(), |k| k.max(p.order())));
                }
            }
        }
        let fresh = self.eval_uncached(xi, &want, cache)?;
        let stored: Vec<Option<FJet>> =
            fresh.iter().zip(&want).map(|(f, o)| o.map(|_| f.clone())).collect();
        let out = orders
            .iter()
            .enumerate()
            .map(|(j, o)| match o {
                None => FJet::zero(n, 0, self.fiber_dim()),
                Some(k) => fresh[j].truncate(*k),
            })
            .collect();
        cache.map.insert(key, stored);
        Ok(out)
    }

    fn eval_uncached(&self, xi: &[f64], orders: &[Option<usize>], cache: &mut EvalCache) -> CalcResult<Vec<FJet>> {
        let n = self.n();
        let r = self.fiber_dim();
        let beyond = |j: usize| !self.0.exact && j > self.0.depth;
        let mut out: Vec<FJet> = Vec::with_capacity(orders.len());
        match &self.0.kind {
            Kind::Explicit(comps) => {
                let vars = VarJets::new(xi, orders.iter().flatten().copied().max().unwrap_or(0));
                for (j, o) in orders.iter().enumerate() {
                    let Some(k) = *o else {
                        out.push(FJet::zero(n, 0, r));
                        continue;
                    };
                    let mut f = FJet::zero(n, k, r);
                    if let Some(terms) = comps.get(j) {
                        for t in terms {
                            let scalar = vars.monomial(&t.xi_pow, t.norm_pow, k);
                            let mut single = FJet::from_mode(t.freq, scalar.scalar_times(&t.coeff));
                            single = single.truncate(k);
                            f.add_scaled(ONE, &single);
                        }
                    }
                    out.push(f);
                }
            }
            Kind::Identity => {
                for (j, o) in orders.iter().enumerate() {
                    let k = o.unwrap_or(0);
                    if j == 0 && o.is_some() {
                        out.push(FJet::from_mode(ZERO_FREQ, Jet::constant(&ComplexMatrix::identity(r), n, k)));
                    } else {
                        out.push(FJet::zero(n, k, r));
                    }
                }
            }
            Kind::Compose { a, b, phase } => {
                let l_max = orders.len();
                let mut a_req: Vec<Option<usize>> = vec![None; l_max];
                let mut b_req: Vec<Option<usize>> = vec![None; l_max];
                for (l, o) in orders.iter().enumerate() {
                    let Some(kl) = *o else { continue };
                    if beyond(l) {
                        continue;
                    }
                    for j in 0..=l {
                        let need = kl + (l - j);
                        a_req[j] = Some(a_req[j].map_or(need, |x| x.max(need)));
                        b_req[j] = Some(b_req[j].map_or(kl, |x| x.max(kl)));
                    }
                }
                let aj = a.eval_jets(xi, &a_req, cache)?;
                let bj = b.eval_jets(xi, &b_req, cache)?;
                let sh = shape(n);
                let c = phase * I;
                for (l, o) in orders.iter().enumerate() {
                    let Some(kl) = *o else {
                        out.push(FJet::zero(n, 0, r));
                        continue;
                    };
                    let mut f = FJet::zero(n, kl, r);
                    if beyond(l) {
                        out.push(f);
                        continue;
                    }
                    for j in 0..=l {
                        if aj[j].modes.is_empty() {
                            continue;
                        }
                        for k in 0..=(l - j) {
                            if bj[k].modes.is_empty() {
                                continue;
                            }
                            let s = l - j - k;
                            for g in sh.deg_start[s]..sh.deg_start[s + 1] {
                                let alpha = sh.monos[g];
                                let db = if s == 0 { bj[k].clone() } else { bj[k].deriv_x(a.torus(), &alpha, c) };
                                if db.modes.is_empty() {
                                    continue;
                                }
                                let da = if s == 0 { aj[j].truncate(kl) } else { aj[j].deriv_xi(&alpha).truncate(kl) };
                                let w = C64::new(1.0 / multi_factorial(&alpha), 0.0);
                                let prod = FJet::mul(&da, &db.truncate(kl), kl);
                                f.add_scaled(w, &prod);
                            }
                        }
                    }
                    out.push(f);
                }
            }
            Kind::Parametrix { p } => {
                out = crate::resolvent::eval_parametrix(p, xi, orders, self.0.depth, cache)?;
            }
            Kind::Projection(data) => {
                out = crate::sectorial::eval_projection(data, xi, orders, self.0.depth, cache)?;
            }
        }
        Ok(out)
    }

    /// Value of the principal symbol at `xi`; errors if it depends on `x`.
    pub fn principal_at(&self, xi: &[f64]) -> CalcResult<ComplexMatrix> {
        let mut cache = EvalCache::new();
        let f = self.eval_jets(xi, &[Some(0)], &mut cache)?;
        if f[0].modes.iter().any(|(k, j)| *k != ZERO_FREQ && !j.is_zero()) {
            return Err(CalcError::XDependentPrincipal);
        }
        Ok(f[0].mode0().map(|j| j.value()).unwrap_or_else(|| ComplexMatrix::zeros(self.fiber_dim())))
    }

    /// Smallest singular value of the principal symbol over a dense
    /// cosphere scan; errors with the worst fiber below [`ELLIPTIC_FLOOR`].
    pub fn ellipticity_certificate(&self) -> CalcResult<f64> {
        self.0
            .ellipticity
            .get_or_init(|| {
                let pts = scan_points(self.n(), SCAN_RESOLUTION);
                let vals: Vec<CalcResult<(f64, usize)>> = pts
                    .par_iter()
                    .enumerate()
                    .map(|(i, xi)| Ok((self.principal_at(xi)?.min_singular_value(), i)))
                    .collect();
                let mut worst = (f64::INFINITY, 0);
                for v in vals {
                    let v = v?;
                    if v.0 < worst.0 {
                        worst = v;
                    }
                }
                if worst.0 < ELLIPTIC_FLOOR {
                    Err(CalcError::NotElliptic { min_singular_value: worst.0, xi: pts[worst.1].clone() })
                } else {
                    Ok(worst.0)
                }
            })
            .clone()
    }
}

/// Scalar coordinate jets around a fixed covector.
struct VarJets {
    vars: Vec<Jet>,
    norm_sq: Jet,
}

impl VarJets {
    fn new(xi: &[f64], order: usize) -> Self {
        let n = xi.len();
        let vars: Vec<Jet> = (0..n).map(|i| Jet::variable(i, xi[i], n, order, 1)).collect();
        let mut norm_sq = Jet::zeros(n, order, 1);
        for v in &vars {
            Jet::mul_acc(&mut norm_sq, v, v);
        }
        Self { vars, norm_sq }
    }

    fn monomial(&self, pow: &Multi, norm_pow: i32, order: usize) -> Jet {
        let n = self.vars.len();
        let mut m = Jet::constant(&ComplexMatrix::identity(1), n, order);
        for (i, v) in self.vars.iter().enumerate() {
            for _ in 0..pow[i] {
                m = Jet::mul(&m, v, order);
            }
        }
        if norm_pow != 0 {
            let p = self.norm_sq.truncate(order).scalar_powf(norm_pow as f64 / 2.0);
            m = Jet::mul(&m, &p, order);
        }
        m
    }
}

/// Component `index` of an expansion, optionally differentiated.
#[derive(Clone, Debug)]
pub struct HomogeneousComponent {
    pub expansion: SymbolExpansion,
    pub index: usize,
    pub alpha_x: Multi,
    pub alpha_xi: Multi,
}

impl HomogeneousComponent {
    pub fn degree(&self) -> i32 {
        self.expansion.order() - self.index as i32 - multi_order(&self.alpha_xi) as i32
    }

    pub fn fiber_dim(&self) -> usize {
        self.expansion.fiber_dim()
    }

    pub fn derive(&self, alpha_x: Multi, alpha_xi: Multi) -> CalcResult<Self> {
        let mut out = self.clone();
        for i in 0..MAX_VARS {
            out.alpha_x[i] += alpha_x[i];
            out.alpha_xi[i] += alpha_xi[i];
        }
        let total = multi_order(&out.alpha_xi);
        if total > MAX_JET_ORDER {
            return Err(CalcError::OrderExceeded { requested: total, max: MAX_JET_ORDER });
        }
        Ok(out)
    }

    /// Fourier coefficients in `x` at the covector `xi`, evaluated directly
    /// (no normalization to the unit sphere).
    pub fn fourier_raw(&self, xi: &[f64]) -> CalcResult<FJet> {
        let k = multi_order(&self.alpha_xi);
        let mut orders = vec![None; self.index + 1];
        orders[self.index] = Some(k);
        let mut cache = EvalCache::new();
        let f = self.expansion.eval_jets(xi, &orders, &mut cache)?.swap_remove(self.index);
        let f = if k > 0 { f.deriv_xi(&self.alpha_xi) } else { f };
        let f = if multi_order(&self.alpha_x) > 0 { f.deriv_x(self.expansion.torus(), &self.alpha_x, I) } else { f };
        Ok(f.truncate(0))
    }

    /// Value at `(x, xi)` computed at `xi` itself.
    pub fn eval_raw(&self, x: &[f64], xi: &[f64]) -> CalcResult<ComplexMatrix> {
        Ok(self.fourier_raw(xi)?.value_at(self.expansion.torus(), x))
    }

    /// Value at `(x, xi)` via the unit covector, scaled by `|xi|^degree`.
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> CalcResult<ComplexMatrix> {
        let t = norm(xi);
        assert!(t > 0.0, "covector must be nonzero");
        let unit: Vec<f64> = xi.iter().map(|v| v / t).collect();
        Ok(self.eval_raw(x, &unit)?.scale(C64::new(t.powi(self.degree()), 0.0)))
    }
}

pub fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Asymptotic product `a # b` truncated at `depth`.
pub fn compose(a: &SymbolExpansion, b: &SymbolExpansion, depth: usize) -> CalcResult<SymbolExpansion> {
    compose_with_phase(a, b, depth, -I)
}

/// Composition with the derivative phase made explicit; the standard
/// product uses `-i`. Other values exist only as a mutation fixture.
#[doc(hidden)]
pub fn compose_with_phase(
    a: &SymbolExpansion,
    b: &SymbolExpansion,
    depth: usize,
    phase: C64,
) -> CalcResult<SymbolExpansion> {
    if a.torus() != b.torus() {
        return Err(CalcError::Mismatch("operands live on different tori".into()));
    }
    if a.fiber_dim() != b.fiber_dim() {
        return Err(CalcError::Mismatch("operands have different fiber dimensions".into()));
    }
    let available = a.available_depth().min(b.available_depth());
    if depth > available {
        return Err(CalcError::DepthUnavailable { requested: depth, available });
    }
    Ok(SymbolExpansion::from_parts(
        a.torus().clone(),
        a.fiber_dim(),
        a.order() + b.order(),
        depth,
        false,
        Kind::Compose { a: a.clone(), b: b.clone(), phase },
    ))
}

/// Outcome of [`odd_class_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParityReport {
    pub holds: bool,
    pub max_violation: f64,
    /// Worst violation per component index.
    pub per_component: Vec<f64>,
}

/// Tests `a_{m-j}(x,-xi) = (-1)^{m-j} a_{m-j}(x,xi)` on a cosphere scan. The
/// violation at a covector is the sum over Fourier modes of the coefficient
/// mismatch, which bounds the mismatch at every `x`.
pub fn odd_class_check(a: &SymbolExpansion) -> CalcResult<ParityReport> {
    let n = a.n();
    let samples = scan_points(n, if n <= 2 { 32 } else { 8 });
    let depth = a.depth();
    let rows: Vec<CalcResult<Vec<f64>>> = samples
        .par_iter()
        .map(|xi| {
            let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
            let orders = vec![Some(0); depth + 1];
            let plus = a.eval_jets(xi, &orders, &mut EvalCache::new())?;
            let minus = a.eval_jets(&neg, &orders, &mut EvalCache::new())?;
            Ok((0..=depth)
                .map(|j| {
                    let sign = if (a.order() - j as i32).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    let mut d = minus[j].clone();
                    d.add_scaled(C64::new(-sign, 0.0), &plus[j]);
                    d.modes.values().map(|m| m.value().norm_max()).sum::<f64>()
                })
                .collect())
        })
        .collect();
    let mut per_component = vec![0.0f64; depth + 1];
    for row in rows {
        for (p, v) in per_component.iter_mut().zip(row?) {
            *p = p.max(v);
        }
    }
    let max_violation = per_component.iter().copied().fold(0.0, f64::max);
    Ok(ParityReport { holds: max_violation <= PARITY_TOL, max_violation, per_component })
}

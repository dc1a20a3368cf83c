//! Seeded property suite spanning every engine module.
//!
//! Each suite returns rows of a pass/fail table. Randomized suites draw
//! from their own ChaCha stream of the user seed, so adding a suite never
//! changes the draws of another.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use specasym_core::battery::{self, TestOperator};
use specasym_core::cmat::{ComplexMatrix, C64, I, ONE};
use specasym_core::contour::CutPair;
use specasym_core::dirac::{
    dirac_asymmetry, dirac_symbol, leading_gap, lichnerowicz_square, sphere_constant_check, CliffordData,
};
use specasym_core::residue::{
    eta_residue, local_gap_density, positivity_check, projection_residue, required_depth, zeta_gap,
};
use specasym_core::resolvent::{parametrix, resolvent_expansion};
use specasym_core::sectorial::projection_expansion;
use specasym_core::spectral::{
    eigen_oracle, matrix_complex_power, oracle_function, oracle_sum, sectorial_projection_matrix, KernelConfig,
};
use specasym_core::symbol::{compose, compose_with_phase, odd_class_check, unit, SymbolExpansion, SymbolTerm};
use specasym_core::torus::Torus;
use specasym_core::CalcResult;

use crate::error::CliError;
use crate::oracle::{apply_symbol, apply_terms, trig_dist, Trig};
use crate::random::{cx, random_matrix, random_unitary, real_spectrum, rng, similar_to_diag, spread_spectrum};
use crate::report::{Check, ExperimentReport, VerifySettings};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn name(&self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Ctx {
    pub seed: u64,
    pub level: Level,
    /// Composition phase `+i` instead of `-i`; a mutation fixture that the
    /// Leibniz suite must catch.
    pub flip_composition_phase: bool,
}

impl Ctx {
    pub fn new(seed: u64, level: Level) -> Self {
        Self { seed, level, flip_composition_phase: false }
    }

    fn full(&self) -> bool {
        self.level == Level::Full
    }

    fn pick<T>(&self, quick: T, full: T) -> T {
        if self.full() {
            full
        } else {
            quick
        }
    }

    fn compose(&self, a: &SymbolExpansion, b: &SymbolExpansion, depth: usize) -> CalcResult<SymbolExpansion> {
        if self.flip_composition_phase {
            compose_with_phase(a, b, depth, I)
        } else {
            compose(a, b, depth)
        }
    }
}

const MATRIX: &str = "matrix-spectral-kernel";
const SYMBOL: &str = "symbol-core";
const RESOLVENT: &str = "resolvent-parametrix";
const SECTORIAL: &str = "sectorial-projection";
const RESIDUE: &str = "residue-asymmetry";
const DIRAC: &str = "dirac-geometry";

pub type Suite = fn(&Ctx) -> Vec<Check>;

/// All suites in report order, with the acceptance criterion they carry.
pub fn suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("matrix-oracle", matrix_oracle),
        ("matrix-identities", matrix_identities),
        ("selfadjoint-powers", selfadjoint_powers),
        ("leibniz", leibniz),
        ("resolvent", resolvent_suite),
        ("projection-symbols", projection_symbols),
        ("cut-independence", cut_independence),
        ("local-gap", local_gap),
        ("projection-residue", projection_residues),
        ("positivity", positivity),
        ("dirac", dirac_suite),
        ("eta", eta_suite),
    ]
}

pub fn verify(ctx: &Ctx) -> ExperimentReport {
    let mut report = ExperimentReport::new();
    report.verify = Some(VerifySettings { seed: ctx.seed, level: ctx.level.name().into() });
    for (_, suite) in suites() {
        report.checks.extend(suite(ctx));
    }
    report.pass = report.checks.iter().all(|c| c.pass);
    report
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// Runs `f`, turning a computation error into a failed row.
fn guarded(module: &str, property: impl Into<String>, criterion: Option<u8>, tol: f64, f: impl FnOnce() -> Result<f64, CliError>) -> Check {
    match f() {
        Ok(m) => Check::at_most(module, property, criterion, m, tol),
        Err(e) => Check::failed(module, property, criterion, tol, &e),
    }
}

fn try_max<T: Send>(items: Vec<T>, f: impl Fn(T) -> Result<f64, CliError> + Sync + Send) -> Result<f64, CliError> {
    let out: Vec<Result<f64, CliError>> = items.into_par_iter().map(f).collect();
    let mut worst = 0.0f64;
    for v in out {
        worst = worst.max(v?);
    }
    Ok(worst)
}

fn random_cuts(r: &mut ChaCha8Rng) -> CutPair {
    let t0 = r.gen_range(0.0..TAU);
    CutPair::normalized(t0, t0 + r.gen_range(0.4..5.5)).expect("width below 2 pi")
}

fn matrix_oracle(ctx: &Ctx) -> Vec<Check> {
    let mut r = rng(ctx.seed, 1);
    let trials = ctx.pick(25, 100);
    let cases: Vec<(ComplexMatrix, CutPair)> = (0..trials)
        .map(|_| {
            let n = r.gen_range(1..=8);
            let cuts = random_cuts(&mut r);
            let vals = spread_spectrum(&mut r, n, &[cuts], 0.1);
            (similar_to_diag(&mut r, &vals), cuts)
        })
        .collect();
    let cfg = KernelConfig::default();
    let results: Vec<Result<(f64, f64), CliError>> = cases
        .par_iter()
        .map(|(a, cuts)| {
            let p = sectorial_projection_matrix(a, cuts, &cfg)?;
            let cl = eigen_oracle(a, &cfg)?;
            let expect = oracle_sum(&cl, a.dim(), |z| cuts.contains(z));
            Ok((p.dist(&expect), (&p * &p).dist(&p)))
        })
        .collect();
    let mut oracle = 0.0f64;
    let mut idem = 0.0f64;
    for res in results {
        match res {
            Ok((a, b)) => {
                oracle = oracle.max(a);
                idem = idem.max(b);
            }
            Err(e) => return vec![Check::failed(MATRIX, "sectorial projection = oracle root-space sum", Some(1), 1e-10, &e)],
        }
    }
    vec![
        Check::at_most(MATRIX, "sectorial projection = oracle root-space sum", Some(1), oracle, 1e-10)
            .detail(format!("{trials} random matrices, dim <= 8")),
        Check::at_most(MATRIX, "sectorial projection is idempotent", None, idem, 1e-10),
    ]
}

fn matrix_identities(ctx: &Ctx) -> Vec<Check> {
    let cfg = KernelConfig::default();
    let mut r = rng(ctx.seed, 2);
    let trials = ctx.pick(5, 20);
    let cases: Vec<(ComplexMatrix, CutPair)> = (0..trials)
        .map(|_| {
            let n = r.gen_range(2..=7);
            let cuts = random_cuts(&mut r);
            let mut vals = spread_spectrum(&mut r, n - 1, &[cuts], 0.1);
            vals.push(C64::new(0.0, 0.0));
            (similar_to_diag(&mut r, &vals), cuts)
        })
        .collect();
    let split = cases
        .par_iter()
        .map(|(a, cuts)| -> Result<(f64, f64), CliError> {
            let n = a.dim();
            let p = sectorial_projection_matrix(a, cuts, &cfg)?;
            let q = sectorial_projection_matrix(a, &cuts.complement(), &cfg)?;
            let p0 = oracle_sum(&eigen_oracle(a, &cfg)?, n, |z| z.norm() < 1e-6);
            let disjoint = (&p * &q).norm_max().max((&q * &p).norm_max());
            let sum = (&p + &q).dist(&(&ComplexMatrix::identity(n) - &p0));
            Ok((disjoint, sum))
        })
        .collect::<Vec<_>>();
    let mut checks = Vec::new();
    match split.into_iter().collect::<Result<Vec<_>, _>>() {
        Ok(v) => {
            checks.push(Check::at_most(MATRIX, "complementary sectors are disjoint", Some(2), max_of(v.iter().map(|x| x.0)), 1e-9));
            checks.push(Check::at_most(MATRIX, "complementary sectors sum to 1 - Pi_0", Some(2), max_of(v.iter().map(|x| x.1)), 1e-9));
        }
        Err(e) => checks.push(Check::failed(MATRIX, "complementary sectors", Some(2), 1e-9, &e)),
    }

    let count = ctx.pick(5, 20);
    let cases: Vec<(ComplexMatrix, CutPair, C64)> = (0..count)
        .map(|_| {
            let n = r.gen_range(3..=6);
            let cuts = random_cuts(&mut r);
            let vals = spread_spectrum(&mut r, n, &[cuts], 0.1);
            let s = C64::new(r.gen_range(-2.0..-0.05), r.gen_range(-1.0..1.0));
            (similar_to_diag(&mut r, &vals), cuts, s)
        })
        .collect();
    checks.push(guarded(MATRIX, "P_t^s - P_t'^s = (1 - e^{2 i pi s}) Pi P_t^s", Some(2), 1e-9, || {
        try_max(cases, |(a, cuts, s)| {
            let pt = matrix_complex_power(&a, s, cuts.theta, &cfg)?;
            let ptp = matrix_complex_power(&a, s, cuts.theta_prime, &cfg)?;
            let pi = sectorial_projection_matrix(&a, &cuts, &cfg)?;
            let rhs = (&pi * &pt).scale(ONE - (C64::new(0.0, TAU) * s).exp());
            Ok((&pt - &ptp).dist(&rhs) / pt.norm_max().max(1.0))
        })
    }));
    checks
}

fn selfadjoint_powers(ctx: &Ctx) -> Vec<Check> {
    let cfg = KernelConfig::default();
    let mut r = rng(ctx.seed, 3);
    let cases: Vec<(ComplexMatrix, Vec<C64>)> = (0..ctx.pick(3, 10))
        .map(|_| {
            let n = r.gen_range(2..=6);
            let vals = real_spectrum(&mut r, n);
            let u = random_unitary(&mut r, n);
            let a = &(&u * &ComplexMatrix::diag(&vals)) * &u.adjoint();
            let s = (0..3).map(|_| C64::new(r.gen_range(-2.0..-0.05), r.gen_range(-1.0..1.0))).collect();
            (a, s)
        })
        .collect();
    let right = CutPair::normalized(-PI / 2.0, PI / 2.0).expect("half plane");
    vec![guarded(MATRIX, "P^s = Pi_+ |P|^s + e^{-i pi s} Pi_- |P|^s", Some(3), 1e-9, || {
        try_max(cases, |(a, ss)| {
            let n = a.dim();
            let plus = sectorial_projection_matrix(&a, &right, &cfg)?;
            let minus = sectorial_projection_matrix(&a, &CutPair::up_down(), &cfg)?;
            let cl = eigen_oracle(&a, &cfg)?;
            let mut worst = 0.0f64;
            for s in ss {
                let lhs = matrix_complex_power(&a, s, PI / 2.0, &cfg)?;
                let abs = oracle_function(&cl, n, |z| C64::new(z.norm(), 0.0).powc(s));
                let rhs = &(&plus * &abs) + &(&minus * &abs).scale((C64::new(0.0, -PI) * s).exp());
                worst = worst.max(lhs.dist(&rhs) / lhs.norm_max().max(1.0));
            }
            Ok(worst)
        })
    })]
}

/// Covectors on the unit sphere for pointwise symbol comparisons.
fn xi_samples(n: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..5).map(|k| vec![(0.3 + 1.1 * k as f64).cos(), (0.3 + 1.1 * k as f64).sin()]).collect(),
        _ => vec![vec![0.48, 0.6, 0.64], vec![-0.36, 0.48, -0.8], vec![0.0, -0.6, 0.8], vec![0.8, 0.0, -0.6]],
    }
}

fn x_samples(n: usize) -> Vec<Vec<f64>> {
    vec![vec![0.3; n], (0..n).map(|i| 1.7 - 0.9 * i as f64).collect()]
}

fn component_distance(a: &SymbolExpansion, b: &SymbolExpansion, depth: usize) -> CalcResult<f64> {
    let n = a.n();
    let mut worst = 0.0f64;
    for j in 0..=depth {
        for xi in xi_samples(n) {
            for x in x_samples(n) {
                worst = worst.max(a.component(j).eval(&x, &xi)?.dist(&b.component(j).eval(&x, &xi)?));
            }
        }
    }
    Ok(worst)
}

/// Random scalar polynomial symbol of order `order` on `T^2`.
type Terms = Vec<Vec<SymbolTerm>>;

fn random_poly_terms(r: &mut ChaCha8Rng, order: usize) -> Terms {
    (0..=order)
        .map(|j| {
            (0..3)
                .map(|_| {
                    let mut p = [0u8; 4];
                    for _ in 0..order - j {
                        p[r.gen_range(0..2)] += 1;
                    }
                    let f = [r.gen_range(-2..=2), r.gen_range(-2..=2), 0, 0];
                    SymbolTerm::new(ComplexMatrix::scalar(1, cx(r, 1.0))).xi(p).freq(f)
                })
                .collect()
        })
        .collect()
}

/// Random 2x2 order-1 symbol with x-dependent, partly non-polynomial terms.
fn random_matrix_symbol(r: &mut ChaCha8Rng) -> SymbolExpansion {
    let mut r = ChaCha8Rng::seed_from_u64(r.gen());
    let mut m = || random_matrix(&mut r, 2);
    let (a, b, c, d, e) = (m(), m(), m(), m(), m());
    let comps = vec![
        vec![SymbolTerm::new(a).xi(unit(0)).freq([1, 0, 0, 0]), SymbolTerm::new(b).xi(unit(1))],
        vec![SymbolTerm::new(c).freq([0, -1, 0, 0]), SymbolTerm::new(d).xi(unit(0)).norm(-1).freq([1, 1, 0, 0])],
        vec![SymbolTerm::new(e).xi([1, 1, 0, 0]).norm(-3).freq([-1, 0, 0, 0])],
    ];
    SymbolExpansion::explicit(Torus::standard(2), 2, 1, comps).expect("well-formed symbol")
}

/// First-order Leibniz term `a_0 b_1 + a_1 b_0 - i sum d_xi a_0 d_x b_0`.
fn leibniz_first_order(a: &SymbolExpansion, b: &SymbolExpansion, x: &[f64], xi: &[f64]) -> CalcResult<ComplexMatrix> {
    let mut out = &(&a.component(0).eval(x, xi)? * &b.component(1).eval(x, xi)?)
        + &(&a.component(1).eval(x, xi)? * &b.component(0).eval(x, xi)?);
    for i in 0..2 {
        let da = a.component(0).derive([0; 4], unit(i))?.eval(x, xi)?;
        let db = b.component(0).derive(unit(i), [0; 4])?.eval(x, xi)?;
        out += &(&da * &db).scale(-I);
    }
    Ok(out)
}

fn leibniz(ctx: &Ctx) -> Vec<Check> {
    let mut r = rng(ctx.seed, 4);
    let t = Torus::standard(2);
    let trials = ctx.pick(4, 10);
    let apps: Vec<(Terms, Terms, Trig)> = (0..trials)
        .map(|_| {
            let a = random_poly_terms(&mut r, 2);
            let b = random_poly_terms(&mut r, 2);
            let u = (0..4).map(|_| ([r.gen_range(-3..=3), r.gen_range(-3..=3), 0, 0], cx(&mut r, 1.0))).collect();
            (a, b, u)
        })
        .collect();
    let mut checks = vec![guarded(SYMBOL, "composition = operator application", None, 1e-10, || {
        let mut worst = 0.0f64;
        for (at, bt, u) in &apps {
            let a = SymbolExpansion::explicit(t.clone(), 1, 2, at.clone())?;
            let b = SymbolExpansion::explicit(t.clone(), 1, 2, bt.clone())?;
            let direct = apply_terms(at, &apply_terms(bt, u));
            let via = apply_symbol(&ctx.compose(&a, &b, 4)?, 4, u)?;
            worst = worst.max(trig_dist(&direct, &via));
        }
        Ok(worst)
    })];
    let pairs: Vec<(SymbolExpansion, SymbolExpansion)> =
        (0..trials).map(|_| (random_matrix_symbol(&mut r), random_matrix_symbol(&mut r))).collect();
    checks.push(guarded(SYMBOL, "Leibniz consistency of the first-order term", None, 1e-10, || {
        let mut worst = 0.0f64;
        for (a, b) in &pairs {
            let ab = ctx.compose(a, b, 2)?;
            for (x, xi) in [([0.5, -1.3], [0.8, -0.6]), ([2.1, 0.4], [-0.28, 0.96])] {
                worst = worst.max(ab.component(1).eval(&x, &xi)?.dist(&leibniz_first_order(a, b, &x, &xi)?));
            }
        }
        Ok(worst)
    }));
    checks.push(guarded(SYMBOL, "composition is associative", None, 1e-9, || {
        let mut worst = 0.0f64;
        for w in pairs.windows(2) {
            let (a, b, c) = (&w[0].0, &w[0].1, &w[1].0);
            let left = ctx.compose(&ctx.compose(a, b, 3)?, c, 3)?;
            let right = ctx.compose(a, &ctx.compose(b, c, 3)?, 3)?;
            worst = worst.max(component_distance(&left, &right, 3)?);
        }
        Ok(worst)
    }));
    checks
}

fn odd_class_battery() -> Vec<TestOperator> {
    vec![
        battery::scalar_laplace_t2(),
        battery::dirac_potential_t2(),
        battery::non_selfadjoint_t2(),
        battery::non_selfadjoint_t3(),
        battery::selfadjoint_t3(),
    ]
}

/// `q_j(x, -xi, (-1)^m lambda) = (-1)^{-m-j} q_j(x, xi, lambda)`.
fn resolvent_parity(op: &TestOperator, depth: usize) -> CalcResult<f64> {
    let p = &op.symbol;
    let m = p.order();
    let r = resolvent_expansion(p, depth)?;
    let n = p.n();
    let mut worst = 0.0f64;
    for lam in [C64::new(0.5, 1.3), C64::new(-1.1, -0.4)] {
        let lam_neg = if m % 2 == 0 { lam } else { -lam };
        for j in 0..=depth {
            let sign = if (m + j as i32) % 2 == 0 { 1.0 } else { -1.0 };
            for xi in xi_samples(n) {
                let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
                for x in x_samples(n) {
                    let a = r.component(j).eval(&x, &neg, lam_neg)?;
                    let b = r.component(j).eval(&x, &xi, lam)?.scale(C64::new(sign, 0.0));
                    worst = worst.max(a.dist(&b));
                }
            }
        }
    }
    Ok(worst)
}

fn resolvent_suite(ctx: &Ctx) -> Vec<Check> {
    let depth = ctx.pick(3, 4);
    let ops = odd_class_battery();
    vec![
        guarded(RESOLVENT, "resolvent parity on the odd-class battery", Some(5), 1e-9, || {
            try_max(ops.clone(), |op| Ok(resolvent_parity(&op, depth)?))
        }),
        guarded(RESOLVENT, "p # parametrix = 1", None, 1e-9, || {
            try_max(ops.clone(), |op| {
                let q = parametrix(&op.symbol, depth)?;
                let one = SymbolExpansion::identity(op.symbol.torus().clone(), op.symbol.fiber_dim());
                Ok(component_distance(&ctx.compose(&op.symbol, &q, depth)?, &one, depth)?)
            })
        }),
        guarded(SYMBOL, "parametrix stays odd-class", None, 1e-10, || {
            try_max(ops, |op| Ok(odd_class_check(&parametrix(&op.symbol, depth)?)?.max_violation))
        }),
    ]
}

fn projection_symbols(ctx: &Ctx) -> Vec<Check> {
    let depth = 3;
    let mut cases: Vec<(TestOperator, CutPair)> = Vec::new();
    for op in battery::projection_battery() {
        if !ctx.full() && op.symbol.n() == 3 {
            cases.push((op.clone(), op.cuts[0]));
            continue;
        }
        for c in op.cuts.clone() {
            cases.push((op.clone(), c));
        }
    }
    let cfg = KernelConfig::default();
    vec![
        guarded(SECTORIAL, "pi # pi = pi to depth 3", Some(4), 1e-6, || {
            try_max(cases.clone(), |(op, c)| {
                let pi = projection_expansion(&op.symbol, c, depth)?;
                Ok(component_distance(&compose(&pi, &pi, depth)?, &pi, depth)?)
            })
        }),
        guarded(SECTORIAL, "principal symbol = fiberwise Riesz projection", None, 1e-8, || {
            try_max(cases, |(op, c)| {
                let n = op.symbol.n();
                let pi = projection_expansion(&op.symbol, c, 0)?;
                let mut worst = 0.0f64;
                for xi in xi_samples(n) {
                    let expect = sectorial_projection_matrix(&op.symbol.principal_at(&xi)?, &c, &cfg)?;
                    worst = worst.max(pi.component(0).eval(&x_samples(n)[0], &xi)?.dist(&expect));
                }
                Ok(worst)
            })
        }),
    ]
}

fn cut_independence(ctx: &Ctx) -> Vec<Check> {
    let ks: Vec<i32> = if ctx.full() { (-2..=2).collect() } else { vec![0, 1, 2] };
    let mut checks = Vec::new();
    let mut ops = vec![battery::non_selfadjoint_t3()];
    if ctx.full() {
        ops.push(battery::selfadjoint_t3());
    }
    for op in ops {
        let jobs: Vec<(CutPair, i32)> = op.cuts.iter().flat_map(|c| ks.iter().map(move |&k| (*c, k))).collect();
        let label = format!("{}: |gap| over {} cuts, k in {:?}", op.name, op.cuts.len(), ks);
        checks.push(guarded(RESIDUE, label, Some(6), 1e-7, || {
            try_max(jobs, |(c, k)| Ok(zeta_gap(&op.symbol, c, k, required_depth(&op.symbol, k))?.gap.norm()))
        }));
    }
    checks
}

fn local_gap(ctx: &Ctx) -> Vec<Check> {
    let ks: Vec<i32> = if ctx.full() { vec![-1, 0, 1, 2] } else { vec![0, 2] };
    let mut jobs = Vec::new();
    for op in battery::first_order_t2() {
        for c in op.cuts.clone() {
            for &k in &ks {
                jobs.push((op.clone(), c, k));
            }
        }
    }
    let out: Vec<Result<(f64, f64), CliError>> = jobs
        .par_iter()
        .map(|(op, c, k)| {
            let d = required_depth(&op.symbol, *k);
            let l = local_gap_density(&op.symbol, *c, *k, d)?;
            let g = zeta_gap(&op.symbol, *c, *k, d)?;
            let fp = g.fast_path.map(|f| f.discrepancy).ok_or_else(|| CliError::Computation {
                module: RESIDUE,
                message: format!("{}: fast path does not apply", op.name),
            })?;
            Ok((l.violation, fp))
        })
        .collect();
    let v: Result<Vec<_>, _> = out.into_iter().collect();
    match v {
        Ok(v) => vec![
            Check::at_most(RESIDUE, "2 c_R(x) = c_{P^-k}(x) pointwise", Some(7), max_of(v.iter().map(|x| x.0)), 1e-7)
                .detail(format!("k in {ks:?}")),
            Check::at_most(RESIDUE, "gap = i pi Res P^-k / m", Some(7), max_of(v.iter().map(|x| x.1)), 1e-7),
        ],
        Err(e) => vec![Check::failed(RESIDUE, "local gap identity", Some(7), 1e-7, &e)],
    }
}

fn projection_residues(ctx: &Ctx) -> Vec<Check> {
    let mut jobs = Vec::new();
    for op in battery::projection_battery() {
        let cuts = if ctx.full() || op.symbol.n() == 2 { op.cuts.clone() } else { vec![op.cuts[0]] };
        for c in cuts {
            jobs.push((op.clone(), c));
        }
    }
    vec![guarded(RESIDUE, "Res Pi = 0 across the battery", Some(8), 1e-7, || {
        try_max(jobs, |(op, c)| Ok(projection_residue(&op.symbol, c)?.norm()))
    })]
}

fn positivity(_ctx: &Ctx) -> Vec<Check> {
    let flat = match CliffordData::untwisted(2) {
        Ok(d) => dirac_symbol(&d),
        Err(e) => return vec![Check::failed(RESIDUE, "positivity", Some(9), 1e-6, &CliError::from(e))],
    };
    let want = 4.0 * PI * PI;
    match positivity_check(&flat, 2) {
        Ok(r) => vec![
            Check::at_most(RESIDUE, "(1/i) gap(k=2) = 4 pi^2 for flat Dirac on T^2", Some(9), (r.gap_value - want).abs() / want, 1e-6),
            Check::above(RESIDUE, "(1/i) gap(k=n) strictly positive", Some(9), r.gap_value, r.floor),
            Check::at_most(RESIDUE, "positivity gap = closed form", None, (r.gap_value - r.closed_form).abs() / want, 1e-9),
        ],
        Err(e) => vec![Check::failed(RESIDUE, "positivity", Some(9), 1e-6, &CliError::from(e))],
    }
}

fn dirac_suite(ctx: &Ctx) -> Vec<Check> {
    let mut checks = Vec::new();
    for n in [2usize, 4] {
        checks.push(guarded(DIRAC, format!("(2 pi)^-n |S^(n-1)| = 2 (4 pi)^(-n/2) / Gamma(n/2), n={n}"), Some(10), 1e-12, || {
            let (a, b) = sphere_constant_check(n)?;
            Ok((a - b).abs())
        }));
    }
    let fixtures = [battery::twisted_dirac_t2(), battery::twisted_dirac_t4()];
    for data in &fixtures {
        let n = data.n();
        checks.push(guarded(DIRAC, format!("residue route = closed form at k=n, n={n}"), Some(10), 1e-6, || {
            let lead = leading_gap(data);
            Ok((dirac_asymmetry(data, n as i32)?.residue_route - lead).norm() / lead.norm())
        }));
    }
    let t4 = &fixtures[1];
    match dirac_asymmetry(t4, 2) {
        Ok(a) => {
            checks.push(Check::at_most(DIRAC, "|gap(k=2)| on twisted flat T^4", Some(11), a.residue_route.norm(), 1e-6));
            checks.push(match a.discrepancy {
                Some(d) => Check::at_most(DIRAC, "residue route = heat route (a_1), k=2, n=4", Some(11), d, 1e-6),
                None => Check::failed(DIRAC, "residue route = heat route (a_1), k=2, n=4", Some(11), 1e-6, &CliError::Computation {
                    module: DIRAC,
                    message: a.heat_error.map_or_else(|| "heat route missing".into(), |e| e.to_string()),
                }),
            });
        }
        Err(e) => checks.push(Check::failed(DIRAC, "twisted T^4 at k=2", Some(11), 1e-6, &CliError::from(e))),
    }
    let lich: Vec<&CliffordData> = if ctx.full() { fixtures.iter().collect() } else { vec![&fixtures[0]] };
    checks.push(guarded(DIRAC, "D^2 = connection Laplacian + c(F)", None, 1e-10, || {
        let mut worst = 0.0f64;
        for d in lich {
            worst = worst.max(lichnerowicz_square(d)?.deviation);
        }
        Ok(worst)
    }));
    let odd: Vec<(&CliffordData, i32)> = if ctx.full() {
        vec![(&fixtures[0], 1), (&fixtures[1], 1), (&fixtures[1], 3)]
    } else {
        vec![(&fixtures[0], 1), (&fixtures[1], 3)]
    };
    checks.push(guarded(DIRAC, "odd k: traced residue density of D^-k vanishes", None, 1e-10, || {
        let mut worst = 0.0f64;
        for (d, k) in odd {
            worst = worst.max(dirac_asymmetry(d, k)?.density_bound.unwrap_or(f64::INFINITY));
        }
        Ok(worst)
    }));
    checks
}

fn eta_suite(ctx: &Ctx) -> Vec<Check> {
    let mut jobs: Vec<(TestOperator, i32)> = Vec::new();
    let t2 = battery::dirac_potential_t2();
    let t3 = battery::selfadjoint_t3();
    let (k2, k3): (Vec<i32>, Vec<i32>) =
        if ctx.full() { ((-2..=2).collect(), (-2..=3).collect()) } else { (vec![-1, 0, 1, 2], vec![0, 1, 2]) };
    jobs.extend(k2.iter().map(|&k| (t2.clone(), k)));
    jobs.extend(k3.iter().map(|&k| (t3.clone(), k)));
    vec![guarded(RESIDUE, format!("res eta = 0 for opposite parities, T^2 k in {k2:?}, T^3 k in {k3:?}"), Some(12), 1e-7, || {
        try_max(jobs, |(op, k)| Ok(eta_residue(&op.symbol, k, required_depth(&op.symbol, k))?.value.abs()))
    })]
}

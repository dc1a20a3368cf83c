mod common;

use std::f64::consts::PI;

use common::c;
use proptest::prelude::*;
use specasym_core::battery::{self, pauli, TestOperator};
use specasym_core::cmat::{ComplexMatrix, C64, ONE, ZERO};
use specasym_core::contour::CutPair;
use specasym_core::jet::shape;
use specasym_core::resolvent::{power_expansion, resolvent_expansion, ResolventExpansion};
use specasym_core::sectorial::{projection_expansion, projection_expansion_with, smoothing_check, ProjectionConfig};
use specasym_core::spectral::{sectorial_projection_matrix, KernelConfig};
use specasym_core::symbol::{compose, odd_class_check, unit, SymbolExpansion, SymbolTerm};
use specasym_core::torus::Torus;

fn laplacian() -> SymbolExpansion {
    let one = ComplexMatrix::identity(1);
    let t = vec![SymbolTerm::new(one.clone()).xi([2, 0, 0, 0]), SymbolTerm::new(one).xi([0, 2, 0, 0])];
    SymbolExpansion::explicit(Torus::standard(2), 1, 2, vec![t]).unwrap()
}

fn dirac2() -> SymbolExpansion {
    let s = pauli();
    let t = vec![SymbolTerm::new(s[0].clone()).xi(unit(0)), SymbolTerm::new(s[1].clone()).xi(unit(1))];
    SymbolExpansion::explicit(Torus::standard(2), 2, 1, vec![t]).unwrap()
}

/// Covector samples on the unit sphere of dimension `n`.
fn samples(n: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..5).map(|k| vec![(0.3 + 1.1 * k as f64).cos(), (0.3 + 1.1 * k as f64).sin()]).collect(),
        _ => vec![
            vec![0.48, 0.6, 0.64],
            vec![-0.36, 0.48, -0.8],
            vec![0.0, -0.6, 0.8],
            vec![0.8, 0.0, -0.6],
        ],
    }
}

fn xs(n: usize) -> Vec<Vec<f64>> {
    vec![vec![0.3; n], (0..n).map(|i| 1.7 - 0.9 * i as f64).collect()]
}

fn max_diff(a: &SymbolExpansion, b: &SymbolExpansion, depth: usize) -> f64 {
    let n = a.n();
    let mut worst = 0.0f64;
    for j in 0..=depth {
        for xi in samples(n) {
            for x in xs(n) {
                let u = a.component(j).eval(&x, &xi).unwrap();
                let v = b.component(j).eval(&x, &xi).unwrap();
                worst = worst.max(u.dist(&v));
            }
        }
    }
    worst
}

fn max_abs(a: &SymbolExpansion, from: usize, depth: usize) -> f64 {
    let n = a.n();
    let mut worst = 0.0f64;
    for j in from..=depth {
        for xi in samples(n) {
            for x in xs(n) {
                worst = worst.max(a.component(j).eval(&x, &xi).unwrap().norm_max());
            }
        }
    }
    worst
}

#[test]
fn dirac_resolvent_matches_clifford_formula() {
    let r = resolvent_expansion(&dirac2(), 2).unwrap();
    let s = pauli();
    for (xi, lam) in [([0.6, 0.8], c(0.3, 0.7)), ([-1.5, 0.2], c(-2.0, -0.1))] {
        let sx = &s[0].scale(c(xi[0], 0.0)) + &s[1].scale(c(xi[1], 0.0));
        let num = &sx + &ComplexMatrix::scalar(2, lam);
        let expect = num.scale(ONE / (c(xi[0] * xi[0] + xi[1] * xi[1], 0.0) - lam * lam));
        let got = r.component(0).eval(&[0.0, 0.0], &xi, lam).unwrap();
        assert!(got.dist(&expect) < 1e-13);
        for j in 1..=2 {
            assert!(r.component(j).eval(&[0.4, 0.1], &xi, lam).unwrap().norm_max() < 1e-14);
        }
    }
}

#[test]
fn potential_resolvent_matches_hand_components() {
    let op = battery::scalar_laplace_t2();
    let r = resolvent_expansion(&op.symbol, 3).unwrap();
    let v = |x: &[f64]| 0.3 * x[0].cos() + 0.2 * x[1].sin();
    // D_j V = -i d_j V
    let dv = |x: &[f64]| [c(0.0, 0.3 * x[0].sin()), c(0.0, -0.2 * x[1].cos())];
    for (x, xi, lam) in [([0.2, 1.3], [0.6, -0.8], c(-1.0, 0.5)), ([2.5, -0.4], [1.2, 0.9], c(0.3, -2.0))] {
        let d = c(xi[0] * xi[0] + xi[1] * xi[1], 0.0) - lam;
        let q1 = r.component(1).eval(&x, &xi, lam).unwrap()[(0, 0)];
        let q2 = r.component(2).eval(&x, &xi, lam).unwrap()[(0, 0)];
        let q3 = r.component(3).eval(&x, &xi, lam).unwrap()[(0, 0)];
        assert!(q1.norm() < 1e-14);
        assert!((q2 - (-v(&x) / (d * d))).norm() < 1e-13);
        let g = dv(&x);
        let expect3 = (g[0] * xi[0] + g[1] * xi[1]) * 2.0 / (d * d * d);
        assert!((q3 - expect3).norm() < 1e-13);
    }
}

/// Residual of `(p - lambda) # q = 1` at one point, from the composition
/// formula applied to independently evaluated pieces.
fn resolvent_residual(r: &ResolventExpansion, x: &[f64], xi: &[f64], lam: C64, depth: usize) -> f64 {
    let p = r.symbol();
    let n = p.n();
    let dim = p.fiber_dim();
    let q = r.eval_jets(xi, lam, &vec![Some(0); depth + 1]).unwrap();
    let sh = shape(n);
    let mut worst = 0.0f64;
    for j in 0..=depth {
        let mut s = ComplexMatrix::zeros(dim);
        for l in 0..=j {
            for k in 0..=(j - l) {
                let a = j - l - k;
                for g in sh.deg_start[a]..sh.deg_start[a + 1] {
                    let alpha = sh.monos[g];
                    let fact: f64 = alpha.iter().map(|&v| (1..=v as u32).product::<u32>() as f64).product();
                    let mut dp = p.component(k).derive([0; 4], alpha).unwrap().eval_raw(x, xi).unwrap();
                    if k == 0 && a == 0 {
                        dp = &dp - &ComplexMatrix::scalar(dim, lam);
                    }
                    let dq = q[l].deriv_x(p.torus(), &alpha, ONE).value_at(p.torus(), x);
                    s += &(&dp * &dq).scale(c(1.0 / fact, 0.0));
                }
            }
        }
        let target = if j == 0 { ComplexMatrix::identity(dim) } else { ComplexMatrix::zeros(dim) };
        worst = worst.max(s.dist(&target));
    }
    worst
}

#[test]
fn resolvent_solves_the_composition_identity() {
    let lam = c(-0.7, 1.9);
    for op in [battery::scalar_laplace_t2(), battery::dirac_potential_t2(), battery::non_selfadjoint_t2()] {
        let r = resolvent_expansion(&op.symbol, 4).unwrap();
        for xi in samples(2) {
            let xi2: Vec<f64> = xi.iter().map(|v| 1.7 * v).collect();
            let res = resolvent_residual(&r, &[0.4, -1.2], &xi2, lam, 4);
            assert!(res < 1e-10, "{}: {res}", op.name);
        }
    }
    let op = battery::non_selfadjoint_t3();
    let r = resolvent_expansion(&op.symbol, 3).unwrap();
    assert!(resolvent_residual(&r, &[0.4, -1.2, 2.0], &[0.3, 0.9, -0.5], c(0.2, -1.5), 3) < 1e-10);
}

#[test]
fn parameter_homogeneity() {
    for op in [battery::dirac_potential_t2(), battery::non_selfadjoint_t3()] {
        let p = &op.symbol;
        let m = p.order();
        let r = resolvent_expansion(p, 3).unwrap();
        let n = p.n();
        let lam = c(0.4, 1.1);
        for j in 0..=3 {
            for xi in samples(n) {
                let x = &xs(n)[1];
                let xi2: Vec<f64> = xi.iter().map(|v| 2.0 * v).collect();
                let lhs = r.component(j).eval_raw(x, &xi2, lam * 2f64.powi(m)).unwrap();
                let rhs = r.component(j).eval_raw(x, &xi, lam).unwrap().scale(c(2f64.powi(-m - j as i32), 0.0));
                assert!(lhs.dist(&rhs) < 1e-10 * rhs.norm_max().max(1.0), "{} j={j}", op.name);
            }
        }
    }
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

/// Largest violation of `q_j(x, -xi, (-1)^m lambda) = (-1)^{-m-j} q_j(x, xi, lambda)`.
pub fn resolvent_parity_violation(op: &TestOperator, depth: usize) -> f64 {
    let p = &op.symbol;
    let m = p.order();
    let r = resolvent_expansion(p, depth).unwrap();
    let n = p.n();
    let mut worst = 0.0f64;
    for lam in [c(0.5, 1.3), c(-1.1, -0.4)] {
        let lam_neg = if m % 2 == 0 { lam } else { -lam };
        for j in 0..=depth {
            let sign = if (m + j as i32) % 2 == 0 { 1.0 } else { -1.0 };
            for xi in samples(n) {
                let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
                for x in xs(n) {
                    let a = r.component(j).eval(&x, &neg, lam_neg).unwrap();
                    let b = r.component(j).eval(&x, &xi, lam).unwrap().scale(c(sign, 0.0));
                    worst = worst.max(a.dist(&b));
                }
            }
        }
    }
    worst
}

#[test]
fn resolvent_parity_on_odd_class_battery() {
    for op in odd_class_battery() {
        let v = resolvent_parity_violation(&op, 4);
        assert!(v <= 1e-9, "{}: {v}", op.name);
    }
}

#[test]
fn power_examples() {
    let inv = power_expansion(&laplacian(), 1, 3).unwrap();
    let xi = [0.3, -1.1];
    let v = inv.component(0).eval(&[0.0, 0.0], &xi).unwrap()[(0, 0)];
    assert!((v - c(1.0 / (0.09 + 1.21), 0.0)).norm() < 1e-14);
    assert!(max_abs(&inv, 1, 3) < 1e-14);

    let d2 = power_expansion(&dirac2(), 2, 3).unwrap();
    let v = d2.component(0).eval(&[0.0, 0.0], &xi).unwrap();
    assert!(v.dist(&ComplexMatrix::scalar(2, c(1.0 / 1.3, 0.0))) < 1e-14);
    assert!(max_abs(&d2, 1, 3) < 1e-14);
}

#[test]
fn parametrix_residual_and_odd_class_closure() {
    let depth = 4;
    for op in odd_class_battery() {
        let p = &op.symbol;
        for k in 1..=2 {
            let b = power_expansion(p, k, depth).unwrap();
            let pk = power_expansion(p, -k, depth).unwrap();
            let prod = compose(&pk, &b, depth).unwrap();
            let one = SymbolExpansion::identity(p.torus().clone(), p.fiber_dim());
            let d = if p.n() == 3 { 3 } else { depth };
            assert!(max_diff(&prod, &one, d) < 1e-9, "{} k={k}", op.name);
            assert!(odd_class_check(&b).unwrap().holds, "{} k={k}", op.name);
        }
    }
}

#[test]
fn projection_trivial_cases() {
    let lap = laplacian();
    let up = CutPair::new(0.2, PI - 0.2).unwrap();
    let none = projection_expansion(&lap, up, 3).unwrap();
    assert!(max_abs(&none, 0, 3) == 0.0);
    assert!(smoothing_check(&lap, &up).unwrap());
    let pos = CutPair::new(5.0, 7.5).unwrap();
    let all = projection_expansion(&lap, pos, 3).unwrap();
    let v = all.component(0).eval(&[0.0, 0.0], &[0.6, 0.8]).unwrap();
    assert!(v.dist(&ComplexMatrix::identity(1)) == 0.0);
    assert!(max_abs(&all, 1, 3) == 0.0);
}

#[test]
fn dirac_projection_onto_negative_eigenvalue() {
    let lower = CutPair::new(PI, 2.0 * PI).unwrap();
    // cuts along the real axis meet the spectrum; tilt them slightly
    assert!(projection_expansion(&dirac2(), lower, 2).is_err());
    let lower = CutPair::new(PI / 2.0, 3.0 * PI / 2.0).unwrap();
    let pi = projection_expansion(&dirac2(), lower, 2).unwrap();
    let s = pauli();
    for xi in samples(2) {
        let sx = &s[0].scale(c(xi[0], 0.0)) + &s[1].scale(c(xi[1], 0.0));
        let expect = (&ComplexMatrix::identity(2) - &sx).scale(c(0.5, 0.0));
        let got = pi.component(0).eval(&[0.0, 0.0], &xi).unwrap();
        assert!(got.dist(&expect) < 1e-12);
    }
    assert!(!smoothing_check(&dirac2(), &lower).unwrap());
}

#[test]
fn smoothing_check_with_rotated_spectrum() {
    let e = |a: f64| ComplexMatrix::diag(&[C64::from_polar(1.0, a), ZERO]);
    let f = |a: f64| ComplexMatrix::diag(&[ZERO, C64::from_polar(1.0, a)]);
    let p = SymbolExpansion::explicit(
        Torus::standard(2),
        2,
        1,
        vec![vec![SymbolTerm::new(e(PI / 4.0)).norm(1), SymbolTerm::new(f(-PI / 4.0)).norm(1)]],
    )
    .unwrap();
    assert!(smoothing_check(&p, &CutPair::up_down()).unwrap());
}

#[test]
fn principal_symbol_is_fiberwise_projection() {
    let cfg = KernelConfig::default();
    for op in battery::projection_battery() {
        for cuts in &op.cuts {
            let pi = projection_expansion(&op.symbol, *cuts, 0).unwrap();
            for xi in samples(op.symbol.n()) {
                let pm = op.symbol.principal_at(&xi).unwrap();
                let expect = sectorial_projection_matrix(&pm, cuts, &cfg).unwrap();
                let got = pi.component(0).eval(&xs(op.symbol.n())[0], &xi).unwrap();
                assert!(got.dist(&expect) < 1e-8, "{}: {}", op.name, got.dist(&expect));
            }
        }
    }
}

#[test]
fn projection_symbol_is_idempotent() {
    let depth = 3;
    for op in battery::projection_battery() {
        for cuts in &op.cuts {
            let pi = projection_expansion(&op.symbol, *cuts, depth).unwrap();
            let pp = compose(&pi, &pi, depth).unwrap();
            let d = max_diff(&pp, &pi, depth);
            assert!(d <= 1e-6, "{} {:?}: {d}", op.name, cuts);
        }
    }
}

#[test]
fn complementary_projections_sum_to_identity() {
    let depth = 3;
    for op in battery::projection_battery() {
        let cuts = op.cuts[0];
        let a = projection_expansion(&op.symbol, cuts, depth).unwrap();
        let b = projection_expansion(&op.symbol, cuts.complement(), depth).unwrap();
        let n = op.symbol.n();
        for j in 0..=depth {
            for xi in samples(n) {
                let x = &xs(n)[1];
                let s = &a.component(j).eval(x, &xi).unwrap() + &b.component(j).eval(x, &xi).unwrap();
                let target = if j == 0 { ComplexMatrix::identity(op.symbol.fiber_dim()) } else { ComplexMatrix::zeros(op.symbol.fiber_dim()) };
                assert!(s.dist(&target) <= 1e-8, "{} j={j}", op.name);
            }
        }
    }
}

#[test]
fn split_sector_parity() {
    let depth = 3;
    for op in battery::first_order_t2() {
        let cuts = op.cuts[0];
        let pi = projection_expansion(&op.symbol, cuts, depth).unwrap();
        for j in 0..=depth {
            for xi in samples(2) {
                let neg = [-xi[0], -xi[1]];
                let x = [0.8, -0.3];
                let a = pi.component(j).eval(&x, &neg).unwrap();
                let b = pi.component(j).eval(&x, &xi).unwrap();
                let expect = if j == 0 {
                    &ComplexMatrix::identity(2) - &b
                } else {
                    b.scale(c(if j % 2 == 1 { 1.0 } else { -1.0 }, 0.0))
                };
                assert!(a.dist(&expect) <= 1e-8, "{} j={j}", op.name);
            }
        }
    }
}

#[test]
fn fiber_node_count_is_converged() {
    let fine = ProjectionConfig { nodes: 1024, ..ProjectionConfig::default() };
    for op in battery::projection_battery() {
        let cuts = op.cuts[0];
        let a = projection_expansion(&op.symbol, cuts, 4).unwrap();
        let b = projection_expansion_with(&op.symbol, cuts, 4, fine).unwrap();
        let d = max_diff(&a, &b, 4);
        assert!(d < 1e-12, "{}: {d}", op.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn prop_resolvent_identity_random_lambda(re in -3.0f64..3.0, im in 0.2f64..3.0, a in 0.0f64..6.28) {
        let op = battery::non_selfadjoint_t2();
        let r = resolvent_expansion(&op.symbol, 3).unwrap();
        let xi = [1.3 * a.cos(), 1.3 * a.sin()];
        // eigenvalues of p_1 have arguments 0.4 and 0.4 + pi; lambda stays off them
        let lam = C64::from_polar((re * re + im * im).sqrt(), 0.4 + 0.3 + im.atan2(re.abs()) * 0.5);
        prop_assert!(resolvent_residual(&r, &[0.1, 0.9], &xi, lam, 3) < 1e-9);
    }
}

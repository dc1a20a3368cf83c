use std::f64::consts::PI;

use specasym_core::battery::{cos_terms, pauli};
use specasym_core::cmat::{ComplexMatrix, C64, ZERO};
use specasym_core::dirac::{
    clifford_curvature, dirac_asymmetry, dirac_symbol, heat_coefficients, leading_gap, lichnerowicz_square,
    sphere_constant_check, CliffordData, FourierField, TwistCurvature, Vanishing,
};
use specasym_core::residue::residue_density;
use specasym_core::resolvent::power_expansion;
use specasym_core::spectral::eigenvalues;
use specasym_core::symbol::odd_class_check;
use specasym_core::torus::{Freq, Torus};

fn f(k: &[i32]) -> Freq {
    let mut out = [0; 4];
    out[..k.len()].copy_from_slice(k);
    out
}

fn cos_field(k: Freq, m: &ComplexMatrix) -> FourierField {
    cos_terms(k, m).into_iter().map(|t| (t.freq, t.coeff)).collect()
}

fn sin_field(k: Freq, m: &ComplexMatrix) -> FourierField {
    let neg = k.map(|v| -v);
    let h = m.scale(C64::new(0.0, -0.5));
    [(k, h.clone()), (neg, -&h)].into_iter().collect()
}

fn merge(mut a: FourierField, b: FourierField) -> FourierField {
    for (k, m) in b {
        let v = a.remove(&k).map(|v| &v + &m).unwrap_or(m);
        a.insert(k, v);
    }
    a
}

fn constant(m: ComplexMatrix) -> FourierField {
    [(f(&[]), m)].into_iter().collect()
}

fn cos_x2_t2() -> CliffordData {
    let one = ComplexMatrix::identity(1);
    CliffordData::new(Torus::standard(2), 1, vec![cos_field(f(&[0, 1]), &one), FourierField::new()]).unwrap()
}

/// Non-abelian rank-2 twist on `T^2`.
fn nonabelian_t2() -> CliffordData {
    let s = pauli();
    let a1 = merge(cos_field(f(&[0, 1]), &s[0].scale(C64::new(0.3, 0.0))), constant(s[2].scale(C64::new(0.2, 0.0))));
    let a2 = sin_field(f(&[1, 0]), &s[1].scale(C64::new(0.4, 0.0)));
    CliffordData::new(Torus::standard(2), 2, vec![a1, a2]).unwrap()
}

/// Non-abelian rank-2 twist on `T^4`.
fn nonabelian_t4() -> CliffordData {
    let s = pauli();
    let sc = |m: &ComplexMatrix, v: f64| m.scale(C64::new(v, 0.0));
    let a = vec![
        merge(cos_field(f(&[0, 1, 0, 0]), &sc(&s[0], 0.3)), constant(sc(&s[2], 0.1))),
        sin_field(f(&[0, 0, 1, 0]), &sc(&s[1], 0.2)),
        cos_field(f(&[1, 0, 0, 1]), &sc(&ComplexMatrix::identity(2), 0.25)),
        cos_field(f(&[1, 0, 0, 0]), &sc(&s[2], 0.15)),
    ];
    CliffordData::new(Torus::standard(4), 2, a).unwrap()
}

fn field_at(field: &FourierField, torus: &Torus, x: &[f64], dim: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(dim);
    for (k, m) in field {
        acc = &acc + &m.scale(C64::from_polar(1.0, torus.phase(k, x)));
    }
    acc
}

#[test]
fn untwisted_symbol_is_clifford_multiplication() {
    let d = CliffordData::untwisted(2).unwrap();
    let p = dirac_symbol(&d);
    let s = pauli();
    let xi = [0.6, -0.8];
    let want = &s[0].scale(C64::new(xi[0], 0.0)) + &s[1].scale(C64::new(xi[1], 0.0));
    assert!(p.component(0).eval(&[0.3, 0.1], &xi).unwrap().dist(&want) < 1e-15);
    assert!(p.component(1).eval(&[0.3, 0.1], &xi).unwrap().norm_max() == 0.0);
}

#[test]
fn cosine_twist_gives_sigma1_potential() {
    let p = dirac_symbol(&cos_x2_t2());
    let x = [0.4f64, 1.1];
    let want = pauli()[0].scale(C64::new(x[1].cos(), 0.0));
    assert!(p.component(1).eval(&x, &[1.0, 0.0]).unwrap().dist(&want) < 1e-15);
    assert!(odd_class_check(&p).unwrap().holds);
}

#[test]
fn principal_eigenvalues_are_plus_minus_norm() {
    for d in [nonabelian_t2(), nonabelian_t4()] {
        let p = dirac_symbol(&d);
        let n = d.n();
        let mut xi = vec![0.0; n];
        xi[0] = 3.0;
        xi[1] = 4.0;
        let pm = p.component(0).eval_raw(&vec![0.0; n], &xi).unwrap();
        assert!(pm.is_hermitian(1e-15));
        let ev = eigenvalues(&pm).unwrap();
        let plus = ev.iter().filter(|z| (*z - C64::new(5.0, 0.0)).norm() < 1e-10).count();
        let minus = ev.iter().filter(|z| (*z + C64::new(5.0, 0.0)).norm() < 1e-10).count();
        let mult = d.fiber_dim() / 2;
        assert_eq!((plus, minus), (mult, mult));
        assert!(odd_class_check(&p).unwrap().holds);
    }
}

#[test]
fn curvature_matches_finite_differences() {
    for d in [cos_x2_t2(), nonabelian_t2(), nonabelian_t4()] {
        let n = d.n();
        let r = d.twist_rank;
        let curv = TwistCurvature::new(&d);
        let x: Vec<f64> = (0..n).map(|i| 0.7 + 0.45 * i as f64).collect();
        let h = 1e-5;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let partial = |a: usize, b: usize| {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[a] += h;
                    xm[a] -= h;
                    (&field_at(&d.connection[b], &d.torus, &xp, r) - &field_at(&d.connection[b], &d.torus, &xm, r))
                        .scale(C64::new(0.5 / h, 0.0))
                };
                let ai = field_at(&d.connection[i], &d.torus, &x, r);
                let aj = field_at(&d.connection[j], &d.torus, &x, r);
                let comm = &(&ai * &aj) - &(&aj * &ai);
                let want = &(&partial(i, j) - &partial(j, i)) + &comm.scale(C64::new(0.0, 1.0));
                let got = curv.at(&d.torus, i, j, &x).unwrap_or_else(|| ComplexMatrix::zeros(r));
                assert!(got.dist(&want) < 1e-8, "F_{i}{j}: {}", got.dist(&want));
                let back = curv.at(&d.torus, j, i, &x).unwrap_or_else(|| ComplexMatrix::zeros(r));
                assert!((&got + &back).norm_max() < 1e-14);
            }
        }
    }
}

#[test]
fn cosine_twist_curvature_is_sin_x2() {
    let d = cos_x2_t2();
    let curv = TwistCurvature::new(&d);
    let x = [0.2f64, 0.9];
    let f12 = curv.at(&d.torus, 0, 1, &x).unwrap();
    assert!((f12[(0, 0)] - C64::new(x[1].sin(), 0.0)).norm() < 1e-15);
    // -i sigma_1 sigma_2 = sigma_3
    let mut c = ComplexMatrix::zeros(2);
    for t in clifford_curvature(&d) {
        c = &c + &t.coeff.scale(C64::from_polar(1.0, d.torus.phase(&t.freq, &x)));
    }
    let want = pauli()[2].scale(C64::new(x[1].sin(), 0.0));
    assert!(c.dist(&want) < 1e-15);
}

#[test]
fn lichnerowicz_identity_holds() {
    for d in [CliffordData::untwisted(2).unwrap(), cos_x2_t2(), nonabelian_t2(), nonabelian_t4()] {
        let r = lichnerowicz_square(&d).unwrap();
        assert!(r.deviation <= 1e-10, "n={} deviation {}", d.n(), r.deviation);
    }
    // flat untwisted square is |xi|^2 exactly
    let r = lichnerowicz_square(&CliffordData::untwisted(4).unwrap()).unwrap();
    assert!(r.curvature.is_empty());
    let xi = [0.5, -0.5, 0.5, 0.5];
    let sq = r.square.component(0).eval(&[0.0; 4], &xi).unwrap();
    assert!(sq.dist(&ComplexMatrix::identity(4)) < 1e-15);
    for j in 1..3 {
        assert_eq!(r.square.component(j).eval(&[0.1; 4], &xi).unwrap().norm_max(), 0.0);
    }
}

#[test]
fn commuting_constant_twist_is_flat() {
    let a = vec![constant(ComplexMatrix::identity(1).scale(C64::new(0.3, 0.0))), constant(ComplexMatrix::identity(1))];
    let d = CliffordData::new(Torus::standard(2), 1, a).unwrap();
    assert!(clifford_curvature(&d).iter().all(|t| t.coeff.norm_max() == 0.0));
    assert!(lichnerowicz_square(&d).unwrap().deviation <= 1e-12);
}

#[test]
fn heat_coefficient_closed_forms() {
    let h = heat_coefficients(&CliffordData::untwisted(2).unwrap()).unwrap();
    assert!(h.a0.values().iter().all(|v| (v - C64::new(2.0 / (4.0 * PI), 0.0)).norm() < 1e-15));
    for d in [cos_x2_t2(), nonabelian_t2(), nonabelian_t4()] {
        let h = heat_coefficients(&d).unwrap();
        assert!(h.a1.max_abs() < 1e-15, "traced a1 must vanish");
    }
    let h = heat_coefficients(&nonabelian_t4()).unwrap();
    let want = (4.0 * PI).powi(-2) * 4.0 * 2.0;
    assert!(h.a0.values().iter().all(|v| (v - C64::new(want, 0.0)).norm() < 1e-15));
}

#[test]
fn dirac_gap_on_t2() {
    for d in [CliffordData::untwisted(2).unwrap(), nonabelian_t2()] {
        let r = dirac_asymmetry(&d, 2).unwrap();
        let want = leading_gap(&d);
        assert!((r.residue_route - want).norm() < 1e-9 * want.norm());
        assert!(r.discrepancy.unwrap() < 1e-6);
    }
    let r = dirac_asymmetry(&CliffordData::untwisted(2).unwrap(), 2).unwrap();
    assert!((r.residue_route - C64::new(0.0, 4.0 * PI * PI)).norm() < 1e-9);
}

#[test]
fn dirac_gaps_on_twisted_t4() {
    let d = nonabelian_t4();
    let r4 = dirac_asymmetry(&d, 4).unwrap();
    let want = C64::new(0.0, 2.0 * PI * (4.0 * PI).powi(-2) * 2.0 * 4.0 * Torus::standard(4).volume());
    assert!((leading_gap(&d) - want).norm() < 1e-12 * want.norm());
    assert!((r4.residue_route - want).norm() < 1e-6 * want.norm());
    assert!(r4.discrepancy.unwrap() < 1e-6);
    let r2 = dirac_asymmetry(&d, 2).unwrap();
    assert_eq!(r2.heat_route, Some(ZERO));
    assert!(r2.discrepancy.unwrap() < 1e-6, "{:?}", r2.residue_route);
}

#[test]
fn odd_powers_vanish_by_chirality() {
    for d in [nonabelian_t2(), nonabelian_t4()] {
        for k in (1..d.n() as i32).step_by(2) {
            let r = dirac_asymmetry(&d, k).unwrap();
            assert_eq!(r.vanishing, Some(Vanishing::Chirality));
            assert_eq!(r.residue_route, ZERO);
            assert!(r.density_bound.unwrap() <= 1e-9, "n={} k={k}: {:?}", d.n(), r.density_bound);
        }
    }
    // the density itself, computed independently of the report
    let d = nonabelian_t2();
    let q = power_expansion(&dirac_symbol(&d), 1, 1).unwrap();
    assert!(residue_density(&q).unwrap().max_abs() <= 1e-9);
}

#[test]
fn powers_outside_range_vanish() {
    let d = nonabelian_t2();
    assert_eq!(dirac_asymmetry(&d, 0).unwrap().vanishing, Some(Vanishing::Differential));
    assert_eq!(dirac_asymmetry(&d, -2).unwrap().vanishing, Some(Vanishing::Differential));
    assert_eq!(dirac_asymmetry(&d, 4).unwrap().vanishing, Some(Vanishing::BelowResidueOrder));
}

#[test]
fn sphere_constant_matches_gamma_form() {
    for n in [2, 4] {
        let (l, r) = sphere_constant_check(n).unwrap();
        assert!((l - r).abs() < 1e-12, "n={n}: {l} vs {r}");
    }
}

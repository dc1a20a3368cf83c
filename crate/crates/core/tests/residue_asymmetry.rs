use std::f64::consts::PI;

use specasym_core::battery::{self, pauli};
use specasym_core::cmat::{ComplexMatrix, C64};
use specasym_core::contour::CutPair;
use specasym_core::error::CalcError;
use specasym_core::residue::{
    eta_residue, local_gap_density, positivity_check, projection_residue, required_depth, res_total,
    residue_density, zeta_gap,
};
use specasym_core::resolvent::{parametrix, power_expansion};
use specasym_core::symbol::{unit, SymbolExpansion, SymbolTerm};
use specasym_core::torus::Torus;

const TWO_PI: f64 = 2.0 * PI;

fn dirac2(scale: f64) -> SymbolExpansion {
    let s = pauli();
    let t = (0..2).map(|i| SymbolTerm::new(s[i].scale(C64::new(scale, 0.0))).xi(unit(i))).collect();
    SymbolExpansion::explicit(Torus::standard(2), 2, 1, vec![t]).unwrap()
}

fn abs_xi() -> SymbolExpansion {
    let t = vec![SymbolTerm::new(ComplexMatrix::identity(1)).norm(1)];
    SymbolExpansion::explicit(Torus::standard(2), 1, 1, vec![t]).unwrap()
}

#[test]
fn inverse_laplacian_density_is_constant() {
    let q = SymbolExpansion::explicit(
        Torus::standard(2),
        1,
        -2,
        vec![vec![SymbolTerm::new(ComplexMatrix::identity(1)).norm(-2)]],
    )
    .unwrap();
    let d = residue_density(&q).unwrap();
    // (2 pi)^{-2} times the circumference of the unit circle
    for v in d.values() {
        assert!((v - C64::new(1.0 / TWO_PI, 0.0)).norm() < 1e-13);
    }
    assert!((res_total(&q).unwrap() - C64::new(TWO_PI, 0.0)).norm() < 1e-12);
}

#[test]
fn differential_operators_have_no_residue() {
    for op in battery::projection_battery() {
        let d = residue_density(&op.symbol).unwrap();
        assert_eq!(d.max_abs(), 0.0, "{}", op.name);
        let sq = power_expansion(&op.symbol, -2, 4).unwrap();
        assert_eq!(res_total(&sq).unwrap(), C64::new(0.0, 0.0), "{}", op.name);
    }
}

#[test]
fn odd_class_density_vanishes_in_odd_dimension() {
    for op in [battery::non_selfadjoint_t3(), battery::selfadjoint_t3()] {
        let q = parametrix(&op.symbol, 1).unwrap();
        let d = residue_density(&q).unwrap();
        assert!(d.max_abs() < 1e-9, "{}: {}", op.name, d.max_abs());
    }
}

#[test]
fn dirac_inverse_square_residue() {
    let p = dirac2(1.0);
    let q = power_expansion(&p, 2, 2).unwrap();
    let vol = Torus::standard(2).volume();
    // D^{-2} has principal symbol |xi|^{-2} I_2
    let want = 2.0 / TWO_PI * vol;
    assert!((res_total(&q).unwrap() - C64::new(want, 0.0)).norm() < 1e-10);
}

#[test]
fn dirac_gap_at_dimension() {
    for p in [dirac2(1.0), battery::dirac_potential_t2().symbol] {
        let r = zeta_gap(&p, CutPair::up_down(), 2, 2).unwrap();
        let want = C64::new(0.0, 4.0 * PI * PI);
        assert!((r.gap - want).norm() < 1e-9, "{:?}", r.gap);
        let fp = r.fast_path.expect("fast path applies");
        assert!(fp.discrepancy < 1e-9);
        assert_eq!(r.gap * r_order(&p), C64::new(0.0, TWO_PI) * r.res_pi_pk);
    }
}

fn r_order(p: &SymbolExpansion) -> C64 {
    C64::new(p.order() as f64, 0.0)
}

#[test]
fn gap_with_differential_power_is_reported() {
    let op = battery::dirac_potential_t2();
    for k in [-1, 0] {
        let r = zeta_gap(&op.symbol, op.cuts[1], k, required_depth(&op.symbol, k)).unwrap();
        assert_eq!(r.res_pk, C64::new(0.0, 0.0));
        assert_eq!(r.gap * r_order(&op.symbol), C64::new(0.0, TWO_PI) * r.res_pi_pk);
        assert!(r.gap.norm() < 1e-7, "k = {k}: {:?}", r.gap);
    }
}

#[test]
fn odd_class_even_order_gap_vanishes_on_t3() {
    for op in [battery::non_selfadjoint_t3(), battery::selfadjoint_t3()] {
        for cuts in &op.cuts {
            for k in -2..=2 {
                let depth = required_depth(&op.symbol, k);
                let r = zeta_gap(&op.symbol, *cuts, k, depth).unwrap();
                assert!(r.gap.norm() <= 1e-7, "{} {:?} k={k}: {:?}", op.name, cuts, r.gap);
                assert!(r.fast_path.is_none());
            }
        }
    }
}

#[test]
fn local_gap_identity_on_first_order_t2() {
    for op in battery::first_order_t2() {
        for cuts in &op.cuts {
            for k in -1..=2 {
                let depth = required_depth(&op.symbol, k);
                let r = local_gap_density(&op.symbol, *cuts, k, depth).unwrap();
                assert!(r.fast_path);
                assert!(r.violation <= 1e-7, "{} {:?} k={k}: {}", op.name, cuts, r.violation);
            }
        }
    }
}

#[test]
fn direct_and_cyclic_residues_agree() {
    // zeta_gap integrates Res P^{-k} Pi, the local density uses Pi P^{-k}
    for op in battery::first_order_t2() {
        for k in [0, 1] {
            let depth = required_depth(&op.symbol, k);
            let g = zeta_gap(&op.symbol, op.cuts[1], k, depth).unwrap();
            let l = local_gap_density(&op.symbol, op.cuts[1], k, depth).unwrap();
            let d = (l.r_density.integrate() - g.res_pi_pk).norm();
            assert!(d < 1e-9, "{} k={k}: {d}", op.name);
        }
    }
}

#[test]
fn local_gap_for_flat_dirac() {
    let r = local_gap_density(&dirac2(1.0), CutPair::up_down(), 2, 2).unwrap();
    for (a, b) in r.r_density.values().iter().zip(r.pk_density.values()) {
        assert!((a * 2.0 - C64::new(2.0 / TWO_PI, 0.0)).norm() < 1e-9);
        assert!((b - C64::new(2.0 / TWO_PI, 0.0)).norm() < 1e-12);
    }
    // x-independent symbols give x-independent densities
    assert!(r.r_density.variation() < 1e-14 && r.pk_density.variation() < 1e-14);
}

#[test]
fn local_densities_vanish_on_t3() {
    let op = battery::non_selfadjoint_t3();
    for k in [-1, 0, 1] {
        let r = local_gap_density(&op.symbol, op.cuts[0], k, required_depth(&op.symbol, k)).unwrap();
        assert!(!r.fast_path);
        assert!(r.r_density.max_abs() < 1e-8 && r.pk_density.max_abs() < 1e-8, "k={k}");
    }
}

#[test]
fn projections_have_zero_residue() {
    for op in battery::projection_battery() {
        for cuts in &op.cuts {
            let r = projection_residue(&op.symbol, *cuts).unwrap();
            assert!(r.norm() <= 1e-7, "{} {:?}: {:?}", op.name, cuts, r);
        }
    }
}

#[test]
fn eta_residue_of_abs_xi() {
    let r = eta_residue(&abs_xi(), 2, 2).unwrap();
    let want = TWO_PI * TWO_PI.powi(-2) * Torus::standard(2).volume();
    assert!((r.value - want).abs() < 1e-10, "{}", r.value);
    assert!(r.res_minus_pk.norm() < 1e-14);
    assert!(r.imaginary_residual <= 1e-10);
}

#[test]
fn eta_regular_for_opposite_parities() {
    let d = battery::dirac_potential_t2();
    for k in -1..=3 {
        let r = eta_residue(&d.symbol, k, required_depth(&d.symbol, k)).unwrap();
        assert!(r.value.abs() < 1e-7, "k={k}: {}", r.value);
        assert!(r.imaginary_residual <= 1e-10);
    }
    let s = battery::selfadjoint_t3();
    for k in [-1, 0, 1] {
        let r = eta_residue(&s.symbol, k, required_depth(&s.symbol, k)).unwrap();
        assert!(r.value.abs() < 1e-7, "k={k}: {}", r.value);
        assert!(r.imaginary_residual <= 1e-10);
    }
}

#[test]
fn eta_rejects_non_hermitian_principal() {
    let op = battery::non_selfadjoint_t2();
    assert!(matches!(eta_residue(&op.symbol, 2, 2), Err(CalcError::NotSelfadjoint { .. })));
}

#[test]
fn positivity_of_dirac_gap() {
    let r = positivity_check(&dirac2(1.0), 2).unwrap();
    assert!(r.positive);
    assert!((r.gap_value - 4.0 * PI * PI).abs() < 1e-9);
    assert!((r.closed_form - 4.0 * PI * PI).abs() < 1e-9);
    let s = positivity_check(&dirac2(3.0), 2).unwrap();
    assert!(s.positive);
    assert!((s.gap_value - 4.0 * PI * PI / 9.0).abs() < 1e-9);
    assert!(matches!(
        positivity_check(&battery::selfadjoint_t3().symbol, 2),
        Err(CalcError::Precondition(_))
    ));
}

#[test]
fn depth_below_residue_component_is_rejected() {
    let op = battery::dirac_potential_t2();
    assert!(matches!(
        zeta_gap(&op.symbol, op.cuts[0], 0, 1),
        Err(CalcError::DepthInsufficient { needed: 2, depth: 1 })
    ));
    let q = parametrix(&op.symbol, 0).unwrap();
    assert!(matches!(residue_density(&q), Err(CalcError::DepthInsufficient { needed: 1, depth: 0 })));
}

mod common;

use proptest::prelude::*;

use tdab::algebra::{
    contract_dual_sigma_f, contract_sigma_f, gamma_rep, interaction_hamiltonian, verify_dual_identity,
    verify_dual_identity_in, DiracBasis, Dipole, DipoleKind, FieldTensor, SpinLabel,
};
use tdab::fields::FieldSample;

fn component() -> impl Strategy<Value = f64> {
    -50.0..50.0f64
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    [component(), component(), component()]
}

fn spin() -> impl Strategy<Value = SpinLabel> {
    prop_oneof![Just(SpinLabel::Up), Just(SpinLabel::Down)]
}

fn scale_of(e: &[f64; 3], b: &[f64; 3]) -> f64 {
    e.iter().chain(b).fold(1.0f64, |m, v| m.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sigma_f_matches_brute_force(e in vec3(), b in vec3(), s in spin()) {
        let closed = contract_sigma_f(&gamma_rep(s), &FieldTensor::new(e, b));
        let brute = common::planar_sigma_f(s.sign(), e, b);
        prop_assert!(common::max_diff(&closed.entries, &brute) <= 1e-12 * scale_of(&e, &b));
    }

    #[test]
    fn dual_sigma_f_matches_brute_force(e in vec3(), b in vec3()) {
        let closed = contract_dual_sigma_f(&FieldTensor::new(e, b));
        let brute = common::planar_dual_sigma_f(e, b);
        prop_assert!(common::max_diff(&closed.entries, &brute) <= 1e-12 * scale_of(&e, &b));
    }

    #[test]
    fn sigma_f_is_linear(e1 in vec3(), b1 in vec3(), e2 in vec3(), b2 in vec3(), x in -3.0..3.0f64, y in -3.0..3.0f64, s in spin()) {
        let rep = gamma_rep(s);
        let f1 = FieldTensor::new(e1, b1);
        let f2 = FieldTensor::new(e2, b2);
        let lhs = contract_sigma_f(&rep, &f1.scaled(x).plus(&f2.scaled(y)));
        let rhs = contract_sigma_f(&rep, &f1) * x + contract_sigma_f(&rep, &f2) * y;
        let scale = scale_of(&e1, &b1).max(scale_of(&e2, &b2)) * 3.0;
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-14 * 8.0 * scale);
    }

    #[test]
    fn dual_identity_holds_everywhere(e in vec3(), b in vec3()) {
        let f = FieldTensor::new(e, b);
        let tol = 1e-12 * scale_of(&e, &b).max(1.0);
        prop_assert!(verify_dual_identity(&f) <= tol);
        prop_assert!(verify_dual_identity_in(DiracBasis::Chiral, &f) <= tol);
        prop_assert!(common::dual_identity_gap(&common::chiral_gammas(), e, b) <= tol);
    }

    #[test]
    fn interaction_is_hermitian(e in vec3(), b in vec3(), moment in 0.0..5.0f64, s in spin(), magnetic in any::<bool>()) {
        let kind = if magnetic { DipoleKind::Magnetic } else { DipoleKind::Electric };
        let dip = Dipole::new(kind, moment, s, 1.0).unwrap();
        let sample = FieldSample { position: [1.0, 2.0], time: 0.0, e, b };
        let h = interaction_hamiltonian(&gamma_rep(s), &dip, &sample).unwrap();
        prop_assert!(h.max_abs_diff(&h.dagger()) == 0.0);
    }

    /// The electric coupling with fields mapped by E → B, B → −E equals the
    /// magnetic coupling with the moment relabelled.
    #[test]
    fn electric_coupling_is_the_dual_image(e in vec3(), b in vec3(), moment in 0.0..5.0f64, s in spin()) {
        let rep = gamma_rep(s);
        let mag = Dipole::magnetic(moment, s, 1.0).unwrap();
        let ele = Dipole::electric(moment, s, 1.0).unwrap();
        let original = FieldSample { position: [1.0, 2.0], time: 0.0, e, b };
        let mapped = FieldSample { position: [1.0, 2.0], time: 0.0, e: b.map(|v| -v), b: e };
        let hm = interaction_hamiltonian(&rep, &mag, &original).unwrap();
        let he = interaction_hamiltonian(&rep, &ele, &mapped).unwrap();
        prop_assert!(hm.max_abs_diff(&he) <= 1e-13 * scale_of(&e, &b) * moment.max(1.0));
    }
}

#[test]
fn gamma_hermiticity_pattern_is_exact() {
    for s in [SpinLabel::Up, SpinLabel::Down] {
        let rep = gamma_rep(s);
        assert!(rep.alpha_x.is_hermitian() && rep.alpha_y.is_hermitian() && rep.beta.is_hermitian());
        assert!(rep.gamma1().is_anti_hermitian() && rep.gamma2().is_anti_hermitian());
        let g = common::planar_gammas(s.sign());
        for (gk, ok) in rep.gamma.iter().zip(&g) {
            assert_eq!(&gk.entries, ok);
        }
    }
}

#[test]
fn worked_examples() {
    let rep = gamma_rep(SpinLabel::Up);
    let f = FieldTensor::new([1.0, 0.0, 0.0], [0.0; 3]);
    let expect = common::scale(&common::sx(), common::c(0.0, 2.0));
    assert_eq!(contract_sigma_f(&rep, &f).entries, expect);

    let g = common::dirac_gammas();
    let alpha_x = common::mul(&g[0], &g[1]);
    let dual = contract_dual_sigma_f(&FieldTensor::new([0.0; 3], [1.0, 0.0, 0.0]));
    assert!(common::max_diff(&dual.entries, &common::scale(&alpha_x, common::c(0.0, 2.0))) < 1e-15);

    assert!(verify_dual_identity(&FieldTensor::new([0.0, 0.0, 1.0], [0.0; 3])) < 1e-13);
    assert_eq!(verify_dual_identity(&FieldTensor::zero()), 0.0);
}

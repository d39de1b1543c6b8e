use kontact::boeckx::{boeckx_invariant, Regime};
use kontact::chart::Point;
use kontact::constructions::{build_kcontact, build_mu2, verify_fixedness, ConstructionError, Target};
use kontact::contact::{check_kcontact, check_sasakian, check_structural_identities, derived_tensors, verify_axioms};
use kontact::deform::{apply_deformation, check_curvature_transform};
use kontact::kmu::{
    check_weak_consequences, classify_structure, eigenbundles, estimate_kappa_mu, semisymmetry_scenario,
};
use kontact::registry::{builtin, darboux_weak, lie_family, BUILTIN_NAMES};

const TOL: f64 = 1e-8;

fn pt(x: &[f64]) -> Point {
    Point::new(x.to_vec()).unwrap()
}

#[test]
fn builtins_are_contact_metric() {
    for name in BUILTIN_NAMES {
        let s = builtin(name).unwrap();
        let r = verify_axioms(&s, TOL).unwrap();
        assert!(r.passed(), "{name}: {:?}", r.failures().collect::<Vec<_>>());
        for p in s.sample_points() {
            assert!(check_structural_identities(&s, &p, TOL).unwrap().passed(), "{name} at {p:?}");
            assert!(derived_tensors(&s, &p).unwrap().invariants(TOL).passed(), "{name} at {p:?}");
        }
    }
}

#[test]
fn darboux_sasakian_is_sasakian_for_both_characterizations() {
    for n in [1, 2] {
        let s = builtin(&format!("darboux-sasakian-n{n}")).unwrap();
        for p in s.sample_points().iter().take(5) {
            let r = check_sasakian(&s, p, TOL).unwrap();
            assert!(r.is_sasakian() && r.equivalent);
            assert!(check_kcontact(&s, p, TOL).unwrap().passed());
        }
        let c = classify_structure(&s, TOL).unwrap();
        assert!(c.is_kcontact && (c.kappa - 1.0).abs() < TOL && c.mu.is_none());
        assert_eq!(boeckx_invariant(c.kappa, 0.0).unwrap().regime, Regime::Kcontact);
    }
}

#[test]
fn darboux_weak_classifies_as_zero_zero_on_the_boundary() {
    let s = builtin("darboux-weak-n2").unwrap();
    let c = classify_structure(&s, TOL).unwrap();
    assert!(c.is_weakly_kmu(TOL));
    assert!(c.kappa.abs() < TOL && c.mu.unwrap().abs() < TOL);
    let b = boeckx_invariant(c.kappa, c.mu.unwrap()).unwrap();
    assert_eq!(b.regime, Regime::Boundary);
    assert!((b.i_m.unwrap() - 1.0).abs() < 1e-9);
    let sas = check_sasakian(&s, &s.sample_points()[0], TOL).unwrap();
    assert!(!sas.is_sasakian() && sas.equivalent);
}

#[test]
fn darboux_weak_separates_weak_from_strong_only_in_higher_dimension() {
    let s1 = darboux_weak(1).unwrap();
    assert!(classify_structure(&s1, TOL).unwrap().is_strongly_kmu(TOL));

    let s2 = darboux_weak(2).unwrap();
    let w = pt(&[1.0, 1.0, 0.5, -0.5, 0.3]);
    let r = estimate_kappa_mu(&s2, &w, TOL).unwrap();
    assert!(r.residual_weak < TOL);
    assert!(r.residual_strong > 0.1, "{}", r.residual_strong);
}

#[test]
fn weak_consequences_hold_on_weak_examples() {
    for name in ["darboux-weak-n1", "darboux-weak-n2", "lie(3,1)", "lie(-2,1)", "lie(4,0)"] {
        let s = builtin(name).unwrap();
        let c = classify_structure(&s, TOL).unwrap();
        for p in s.sample_points().iter().take(4) {
            let r = check_weak_consequences(&s, p, c.kappa, c.mu.unwrap(), TOL).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }
}

#[test]
fn eigenbundles_have_expected_ranks() {
    for name in ["lie(3,1)", "darboux-weak-n2"] {
        let s = builtin(name).unwrap();
        let p = &s.sample_points()[0];
        let c = classify_structure(&s, TOL).unwrap();
        let e = eigenbundles(&s, p, c.kappa, 1e-7).unwrap();
        assert_eq!(e.dims(), (s.n(), s.n(), 1), "{name}");
        assert!(e.report(s.n(), 1e-8, p).passed(), "{name}");
    }
}

#[test]
fn lie_family_values() {
    let cases = [((4.0, 0.0), -3.0, -2.0), ((3.0, 1.0), 0.0, -2.0), ((-2.0, 1.0), -1.25, 3.0)];
    for ((c1, c2), k, m) in cases {
        let c = classify_structure(&lie_family(c1, c2).unwrap(), TOL).unwrap();
        assert!((c.kappa - k).abs() < 1e-12 && (c.mu.unwrap() - m).abs() < 1e-12, "({c1},{c2})");
    }
    let sas = lie_family(2.0, 2.0).unwrap();
    assert!(check_sasakian(&sas, &sas.sample_points()[0], TOL).unwrap().is_sasakian());
}

#[test]
fn deforming_darboux_weak_by_two() {
    let s = darboux_weak(2).unwrap();
    let d = apply_deformation(&s, 2.0).unwrap();
    assert!(verify_axioms(&d, TOL).unwrap().passed());
    let c = classify_structure(&d, TOL).unwrap();
    assert!((c.kappa - 0.75).abs() < 1e-9 && (c.mu.unwrap() - 1.0).abs() < 1e-9);
    for p in s.sample_points().iter().take(3) {
        assert!(check_curvature_transform(&s, 2.0, p, 1e-8).unwrap().report.passed());
    }
}

#[test]
fn kcontact_construction_on_both_signs_of_i() {
    for (c1, c2) in [(3.0, 1.0), (-3.0, -1.0)] {
        let out = build_kcontact(&lie_family(c1, c2).unwrap(), 1e-9).unwrap();
        assert!(out.report.passed(), "{:?}", out.report.failures().collect::<Vec<_>>());
        let p = &out.structure.sample_points()[0];
        assert!(check_kcontact(&out.structure, p, 1e-10).unwrap().passed());
        assert!(verify_fixedness(&out.structure, Target::Kcontact, &[0.5, 2.0, 3.7], 1e-9).unwrap().holds());
    }
}

#[test]
fn mu2_construction_fits_predicted_pair() {
    let s = lie_family(-2.0, 1.0).unwrap();
    let out = build_mu2(&s, 1e-9).unwrap();
    assert!(out.report.passed());
    let c = classify_structure(&out.structure, TOL).unwrap();
    let expected_kappa = -1.25 + (1.0 - 1.5f64).powi(2);
    assert!((c.kappa - expected_kappa).abs() < TOL);
    assert!((c.mu.unwrap() - 2.0).abs() < TOL);
    assert!(verify_fixedness(&out.structure, Target::Mu2, &[0.5, 2.0, 3.7], 1e-9).unwrap().holds());
}

#[test]
fn constructions_refuse_on_the_boundary() {
    for s in [darboux_weak(2).unwrap(), lie_family(4.0, 0.0).unwrap()] {
        assert!(matches!(build_kcontact(&s, 1e-9), Err(ConstructionError::RegimeGate { .. })));
        assert!(matches!(build_mu2(&s, 1e-9), Err(ConstructionError::RegimeGate { .. })));
    }
    let sas = lie_family(2.0, 2.0).unwrap();
    assert!(matches!(build_mu2(&sas, 1e-9), Err(ConstructionError::AlreadyKcontact)));
}

#[test]
fn semisymmetry_on_examples() {
    // K-contact and semi-symmetric: Sasakian follows
    let s = builtin("darboux-sasakian-n1").unwrap();
    let sc = semisymmetry_scenario(&s, &s.sample_points()[0], TOL).unwrap();
    assert!(sc.semisymmetry_residual < TOL);
    assert_eq!(sc.sasakian_implication, Some(true));

    // flat, so every reading of semi-symmetry holds and l = 0 = strong
    let s = darboux_weak(1).unwrap();
    let sc = semisymmetry_scenario(&s, &s.sample_points()[0], TOL).unwrap();
    assert_eq!(sc.strong_implication, Some(true));

    // weakly (0,0), R(X,ξ)ξ-semi-symmetric, but not strongly (0,0)
    let s = darboux_weak(2).unwrap();
    let sc = semisymmetry_scenario(&s, &pt(&[1.0, 1.0, 0.5, -0.5, 0.3]), TOL).unwrap();
    assert!(sc.weak_k0_residual < TOL && sc.semisymmetry_residual < TOL);
    assert_eq!(sc.strong_implication, Some(false));
    assert!(sc.full_semisymmetry_residual > 0.1);
}

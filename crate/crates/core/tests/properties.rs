use kontact::boeckx::{boeckx_invariant, lemma_sign_predicates};
use kontact::chart::{fd_jet, riemann, ChartField, Point};
use kontact::contact::derived_tensors;
use kontact::deform::{apply_deformation, predict_kmu};
use kontact::expr::{parse_expression, Expr, Func};
use kontact::kmu::{classify_structure, fit_kappa_mu};
use kontact::registry::{darboux_weak, lie_family};
use kontact::tensor::{contract, inverse_metric, lower_index, raise_index, sym_eigen, LinearOperator, Slot, TensorValue};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, n)
}

fn spd(b: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_row_slice(3, 3, b);
    m.transpose() * &m + DMatrix::identity(3, 3)
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0..3usize).prop_map(Expr::Var),
        (1..12i32).prop_map(|k| Expr::Const(k as f64 / 4.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let bin = |f: fn(Box<Expr>, Box<Expr>) -> Expr| (inner.clone(), inner.clone()).prop_map(move |(a, b)| f(Box::new(a), Box::new(b)));
        prop_oneof![
            bin(Expr::Add),
            bin(Expr::Sub),
            bin(Expr::Mul),
            (inner.clone(), 2..4i32).prop_map(|(a, k)| Expr::Pow(Box::new(a), Box::new(Expr::Const(k as f64)))),
            (inner.clone(), prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Neg)])
                .prop_map(|(a, f)| Expr::Func(f, Box::new(a))),
        ]
    })
}

/// `δ_ij` plus a small symmetric perturbation; SPD on `[-0.5, 0.5]³`.
fn perturbed_metric(c: &[f64]) -> ChartField {
    let mut src = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = (i.min(j), i.max(j));
            let k = a * 3 + b;
            let base = if i == j { "1" } else { "0" };
            src.push(format!(
                "{base} + 0.1*({})*(x1*x2 + x3^2) + 0.1*({})*sin(x{})",
                c[k],
                c[9 + k],
                (a + b) % 3 + 1
            ));
        }
    }
    ChartField::parse("g", 3, vec![Slot::Down, Slot::Down], &src).unwrap()
}

/// Antisymmetry, first Bianchi, and the symmetries of `g(R(X,Y)Z, W)`.
fn curvature_symmetry_defect(r: &TensorValue, g: &DMatrix<f64>) -> f64 {
    let d = r.dim();
    let low = |x: usize, y: usize, z: usize, w: usize| (0..d).map(|m| g[(w, m)] * r.get(&[m, x, y, z])).sum::<f64>();
    let mut worst = 0.0f64;
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    worst = worst
                        .max((r.get(&[l, i, j, k]) + r.get(&[l, j, i, k])).abs())
                        .max((r.get(&[l, i, j, k]) + r.get(&[l, j, k, i]) + r.get(&[l, k, i, j])).abs())
                        .max((low(i, j, k, l) + low(i, j, l, k)).abs())
                        .max((low(i, j, k, l) - low(k, l, i, j)).abs());
                }
            }
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_is_linear(t in coeffs(27), s in coeffs(27), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let slots = vec![Slot::Up, Slot::Down, Slot::Down];
        let t = TensorValue::new(3, slots.clone(), t).unwrap();
        let s = TensorValue::new(3, slots, s).unwrap();
        let lhs = contract(&t.lin_comb(a, &s, b).unwrap(), 0, 1).unwrap();
        let rhs = contract(&t, 0, 1).unwrap().lin_comb(a, &contract(&s, 0, 1).unwrap(), b).unwrap();
        prop_assert!(lhs.lin_comb(1.0, &rhs, -1.0).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn raising_then_lowering_is_identity(b in coeffs(9), t in coeffs(9), slot in 0..2usize) {
        let g = TensorValue::symmetric_02(&spd(&b));
        let g_inv = inverse_metric(&g).unwrap();
        let t = TensorValue::new(3, vec![Slot::Down, Slot::Down], t).unwrap();
        let back = lower_index(&raise_index(&t, &g_inv, slot).unwrap(), &g, slot).unwrap();
        prop_assert!(back.lin_comb(1.0, &t, -1.0).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn eigen_decomposition_reconstructs(b in coeffs(9), s in coeffs(9)) {
        let g = spd(&b);
        let s = DMatrix::from_row_slice(3, 3, &s);
        let sym = &s + s.transpose();
        let a = g.clone().try_inverse().unwrap() * sym;
        let e = sym_eigen(&LinearOperator::new(a.clone()), &g, 1e-9).unwrap();
        let v = &e.vectors;
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
        let scale = 1.0 + a.amax();
        prop_assert!((&a * v - v * lam).amax() < 1e-10 * scale);
        prop_assert!((v.transpose() * &g * v - DMatrix::identity(3, 3)).amax() < 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn jets_agree_with_finite_differences(e in expr_strategy(), x in coeffs(3)) {
        let p = Point::new(x.clone()).unwrap();
        let jet = e.eval_jet(&x, 2).unwrap();
        let fd = fd_jet(&e, &p, 1e-4).unwrap();
        let mut scale = 1.0 + jet.value().abs();
        for i in 0..3 {
            scale = scale.max(jet.grad()[i].abs());
            for j in 0..3 {
                scale = scale.max(jet.hess(i, j).abs());
            }
        }
        prop_assert!((jet.value() - fd.value()).abs() < 1e-12 * scale);
        for i in 0..3 {
            prop_assert!((jet.grad()[i] - fd.grad()[i]).abs() < 1e-6 * scale, "grad {i} of {e}");
            for j in 0..3 {
                prop_assert!((jet.hess(i, j) - fd.hess(i, j)).abs() < 1e-4 * scale, "hess {i}{j} of {e}");
            }
        }
    }

    #[test]
    fn printing_then_parsing_gives_the_same_tree(e in expr_strategy()) {
        prop_assert_eq!(parse_expression(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn chart_curvature_has_its_symmetries(c in coeffs(18), x in prop::collection::vec(-0.5..0.5f64, 3)) {
        let g = perturbed_metric(&c);
        let p = Point::new(x).unwrap();
        let r = riemann(&g, &p).unwrap();
        let gm = DMatrix::from_row_slice(3, 3, g.value_at(&p).unwrap().components());
        prop_assert!(curvature_symmetry_defect(&r, &gm) < 1e-11);
    }

    #[test]
    fn frame_curvature_has_its_symmetries(c1 in -6.0..6.0f64, c2 in -6.0..6.0f64) {
        let s = lie_family(c1, c2).unwrap();
        let t = derived_tensors(&s, &s.sample_points()[0]).unwrap();
        prop_assert!(curvature_symmetry_defect(&t.riemann, &t.g) < 1e-11);
    }

    #[test]
    fn boeckx_invariant_survives_deformation(kappa in -10.0..0.999f64, mu in -10.0..10.0f64, a in 0.05..20.0f64) {
        let (kb, mb) = predict_kmu(kappa, mu, a).unwrap();
        let i = boeckx_invariant(kappa, mu).unwrap().i_m.unwrap();
        let ib = boeckx_invariant(kb, mb).unwrap().i_m.unwrap();
        prop_assert!((i - ib).abs() < 1e-9 * (1.0 + i.abs()));
    }

    #[test]
    fn predicted_deformations_compose(kappa in -10.0..1.0f64, mu in -10.0..10.0f64, a in 0.1..10.0f64, b in 0.1..10.0f64) {
        let (k1, m1) = predict_kmu(kappa, mu, a).unwrap();
        let (k2, m2) = predict_kmu(k1, m1, b).unwrap();
        let (k3, m3) = predict_kmu(kappa, mu, a * b).unwrap();
        prop_assert!((k2 - k3).abs() < 1e-10 * (1.0 + k3.abs()));
        prop_assert!((m2 - m3).abs() < 1e-10 * (1.0 + m3.abs()));
    }

    #[test]
    fn lemma_implications_hold(kappa in -50.0..0.9999f64, mu in -50.0..50.0f64) {
        let i = boeckx_invariant(kappa, mu).unwrap().i_m.unwrap();
        prop_assume!((i.abs() - 1.0).abs() > 1e-9);
        prop_assert!(lemma_sign_predicates(kappa, mu).unwrap().implications_hold(i));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn structure_deformations_compose(c1 in -5.0..5.0f64, c2 in -5.0..5.0f64, a in 0.2..4.0f64, b in 0.2..4.0f64) {
        for s in [lie_family(c1, c2).unwrap(), darboux_weak(1).unwrap()] {
            let two = apply_deformation(&apply_deformation(&s, a).unwrap(), b).unwrap();
            let one = apply_deformation(&s, a * b).unwrap();
            let p = &s.sample_points()[0];
            let (x, y) = (two.values_at(p).unwrap(), one.values_at(p).unwrap());
            let scale = 1.0 + a * b * (1.0 + a * b);
            prop_assert!((&x.0 - &y.0).amax() < 1e-12 * scale);
            prop_assert!((&x.1 - &y.1).amax() < 1e-12 * scale);
            prop_assert!((&x.2 - &y.2).amax() < 1e-12 * scale);
            prop_assert!((&x.3 - &y.3).amax() < 1e-12 * scale);
        }
    }

    #[test]
    fn fits_follow_the_deformation_law(c1 in -5.0..5.0f64, c2 in -5.0..5.0f64, a in 0.2..4.0f64) {
        prop_assume!((c1 - c2).abs() > 0.1);
        let s = lie_family(c1, c2).unwrap();
        let c = classify_structure(&s, 1e-9).unwrap();
        prop_assert!(c.is_weakly_kmu(1e-9));
        let (kp, mp) = predict_kmu(c.kappa, c.mu.unwrap(), a).unwrap();
        let d = classify_structure(&apply_deformation(&s, a).unwrap(), 1e-9).unwrap();
        prop_assert!(d.is_weakly_kmu(1e-9));
        prop_assert!((d.kappa - kp).abs() < 1e-8 && (d.mu.unwrap() - mp).abs() < 1e-8);
    }

    #[test]
    fn fit_recovers_a_reconstructed_jacobi_operator(k0 in -5.0..1.0f64, m0 in -5.0..5.0f64, idx in 0..20usize) {
        let s = darboux_weak(2).unwrap();
        let mut t = derived_tensors(&s, &s.sample_points()[idx]).unwrap();
        t.l = t.projector() * k0 + &t.h * m0;
        let fit = fit_kappa_mu(&t, 1e-9).unwrap();
        prop_assert!((fit.kappa - k0).abs() < 1e-12);
        prop_assert!((fit.mu.unwrap() - m0).abs() < 1e-12);
    }
}

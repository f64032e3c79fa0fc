use proptest::prelude::*;

use super::*;
use crate::calculus::{index_tuples, TensorField, Variance};
use crate::fixtures;
use crate::scalar::{int, parse_expr, ChartRef, Monomial, Poly, ScalarExpr};

fn e(c: &ChartRef, s: &str) -> ScalarExpr {
    parse_expr(s, c).unwrap()
}

/// Polynomial of degree ≤ 2 from 15 small coefficients (4 variables).
fn quad(c: &ChartRef, coeffs: &[i64]) -> ScalarExpr {
    let mut exps: Vec<[u32; 4]> = vec![[0; 4]];
    for i in 0..4 {
        let mut m = [0; 4];
        m[i] = 1;
        exps.push(m);
    }
    for i in 0..4 {
        for j in i..4 {
            let mut m = [0; 4];
            m[i] += 1;
            m[j] += 1;
            exps.push(m);
        }
    }
    let mut p = Poly::zero(4);
    for (m, &k) in exps.iter().zip(coeffs) {
        p = &p + &Poly::term(Monomial::from_exps(m), int(k));
    }
    ScalarExpr::from_poly(c, p)
}

#[test]
fn brackets_and_sharp_by_hand() {
    let p = fixtures::golden_r4().unwrap();
    let c = p.chart().clone();
    let x = |i| ScalarExpr::var(&c, i);
    assert_eq!(p.bracket(&x(0), &x(1)).unwrap(), e(&c, "x3"));
    assert!(p.bracket(&x(0), &x(2)).unwrap().is_zero());
    assert!(p.bracket(&x(3), &x(3)).unwrap().is_zero());
    // dx2(Π♯ dx1) = ⟨Π, dx2∧dx1⟩ = −x3
    let s = p.sharp(&TensorField::coord_form(&c, 0)).unwrap();
    assert_eq!(s.get(&[1]), e(&c, "-x3"));
    // pairing: H_f g = {g, f}; normalized: H_f g = {f, g}
    let hx1 = p.hamiltonian(&x(0)).unwrap();
    assert_eq!(crate::calculus::apply_vector(&hx1, &x(1)).unwrap(), e(&c, "-x3"));
    let n = p.clone().with_convention(Convention::Normalized);
    let hx1 = n.hamiltonian(&x(0)).unwrap();
    assert_eq!(crate::calculus::apply_vector(&hx1, &x(1)).unwrap(), e(&c, "x3"));
    assert!(p.sharp(&TensorField::zero(&c, Variance::Form, 1)).unwrap().is_zero());
}

#[test]
fn wedge3_sharp_matches_self_bracket() {
    let p = fixtures::golden_r4().unwrap();
    let c = p.chart().clone();
    let w = p.wedge3_sharp(p.phi()).unwrap();
    // Hand expansion: ♯dx1 = −x3∂2, ♯dx2 = x3∂1, ♯dx3 = −x1∂4, ♯dx4 = x1∂3.
    assert_eq!(w.get(&[0, 1, 3]), e(&c, "-x1"));
    assert_eq!(w.get(&[1, 2, 3]), e(&c, "-x3"));
    assert_eq!(w.nnz(), 2);
    let zero = TensorField::zero(&c, Variance::Form, 3);
    assert!(p.wedge3_sharp(&zero).unwrap().is_zero());
}

#[test]
fn verify_fixtures() {
    for conv in [Convention::Pairing, Convention::Normalized] {
        let p = fixtures::golden_r4().unwrap().with_convention(conv);
        assert!(p.verify().passed(), "{}", p.verify());
    }
    assert!(fixtures::constant_poisson_plane().unwrap().verify().passed());
    let b = fixtures::golden_r4_broken().unwrap();
    let r = b.verify();
    assert!(!r.passed());
    assert_eq!(r.verdict("closed"), Some(&crate::report::Verdict::Pass));
    let w = r.get("structure").unwrap().witness.clone().unwrap();
    assert!(w.contains("at (1, 1, 1, 1)"), "{w}");
    assert!(matches!(
        TwistedPoissonStructure::new(b.pi().clone(), b.phi().clone()),
        Err(crate::Error::NotTwistedPoisson(_))
    ));
}

#[test]
fn anomaly_vanishes_on_coordinates() {
    let p = fixtures::golden_r4().unwrap();
    let c = p.chart().clone();
    let x = |i| ScalarExpr::var(&c, i);
    assert!(p.jacobi_anomaly(&x(0), &x(1), &x(2)).unwrap().is_zero());
    let n = p.clone().with_convention(Convention::Normalized);
    assert!(n.jacobi_anomaly(&x(0), &x(1), &x(3)).unwrap().is_zero());
}

#[test]
fn untwisted_variant_has_anomaly() {
    let p = fixtures::golden_r4_untwisted().unwrap();
    let c = p.chart().clone();
    // Hand computation: {{x1,x2},x4} = {x3,x4} = x1; cyclic partners vanish.
    let x = |i| ScalarExpr::var(&c, i);
    assert_eq!(p.jacobi_anomaly(&x(0), &x(1), &x(3)).unwrap(), e(&c, "x1"));
}

#[test]
fn prop_identity_on_coordinates() {
    for conv in [Convention::Pairing, Convention::Normalized] {
        let p = fixtures::golden_r4().unwrap().with_convention(conv);
        let c = p.chart().clone();
        let x = |i| ScalarExpr::var(&c, i);
        assert!(p.prop_commutator_residual(&x(0), &x(1), &x(3)).unwrap().is_zero());
    }
    let s = fixtures::constant_poisson_plane().unwrap();
    let c = s.chart().clone();
    let f = e(&c, "x1^2 + x2");
    let g = e(&c, "x1*x2");
    assert!(s.prop_commutator_residual(&f, &g, &e(&c, "x2^3")).unwrap().is_zero());
}

#[test]
fn algebroid_bracket_by_hand() {
    let p = fixtures::golden_r4().unwrap();
    let c = p.chart().clone();
    // ♯dx1 = −x3∂2, ♯dx2 = x3∂1:
    // ℒ_{♯dx1}dx2 = −dx3, ℒ_{♯dx2}dx1 = dx3, dΠ(dx1,dx2) = dx3, φ(♯dx1,♯dx2,·) = −dx3.
    let b = algebroid_bracket(&p, &TensorField::coord_form(&c, 0), &TensorField::coord_form(&c, 1)).unwrap();
    assert!(b.is_zero(), "{b}");
    // [dx1, dx3]: ♯dx3 = −x1∂4; ℒ_{−x3∂2}dx3 = 0, ℒ_{−x1∂4}dx1 = 0, Π(dx1,dx3) = 0,
    // φ(−x3∂2, −x1∂4, ·) = x1x3 φ_{2,4,k} dx_k = 0.
    let b = algebroid_bracket(&p, &TensorField::coord_form(&c, 0), &TensorField::coord_form(&c, 2)).unwrap();
    assert!(b.is_zero());
    let a = TensorField::coord_form(&c, 1).scale(&e(&c, "x1*x4"));
    assert!(algebroid_bracket(&p, &a, &a).unwrap().is_zero());
}

#[test]
fn algebroid_on_constant_plane() {
    let p = fixtures::constant_poisson_plane().unwrap();
    let c = p.chart().clone();
    let coframe: Vec<_> = (0..2).map(|i| TensorField::coord_form(&c, i)).collect();
    assert!(algebroid_bracket(&p, &coframe[0], &coframe[1]).unwrap().is_zero());
    assert!(check_algebroid_axioms(&p, &coframe).unwrap().passed());
}

#[test]
fn algebroid_axioms_with_nonexact_forms() {
    let p = fixtures::golden_r4().unwrap();
    let c = p.chart().clone();
    let alphas = vec![
        TensorField::coord_form(&c, 0),
        TensorField::coord_form(&c, 2),
        TensorField::coord_form(&c, 0).scale(&e(&c, "x2")),
    ];
    let r = check_algebroid_axioms(&p, &alphas).unwrap();
    assert!(r.passed(), "{r}");
    let broken = fixtures::golden_r4_untwisted().unwrap();
    let coframe: Vec<_> = (0..4).map(|i| TensorField::coord_form(&c, i)).collect();
    assert!(!check_algebroid_axioms(&broken, &coframe).unwrap().passed());
}

#[test]
fn induced_action_identity() {
    let p = fixtures::golden_r4().unwrap();
    let c = p.chart().clone();
    let id = crate::calculus::PolyMap::identity(&c);
    let a = TensorField::coord_form(&c, 3).scale(&e(&c, "x2"));
    assert_eq!(induced_action(&id, &p, &a).unwrap(), p.anchor(&a).unwrap());
    assert!(induced_action(&id, &p, &TensorField::zero(&c, Variance::Form, 1)).unwrap().is_zero());
}

#[test]
fn sharp_is_pairing_consistent() {
    let p = fixtures::golden_r4().unwrap();
    let c = p.chart().clone();
    for t in index_tuples(4, 2) {
        let (a, b) = (TensorField::coord_form(&c, t[0]), TensorField::coord_form(&c, t[1]));
        let lhs = crate::calculus::apply_vector(&p.anchor(&a).unwrap(), &ScalarExpr::var(&c, t[1])).unwrap();
        let rhs = crate::calculus::pairing(p.pi(), &crate::calculus::wedge(&b, &a).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn prop_identity_random_quadratics(
        a in prop::collection::vec(-3i64..=3, 15),
        b in prop::collection::vec(-3i64..=3, 15),
        h in prop::collection::vec(-3i64..=3, 15),
    ) {
        let p = fixtures::golden_r4().unwrap();
        let c = p.chart().clone();
        let (f, g, h) = (quad(&c, &a), quad(&c, &b), quad(&c, &h));
        prop_assert!(p.prop_commutator_residual(&f, &g, &h).unwrap().is_zero());
        prop_assert!(p.jacobi_anomaly(&f, &g, &h).unwrap().is_zero());
    }

    #[test]
    fn bracket_leibniz_and_derivation(
        a in prop::collection::vec(-3i64..=3, 15),
        b in prop::collection::vec(-3i64..=3, 15),
        h in prop::collection::vec(-3i64..=3, 15),
    ) {
        let p = fixtures::golden_r4().unwrap();
        let c = p.chart().clone();
        let (f, g, h) = (quad(&c, &a), quad(&c, &b), quad(&c, &h));
        let lhs = p.bracket(&f, &(&g * &h)).unwrap();
        let rhs = &(&p.bracket(&f, &g).unwrap() * &h) + &(&g * &p.bracket(&f, &h).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert!(p.bracket(&f, &g).unwrap() == -p.bracket(&g, &f).unwrap());
        let hf = p.hamiltonian(&f).unwrap();
        let d = |u: &ScalarExpr| crate::calculus::apply_vector(&hf, u).unwrap();
        prop_assert_eq!(d(&(&g * &h)), &(&d(&g) * &h) + &(&g * &d(&h)));
    }

    #[test]
    fn exact_bracket_formula(
        a in prop::collection::vec(-2i64..=2, 15),
        b in prop::collection::vec(-2i64..=2, 15),
    ) {
        let p = fixtures::golden_r4().unwrap();
        let c = p.chart().clone();
        prop_assert!(exact_bracket_residual(&p, &quad(&c, &a), &quad(&c, &b)).unwrap().is_zero());
    }
}

#[test]
fn coordinate_monomials_count() {
    let c = crate::fixtures::r4();
    let ms = super::coordinate_monomials(&c, 2);
    assert_eq!(ms.len(), 14);
    let set: std::collections::HashSet<_> = ms.iter().collect();
    assert_eq!(set.len(), 14);
}

#[test]
fn anomaly_search_finds_broken() {
    let broken = crate::fixtures::golden_r4_broken().unwrap();
    let (triple, a) = broken.anomaly_search(2).unwrap().expect("broken fixture has an anomaly");
    assert!(!a.is_zero(), "{triple:?}");
}

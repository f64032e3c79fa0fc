//! Twisted Dirac structures on `TM ⊕ T*M`, given by `n` spanning sections.
//!
//! `B♭(X) = i_X B` throughout. The gauge transform of a `φ`-twisted structure
//! is `(φ + dB)`-twisted under this convention and the Courant bracket below.

use num_traits::Zero;
use rayon::prelude::*;

use crate::calculus::{commutator, ext_d, interior, lie_derivative, PolyMap, TensorField, Variance};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poisson::{residual_witness, TwistedPoissonStructure, TwistedSymplecticStructure};
use crate::report::Report;
use crate::sampling::fmt_point;
use crate::scalar::{ensure_same_chart, ChartRef, Rational, ScalarExpr};

/// A section `(X, ξ)` of `TM ⊕ T*M`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracSection {
    pub vec: TensorField,
    pub form: TensorField,
}

impl DiracSection {
    pub fn new(vec: TensorField, form: TensorField) -> Result<Self> {
        vec.ensure_variance(Variance::Multivector)?;
        vec.ensure_degree(1)?;
        form.ensure_variance(Variance::Form)?;
        form.ensure_degree(1)?;
        ensure_same_chart(vec.chart(), form.chart())?;
        Ok(DiracSection { vec, form })
    }

    pub fn chart(&self) -> &ChartRef {
        self.vec.chart()
    }

    /// Coefficients `(X^1..X^n, ξ_1..ξ_n)` at a point.
    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.vec.dim();
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            out.push(self.vec.get(&[i]).eval(point)?);
        }
        for i in 0..n {
            out.push(self.form.get(&[i]).eval(point)?);
        }
        Ok(out)
    }

    fn coefficients(&self) -> impl Iterator<Item = ScalarExpr> + '_ {
        let n = self.vec.dim();
        (0..n)
            .map(|i| self.vec.get(&[i]))
            .chain((0..n).map(|i| self.form.get(&[i])))
    }
}

/// `n` sections spanning a subbundle of `TM ⊕ T*M`.
#[derive(Clone, Debug)]
pub struct DiracStructure {
    chart: ChartRef,
    sections: Vec<DiracSection>,
}

impl DiracStructure {
    /// Requires exactly `dim` sections on `chart`; isotropy and closure are left to [`check_dirac`].
    pub fn new(chart: &ChartRef, sections: Vec<DiracSection>) -> Result<Self> {
        if sections.len() != chart.dim() {
            return Err(Error::Dimension(format!(
                "a Dirac frame on a {}-dimensional chart needs {} sections, got {}",
                chart.dim(),
                chart.dim(),
                sections.len()
            )));
        }
        for s in &sections {
            ensure_same_chart(s.chart(), chart)?;
        }
        Ok(DiracStructure {
            chart: chart.clone(),
            sections,
        })
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn sections(&self) -> &[DiracSection] {
        &self.sections
    }

    /// One row per section, `2n` columns.
    pub fn frame_at(&self, point: &[Rational]) -> Result<Matrix<Rational>> {
        self.sections.iter().map(|s| s.eval(point)).collect()
    }

    /// Every coefficient of every section, for pole-avoiding sampling.
    pub fn coefficients(&self) -> Vec<ScalarExpr> {
        self.sections.iter().flat_map(|s| s.coefficients()).collect()
    }
}

/// `⟨(X,ξ),(Y,η)⟩ = η(X) + ξ(Y)`.
pub fn sym_pairing(s1: &DiracSection, s2: &DiracSection) -> Result<ScalarExpr> {
    ensure_same_chart(s1.chart(), s2.chart())?;
    let a = interior(&s1.vec, &s2.form)?.as_scalar();
    let b = interior(&s2.vec, &s1.form)?.as_scalar();
    Ok(&a + &b)
}

/// `⟦(X,ξ),(Y,η)⟧ = ([X,Y], ℒ_Xη − i_Y dξ + i_X i_Y φ)`.
pub fn courant_bracket(s1: &DiracSection, s2: &DiracSection, phi: &TensorField) -> Result<DiracSection> {
    ensure_same_chart(s1.chart(), s2.chart())?;
    phi.ensure_variance(Variance::Form)?;
    phi.ensure_degree(3)?;
    ensure_same_chart(s1.chart(), phi.chart())?;
    let v = commutator(&s1.vec, &s2.vec)?;
    let mut f = lie_derivative(&s1.vec, &s2.form)?.checked_sub(&interior(&s2.vec, &ext_d(&s1.form)?)?)?;
    if !phi.is_zero() {
        f = f.checked_add(&interior(&s1.vec, &interior(&s2.vec, phi)?)?)?;
    }
    DiracSection::new(v, f)
}

/// `L_Π`: sections `(♯dx_i, dx_i)` with the algebroid anchor.
pub fn graph_of_bivector(p: &TwistedPoissonStructure) -> Result<DiracStructure> {
    let c = p.chart();
    let sections = (0..c.dim())
        .map(|i| {
            let a = TensorField::coord_form(c, i);
            DiracSection::new(p.anchor(&a)?, a)
        })
        .collect::<Result<_>>()?;
    DiracStructure::new(c, sections)
}

/// `L_ω`: sections `(∂_i, i_{∂_i}ω)`.
pub fn graph_of_form(s: &TwistedSymplecticStructure) -> Result<DiracStructure> {
    let c = s.chart();
    let sections = (0..c.dim())
        .map(|i| {
            let v = TensorField::coord_vector(c, i);
            let f = interior(&v, s.omega())?;
            DiracSection::new(v, f)
        })
        .collect::<Result<_>>()?;
    DiracStructure::new(c, sections)
}

/// Isotropy (symbolic), rank `n` and bracket closure at each sample.
pub fn check_dirac(l: &DiracStructure, phi: &TensorField, samples: &[Vec<Rational>]) -> Result<Report> {
    let n = l.chart.dim();
    let secs = &l.sections;
    let mut r = Report::new();

    let mut iso_bad = None;
    'iso: for i in 0..n {
        for j in i..n {
            let v = sym_pairing(&secs[i], &secs[j])?;
            if !v.is_zero() {
                iso_bad = Some((i, j, v));
                break 'iso;
            }
        }
    }
    match iso_bad {
        None => r.pass("isotropy"),
        Some((i, j, v)) => r.fail(
            "isotropy",
            residual_witness(&format!("<s{}, s{}>", i + 1, j + 1), &TensorField::function(v)),
        ),
    }

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let brackets: Vec<DiracSection> = pairs
        .par_iter()
        .map(|&(i, j)| courant_bracket(&secs[i], &secs[j], phi))
        .collect::<Result<_>>()?;

    let per_sample: Vec<(Option<String>, Option<String>)> = samples
        .par_iter()
        .map(|x| -> Result<_> {
            let frame = l.frame_at(x)?;
            let rk = linalg::rank(&frame, 2 * n);
            let rank_fail = (rk != n).then(|| format!("rank {rk} at {}", fmt_point(x)));
            // Columns of the system are the sections, so transpose the frame.
            let system = linalg::transpose(&frame, 2 * n);
            let mut closure_fail = None;
            for (b, &(i, j)) in brackets.iter().zip(&pairs) {
                let rhs = b.eval(x)?;
                if linalg::solve(&system, n, &rhs, &Rational::zero()).is_none() {
                    closure_fail = Some(format!(
                        "[[s{}, s{}]] not in span at {}",
                        i + 1,
                        j + 1,
                        fmt_point(x)
                    ));
                    break;
                }
            }
            Ok((rank_fail, closure_fail))
        })
        .collect::<Result<_>>()?;

    let first = |k: usize| {
        per_sample
            .iter()
            .find_map(|p| if k == 0 { p.0.clone() } else { p.1.clone() })
    };
    match first(0) {
        None => r.pass("rank"),
        Some(w) => r.fail("rank", w),
    }
    match first(1) {
        None => r.pass("closure"),
        Some(w) => r.fail("closure", w),
    }
    r.value("samples", samples.len());
    Ok(r)
}

/// `τ_B(L)`: sections `(X, ξ + i_X B)`.
pub fn gauge_transform(l: &DiracStructure, b: &TensorField) -> Result<DiracStructure> {
    b.ensure_variance(Variance::Form)?;
    b.ensure_degree(2)?;
    ensure_same_chart(b.chart(), &l.chart)?;
    let sections = l
        .sections
        .iter()
        .map(|s| DiracSection::new(s.vec.clone(), s.form.checked_add(&interior(&s.vec, b)?)?))
        .collect::<Result<_>>()?;
    DiracStructure::new(&l.chart, sections)
}

/// Matrices `(S, F)` of the anchor and of `B♭` on coordinate bases: `(♯α)^j = Σ_i S[j][i] α_i`,
/// `(i_X B)_j = Σ_i F[j][i] X^i`.
fn sharp_and_flat(p: &TwistedPoissonStructure, b: &TensorField) -> (Matrix<ScalarExpr>, Matrix<ScalarExpr>) {
    let n = p.dim();
    let s = p.pi_matrix();
    let f = (0..n)
        .map(|j| (0..n).map(|i| b.get_any(&[i, j])).collect())
        .collect();
    (s, f)
}

/// `det(1 + B♭Π♯)` as a rational function.
pub fn gauge_determinant(p: &TwistedPoissonStructure, b: &TensorField) -> Result<ScalarExpr> {
    ensure_same_chart(b.chart(), p.chart())?;
    let z = ScalarExpr::zero(p.chart());
    let (s, f) = sharp_and_flat(p, b);
    let t = add_identity(linalg::mat_mul(&f, &s, &z));
    Ok(linalg::det(&t, &z))
}

fn add_identity(mut m: Matrix<ScalarExpr>) -> Matrix<ScalarExpr> {
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = &row[i] + &ScalarExpr::one(row[i].chart());
    }
    m
}

/// `τ_B(Π) = Π∘(1 + B♭Π♯)⁻¹` with 3-form `φ + dB`; the result is re-verified.
///
/// `NotInvertible` carries the determinant when it vanishes identically.
pub fn gauge_bivector(p: &TwistedPoissonStructure, b: &TensorField) -> Result<TwistedPoissonStructure> {
    b.ensure_variance(Variance::Form)?;
    b.ensure_degree(2)?;
    ensure_same_chart(b.chart(), p.chart())?;
    let c = p.chart();
    let n = p.dim();
    let z = ScalarExpr::zero(c);
    let (s, f) = sharp_and_flat(p, b);
    let t = add_identity(linalg::mat_mul(&f, &s, &z));
    let t_inv = linalg::inverse(&t, &z)?;
    let s_new = linalg::mat_mul(&s, &t_inv, &z);
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            entries.push((vec![i, j], s_new[i][j].clone()));
        }
    }
    let pi = TensorField::from_entries(c, Variance::Multivector, 2, entries)?;
    let phi = p.phi().checked_add(&ext_d(b)?)?;
    Ok(TwistedPoissonStructure::new(pi, phi)?.with_convention(p.convention()))
}

/// Residual `Π'(1 + B♭Π♯) − Π` of the defining matrix identity, entrywise.
pub fn gauge_identity_residual(
    p: &TwistedPoissonStructure,
    b: &TensorField,
    gauged: &TwistedPoissonStructure,
) -> Result<Matrix<ScalarExpr>> {
    let z = ScalarExpr::zero(p.chart());
    let (s, f) = sharp_and_flat(p, b);
    let t = add_identity(linalg::mat_mul(&f, &s, &z));
    let lhs = linalg::mat_mul(&gauged.pi_matrix(), &t, &z);
    Ok(lhs
        .iter()
        .zip(&s)
        .map(|(l, r)| l.iter().zip(r).map(|(a, b)| a - b).collect())
        .collect())
}

/// Fiber `{(dJ·V, α) : (V, dJᵀα) ∈ L_x}` as a basis of rows `(w^1..w^m, α_1..α_m)`.
pub fn forward_image_at(j: &PolyMap, l: &DiracStructure, x: &[Rational]) -> Result<Matrix<Rational>> {
    ensure_same_chart(j.domain(), &l.chart)?;
    let n = l.chart.dim();
    let m = j.codomain().dim();
    let jac = j.jacobian_at(x)?;
    let frame = l.frame_at(x)?;
    // Unknowns (c_1..c_n, α_1..α_m): Σ c_i ξ_i − dJᵀα = 0.
    let mut system = vec![vec![Rational::zero(); n + m]; n];
    for (k, row) in system.iter_mut().enumerate() {
        for i in 0..n {
            row[i] = frame[i][n + k].clone();
        }
        for a in 0..m {
            row[n + a] = -&jac[a][k];
        }
    }
    let kernel = linalg::nullspace(&system, n + m, &Rational::zero());
    let mut rows = Vec::with_capacity(kernel.len());
    for v in &kernel {
        let mut out = vec![Rational::zero(); 2 * m];
        for a in 0..m {
            let mut w = Rational::zero();
            for i in 0..n {
                let vi: Rational = (0..n).map(|s| &v[s] * &frame[s][i]).sum();
                w += &jac[a][i] * vi;
            }
            out[a] = w;
            out[m + a] = v[n + a].clone();
        }
        rows.push(out);
    }
    Ok(linalg::row_basis(&rows, 2 * m))
}

/// Whether two frames span the same fiber at `x`.
pub fn same_fiber_at(a: &DiracStructure, b: &DiracStructure, x: &[Rational]) -> Result<bool> {
    ensure_same_chart(&a.chart, &b.chart)?;
    let n = a.chart.dim();
    Ok(linalg::same_row_span(&a.frame_at(x)?, &b.frame_at(x)?, 2 * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::wedge;
    use crate::fixtures;
    use crate::sampling::{regular_points, Sampler};
    use crate::scalar::{int, parse_expr, rat, Chart};

    fn e(c: &ChartRef, s: &str) -> ScalarExpr {
        parse_expr(s, c).unwrap()
    }

    fn dx(c: &ChartRef, i: usize) -> TensorField {
        TensorField::coord_form(c, i)
    }

    fn dd(c: &ChartRef, i: usize) -> TensorField {
        TensorField::coord_vector(c, i)
    }

    fn zero_v(c: &ChartRef) -> TensorField {
        TensorField::zero(c, Variance::Multivector, 1)
    }

    fn zero_f(c: &ChartRef) -> TensorField {
        TensorField::zero(c, Variance::Form, 1)
    }

    fn samples(l: &DiracStructure, count: usize) -> Vec<Vec<Rational>> {
        let mut s = Sampler::new(11);
        regular_points(&mut s, l.chart().dim(), count, &l.coefficients()).unwrap()
    }

    #[test]
    fn pairing_values() {
        let c = Chart::numbered("R3", "x", 3).unwrap();
        let a = DiracSection::new(dd(&c, 0), zero_f(&c)).unwrap();
        let b = DiracSection::new(zero_v(&c), dx(&c, 0)).unwrap();
        assert!(sym_pairing(&a, &b).unwrap().is_one());
        let p = DiracSection::new(dd(&c, 0), dx(&c, 0)).unwrap();
        let q = DiracSection::new(dd(&c, 0), dx(&c, 0).neg()).unwrap();
        assert!(sym_pairing(&p, &q).unwrap().is_zero());
        assert_eq!(sym_pairing(&a, &p).unwrap(), sym_pairing(&p, &a).unwrap());
    }

    #[test]
    fn courant_on_coordinate_fields() {
        let c = Chart::numbered("R3", "x", 3).unwrap();
        let s1 = DiracSection::new(dd(&c, 0), zero_f(&c)).unwrap();
        let s2 = DiracSection::new(dd(&c, 1), zero_f(&c)).unwrap();
        let zero3 = TensorField::zero(&c, Variance::Form, 3);
        let b = courant_bracket(&s1, &s2, &zero3).unwrap();
        assert!(b.vec.is_zero() && b.form.is_zero());
        // i_{∂1} i_{∂2} (dx1∧dx2∧dx3) = i_{∂1}(−dx1∧dx3) = −dx3.
        let phi = wedge(&wedge(&dx(&c, 0), &dx(&c, 1)).unwrap(), &dx(&c, 2)).unwrap();
        let b = courant_bracket(&s1, &s2, &phi).unwrap();
        assert!(b.vec.is_zero());
        assert_eq!(b.form, dx(&c, 2).neg());
        let f = e(&c, "x1*x2^2");
        let g = e(&c, "x3 - x1^3");
        let u = DiracSection::new(zero_v(&c), TensorField::differential(&f)).unwrap();
        let w = DiracSection::new(zero_v(&c), TensorField::differential(&g)).unwrap();
        let b = courant_bracket(&u, &w, &phi).unwrap();
        assert!(b.vec.is_zero() && b.form.is_zero());
    }

    #[test]
    fn graphs_of_plane_structures() {
        let p = fixtures::constant_poisson_plane().unwrap();
        let c = p.chart().clone();
        let l = graph_of_bivector(&p).unwrap();
        // ♯dx1 = −∂2, ♯dx2 = ∂1 under β(♯α) = ⟨Π, β∧α⟩.
        assert_eq!(l.sections()[0].vec, dd(&c, 1).neg());
        assert_eq!(l.sections()[1].vec, dd(&c, 0));
        let s = fixtures::constant_symplectic_plane(&c).unwrap();
        let g = graph_of_form(&s).unwrap();
        assert_eq!(g.sections()[0].form, dx(&c, 1));
        assert_eq!(g.sections()[1].form, dx(&c, 0).neg());
        let inv = s.to_poisson().unwrap();
        let gi = graph_of_bivector(&inv).unwrap();
        for x in samples(&g, 3) {
            assert!(same_fiber_at(&g, &gi, &x).unwrap());
        }
        let zero = fixtures::zero_poisson(&c).unwrap();
        let t = graph_of_bivector(&zero).unwrap();
        assert!(t.sections().iter().all(|s| s.vec.is_zero()));
    }

    #[test]
    fn degenerate_form_graph_still_isotropic() {
        let c = fixtures::plane("R2", "x");
        let w = wedge(&dx(&c, 0), &dx(&c, 1)).unwrap().scale(&e(&c, "x1"));
        let s = TwistedSymplecticStructure::new_unchecked(w).unwrap();
        let l = graph_of_form(&s).unwrap();
        let r = check_dirac(&l, s.psi(), &[vec![int(0), int(1)], vec![int(1), int(1)]]).unwrap();
        assert_eq!(r.verdict("isotropy"), Some(&crate::report::Verdict::Pass));
        assert_eq!(r.verdict("rank"), Some(&crate::report::Verdict::Pass));
    }

    #[test]
    fn example_graph_is_dirac() {
        let p = fixtures::golden_r4().unwrap();
        let l = graph_of_bivector(&p).unwrap();
        let xs = samples(&l, 4);
        let r = check_dirac(&l, p.phi(), &xs).unwrap();
        assert!(r.passed(), "{r}");
        let untwisted = TensorField::zero(p.chart(), Variance::Form, 3);
        let ones = vec![int(1); 4];
        let r = check_dirac(&l, &untwisted, &[ones]).unwrap();
        assert!(!r.passed());
        assert!(r.get("closure").unwrap().witness.as_ref().unwrap().contains("(1, 1, 1, 1)"));
    }

    #[test]
    fn tangent_bundle_is_dirac() {
        let c = fixtures::r4();
        let secs = (0..4)
            .map(|i| DiracSection::new(dd(&c, i), zero_f(&c)).unwrap())
            .collect();
        let l = DiracStructure::new(&c, secs).unwrap();
        let zero3 = TensorField::zero(&c, Variance::Form, 3);
        assert!(check_dirac(&l, &zero3, &samples(&l, 2)).unwrap().passed());
    }

    #[test]
    fn gauge_additive_and_invertible() {
        let p = fixtures::golden_r4().unwrap();
        let c = p.chart().clone();
        let l = graph_of_bivector(&p).unwrap();
        let b1 = wedge(&dx(&c, 0), &dx(&c, 1)).unwrap().scale(&e(&c, "x4"));
        let b2 = wedge(&dx(&c, 1), &dx(&c, 3)).unwrap();
        let both = b1.checked_add(&b2).unwrap();
        let lhs = gauge_transform(&gauge_transform(&l, &b1).unwrap(), &b2).unwrap();
        let rhs = gauge_transform(&l, &both).unwrap();
        assert_eq!(lhs.sections(), rhs.sections());
        let back = gauge_transform(&gauge_transform(&l, &both).unwrap(), &both.neg()).unwrap();
        assert_eq!(back.sections(), l.sections());
        let zero2 = TensorField::zero(&c, Variance::Form, 2);
        assert_eq!(gauge_transform(&l, &zero2).unwrap().sections(), l.sections());
    }

    #[test]
    fn gauge_bivector_plane() {
        let p = fixtures::constant_poisson_plane().unwrap();
        let c = p.chart().clone();
        let w = wedge(&dx(&c, 0), &dx(&c, 1)).unwrap();
        for k in [int(1), int(-2), rat(1, 3)] {
            let b = w.scale_rational(&k);
            let g = gauge_bivector(&p, &b).unwrap();
            // Π' = Π / (1 + c).
            let expect = (int(1) + &k).recip();
            assert_eq!(g.pi().get(&[0, 1]), ScalarExpr::constant(&c, expect));
            assert!(gauge_identity_residual(&p, &b, &g)
                .unwrap()
                .iter()
                .flatten()
                .all(ScalarExpr::is_zero));
        }
        let det = gauge_determinant(&p, &w.scale_rational(&int(-1))).unwrap();
        assert!(det.is_zero());
        assert!(matches!(
            gauge_bivector(&p, &w.scale_rational(&int(-1))),
            Err(Error::NotInvertible { .. })
        ));
        let zero2 = TensorField::zero(&c, Variance::Form, 2);
        let same = gauge_bivector(&p, &zero2).unwrap();
        assert_eq!(same.pi(), p.pi());
    }

    #[test]
    fn gauge_bivector_matches_gauged_graph() {
        let p = fixtures::golden_r4().unwrap();
        let c = p.chart().clone();
        let b = &wedge(&dx(&c, 0), &dx(&c, 1)).unwrap().scale(&e(&c, "x4")) + &wedge(&dx(&c, 1), &dx(&c, 3)).unwrap();
        let g = gauge_bivector(&p, &b).unwrap();
        assert!(g.verify().passed());
        let lg = graph_of_bivector(&g).unwrap();
        let tl = gauge_transform(&graph_of_bivector(&p).unwrap(), &b).unwrap();
        let mut coeffs = lg.coefficients();
        coeffs.extend(tl.coefficients());
        let xs = regular_points(&mut Sampler::new(3), 4, 5, &coeffs).unwrap();
        for x in &xs {
            assert!(same_fiber_at(&lg, &tl, x).unwrap());
        }
        assert!(check_dirac(&tl, g.phi(), &xs[..2]).unwrap().passed());
    }

    #[test]
    fn forward_images() {
        let p = fixtures::golden_r4().unwrap();
        let c = p.chart().clone();
        let l = graph_of_bivector(&p).unwrap();
        let x = vec![int(1), int(2), int(3), int(4)];
        let id = PolyMap::identity(&c);
        let img = forward_image_at(&id, &l, &x).unwrap();
        assert!(linalg::same_row_span(&img, &l.frame_at(&x).unwrap(), 8));
        // Constant map: V arbitrary in L_x with dJᵀα = 0 forces only ξ = 0, image {0} ⊕ T*.
        let pt = fixtures::plane("Q", "y");
        let k = PolyMap::new(&c, &pt, vec![ScalarExpr::one(&c), ScalarExpr::zero(&c)]).unwrap();
        let img = forward_image_at(&k, &l, &x).unwrap();
        assert_eq!(img.len(), 2);
        assert!(img.iter().all(|r| r[0].is_zero() && r[1].is_zero()));
    }
}

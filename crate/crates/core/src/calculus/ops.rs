//! Exterior algebra operations.
//!
//! Conventions: `⟨∂_I, dx_J⟩ = δ_IJ` on sorted tuples (determinant convention);
//! `(i_V ω)_J = Σ_I V^I ω_{I∪J}` with `V` in the leading slots;
//! `ω(X1, …, Xk) = i_Xk ⋯ i_X1 ω`.

use super::tensor::{sort_sign, TensorField, Variance};
use crate::error::{Error, Result};
use crate::scalar::{ensure_same_chart, ScalarExpr};

pub fn wedge(a: &TensorField, b: &TensorField) -> Result<TensorField> {
    ensure_same_chart(a.chart(), b.chart())?;
    if a.variance() != b.variance() {
        return Err(Error::VarianceMismatch {
            expected: a.variance().name(),
            found: b.variance().name(),
        });
    }
    let mut out = TensorField::zero(a.chart(), a.variance(), a.degree() + b.degree());
    let mut idx = Vec::with_capacity(a.degree() + b.degree());
    for (i, ca) in a.iter() {
        for (j, cb) in b.iter() {
            if i.iter().any(|x| j.contains(x)) {
                continue;
            }
            idx.clear();
            idx.extend_from_slice(i);
            idx.extend_from_slice(j);
            out.accumulate(&idx, ca * cb);
        }
    }
    Ok(out)
}

/// Wedge of a list of fields of one variance; empty list gives the constant 1.
pub fn wedge_all(chart: &crate::scalar::ChartRef, variance: Variance, fs: &[&TensorField]) -> Result<TensorField> {
    let mut acc = TensorField::scalar(ScalarExpr::one(chart), variance);
    for f in fs {
        acc = wedge(&acc, f)?;
        if acc.is_zero() {
            let total = fs.iter().map(|f| f.degree()).sum();
            return Ok(TensorField::zero(chart, variance, total));
        }
    }
    Ok(acc)
}

/// Full contraction `⟨A, ω⟩` of a k-multivector with a k-form.
pub fn pairing(mv: &TensorField, fm: &TensorField) -> Result<ScalarExpr> {
    mv.ensure_variance(Variance::Multivector)?;
    fm.ensure_variance(Variance::Form)?;
    ensure_same_chart(mv.chart(), fm.chart())?;
    if mv.degree() != fm.degree() {
        return Err(Error::DegreeMismatch(format!(
            "pairing a degree-{} multivector with a degree-{} form",
            mv.degree(),
            fm.degree()
        )));
    }
    let mut acc = ScalarExpr::zero(mv.chart());
    for (i, c) in mv.iter() {
        let d = fm.get(i);
        if !d.is_zero() {
            acc = &acc + &(c * &d);
        }
    }
    Ok(acc)
}

/// Contract `inner` into the leading slots of `outer` (opposite variances).
fn contract(inner: &TensorField, outer: &TensorField) -> Result<TensorField> {
    ensure_same_chart(inner.chart(), outer.chart())?;
    if inner.degree() > outer.degree() {
        return Err(Error::DegreeMismatch(format!(
            "cannot contract degree {} into degree {}",
            inner.degree(),
            outer.degree()
        )));
    }
    let k = outer.degree() - inner.degree();
    let mut out = TensorField::zero(outer.chart(), outer.variance(), k);
    let mut full = Vec::with_capacity(outer.degree());
    for (i, ci) in inner.iter() {
        for (kk, co) in outer.iter() {
            if !i.iter().all(|x| kk.contains(x)) {
                continue;
            }
            let rest: Vec<usize> = kk.iter().copied().filter(|x| !i.contains(x)).collect();
            full.clear();
            full.extend_from_slice(i);
            full.extend_from_slice(&rest);
            let (s, _) = sort_sign(&full).expect("distinct indices");
            let term = ci * co;
            out.accumulate(&rest, if s < 0 { -term } else { term });
        }
    }
    Ok(out)
}

/// Interior product `i_V ω` of a p-multivector into a k-form.
pub fn interior(v: &TensorField, fm: &TensorField) -> Result<TensorField> {
    v.ensure_variance(Variance::Multivector)?;
    fm.ensure_variance(Variance::Form)?;
    contract(v, fm)
}

/// Interior product `i_α A` of a p-form into a k-multivector.
pub fn interior_form(alpha: &TensorField, mv: &TensorField) -> Result<TensorField> {
    alpha.ensure_variance(Variance::Form)?;
    mv.ensure_variance(Variance::Multivector)?;
    contract(alpha, mv)
}

/// `ω(X1, …, Xk)`.
pub fn eval_form(fm: &TensorField, vs: &[&TensorField]) -> Result<ScalarExpr> {
    if vs.len() != fm.degree() {
        return Err(Error::DegreeMismatch(format!(
            "{}-form evaluated on {} vectors",
            fm.degree(),
            vs.len()
        )));
    }
    let mut acc = fm.clone();
    for v in vs {
        v.ensure_degree(1)?;
        acc = interior(v, &acc)?;
    }
    Ok(acc.as_scalar())
}

/// `A(α1, …, αk)`.
pub fn eval_multivector(mv: &TensorField, forms: &[&TensorField]) -> Result<ScalarExpr> {
    if forms.len() != mv.degree() {
        return Err(Error::DegreeMismatch(format!(
            "{}-multivector evaluated on {} forms",
            mv.degree(),
            forms.len()
        )));
    }
    let mut acc = mv.clone();
    for a in forms {
        a.ensure_degree(1)?;
        acc = interior_form(a, &acc)?;
    }
    Ok(acc.as_scalar())
}

pub fn ext_d(fm: &TensorField) -> Result<TensorField> {
    fm.ensure_variance(Variance::Form)?;
    let n = fm.dim();
    let mut out = TensorField::zero(fm.chart(), Variance::Form, fm.degree() + 1);
    let mut idx = Vec::with_capacity(fm.degree() + 1);
    for (j, c) in fm.iter() {
        for i in 0..n {
            if j.contains(&i) {
                continue;
            }
            let d = c.partial(i);
            if d.is_zero() {
                continue;
            }
            idx.clear();
            idx.push(i);
            idx.extend_from_slice(j);
            out.accumulate(&idx, d);
        }
    }
    Ok(out)
}

/// `X(f) = Σ X^i ∂_i f`.
pub fn apply_vector(x: &TensorField, f: &ScalarExpr) -> Result<ScalarExpr> {
    x.ensure_variance(Variance::Multivector)?;
    x.ensure_degree(1)?;
    ensure_same_chart(x.chart(), f.chart())?;
    let mut acc = ScalarExpr::zero(f.chart());
    for (i, c) in x.iter() {
        let d = f.partial(i[0]);
        if !d.is_zero() {
            acc = &acc + &(c * &d);
        }
    }
    Ok(acc)
}

/// Vector-field commutator `[X, Y]`.
pub fn commutator(x: &TensorField, y: &TensorField) -> Result<TensorField> {
    x.ensure_degree(1)?;
    y.ensure_degree(1)?;
    let chart = x.chart();
    let mut out = TensorField::zero(chart, Variance::Multivector, 1);
    for j in 0..x.dim() {
        let c = &apply_vector(x, &y.get(&[j]))? - &apply_vector(y, &x.get(&[j]))?;
        out.accumulate(&[j], c);
    }
    Ok(out)
}

/// Cartan formula `ℒ_X = i_X d + d i_X`.
pub fn lie_derivative(x: &TensorField, fm: &TensorField) -> Result<TensorField> {
    x.ensure_variance(Variance::Multivector)?;
    x.ensure_degree(1)?;
    fm.ensure_variance(Variance::Form)?;
    let a = interior(x, &ext_d(fm)?)?;
    if fm.degree() == 0 {
        return Ok(a);
    }
    let b = ext_d(&interior(x, fm)?)?;
    a.checked_add(&b)
}

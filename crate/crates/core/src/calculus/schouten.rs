//! Schouten–Nijenhuis bracket by decomposable expansion.
//!
//! A term `a ∂_{i1}∧…∧∂_{ip}` is read as `X1∧…∧Xp` with `X1 = a∂_{i1}` and
//! `Xk = ∂_{ik}` otherwise; brackets of decomposables are
//! `Σ (−1)^{i+j} [Xi, Yj] ∧ X1…X̂i…Xp ∧ Y1…Ŷj…Yq`, extended bilinearly.

use super::ops::{apply_vector, commutator, wedge_all};
use super::tensor::{TensorField, Variance};
use crate::error::{Error, Result};
use crate::scalar::{ensure_same_chart, ChartRef, ScalarExpr};

fn factors(chart: &ChartRef, idx: &[usize], coeff: &ScalarExpr) -> Vec<TensorField> {
    idx.iter()
        .enumerate()
        .map(|(k, &i)| {
            let v = TensorField::coord_vector(chart, i);
            if k == 0 {
                v.scale(coeff)
            } else {
                v
            }
        })
        .collect()
}

fn without<T>(xs: &[T], skip: usize) -> impl Iterator<Item = &T> {
    xs.iter().enumerate().filter(move |(k, _)| *k != skip).map(|(_, x)| x)
}

/// `[X1∧…∧Xp, g]` for a function `g`.
fn bracket_with_function(xs: &[TensorField], g: &ScalarExpr) -> Result<TensorField> {
    let chart = g.chart();
    let p = xs.len();
    let mut out = TensorField::zero(chart, Variance::Multivector, p - 1);
    for i in 0..p {
        let xg = apply_vector(&xs[i], g)?;
        if xg.is_zero() {
            continue;
        }
        let rest: Vec<&TensorField> = without(xs, i).collect();
        let mut term = wedge_all(chart, Variance::Multivector, &rest)?.scale(&xg);
        if (p - 1 - i) % 2 == 1 {
            term = term.neg();
        }
        out = out.checked_add(&term)?;
    }
    Ok(out)
}

fn bracket_decomposable(xs: &[TensorField], ys: &[TensorField], chart: &ChartRef) -> Result<TensorField> {
    let (p, q) = (xs.len(), ys.len());
    let mut out = TensorField::zero(chart, Variance::Multivector, p + q - 1);
    for i in 0..p {
        for j in 0..q {
            let c = commutator(&xs[i], &ys[j])?;
            if c.is_zero() {
                continue;
            }
            let mut parts: Vec<&TensorField> = vec![&c];
            parts.extend(without(xs, i));
            parts.extend(without(ys, j));
            let mut term = wedge_all(chart, Variance::Multivector, &parts)?;
            if (i + j) % 2 == 1 {
                term = term.neg();
            }
            out = out.checked_add(&term)?;
        }
    }
    Ok(out)
}

/// `[A, B]` for a p-multivector `A` and q-multivector `B`; degree `p + q − 1`.
pub fn schouten(a: &TensorField, b: &TensorField) -> Result<TensorField> {
    a.ensure_variance(Variance::Multivector)?;
    b.ensure_variance(Variance::Multivector)?;
    ensure_same_chart(a.chart(), b.chart())?;
    let chart = a.chart();
    let (p, q) = (a.degree(), b.degree());
    if p == 0 && q == 0 {
        return Err(Error::DegreeMismatch(
            "bracket of two functions has degree −1".into(),
        ));
    }
    if p == 0 {
        // [f, B] = −(−1)^{q−1} [B, f]
        let r = schouten(b, a)?;
        return Ok(if q % 2 == 1 { r.neg() } else { r });
    }
    let mut out = TensorField::zero(chart, Variance::Multivector, p + q - 1);
    if q == 0 {
        let g = b.as_scalar();
        for (idx, c) in a.iter() {
            out = out.checked_add(&bracket_with_function(&factors(chart, idx, c), &g)?)?;
        }
        return Ok(out);
    }
    for (ia, ca) in a.iter() {
        let xs = factors(chart, ia, ca);
        for (ib, cb) in b.iter() {
            let ys = factors(chart, ib, cb);
            out = out.checked_add(&bracket_decomposable(&xs, &ys, chart)?)?;
        }
    }
    Ok(out)
}

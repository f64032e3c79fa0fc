//! Cotangent Lie algebroid of a twisted Poisson structure.
//!
//! Bracket `[α,β]_φ = ℒ_{♯α}β − ℒ_{♯β}α + d(Π(α,β)) − φ(♯α, ♯β, ·)` with
//! anchor `♯` the pairing-convention sharp and `Π(α,β) = i_β i_α Π`.

use rayon::prelude::*;

use crate::calculus::{
    apply_vector, commutator, eval_multivector, ext_d, interior, lie_derivative, PolyMap,
    TensorField,
};
use crate::error::Result;
use crate::report::Report;
use crate::scalar::ScalarExpr;

use super::structure::{residual_witness, TwistedPoissonStructure};

pub fn algebroid_bracket(
    p: &TwistedPoissonStructure,
    alpha: &TensorField,
    beta: &TensorField,
) -> Result<TensorField> {
    let sa = p.anchor(alpha)?;
    let sb = p.anchor(beta)?;
    let mut out = lie_derivative(&sa, beta)?.checked_sub(&lie_derivative(&sb, alpha)?)?;
    let pab = eval_multivector(p.pi(), &[alpha, beta])?;
    out = out.checked_add(&TensorField::differential(&pab))?;
    if !p.phi().is_zero() {
        let t = interior(&sb, &interior(&sa, p.phi())?)?;
        out = out.checked_sub(&t)?;
    }
    Ok(out)
}

/// Jacobi, anchor-homomorphism and Leibniz residuals over all tuples from `alphas`.
///
/// Leibniz is tested with each coordinate function as the multiplier.
pub fn check_algebroid_axioms(p: &TwistedPoissonStructure, alphas: &[TensorField]) -> Result<Report> {
    let k = alphas.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let brackets: Vec<TensorField> = pairs
        .par_iter()
        .map(|&(i, j)| {
            if i < j {
                algebroid_bracket(p, &alphas[i], &alphas[j])
            } else {
                Ok(TensorField::zero(p.chart(), crate::calculus::Variance::Form, 1))
            }
        })
        .collect::<Result<_>>()?;
    let br = |i: usize, j: usize| -> TensorField {
        if i < j {
            brackets[i * k + j].clone()
        } else if i > j {
            brackets[j * k + i].neg()
        } else {
            TensorField::zero(p.chart(), crate::calculus::Variance::Form, 1)
        }
    };

    let mut r = Report::new();

    let triples: Vec<(usize, usize, usize)> = (0..k)
        .flat_map(|a| (a + 1..k).flat_map(move |b| (b + 1..k).map(move |c| (a, b, c))))
        .collect();
    let jacobi: Vec<(usize, usize, usize, TensorField)> = triples
        .par_iter()
        .map(|&(a, b, c)| {
            let t1 = algebroid_bracket(p, &br(a, b), &alphas[c])?;
            let t2 = algebroid_bracket(p, &br(b, c), &alphas[a])?;
            let t3 = algebroid_bracket(p, &br(c, a), &alphas[b])?;
            Ok((a, b, c, t1.checked_add(&t2)?.checked_add(&t3)?))
        })
        .collect::<Result<_>>()?;
    match jacobi.iter().find(|t| !t.3.is_zero()) {
        None => r.pass("jacobi"),
        Some((a, b, c, res)) => r.fail(
            "jacobi",
            residual_witness(&format!("jacobiator(a{}, a{}, a{})", a + 1, b + 1, c + 1), res),
        ),
    }

    let mut anchor_fail = None;
    for i in 0..k {
        for j in i + 1..k {
            let lhs = p.anchor(&br(i, j))?;
            let rhs = commutator(&p.anchor(&alphas[i])?, &p.anchor(&alphas[j])?)?;
            let res = lhs.checked_sub(&rhs)?;
            if !res.is_zero() && anchor_fail.is_none() {
                anchor_fail = Some(residual_witness(
                    &format!("anchor[a{}, a{}] - [anchor a{}, anchor a{}]", i + 1, j + 1, i + 1, j + 1),
                    &res,
                ));
            }
        }
    }
    match anchor_fail {
        None => r.pass("anchor"),
        Some(w) => r.fail("anchor", w),
    }

    let n = p.dim();
    let leib: Vec<Option<String>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            for v in 0..n {
                let f = ScalarExpr::var(p.chart(), v);
                let lhs = algebroid_bracket(p, &alphas[i], &alphas[j].scale(&f))?;
                let sa = p.anchor(&alphas[i])?;
                let rhs = br(i, j)
                    .scale(&f)
                    .checked_add(&alphas[j].scale(&apply_vector(&sa, &f)?))?;
                let res = lhs.checked_sub(&rhs)?;
                if !res.is_zero() {
                    return Ok(Some(residual_witness(
                        &format!("leibniz(a{}, x{} a{})", i + 1, v + 1, j + 1),
                        &res,
                    )));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    match leib.into_iter().flatten().next() {
        None => r.pass("leibniz"),
        Some(w) => r.fail("leibniz", w),
    }
    Ok(r)
}

/// `ρ_Q(α) = Π_Q♯(J*α)` for `J: Q → P`.
pub fn induced_action(j: &PolyMap, q: &TwistedPoissonStructure, alpha: &TensorField) -> Result<TensorField> {
    q.anchor(&j.pullback(alpha)?)
}

/// `[df, dg]_φ + d{f,g} + φ(H_f, H_g, ·)`, zero for twisted Poisson structures.
pub fn exact_bracket_residual(
    p: &TwistedPoissonStructure,
    f: &ScalarExpr,
    g: &ScalarExpr,
) -> Result<TensorField> {
    let lhs = algebroid_bracket(p, &TensorField::differential(f), &TensorField::differential(g))?;
    let hf = p.anchor(&TensorField::differential(f))?;
    let hg = p.anchor(&TensorField::differential(g))?;
    let mut res = lhs.checked_add(&ext_d(&TensorField::scalar(
        p.bracket(f, g)?,
        crate::calculus::Variance::Form,
    ))?)?;
    if !p.phi().is_zero() {
        res = res.checked_add(&interior(&hg, &interior(&hf, p.phi())?)?)?;
    }
    Ok(res)
}

//! The twisted Lichnerowicz differential on multivector fields and truncated
//! cohomology by exact row reduction.
//!
//! `(dA)(α_1..α_{k+1}) = −Σ_i (−1)^{i+1} ♯α_i(A(..α̂_i..)) − Σ_{i<j} (−1)^{i+j} A([α_i,α_j]_φ, ..α̂_i..α̂_j..)`,
//! evaluated on coordinate coframe tuples, with `♯` the algebroid anchor.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::calculus::{apply_vector, index_tuples, TensorField, Variance};
use crate::error::{Error, Result};
use crate::linalg;
use crate::poisson::{algebroid_bracket, TwistedPoissonStructure};
use crate::scalar::{int, ChartRef, Monomial, Poly, Rational, ScalarExpr};

/// Coordinate coframe data reused across evaluations.
struct Frame {
    anchors: Vec<TensorField>,
    /// `[dx_a, dx_b]_φ` for `a < b`, keyed `(a, b)`.
    brackets: BTreeMap<(usize, usize), TensorField>,
}

impl Frame {
    fn new(p: &TwistedPoissonStructure) -> Result<Self> {
        let n = p.dim();
        let c = p.chart();
        let coframe: Vec<TensorField> = (0..n).map(|i| TensorField::coord_form(c, i)).collect();
        let anchors = coframe.iter().map(|a| p.anchor(a)).collect::<Result<_>>()?;
        let mut brackets = BTreeMap::new();
        for a in 0..n {
            for b in a + 1..n {
                brackets.insert((a, b), algebroid_bracket(p, &coframe[a], &coframe[b])?);
            }
        }
        Ok(Frame { anchors, brackets })
    }
}

fn without(idx: &[usize], skip: &[usize]) -> Vec<usize> {
    idx.iter()
        .enumerate()
        .filter(|(k, _)| !skip.contains(k))
        .map(|(_, &v)| v)
        .collect()
}

fn apply(p: &TwistedPoissonStructure, frame: &Frame, a: &TensorField) -> Result<TensorField> {
    a.ensure_variance(Variance::Multivector)?;
    let k = a.degree();
    let n = p.dim();
    let c = p.chart();
    let mut entries = Vec::new();
    for idx in index_tuples(n, k + 1) {
        let mut acc = ScalarExpr::zero(c);
        for i in 0..=k {
            let rest = without(&idx, &[i]);
            let v = apply_vector(&frame.anchors[idx[i]], &a.get(&rest))?;
            // 0-based i: the sign −(−1)^{i+1} of the 1-based formula becomes −(−1)^i.
            if i % 2 == 0 {
                acc = &acc - &v;
            } else {
                acc = &acc + &v;
            }
        }
        for i in 0..=k {
            for j in i + 1..=k {
                let br = &frame.brackets[&(idx[i], idx[j])];
                if br.is_zero() {
                    continue;
                }
                let rest = without(&idx, &[i, j]);
                let mut full = Vec::with_capacity(k);
                let mut v = ScalarExpr::zero(c);
                for (m, bm) in br.iter() {
                    full.clear();
                    full.push(m[0]);
                    full.extend_from_slice(&rest);
                    let am = a.get_any(&full);
                    if !am.is_zero() {
                        v = &v + &(bm * &am);
                    }
                }
                if (i + j) % 2 == 0 {
                    acc = &acc - &v;
                } else {
                    acc = &acc + &v;
                }
            }
        }
        entries.push((idx, acc));
    }
    TensorField::from_entries(c, Variance::Multivector, k + 1, entries)
}

/// `d_{Π,φ} A`.
pub fn lichnerowicz_d(p: &TwistedPoissonStructure, a: &TensorField) -> Result<TensorField> {
    apply(p, &Frame::new(p)?, a)
}

/// `d(dA)`; zero for every twisted Poisson structure.
pub fn check_d_squared(p: &TwistedPoissonStructure, a: &TensorField) -> Result<TensorField> {
    let frame = Frame::new(p)?;
    apply(p, &frame, &apply(p, &frame, a)?)
}

/// `(dX)(df,dg) − [−(ℒ_XΠ)(df,dg) − φ(H_f,H_g,X)]` with `H = ♯d`.
pub fn degree_one_formula_residual(
    p: &TwistedPoissonStructure,
    x: &TensorField,
    f: &ScalarExpr,
    g: &ScalarExpr,
) -> Result<ScalarExpr> {
    use crate::calculus::{eval_form, eval_multivector, schouten};
    let (df, dg) = (TensorField::differential(f), TensorField::differential(g));
    let lhs = eval_multivector(&lichnerowicz_d(p, x)?, &[&df, &dg])?;
    let lie = eval_multivector(&schouten(x, p.pi())?, &[&df, &dg])?;
    let mut rhs = -&lie;
    if !p.phi().is_zero() {
        let (hf, hg) = (p.anchor(&df)?, p.anchor(&dg)?);
        rhs = &rhs - &eval_form(p.phi(), &[&hf, &hg, x])?;
    }
    Ok(&lhs - &rhs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyDims {
    pub k: usize,
    /// Coefficient degree bound used for `C^k`.
    pub cochain_degree: i64,
    pub dim_cochains: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
}

/// Graded truncation: `C^k` holds multivectors whose coefficients have degree ≤ `d + kδ`,
/// with `δ = max(m − 1, 2m + q)` (`m`, `q` the coefficient degrees of `Π`, `φ`; the second
/// term only when `φ ≠ 0`). The differential maps `C^k` into `C^{k+1}` by construction.
pub struct TruncatedComplex<'a> {
    structure: &'a TwistedPoissonStructure,
    max_degree: u32,
    delta: i64,
    frame: Frame,
}

fn monomials_up_to(n: usize, deg: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if deg < 0 {
        return out;
    }
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() == n {
            out.push(Monomial::from_exps(cur));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    rec(n, deg as u32, &mut Vec::new(), &mut out);
    out.sort();
    out
}

impl<'a> TruncatedComplex<'a> {
    pub fn new(structure: &'a TwistedPoissonStructure, max_degree: u32) -> Result<Self> {
        let nonpoly = |t: &TensorField| {
            t.iter()
                .find(|(_, c)| !c.is_polynomial())
                .map(|(_, c)| Error::NonPolynomial(c.to_string()))
        };
        if let Some(e) = nonpoly(structure.pi()).or_else(|| nonpoly(structure.phi())) {
            return Err(e);
        }
        let m = structure.pi().max_poly_degree().unwrap_or(0) as i64;
        let mut delta = m - 1;
        if !structure.phi().is_zero() {
            let q = structure.phi().max_poly_degree().unwrap_or(0) as i64;
            delta = delta.max(2 * m + q);
        }
        Ok(TruncatedComplex {
            structure,
            max_degree,
            delta,
            frame: Frame::new(structure)?,
        })
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn degree_bound(&self, k: usize) -> i64 {
        self.max_degree as i64 + k as i64 * self.delta
    }

    /// Basis of `C^k`: (index tuple, monomial) pairs.
    pub fn basis(&self, k: usize) -> Vec<(Vec<usize>, Monomial)> {
        let n = self.structure.dim();
        let monos = monomials_up_to(n, self.degree_bound(k));
        index_tuples(n, k)
            .into_iter()
            .flat_map(|idx| monos.iter().map(move |m| (idx.clone(), m.clone())))
            .collect()
    }

    fn element(&self, idx: &[usize], m: &Monomial) -> TensorField {
        let c = self.structure.chart();
        let f = ScalarExpr::from_poly(c, Poly::term(m.clone(), Rational::from_integer(1.into())));
        TensorField::from_entries(c, Variance::Multivector, idx.len(), [(idx.to_vec(), f)])
            .expect("valid basis element")
    }

    /// Matrix of `d: C^k → C^{k+1}` (rows index `C^{k+1}`).
    pub fn differential_matrix(&self, k: usize) -> Result<linalg::Matrix<Rational>> {
        let src = self.basis(k);
        let dst = self.basis(k + 1);
        let pos: BTreeMap<(Vec<usize>, Monomial), usize> =
            dst.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        let cols: Vec<Vec<(usize, Rational)>> = src
            .par_iter()
            .map(|(idx, m)| {
                let img = apply(self.structure, &self.frame, &self.element(idx, m))?;
                let mut col = Vec::new();
                for (j, c) in img.iter() {
                    for (mono, coeff) in c.numerator().terms() {
                        let key = (j.clone(), mono.clone());
                        let Some(&row) = pos.get(&key) else {
                            return Err(Error::Truncation(format!(
                                "d of basis element {}*{} leaves the degree-{} truncation of C^{}",
                                ScalarExpr::from_poly(
                                    self.structure.chart(),
                                    Poly::term(m.clone(), Rational::from_integer(1.into()))
                                ),
                                idx.iter().map(|i| format!("d{}", i + 1)).collect::<Vec<_>>().join("^"),
                                self.degree_bound(k + 1),
                                k + 1
                            )));
                        };
                        col.push((row, coeff.clone()));
                    }
                }
                Ok(col)
            })
            .collect::<Result<_>>()?;
        let zero = Rational::from_integer(0.into());
        let mut mat = vec![vec![zero; src.len()]; dst.len()];
        for (c, col) in cols.into_iter().enumerate() {
            for (r, v) in col {
                mat[r][c] = v;
            }
        }
        Ok(mat)
    }

    fn rank_of(&self, k: usize) -> Result<usize> {
        let m = self.differential_matrix(k)?;
        Ok(linalg::rank(&m, self.basis(k).len()))
    }

    pub fn dims(&self, k: usize) -> Result<CohomologyDims> {
        let dim_c = self.basis(k).len();
        let rank_k = self.rank_of(k)?;
        let dim_b = if k == 0 { 0 } else { self.rank_of(k - 1)? };
        let dim_z = dim_c - rank_k;
        Ok(CohomologyDims {
            k,
            cochain_degree: self.degree_bound(k),
            dim_cochains: dim_c,
            dim_z,
            dim_b,
            dim_h: dim_z - dim_b,
        })
    }
}

/// `(dim Z_k, dim B_k, dim H_k)` for the truncation with degree bound `d`.
pub fn truncated_cohomology_dims(p: &TwistedPoissonStructure, d: u32, k: usize) -> Result<CohomologyDims> {
    TruncatedComplex::new(p, d)?.dims(k)
}

/// Seeded multivector of the given degree with integer polynomial coefficients of degree ≤ `coeff_degree`.
pub fn random_multivector(
    chart: &ChartRef,
    degree: usize,
    coeff_degree: u32,
    sampler: &mut crate::sampling::Sampler,
) -> Result<TensorField> {
    let n = chart.dim();
    let monos = monomials_up_to(n, coeff_degree as i64);
    let mut entries = Vec::new();
    for idx in index_tuples(n, degree) {
        let mut p = Poly::zero(n);
        for m in &monos {
            let c = sampler.int_in(-3, 3);
            if c != 0 && sampler.int_in(0, 2) == 0 {
                p = &p + &Poly::term(m.clone(), int(c));
            }
        }
        entries.push((idx, ScalarExpr::from_poly(chart, p)));
    }
    TensorField::from_entries(chart, Variance::Multivector, degree, entries)
}

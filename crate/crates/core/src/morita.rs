//! Morita equivalence bimodules (strong) and algebroid bimodules (weak).

use num_traits::Zero;
use rayon::prelude::*;

use crate::calculus::{commutator, wedge, PolyMap, TensorField, Variance};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poisson::{
    algebroid_bracket, check_poisson_map, induced_action, residual_witness, TwistedPoissonStructure,
    TwistedSymplecticStructure,
};
use crate::report::Report;
use crate::sampling::fmt_point;
use crate::scalar::{ensure_same_chart, Chart, ChartRef, Rational, ScalarExpr};

/// User-supplied claims that are never computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Attestations {
    pub complete_j1: bool,
    pub complete_j2: bool,
    pub fibers_connected_simply_connected: bool,
}

impl Attestations {
    fn echo(&self, r: &mut Report) {
        let note = |b: bool| if b { "attested" } else { "not attested" };
        r.unverified("attest.complete_j1", note(self.complete_j1));
        r.unverified("attest.complete_j2", note(self.complete_j2));
        r.unverified(
            "attest.fibers_connected_simply_connected",
            note(self.fibers_connected_simply_connected),
        );
    }
}

/// `P1 ←J1 (S, ω) →J2 P2`.
#[derive(Clone, Debug)]
pub struct BimoduleCandidate {
    pub s_chart: ChartRef,
    pub omega: TensorField,
    pub j1: PolyMap,
    pub j2: PolyMap,
    pub p1: TwistedPoissonStructure,
    pub p2: TwistedPoissonStructure,
    pub attestations: Attestations,
}

impl BimoduleCandidate {
    pub fn new(
        omega: TensorField,
        j1: PolyMap,
        j2: PolyMap,
        p1: TwistedPoissonStructure,
        p2: TwistedPoissonStructure,
    ) -> Result<Self> {
        omega.ensure_variance(Variance::Form)?;
        omega.ensure_degree(2)?;
        let s = omega.chart().clone();
        ensure_same_chart(j1.domain(), &s)?;
        ensure_same_chart(j2.domain(), &s)?;
        ensure_same_chart(j1.codomain(), p1.chart())?;
        ensure_same_chart(j2.codomain(), p2.chart())?;
        if s.dim() < p1.dim() || s.dim() < p2.dim() {
            return Err(Error::Dimension(format!(
                "bimodule of dimension {} over bases of dimensions {} and {}",
                s.dim(),
                p1.dim(),
                p2.dim()
            )));
        }
        Ok(BimoduleCandidate {
            s_chart: s,
            omega,
            j1,
            j2,
            p1,
            p2,
            attestations: Attestations::default(),
        })
    }

    pub fn with_attestations(mut self, a: Attestations) -> Self {
        self.attestations = a;
        self
    }

    /// The twisted symplectic structure on `S`; fails if `ω` is identically degenerate.
    pub fn symplectic(&self) -> Result<TwistedSymplecticStructure> {
        TwistedSymplecticStructure::new(self.omega.clone())
    }

    /// Coefficients whose poles samples must avoid.
    pub fn coefficients(&self) -> Vec<ScalarExpr> {
        let mut out: Vec<ScalarExpr> = self.omega.iter().map(|(_, c)| c.clone()).collect();
        for j in [&self.j1, &self.j2] {
            out.extend(j.jacobian().into_iter().flatten());
        }
        out
    }
}

/// Product chart: variables of `a` then `b`, suffixed `_1`/`_2` only on collision.
fn product_chart(a: &ChartRef, b: &ChartRef) -> Result<ChartRef> {
    let clash = a.vars().iter().any(|v| b.vars().contains(v));
    let vars: Vec<String> = if clash {
        a.vars()
            .iter()
            .map(|v| format!("{v}_1"))
            .chain(b.vars().iter().map(|v| format!("{v}_2")))
            .collect()
    } else {
        a.vars().iter().chain(b.vars()).cloned().collect()
    };
    Chart::new(format!("{}x{}", a.name(), b.name()), vars)
}

/// `S1 × S2` with `ω = pr1*ω1 − pr2*ω2` over the associated structures.
pub fn build_product_bimodule(
    s1: &TwistedSymplecticStructure,
    s2: &TwistedSymplecticStructure,
) -> Result<BimoduleCandidate> {
    let (c1, c2) = (s1.chart(), s2.chart());
    let prod = product_chart(c1, c2)?;
    let n1 = c1.dim();
    let pr1 = PolyMap::projection(&prod, c1, &(0..n1).collect::<Vec<_>>())?;
    let pr2 = PolyMap::projection(&prod, c2, &(n1..n1 + c2.dim()).collect::<Vec<_>>())?;
    let omega = pr1.pullback(s1.omega())?.checked_sub(&pr2.pullback(s2.omega())?)?;
    BimoduleCandidate::new(omega, pr1, pr2, s1.to_poisson()?, s2.to_poisson()?)
}

/// Rows spanning `ker A` for an `m × n` matrix.
fn kernel(a: &Matrix<Rational>, n: usize) -> Matrix<Rational> {
    linalg::nullspace(a, n, &Rational::zero())
}

/// `K^⊥ = {v : ω(k, v) = 0 ∀ k ∈ K}` with `ω(k, v) = kᵀ W v`.
fn omega_complement(w: &Matrix<Rational>, k: &Matrix<Rational>, n: usize) -> Matrix<Rational> {
    let kw = linalg::mat_mul(k, w, &Rational::zero());
    kernel(&kw, n)
}

fn omega_at(omega: &TensorField, x: &[Rational]) -> Result<Matrix<Rational>> {
    let n = omega.dim();
    (0..n)
        .map(|i| (0..n).map(|j| omega.get_any(&[i, j]).eval(x)).collect())
        .collect()
}

/// `(ker dJ1)^⊥ = ker dJ2` and `(ker dJ2)^⊥ = ker dJ1` at `x`.
pub fn kernel_orthogonality(omega: &TensorField, j1: &PolyMap, j2: &PolyMap, x: &[Rational]) -> Result<bool> {
    ensure_same_chart(omega.chart(), j1.domain())?;
    ensure_same_chart(omega.chart(), j2.domain())?;
    let n = omega.dim();
    let w = omega_at(omega, x)?;
    let d = linalg::det(&w, &Rational::zero());
    if d.is_zero() {
        return Err(Error::DegenerateOmega(format!("det = 0 at {}", fmt_point(x))));
    }
    let k1 = kernel(&j1.jacobian_at(x)?, n);
    let k2 = kernel(&j2.jacobian_at(x)?, n);
    Ok(linalg::same_row_span(&omega_complement(&w, &k1, n), &k2, n)
        && linalg::same_row_span(&omega_complement(&w, &k2, n), &k1, n))
}

/// Conditions (1), (2-map) and (4) of an equivalence bimodule; attestations echoed as UNVERIFIED.
pub fn check_equivalence_bimodule(c: &BimoduleCandidate, samples: &[Vec<Rational>]) -> Result<Report> {
    let mut r = Report::new();
    let s = c.symplectic()?;

    let rhs = c.j1.pullback(c.p1.phi())?.checked_sub(&c.j2.pullback(c.p2.phi())?)?;
    let res = s.psi().checked_sub(&rhs)?;
    r.check("twist", res.is_zero(), || residual_witness("domega - (J1*phi1 - J2*phi2)", &res));

    let ps = s.to_poisson()?;
    r.merge("j1", check_poisson_map(&c.j1, &ps, &c.p1, samples)?);
    r.merge("j2", check_poisson_map(&c.j2, &ps, &c.p2.negated(), samples)?);

    let verdicts: Vec<Result<bool>> = samples
        .par_iter()
        .map(|x| kernel_orthogonality(&c.omega, &c.j1, &c.j2, x))
        .collect();
    let mut bad = None;
    for (x, v) in samples.iter().zip(verdicts) {
        if !v? {
            bad = Some(x);
            break;
        }
    }
    match bad {
        None => r.pass("orthogonality"),
        Some(x) => r.fail("orthogonality", format!("kernels not mutually orthogonal at {}", fmt_point(x))),
    }
    r.value("samples", samples.len());
    c.attestations.echo(&mut r);
    Ok(r)
}

/// `P1 ←J1 M →J2 P2` with actions given on coordinate coframes.
#[derive(Clone, Debug)]
pub struct AlgebroidBimoduleCandidate {
    pub m_chart: ChartRef,
    pub j1: PolyMap,
    pub j2: PolyMap,
    /// `action1[i] = ρ1(dx_i)` for the coframe of the codomain of `j1`.
    pub action1: Vec<TensorField>,
    pub action2: Vec<TensorField>,
    pub fibers_connected_simply_connected: bool,
}

impl AlgebroidBimoduleCandidate {
    pub fn new(j1: PolyMap, j2: PolyMap, action1: Vec<TensorField>, action2: Vec<TensorField>) -> Result<Self> {
        let m = j1.domain().clone();
        ensure_same_chart(j2.domain(), &m)?;
        for (j, table) in [(&j1, &action1), (&j2, &action2)] {
            if table.len() != j.codomain().dim() {
                return Err(Error::Dimension(format!(
                    "action table has {} entries, coframe of `{}` has {}",
                    table.len(),
                    j.codomain().name(),
                    j.codomain().dim()
                )));
            }
            for v in table.iter() {
                v.ensure_variance(Variance::Multivector)?;
                v.ensure_degree(1)?;
                ensure_same_chart(v.chart(), &m)?;
            }
        }
        Ok(AlgebroidBimoduleCandidate {
            m_chart: m,
            j1,
            j2,
            action1,
            action2,
            fibers_connected_simply_connected: false,
        })
    }

    /// Coefficients whose poles samples must avoid.
    pub fn coefficients(&self) -> Vec<ScalarExpr> {
        let mut out: Vec<ScalarExpr> = Vec::new();
        for v in self.action1.iter().chain(&self.action2) {
            out.extend(v.components());
        }
        for j in [&self.j1, &self.j2] {
            out.extend(j.jacobian().into_iter().flatten());
        }
        out
    }

    fn action_matrix_at(table: &[TensorField], x: &[Rational]) -> Result<Matrix<Rational>> {
        table
            .iter()
            .map(|v| v.components().iter().map(|c| c.eval(x)).collect())
            .collect()
    }
}

/// `ρ(Σ f_k dx_k) = Σ (J*f_k) ρ(dx_k)`.
fn extend_action(j: &PolyMap, table: &[TensorField], alpha: &TensorField) -> Result<TensorField> {
    let m = j.domain();
    let mut out = TensorField::zero(m, Variance::Multivector, 1);
    for (k, v) in table.iter().enumerate() {
        let f = alpha.get(&[k]);
        if !f.is_zero() {
            out = out.checked_add(&v.scale(&j.pull_scalar(&f)?))?;
        }
    }
    Ok(out)
}

/// Action axioms of one side: anchor compatibility `dJ·ρ(dx_i) = J*(♯dx_i)` and
/// bracket compatibility `ρ([dx_i, dx_k]) = [ρ(dx_i), ρ(dx_k)]`.
fn check_action(r: &mut Report, side: &str, j: &PolyMap, table: &[TensorField], p: &TwistedPoissonStructure) -> Result<()> {
    let base = j.codomain();
    let jac = j.jacobian();
    let mut anchor_bad = None;
    'outer: for (i, v) in table.iter().enumerate() {
        let target = p.anchor(&TensorField::coord_form(base, i))?;
        for (a, row) in jac.iter().enumerate() {
            let mut pushed = ScalarExpr::zero(j.domain());
            for (b, d) in row.iter().enumerate() {
                if !d.is_zero() {
                    pushed = &pushed + &(d * &v.get(&[b]));
                }
            }
            let res = &pushed - &j.pull_scalar(&target.get(&[a]))?;
            if !res.is_zero() {
                anchor_bad = Some((i, a, res));
                break 'outer;
            }
        }
    }
    let path = format!("{side}.anchor");
    match anchor_bad {
        None => r.pass(path),
        Some((i, a, res)) => r.fail(
            path,
            residual_witness(
                &format!("(dJ rho(dx{}) - J*(sharp dx{}))^{}", i + 1, i + 1, a + 1),
                &TensorField::function(res),
            ),
        ),
    }

    let n = base.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |k| (i, k))).collect();
    let residuals: Vec<TensorField> = pairs
        .par_iter()
        .map(|&(i, k)| {
            let br = algebroid_bracket(p, &TensorField::coord_form(base, i), &TensorField::coord_form(base, k))?;
            extend_action(j, table, &br)?.checked_sub(&commutator(&table[i], &table[k])?)
        })
        .collect::<Result<_>>()?;
    let path = format!("{side}.bracket");
    match pairs.iter().zip(&residuals).find(|(_, res)| !res.is_zero()) {
        None => r.pass(path),
        Some((&(i, k), res)) => r.fail(
            path,
            residual_witness(&format!("rho([dx{}, dx{}]) - [rho dx{}, rho dx{}]", i + 1, k + 1, i + 1, k + 1), res),
        ),
    }
    Ok(())
}

/// Commutation, action axioms and fiber tangency at samples.
pub fn check_algebroid_bimodule(
    c: &AlgebroidBimoduleCandidate,
    p1: &TwistedPoissonStructure,
    p2: &TwistedPoissonStructure,
    samples: &[Vec<Rational>],
) -> Result<Report> {
    ensure_same_chart(c.j1.codomain(), p1.chart())?;
    ensure_same_chart(c.j2.codomain(), p2.chart())?;
    let mut r = Report::new();

    let pairs: Vec<(usize, usize)> = (0..c.action1.len())
        .flat_map(|i| (0..c.action2.len()).map(move |k| (i, k)))
        .collect();
    let comms: Vec<TensorField> = pairs
        .par_iter()
        .map(|&(i, k)| commutator(&c.action1[i], &c.action2[k]))
        .collect::<Result<_>>()?;
    match pairs.iter().zip(&comms).find(|(_, t)| !t.is_zero()) {
        None => r.pass("commutation"),
        Some((&(i, k), t)) => r.fail(
            "commutation",
            residual_witness(&format!("[rho1(dx{}), rho2(dy{})]", i + 1, k + 1), t),
        ),
    }

    check_action(&mut r, "action1", &c.j1, &c.action1, p1)?;
    check_action(&mut r, "action2", &c.j2, &c.action2, p2)?;

    let n = c.m_chart.dim();
    let mut bad: [Option<String>; 2] = [None, None];
    for x in samples {
        let k1 = kernel(&c.j1.jacobian_at(x)?, n);
        let k2 = kernel(&c.j2.jacobian_at(x)?, n);
        let r1 = AlgebroidBimoduleCandidate::action_matrix_at(&c.action1, x)?;
        let r2 = AlgebroidBimoduleCandidate::action_matrix_at(&c.action2, x)?;
        for (slot, (orbit, fiber, label)) in [(&r2, &k1, "rho2 vs ker dJ1"), (&r1, &k2, "rho1 vs ker dJ2")]
            .into_iter()
            .enumerate()
        {
            if bad[slot].is_none() && !linalg::same_row_span(orbit, fiber, n) {
                bad[slot] = Some(format!(
                    "{label}: ranks {} and {} at {}",
                    linalg::rank(orbit, n),
                    linalg::rank(fiber, n),
                    fmt_point(x)
                ));
            }
        }
    }
    for (slot, path) in ["tangency.j1_fibers", "tangency.j2_fibers"].into_iter().enumerate() {
        match bad[slot].take() {
            None => r.pass(path),
            Some(w) => r.fail(path, w),
        }
    }
    r.value("samples", samples.len());
    let note = if c.fibers_connected_simply_connected { "attested" } else { "not attested" };
    r.unverified("attest.fibers_connected_simply_connected", note);
    Ok(r)
}

/// `dim(ker dJ1 + ker dJ2)` at `x`.
pub fn leaf_distribution_rank(c: &AlgebroidBimoduleCandidate, x: &[Rational]) -> Result<usize> {
    let n = c.m_chart.dim();
    let mut rows = kernel(&c.j1.jacobian_at(x)?, n);
    rows.extend(kernel(&c.j2.jacobian_at(x)?, n));
    Ok(linalg::rank(&rows, n))
}

/// Actions of a strong bimodule: `ρ1(α) = Π_S♯(J1*α)`, `ρ2(β) = −Π_S♯(J2*β)`.
pub fn induced_algebroid_bimodule(c: &BimoduleCandidate) -> Result<AlgebroidBimoduleCandidate> {
    let ps = c.symplectic()?.to_poisson()?;
    let table = |j: &PolyMap, sign: i64| -> Result<Vec<TensorField>> {
        (0..j.codomain().dim())
            .map(|i| {
                let v = induced_action(j, &ps, &TensorField::coord_form(j.codomain(), i))?;
                Ok(if sign < 0 { v.neg() } else { v })
            })
            .collect()
    };
    let a1 = table(&c.j1, 1)?;
    let a2 = table(&c.j2, -1)?;
    AlgebroidBimoduleCandidate::new(c.j1.clone(), c.j2.clone(), a1, a2)
}

/// `T*P` over the chart of `p`: variables `x.., p..`, canonical `ω = Σ dp_i∧dx_i`.
pub fn cotangent_chart(base: &ChartRef) -> Result<(ChartRef, TwistedSymplecticStructure)> {
    let n = base.dim();
    let momentum = |i: usize| {
        let v = format!("p{}", i + 1);
        if base.vars().contains(&v) {
            format!("{}_p", base.vars()[i])
        } else {
            v
        }
    };
    let vars: Vec<String> = base.vars().iter().cloned().chain((0..n).map(momentum)).collect();
    let m = Chart::new(format!("T*{}", base.name()), vars)?;
    let mut omega = TensorField::zero(&m, Variance::Form, 2);
    for i in 0..n {
        let t = wedge(&TensorField::coord_form(&m, n + i), &TensorField::coord_form(&m, i))?;
        omega = omega.checked_add(&t)?;
    }
    Ok((m, TwistedSymplecticStructure::new(omega)?))
}

/// Cotangent bundle with `ρ_L(α) = Π_C♯(π*α)`, `ρ_R(α) = −Π_C♯(π*α)`, both moment maps `π`.
pub fn cotangent_bimodule(p: &TwistedPoissonStructure) -> Result<AlgebroidBimoduleCandidate> {
    let base = p.chart();
    let (m, can) = cotangent_chart(base)?;
    let pc = can.to_poisson()?;
    let pi = PolyMap::projection(&m, base, &(0..base.dim()).collect::<Vec<_>>())?;
    let left: Vec<TensorField> = (0..base.dim())
        .map(|i| induced_action(&pi, &pc, &TensorField::coord_form(base, i)))
        .collect::<Result<_>>()?;
    let right = left.iter().map(TensorField::neg).collect();
    AlgebroidBimoduleCandidate::new(pi.clone(), pi, left, right)
}

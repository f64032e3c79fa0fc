use std::fmt;
use std::str::FromStr;

use crate::calculus::{
    apply_vector, commutator, eval_form, ext_d, pairing, schouten, wedge, TensorField, Variance,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::report::Report;
use crate::scalar::{ensure_same_chart, int, rat, ChartRef, Rational, ScalarExpr};

/// Sign convention for the sharp map.
///
/// `Pairing`: `β(Π♯α) = ⟨Π, β∧α⟩`, hence `H_f g = {g, f}`.
/// `Normalized`: the negated sharp, hence `H_f g = {f, g}`.
/// The algebroid anchor and all structural checks are convention-independent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Convention {
    #[default]
    Pairing,
    Normalized,
}

impl Convention {
    /// `ε` with `sharp = ε · anchor`.
    pub fn sign(self) -> i64 {
        match self {
            Convention::Pairing => 1,
            Convention::Normalized => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Pairing => "pairing",
            Convention::Normalized => "normalized",
        }
    }
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pairing" => Ok(Convention::Pairing),
            "normalized" => Ok(Convention::Normalized),
            other => Err(Error::Usage(format!(
                "unknown convention `{other}` (expected pairing or normalized)"
            ))),
        }
    }
}

/// Bivector `Π` and 3-form `φ` on one chart.
#[derive(Clone, Debug)]
pub struct TwistedPoissonStructure {
    chart: ChartRef,
    pi: TensorField,
    phi: TensorField,
    convention: Convention,
}

fn check_shapes(pi: &TensorField, phi: &TensorField) -> Result<()> {
    pi.ensure_variance(Variance::Multivector)?;
    pi.ensure_degree(2)?;
    phi.ensure_variance(Variance::Form)?;
    phi.ensure_degree(3)?;
    ensure_same_chart(pi.chart(), phi.chart())
}

impl TwistedPoissonStructure {
    /// Checked constructor: requires `dφ = 0` and `½[Π,Π] = ∧³Π♯φ` exactly.
    pub fn new(pi: TensorField, phi: TensorField) -> Result<Self> {
        let s = Self::new_unverified(pi, phi)?;
        let report = s.verify();
        if let Some(f) = report.failures().next() {
            return Err(Error::NotTwistedPoisson(format!(
                "{}: {}",
                f.path,
                f.witness.clone().unwrap_or_default()
            )));
        }
        Ok(s)
    }

    /// Shape-checked only; for deliberately broken fixtures.
    pub fn new_unverified(pi: TensorField, phi: TensorField) -> Result<Self> {
        check_shapes(&pi, &phi)?;
        Ok(TwistedPoissonStructure {
            chart: pi.chart().clone(),
            pi,
            phi,
            convention: Convention::Pairing,
        })
    }

    /// Untwisted structure; checked.
    pub fn poisson(pi: TensorField) -> Result<Self> {
        let phi = TensorField::zero(pi.chart(), Variance::Form, 3);
        Self::new(pi, phi)
    }

    pub fn with_convention(mut self, c: Convention) -> Self {
        self.convention = c;
        self
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn pi(&self) -> &TensorField {
        &self.pi
    }

    pub fn phi(&self) -> &TensorField {
        &self.phi
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `(−Π, −φ)`, the target of anti-realizations.
    pub fn negated(&self) -> Self {
        TwistedPoissonStructure {
            chart: self.chart.clone(),
            pi: self.pi.neg(),
            phi: self.phi.neg(),
            convention: self.convention,
        }
    }

    /// `P[i][j] = Π^{ij}`, antisymmetric.
    pub fn pi_matrix(&self) -> Matrix<ScalarExpr> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.pi.get_any(&[i, j])).collect())
            .collect()
    }

    /// Anchor of the cotangent algebroid: `β(♯α) = ⟨Π, β∧α⟩`, i.e. `(♯α)^j = Σ_i Π^{ji} α_i`.
    pub fn anchor(&self, alpha: &TensorField) -> Result<TensorField> {
        alpha.ensure_variance(Variance::Form)?;
        alpha.ensure_degree(1)?;
        ensure_same_chart(alpha.chart(), &self.chart)?;
        let n = self.dim();
        let mut comps = vec![ScalarExpr::zero(&self.chart); n];
        for (ij, p) in self.pi.iter() {
            let (i, j) = (ij[0], ij[1]);
            // Π^{ij} contributes to component i via α_j and to j via −α_i.
            let aj = alpha.get(&[j]);
            if !aj.is_zero() {
                comps[i] = &comps[i] + &(p * &aj);
            }
            let ai = alpha.get(&[i]);
            if !ai.is_zero() {
                comps[j] = &comps[j] - &(p * &ai);
            }
        }
        Ok(TensorField::vector(&self.chart, comps))
    }

    /// `Π♯α` under the structure's convention.
    pub fn sharp(&self, alpha: &TensorField) -> Result<TensorField> {
        let a = self.anchor(alpha)?;
        Ok(match self.convention {
            Convention::Pairing => a,
            Convention::Normalized => a.neg(),
        })
    }

    /// `∧³Π♯(ω)`: the trivector with `(α,β,γ) ↦ ω(Π♯α, Π♯β, Π♯γ)`.
    pub fn wedge3_sharp(&self, fm: &TensorField) -> Result<TensorField> {
        fm.ensure_variance(Variance::Form)?;
        fm.ensure_degree(3)?;
        ensure_same_chart(fm.chart(), &self.chart)?;
        let n = self.dim();
        let sharps: Vec<TensorField> = (0..n)
            .map(|i| self.sharp(&TensorField::coord_form(&self.chart, i)))
            .collect::<Result<_>>()?;
        let mut entries = Vec::new();
        if !fm.is_zero() {
            for idx in crate::calculus::index_tuples(n, 3) {
                let v = eval_form(fm, &[&sharps[idx[0]], &sharps[idx[1]], &sharps[idx[2]]])?;
                entries.push((idx, v));
            }
        }
        TensorField::from_entries(&self.chart, Variance::Multivector, 3, entries)
    }

    /// `½[Π,Π] − ε ∧³Π♯φ`; zero iff the structural identity holds.
    pub fn structural_residual(&self) -> Result<TensorField> {
        let half = schouten(&self.pi, &self.pi)?.scale_rational(&rat(1, 2));
        let rhs = self.wedge3_sharp(&self.phi)?.scale_rational(&int(self.convention.sign()));
        half.checked_sub(&rhs)
    }

    /// Closedness of `φ` and the structural identity, each with a residual witness on failure.
    pub fn verify(&self) -> Report {
        let mut r = Report::new();
        match ext_d(&self.phi) {
            Ok(d) => r.check("closed", d.is_zero(), || residual_witness("dphi", &d)),
            Err(e) => r.fail("closed", e.to_string()),
        }
        match self.structural_residual() {
            Ok(res) => r.check("structure", res.is_zero(), || {
                residual_witness("half[Pi,Pi] - wedge3_sharp(phi)", &res)
            }),
            Err(e) => r.fail("structure", e.to_string()),
        }
        r
    }

    /// `{f, g} = ⟨Π, df∧dg⟩`.
    pub fn bracket(&self, f: &ScalarExpr, g: &ScalarExpr) -> Result<ScalarExpr> {
        let w = wedge(&TensorField::differential(f), &TensorField::differential(g))?;
        pairing(&self.pi, &w)
    }

    /// `H_f = Π♯(df)`.
    pub fn hamiltonian(&self, f: &ScalarExpr) -> Result<TensorField> {
        self.sharp(&TensorField::differential(f))
    }

    /// `{{f,g},h} + {{g,h},f} + {{h,f},g} + ε φ(H_f, H_g, H_h)`.
    pub fn jacobi_anomaly(&self, f: &ScalarExpr, g: &ScalarExpr, h: &ScalarExpr) -> Result<ScalarExpr> {
        let jac = &(&self.bracket(&self.bracket(f, g)?, h)? + &self.bracket(&self.bracket(g, h)?, f)?)
            + &self.bracket(&self.bracket(h, f)?, g)?;
        if self.phi.is_zero() {
            return Ok(jac);
        }
        let (hf, hg, hh) = (self.hamiltonian(f)?, self.hamiltonian(g)?, self.hamiltonian(h)?);
        let t = eval_form(&self.phi, &[&hf, &hg, &hh])?;
        Ok(&jac + &t.scale(&int(self.convention.sign())))
    }

    /// `([H_f,H_g] + ε H_{{f,g}})h − ε φ(H_f,H_g,H_h)`.
    pub fn prop_commutator_residual(
        &self,
        f: &ScalarExpr,
        g: &ScalarExpr,
        h: &ScalarExpr,
    ) -> Result<ScalarExpr> {
        let eps = int(self.convention.sign());
        let (hf, hg, hh) = (self.hamiltonian(f)?, self.hamiltonian(g)?, self.hamiltonian(h)?);
        let c = commutator(&hf, &hg)?;
        let hfg = self.hamiltonian(&self.bracket(f, g)?)?;
        let field = c.checked_add(&hfg.scale_rational(&eps))?;
        let lhs = apply_vector(&field, h)?;
        let rhs = if self.phi.is_zero() {
            ScalarExpr::zero(&self.chart)
        } else {
            eval_form(&self.phi, &[&hf, &hg, &hh])?.scale(&eps)
        };
        Ok(&lhs - &rhs)
    }

    /// First coordinate-monomial triple `f < g < h` of degree `1..=max_degree` with a nonzero anomaly.
    /// The anomaly is alternating, so unordered triples are exhaustive.
    pub fn anomaly_search(&self, max_degree: u32) -> Result<Option<([ScalarExpr; 3], ScalarExpr)>> {
        let ms = coordinate_monomials(&self.chart, max_degree);
        for i in 0..ms.len() {
            for j in i + 1..ms.len() {
                for k in j + 1..ms.len() {
                    let a = self.jacobi_anomaly(&ms[i], &ms[j], &ms[k])?;
                    if !a.is_zero() {
                        return Ok(Some(([ms[i].clone(), ms[j].clone(), ms[k].clone()], a)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Rank of `Π` at a rational point.
    pub fn rank_at(&self, point: &[Rational]) -> Result<usize> {
        let m = crate::linalg::eval_matrix(&self.pi_matrix(), point)?;
        Ok(crate::linalg::rank(&m, self.dim()))
    }
}

impl fmt::Display for TwistedPoissonStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi = {}; phi = {}", self.pi, self.phi)
    }
}

/// Monomials in the chart variables of total degree `1..=max_degree`, graded then lexicographic.
pub fn coordinate_monomials(chart: &ChartRef, max_degree: u32) -> Vec<ScalarExpr> {
    let n = chart.dim();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u32>> = vec![vec![0; n]];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for e in &layer {
            // Raise only variables at or after the last raised one to avoid repeats.
            let start = e.iter().rposition(|&x| x > 0).unwrap_or(0);
            for v in start..n {
                let mut f = e.clone();
                f[v] += 1;
                next.push(f);
            }
        }
        out.extend(next.iter().map(|e| {
            ScalarExpr::from_poly(chart, crate::scalar::Poly::term(crate::scalar::Monomial::from_exps(e), int(1)))
        }));
        layer = next;
    }
    out
}

/// `label = <tensor>` plus the first nonzero coefficient at a small integer point.
pub fn residual_witness(label: &str, t: &TensorField) -> String {
    let n = t.dim();
    let mut candidates: Vec<Vec<Rational>> = vec![vec![int(1); n], vec![int(2); n]];
    candidates.push((1..=n as i64).map(int).collect());
    candidates.push((1..=n as i64).map(|k| int(k + 2)).collect());
    for p in &candidates {
        for (idx, c) in t.iter() {
            if let Ok(v) = c.eval(p) {
                if !num_traits::Zero::is_zero(&v) {
                    let at = crate::sampling::fmt_point(p);
                    let v = crate::scalar::fmt_rational(&v);
                    if idx.is_empty() {
                        return format!("{label} = {t}; at {at} value {v}");
                    }
                    let one_based: Vec<usize> = idx.iter().map(|i| i + 1).collect();
                    return format!("{label} = {t}; at {at} component {one_based:?} = {v}");
                }
            }
        }
    }
    format!("{label} = {t}")
}

/// `label = <expr>` plus its value at the first small integer point where it is nonzero.
pub fn scalar_witness(label: &str, e: &ScalarExpr) -> String {
    let t = TensorField::function(e.clone());
    residual_witness(label, &t)
}

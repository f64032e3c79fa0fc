use std::fmt;

use super::ops::wedge;
use super::tensor::{TensorField, Variance};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{ensure_same_chart, ChartRef, Rational, ScalarExpr};

/// Map between charts with one rational-function component per codomain variable.
#[derive(Clone, PartialEq)]
pub struct PolyMap {
    domain: ChartRef,
    codomain: ChartRef,
    components: Vec<ScalarExpr>,
}

impl PolyMap {
    pub fn new(domain: &ChartRef, codomain: &ChartRef, components: Vec<ScalarExpr>) -> Result<Self> {
        if components.len() != codomain.dim() {
            return Err(Error::Dimension(format!(
                "map into `{}` needs {} components, got {}",
                codomain.name(),
                codomain.dim(),
                components.len()
            )));
        }
        for c in &components {
            ensure_same_chart(domain, c.chart())?;
        }
        Ok(PolyMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            components,
        })
    }

    pub fn identity(chart: &ChartRef) -> Self {
        let comps = (0..chart.dim()).map(|i| ScalarExpr::var(chart, i)).collect();
        PolyMap {
            domain: chart.clone(),
            codomain: chart.clone(),
            components: comps,
        }
    }

    /// Coordinate projection: codomain variable `k` is domain variable `indices[k]`.
    pub fn projection(domain: &ChartRef, codomain: &ChartRef, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= domain.dim()) {
            return Err(Error::Dimension("projection index out of range".into()));
        }
        let comps = indices.iter().map(|&i| ScalarExpr::var(domain, i)).collect();
        Self::new(domain, codomain, comps)
    }

    pub fn domain(&self) -> &ChartRef {
        &self.domain
    }

    pub fn codomain(&self) -> &ChartRef {
        &self.codomain
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    /// `∂ component_i / ∂ var_j`, codomain-dim × domain-dim.
    pub fn jacobian(&self) -> Matrix<ScalarExpr> {
        self.components
            .iter()
            .map(|c| (0..self.domain.dim()).map(|j| c.partial(j)).collect())
            .collect()
    }

    pub fn jacobian_at(&self, point: &[Rational]) -> Result<Matrix<Rational>> {
        self.jacobian()
            .iter()
            .map(|row| row.iter().map(|e| e.eval(point)).collect())
            .collect()
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_f64(point).0).collect()
    }

    /// `f ∘ J` for a scalar on the codomain.
    pub fn pull_scalar(&self, f: &ScalarExpr) -> Result<ScalarExpr> {
        ensure_same_chart(f.chart(), &self.codomain)?;
        f.compose(&self.components, &self.domain)
    }

    /// `J*ω` for a form on the codomain.
    pub fn pullback(&self, fm: &TensorField) -> Result<TensorField> {
        fm.ensure_variance(Variance::Form)?;
        ensure_same_chart(fm.chart(), &self.codomain)?;
        let dj: Vec<TensorField> = self
            .components
            .iter()
            .map(TensorField::differential)
            .collect();
        let mut out = TensorField::zero(&self.domain, Variance::Form, fm.degree());
        for (idx, c) in fm.iter() {
            let coeff = self.pull_scalar(c)?;
            let mut w = TensorField::scalar(ScalarExpr::one(&self.domain), Variance::Form);
            for &i in idx {
                w = wedge(&w, &dj[i])?;
            }
            out = out.checked_add(&w.scale(&coeff))?;
        }
        Ok(out)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        ensure_same_chart(&inner.codomain, &self.domain)?;
        let comps = self
            .components
            .iter()
            .map(|c| c.compose(&inner.components, &inner.domain))
            .collect::<Result<Vec<_>>>()?;
        PolyMap::new(&inner.domain, &self.codomain, comps)
    }
}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMap[{} -> {}](", self.domain.name(), self.codomain.name())?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

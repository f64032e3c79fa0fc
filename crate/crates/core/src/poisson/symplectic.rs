use crate::calculus::{ext_d, TensorField, Variance};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{ChartRef, ScalarExpr};

use super::structure::TwistedPoissonStructure;

/// Nondegenerate 2-form `ω` with `ψ = dω`.
#[derive(Clone, Debug)]
pub struct TwistedSymplecticStructure {
    chart: ChartRef,
    omega: TensorField,
    psi: TensorField,
}

impl TwistedSymplecticStructure {
    /// `ψ` is computed as `dω`; `det ω` must not vanish identically.
    pub fn new(omega: TensorField) -> Result<Self> {
        let s = Self::new_unchecked(omega)?;
        let det = s.determinant();
        if det.is_zero() {
            return Err(Error::DegenerateOmega(
                "determinant of the coefficient matrix is identically zero".into(),
            ));
        }
        Ok(s)
    }

    /// Shape-checked only; degenerate forms are allowed (graphs of them are still isotropic).
    pub fn new_unchecked(omega: TensorField) -> Result<Self> {
        omega.ensure_variance(Variance::Form)?;
        omega.ensure_degree(2)?;
        let psi = ext_d(&omega)?;
        Ok(TwistedSymplecticStructure {
            chart: omega.chart().clone(),
            omega,
            psi,
        })
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn omega(&self) -> &TensorField {
        &self.omega
    }

    pub fn psi(&self) -> &TensorField {
        &self.psi
    }

    /// `W[i][j] = ω_{ij}`.
    pub fn omega_matrix(&self) -> Matrix<ScalarExpr> {
        let n = self.chart.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.omega.get_any(&[i, j])).collect())
            .collect()
    }

    pub fn determinant(&self) -> ScalarExpr {
        linalg::det(&self.omega_matrix(), &ScalarExpr::zero(&self.chart))
    }

    /// The associated structure: `Π^{ij} = (−W⁻¹)_{ij}`, `φ = dω`.
    ///
    /// With this sign the Hamiltonian field of `f` under the anchor solves `i_H ω = df`.
    pub fn to_poisson(&self) -> Result<TwistedPoissonStructure> {
        let z = ScalarExpr::zero(&self.chart);
        let inv = linalg::inverse(&self.omega_matrix(), &z).map_err(|e| match e {
            Error::NotInvertible { det } => Error::DegenerateOmega(format!("det = {det}")),
            other => other,
        })?;
        let n = self.chart.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                entries.push((vec![i, j], -&inv[i][j]));
            }
        }
        let pi = TensorField::from_entries(&self.chart, Variance::Multivector, 2, entries)?;
        TwistedPoissonStructure::new_unverified(pi, self.psi.clone())
    }

    /// Vector field `H` with `i_H ω = df`.
    pub fn hamiltonian(&self, f: &ScalarExpr) -> Result<TensorField> {
        let z = ScalarExpr::zero(&self.chart);
        let w_t = linalg::transpose(&self.omega_matrix(), self.chart.dim());
        let df = TensorField::differential(f).components();
        let x = linalg::solve(&w_t, self.chart.dim(), &df, &z)
            .ok_or_else(|| Error::DegenerateOmega("i_H omega = df has no solution".into()))?;
        Ok(TensorField::vector(&self.chart, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{interior, wedge};
    use crate::scalar::{parse_expr, Chart};

    #[test]
    fn constant_plane() {
        let c = Chart::numbered("R2", "x", 2).unwrap();
        let w = wedge(&TensorField::coord_form(&c, 0), &TensorField::coord_form(&c, 1)).unwrap();
        let s = TwistedSymplecticStructure::new(w.clone()).unwrap();
        let p = s.to_poisson().unwrap();
        // W = [[0,1],[-1,0]], −W⁻¹ = W, so Π^{12} = 1.
        assert_eq!(p.pi().get(&[0, 1]), ScalarExpr::one(&c));
        let f = parse_expr("x1^2*x2", &c).unwrap();
        let h = s.hamiltonian(&f).unwrap();
        assert_eq!(interior(&h, &w).unwrap(), TensorField::differential(&f));
        assert_eq!(p.anchor(&TensorField::differential(&f)).unwrap(), h);
    }

    #[test]
    fn degenerate_rejected() {
        let c = Chart::numbered("R2", "x", 2).unwrap();
        let w = wedge(&TensorField::coord_form(&c, 0), &TensorField::coord_form(&c, 1))
            .unwrap()
            .scale(&parse_expr("x1 - x1", &c).unwrap());
        assert!(matches!(TwistedSymplecticStructure::new(w), Err(Error::DegenerateOmega(_))));
    }

    #[test]
    fn twisted_form_gives_twisted_structure() {
        let c = Chart::numbered("R4", "x", 4).unwrap();
        let e = |s: &str| parse_expr(s, &c).unwrap();
        let dx = |i| TensorField::coord_form(&c, i);
        let w = &wedge(&dx(0), &dx(1)).unwrap().scale(&e("1 + x3^2"))
            + &wedge(&dx(2), &dx(3)).unwrap().scale(&e("1 + x1*x2"));
        let s = TwistedSymplecticStructure::new(w).unwrap();
        assert!(!s.psi().is_zero());
        let p = s.to_poisson().unwrap();
        assert!(p.verify().passed(), "{}", p.verify());
    }
}

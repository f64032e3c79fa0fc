use crate::calculus::{eval_form, index_tuples, PolyMap, TensorField};
use crate::error::Result;
use crate::linalg::{self, Matrix};
use crate::report::Report;
use crate::sampling::fmt_point;
use crate::scalar::{ensure_same_chart, fmt_rational, Rational, ScalarExpr};

use super::structure::{residual_witness, TwistedPoissonStructure};

/// `Π2∘J − dJ·Π1·dJᵀ`, codomain-dim square.
pub fn poisson_map_residual(
    j: &PolyMap,
    p1: &TwistedPoissonStructure,
    p2: &TwistedPoissonStructure,
) -> Result<Matrix<ScalarExpr>> {
    ensure_same_chart(j.domain(), p1.chart())?;
    ensure_same_chart(j.codomain(), p2.chart())?;
    let z = ScalarExpr::zero(j.domain());
    let jac = j.jacobian();
    let n = j.domain().dim();
    let pushed = linalg::mat_mul(
        &linalg::mat_mul(&jac, &p1.pi_matrix(), &z),
        &linalg::transpose(&jac, n),
        &z,
    );
    let target = p2.pi_matrix();
    let m = j.codomain().dim();
    let mut out = vec![vec![z.clone(); m]; m];
    for a in 0..m {
        for b in 0..m {
            out[a][b] = &j.pull_scalar(&target[a][b])? - &pushed[a][b];
        }
    }
    Ok(out)
}

/// Matrix form of the Poisson-map condition; FAIL carries the first nonzero entry
/// and, when available, its value at a sample point.
pub fn check_poisson_map(
    j: &PolyMap,
    p1: &TwistedPoissonStructure,
    p2: &TwistedPoissonStructure,
    samples: &[Vec<Rational>],
) -> Result<Report> {
    let res = poisson_map_residual(j, p1, p2)?;
    let mut r = Report::new();
    let bad = res
        .iter()
        .enumerate()
        .flat_map(|(a, row)| row.iter().enumerate().map(move |(b, e)| (a, b, e)))
        .find(|(a, b, e)| a < b && !e.is_zero());
    match bad {
        None => r.pass("poisson_map"),
        Some((a, b, e)) => {
            let mut w = format!("residual[{},{}] = {e}", a + 1, b + 1);
            if let Some((p, v)) = samples
                .iter()
                .find_map(|p| e.eval(p).ok().filter(|v| !num_traits::Zero::is_zero(v)).map(|v| (p, v)))
            {
                w.push_str(&format!("; at {} = {}", fmt_point(p), fmt_rational(&v)));
            }
            r.fail("poisson_map", w);
        }
    }
    Ok(r)
}

/// `(φ1 − J*φ2)` on triples `Π1♯(J*dy_a)`; vanishes for twisted Poisson maps.
pub fn check_pullback_phi(
    j: &PolyMap,
    p1: &TwistedPoissonStructure,
    p2: &TwistedPoissonStructure,
) -> Result<Report> {
    ensure_same_chart(j.domain(), p1.chart())?;
    ensure_same_chart(j.codomain(), p2.chart())?;
    let diff = p1.phi().checked_sub(&j.pullback(p2.phi())?)?;
    let m = j.codomain().dim();
    let vs: Vec<TensorField> = (0..m)
        .map(|a| p1.anchor(&j.pullback(&TensorField::coord_form(j.codomain(), a))?))
        .collect::<Result<_>>()?;
    let mut r = Report::new();
    for t in index_tuples(m, 3) {
        let v = eval_form(&diff, &[&vs[t[0]], &vs[t[1]], &vs[t[2]]])?;
        if !v.is_zero() {
            let label = format!("(phi1 - J*phi2)(V{}, V{}, V{})", t[0] + 1, t[1] + 1, t[2] + 1);
            r.fail("pullback_phi", residual_witness(&label, &TensorField::function(v)));
            return Ok(r);
        }
    }
    r.pass("pullback_phi");
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{wedge, Variance};
    use crate::poisson::TwistedSymplecticStructure;
    use crate::scalar::{Chart, ChartRef};

    fn plane(name: &str) -> (ChartRef, TwistedSymplecticStructure) {
        let c = Chart::numbered(name, "y", 2).unwrap();
        let w = wedge(&TensorField::coord_form(&c, 0), &TensorField::coord_form(&c, 1)).unwrap();
        (c.clone(), TwistedSymplecticStructure::new(w).unwrap())
    }

    #[test]
    fn identity_is_poisson_map() {
        let (c, s) = plane("P");
        let p = s.to_poisson().unwrap();
        let id = PolyMap::identity(&c);
        assert!(check_poisson_map(&id, &p, &p, &[]).unwrap().passed());
        assert!(check_pullback_phi(&id, &p, &p).unwrap().passed());
    }

    #[test]
    fn constant_map_pullback_phi_vacuous() {
        let (c, s) = plane("P");
        let p = s.to_poisson().unwrap();
        let k = PolyMap::new(&c, &c, vec![ScalarExpr::one(&c), ScalarExpr::zero(&c)]).unwrap();
        assert!(check_pullback_phi(&k, &p, &p).unwrap().passed());
        // Constant maps into a nonzero structure are not Poisson.
        assert!(!check_poisson_map(&k, &p, &p, &[]).unwrap().passed());
        let _ = Variance::Form;
    }
}

//! Reference structures used by tests, the acceptance suite and the CLI examples.

use crate::calculus::{wedge, TensorField, Variance};
use crate::error::Result;
use crate::poisson::{TwistedPoissonStructure, TwistedSymplecticStructure};
use crate::scalar::{parse_expr, Chart, ChartRef, ScalarExpr};

pub fn r4() -> ChartRef {
    Chart::numbered("R4", "x", 4).expect("valid chart")
}

fn e(c: &ChartRef, s: &str) -> ScalarExpr {
    parse_expr(s, c).expect("fixture expression")
}

fn bivector(c: &ChartRef, i: usize, j: usize, coeff: &str) -> TensorField {
    wedge(&TensorField::coord_vector(c, i), &TensorField::coord_vector(c, j))
        .expect("same chart")
        .scale(&e(c, coeff))
}

/// `Π = x3 ∂1∧∂2 + x1 ∂3∧∂4` on `R4`, defined off `x1 = 0 or x3 = 0` together with `golden_phi`.
pub fn golden_pi(c: &ChartRef) -> TensorField {
    &bivector(c, 0, 1, "x3") + &bivector(c, 2, 3, "x1")
}

/// `φ = ((1/x3²) dx2 − (1/x1²) dx4) ∧ dx1 ∧ dx3`; with `drop_x1_term` the `1/x1²` part is removed.
pub fn golden_phi(c: &ChartRef, drop_x1_term: bool) -> TensorField {
    let a = TensorField::covector(
        c,
        vec![
            e(c, "0"),
            e(c, "1/x3^2"),
            e(c, "0"),
            e(c, if drop_x1_term { "0" } else { "-1/x1^2" }),
        ],
    );
    let t = wedge(&a, &TensorField::coord_form(c, 0)).expect("forms");
    wedge(&t, &TensorField::coord_form(c, 2)).expect("forms")
}

pub fn golden_r4() -> Result<TwistedPoissonStructure> {
    let c = r4();
    TwistedPoissonStructure::new(golden_pi(&c), golden_phi(&c, false))
}

/// Same bivector, 3-form missing its `1/x1²` term; fails the structural identity.
pub fn golden_r4_broken() -> Result<TwistedPoissonStructure> {
    let c = r4();
    TwistedPoissonStructure::new_unverified(golden_pi(&c), golden_phi(&c, true))
}

/// Same bivector with `φ = 0`.
pub fn golden_r4_untwisted() -> Result<TwistedPoissonStructure> {
    let c = r4();
    TwistedPoissonStructure::new_unverified(golden_pi(&c), TensorField::zero(&c, Variance::Form, 3))
}

/// `∂1∧∂2 + ∂3∧∂4` on `R4` with `φ = 0`: the untwisted companion fixture in four variables.
pub fn constant_poisson_r4() -> Result<TwistedPoissonStructure> {
    let c = r4();
    TwistedPoissonStructure::poisson(&bivector(&c, 0, 1, "1") + &bivector(&c, 2, 3, "1"))
}

pub fn plane(name: &str, prefix: &str) -> ChartRef {
    Chart::numbered(name, prefix, 2).expect("valid chart")
}

/// `ω = dx1∧dx2` on a plane chart.
pub fn constant_symplectic_plane(c: &ChartRef) -> Result<TwistedSymplecticStructure> {
    let w = wedge(&TensorField::coord_form(c, 0), &TensorField::coord_form(c, 1))?;
    TwistedSymplecticStructure::new(w)
}

/// `Π = ∂1∧∂2`, `φ = 0` on `R2(x1, x2)`.
pub fn constant_poisson_plane() -> Result<TwistedPoissonStructure> {
    let c = plane("R2", "x");
    TwistedPoissonStructure::poisson(bivector(&c, 0, 1, "1"))
}

pub fn zero_poisson(c: &ChartRef) -> Result<TwistedPoissonStructure> {
    TwistedPoissonStructure::poisson(TensorField::zero(c, Variance::Multivector, 2))
}

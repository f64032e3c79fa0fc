//! Floating-point companion: RK4 Hamiltonian flows, numeric leaf dimension and
//! sampled leaf correspondence through an algebroid bimodule.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::calculus::TensorField;
use crate::error::{Error, Result};
use crate::morita::AlgebroidBimoduleCandidate;
use crate::poisson::TwistedPoissonStructure;
use crate::sampling::Sampler;
use crate::scalar::ScalarExpr;

/// Denominators below this magnitude abort integration.
pub const POLE_TOLERANCE: f64 = 1e-8;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_THRESHOLD: f64 = 1e-9;
/// Normal deviation allowed per unit of cloud spread in [`leaf_consistency`].
pub const LEAF_TOLERANCE: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// `(t, x(t))`, times strictly increasing.
    pub points: Vec<(f64, Vec<f64>)>,
    pub step: f64,
    pub field: String,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        &self.points.last().expect("trajectory has its initial point").1
    }

    /// One line per point: `t x1 x2 ...`.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        for (t, x) in &self.points {
            s.push_str(&t.to_string());
            for v in x {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }
}

/// One line per point, space-separated.
pub fn cloud_table(cloud: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for x in cloud {
        let line: Vec<String> = x.iter().map(f64::to_string).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

fn eval_checked(e: &ScalarExpr, x: &[f64]) -> Result<f64> {
    let (v, den) = e.eval_f64(x);
    if den < POLE_TOLERANCE {
        return Err(Error::PoleProximity {
            point: x.to_vec(),
            magnitude: den,
        });
    }
    if !v.is_finite() {
        return Err(Error::NonFinite(x.to_vec()));
    }
    Ok(v)
}

/// A vector field prepared for repeated float evaluation.
struct Field {
    comps: Vec<ScalarExpr>,
}

impl Field {
    fn new(v: &TensorField) -> Result<Self> {
        v.ensure_variance(crate::calculus::Variance::Multivector)?;
        v.ensure_degree(1)?;
        Ok(Field { comps: v.components() })
    }

    fn at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.comps.iter().map(|c| eval_checked(c, x)).collect()
    }

    fn rk4_step(&self, x: &[f64], h: f64) -> Result<Vec<f64>> {
        let shift = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + s * b).collect() };
        let k1 = self.at(x)?;
        let k2 = self.at(&shift(x, &k1, h / 2.0))?;
        let k3 = self.at(&shift(x, &k2, h / 2.0))?;
        let k4 = self.at(&shift(x, &k3, h))?;
        let out: Vec<f64> = (0..x.len())
            .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(x.to_vec()));
        }
        Ok(out)
    }
}

/// Fixed-step RK4 for `ẋ = V(x)` over `[0, t_end]`; the last step is shortened to land on `t_end`.
pub fn integrate(v: &TensorField, x0: &[f64], t_end: f64, step: f64) -> Result<Trajectory> {
    if x0.len() != v.dim() {
        return Err(Error::Dimension(format!(
            "initial point has {} coordinates, chart has {}",
            x0.len(),
            v.dim()
        )));
    }
    if !(step > 0.0 && step.is_finite() && t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Usage(format!("need step > 0 and t_end >= 0, got {step} and {t_end}")));
    }
    let field = Field::new(v)?;
    field.at(x0)?;
    let n_steps = (t_end / step - 1e-9).ceil().max(0.0) as usize;
    let mut points = Vec::with_capacity(n_steps + 1);
    points.push((0.0, x0.to_vec()));
    let mut x = x0.to_vec();
    for k in 0..n_steps {
        let t0 = k as f64 * step;
        let h = (t_end - t0).min(step);
        x = field.rk4_step(&x, h)?;
        points.push((t0 + h, x.clone()));
    }
    Ok(Trajectory {
        points,
        step,
        field: v.to_string(),
    })
}

/// Flow of `H_f` under the structure's sharp convention.
pub fn hamiltonian_flow(
    p: &TwistedPoissonStructure,
    f: &ScalarExpr,
    x0: &[f64],
    t_end: f64,
    step: f64,
) -> Result<Trajectory> {
    integrate(&p.hamiltonian(f)?, x0, t_end, step)
}

/// `max_t |f(x(t)) − f(x0)|`.
pub fn conservation_error(f: &ScalarExpr, traj: &Trajectory) -> Result<f64> {
    let f0 = eval_checked(f, &traj.points[0].1)?;
    traj.points.iter().try_fold(0.0f64, |m, (_, x)| Ok(m.max((eval_checked(f, x)? - f0).abs())))
}

fn pi_at(p: &TwistedPoissonStructure, x: &[f64]) -> Result<DMatrix<f64>> {
    let n = p.dim();
    let m = p.pi_matrix();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = eval_checked(&m[i][j], x)?;
        }
    }
    Ok(out)
}

fn numeric_rank(sv: &DVector<f64>) -> usize {
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_THRESHOLD * top).count()
}

/// Numeric rank of `Π` at `x` via SVD.
pub fn leaf_dimension(p: &TwistedPoissonStructure, x: &[f64]) -> Result<usize> {
    let m = pi_at(p, x)?;
    Ok(numeric_rank(&m.singular_values()))
}

/// Fit of a cloud against the leaf through `reference`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafFit {
    pub leaf_dimension: usize,
    /// Largest displacement from the reference point.
    pub spread: f64,
    /// Largest normal deviation not explained by a quadratic graph over the leaf tangent.
    /// `None` when the leaf is open (no normal directions) or the cloud is too small to fit.
    pub residual: Option<f64>,
}

impl LeafFit {
    /// Open leaves and clouds that fit within `LEAF_TOLERANCE · spread`; too-small clouds are not consistent.
    pub fn consistent(&self, ambient: usize) -> bool {
        match self.residual {
            Some(r) => r <= LEAF_TOLERANCE * self.spread.max(f64::MIN_POSITIVE),
            None => self.leaf_dimension == ambient || self.spread == 0.0,
        }
    }
}

/// Local quadratic test that `cloud` lies on the leaf of `p` through `reference`.
///
/// Tangent directions are the image of `Π` at `reference`; the normal components of the
/// displacements are fitted as quadratics in the tangent components.
pub fn leaf_consistency(p: &TwistedPoissonStructure, reference: &[f64], cloud: &[Vec<f64>]) -> Result<LeafFit> {
    let n = p.dim();
    let svd = pi_at(p, reference)?.svd(true, false);
    let k = numeric_rank(&svd.singular_values);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let basis: Vec<DVector<f64>> = order.iter().map(|&i| u.column(i).into_owned()).collect();
    let r0 = DVector::from_column_slice(reference);
    let disp: Vec<DVector<f64>> = cloud.iter().map(|y| DVector::from_column_slice(y) - &r0).collect();
    let spread = disp.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let features = 1 + k + k * (k + 1) / 2;
    if k == n || spread == 0.0 || cloud.len() <= features {
        return Ok(LeafFit {
            leaf_dimension: k,
            spread,
            residual: None,
        });
    }
    let mut design = DMatrix::zeros(cloud.len(), features);
    for (row, d) in disp.iter().enumerate() {
        let t: Vec<f64> = basis[..k].iter().map(|b| b.dot(d)).collect();
        let mut col = 0;
        design[(row, col)] = 1.0;
        col += 1;
        for &ti in &t {
            design[(row, col)] = ti;
            col += 1;
        }
        for i in 0..k {
            for j in i..k {
                design[(row, col)] = t[i] * t[j];
                col += 1;
            }
        }
    }
    let lsq = design.clone().svd(true, true);
    let mut worst = 0.0f64;
    for b in &basis[k..] {
        let nu = DVector::from_iterator(disp.len(), disp.iter().map(|d| b.dot(d)));
        let coef = lsq
            .solve(&nu, 1e-12)
            .map_err(|e| Error::Dimension(format!("least-squares leaf fit: {e}")))?;
        let res = &design * coef - &nu;
        worst = worst.max(res.amax());
    }
    Ok(LeafFit {
        leaf_dimension: k,
        spread,
        residual: Some(worst),
    })
}

/// Exploration budget for [`leaf_correspondence_sample`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExplorationBudget {
    pub segments: usize,
    pub max_steps_per_segment: usize,
    pub step: f64,
    pub seed: u64,
}

impl Default for ExplorationBudget {
    fn default() -> Self {
        ExplorationBudget {
            segments: 40,
            max_steps_per_segment: 50,
            step: 1e-2,
            seed: crate::sampling::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LeafSample {
    /// Orbit points in the bimodule, starting at `x0`.
    pub orbit: Vec<Vec<f64>>,
    pub cloud1: Vec<Vec<f64>>,
    pub cloud2: Vec<Vec<f64>>,
    /// A segment stopped near a pole; the clouds are partial.
    pub truncated: bool,
    pub fit1: LeafFit,
    pub fit2: LeafFit,
    pub seed: u64,
}

/// Random piecewise flows along `ρ1`/`ρ2` generators from `x0`; `J1`/`J2` images are fitted
/// against the leaves of `p1`/`p2` through `J1(x0)`/`J2(x0)`.
pub fn leaf_correspondence_sample(
    c: &AlgebroidBimoduleCandidate,
    p1: &TwistedPoissonStructure,
    p2: &TwistedPoissonStructure,
    x0: &[f64],
    budget: ExplorationBudget,
) -> Result<LeafSample> {
    let gens: Vec<Field> = c
        .action1
        .iter()
        .chain(&c.action2)
        .map(Field::new)
        .collect::<Result<_>>()?;
    if x0.len() != c.m_chart.dim() {
        return Err(Error::Dimension(format!(
            "start point has {} coordinates, bimodule chart has {}",
            x0.len(),
            c.m_chart.dim()
        )));
    }
    let mut rng = Sampler::new(budget.seed);
    let mut x = x0.to_vec();
    let mut orbit = vec![x.clone()];
    let mut truncated = false;
    'segments: for _ in 0..budget.segments {
        let g = rng.int_in(0, gens.len() as i64 - 1) as usize;
        let steps = rng.int_in(1, budget.max_steps_per_segment.max(1) as i64) as usize;
        let h = if rng.unit() < 0.5 { -budget.step } else { budget.step };
        let mut y = x.clone();
        for _ in 0..steps {
            match gens[g].rk4_step(&y, h) {
                Ok(next) => y = next,
                Err(Error::PoleProximity { .. }) | Err(Error::NonFinite(_)) => {
                    truncated = true;
                    break 'segments;
                }
                Err(e) => return Err(e),
            }
        }
        x = y;
        orbit.push(x.clone());
    }
    let cloud1: Vec<Vec<f64>> = orbit.iter().map(|y| c.j1.eval_f64(y)).collect();
    let cloud2: Vec<Vec<f64>> = orbit.iter().map(|y| c.j2.eval_f64(y)).collect();
    let fit1 = leaf_consistency(p1, &cloud1[0], &cloud1)?;
    let fit2 = leaf_consistency(p2, &cloud2[0], &cloud2)?;
    Ok(LeafSample {
        orbit,
        cloud1,
        cloud2,
        truncated,
        fit1,
        fit2,
        seed: budget.seed,
    })
}

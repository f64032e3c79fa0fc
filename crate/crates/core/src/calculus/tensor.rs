use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{ensure_same_chart, same_chart, ChartRef, Rational, ScalarExpr};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Variance {
    Multivector,
    Form,
}

impl Variance {
    pub fn name(self) -> &'static str {
        match self {
            Variance::Multivector => "multivector",
            Variance::Form => "form",
        }
    }
}

/// Index tuple, 0-based, strictly increasing.
pub type Index = Vec<usize>;

/// Sign of the permutation sorting `idx`, or `None` if an index repeats.
pub fn sort_sign(idx: &[usize]) -> Option<(i32, Index)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    // Insertion sort counts transpositions; tuples are short.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((sign, v))
    }
}

/// All strictly increasing `k`-tuples from `0..n`, in lexicographic order.
pub fn index_tuples(n: usize, k: usize) -> Vec<Index> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Index>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Antisymmetric multivector field or differential form on a chart.
///
/// Coefficients are keyed by strictly increasing 0-based tuples; zero
/// coefficients are not stored, so structural equality is value equality.
#[derive(Clone, PartialEq)]
pub struct TensorField {
    chart: ChartRef,
    variance: Variance,
    degree: usize,
    coeffs: BTreeMap<Index, ScalarExpr>,
}

impl TensorField {
    pub fn zero(chart: &ChartRef, variance: Variance, degree: usize) -> Self {
        TensorField {
            chart: chart.clone(),
            variance,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(f: ScalarExpr, variance: Variance) -> Self {
        let mut t = Self::zero(f.chart(), variance, 0);
        t.insert(Vec::new(), f);
        t
    }

    pub fn function(f: ScalarExpr) -> Self {
        Self::scalar(f, Variance::Multivector)
    }

    /// Coordinate vector field `∂_i`.
    pub fn coord_vector(chart: &ChartRef, i: usize) -> Self {
        let mut t = Self::zero(chart, Variance::Multivector, 1);
        t.insert(vec![i], ScalarExpr::one(chart));
        t
    }

    /// Coordinate 1-form `dx_i`.
    pub fn coord_form(chart: &ChartRef, i: usize) -> Self {
        let mut t = Self::zero(chart, Variance::Form, 1);
        t.insert(vec![i], ScalarExpr::one(chart));
        t
    }

    /// `df`.
    pub fn differential(f: &ScalarExpr) -> Self {
        let chart = f.chart();
        let mut t = Self::zero(chart, Variance::Form, 1);
        for i in 0..chart.dim() {
            t.insert(vec![i], f.partial(i));
        }
        t
    }

    /// Vector field with the given components.
    pub fn vector(chart: &ChartRef, comps: Vec<ScalarExpr>) -> Self {
        let mut t = Self::zero(chart, Variance::Multivector, 1);
        for (i, c) in comps.into_iter().enumerate() {
            t.insert(vec![i], c);
        }
        t
    }

    /// 1-form with the given components.
    pub fn covector(chart: &ChartRef, comps: Vec<ScalarExpr>) -> Self {
        let mut t = Self::zero(chart, Variance::Form, 1);
        for (i, c) in comps.into_iter().enumerate() {
            t.insert(vec![i], c);
        }
        t
    }

    /// Build from entries with strictly increasing tuples; repeated tuples are rejected.
    pub fn from_entries(
        chart: &ChartRef,
        variance: Variance,
        degree: usize,
        entries: impl IntoIterator<Item = (Index, ScalarExpr)>,
    ) -> Result<Self> {
        let mut t = Self::zero(chart, variance, degree);
        let mut seen = std::collections::BTreeSet::new();
        for (idx, c) in entries {
            t.check_index(&idx)?;
            if !idx.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidIndex {
                    tuple: idx.iter().map(|i| i + 1).collect(),
                    msg: "indices must be strictly increasing".into(),
                });
            }
            if !seen.insert(idx.clone()) {
                return Err(Error::InvalidIndex {
                    tuple: idx.iter().map(|i| i + 1).collect(),
                    msg: "duplicate entry".into(),
                });
            }
            ensure_same_chart(chart, c.chart())?;
            t.insert(idx, c);
        }
        Ok(t)
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.degree {
            return Err(Error::InvalidIndex {
                tuple: idx.iter().map(|i| i + 1).collect(),
                msg: format!("expected {} indices", self.degree),
            });
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.chart.dim()) {
            return Err(Error::InvalidIndex {
                tuple: idx.iter().map(|i| i + 1).collect(),
                msg: format!("index {} exceeds chart dimension {}", bad + 1, self.chart.dim()),
            });
        }
        Ok(())
    }

    fn insert(&mut self, idx: Index, c: ScalarExpr) {
        if !c.is_zero() {
            self.coeffs.insert(idx, c);
        }
    }

    /// Add `c` to the coefficient at a possibly unsorted tuple, respecting antisymmetry.
    pub(crate) fn accumulate(&mut self, idx: &[usize], c: ScalarExpr) {
        if c.is_zero() {
            return;
        }
        let Some((sign, sorted)) = sort_sign(idx) else {
            return;
        };
        let c = if sign < 0 { -c } else { c };
        match self.coeffs.remove(&sorted) {
            Some(old) => self.insert(sorted, &old + &c),
            None => self.insert(sorted, c),
        }
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at a sorted tuple.
    pub fn get(&self, idx: &[usize]) -> ScalarExpr {
        self.coeffs
            .get(idx)
            .cloned()
            .unwrap_or_else(|| ScalarExpr::zero(&self.chart))
    }

    /// Coefficient at an arbitrary tuple via antisymmetric extension.
    pub fn get_any(&self, idx: &[usize]) -> ScalarExpr {
        match sort_sign(idx) {
            None => ScalarExpr::zero(&self.chart),
            Some((s, sorted)) => {
                let c = self.get(&sorted);
                if s < 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// Value of a degree-0 field.
    pub fn as_scalar(&self) -> ScalarExpr {
        self.get(&[])
    }

    /// Components of a degree-1 field.
    pub fn components(&self) -> Vec<ScalarExpr> {
        (0..self.dim()).map(|i| self.get(&[i])).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Index, &ScalarExpr)> {
        self.coeffs.iter()
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn map_coeffs(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        let mut t = Self::zero(&self.chart, self.variance, self.degree);
        for (k, c) in &self.coeffs {
            t.insert(k.clone(), f(c));
        }
        t
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&ScalarExpr) -> Result<ScalarExpr>) -> Result<Self> {
        let mut t = Self::zero(&self.chart, self.variance, self.degree);
        for (k, c) in &self.coeffs {
            t.insert(k.clone(), f(c)?);
        }
        Ok(t)
    }

    pub fn scale(&self, f: &ScalarExpr) -> Self {
        if f.is_zero() {
            return Self::zero(&self.chart, self.variance, self.degree);
        }
        self.map_coeffs(|c| c * f)
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    pub fn ensure_compatible(&self, other: &Self) -> Result<()> {
        ensure_same_chart(&self.chart, &other.chart)?;
        if self.variance != other.variance {
            return Err(Error::VarianceMismatch {
                expected: self.variance.name(),
                found: other.variance.name(),
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "degree {} vs degree {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn ensure_variance(&self, v: Variance) -> Result<()> {
        if self.variance == v {
            Ok(())
        } else {
            Err(Error::VarianceMismatch {
                expected: v.name(),
                found: self.variance.name(),
            })
        }
    }

    pub fn ensure_degree(&self, k: usize) -> Result<()> {
        if self.degree == k {
            Ok(())
        } else {
            Err(Error::DegreeMismatch(format!(
                "expected a {} of degree {k}, found degree {}",
                self.variance.name(),
                self.degree
            )))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            match out.coeffs.remove(k) {
                Some(old) => out.insert(k.clone(), &old + c),
                None => out.insert(k.clone(), c.clone()),
            }
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    /// Largest total polynomial degree among coefficients; `None` if any coefficient is not polynomial.
    pub fn max_poly_degree(&self) -> Option<u32> {
        let mut m = 0;
        for c in self.coeffs.values() {
            m = m.max(c.poly_degree()?);
        }
        Some(m)
    }

    pub fn same_chart(&self, other: &ChartRef) -> bool {
        same_chart(&self.chart, other)
    }

    /// Basis symbol for a coordinate index in the text format.
    fn basis_symbol(&self, i: usize) -> String {
        let v = &self.chart.vars()[i];
        match self.variance {
            Variance::Form => format!("d{v}"),
            Variance::Multivector => format!("d/d{v}"),
        }
    }
}

impl std::ops::Add for &TensorField {
    type Output = TensorField;
    fn add(self, rhs: &TensorField) -> TensorField {
        self.checked_add(rhs).expect("incompatible tensor fields")
    }
}

impl std::ops::Sub for &TensorField {
    type Output = TensorField;
    fn sub(self, rhs: &TensorField) -> TensorField {
        self.checked_sub(rhs).expect("incompatible tensor fields")
    }
}

impl fmt::Display for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (idx, c) in &self.coeffs {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let basis: Vec<String> = idx.iter().map(|&i| self.basis_symbol(i)).collect();
            if idx.is_empty() {
                write!(f, "({c})")?;
            } else if c.is_one() {
                f.write_str(&basis.join("^"))?;
            } else {
                write!(f, "({c})*{}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TensorField[{} {} deg {}]({})",
            self.chart.name(),
            self.variance.name(),
            self.degree,
            self
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Chart;

    #[test]
    fn sort_signs() {
        assert_eq!(sort_sign(&[0, 1, 2]), Some((1, vec![0, 1, 2])));
        assert_eq!(sort_sign(&[1, 0, 2]), Some((-1, vec![0, 1, 2])));
        assert_eq!(sort_sign(&[2, 0, 1]), Some((1, vec![0, 1, 2])));
        assert_eq!(sort_sign(&[1, 1]), None);
    }

    #[test]
    fn tuple_enumeration() {
        assert_eq!(index_tuples(4, 2).len(), 6);
        assert_eq!(index_tuples(3, 0), vec![Vec::<usize>::new()]);
        assert!(index_tuples(2, 3).is_empty());
    }

    #[test]
    fn entries_validated() {
        let c = Chart::numbered("R3", "x", 3).unwrap();
        let one = ScalarExpr::one(&c);
        let e = TensorField::from_entries(&c, Variance::Form, 2, [(vec![1, 0], one.clone())]);
        assert!(matches!(e, Err(Error::InvalidIndex { .. })));
        let e = TensorField::from_entries(&c, Variance::Form, 2, [(vec![0, 3], one.clone())]);
        assert!(matches!(e, Err(Error::InvalidIndex { .. })));
        let t = TensorField::from_entries(&c, Variance::Form, 2, [(vec![0, 2], one)]).unwrap();
        assert_eq!(t.get_any(&[2, 0]), -ScalarExpr::one(&c));
        assert_eq!(t.to_string(), "dx1^dx3");
    }
}

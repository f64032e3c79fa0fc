use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use super::chart::{ensure_same_chart, same_chart, ChartRef};
use super::poly::{fmt_rational, gcd, int, Poly, Rational};
use crate::error::{Error, Result};

/// Exact rational function `num / den` on a chart.
///
/// Canonical form: `gcd(num, den) = 1`, `den` monic in grlex order, zero is `0/1`.
/// Two values on the same chart are equal iff their canonical forms coincide.
#[derive(Clone)]
pub struct ScalarExpr {
    chart: ChartRef,
    num: Poly,
    den: Poly,
}

impl ScalarExpr {
    pub fn zero(chart: &ChartRef) -> Self {
        let n = chart.dim();
        ScalarExpr {
            chart: chart.clone(),
            num: Poly::zero(n),
            den: Poly::one(n),
        }
    }

    pub fn one(chart: &ChartRef) -> Self {
        Self::constant(chart, Rational::one())
    }

    pub fn constant(chart: &ChartRef, c: Rational) -> Self {
        let n = chart.dim();
        ScalarExpr {
            chart: chart.clone(),
            num: Poly::constant(n, c),
            den: Poly::one(n),
        }
    }

    pub fn from_int(chart: &ChartRef, c: i64) -> Self {
        Self::constant(chart, int(c))
    }

    pub fn var(chart: &ChartRef, i: usize) -> Self {
        Self::from_poly(chart, Poly::var(chart.dim(), i))
    }

    pub fn var_named(chart: &ChartRef, name: &str) -> Result<Self> {
        let i = chart.var_index(name).ok_or_else(|| Error::UnknownVariable {
            name: name.to_string(),
            chart: chart.name().to_string(),
        })?;
        Ok(Self::var(chart, i))
    }

    pub fn from_poly(chart: &ChartRef, p: Poly) -> Self {
        debug_assert_eq!(p.nvars(), chart.dim());
        ScalarExpr {
            chart: chart.clone(),
            den: Poly::one(p.nvars()),
            num: p,
        }
    }

    /// `num / den` in canonical form.
    pub fn ratio(chart: &ChartRef, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(chart.clone(), num, den))
    }

    fn canonical(chart: ChartRef, num: Poly, den: Poly) -> Self {
        let n = chart.dim();
        if num.is_zero() {
            return ScalarExpr {
                chart,
                num,
                den: Poly::one(n),
            };
        }
        if let Some(c) = den.constant_value() {
            return ScalarExpr {
                chart,
                num: num.scale(&c.recip()),
                den: Poly::one(n),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        Self::normalized(chart, num, den)
    }

    /// Scale an already reduced fraction so the denominator is monic.
    fn normalized(chart: ChartRef, num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            let n = chart.dim();
            return ScalarExpr { chart, num, den: Poly::one(n) };
        }
        let (lc, den) = den.monic();
        let num = if lc.is_one() { num } else { num.scale(&lc.recip()) };
        ScalarExpr { chart, num, den }
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Polynomial total degree; `None` for zero or non-polynomial values.
    pub fn poly_degree(&self) -> Option<u32> {
        if self.is_polynomial() {
            self.num.total_degree()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.chart);
        }
        ScalarExpr {
            chart: self.chart.clone(),
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        ensure_same_chart(&self.chart, &rhs.chart)?;
        Ok(self.add_unchecked(rhs))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        ensure_same_chart(&self.chart, &rhs.chart)?;
        Ok(self.mul_unchecked(rhs))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        ensure_same_chart(&self.chart, &rhs.chart)?;
        let inv = rhs.inv()?;
        Ok(self.mul_unchecked(&inv))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (lc, num) = self.num.monic();
        let inv = lc.recip();
        Ok(ScalarExpr {
            chart: self.chart.clone(),
            num: self.den.scale(&inv),
            den: num,
        })
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        // Powers of a reduced fraction stay reduced; the monic denominator stays monic.
        Ok(ScalarExpr {
            chart: self.chart.clone(),
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    fn add_unchecked(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let chart = self.chart.clone();
        if self.den.is_one() && rhs.den.is_one() {
            return ScalarExpr {
                chart,
                num: &self.num + &rhs.num,
                den: self.den.clone(),
            };
        }
        // a/b + c/d with g = gcd(b, d): every common factor of a*(d/g) + c*(b/g) and b*(d/g)
        // divides g, so reducing by gcd(num, g) yields lowest terms.
        let g = if self.den == rhs.den { self.den.clone() } else { gcd(&self.den, &rhs.den) };
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            let den = &self.den * &rhs.den;
            return Self::normalized(chart, num, den);
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        if num.is_zero() {
            return Self::zero(&chart);
        }
        let h = gcd(&num, &g);
        let (num, den) = if h.is_one() {
            (num, &self.den * &d1)
        } else {
            (
                num.div_exact(&h).expect("gcd divides"),
                &(&b1 * &d1) * &g.div_exact(&h).expect("gcd divides"),
            )
        };
        Self::normalized(chart, num, den)
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let chart = self.chart.clone();
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(&chart);
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ScalarExpr {
                chart,
                num: &self.num * &rhs.num,
                den: self.den.clone(),
            };
        }
        // Cross-cancel; both factors are reduced, so the result is reduced.
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = rhs.den.div_exact(&g1).expect("gcd divides");
        let c = rhs.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        Self::normalized(chart, &a * &c, &b * &d)
    }

    /// Exact derivative with respect to the `v`-th chart variable.
    pub fn partial(&self, v: usize) -> Self {
        let dn = self.num.partial(v);
        if self.den.is_one() {
            return ScalarExpr {
                chart: self.chart.clone(),
                num: dn,
                den: self.den.clone(),
            };
        }
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return Self::canonical(self.chart.clone(), dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        let den = &self.den * &self.den;
        Self::canonical(self.chart.clone(), num, den)
    }

    pub fn partial_var(&self, name: &str) -> Result<Self> {
        let v = self.chart.var_index(name).ok_or_else(|| Error::UnknownVariable {
            name: name.to_string(),
            chart: self.chart.name().to_string(),
        })?;
        Ok(self.partial(v))
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.chart.dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, chart `{}` has {}",
                point.len(),
                self.chart.name(),
                self.chart.dim()
            )));
        }
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Pole {
                point: point.iter().map(fmt_rational).collect::<Vec<_>>().join(", "),
                denominator: self.den.fmt_with(self.chart.vars()),
            });
        }
        Ok(self.num.eval(point) / d)
    }

    /// Floating-point evaluation; returns `(value, |denominator|)`.
    pub fn eval_f64(&self, point: &[f64]) -> (f64, f64) {
        let d = if self.den.is_one() {
            1.0
        } else {
            self.den.eval_f64(point)
        };
        (self.num.eval_f64(point) / d, d.abs())
    }

    /// Substitute `args[i]` for the `i`-th variable; result lives on the charts of `args`.
    pub fn compose(&self, args: &[ScalarExpr], target: &ChartRef) -> Result<Self> {
        if args.len() != self.chart.dim() {
            return Err(Error::Dimension(format!(
                "composition needs {} arguments, got {}",
                self.chart.dim(),
                args.len()
            )));
        }
        for a in args {
            ensure_same_chart(&a.chart, target)?;
        }
        let num = compose_poly(&self.num, args, target);
        let den = compose_poly(&self.den, args, target);
        if den.is_zero() {
            return Err(Error::PoleUnderComposition(
                self.den.fmt_with(self.chart.vars()),
            ));
        }
        Ok(num.checked_div(&den).expect("nonzero denominator"))
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.constant_value().and_then(|c| c.to_f64())
    }

    fn is_single_power(p: &Poly) -> bool {
        p.num_terms() == 1
            && p.terms()
                .next()
                .is_some_and(|(m, c)| c.is_one() && m.exps().iter().filter(|&&e| e > 0).count() == 1)
    }
}

fn compose_poly(p: &Poly, args: &[ScalarExpr], target: &ChartRef) -> ScalarExpr {
    let mut acc = ScalarExpr::zero(target);
    // Cache powers per variable; exponents are small in practice.
    let mut powers: Vec<Vec<ScalarExpr>> = args.iter().map(|a| vec![ScalarExpr::one(target), a.clone()]).collect();
    for (m, c) in p.terms() {
        let mut t = ScalarExpr::constant(target, c.clone());
        for (v, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let cache = &mut powers[v];
            while cache.len() <= e as usize {
                let next = cache.last().unwrap().mul_unchecked(&cache[1]);
                cache.push(next);
            }
            t = t.mul_unchecked(&cache[e as usize]);
        }
        acc = acc.add_unchecked(&t);
    }
    acc
}

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        same_chart(&self.chart, &other.chart) && self.num == other.num && self.den == other.den
    }
}

impl Eq for ScalarExpr {}

impl std::hash::Hash for ScalarExpr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.chart.vars();
        let num = self.num.fmt_with(vars);
        if self.den.is_one() {
            return f.write_str(&num);
        }
        let num_atomic = self.num.num_terms() == 1;
        let den = self.den.fmt_with(vars);
        let num = if num_atomic { num } else { format!("({num})") };
        if Self::is_single_power(&self.den) {
            write!(f, "{num}/{den}")
        } else {
            write!(f, "{num}/({den})")
        }
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarExpr[{}]({})", self.chart.name(), self)
    }
}

// Operator impls panic on chart mismatch; use the `checked_*` forms at API boundaries.
macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                assert!(
                    same_chart(&self.chart, &rhs.chart),
                    "chart mismatch: `{}` vs `{}`",
                    self.chart.name(),
                    rhs.chart.name()
                );
                #[allow(clippy::redundant_closure_call)]
                ($body)(self, rhs)
            }
        }
        impl $trait<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                (&self).$method(rhs)
            }
        }
        impl $trait<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &ScalarExpr, b: &ScalarExpr| a.add_unchecked(b));
binop!(Sub, sub, |a: &ScalarExpr, b: &ScalarExpr| a.add_unchecked(&-b));
binop!(Mul, mul, |a: &ScalarExpr, b: &ScalarExpr| a.mul_unchecked(b));

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr {
            chart: self.chart.clone(),
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

impl std::iter::Sum for ScalarExpr {
    fn sum<I: Iterator<Item = ScalarExpr>>(mut iter: I) -> ScalarExpr {
        let first = iter.next().expect("sum of an empty iterator has no chart");
        iter.fold(first, |a, b| a.add_unchecked(&b))
    }
}

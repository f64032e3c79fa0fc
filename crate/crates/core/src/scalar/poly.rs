//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic with the chart's variable order (`x1 > x2 > ...`).
//! The largest key is the leading term. Zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exponent vector, one entry per chart variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(SmallVec<[u32; 8]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn from_exps(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.0.len());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().unwrap().is_one(),
            _ => false,
        }
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms from the leading one down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.leading().map(|(m, _)| m.degree())
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.0[v] > 0)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    /// `self += c * m * other`, in place.
    fn add_scaled(&mut self, other: &Poly, m: &Monomial, c: &Rational) {
        for (k, a) in &other.terms {
            let key = k.mul(m);
            let delta = a * c;
            match self.terms.entry(key) {
                Entry::Vacant(e) => {
                    e.insert(delta);
                }
                Entry::Occupied(mut e) => {
                    *e.get_mut() += delta;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn partial(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[v];
            if e == 0 {
                continue;
            }
            let mut k = m.clone();
            k.0[v] = e - 1;
            out.terms.insert(k, c * int(e as i64));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.0.iter()) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (x, &e) in point.iter().zip(m.0.iter()) {
                    if e > 0 {
                        t *= x.powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Divide through by the leading coefficient; returns (leading coefficient, monic part).
    pub fn monic(&self) -> (Rational, Poly) {
        match self.leading() {
            None => (Rational::one(), self.clone()),
            Some((_, lc)) => {
                let lc = lc.clone();
                if lc.is_one() {
                    (lc, self.clone())
                } else {
                    let inv = lc.recip();
                    (lc, self.scale(&inv))
                }
            }
        }
    }

    fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = it.next().cloned().unwrap_or_else(|| Monomial::one(self.nvars));
        it.fold(first, |acc, m| acc.gcd(m))
    }

    fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (m.quotient_of(k), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc_inv) = (dm.clone(), dc.recip());
        let mut r = self.clone();
        let mut q = Poly::zero(self.nvars);
        while let Some((rm, rc)) = r.leading() {
            if !dm.divides(rm) {
                return None;
            }
            let m = dm.quotient_of(rm);
            let c = rc * &dc_inv;
            r.add_scaled(d, &m, &-c.clone());
            q.terms.insert(m, c);
        }
        Some(q)
    }

    /// Coefficients with respect to variable `v`, each with `v` removed.
    fn coeffs_in(&self, v: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[v];
            let mut k = m.clone();
            k.0[v] = 0;
            out.entry(e)
                .or_insert_with(|| Poly::zero(self.nvars))
                .terms
                .insert(k, c.clone());
        }
        out
    }

    fn leading_coeff_in(&self, v: usize) -> (u32, Poly) {
        let d = self.degree_in(v);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[v] == d {
                let mut k = m.clone();
                k.0[v] = 0;
                out.terms.insert(k, c.clone());
            }
        }
        (d, out)
    }

    pub fn fmt_with(&self, vars: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = fmt_monomial(m, vars);
            match (abs.is_one(), mono.is_empty()) {
                (_, true) => s.push_str(&fmt_rational(&abs)),
                (true, false) => s.push_str(&mono),
                (false, false) => {
                    s.push_str(&fmt_rational(&abs));
                    s.push('*');
                    s.push_str(&mono);
                }
            }
        }
        s
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_monomial(m: &Monomial, vars: &[String]) -> String {
    let mut parts = Vec::new();
    for (v, &e) in vars.iter().zip(m.0.iter()) {
        match e {
            0 => {}
            1 => parts.push(v.clone()),
            _ => parts.push(format!("{v}^{e}")),
        }
    }
    parts.join("*")
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        big.add_scaled(small, &Monomial::one(self.nvars), &Rational::one());
        big
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Monomial::one(self.nvars), &-Rational::one());
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let (outer, inner) = if self.terms.len() <= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &outer.terms {
            out.add_scaled(inner, m, c);
        }
        out
    }
}

/// Greatest common divisor, normalized to be monic. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic().1;
    }
    if b.is_zero() {
        return a.monic().1;
    }
    let n = a.nvars;
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mono = ma.gcd(&mb);
    let g = gcd_rec(&a.div_monomial(&ma), &b.div_monomial(&mb));
    g.mul_term(&mono, &Rational::one())
}

fn used_vars(p: &Poly) -> Vec<usize> {
    (0..p.nvars).filter(|&v| p.uses_var(v)).collect()
}

/// Recursive content/primitive-part gcd of two nonzero polynomials.
fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars;
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    if a.terms.len() == 1 || b.terms.len() == 1 {
        let m = a.monomial_content().gcd(&b.monomial_content());
        return Poly::term(m, Rational::one());
    }
    if certified_coprime(a, b) {
        return Poly::one(n);
    }
    let va = used_vars(a);
    let vb = used_vars(b);
    let common: Vec<usize> = va.iter().copied().filter(|v| vb.contains(v)).collect();
    let Some(&v) = common
        .iter()
        .min_by_key(|&&v| (a.degree_in(v) + b.degree_in(v), v))
    else {
        // No shared variable: the gcd cannot depend on any variable.
        return Poly::one(n);
    };
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd_rec(&ca, &cb);
    let g = prs_gcd(pa, pb, v);
    (&c * &g).monic().1
}

/// Content of `p` viewed as a polynomial in `v` over the remaining variables (monic).
fn content_in(p: &Poly, v: usize) -> Poly {
    let mut coeffs = p.coeffs_in(v).into_values();
    let first = coeffs.next().expect("nonzero polynomial");
    let mut acc = first.monic().1;
    for c in coeffs {
        if acc.is_one() {
            break;
        }
        acc = gcd(&acc, &c);
    }
    acc
}

fn primitive_part_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides")
}

/// Primitive polynomial remainder sequence in `v`; inputs primitive in `v`.
fn prs_gcd(a: Poly, b: Poly, v: usize) -> Poly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if b.degree_in(v) == 0 {
            // b is primitive and free of v, so it is a unit here.
            return Poly::one(a.nvars);
        }
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            return b.monic().1;
        }
        if r.degree_in(v) == 0 {
            return Poly::one(a.nvars);
        }
        a = b;
        b = primitive_part_in(&r, v);
    }
}

fn pseudo_rem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let (db, lb) = b.leading_coeff_in(v);
    let mut r = a.clone();
    while !r.is_zero() {
        let (dr, lr) = r.leading_coeff_in(v);
        if dr < db {
            break;
        }
        let mut shift = Monomial::one(a.nvars);
        shift.0[v] = dr - db;
        let mut next = &lb * &r;
        for (m, c) in &lr.terms {
            next.add_scaled(b, &shift.mul(m), &-c.clone());
        }
        r = next;
    }
    r
}

/// Coefficients in `v`, indexed by degree, after substituting `point` for the other variables.
fn univariate_image(p: &Poly, v: usize, point: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); p.degree_in(v) as usize + 1];
    for (m, c) in &p.terms {
        let mut t = c.clone();
        for (u, &e) in m.0.iter().enumerate() {
            if u != v && e > 0 {
                t *= num_traits::pow(point[u].clone(), e as usize);
            }
        }
        out[m.0[v] as usize] += t;
    }
    out
}

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Degree of the gcd of two nonzero dense univariate polynomials (Euclid over the rationals).
fn univariate_gcd_degree(mut a: Vec<Rational>, mut b: Vec<Rational>) -> usize {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while b.len() > 1 {
        let inv = b.last().expect("nonzero").recip();
        while a.len() >= b.len() {
            let q = a.last().expect("nonzero") * &inv;
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                a[shift + i] -= &q * bc;
            }
            a.pop();
            trim(&mut a);
        }
        if a.is_empty() {
            return b.len() - 1;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if b.is_empty() {
        a.len().saturating_sub(1)
    } else {
        0
    }
}

/// True when `a` and `b` provably share no nonconstant factor.
///
/// For a shared variable `v` and a point keeping both leading coefficients in `v` nonzero,
/// `deg_v gcd(a, b)` is at most the degree of the gcd of the univariate images; a constant
/// image gcd for every shared variable forces a constant gcd. `false` means "not certified".
fn certified_coprime(a: &Poly, b: &Poly) -> bool {
    const TRIES: i64 = 6;
    let n = a.nvars;
    for v in (0..n).filter(|&v| a.uses_var(v) && b.uses_var(v)) {
        let (da, db) = (a.degree_in(v) as usize, b.degree_in(v) as usize);
        let certified = (1..=TRIES).any(|k| {
            let point: Vec<Rational> = (0..n).map(|u| int((u as i64 * 5 + k * 3) % 13 - 6)).collect();
            let ia = univariate_image(a, v, &point);
            let ib = univariate_image(b, v, &point);
            let full = !ia[da].is_zero() && !ib[db].is_zero();
            full && univariate_gcd_degree(ia, ib) == 0
        });
        if !certified {
            return false;
        }
    }
    true
}

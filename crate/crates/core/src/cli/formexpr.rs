//! Inline tensors for command-line flags: `1*dx1^dx2`, `x2*dx1 - (x1+1)*dx3`, `x1*d/dx2`.
//!
//! A term is a `*`-product of coefficient factors and one basis factor; a basis factor is a
//! `^`-chain of `dVAR` (forms) or `d/dVAR` (multivectors). Terms are split at top-level `+`/`-`.

use crate::calculus::{TensorField, Variance};
use crate::error::{Error, Result};
use crate::scalar::{parse_expr, ChartRef, ScalarExpr};

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

/// Split at `+`/`-` outside parentheses that are not unary; each piece keeps its sign.
fn split_terms(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let binary = matches!(prev, Some(p) if !matches!(p, '+' | '-' | '*' | '/' | '^' | '('));
        if (ch == '+' || ch == '-') && depth == 0 && binary && !cur.trim().is_empty() {
            out.push(cur.trim().to_string());
            cur.clear();
        }
        cur.push(ch);
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Split at top-level `*`.
fn split_factors(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// Indices of a basis factor, or `None` when the factor is a coefficient.
fn basis(factor: &str, chart: &ChartRef, variance: Variance) -> Option<Vec<usize>> {
    let prefix = match variance {
        Variance::Form => "d",
        Variance::Multivector => "d/d",
    };
    factor
        .split('^')
        .map(|p| p.trim().strip_prefix(prefix).and_then(|v| chart.var_index(v)))
        .collect()
}

/// Parse a sum of terms; `degree` fixes the degree when the text is identically zero.
pub fn parse_tensor(text: &str, chart: &ChartRef, variance: Variance, degree: Option<usize>) -> Result<TensorField> {
    let mut acc: Option<TensorField> = None;
    for term in split_terms(text) {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1, b.trim()),
            None => (1, term.strip_prefix('+').unwrap_or(&term).trim()),
        };
        let mut coeff = ScalarExpr::from_int(chart, sign);
        let mut idx: Option<Vec<usize>> = None;
        for f in split_factors(body) {
            if f.is_empty() {
                return Err(usage(format!("empty factor in `{term}`")));
            }
            match basis(f, chart, variance) {
                Some(ix) if idx.is_none() => idx = Some(ix),
                Some(_) => return Err(usage(format!("two basis factors in `{term}`"))),
                None => coeff = coeff.checked_mul(&parse_expr(f, chart)?)?,
            }
        }
        let ix = idx.unwrap_or_default();
        let mut t = TensorField::zero(chart, variance, ix.len());
        t.accumulate(&ix, coeff);
        acc = Some(match acc {
            None => t,
            Some(a) => a.checked_add(&t)?,
        });
    }
    let t = match acc {
        Some(t) => t,
        None => return Err(usage("empty tensor expression")),
    };
    match degree {
        Some(k) if t.is_zero() => Ok(TensorField::zero(chart, variance, k)),
        Some(k) if t.degree() != k => Err(usage(format!(
            "expected a {} of degree {k}, got degree {}",
            variance.name(),
            t.degree()
        ))),
        _ => Ok(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Chart;

    #[test]
    fn forms() {
        let c = Chart::new("R3", ["x1", "x2", "x3"]).unwrap();
        let b = parse_tensor("1*dx1^dx2", &c, Variance::Form, Some(2)).unwrap();
        assert_eq!(b.get(&[0, 1]).to_string(), "1");
        let b = parse_tensor("-2*dx2^dx1 + (x1-x3)*dx1^dx3", &c, Variance::Form, Some(2)).unwrap();
        assert_eq!(b.get(&[0, 1]).to_string(), "2");
        assert_eq!(b.get(&[0, 2]), parse_expr("x1 - x3", &c).unwrap());
        let a = parse_tensor("x2*dx1 - x1^2*x3*dx3", &c, Variance::Form, None).unwrap();
        assert_eq!(a.degree(), 1);
        assert_eq!(a.get(&[2]), parse_expr("-x1^2*x3", &c).unwrap());
        assert!(parse_tensor("0", &c, Variance::Form, Some(2)).unwrap().is_zero());
        assert!(parse_tensor("dx1^dx1", &c, Variance::Form, Some(2)).unwrap().is_zero());
        assert!(parse_tensor("dx1 + dx1^dx2", &c, Variance::Form, None).is_err());
        assert!(parse_tensor("dx1", &c, Variance::Form, Some(2)).is_err());
        assert!(parse_tensor("dy1", &c, Variance::Form, None).is_err());
    }

    #[test]
    fn multivectors() {
        let c = Chart::new("R2", ["x", "y"]).unwrap();
        let v = parse_tensor("y*d/dx - x*d/dy", &c, Variance::Multivector, Some(1)).unwrap();
        assert_eq!(v.get(&[1]), parse_expr("-x", &c).unwrap());
    }
}

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A named coordinate patch. Every scalar and tensor lives on exactly one chart.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    name: String,
    vars: Vec<String>,
}

pub type ChartRef = Arc<Chart>;

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        vars: impl IntoIterator<Item = S>,
    ) -> Result<ChartRef> {
        let name = name.into();
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        if vars.is_empty() {
            return Err(Error::InvalidChart(format!("chart `{name}` has no variables")));
        }
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::InvalidChart(format!("`{v}` is not an identifier")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidChart(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Arc::new(Chart { name, vars }))
    }

    /// Chart `name` with variables `prefix1 .. prefixN`.
    pub fn numbered(name: impl Into<String>, prefix: &str, n: usize) -> Result<ChartRef> {
        Chart::new(name, (1..=n).map(|i| format!("{prefix}{i}")))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.vars.join(", "))
    }
}

pub(crate) fn same_chart(a: &ChartRef, b: &ChartRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn ensure_same_chart(a: &ChartRef, b: &ChartRef) -> Result<()> {
    if same_chart(a, b) {
        Ok(())
    } else {
        Err(Error::ChartMismatch {
            left: a.name.clone(),
            right: b.name.clone(),
        })
    }
}

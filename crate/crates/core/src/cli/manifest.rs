//! Line-oriented manifest format.
//!
//! ```text
//! chart NAME : var1 var2 ...
//! scalar NAME on CHART = <expr>
//! tensor NAME on CHART kind (mv|form) deg K { (i1,...,iK) = <expr>; ... }
//! map NAME : CHART1 -> CHART2 { y1 = <expr>; ... }
//! structure NAME twisted_poisson pi=TENSOR phi=TENSOR [unverified]
//! structure NAME twisted_symplectic omega=TENSOR
//! bimodule NAME s=CHART omega=TENSOR j1=MAP j2=MAP p1=STRUCT p2=STRUCT [attest FLAG ...]
//! algebroid_bimodule NAME j1=MAP j2=MAP p1=STRUCT p2=STRUCT rho1=V,.. rho2=W,.. [attest FLAG]
//! algebroid_bimodule NAME induced_from=BIMODULE
//! algebroid_bimodule NAME cotangent_of=STRUCT
//! samples NAME { (q1,...,qn); ... }
//! ```
//!
//! Braced bodies may span lines; `#` starts a comment. Indices are 1-based.

use std::collections::HashMap;
use std::str::FromStr;

use crate::calculus::{PolyMap, TensorField, Variance};
use crate::error::{Error, Result};
use crate::morita::{
    cotangent_bimodule, induced_algebroid_bimodule, AlgebroidBimoduleCandidate, Attestations, BimoduleCandidate,
};
use crate::poisson::{Convention, TwistedPoissonStructure, TwistedSymplecticStructure};
use crate::scalar::{is_identifier, parse_expr, Chart, ChartRef, Rational, ScalarExpr};

#[derive(Clone, Debug)]
pub enum Object {
    Chart(ChartRef),
    Scalar(ScalarExpr),
    Tensor(TensorField),
    Map(PolyMap),
    Poisson(TwistedPoissonStructure),
    Symplectic(TwistedSymplecticStructure),
    Bimodule(BimoduleCandidate),
    AlgebroidBimodule {
        candidate: AlgebroidBimoduleCandidate,
        p1: TwistedPoissonStructure,
        p2: TwistedPoissonStructure,
    },
    Samples(Vec<Vec<Rational>>),
}

impl Object {
    fn kind(&self) -> &'static str {
        match self {
            Object::Chart(_) => "chart",
            Object::Scalar(_) => "scalar",
            Object::Tensor(_) => "tensor",
            Object::Map(_) => "map",
            Object::Poisson(_) => "twisted_poisson structure",
            Object::Symplectic(_) => "twisted_symplectic structure",
            Object::Bimodule(_) => "bimodule",
            Object::AlgebroidBimodule { .. } => "algebroid_bimodule",
            Object::Samples(_) => "samples",
        }
    }
}

/// Resolved objects in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Manifest {
    objects: Vec<(String, Object)>,
    index: HashMap<String, usize>,
    convention: Convention,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Manifest { line, msg: msg.into() }
}

fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Manifest { .. } => e,
        other => err(line, other.to_string()),
    }
}

/// `(line, text)` statements with comments stripped and braces balanced.
fn statements(src: &str) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut start = 0;
    let mut depth = 0i32;
    for (k, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if buf.is_empty() {
            if line.trim().is_empty() {
                continue;
            }
            start = k + 1;
        }
        for ch in line.chars() {
            match ch {
                '{' => depth += 1,
                '}' => depth -= 1,
                _ => {}
            }
            if depth < 0 {
                return Err(err(k + 1, "unmatched `}`"));
            }
        }
        buf.push_str(line);
        buf.push(' ');
        if depth == 0 {
            out.push((start, buf.trim().to_string()));
            buf.clear();
        }
    }
    if depth != 0 {
        return Err(err(start, "unterminated `{` block"));
    }
    Ok(out)
}

/// Split `head { body }` into the head and the `;`-separated body items.
fn braced(line: usize, text: &str) -> Result<(String, Vec<String>)> {
    let open = text.find('{').ok_or_else(|| err(line, "expected a `{ ... }` block"))?;
    let close = text.rfind('}').ok_or_else(|| err(line, "expected `}`"))?;
    if !text[close + 1..].trim().is_empty() {
        return Err(err(line, "unexpected text after `}`"));
    }
    let items = text[open + 1..close]
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect();
    Ok((text[..open].trim().to_string(), items))
}

fn parse_tuple(line: usize, s: &str) -> Result<Vec<String>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err(line, format!("expected a parenthesized tuple, found `{s}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').map(|p| p.trim().to_string()).collect())
}

/// Rational literal: integer, `p/q` or finite decimal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Ok(r) = Rational::from_str(s) {
        return Ok(r);
    }
    let bad = || Error::Usage(format!("`{s}` is not a rational number"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac) = body.split_once('.').ok_or_else(bad)?;
    if !(int_part.chars().all(|c| c.is_ascii_digit()) && frac.chars().all(|c| c.is_ascii_digit()))
        || (int_part.is_empty() && frac.is_empty())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac}");
    let num = num_bigint::BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let den = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
    let r = Rational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// `key=value` pairs and bare words after the first `skip` words.
fn key_values(words: &[&str]) -> (HashMap<String, String>, Vec<String>) {
    let mut kv = HashMap::new();
    let mut bare = Vec::new();
    for w in words {
        match w.split_once('=') {
            Some((k, v)) => {
                kv.insert(k.to_string(), v.to_string());
            }
            None => bare.push(w.to_string()),
        }
    }
    (kv, bare)
}

impl Manifest {
    pub fn load(path: &std::path::Path, convention: Convention) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&src, convention)
    }

    pub fn parse(src: &str, convention: Convention) -> Result<Self> {
        let mut m = Manifest {
            convention,
            ..Manifest::default()
        };
        let stmts = statements(src)?;
        for (line, text) in &stmts {
            m.statement(*line, text)?;
        }
        if !m.objects.iter().any(|(_, o)| matches!(o, Object::Chart(_))) {
            return Err(err(stmts.last().map_or(1, |s| s.0), "no chart defined"));
        }
        Ok(m)
    }

    pub fn objects(&self) -> &[(String, Object)] {
        &self.objects
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn get(&self, name: &str) -> Option<&Object> {
        self.index.get(name).map(|&i| &self.objects[i].1)
    }

    fn define(&mut self, line: usize, name: &str, obj: Object) -> Result<()> {
        if !is_identifier(name) {
            return Err(err(line, format!("`{name}` is not a valid name")));
        }
        if self.index.contains_key(name) {
            return Err(err(line, format!("`{name}` is already defined")));
        }
        self.index.insert(name.to_string(), self.objects.len());
        self.objects.push((name.to_string(), obj));
        Ok(())
    }

    fn lookup(&self, line: usize, name: &str, want: &str) -> Result<&Object> {
        self.get(name)
            .ok_or_else(|| err(line, format!("undefined {want} `{name}`")))
    }

    fn chart(&self, line: usize, name: &str) -> Result<ChartRef> {
        match self.lookup(line, name, "chart")? {
            Object::Chart(c) => Ok(c.clone()),
            o => Err(err(line, format!("`{name}` is a {}, not a chart", o.kind()))),
        }
    }

    fn tensor(&self, line: usize, name: &str) -> Result<TensorField> {
        match self.lookup(line, name, "tensor")? {
            Object::Tensor(t) => Ok(t.clone()),
            o => Err(err(line, format!("`{name}` is a {}, not a tensor", o.kind()))),
        }
    }

    fn map(&self, line: usize, name: &str) -> Result<PolyMap> {
        match self.lookup(line, name, "map")? {
            Object::Map(m) => Ok(m.clone()),
            o => Err(err(line, format!("`{name}` is a {}, not a map", o.kind()))),
        }
    }

    /// A twisted Poisson structure, or the one associated with a twisted symplectic structure.
    fn poisson(&self, line: usize, name: &str) -> Result<TwistedPoissonStructure> {
        match self.lookup(line, name, "structure")? {
            Object::Poisson(p) => Ok(p.clone()),
            Object::Symplectic(s) => Ok(s.to_poisson().map_err(at_line(line))?.with_convention(self.convention)),
            o => Err(err(line, format!("`{name}` is a {}, not a structure", o.kind()))),
        }
    }

    fn statement(&mut self, line: usize, text: &str) -> Result<()> {
        let keyword = text.split_whitespace().next().unwrap_or("");
        match keyword {
            "chart" => self.parse_chart(line, text),
            "scalar" => self.parse_scalar(line, text),
            "tensor" => self.parse_tensor(line, text),
            "map" => self.parse_map(line, text),
            "structure" => self.parse_structure(line, text),
            "bimodule" => self.parse_bimodule(line, text),
            "algebroid_bimodule" => self.parse_algebroid_bimodule(line, text),
            "samples" => self.parse_samples(line, text),
            other => Err(err(line, format!("unknown declaration `{other}`"))),
        }
    }

    fn parse_chart(&mut self, line: usize, text: &str) -> Result<()> {
        let (head, vars) = text
            .split_once(':')
            .ok_or_else(|| err(line, "expected `chart NAME : var1 var2 ...`"))?;
        let words: Vec<&str> = head.split_whitespace().collect();
        let [_, name] = words[..] else {
            return Err(err(line, "expected `chart NAME : var1 var2 ...`"));
        };
        let c = Chart::new(name, vars.split_whitespace()).map_err(at_line(line))?;
        self.define(line, name, Object::Chart(c))
    }

    fn parse_scalar(&mut self, line: usize, text: &str) -> Result<()> {
        let (head, expr) = text
            .split_once('=')
            .ok_or_else(|| err(line, "expected `scalar NAME on CHART = <expr>`"))?;
        let words: Vec<&str> = head.split_whitespace().collect();
        let [_, name, "on", chart] = words[..] else {
            return Err(err(line, "expected `scalar NAME on CHART = <expr>`"));
        };
        let c = self.chart(line, chart)?;
        let e = parse_expr(expr.trim(), &c).map_err(at_line(line))?;
        self.define(line, name, Object::Scalar(e))
    }

    fn parse_tensor(&mut self, line: usize, text: &str) -> Result<()> {
        let usage = "expected `tensor NAME on CHART kind (mv|form) deg K { ... }`";
        let (head, items) = braced(line, text)?;
        let words: Vec<&str> = head.split_whitespace().collect();
        let [_, name, "on", chart, "kind", kind, "deg", deg] = words[..] else {
            return Err(err(line, usage));
        };
        let c = self.chart(line, chart)?;
        let variance = match kind {
            "mv" => Variance::Multivector,
            "form" => Variance::Form,
            other => return Err(err(line, format!("unknown kind `{other}` (expected mv or form)"))),
        };
        let k: usize = deg.parse().map_err(|_| err(line, format!("bad degree `{deg}`")))?;
        let mut entries = Vec::new();
        for item in &items {
            let (lhs, rhs) = item
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `(i1,...) = <expr>`, found `{item}`")))?;
            let idx: Vec<usize> = parse_tuple(line, lhs)?
                .iter()
                .map(|s| match s.parse::<usize>() {
                    Ok(i) if (1..=c.dim()).contains(&i) => Ok(i - 1),
                    _ => Err(err(line, format!("index `{s}` out of range 1..={}", c.dim()))),
                })
                .collect::<Result<_>>()?;
            if idx.len() != k {
                return Err(err(line, format!("tuple {lhs} has {} indices, degree is {k}", idx.len())));
            }
            let e = parse_expr(rhs.trim(), &c).map_err(at_line(line))?;
            entries.push((idx, e));
        }
        let t = TensorField::from_entries(&c, variance, k, entries).map_err(|e| match e {
            Error::InvalidIndex { msg, .. } => err(line, msg),
            other => err(line, other.to_string()),
        })?;
        self.define(line, name, Object::Tensor(t))
    }

    fn parse_map(&mut self, line: usize, text: &str) -> Result<()> {
        let usage = "expected `map NAME : CHART1 -> CHART2 { y1 = <expr>; ... }`";
        let (head, items) = braced(line, text)?;
        let (left, right) = head.split_once(':').ok_or_else(|| err(line, usage))?;
        let (dom, cod) = right.split_once("->").ok_or_else(|| err(line, usage))?;
        let words: Vec<&str> = left.split_whitespace().collect();
        let [_, name] = words[..] else {
            return Err(err(line, usage));
        };
        let dom = self.chart(line, dom.trim())?;
        let cod = self.chart(line, cod.trim())?;
        let mut comps: Vec<Option<ScalarExpr>> = vec![None; cod.dim()];
        for item in &items {
            let (var, rhs) = item
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `y = <expr>`, found `{item}`")))?;
            let var = var.trim();
            let i = cod
                .var_index(var)
                .ok_or_else(|| err(line, format!("`{var}` is not a variable of `{}`", cod.name())))?;
            if comps[i].is_some() {
                return Err(err(line, format!("component `{var}` given twice")));
            }
            comps[i] = Some(parse_expr(rhs.trim(), &dom).map_err(at_line(line))?);
        }
        let comps = comps
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| err(line, format!("missing component `{}`", cod.vars()[i]))))
            .collect::<Result<Vec<_>>>()?;
        let m = PolyMap::new(&dom, &cod, comps).map_err(at_line(line))?;
        self.define(line, name, Object::Map(m))
    }

    fn parse_structure(&mut self, line: usize, text: &str) -> Result<()> {
        let words: Vec<&str> = text.split_whitespace().collect();
        if words.len() < 3 {
            return Err(err(line, "expected `structure NAME (twisted_poisson|twisted_symplectic) ...`"));
        }
        let name = words[1];
        let (kv, bare) = key_values(&words[3..]);
        let need = |k: &str| kv.get(k).ok_or_else(|| err(line, format!("missing `{k}=`")));
        let obj = match words[2] {
            "twisted_poisson" => {
                let pi = self.tensor(line, need("pi")?)?;
                let phi = self.tensor(line, need("phi")?)?;
                let unverified = match bare.as_slice() {
                    [] => false,
                    [w] if w == "unverified" => true,
                    other => return Err(err(line, format!("unexpected `{}`", other.join(" ")))),
                };
                let p = if unverified {
                    TwistedPoissonStructure::new_unverified(pi, phi)
                } else {
                    TwistedPoissonStructure::new(pi, phi)
                }
                .map_err(at_line(line))?;
                Object::Poisson(p.with_convention(self.convention))
            }
            "twisted_symplectic" => {
                if !bare.is_empty() {
                    return Err(err(line, format!("unexpected `{}`", bare.join(" "))));
                }
                let omega = self.tensor(line, need("omega")?)?;
                Object::Symplectic(TwistedSymplecticStructure::new(omega).map_err(at_line(line))?)
            }
            other => return Err(err(line, format!("unknown structure kind `{other}`"))),
        };
        self.define(line, name, obj)
    }

    fn parse_attest(line: usize, bare: &[String]) -> Result<Attestations> {
        let mut a = Attestations::default();
        let Some((first, flags)) = bare.split_first() else {
            return Ok(a);
        };
        if first != "attest" {
            return Err(err(line, format!("unexpected `{first}`")));
        }
        for f in flags {
            match f.as_str() {
                "complete_j1" => a.complete_j1 = true,
                "complete_j2" => a.complete_j2 = true,
                "fibers_connected_simply_connected" => a.fibers_connected_simply_connected = true,
                other => return Err(err(line, format!("unknown attestation `{other}`"))),
            }
        }
        Ok(a)
    }

    fn parse_bimodule(&mut self, line: usize, text: &str) -> Result<()> {
        let words: Vec<&str> = text.split_whitespace().collect();
        if words.len() < 2 {
            return Err(err(line, "expected `bimodule NAME s=CHART omega=TENSOR j1=MAP j2=MAP p1=STRUCT p2=STRUCT`"));
        }
        let name = words[1];
        let (kv, bare) = key_values(&words[2..]);
        let need = |k: &str| kv.get(k).ok_or_else(|| err(line, format!("missing `{k}=`")));
        let s = self.chart(line, need("s")?)?;
        let omega = self.tensor(line, need("omega")?)?;
        if !omega.same_chart(&s) {
            return Err(err(line, format!("omega does not live on `{}`", s.name())));
        }
        let j1 = self.map(line, need("j1")?)?;
        let j2 = self.map(line, need("j2")?)?;
        let p1 = self.poisson(line, need("p1")?)?;
        let p2 = self.poisson(line, need("p2")?)?;
        let att = Self::parse_attest(line, &bare)?;
        let c = BimoduleCandidate::new(omega, j1, j2, p1, p2)
            .map_err(at_line(line))?
            .with_attestations(att);
        self.define(line, name, Object::Bimodule(c))
    }

    fn parse_algebroid_bimodule(&mut self, line: usize, text: &str) -> Result<()> {
        let words: Vec<&str> = text.split_whitespace().collect();
        if words.len() < 3 {
            return Err(err(line, "expected `algebroid_bimodule NAME ...`"));
        }
        let name = words[1];
        let (kv, bare) = key_values(&words[2..]);
        let att = Self::parse_attest(line, &bare)?;
        if att.complete_j1 || att.complete_j2 {
            return Err(err(line, "only fibers_connected_simply_connected applies to algebroid bimodules"));
        }
        let (mut candidate, p1, p2) = if let Some(b) = kv.get("induced_from") {
            let Some(Object::Bimodule(bm)) = self.get(b) else {
                return Err(err(line, format!("undefined bimodule `{b}`")));
            };
            let c = induced_algebroid_bimodule(bm).map_err(at_line(line))?;
            (c, bm.p1.clone(), bm.p2.clone())
        } else if let Some(s) = kv.get("cotangent_of") {
            let p = self.poisson(line, s)?;
            (cotangent_bimodule(&p).map_err(at_line(line))?, p.clone(), p)
        } else {
            let need = |k: &str| kv.get(k).ok_or_else(|| err(line, format!("missing `{k}=`")));
            let j1 = self.map(line, need("j1")?)?;
            let j2 = self.map(line, need("j2")?)?;
            let p1 = self.poisson(line, need("p1")?)?;
            let p2 = self.poisson(line, need("p2")?)?;
            let table = |k: &str| -> Result<Vec<TensorField>> {
                need(k)?.split(',').map(|t| self.tensor(line, t.trim())).collect()
            };
            let c = AlgebroidBimoduleCandidate::new(j1, j2, table("rho1")?, table("rho2")?).map_err(at_line(line))?;
            (c, p1, p2)
        };
        candidate.fibers_connected_simply_connected = att.fibers_connected_simply_connected;
        self.define(line, name, Object::AlgebroidBimodule { candidate, p1, p2 })
    }

    fn parse_samples(&mut self, line: usize, text: &str) -> Result<()> {
        let (head, items) = braced(line, text)?;
        let words: Vec<&str> = head.split_whitespace().collect();
        let [_, name] = words[..] else {
            return Err(err(line, "expected `samples NAME { (q1,...,qn); ... }`"));
        };
        let pts = items
            .iter()
            .map(|it| {
                parse_tuple(line, it)?
                    .iter()
                    .map(|q| parse_rational(q).map_err(at_line(line)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(p) = pts.iter().find(|p| p.len() != pts[0].len()) {
            return Err(err(line, format!("sample of length {} among samples of length {}", p.len(), pts[0].len())));
        }
        self.define(line, name, Object::Samples(pts))
    }
}

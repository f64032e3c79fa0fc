//! `twpoisson COMMAND MANIFEST [flags]`: run a checker against manifest objects.
//!
//! Exit codes: 0 all verdicts pass, 1 a checked condition fails, 2 usage or manifest error,
//! 3 runtime error (pole, non-invertible, truncation).

pub mod formexpr;
pub mod manifest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::calculus::{TensorField, Variance};
use crate::cohomology::{check_d_squared, random_multivector, TruncatedComplex};
use crate::dirac::{
    check_dirac, gauge_bivector, gauge_determinant, gauge_identity_residual, gauge_transform, graph_of_bivector,
    same_fiber_at,
};
use crate::error::{Error, Result};
use crate::flows::{
    cloud_table, conservation_error, hamiltonian_flow, leaf_correspondence_sample, leaf_dimension, ExplorationBudget,
    LeafFit,
};
use crate::morita::{check_algebroid_bimodule, check_equivalence_bimodule};
use crate::poisson::{
    check_algebroid_axioms, check_poisson_map, check_pullback_phi, residual_witness, scalar_witness, Convention,
    TwistedPoissonStructure,
};
use crate::report::Report;
use crate::sampling::{fmt_point, regular_points, Sampler, DEFAULT_SEED};
use crate::scalar::{parse_expr, ChartRef, Rational, ScalarExpr};

use manifest::{parse_rational, Manifest, Object};

/// Conservation tolerance for `flow`.
pub const FLOW_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Verify,
    Bracket,
    Hamiltonian,
    Anomaly,
    AlgebroidCheck,
    Cohomology,
    DiracCheck,
    Gauge,
    MapCheck,
    MoritaCheck,
    WeakMoritaCheck,
    LeafDim,
    Flow,
    LeafTrace,
}

impl Command {
    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    #[default]
    Pairing,
    Normalized,
}

#[derive(Debug, Parser)]
#[command(name = "twpoisson", version, about = "Exact checks for twisted Poisson geometry")]
struct Args {
    command: Command,
    manifest: PathBuf,

    /// Seeded sample points per pointwise check.
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// RK4 step (flow: 1e-3, leaf-trace: 1e-2).
    #[arg(long)]
    step: Option<f64>,
    #[arg(long = "t-end", default_value_t = 1.0)]
    t_end: f64,
    /// Polynomial degree bound for truncated cohomology.
    #[arg(long = "trunc-degree", default_value_t = 3)]
    trunc_degree: u32,
    /// Write the machine-readable report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    convention: ConventionArg,

    /// Manifest object to act on when several qualify.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    h: Option<String>,
    /// 2-form for `gauge`, e.g. `1*dx1^dx2`.
    #[arg(long = "B")]
    b: Option<String>,
    /// `;`-separated 1-forms for `algebroid-check` (default: coordinate coframe).
    #[arg(long)]
    forms: Option<String>,
    /// Comma-separated point, e.g. `1,1,1/2,0.25`.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    /// Cohomology degree, or monomial degree bound for the `anomaly` search.
    #[arg(long)]
    degree: Option<usize>,
    /// Data file (flow) or file prefix (leaf-trace) for exported points.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use a manifest `samples` block instead of seeded points.
    #[arg(long = "sample-set")]
    sample_set: Option<String>,
}

impl Args {
    fn convention(&self) -> Convention {
        match self.convention {
            ConventionArg::Pairing => Convention::Pairing,
            ConventionArg::Normalized => Convention::Normalized,
        }
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let meta = meta_report(&args);
    match execute(&args) {
        Ok((label, report)) => {
            let ok = report.passed();
            let _ = writeln!(
                out,
                "{} {} [{label}, convention {}]",
                args.command.name(),
                args.manifest.display(),
                args.convention().name()
            );
            let _ = write!(out, "{report}");
            let _ = writeln!(out, "verdict: {}", if ok { "PASS" } else { "FAIL" });
            let mut full = meta;
            full.value("meta.target", label);
            full.merge(&args.command.name(), report);
            full.value("verdict", if ok { "PASS" } else { "FAIL" });
            if let Err(e) = write_report(&args, &full) {
                let _ = writeln!(err, "error[{}]: {e}", e.kind());
                return e.exit_code();
            }
            i32::from(!ok)
        }
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.kind());
            let mut full = meta;
            full.value("error.kind", e.kind());
            full.value("error.message", &e);
            full.value("exit", e.exit_code());
            let _ = write_report(&args, &full);
            e.exit_code()
        }
    }
}

fn meta_report(a: &Args) -> Report {
    let mut r = Report::new();
    r.value("meta.command", a.command.name());
    let file = a.manifest.file_name().map_or_else(|| a.manifest.display().to_string(), |f| f.to_string_lossy().into());
    r.value("meta.manifest", file);
    r.value("meta.seed", a.seed);
    r.value("meta.samples", a.samples);
    r.value("meta.convention", a.convention().name());
    r
}

fn write_report(a: &Args, r: &Report) -> Result<()> {
    if let Some(p) = &a.report {
        std::fs::write(p, r.to_machine()).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn write_file(p: &Path, data: &str) -> Result<()> {
    std::fs::write(p, data).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

/// Target label and report.
type Outcome = (String, Report);

fn execute(a: &Args) -> Result<Outcome> {
    if a.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let m = Manifest::load(&a.manifest, a.convention())?;
    let ctx = Ctx { a, m: &m };
    match a.command {
        Command::Verify => ctx.verify(),
        Command::Bracket => ctx.bracket(),
        Command::Hamiltonian => ctx.hamiltonian(),
        Command::Anomaly => ctx.anomaly(),
        Command::AlgebroidCheck => ctx.algebroid_check(),
        Command::Cohomology => ctx.cohomology(),
        Command::DiracCheck => ctx.dirac_check(),
        Command::Gauge => ctx.gauge(),
        Command::MapCheck => ctx.map_check(),
        Command::MoritaCheck => ctx.morita_check(),
        Command::WeakMoritaCheck => ctx.weak_morita_check(),
        Command::LeafDim => ctx.leaf_dim(),
        Command::Flow => ctx.flow(),
        Command::LeafTrace => ctx.leaf_trace(),
    }
}

struct Ctx<'a> {
    a: &'a Args,
    m: &'a Manifest,
}

fn parse_point(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

fn to_f64(p: &[Rational]) -> Vec<f64> {
    p.iter()
        .map(|q| num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN))
        .collect()
}

fn fmt_f64s(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.12e}")).collect();
    format!("({})", parts.join(", "))
}

fn fit_report(r: &mut Report, key: &str, fit: &LeafFit, ambient: usize) {
    r.value(format!("{key}.leaf_dimension"), fit.leaf_dimension);
    r.value(format!("{key}.spread"), format!("{:.6e}", fit.spread));
    match fit.residual {
        Some(res) => r.value(format!("{key}.residual"), format!("{res:.6e}")),
        None => r.value(format!("{key}.residual"), "none"),
    }
    r.check(format!("{key}.consistent"), fit.consistent(ambient), || match fit.residual {
        Some(res) => format!("residual {res:.3e} exceeds 1e-2 x spread {:.3e}", fit.spread),
        None => format!("cloud too small to fit a leaf of dimension {}", fit.leaf_dimension),
    });
}

impl Ctx<'_> {
    /// The named object, or the unique one accepted by `pick`.
    fn select<T>(&self, kind: &str, pick: impl Fn(&Object) -> Option<Result<T>>) -> Result<(String, T)> {
        if let Some(t) = &self.a.target {
            let obj = self
                .m
                .get(t)
                .ok_or_else(|| usage(format!("--target `{t}` is not defined in the manifest")))?;
            return match pick(obj) {
                Some(v) => Ok((t.clone(), v?)),
                None => Err(usage(format!("--target `{t}` is not a {kind}"))),
            };
        }
        let found: Vec<&String> = self
            .m
            .objects()
            .iter()
            .filter(|(_, o)| pick(o).is_some())
            .map(|(n, _)| n)
            .collect();
        match found.as_slice() {
            [] => Err(usage(format!("manifest defines no {kind}"))),
            [name] => {
                let obj = self.m.get(name).expect("listed above");
                Ok(((*name).clone(), pick(obj).expect("matched above")?))
            }
            many => Err(usage(format!(
                "several {kind}s ({}); choose one with --target",
                many.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    fn structure(&self) -> Result<(String, TwistedPoissonStructure)> {
        self.structure_named(self.a.target.as_deref())
    }

    fn structure_named(&self, name: Option<&str>) -> Result<(String, TwistedPoissonStructure)> {
        let conv = self.a.convention();
        let pick = |o: &Object| match o {
            Object::Poisson(p) => Some(Ok(p.clone())),
            Object::Symplectic(s) => Some(s.to_poisson().map(|p| p.with_convention(conv))),
            _ => None,
        };
        match name {
            Some(n) => {
                let obj = self
                    .m
                    .get(n)
                    .ok_or_else(|| usage(format!("`{n}` is not defined in the manifest")))?;
                pick(obj)
                    .map(|p| p.map(|p| (n.to_string(), p)))
                    .unwrap_or_else(|| Err(usage(format!("`{n}` is not a structure"))))
            }
            None => self.select("structure", pick),
        }
    }

    /// Unique structure on `chart` unless named explicitly.
    fn structure_on(&self, name: Option<&str>, chart: &ChartRef, role: &str) -> Result<(String, TwistedPoissonStructure)> {
        if name.is_some() {
            let (n, p) = self.structure_named(name)?;
            if !p.pi().same_chart(chart) {
                return Err(usage(format!("{role} structure `{n}` does not live on `{}`", chart.name())));
            }
            return Ok((n, p));
        }
        let names: Vec<String> = self
            .m
            .objects()
            .iter()
            .filter(|(_, o)| match o {
                Object::Poisson(p) => p.pi().same_chart(chart),
                Object::Symplectic(s) => s.omega().same_chart(chart),
                _ => false,
            })
            .map(|(n, _)| n.clone())
            .collect();
        match names.as_slice() {
            [n] => self.structure_named(Some(n)),
            [] => Err(usage(format!("no structure on `{}` for the {role} side", chart.name()))),
            _ => Err(usage(format!(
                "several structures on `{}` ({}); choose the {role} side with --{}",
                chart.name(),
                names.join(", "),
                if role == "source" { "from" } else { "to" }
            ))),
        }
    }

    fn expr(&self, flag: &str, v: &Option<String>, chart: &ChartRef) -> Result<ScalarExpr> {
        let s = v.as_ref().ok_or_else(|| usage(format!("`--{flag}` is required")))?;
        parse_expr(s, chart)
    }

    fn x0(&self, dim: usize) -> Result<Vec<Rational>> {
        let s = self.a.x0.as_ref().ok_or_else(|| usage("`--x0` is required"))?;
        let p = parse_point(s)?;
        if p.len() != dim {
            return Err(Error::Dimension(format!("--x0 has {} coordinates, chart has {dim}", p.len())));
        }
        Ok(p)
    }

    /// Named sample set, or `--samples` seeded points where every expression in `exprs` is regular.
    fn samples(&self, chart: &ChartRef, exprs: &[ScalarExpr]) -> Result<Vec<Vec<Rational>>> {
        if let Some(name) = &self.a.sample_set {
            let Some(Object::Samples(pts)) = self.m.get(name) else {
                return Err(usage(format!("`{name}` is not a samples block")));
            };
            if let Some(p) = pts.iter().find(|p| p.len() != chart.dim()) {
                return Err(Error::Dimension(format!(
                    "sample {} does not lie on `{}`",
                    fmt_point(p),
                    chart.name()
                )));
            }
            return Ok(pts.clone());
        }
        regular_points(&mut Sampler::new(self.a.seed), chart.dim(), self.a.samples, exprs)
    }

    fn verify(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        Ok((name, p.verify()))
    }

    fn bracket(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        let f = self.expr("f", &self.a.f, p.chart())?;
        let g = self.expr("g", &self.a.g, p.chart())?;
        let mut r = Report::new();
        r.value("bracket", p.bracket(&f, &g)?);
        Ok((name, r))
    }

    fn hamiltonian(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        let f = self.expr("f", &self.a.f, p.chart())?;
        let mut r = Report::new();
        r.value("hamiltonian", p.hamiltonian(&f)?);
        Ok((name, r))
    }

    fn anomaly(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        let mut r = Report::new();
        match (&self.a.f, &self.a.g, &self.a.h) {
            (None, None, None) => {
                let deg = self.a.degree.unwrap_or(2) as u32;
                r.value("search.max_degree", deg);
                match p.anomaly_search(deg)? {
                    None => r.pass("anomaly"),
                    Some(([f, g, h], a)) => r.fail("anomaly", scalar_witness(&format!("anomaly({f}, {g}, {h})"), &a)),
                }
            }
            (Some(_), Some(_), Some(_)) => {
                let c = p.chart();
                let (f, g, h) = (
                    self.expr("f", &self.a.f, c)?,
                    self.expr("g", &self.a.g, c)?,
                    self.expr("h", &self.a.h, c)?,
                );
                let a = p.jacobi_anomaly(&f, &g, &h)?;
                r.check("anomaly", a.is_zero(), || scalar_witness("anomaly", &a));
                let c = p.prop_commutator_residual(&f, &g, &h)?;
                r.check("hamiltonian_commutator", c.is_zero(), || scalar_witness("residual", &c));
            }
            _ => return Err(usage("give all of --f, --g, --h, or none for an exhaustive monomial search")),
        }
        Ok((name, r))
    }

    fn algebroid_check(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        let c = p.chart();
        let alphas: Vec<TensorField> = match &self.a.forms {
            None => (0..c.dim()).map(|i| TensorField::coord_form(c, i)).collect(),
            Some(s) => s
                .split(';')
                .filter(|t| !t.trim().is_empty())
                .map(|t| formexpr::parse_tensor(t, c, Variance::Form, Some(1)))
                .collect::<Result<_>>()?,
        };
        let mut r = check_algebroid_axioms(&p, &alphas)?;
        r.value("forms", alphas.len());
        Ok((name, r))
    }

    fn cohomology(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        let n = p.dim();
        let mut r = Report::new();
        let mut sampler = Sampler::new(self.a.seed);
        let mut bad = None;
        for i in 0..self.a.samples {
            let a = random_multivector(p.chart(), i % n.min(2).saturating_add(1), 2, &mut sampler)?;
            let dd = check_d_squared(&p, &a)?;
            if !dd.is_zero() {
                bad = Some((a, dd));
                break;
            }
        }
        match bad {
            None => r.pass("d_squared"),
            Some((a, dd)) => r.fail("d_squared", format!("{}; for A = {a}", residual_witness("dd A", &dd))),
        }
        r.value("trunc_degree", self.a.trunc_degree);
        let cx = match TruncatedComplex::new(&p, self.a.trunc_degree) {
            Ok(cx) => cx,
            Err(e @ Error::NonPolynomial(_)) => {
                r.unverified("dims", format!("truncated complex needs polynomial coefficients: {e}"));
                return Ok((name, r));
            }
            Err(e) => return Err(e),
        };
        let ks: Vec<usize> = match self.a.degree {
            Some(k) if k <= n => vec![k],
            Some(k) => return Err(usage(format!("--degree {k} exceeds the dimension {n}"))),
            None => (0..=n).collect(),
        };
        for k in ks {
            let d = cx.dims(k)?;
            r.value(format!("H{k}.cochain_degree"), d.cochain_degree);
            r.value(format!("H{k}.cochains"), d.dim_cochains);
            r.value(format!("H{k}.cocycles"), d.dim_z);
            r.value(format!("H{k}.coboundaries"), d.dim_b);
            r.value(format!("H{k}.dim"), d.dim_h);
        }
        Ok((name, r))
    }

    fn dirac_check(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        let l = graph_of_bivector(&p)?;
        let mut exprs = l.coefficients();
        exprs.extend(p.phi().iter().map(|(_, c)| c.clone()));
        let samples = self.samples(p.chart(), &exprs)?;
        Ok((name, check_dirac(&l, p.phi(), &samples)?))
    }

    fn gauge(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        let s = self.a.b.as_ref().ok_or_else(|| usage("`--B` is required"))?;
        let b = formexpr::parse_tensor(s, p.chart(), Variance::Form, Some(2))?;
        let mut r = Report::new();
        r.value("determinant", gauge_determinant(&p, &b)?);
        let q = gauge_bivector(&p, &b)?;
        r.value("pi", q.pi());
        r.value("phi", q.phi());
        let res = gauge_identity_residual(&p, &b, &q)?;
        let bad = res
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, e)| (i, j, e)))
            .find(|(_, _, e)| !e.is_zero());
        match bad {
            None => r.pass("identity"),
            Some((i, j, e)) => r.fail("identity", format!("residual[{},{}] = {e}", i + 1, j + 1)),
        }
        r.merge("gauged", q.verify());
        let lhs = gauge_transform(&graph_of_bivector(&p)?, &b)?;
        let rhs = graph_of_bivector(&q)?;
        let mut exprs = lhs.coefficients();
        exprs.extend(rhs.coefficients());
        let samples = self.samples(p.chart(), &exprs)?;
        let mut miss = None;
        for x in &samples {
            if !same_fiber_at(&lhs, &rhs, x)? {
                miss = Some(x);
                break;
            }
        }
        match miss {
            None => r.pass("graph"),
            Some(x) => r.fail("graph", format!("gauged graph differs at {}", fmt_point(x))),
        }
        Ok((name, r))
    }

    fn map_check(&self) -> Result<Outcome> {
        let pick = |o: &Object| match o {
            Object::Map(m) => Some(Ok(m.clone())),
            _ => None,
        };
        let (mname, j) = match &self.a.map {
            Some(n) => match self.m.get(n) {
                Some(Object::Map(m)) => (n.clone(), m.clone()),
                _ => return Err(usage(format!("`{n}` is not a map"))),
            },
            None => self.select("map", pick)?,
        };
        let (n1, p1) = self.structure_on(self.a.from.as_deref(), j.domain(), "source")?;
        let (n2, p2) = self.structure_on(self.a.to.as_deref(), j.codomain(), "target")?;
        let mut exprs = j.components().to_vec();
        exprs.extend(p1.pi().iter().map(|(_, c)| c.clone()));
        let samples = self.samples(j.domain(), &exprs)?;
        let mut r = check_poisson_map(&j, &p1, &p2, &samples)?;
        r.merge("", check_pullback_phi(&j, &p1, &p2)?);
        Ok((format!("{mname}: {n1} -> {n2}"), r))
    }

    fn morita_check(&self) -> Result<Outcome> {
        let (name, c) = self.select("bimodule", |o| match o {
            Object::Bimodule(b) => Some(Ok(b.clone())),
            _ => None,
        })?;
        let samples = self.samples(&c.s_chart, &c.coefficients())?;
        Ok((name, check_equivalence_bimodule(&c, &samples)?))
    }

    fn algebroid_bimodule(
        &self,
    ) -> Result<(String, (crate::morita::AlgebroidBimoduleCandidate, TwistedPoissonStructure, TwistedPoissonStructure))>
    {
        self.select("algebroid_bimodule", |o| match o {
            Object::AlgebroidBimodule { candidate, p1, p2 } => Some(Ok((candidate.clone(), p1.clone(), p2.clone()))),
            _ => None,
        })
    }

    fn weak_morita_check(&self) -> Result<Outcome> {
        let (name, (c, p1, p2)) = self.algebroid_bimodule()?;
        let mut exprs = c.coefficients();
        for (j, p) in [(&c.j1, &p1), (&c.j2, &p2)] {
            for (_, e) in p.pi().iter() {
                exprs.extend(j.pull_scalar(e).ok());
            }
        }
        let samples = self.samples(&c.m_chart, &exprs)?;
        Ok((name, check_algebroid_bimodule(&c, &p1, &p2, &samples)?))
    }

    fn leaf_dim(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        let x = self.x0(p.dim())?;
        let numeric = leaf_dimension(&p, &to_f64(&x))?;
        let exact = p.rank_at(&x)?;
        let mut r = Report::new();
        r.value("point", fmt_point(&x));
        r.value("numeric", numeric);
        r.value("exact", exact);
        r.check("agree", numeric == exact, || format!("SVD rank {numeric} vs exact rank {exact}"));
        Ok((name, r))
    }

    fn flow(&self) -> Result<Outcome> {
        let (name, p) = self.structure()?;
        let f = self.expr("f", &self.a.f, p.chart())?;
        let x0 = to_f64(&self.x0(p.dim())?);
        let step = self.a.step.unwrap_or(1e-3);
        let traj = hamiltonian_flow(&p, &f, &x0, self.a.t_end, step)?;
        let err = conservation_error(&f, &traj)?;
        let mut r = Report::new();
        r.value("steps", traj.points.len() - 1);
        r.value("endpoint", fmt_f64s(traj.last()));
        r.value("conservation_error", format!("{err:.6e}"));
        r.check("conservation", err <= FLOW_TOLERANCE, || {
            format!("|f(x(t)) - f(x0)| reaches {err:.3e} > {FLOW_TOLERANCE:e}")
        });
        if let Some(path) = &self.a.out {
            write_file(path, &traj.to_table())?;
        }
        Ok((name, r))
    }

    fn leaf_trace(&self) -> Result<Outcome> {
        let (name, (c, p1, p2)) = self.algebroid_bimodule()?;
        let x0 = to_f64(&self.x0(c.m_chart.dim())?);
        let budget = ExplorationBudget {
            step: self.a.step.unwrap_or(ExplorationBudget::default().step),
            seed: self.a.seed,
            ..ExplorationBudget::default()
        };
        let s = leaf_correspondence_sample(&c, &p1, &p2, &x0, budget)?;
        let mut r = Report::new();
        r.value("orbit.points", s.orbit.len());
        r.value("orbit.end", fmt_f64s(s.orbit.last().map_or(&x0[..], |v| &v[..])));
        r.value("truncated", s.truncated);
        fit_report(&mut r, "p1", &s.fit1, p1.dim());
        fit_report(&mut r, "p2", &s.fit2, p2.dim());
        if let Some(prefix) = &self.a.out {
            let with = |ext: &str| {
                let mut os = prefix.clone().into_os_string();
                os.push(ext);
                PathBuf::from(os)
            };
            write_file(&with(".orbit.txt"), &cloud_table(&s.orbit))?;
            write_file(&with(".cloud1.txt"), &cloud_table(&s.cloud1))?;
            write_file(&with(".cloud2.txt"), &cloud_table(&s.cloud2))?;
        }
        Ok((name, r))
    }
}

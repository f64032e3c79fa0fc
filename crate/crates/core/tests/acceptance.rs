//! One PASS/FAIL line per acceptance criterion; exits nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use twisted_poisson::calculus::TensorField;
use twisted_poisson::cli::manifest::{Manifest, Object};
use twisted_poisson::cohomology::{check_d_squared, random_multivector, truncated_cohomology_dims};
use twisted_poisson::dirac::{
    check_dirac, gauge_bivector, gauge_determinant, gauge_identity_residual, gauge_transform, graph_of_bivector,
};
use twisted_poisson::fixtures;
use twisted_poisson::flows::{conservation_error, hamiltonian_flow, integrate, leaf_dimension};
use twisted_poisson::morita::{check_algebroid_bimodule, check_equivalence_bimodule, induced_algebroid_bimodule};
use twisted_poisson::poisson::{check_algebroid_axioms, Convention, TwistedPoissonStructure};
use twisted_poisson::report::{Report, Verdict};
use twisted_poisson::sampling::{regular_points, Sampler, DEFAULT_SEED};
use twisted_poisson::scalar::{int, parse_expr, rat, Rational, ScalarExpr};
use twisted_poisson::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> Manifest {
    Manifest::load(&fixture(name), Convention::Pairing).expect("fixture loads")
}

fn structure(m: &Manifest, name: &str) -> TwistedPoissonStructure {
    match m.get(name) {
        Some(Object::Poisson(p)) => p.clone(),
        Some(Object::Symplectic(s)) => s.to_poisson().unwrap(),
        other => panic!("`{name}` is not a structure: {other:?}"),
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("{what} took {e:.2?} (limit {limit:?})"))
}

fn failures(r: &Report) -> Vec<String> {
    r.entries()
        .iter()
        .filter(|e| e.verdict == Verdict::Fail)
        .map(|e| format!("{} [{}]", e.path, e.witness.clone().unwrap_or_default()))
        .collect()
}

fn pt(v: &[i64]) -> Vec<Rational> {
    v.iter().copied().map(int).collect()
}

/// 20 seeded triples from the coordinates and 5 random quadratics.
fn triple_set(p: &TwistedPoissonStructure) -> Vec<[ScalarExpr; 3]> {
    let c = p.chart();
    let mut s = Sampler::new(DEFAULT_SEED);
    let mut pool: Vec<ScalarExpr> = (0..c.dim()).map(|i| ScalarExpr::var(c, i)).collect();
    while pool.len() < c.dim() + 5 {
        let f = random_multivector(c, 0, 2, &mut s).unwrap().as_scalar();
        if f.poly_degree() == Some(2) {
            pool.push(f);
        }
    }
    let k = pool.len() as i64;
    (0..20)
        .map(|_| std::array::from_fn(|_| pool[s.int_in(0, k - 1) as usize].clone()))
        .collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let p = structure(&load("golden_r4.man"), "P");
    let r = p.verify();
    within(t, Duration::from_secs(1), "verify")?;
    ensure(r.passed() && r.entries().len() == 2, || format!("example fails: {:?}", failures(&r)))?;
    let b = structure(&load("golden_r4_broken.man"), "P");
    let r = b.verify();
    ensure(r.verdict("structure") == Some(&Verdict::Fail), || "broken fixture passes".into())?;
    let res = b.structural_residual().map_err(|e| e.to_string())?;
    let at = pt(&[1, 1, 1, 1]);
    let nonzero = res.iter().any(|(_, c)| c.eval(&at).map(|v| v != int(0)).unwrap_or(false));
    ensure(nonzero, || "broken residual vanishes at (1,1,1,1)".into())?;
    Ok(format!("exact zero residuals; broken variant nonzero at (1,1,1,1); {:.0?}", t.elapsed()))
}

fn criterion_2() -> Outcome {
    let fixtures = [fixtures::golden_r4().unwrap(), fixtures::constant_poisson_r4().unwrap()];
    for p in &fixtures {
        for [f, g, h] in triple_set(p) {
            let a = p.jacobi_anomaly(&f, &g, &h).map_err(|e| e.to_string())?;
            ensure(a.is_zero(), || format!("anomaly({f}, {g}, {h}) = {a}"))?;
        }
    }
    let t = Instant::now();
    let found = fixtures::golden_r4_broken().unwrap().anomaly_search(2).map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(10), "anomaly search")?;
    let ([f, g, h], a) = found.ok_or("no anomaly found on the broken fixture")?;
    Ok(format!("40 triples vanish; broken: anomaly({f}, {g}, {h}) = {a}"))
}

fn criterion_3() -> Outcome {
    for p in [fixtures::golden_r4().unwrap(), fixtures::constant_poisson_r4().unwrap()] {
        let p = p.with_convention(Convention::Normalized);
        for [f, g, h] in triple_set(&p) {
            let r = p.prop_commutator_residual(&f, &g, &h).map_err(|e| e.to_string())?;
            ensure(r.is_zero(), || format!("residual({f}, {g}, {h}) = {r}"))?;
        }
    }
    Ok("exact zero on 40 triples (normalized)".into())
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let p = fixtures::golden_r4().unwrap();
    let c = p.chart();
    let mut forms: Vec<TensorField> = (0..4).map(|i| TensorField::coord_form(c, i)).collect();
    let e = |s: &str| parse_expr(s, c).unwrap();
    forms.push(TensorField::coord_form(c, 0).scale(&e("x2")));
    forms.push(TensorField::coord_form(c, 3).scale(&e("x1*x3")));
    let r = check_algebroid_axioms(&p, &forms).map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(10), "algebroid axioms")?;
    ensure(r.passed(), || format!("{:?}", failures(&r)))?;
    Ok(format!("jacobi, anchor, leibniz exact on 6 forms; {:.0?}", t.elapsed()))
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    for p in [fixtures::golden_r4().unwrap(), fixtures::constant_poisson_r4().unwrap()] {
        let mut s = Sampler::new(DEFAULT_SEED);
        for i in 0..10 {
            let a = random_multivector(p.chart(), i % 3, 2, &mut s).unwrap();
            let dd = check_d_squared(&p, &a).map_err(|e| e.to_string())?;
            ensure(dd.is_zero(), || format!("d^2 A = {dd} for A = {a}"))?;
        }
    }
    let plane = fixtures::constant_poisson_plane().unwrap();
    let h0 = truncated_cohomology_dims(&plane, 3, 0).map_err(|e| e.to_string())?;
    let h1 = truncated_cohomology_dims(&plane, 3, 1).map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(5), "cohomology")?;
    ensure(h0.dim_h == 1 && h1.dim_h == 0, || format!("H0 = {}, H1 = {}", h0.dim_h, h1.dim_h))?;
    Ok(format!("d^2 = 0 on 20 multivectors; H0 = 1, H1 = 0; {:.0?}", t.elapsed()))
}

fn criterion_6() -> Outcome {
    let p = fixtures::golden_r4().unwrap();
    let l = graph_of_bivector(&p).unwrap();
    let mut exprs = l.coefficients();
    exprs.extend(p.phi().iter().map(|(_, c)| c.clone()));
    let xs = regular_points(&mut Sampler::new(DEFAULT_SEED), 4, 10, &exprs).map_err(|e| e.to_string())?;
    let r = check_dirac(&l, p.phi(), &xs).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("graph: {:?}", failures(&r)))?;

    let c = p.chart();
    let e = |s: &str| parse_expr(s, c).unwrap();
    let dx = |i: usize| TensorField::coord_form(c, i);
    let w = |i: usize, j: usize| twisted_poisson::calculus::wedge(&dx(i), &dx(j)).unwrap();
    let b1 = &w(0, 1).scale(&e("x3")) + &w(2, 3);
    let b2 = w(1, 3).scale(&e("x1*x2 - 1"));
    let twice = gauge_transform(&gauge_transform(&l, &b1).unwrap(), &b2).unwrap();
    let once = gauge_transform(&l, &(&b1 + &b2)).unwrap();
    let additive = twice
        .sections()
        .iter()
        .zip(once.sections())
        .all(|(s, t)| s.vec == t.vec && s.form == t.form);
    ensure(additive, || "gauge composition differs from the sum".into())?;

    let plane = fixtures::constant_poisson_plane().unwrap();
    let pc = plane.chart();
    let b = |c: &Rational| {
        twisted_poisson::calculus::wedge(&TensorField::coord_form(pc, 0), &TensorField::coord_form(pc, 1))
            .unwrap()
            .scale_rational(c)
    };
    for cval in [int(1), int(-2), rat(1, 3)] {
        let q = gauge_bivector(&plane, &b(&cval)).map_err(|e| e.to_string())?;
        let res = gauge_identity_residual(&plane, &b(&cval), &q).map_err(|e| e.to_string())?;
        ensure(res.iter().flatten().all(ScalarExpr::is_zero), || format!("identity fails at c = {cval}"))?;
        ensure(q.verify().passed(), || format!("gauged structure fails verify at c = {cval}"))?;
    }
    // On the plane det(1 + B♭Π♯) is a quadratic in c; interpolate it and take its root.
    let d = |cval: Rational| gauge_determinant(&plane, &b(&cval)).unwrap().constant_value().unwrap();
    let (d0, dp, dm) = (d(int(0)), d(int(1)), d(int(-1)));
    let qa = (dp.clone() + dm.clone()) / int(2) - d0.clone();
    let qb = (dp - dm) / int(2);
    let disc = qb.clone() * qb.clone() - int(4) * qa.clone() * d0;
    ensure(qa != int(0) && disc == int(0), || format!("determinant {qa} c^2 + {qb} c + ..: no double root"))?;
    let root = -qb / (int(2) * qa);
    match gauge_bivector(&plane, &b(&root)) {
        Err(Error::NotInvertible { .. }) => {}
        other => return Err(format!("c = {root}: expected NotInvertible, got {other:?}")),
    }
    Ok(format!("graph Dirac at 10 samples; additive; identity exact for c in {{1, -2, 1/3}}; NotInvertible at c = {root}"))
}

fn criterion_7() -> Outcome {
    let pass = |name: &str| -> Result<Report, String> {
        let Some(Object::Bimodule(c)) = load(name).get("M").cloned() else {
            return Err(format!("{name}: no bimodule"));
        };
        let xs = regular_points(&mut Sampler::new(DEFAULT_SEED), 4, 10, &c.coefficients()).map_err(|e| e.to_string())?;
        check_equivalence_bimodule(&c, &xs).map_err(|e| e.to_string())
    };
    let r = pass("product.man")?;
    for path in ["twist", "j1.poisson_map", "j2.poisson_map", "orthogonality"] {
        ensure(r.verdict(path) == Some(&Verdict::Pass), || format!("product: {path} does not pass"))?;
    }
    let f = pass("product_flipped.man")?;
    let e = f.get("j2.poisson_map").ok_or("missing j2 entry")?;
    ensure(e.verdict == Verdict::Fail, || "flipped variant passes j2".into())?;
    Ok(format!("product passes; flipped fails j2 with {}", e.witness.clone().unwrap_or_default()))
}

fn criterion_8() -> Outcome {
    let m = load("reflexivity.man");
    let Some(Object::AlgebroidBimodule { candidate, p1, p2 }) = m.get("T").cloned() else {
        return Err("reflexivity fixture missing".into());
    };
    let xs = regular_points(&mut Sampler::new(DEFAULT_SEED), 4, 10, &candidate.coefficients()).map_err(|e| e.to_string())?;
    let r = check_algebroid_bimodule(&candidate, &p1, &p2, &xs).map_err(|e| e.to_string())?;

    let Some(Object::Bimodule(b)) = load("product.man").get("M").cloned() else {
        return Err("product fixture missing".into());
    };
    let w = induced_algebroid_bimodule(&b).map_err(|e| e.to_string())?;
    let ys = regular_points(&mut Sampler::new(DEFAULT_SEED), 4, 10, &w.coefficients()).map_err(|e| e.to_string())?;
    let ri = check_algebroid_bimodule(&w, &b.p1, &b.p2, &ys).map_err(|e| e.to_string())?;

    let (fr, fi) = (failures(&r), failures(&ri));
    ensure(fi.is_empty(), || format!("induced actions fail: {fi:?}"))?;
    ensure(fr.is_empty(), || {
        let paths: Vec<&str> = r
            .entries()
            .iter()
            .filter(|e| e.verdict == Verdict::Fail)
            .map(|e| e.path.as_str())
            .collect();
        format!(
            "reflexivity fails {} (vertical actions cannot cover a nonzero anchor); commutation {:?}, tangency {:?}/{:?}; induced actions pass",
            paths.join(", "),
            r.verdict("commutation").unwrap(),
            r.verdict("tangency.j1_fibers").unwrap(),
            r.verdict("tangency.j2_fibers").unwrap()
        )
    })?;
    Ok("reflexivity and induced actions pass".into())
}

fn criterion_9() -> Outcome {
    let lin = structure(&load("linear.man"), "P");
    let f = parse_expr("(x1^2 + x2^2)/2", lin.chart()).unwrap();
    let v = lin.hamiltonian(&f).unwrap();
    let end = |h: f64| integrate(&v, &[1.0, 0.5], 1.0, h).map(|t| t.last().to_vec()).map_err(|e| e.to_string());
    let h = 0.1;
    let (a, b, reference) = (end(h)?, end(h / 2.0)?, end(h / 4.0)?);
    let dist = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let ratio = dist(&a, &reference) / dist(&b, &reference);
    ensure((12.0..=20.0).contains(&ratio), || format!("error ratio {ratio:.3}"))?;

    let p = fixtures::golden_r4().unwrap();
    let x1 = parse_expr("x1", p.chart()).unwrap();
    let traj = hamiltonian_flow(&p, &x1, &[1.0; 4], 1.0, 1e-3).map_err(|e| e.to_string())?;
    let drift = conservation_error(&x1, &traj).map_err(|e| e.to_string())?;
    ensure(drift <= 1e-6, || format!("conservation error {drift:e}"))?;

    let numeric = leaf_dimension(&p, &[1.0; 4]).map_err(|e| e.to_string())?;
    let exact = p.rank_at(&pt(&[1, 1, 1, 1])).map_err(|e| e.to_string())?;
    ensure(numeric == 4 && exact == 4, || format!("leaf dimension {numeric}, exact rank {exact}"))?;
    Ok(format!("RK4 ratio {ratio:.2}; conservation {drift:.1e}; leaf dimension 4 = exact rank"))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [(&str, &str, &[&str]); 3] = [
        ("verify", "golden_r4.man", &[]),
        ("morita-check", "product.man", &[]),
        ("leaf-trace", "product.man", &["--x0", "1,2,3,4"]),
    ];
    for (cmd, name, extra) in runs {
        let mut reports = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("{cmd}-{k}.txt"));
            let status = Command::new(env!("CARGO_BIN_EXE_twpoisson"))
                .arg(cmd)
                .arg(fixture(name))
                .args(["--seed", "12345", "--report"])
                .arg(&path)
                .args(extra)
                .output()
                .map_err(|e| e.to_string())?
                .status;
            ensure(status.code() == Some(0), || format!("{cmd} exited with {status}"))?;
            reports.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(reports[0] == reports[1], || format!("{cmd}: reports differ"))?;
    }
    Ok("verify, morita-check, leaf-trace reports byte-identical".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("golden fixture", criterion_1),
        ("anomaly equivalence", criterion_2),
        ("hamiltonian commutator", criterion_3),
        ("algebroid axioms", criterion_4),
        ("cohomology", criterion_5),
        ("dirac and gauge", criterion_6),
        ("morita checker", criterion_7),
        ("weak morita", criterion_8),
        ("flows", criterion_9),
        ("cli determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Command runners. Each returns a JSON report, a text rendering and whether
//! any violation was found.

use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use dman_core::count::{count_disjoint_union, intersection_number, virtual_count, CountProblem, CountReport};
use dman_core::dman::{classify_mor_at, etale_at, Residual, StdMor, Validated};
use dman_core::fibre::{cotangent_exact_at, fibre_product};
use dman_core::glue::{validate_glue, Scope};
use dman_core::laws::{run_dman_laws, run_vvect_laws};
use dman_core::poly::{Poly, PolyMatrix};
use dman_core::witness::{Coords, WitnessPoint};
use dman_core::Error;

use crate::document::{err, polys, ptr, DocError, Model, Resolver};

pub struct Report {
    pub value: Value,
    pub text: String,
    pub violations: usize,
}

/// Floats rounded to 1e-9, with negative zero folded into zero.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r = if x.abs() < 1e15 { (x * 1e9).round() / 1e9 } else { x };
    let r = if r == 0.0 { 0.0 } else { r };
    json!(r)
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn strings(ps: &[Poly], vars: &[String]) -> Value {
    json!(ps.iter().map(|p| p.to_string_with(vars)).collect::<Vec<_>>())
}

fn matrix_strings(m: &PolyMatrix, vars: &[String]) -> Value {
    json!(m.to_strings(vars))
}

fn point_value(p: &WitnessPoint) -> Value {
    match p.coords() {
        Coords::Exact(v) => json!(v.iter().map(dman_core::poly::format_scalar).collect::<Vec<_>>()),
        Coords::Approx(v) => nums(v),
    }
}

fn violation(subject: &str, condition: &str, detail: impl Into<String>) -> Value {
    json!({ "subject": subject, "condition": condition, "detail": detail.into() })
}

fn residual_values(res: &[Residual], vars: &[String]) -> Vec<Value> {
    res.iter()
        .map(|r| {
            json!({
                "condition": r.condition.name(),
                "row": r.row,
                "col": r.col,
                "normal_form": r.normal_form.to_string_with(vars),
            })
        })
        .collect()
}

/// Kernel errors during a run: witness failures are violations, the rest are
/// errors in the document.
fn witness_or_error(e: Error, path: &str) -> Result<String, DocError> {
    match e {
        Error::NotWitness(m) => Ok(m),
        other => Err(err(path, other)),
    }
}

fn finish(command: &str, mut body: Map<String, Value>, violations: Vec<Value>, text: String) -> Report {
    let count = violations.len();
    body.insert("command".into(), json!(command));
    body.insert("ok".into(), json!(count == 0));
    body.insert("violations".into(), Value::Array(violations.clone()));
    let mut text = text;
    for v in &violations {
        let _ = writeln!(text, "VIOLATION {}: {} ({})", v["subject"].as_str().unwrap_or(""), v["condition"].as_str().unwrap_or(""), v["detail"].as_str().unwrap_or(""));
    }
    let _ = writeln!(text, "{command}: {}", if count == 0 { "ok".to_string() } else { format!("{count} violation(s)") });
    Report { value: Value::Object(body), text, violations: count }
}

pub fn check(r: &Resolver) -> Result<Report, DocError> {
    let mut violations = Vec::new();
    let mut text = String::new();
    let mut models = Map::new();
    for (i, decl) in r.doc.models.iter().enumerate() {
        let m = &r.models[&decl.name];
        let mut bad = Vec::new();
        for (j, pt) in m.witnesses.iter().enumerate() {
            if let Err(e) = m.model.check_witness(pt) {
                let detail = witness_or_error(e, &format!("/models/{i}/witnesses/{j}"))?;
                bad.push(j);
                violations.push(violation(&format!("model {}", decl.name), "witness on zero locus", format!("witness {j}: {detail}")));
            }
        }
        let _ = writeln!(text, "model {}: n={} k={} vdim={} orient={}", decl.name, m.model.n(), m.model.k(), m.model.vdim(), m.model.orient());
        models.insert(
            decl.name.clone(),
            json!({
                "n": m.model.n(),
                "rank": m.model.k(),
                "vdim": m.model.vdim(),
                "orient": m.model.orient(),
                "witnesses": m.witnesses.len(),
                "failed_witnesses": bad,
            }),
        );
    }
    let mut morphisms = Map::new();
    for (i, decl) in r.doc.morphisms.iter().enumerate() {
        let m = &r.morphisms[&decl.name];
        let src = &r.models[&m.source];
        let subject = format!("morphism {}", decl.name);
        let residuals = residual_values(m.result.residuals(), &src.vars);
        for res in m.result.residuals() {
            violations.push(violation(&subject, res.condition.name(), format!("entry ({}, {}) reduces to {}", res.row, res.col, res.normal_form.to_string_with(&src.vars))));
        }
        let mut outside = Vec::new();
        for (j, pt) in m.witnesses.iter().enumerate() {
            if let Err(e) = src.model.check_witness(pt) {
                let detail = witness_or_error(e, &format!("/morphisms/{i}/witnesses/{j}"))?;
                violations.push(violation(&subject, "witness on zero locus", format!("witness {j}: {detail}")));
            }
        }
        if let Validated::Valid(f) = &m.result {
            outside = f.domain_violations(&m.witnesses).map_err(|e| err(&format!("/morphisms/{i}/witnesses"), e))?;
            for j in &outside {
                violations.push(violation(&subject, "maps into target domain (witness-level)", format!("witness {j}")));
            }
        }
        let _ = writeln!(text, "morphism {}: {} -> {}: {}", decl.name, m.source, m.target, if m.result.is_valid() { "valid" } else { "INVALID" });
        morphisms.insert(
            decl.name.clone(),
            json!({
                "source": m.source,
                "target": m.target,
                "valid": m.result.is_valid(),
                "residuals": residuals,
                "witnesses_outside_target": outside,
            }),
        );
    }
    let mut twos = Map::new();
    for (i, decl) in r.doc.two_morphisms.iter().enumerate() {
        let t = r.two_morphism(decl, &format!("/two_morphisms/{i}"))?;
        let subject = format!("2-morphism {}", decl.name);
        let vars = &r.models[&r.morphisms[&t.from].source].vars;
        let (valid, residuals) = match &t.result {
            None => {
                violations.push(violation(&subject, "valid endpoints", "an endpoint morphism is invalid"));
                (false, Vec::new())
            }
            Some(v) => {
                for res in v.residuals() {
                    violations.push(violation(&subject, res.condition.name(), format!("entry ({}, {}) reduces to {}", res.row, res.col, res.normal_form.to_string_with(vars))));
                }
                (v.is_valid(), residual_values(v.residuals(), vars))
            }
        };
        let _ = writeln!(text, "2-morphism {}: {} => {}: {}", decl.name, t.from, t.to, if valid { "valid" } else { "INVALID" });
        twos.insert(decl.name.clone(), json!({ "from": t.from, "to": t.to, "valid": valid, "residuals": residuals }));
    }
    let mut body = Map::new();
    body.insert("models".into(), Value::Object(models));
    body.insert("morphisms".into(), Value::Object(morphisms));
    body.insert("two_morphisms".into(), Value::Object(twos));
    Ok(finish("check", body, violations, text))
}

pub fn classify(r: &Resolver) -> Result<Report, DocError> {
    let mut violations = Vec::new();
    let mut text = String::new();
    let mut out = Map::new();
    for (i, decl) in r.doc.morphisms.iter().enumerate() {
        let m = &r.morphisms[&decl.name];
        let subject = format!("morphism {}", decl.name);
        let path = format!("/morphisms/{i}/witnesses");
        let f = match &m.result {
            Validated::Valid(f) => f,
            Validated::Invalid(res) => {
                violations.push(violation(&subject, res[0].condition.name(), "morphism is not valid; not classified"));
                continue;
            }
        };
        let mut rows = Vec::new();
        match classify_points(f, &m.witnesses) {
            Ok(per_point) => {
                for (j, (pt, k, e)) in per_point.into_iter().enumerate() {
                    let _ = writeln!(
                        text,
                        "{} witness {j}: etale={} submersion={} immersion={} w-submersion={} w-immersion={} embedding={}",
                        decl.name, k.etale, k.submersion, k.immersion, k.w_submersion, k.w_immersion, k.embedding_on_witnesses
                    );
                    rows.push(json!({
                        "point": point_value(&pt),
                        "etale": k.etale,
                        "submersion": k.submersion,
                        "w_submersion": k.w_submersion,
                        "immersion": k.immersion,
                        "w_immersion": k.w_immersion,
                        "embedding_on_witnesses": k.embedding_on_witnesses,
                        "w_embedding_on_witnesses": k.w_embedding_on_witnesses,
                        "rank_m": e.rank_m,
                        "rank_n": e.rank_n,
                    }));
                }
            }
            Err(Error::Inconsistent(msg)) => violations.push(violation(&subject, "étale test agrees with cotangent equivalence", msg)),
            Err(e) => {
                let detail = witness_or_error(e, &path)?;
                violations.push(violation(&subject, "witness on zero locus", detail));
            }
        }
        out.insert(decl.name.clone(), json!({ "source": m.source, "target": m.target, "witnesses": rows }));
    }
    let mut body = Map::new();
    body.insert("morphisms".into(), Value::Object(out));
    Ok(finish("classify", body, violations, text))
}

type PointVerdict = (WitnessPoint, dman_core::dman::MorKinds, dman_core::dman::EtaleVerdict);

fn classify_points(f: &StdMor, pts: &[WitnessPoint]) -> dman_core::Result<Vec<PointVerdict>> {
    let kinds = classify_mor_at(f, pts)?;
    let etale = etale_at(f, pts)?;
    Ok(pts.iter().cloned().zip(kinds).zip(etale).map(|((p, k), e)| (p, k, e)).collect())
}

pub fn fibre(r: &Resolver) -> Result<Report, DocError> {
    let mut violations = Vec::new();
    let mut text = String::new();
    let mut out = Map::new();
    for (i, decl) in r.doc.fibre_products.iter().enumerate() {
        let path = format!("/fibre_products/{i}");
        let left = r.model(&decl.left, &ptr(&path, "left"))?;
        let right = r.model(&decl.right, &ptr(&path, "right"))?;
        let (g, h) = maps_to_rp(left, &decl.g, right, &decl.h, decl.p, &path, ("g", "h"))?;
        let d = fibre_product(left.model.clone(), g, right.model.clone(), h, decl.p).map_err(|e| err(&path, e))?;
        let vars = r.product_vars(left, right);
        let pts = crate::document::points(&decl.witnesses, d.w.n(), r.settings.tolerance, &ptr(&path, "witnesses"))?;
        let subject = format!("fibre product {}", decl.name);
        let mut rows = Vec::new();
        for (j, pt) in pts.iter().enumerate() {
            let wp = format!("{path}/witnesses/{j}");
            let exact = match cotangent_exact_at(&d, pt) {
                Ok(c) => c,
                Err(e) => {
                    let detail = witness_or_error(e, &wp)?;
                    violations.push(violation(&subject, "witness on zero locus", format!("witness {j}: {detail}")));
                    continue;
                }
            };
            if !exact.exact() {
                violations.push(violation(&subject, "cotangent exactness (witness-level)", format!("witness {j}: {exact:?}")));
            }
            let ke = classify_mor_at(&d.e, std::slice::from_ref(pt)).map_err(|e| err(&wp, e))?[0];
            let kf = classify_mor_at(&d.f, std::slice::from_ref(pt)).map_err(|e| err(&wp, e))?[0];
            rows.push(json!({
                "point": point_value(pt),
                "cotangent_exact": exact.exact(),
                "left_projection": { "embedding": ke.embedding_on_witnesses, "immersion": ke.immersion, "submersion": ke.submersion, "etale": ke.etale },
                "right_projection": { "embedding": kf.embedding_on_witnesses, "immersion": kf.immersion, "submersion": kf.submersion, "etale": kf.etale },
            }));
        }
        let _ = writeln!(text, "fibre product {}: n={} k={} vdim={} orient={}", decl.name, d.w.n(), d.w.k(), d.vdim(), d.w.orient());
        let _ = writeln!(text, "  vars: {}", vars.join(", "));
        let _ = writeln!(text, "  section: {}", d.w.section().iter().map(|s| s.to_string_with(&vars)).collect::<Vec<_>>().join(", "));
        out.insert(
            decl.name.clone(),
            json!({
                "vdim": d.vdim(),
                "n": d.w.n(),
                "rank": d.w.k(),
                "orient": d.w.orient(),
                "vars": vars,
                "section": strings(d.w.section(), &vars),
                "domain": strings(d.w.domain(), &vars),
                "left_projection_fhat": matrix_strings(d.e.fhat(), &vars),
                "right_projection_fhat": matrix_strings(d.f.fhat(), &vars),
                "witnesses": rows,
            }),
        );
    }
    let mut body = Map::new();
    body.insert("fibre_products".into(), Value::Object(out));
    Ok(finish("fibre", body, violations, text))
}

fn maps_to_rp(
    left: &Model,
    g: &[String],
    right: &Model,
    h: &[String],
    p: usize,
    path: &str,
    keys: (&str, &str),
) -> Result<(Vec<Poly>, Vec<Poly>), DocError> {
    for (decl, key) in [(g, keys.0), (h, keys.1)] {
        if decl.len() != p {
            return Err(err(&ptr(path, key), format!("{} components, expected {p}", decl.len())));
        }
    }
    Ok((polys(g, &left.vars, &ptr(path, keys.0))?, polys(h, &right.vars, &ptr(path, keys.1))?))
}

pub fn glue(r: &Resolver) -> Result<Report, DocError> {
    let mut violations = Vec::new();
    let mut text = String::new();
    let mut out = Map::new();
    for (i, decl) in r.doc.glue.iter().enumerate() {
        let path = format!("/glue/{i}");
        let (data, _) = r.glue_data(decl, &path)?;
        let report = validate_glue(&data).map_err(|e| err(&path, e))?;
        let _ = writeln!(text, "glue {}:", decl.name);
        let _ = writeln!(text, "  {:<14} {:<42} {:<6} {:<12} detail", "subject", "condition", "result", "scope");
        let mut entries = Vec::new();
        for e in &report.entries {
            let scope = match e.scope {
                Scope::Algebraic => json!("algebraic"),
                Scope::Witnesses(k) => json!({ "witnesses": k }),
            };
            let scope_text = match e.scope {
                Scope::Algebraic => "algebraic".to_string(),
                Scope::Witnesses(k) => format!("{k} witnesses"),
            };
            let _ = writeln!(
                text,
                "  {:<14} {:<42} {:<6} {:<12} {}",
                e.subject.to_string(),
                e.condition.name(),
                if e.passed { "pass" } else { "FAIL" },
                scope_text,
                e.detail
            );
            if !e.passed {
                violations.push(violation(&format!("glue {} {}", decl.name, e.subject), e.condition.name(), e.detail.clone()));
            }
            entries.push(json!({
                "subject": e.subject.to_string(),
                "condition": e.condition.name(),
                "passed": e.passed,
                "scope": scope,
                "detail": e.detail,
            }));
        }
        out.insert(decl.name.clone(), json!({ "valid": report.valid(), "entries": entries }));
    }
    let mut body = Map::new();
    body.insert("glue".into(), Value::Object(out));
    Ok(finish("glue", body, violations, text))
}

fn count_value(rep: &CountReport) -> Value {
    let replicas: Vec<Value> = rep
        .replicas
        .iter()
        .map(|rp| {
            json!({
                "seed": rp.seed,
                "epsilon": num(rp.epsilon),
                "direction": nums(&rp.direction),
                "resamples": rp.resamples,
                "count": rp.count,
                "zeros": rp.zeros.iter().map(|z| json!({ "coords": nums(&z.coords), "det": num(z.det), "sign": z.sign })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "count": rep.count, "boundary_min": num(rep.boundary_min), "replicas": replicas })
}

fn problem(r: &Resolver, model: Arc<dman_core::dman::StdModel>, lo: &[f64], hi: &[f64], seeds: &Option<Vec<u64>>, eps: &Option<Vec<f64>>) -> CountProblem {
    let mut p = CountProblem::new(model, lo.to_vec(), hi.to_vec());
    if let Some(s) = seeds {
        p = p.with_seeds(s.clone());
    } else if let Some(base) = r.settings.seed {
        p = p.with_seeds((0..5).map(|i| base.wrapping_add(i)).collect());
    }
    if let Some(e) = eps {
        p = p.with_epsilons(e.clone());
    }
    p
}

pub fn count(r: &Resolver) -> Result<Report, DocError> {
    let mut violations = Vec::new();
    let mut text = String::new();
    let mut counts = Map::new();
    for (i, decl) in r.doc.counts.iter().enumerate() {
        let path = format!("/counts/{i}");
        if decl.components.is_empty() {
            return Err(err(&ptr(&path, "components"), "at least one component is required"));
        }
        let mut problems = Vec::new();
        for (j, c) in decl.components.iter().enumerate() {
            let cp = format!("{path}/components/{j}");
            let m = r.model(&c.model, &ptr(&cp, "model"))?;
            if c.lo.len() != m.model.n() || c.hi.len() != m.model.n() {
                return Err(err(&cp, format!("box bounds must have {} entries", m.model.n())));
            }
            problems.push(problem(r, m.model.clone(), &c.lo, &c.hi, &decl.seeds, &decl.epsilons));
        }
        let subject = format!("count {}", decl.name);
        let result = if problems.len() == 1 {
            virtual_count(&problems[0]).map(|rep| count_value(&rep))
        } else {
            let parts: dman_core::Result<Vec<Value>> = problems.iter().map(|p| virtual_count(p).map(|rep| count_value(&rep))).collect();
            parts.and_then(|parts| {
                let total = count_disjoint_union(&problems)?;
                Ok(json!({ "count": total, "components": parts }))
            })
        };
        match result {
            Ok(v) => {
                let _ = writeln!(text, "count {}: {}", decl.name, v["count"]);
                counts.insert(decl.name.clone(), v);
            }
            Err(e @ Error::Count(_)) => violations.push(violation(&subject, "count well-defined", e.to_string())),
            Err(e) => return Err(err(&path, e)),
        }
    }
    let mut inters = Map::new();
    for (i, decl) in r.doc.intersections.iter().enumerate() {
        let path = format!("/intersections/{i}");
        let left = r.model(&decl.left, &ptr(&path, "left"))?;
        let right = r.model(&decl.right, &ptr(&path, "right"))?;
        let (f, g) = maps_to_rp(left, &decl.f, right, &decl.g, decl.p, &path, ("f", "g"))?;
        let n = left.model.n() + right.model.n();
        if decl.lo.len() != n || decl.hi.len() != n {
            return Err(err(&path, format!("box bounds must have {n} entries")));
        }
        let template = problem(r, left.model.clone(), &decl.lo, &decl.hi, &decl.seeds, &decl.epsilons);
        match intersection_number(left.model.clone(), f, right.model.clone(), g, decl.p, &template) {
            Ok(rep) => {
                let _ = writeln!(text, "intersection {}: {}", decl.name, rep.count);
                inters.insert(decl.name.clone(), count_value(&rep));
            }
            Err(e @ Error::Count(_)) => violations.push(violation(&format!("intersection {}", decl.name), "count well-defined", e.to_string())),
            Err(e) => return Err(err(&path, e)),
        }
    }
    let mut body = Map::new();
    body.insert("counts".into(), Value::Object(counts));
    body.insert("intersections".into(), Value::Object(inters));
    Ok(finish("count", body, violations, text))
}

pub const DEFAULT_LAW_SEED: u64 = 2024;

pub fn laws(seed: u64, cases: usize) -> Result<Report, DocError> {
    let mut violations = Vec::new();
    let mut text = String::new();
    let mut suites = Map::new();
    for outcomes in [run_vvect_laws(seed, cases), run_dman_laws(seed, cases)] {
        let outcomes = outcomes.map_err(|e| err("", e))?;
        for o in outcomes {
            let suite = suites.entry(o.suite.to_string()).or_insert_with(|| json!({})).as_object_mut().unwrap();
            suite.insert(o.law.name().to_string(), json!({ "cases": o.cases, "failures": o.failures, "passed": o.passed() }));
            let _ = writeln!(text, "{} {}: {}/{} pass", o.suite, o.law.name(), o.cases - o.failures.len(), o.cases);
            if !o.passed() {
                violations.push(violation(&format!("{} laws", o.suite), o.law.name(), format!("configurations {:?}", o.failures)));
            }
        }
    }
    let mut body = Map::new();
    body.insert("seed".into(), json!(seed));
    body.insert("cases".into(), json!(cases));
    body.insert("suites".into(), Value::Object(suites));
    Ok(finish("laws", body, violations, text))
}

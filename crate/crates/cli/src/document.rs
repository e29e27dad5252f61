//! The JSON definition document and its resolution into kernel objects.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use dman_core::dman::{validate_2mor, validate_mor, StdModel, StdMor, StdTwoMor, Validated};
use dman_core::glue::{GlueData, OutMaps, Overlap};
use dman_core::poly::{default_var_names, parse_poly, parse_scalar, GroebnerLimits, Poly, PolyMatrix};
use dman_core::witness::WitnessPoint;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default)]
    pub settings: Settings,
    #[serde(default)]
    pub models: Vec<ModelDecl>,
    #[serde(default)]
    pub morphisms: Vec<MorphismDecl>,
    #[serde(default)]
    pub two_morphisms: Vec<TwoMorphismDecl>,
    #[serde(default)]
    pub fibre_products: Vec<FibreDecl>,
    #[serde(default)]
    pub glue: Vec<GlueDecl>,
    #[serde(default)]
    pub counts: Vec<CountDecl>,
    #[serde(default)]
    pub intersections: Vec<IntersectionDecl>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub tolerance: Option<f64>,
    pub max_groebner_steps: Option<usize>,
    pub seed: Option<u64>,
}

/// A coordinate: exact rational text or a JSON number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Text(String),
    Number(serde_json::Number),
}

pub type Point = Vec<Coord>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDecl {
    pub name: String,
    pub vars: Vec<String>,
    pub rank: usize,
    pub section: Vec<String>,
    #[serde(default)]
    pub domain: Vec<String>,
    #[serde(default = "one")]
    pub orient: i32,
    #[serde(default)]
    pub witnesses: Vec<Point>,
}

fn one() -> i32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub map: Vec<String>,
    pub fhat: Vec<Vec<String>>,
    #[serde(default)]
    pub witnesses: Vec<Point>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoMorphismDecl {
    pub name: String,
    pub from: String,
    pub to: String,
    pub lambda: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibreDecl {
    pub name: String,
    pub left: String,
    pub g: Vec<String>,
    pub right: String,
    pub h: Vec<String>,
    pub p: usize,
    #[serde(default)]
    pub witnesses: Vec<Point>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueDecl {
    pub name: String,
    pub n: i64,
    pub charts: Vec<String>,
    /// Defaults to each chart model's own witnesses.
    #[serde(default)]
    pub chart_witnesses: Option<Vec<Vec<Point>>>,
    #[serde(default)]
    pub overlaps: Vec<OverlapDecl>,
    #[serde(default)]
    pub cover_witnesses: Vec<Point>,
    #[serde(default)]
    pub out_maps: Option<OutMapsDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapDecl {
    pub i: usize,
    pub j: usize,
    #[serde(default)]
    pub domain: Vec<String>,
    pub map: Vec<String>,
    pub fhat: Vec<Vec<String>>,
    #[serde(default)]
    pub denominators: Vec<String>,
    #[serde(default)]
    pub witnesses: Vec<Point>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutMapsDecl {
    pub q: usize,
    pub maps: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountDecl {
    pub name: String,
    /// One model, or several counted as a disjoint union.
    pub components: Vec<CountComponent>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountComponent {
    pub model: String,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectionDecl {
    pub name: String,
    pub left: String,
    pub f: Vec<String>,
    pub right: String,
    pub g: Vec<String>,
    pub p: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
}

/// A document error located by a JSON pointer.
#[derive(Debug, Clone, PartialEq)]
pub struct DocError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "/" } else { &self.path };
        write!(f, "{path}: {}", self.message)
    }
}

impl std::error::Error for DocError {}

pub fn err(path: &str, message: impl fmt::Display) -> DocError {
    DocError { path: path.to_string(), message: message.to_string() }
}

/// Join pointer segments, escaping `~` and `/`.
pub fn ptr(base: &str, segment: impl fmt::Display) -> String {
    let s = segment.to_string().replace('~', "~0").replace('/', "~1");
    format!("{base}/{s}")
}

/// Parse a document, mapping serde errors to the pointer of the failing value.
pub fn parse_document(text: &str) -> Result<Document, DocError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| err("", format!("invalid JSON: {e}")))?;
    let mut track = serde_path_to_error::Track::new();
    let de = serde_path_to_error::Deserializer::new(&value, &mut track);
    Document::deserialize(de).map_err(|e| {
        let path = track.path().iter().fold(String::new(), |acc, seg| match seg {
            serde_path_to_error::Segment::Seq { index } => ptr(&acc, index),
            serde_path_to_error::Segment::Map { key } => ptr(&acc, key),
            serde_path_to_error::Segment::Enum { variant } => ptr(&acc, variant),
            serde_path_to_error::Segment::Unknown => acc,
        });
        err(&path, e)
    })
}

/// Settings after applying command-line overrides.
#[derive(Debug, Clone, Copy)]
pub struct Resolved {
    pub tolerance: f64,
    pub limits: GroebnerLimits,
    pub seed: Option<u64>,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

impl Resolved {
    pub fn new(doc: &Settings, tolerance: Option<f64>, max_steps: Option<usize>, seed: Option<u64>) -> Result<Self, DocError> {
        let tolerance = tolerance.or(doc.tolerance).unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(err("/settings/tolerance", "tolerance must be positive"));
        }
        let limits = match max_steps.or(doc.max_groebner_steps) {
            Some(max_steps) => GroebnerLimits { max_steps },
            None => GroebnerLimits::default(),
        };
        Ok(Resolved { tolerance, limits, seed: seed.or(doc.seed) })
    }
}

/// A named model with its variable names and witnesses.
#[derive(Debug, Clone)]
pub struct Model {
    pub model: Arc<StdModel>,
    pub vars: Vec<String>,
    pub witnesses: Vec<WitnessPoint>,
}

/// A declared morphism, kept even when the congruence fails.
#[derive(Debug, Clone)]
pub struct Morphism {
    pub source: String,
    pub target: String,
    pub result: Validated<StdMor>,
    pub witnesses: Vec<WitnessPoint>,
}

#[derive(Debug, Clone)]
pub struct TwoMorphism {
    pub from: String,
    pub to: String,
    /// `None` when an endpoint is itself invalid.
    pub result: Option<Validated<StdTwoMor>>,
}

/// Everything the document declares, with names resolved.
pub struct Resolver<'a> {
    pub doc: &'a Document,
    pub settings: Resolved,
    pub models: BTreeMap<String, Model>,
    pub morphisms: BTreeMap<String, Morphism>,
}

pub fn polys(texts: &[String], vars: &[String], path: &str) -> Result<Vec<Poly>, DocError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| poly(t, vars, &ptr(path, i)))
        .collect()
}

pub fn poly(text: &str, vars: &[String], path: &str) -> Result<Poly, DocError> {
    parse_poly(text, vars).map_err(|e| err(path, e))
}

/// A `rows x cols` matrix; an empty list stands for any matrix with no entries.
pub fn matrix(rows: &[Vec<String>], vars: &[String], shape: (usize, usize), path: &str) -> Result<PolyMatrix, DocError> {
    let n = vars.len();
    if shape.0 * shape.1 == 0 && rows.iter().all(Vec::is_empty) && (rows.is_empty() || rows.len() == shape.0) {
        return Ok(PolyMatrix::zeros(n, shape.0, shape.1));
    }
    if rows.len() != shape.0 {
        return Err(err(path, format!("expected {} rows, found {}", shape.0, rows.len())));
    }
    let mut parsed = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let rp = ptr(path, i);
        if row.len() != shape.1 {
            return Err(err(&rp, format!("expected {} entries, found {}", shape.1, row.len())));
        }
        parsed.push(polys(row, vars, &rp)?);
    }
    PolyMatrix::from_rows(n, parsed).map_err(|e| err(path, e))
}

pub fn point(coords: &[Coord], dim: usize, tolerance: f64, path: &str) -> Result<WitnessPoint, DocError> {
    if coords.len() != dim {
        return Err(err(path, format!("expected {dim} coordinates, found {}", coords.len())));
    }
    let mut exact = Vec::with_capacity(dim);
    let mut floats = Vec::with_capacity(dim);
    let mut all_exact = true;
    for (i, c) in coords.iter().enumerate() {
        let cp = ptr(path, i);
        match c {
            Coord::Text(t) => {
                let q = parse_scalar(t).map_err(|e| err(&cp, e))?;
                floats.push(dman_core::poly::scalar_to_f64(&q));
                exact.push(q);
            }
            Coord::Number(num) => {
                if let Some(i) = num.as_i64() {
                    exact.push(dman_core::poly::rat(i, 1));
                    floats.push(i as f64);
                } else {
                    all_exact = false;
                    floats.push(num.as_f64().ok_or_else(|| err(&cp, "coordinate out of range"))?);
                }
            }
        }
    }
    Ok(if all_exact {
        WitnessPoint::exact(exact)
    } else {
        WitnessPoint::approx(floats, tolerance).with_pivot(tolerance)
    })
}

pub fn points(pts: &[Point], dim: usize, tolerance: f64, path: &str) -> Result<Vec<WitnessPoint>, DocError> {
    pts.iter().enumerate().map(|(i, p)| point(p, dim, tolerance, &ptr(path, i))).collect()
}

fn check_unique<'n>(names: impl Iterator<Item = &'n String>, path: &str) -> Result<(), DocError> {
    let mut seen = BTreeMap::new();
    for (i, n) in names.enumerate() {
        if let Some(first) = seen.insert(n.clone(), i) {
            return Err(err(&format!("{path}/{i}/name"), format!("name {n:?} already declared at {path}/{first}")));
        }
    }
    Ok(())
}

impl<'a> Resolver<'a> {
    pub fn new(doc: &'a Document, settings: Resolved) -> Result<Self, DocError> {
        check_unique(doc.models.iter().map(|m| &m.name), "/models")?;
        check_unique(doc.morphisms.iter().map(|m| &m.name), "/morphisms")?;
        check_unique(doc.two_morphisms.iter().map(|m| &m.name), "/two_morphisms")?;
        check_unique(doc.fibre_products.iter().map(|m| &m.name), "/fibre_products")?;
        check_unique(doc.glue.iter().map(|m| &m.name), "/glue")?;
        check_unique(doc.counts.iter().map(|m| &m.name), "/counts")?;
        check_unique(doc.intersections.iter().map(|m| &m.name), "/intersections")?;
        let mut r = Resolver { doc, settings, models: BTreeMap::new(), morphisms: BTreeMap::new() };
        for (i, m) in doc.models.iter().enumerate() {
            let model = r.build_model(m, &format!("/models/{i}"))?;
            r.models.insert(m.name.clone(), model);
        }
        for (i, m) in doc.morphisms.iter().enumerate() {
            let mor = r.build_morphism(m, &format!("/morphisms/{i}"))?;
            r.morphisms.insert(m.name.clone(), mor);
        }
        Ok(r)
    }

    fn build_model(&self, m: &ModelDecl, path: &str) -> Result<Model, DocError> {
        check_unique(m.vars.iter(), &ptr(path, "vars")).map_err(|e| err(&e.path.replace("/name", ""), e.message))?;
        if m.section.len() != m.rank {
            return Err(err(&ptr(path, "section"), format!("{} components for rank {}", m.section.len(), m.rank)));
        }
        let section = polys(&m.section, &m.vars, &ptr(path, "section"))?;
        let domain = polys(&m.domain, &m.vars, &ptr(path, "domain"))?;
        let model = StdModel::with_limits(m.vars.len(), m.rank, section, domain, m.orient, self.settings.limits)
            .map_err(|e| err(path, e))?;
        let witnesses = points(&m.witnesses, m.vars.len(), self.settings.tolerance, &ptr(path, "witnesses"))?;
        Ok(Model { model: Arc::new(model), vars: m.vars.clone(), witnesses })
    }

    pub fn model(&self, name: &str, path: &str) -> Result<&Model, DocError> {
        self.models.get(name).ok_or_else(|| err(path, format!("unknown model {name:?}")))
    }

    fn build_morphism(&self, m: &MorphismDecl, path: &str) -> Result<Morphism, DocError> {
        let src = self.model(&m.source, &ptr(path, "source"))?;
        let tgt = self.model(&m.target, &ptr(path, "target"))?;
        if m.map.len() != tgt.model.n() {
            return Err(err(&ptr(path, "map"), format!("{} components for a target of dimension {}", m.map.len(), tgt.model.n())));
        }
        let map = polys(&m.map, &src.vars, &ptr(path, "map"))?;
        let fhat = matrix(&m.fhat, &src.vars, (tgt.model.k(), src.model.k()), &ptr(path, "fhat"))?;
        let result = validate_mor(src.model.clone(), tgt.model.clone(), map, fhat).map_err(|e| err(path, e))?;
        let witnesses = points(&m.witnesses, src.model.n(), self.settings.tolerance, &ptr(path, "witnesses"))?;
        Ok(Morphism { source: m.source.clone(), target: m.target.clone(), result, witnesses })
    }

    pub fn morphism(&self, name: &str, path: &str) -> Result<&Morphism, DocError> {
        self.morphisms.get(name).ok_or_else(|| err(path, format!("unknown morphism {name:?}")))
    }

    pub fn two_morphism(&self, m: &TwoMorphismDecl, path: &str) -> Result<TwoMorphism, DocError> {
        let from = self.morphism(&m.from, &ptr(path, "from"))?;
        let to = self.morphism(&m.to, &ptr(path, "to"))?;
        if from.source != to.source || from.target != to.target {
            return Err(err(path, "2-morphism endpoints have different source or target"));
        }
        let src = &self.models[&from.source];
        let tgt = &self.models[&from.target];
        let lambda = matrix(&m.lambda, &src.vars, (tgt.model.n(), src.model.k()), &ptr(path, "lambda"))?;
        let result = match (&from.result, &to.result) {
            (Validated::Valid(f), Validated::Valid(g)) => Some(validate_2mor(f, g, lambda).map_err(|e| err(path, e))?),
            _ => None,
        };
        Ok(TwoMorphism { from: m.from.clone(), to: m.to.clone(), result })
    }

    /// Variable names of a fibre product: left then right, renamed on a clash.
    pub fn product_vars(&self, left: &Model, right: &Model) -> Vec<String> {
        let mut vars: Vec<String> = left.vars.iter().chain(&right.vars).cloned().collect();
        let mut sorted = vars.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != vars.len() {
            vars = default_var_names(vars.len());
        }
        vars
    }

    pub fn glue_data(&self, g: &GlueDecl, path: &str) -> Result<(GlueData, Vec<Vec<String>>), DocError> {
        let tol = self.settings.tolerance;
        let mut charts = Vec::new();
        let mut vars = Vec::new();
        for (i, name) in g.charts.iter().enumerate() {
            let m = self.model(name, &ptr(&ptr(path, "charts"), i))?;
            charts.push(m.model.clone());
            vars.push(m.vars.clone());
        }
        let chart_witnesses = match &g.chart_witnesses {
            Some(cw) => {
                let cp = ptr(path, "chart_witnesses");
                if cw.len() != charts.len() {
                    return Err(err(&cp, format!("{} witness lists for {} charts", cw.len(), charts.len())));
                }
                cw.iter()
                    .enumerate()
                    .map(|(i, pts)| points(pts, charts[i].n(), tol, &ptr(&cp, i)))
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => g.charts.iter().map(|n| self.models[n].witnesses.clone()).collect(),
        };
        let mut overlaps = Vec::new();
        for (idx, o) in g.overlaps.iter().enumerate() {
            let op = ptr(&ptr(path, "overlaps"), idx);
            if o.i >= charts.len() || o.j >= charts.len() {
                return Err(err(&op, format!("chart index out of range for {} charts", charts.len())));
            }
            let (vi, ci, cj) = (&vars[o.i], &charts[o.i], &charts[o.j]);
            if o.map.len() != cj.n() {
                return Err(err(&ptr(&op, "map"), format!("{} components for chart {} of dimension {}", o.map.len(), o.j, cj.n())));
            }
            overlaps.push(Overlap {
                i: o.i,
                j: o.j,
                domain: polys(&o.domain, vi, &ptr(&op, "domain"))?,
                map: polys(&o.map, vi, &ptr(&op, "map"))?,
                fhat: matrix(&o.fhat, vi, (cj.k(), ci.k()), &ptr(&op, "fhat"))?,
                denominators: polys(&o.denominators, vi, &ptr(&op, "denominators"))?,
                witnesses: points(&o.witnesses, ci.n(), tol, &ptr(&op, "witnesses"))?,
            });
        }
        let cover_witnesses = g
            .cover_witnesses
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let dim = c.len();
                point(c, dim, tol, &ptr(&ptr(path, "cover_witnesses"), i))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let out_maps = match &g.out_maps {
            None => None,
            Some(om) => {
                let mp = ptr(&ptr(path, "out_maps"), "maps");
                if om.maps.len() != charts.len() {
                    return Err(err(&mp, format!("{} maps for {} charts", om.maps.len(), charts.len())));
                }
                let maps = om
                    .maps
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        if m.len() != om.q {
                            return Err(err(&ptr(&mp, i), format!("{} components, expected {}", m.len(), om.q)));
                        }
                        polys(m, &vars[i], &ptr(&mp, i))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Some(OutMaps { q: om.q, maps })
            }
        };
        Ok((GlueData { n: g.n, charts, chart_witnesses, overlaps, cover_witnesses, out_maps }, vars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn pointer_segments_are_escaped() {
        assert_eq!(ptr("/a", "b/c~d"), "/a/b~1c~0d");
        assert_eq!(ptr("", 3), "/3");
    }

    #[test]
    fn empty_matrices_take_the_expected_shape() {
        let v = vars(&["x"]);
        assert_eq!(matrix(&[], &v, (0, 2), "").unwrap().shape(), (0, 2));
        assert_eq!(matrix(&[vec![], vec![]], &v, (2, 0), "").unwrap().shape(), (2, 0));
        let e = matrix(&[vec!["x".into()]], &v, (1, 2), "/m").unwrap_err();
        assert_eq!(e.path, "/m/0");
    }

    #[test]
    fn points_are_exact_unless_a_float_appears() {
        let exact = point(&[Coord::Text("1/2".into()), Coord::Number(3.into())], 2, 1e-9, "").unwrap();
        assert!(exact.is_exact());
        let approx = point(&[Coord::Number(serde_json::Number::from_f64(0.5).unwrap())], 1, 1e-6, "").unwrap();
        assert!(!approx.is_exact());
        assert_eq!(approx.tolerance(), 1e-6);
    }

    #[test]
    fn flags_override_document_settings() {
        let doc = Settings { tolerance: Some(1e-3), max_groebner_steps: Some(10), seed: Some(1) };
        let r = Resolved::new(&doc, Some(1e-6), None, Some(9)).unwrap();
        assert_eq!(r.tolerance, 1e-6);
        assert_eq!(r.limits.max_steps, 10);
        assert_eq!(r.seed, Some(9));
        assert!(Resolved::new(&doc, Some(-1.0), None, None).is_err());
    }

    #[test]
    fn clashing_product_variables_are_renamed() {
        let doc = Document::default();
        let r = Resolver::new(&doc, Resolved::new(&doc.settings, None, None, None).unwrap()).unwrap();
        let m = |v: &[&str]| Model {
            model: Arc::new(StdModel::manifold(v.len())),
            vars: vars(v),
            witnesses: vec![],
        };
        assert_eq!(r.product_vars(&m(&["x"]), &m(&["y"])), vars(&["x", "y"]));
        assert_eq!(r.product_vars(&m(&["x"]), &m(&["x"])), vars(&["x1", "x2"]));
    }
}

//! Checks of the hypotheses for gluing standard-model charts along overlaps.
//!
//! Only the hypotheses are certified; no glued object is built. Conditions that
//! can only be tested at finitely many points are reported with
//! [`Scope::Witnesses`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::dman::{exactness_at, StdModel};
use crate::error::{check_nvars, Error, Result};
use crate::poly::{Ideal, Poly, PolyMatrix};
use crate::witness::WitnessPoint;

/// Data on `V_ij ⊆ V_i` for a pair `i < j`.
#[derive(Debug, Clone)]
pub struct Overlap {
    pub i: usize,
    pub j: usize,
    /// Extra inequalities `p > 0` cutting `V_ij` out of `V_i`.
    pub domain: Vec<Poly>,
    pub map: Vec<Poly>,
    /// `k_j x k_i`.
    pub fhat: PolyMatrix,
    /// Functions declared positive on `V_ij`, used to clear denominators.
    pub denominators: Vec<Poly>,
    pub witnesses: Vec<WitnessPoint>,
}

#[derive(Debug, Clone)]
pub struct OutMaps {
    pub q: usize,
    /// One map `V_i -> R^q` per chart.
    pub maps: Vec<Vec<Poly>>,
}

#[derive(Debug, Clone)]
pub struct GlueData {
    pub n: i64,
    pub charts: Vec<Arc<StdModel>>,
    pub chart_witnesses: Vec<Vec<WitnessPoint>>,
    pub overlaps: Vec<Overlap>,
    /// Points expected to lie on the zero locus of some chart.
    pub cover_witnesses: Vec<WitnessPoint>,
    pub out_maps: Option<OutMaps>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Chart(usize),
    Pair(usize, usize),
    Triple(usize, usize, usize),
    Cover,
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Chart(i) => write!(f, "chart {i}"),
            Subject::Pair(i, j) => write!(f, "overlap {i},{j}"),
            Subject::Triple(i, j, k) => write!(f, "triple {i},{j},{k}"),
            Subject::Cover => write!(f, "cover"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GlueCondition {
    /// `dim V_i - rank E_i = n`.
    ChartDimension,
    /// Every cover witness is a zero of some chart.
    Cover,
    /// `ê_ij s_i = e_ij^*(s_j) + O(s_i^2)`.
    SectionCompatibility,
    /// `e_ij` sends overlap witnesses into `V_j`.
    MapsInto,
    /// Exactness of `0 -> T V_i -> E_i ⊕ T V_j -> E_j -> 0` at overlap witnesses.
    Exactness,
    /// `e_ik = e_jk ∘ e_ij + O(s_i^2)`.
    CocycleMap,
    /// `ê_ik = e_ij^*(ê_jk) ê_ij + O(s_i)`.
    CocycleBundle,
    /// `g_j ∘ e_ij = g_i + O(s_i)`.
    MapOut,
}

impl GlueCondition {
    pub fn name(self) -> &'static str {
        match self {
            GlueCondition::ChartDimension => "chart-dimension",
            GlueCondition::Cover => "cover (witness-level)",
            GlueCondition::SectionCompatibility => "section-compatibility mod I_s^2",
            GlueCondition::MapsInto => "overlap-map-into-target (witness-level)",
            GlueCondition::Exactness => "tangent-exactness (witness-level)",
            GlueCondition::CocycleMap => "cocycle-map mod I_s^2",
            GlueCondition::CocycleBundle => "cocycle-bundle mod I_s",
            GlueCondition::MapOut => "map-out mod I_s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Algebraic,
    /// Checked at this many points only.
    Witnesses(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueEntry {
    pub subject: Subject,
    pub condition: GlueCondition,
    pub passed: bool,
    pub scope: Scope,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueReport {
    pub entries: Vec<GlueEntry>,
}

impl GlueReport {
    pub fn valid(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GlueEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn get(&self, subject: Subject, condition: GlueCondition) -> Option<&GlueEntry> {
        self.entries.iter().find(|e| e.subject == subject && e.condition == condition)
    }
}

/// How a residual was shown to lie in an ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Membership {
    Plain,
    Denominator(String),
    Fails,
}

fn member(r: &Poly, ideal: &Ideal, dens: &[Poly]) -> Result<Membership> {
    if ideal.contains(r)? {
        return Ok(Membership::Plain);
    }
    for (idx, d) in dens.iter().enumerate() {
        if ideal.contains(&(d * r))? {
            return Ok(Membership::Denominator(format!("cleared by denominator {idx}")));
        }
    }
    if dens.len() > 1 {
        let all = dens.iter().fold(Poly::one(r.nvars()), |acc, d| &acc * d);
        if ideal.contains(&(&all * r))? {
            return Ok(Membership::Denominator("cleared by product of denominators".into()));
        }
    }
    Ok(Membership::Fails)
}

/// Entry for a list of residuals that must all lie in `ideal` up to positive denominators.
fn membership_entry(
    subject: Subject,
    condition: GlueCondition,
    residuals: &[Poly],
    ideal: &Ideal,
    dens: &[Poly],
) -> Result<GlueEntry> {
    let mut failed = Vec::new();
    let mut cleared = Vec::new();
    for (idx, r) in residuals.iter().enumerate() {
        match member(r, ideal, dens)? {
            Membership::Plain => {}
            Membership::Denominator(how) => cleared.push(format!("component {idx} {how}")),
            Membership::Fails => failed.push(format!("component {idx} has normal form {}", ideal.normal_form(r)?)),
        }
    }
    let passed = failed.is_empty();
    let detail = if passed {
        if cleared.is_empty() { "all residuals in ideal".to_string() } else { cleared.join("; ") }
    } else {
        failed.join("; ")
    };
    Ok(GlueEntry { subject, condition, passed, scope: Scope::Algebraic, detail })
}

fn witness_entry(subject: Subject, condition: GlueCondition, total: usize, failed: Vec<String>) -> GlueEntry {
    let passed = failed.is_empty();
    let detail = if total == 0 {
        "no witnesses supplied; vacuous".to_string()
    } else if passed {
        format!("holds at all {total} witnesses")
    } else {
        failed.join("; ")
    };
    GlueEntry { subject, condition, passed, scope: Scope::Witnesses(total), detail }
}

fn validate_shapes(d: &GlueData) -> Result<BTreeMap<(usize, usize), &Overlap>> {
    let count = d.charts.len();
    if d.chart_witnesses.len() != count {
        return Err(Error::Shape(format!("{} witness lists for {count} charts", d.chart_witnesses.len())));
    }
    let mut pairs = BTreeMap::new();
    for (idx, o) in d.overlaps.iter().enumerate() {
        if o.i >= o.j || o.j >= count {
            return Err(Error::Invalid(format!("overlap {idx} has indices ({}, {}) for {count} charts", o.i, o.j)));
        }
        if pairs.insert((o.i, o.j), o).is_some() {
            return Err(Error::Invalid(format!("overlap ({}, {}) declared twice", o.i, o.j)));
        }
        let (ci, cj) = (&d.charts[o.i], &d.charts[o.j]);
        if o.map.len() != cj.n() {
            return Err(Error::Shape(format!("overlap ({}, {}) map has {} components", o.i, o.j, o.map.len())));
        }
        if o.fhat.shape() != (cj.k(), ci.k()) {
            return Err(Error::Shape(format!("overlap ({}, {}) bundle map is {:?}", o.i, o.j, o.fhat.shape())));
        }
        check_nvars(ci.n(), o.fhat.nvars())?;
        for p in o.map.iter().chain(&o.domain).chain(&o.denominators) {
            check_nvars(ci.n(), p.nvars())?;
        }
    }
    if let Some(out) = &d.out_maps {
        if out.maps.len() != count {
            return Err(Error::Shape(format!("{} out-maps for {count} charts", out.maps.len())));
        }
        for (i, g) in out.maps.iter().enumerate() {
            if g.len() != out.q {
                return Err(Error::Shape(format!("out-map {i} has {} components, expected {}", g.len(), out.q)));
            }
            for p in g {
                check_nvars(d.charts[i].n(), p.nvars())?;
            }
        }
    }
    Ok(pairs)
}

fn overlap_domain(chart: &StdModel, o: &Overlap) -> Vec<Poly> {
    chart.domain().iter().chain(&o.domain).cloned().collect()
}

pub fn validate_glue(d: &GlueData) -> Result<GlueReport> {
    let pairs = validate_shapes(d)?;
    let mut entries = Vec::new();

    for (i, chart) in d.charts.iter().enumerate() {
        for (w, pt) in d.chart_witnesses[i].iter().enumerate() {
            chart.check_witness(pt).map_err(|e| Error::NotWitness(format!("chart {i} witness {w}: {e}")))?;
        }
        let passed = chart.vdim() == d.n;
        entries.push(GlueEntry {
            subject: Subject::Chart(i),
            condition: GlueCondition::ChartDimension,
            passed,
            scope: Scope::Algebraic,
            detail: format!("dim {} - rank {} = {}, expected {}", chart.n(), chart.k(), chart.vdim(), d.n),
        });
    }

    for (&(i, j), o) in &pairs {
        let (ci, cj) = (&d.charts[i], &d.charts[j]);
        let subject = Subject::Pair(i, j);
        let dom = overlap_domain(ci, o);
        let dens: Vec<Poly> = dom.iter().chain(&o.denominators).cloned().collect();
        for (w, pt) in o.witnesses.iter().enumerate() {
            pt.check_witness(ci.section(), &dom)
                .map_err(|e| Error::NotWitness(format!("overlap ({i}, {j}) witness {w}: {e}")))?;
        }

        let residuals = (0..cj.k())
            .map(|r| {
                let lhs = (0..ci.k()).fold(Poly::zero(ci.n()), |acc, c| acc + o.fhat.get(r, c) * &ci.section()[c]);
                Ok(lhs - cj.section()[r].compose_into(&o.map, ci.n())?)
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push(membership_entry(
            subject,
            GlueCondition::SectionCompatibility,
            &residuals,
            ci.ideal_sq(),
            &dens,
        )?);

        let mut outside = Vec::new();
        let mut inexact = Vec::new();
        for (w, pt) in o.witnesses.iter().enumerate() {
            let image = pt.image(&o.map)?;
            if !cj.in_domain(&image)? {
                outside.push(format!("witness {w} maps outside V_{j}"));
            }
            let v = exactness_at(ci, cj, &o.map, &o.fhat, pt)?;
            if !v.etale {
                inexact.push(format!("witness {w}: rank M = {}, rank N = {}", v.rank_m, v.rank_n));
            }
        }
        entries.push(witness_entry(subject, GlueCondition::MapsInto, o.witnesses.len(), outside));
        entries.push(witness_entry(subject, GlueCondition::Exactness, o.witnesses.len(), inexact));

        if let Some(out) = &d.out_maps {
            let residuals = out.maps[j]
                .iter()
                .zip(&out.maps[i])
                .map(|(gj, gi)| Ok(gj.compose_into(&o.map, ci.n())? - gi.clone()))
                .collect::<Result<Vec<_>>>()?;
            entries.push(membership_entry(subject, GlueCondition::MapOut, &residuals, ci.ideal(), &dens)?);
        }
    }

    for (&(i, j), oij) in &pairs {
        for (&(i2, k), oik) in pairs.range((i, j + 1)..(i + 1, 0)) {
            debug_assert_eq!(i, i2);
            let Some(ojk) = pairs.get(&(j, k)) else { continue };
            let ci = &d.charts[i];
            let subject = Subject::Triple(i, j, k);
            let dens: Vec<Poly> = overlap_domain(ci, oij)
                .into_iter()
                .chain(oik.domain.iter().cloned())
                .chain(oij.denominators.iter().cloned())
                .chain(oik.denominators.iter().cloned())
                .collect();
            let residuals = oik
                .map
                .iter()
                .zip(&ojk.map)
                .map(|(a, b)| Ok(a - &b.compose_into(&oij.map, ci.n())?))
                .collect::<Result<Vec<_>>>()?;
            entries.push(membership_entry(subject, GlueCondition::CocycleMap, &residuals, ci.ideal_sq(), &dens)?);
            let composite = ojk.fhat.compose(&oij.map, ci.n())?.mul(&oij.fhat)?;
            let diff = oik.fhat.sub(&composite)?;
            entries.push(membership_entry(subject, GlueCondition::CocycleBundle, diff.entries(), ci.ideal(), &dens)?);
        }
    }

    let mut uncovered = Vec::new();
    for (w, pt) in d.cover_witnesses.iter().enumerate() {
        let covered = d.charts.iter().any(|c| c.n() == pt.len() && c.check_witness(pt).is_ok());
        if !covered {
            uncovered.push(format!("witness {w} lies in no chart"));
        }
    }
    entries.push(witness_entry(Subject::Cover, GlueCondition::Cover, d.cover_witnesses.len(), uncovered));

    entries.sort_by_key(|e| (e.subject, e.condition));
    Ok(GlueReport { entries })
}

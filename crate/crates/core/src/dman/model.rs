use std::sync::Arc;

use crate::cinf_ring::FgRing;
use crate::error::{check_nvars, Error, Result};
use crate::poly::{GroebnerLimits, Ideal, Poly};
use crate::witness::WitnessPoint;

/// `S_{V,E,s}` with `V` an open semialgebraic subset of `R^n` cut out by
/// `domain` (each entry means `p > 0`), `E` trivial of rank `k`, and section `s`.
#[derive(Debug, Clone)]
pub struct StdModel {
    n: usize,
    k: usize,
    section: Vec<Poly>,
    domain: Vec<Poly>,
    orient: i32,
    ring: FgRing,
    ideal_sq: Arc<Ideal>,
}

impl PartialEq for StdModel {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.section == other.section
            && self.domain == other.domain
            && self.orient == other.orient
    }
}

impl Eq for StdModel {}

pub fn make_std_model(n: usize, k: usize, s: Vec<Poly>, domain: Vec<Poly>, orient: i32) -> Result<StdModel> {
    StdModel::new(n, k, s, domain, orient)
}

impl StdModel {
    pub fn new(n: usize, k: usize, s: Vec<Poly>, domain: Vec<Poly>, orient: i32) -> Result<Self> {
        Self::with_limits(n, k, s, domain, orient, GroebnerLimits::default())
    }

    pub fn with_limits(
        n: usize,
        k: usize,
        section: Vec<Poly>,
        domain: Vec<Poly>,
        orient: i32,
        limits: GroebnerLimits,
    ) -> Result<Self> {
        if section.len() != k {
            return Err(Error::Shape(format!("section has {} components, rank is {k}", section.len())));
        }
        if orient != 1 && orient != -1 {
            return Err(Error::Invalid(format!("orientation must be 1 or -1, got {orient}")));
        }
        for p in section.iter().chain(&domain) {
            check_nvars(n, p.nvars())?;
        }
        let ideal = Ideal::with_limits(n, section.clone(), limits)?;
        let ideal_sq = Arc::new(ideal.square()?);
        Ok(StdModel { n, k, section, domain, orient, ring: FgRing::new(Arc::new(ideal)), ideal_sq })
    }

    /// `R^n` as a model with no obstructions.
    pub fn manifold(n: usize) -> Self {
        Self::new(n, 0, Vec::new(), Vec::new(), 1).expect("free model is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vdim(&self) -> i64 {
        self.n as i64 - self.k as i64
    }

    pub fn section(&self) -> &[Poly] {
        &self.section
    }

    pub fn domain(&self) -> &[Poly] {
        &self.domain
    }

    pub fn orient(&self) -> i32 {
        self.orient
    }

    /// The coordinate ring `Q[x]/I_s`.
    pub fn ring(&self) -> &FgRing {
        &self.ring
    }

    pub fn ideal(&self) -> &Ideal {
        self.ring.ideal()
    }

    pub fn ideal_sq(&self) -> &Ideal {
        &self.ideal_sq
    }

    pub fn with_orient(&self, orient: i32) -> Result<Self> {
        if orient != 1 && orient != -1 {
            return Err(Error::Invalid(format!("orientation must be 1 or -1, got {orient}")));
        }
        Ok(StdModel { orient, ..self.clone() })
    }

    pub fn reversed(&self) -> Self {
        StdModel { orient: -self.orient, ..self.clone() }
    }

    /// The same model on a smaller open set.
    pub fn shrink(&self, extra: Vec<Poly>) -> Result<Self> {
        for p in &extra {
            check_nvars(self.n, p.nvars())?;
        }
        let mut domain = self.domain.clone();
        domain.extend(extra);
        Ok(StdModel { domain, ..self.clone() })
    }

    pub fn check_witness(&self, pt: &WitnessPoint) -> Result<()> {
        check_nvars(self.n, pt.len())?;
        pt.check_witness(&self.section, &self.domain)
    }

    pub fn in_domain(&self, pt: &WitnessPoint) -> Result<bool> {
        Ok(pt.violated_inequalities(&self.domain)?.is_empty())
    }
}

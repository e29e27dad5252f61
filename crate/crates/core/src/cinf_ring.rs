//! Finitely presented rings `Q[x_1..x_n]/I`, their morphisms and cotangent modules.

use std::sync::Arc;

use crate::error::{check_nvars, Error, Result};
use crate::poly::{jacobian, Ideal, Poly, PolyMatrix};

/// The presentation `Q[x_1..x_n]/I`. Elements are represented by polynomials
/// and compared by normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FgRing {
    ideal: Arc<Ideal>,
}

impl FgRing {
    pub fn new(ideal: Arc<Ideal>) -> Self {
        FgRing { ideal }
    }

    /// The free ring in `n` variables.
    pub fn free(n: usize) -> Self {
        FgRing { ideal: Arc::new(Ideal::zero(n)) }
    }

    pub fn nvars(&self) -> usize {
        self.ideal.nvars()
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn ideal_arc(&self) -> &Arc<Ideal> {
        &self.ideal
    }

    pub fn reduce(&self, p: &Poly) -> Result<Poly> {
        self.ideal.normal_form(p)
    }

    pub fn reduce_matrix(&self, m: &PolyMatrix) -> Result<PolyMatrix> {
        m.reduce(&self.ideal)
    }

    pub fn elements_equal(&self, a: &Poly, b: &Poly) -> Result<bool> {
        self.ideal.contains(&(a - b))
    }
}

/// Apply the operation `f` (a polynomial in `args.len()` variables) to ring elements.
pub fn quotient_op(f: &Poly, args: &[Poly], ring: &FgRing) -> Result<Poly> {
    if f.nvars() != args.len() {
        return Err(Error::Arity { expected: f.nvars(), found: args.len() });
    }
    for a in args {
        check_nvars(ring.nvars(), a.nvars())?;
    }
    ring.reduce(&f.compose_into(args, ring.nvars())?)
}

/// A ring morphism `source -> target` given by the images of the source generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMor {
    source: FgRing,
    target: FgRing,
    images: Vec<Poly>,
}

impl RingMor {
    /// Checks that every generator of the source ideal maps into the target ideal.
    pub fn new(source: FgRing, target: FgRing, images: Vec<Poly>) -> Result<Self> {
        if images.len() != source.nvars() {
            return Err(Error::Arity { expected: source.nvars(), found: images.len() });
        }
        for p in &images {
            check_nvars(target.nvars(), p.nvars())?;
        }
        for (i, g) in source.ideal().generators().iter().enumerate() {
            let image = g.compose_into(&images, target.nvars())?;
            if !target.ideal().contains(&image)? {
                return Err(Error::Invalid(format!("source relation {i} does not map into the target ideal")));
            }
        }
        let images = images.iter().map(|p| target.reduce(p)).collect::<Result<_>>()?;
        Ok(RingMor { source, target, images })
    }

    pub fn identity(ring: FgRing) -> Self {
        let images = Poly::vars(ring.nvars());
        RingMor { source: ring.clone(), target: ring, images }
    }

    pub fn source(&self) -> &FgRing {
        &self.source
    }

    pub fn target(&self) -> &FgRing {
        &self.target
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    /// Image of a source element, reduced in the target.
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        check_nvars(self.source.nvars(), p.nvars())?;
        self.target.reduce(&p.compose_into(&self.images, self.target.nvars())?)
    }

    pub fn apply_matrix(&self, m: &PolyMatrix) -> Result<PolyMatrix> {
        check_nvars(self.source.nvars(), m.nvars())?;
        m.compose(&self.images, self.target.nvars())?.reduce(self.target.ideal())
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &RingMor) -> Result<RingMor> {
        if self.target != next.source {
            return Err(Error::Endpoint("ring morphism targets and sources differ".into()));
        }
        let images = self.images.iter().map(|p| next.apply(p)).collect::<Result<_>>()?;
        Ok(RingMor { source: self.source.clone(), target: next.target.clone(), images })
    }
}

/// Presentation of the cotangent module: free on `dx_1..dx_n` modulo the
/// differentials of the ideal generators (one relation row each).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CotModule {
    ring: FgRing,
    relations: PolyMatrix,
}

impl CotModule {
    pub fn ring(&self) -> &FgRing {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.ring.nvars()
    }

    pub fn relations(&self) -> &PolyMatrix {
        &self.relations
    }
}

pub fn cotangent(ring: &FgRing) -> Result<CotModule> {
    let relations = jacobian(ring.ideal().generators(), ring.nvars())?;
    Ok(CotModule { ring: ring.clone(), relations })
}

/// The matrix whose row `i` expresses `d(image_i)` in the target's `dx_j`, reduced.
pub fn cotangent_pushforward(phi: &RingMor) -> Result<PolyMatrix> {
    jacobian(phi.images(), phi.target().nvars())?.reduce(phi.target().ideal())
}

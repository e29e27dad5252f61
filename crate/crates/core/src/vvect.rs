//! Two-term complexes of free modules, their 1- and 2-morphisms, and
//! pointwise classification of 1-morphisms.

use std::fmt;

use crate::cinf_ring::{FgRing, RingMor};
use crate::error::{check_nvars, Error, Result};
use crate::poly::PolyMatrix;
use crate::witness::WitnessPoint;

/// `phi: E1 -> E2` with `E1`, `E2` free of ranks `r1`, `r2`; `phi` is `r2 x r1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VComplex {
    ring: FgRing,
    r1: usize,
    r2: usize,
    phi: PolyMatrix,
}

impl VComplex {
    pub fn new(ring: FgRing, r1: usize, r2: usize, phi: PolyMatrix) -> Result<Self> {
        check_nvars(ring.nvars(), phi.nvars())?;
        if phi.shape() != (r2, r1) {
            return Err(Error::Shape(format!("phi is {:?}, expected ({r2}, {r1})", phi.shape())));
        }
        let phi = ring.reduce_matrix(&phi)?;
        Ok(VComplex { ring, r1, r2, phi })
    }

    pub fn ring(&self) -> &FgRing {
        &self.ring
    }

    pub fn r1(&self) -> usize {
        self.r1
    }

    pub fn r2(&self) -> usize {
        self.r2
    }

    pub fn phi(&self) -> &PolyMatrix {
        &self.phi
    }

    pub fn rank(&self) -> i64 {
        self.r2 as i64 - self.r1 as i64
    }

    /// Base change along a ring morphism whose source is this complex's ring.
    pub fn pullback(&self, along: &RingMor) -> Result<VComplex> {
        if along.source() != &self.ring {
            return Err(Error::Endpoint("pullback along a morphism from a different ring".into()));
        }
        let phi = along.apply_matrix(&self.phi)?;
        Ok(VComplex { ring: along.target().clone(), r1: self.r1, r2: self.r2, phi })
    }

    pub fn orientation_line(&self) -> OrientationLine {
        OrientationLine { dual_rank: self.r1, rank: self.r2 }
    }
}

/// The line `Λ^{dual_rank}(E1)* ⊗ Λ^{rank}(E2)`. For trivialized free modules it
/// has a canonical basis element, so an orientation is a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientationLine {
    pub dual_rank: usize,
    pub rank: usize,
}

impl OrientationLine {
    /// The line of the complex with `E1` and `E2` exchanged.
    pub fn swapped(self) -> Self {
        OrientationLine { dual_rank: self.rank, rank: self.dual_rank }
    }
}

impl fmt::Display for OrientationLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.dual_rank, self.rank) {
            (0, r) => write!(f, "Λ^{r}(E2)"),
            (d, 0) => write!(f, "Λ^{d}(E1)*"),
            (d, r) => write!(f, "Λ^{d}(E1)* ⊗ Λ^{r}(E2)"),
        }
    }
}

pub fn orientation_line(c: &VComplex) -> OrientationLine {
    c.orientation_line()
}

/// A chain map `(f1, f2)` with `psi * f1 = f2 * phi` in the ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VMor {
    source: VComplex,
    target: VComplex,
    f1: PolyMatrix,
    f2: PolyMatrix,
}

impl VMor {
    pub fn new(source: VComplex, target: VComplex, f1: PolyMatrix, f2: PolyMatrix) -> Result<Self> {
        if source.ring != target.ring {
            return Err(Error::Endpoint("complexes over different rings".into()));
        }
        let ring = &source.ring;
        check_nvars(ring.nvars(), f1.nvars())?;
        check_nvars(ring.nvars(), f2.nvars())?;
        if f1.shape() != (target.r1, source.r1) || f2.shape() != (target.r2, source.r2) {
            return Err(Error::Shape(format!(
                "chain map blocks {:?}, {:?} do not fit ranks ({}, {}) -> ({}, {})",
                f1.shape(),
                f2.shape(),
                source.r1,
                source.r2,
                target.r1,
                target.r2
            )));
        }
        let f1 = ring.reduce_matrix(&f1)?;
        let f2 = ring.reduce_matrix(&f2)?;
        let lhs = target.phi.mul(&f1)?;
        let rhs = f2.mul(&source.phi)?;
        if !lhs.sub(&rhs)?.in_ideal(ring.ideal())? {
            return Err(Error::Invalid("chain map identity psi*f1 = f2*phi fails".into()));
        }
        Ok(VMor { source, target, f1, f2 })
    }

    pub fn identity(c: &VComplex) -> Self {
        let n = c.ring.nvars();
        VMor {
            source: c.clone(),
            target: c.clone(),
            f1: PolyMatrix::identity(n, c.r1),
            f2: PolyMatrix::identity(n, c.r2),
        }
    }

    pub fn source(&self) -> &VComplex {
        &self.source
    }

    pub fn target(&self) -> &VComplex {
        &self.target
    }

    pub fn f1(&self) -> &PolyMatrix {
        &self.f1
    }

    pub fn f2(&self) -> &PolyMatrix {
        &self.f2
    }

    pub fn pullback(&self, along: &RingMor) -> Result<VMor> {
        VMor::new(
            self.source.pullback(along)?,
            self.target.pullback(along)?,
            along.apply_matrix(&self.f1)?,
            along.apply_matrix(&self.f2)?,
        )
    }
}

/// `g ∘ f`.
pub fn compose_vmor(g: &VMor, f: &VMor) -> Result<VMor> {
    if f.target != g.source {
        return Err(Error::Endpoint("target of f is not the source of g".into()));
    }
    let ring = &f.source.ring;
    Ok(VMor {
        source: f.source.clone(),
        target: g.target.clone(),
        f1: ring.reduce_matrix(&g.f1.mul(&f.f1)?)?,
        f2: ring.reduce_matrix(&g.f2.mul(&f.f2)?)?,
    })
}

/// A homotopy `eta: E2 -> F1` from `from` to `to`:
/// `to.f1 = from.f1 + eta*phi` and `to.f2 = from.f2 + psi*eta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VTwoMor {
    from: VMor,
    to: VMor,
    eta: PolyMatrix,
}

impl VTwoMor {
    pub fn new(from: VMor, to: VMor, eta: PolyMatrix) -> Result<Self> {
        if from.source != to.source || from.target != to.target {
            return Err(Error::Endpoint("2-morphism between 1-morphisms with different endpoints".into()));
        }
        let (src, tgt) = (&from.source, &from.target);
        check_nvars(src.ring.nvars(), eta.nvars())?;
        if eta.shape() != (tgt.r1, src.r2) {
            return Err(Error::Shape(format!("eta is {:?}, expected ({}, {})", eta.shape(), tgt.r1, src.r2)));
        }
        let ideal = src.ring.ideal();
        let eta = src.ring.reduce_matrix(&eta)?;
        let d1 = to.f1.sub(&from.f1.add(&eta.mul(&src.phi)?)?)?;
        let d2 = to.f2.sub(&from.f2.add(&tgt.phi.mul(&eta)?)?)?;
        if !d1.in_ideal(ideal)? || !d2.in_ideal(ideal)? {
            return Err(Error::Invalid("homotopy identities fail".into()));
        }
        Ok(VTwoMor { from, to, eta })
    }

    /// The identity 2-morphism, with zero homotopy.
    pub fn identity(f: &VMor) -> Self {
        let eta = PolyMatrix::zeros(f.source.ring.nvars(), f.target.r1, f.source.r2);
        VTwoMor { from: f.clone(), to: f.clone(), eta }
    }

    pub fn from(&self) -> &VMor {
        &self.from
    }

    pub fn to(&self) -> &VMor {
        &self.to
    }

    pub fn eta(&self) -> &PolyMatrix {
        &self.eta
    }
}

/// Vertical composite `zeta ⊙ eta` for `eta: f => g`, `zeta: g => h`.
pub fn vcompose(zeta: &VTwoMor, eta: &VTwoMor) -> Result<VTwoMor> {
    if eta.to != zeta.from {
        return Err(Error::Endpoint("vertical composition needs eta.to == zeta.from".into()));
    }
    let ring = &eta.from.source.ring;
    Ok(VTwoMor {
        from: eta.from.clone(),
        to: zeta.to.clone(),
        eta: ring.reduce_matrix(&zeta.eta.add(&eta.eta)?)?,
    })
}

/// Horizontal composite `zeta * eta` for `eta: f => f~` (E -> F) and
/// `zeta: g => g~` (F -> G); a 2-morphism `g∘f => g~∘f~` with homotopy
/// `g1*eta + zeta*f2 + zeta*psi*eta`.
pub fn hcompose(zeta: &VTwoMor, eta: &VTwoMor) -> Result<VTwoMor> {
    if eta.from.target != zeta.from.source {
        return Err(Error::Endpoint("horizontal composition needs matching middle complex".into()));
    }
    let psi = &eta.from.target.phi;
    let g1 = &zeta.from.f1;
    let f2 = &eta.from.f2;
    let h = g1.mul(&eta.eta)?.add(&zeta.eta.mul(f2)?)?.add(&zeta.eta.mul(psi)?.mul(&eta.eta)?)?;
    VTwoMor::new(compose_vmor(&zeta.from, &eta.from)?, compose_vmor(&zeta.to, &eta.to)?, h)
}

/// Pointwise classification flags of a chain map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorClass {
    pub weakly_injective: bool,
    pub injective: bool,
    pub weakly_surjective: bool,
    pub surjective: bool,
    pub equivalence: bool,
}

impl MorClass {
    pub const ALL: MorClass = MorClass {
        weakly_injective: true,
        injective: true,
        weakly_surjective: true,
        surjective: true,
        equivalence: true,
    };

    /// Verdicts over a field from the ranks of `M = [f1; -phi]: E1 -> F1 ⊕ E2`
    /// and `N = [psi | f2]: F1 ⊕ E2 -> F2`, where `e1 = dim E1`,
    /// `middle = dim F1 + dim E2` and `f2 = dim F2`.
    ///
    /// The chain identity gives `N M = 0`. A left inverse `gamma` of `M` exists
    /// iff `M` is injective; a right inverse `delta` of `N` iff `N` is onto.
    /// `M gamma + delta N = 1` forces `ker N = im M`, and conversely an exact
    /// middle lets `delta` invert `N` on a complement `K` of `im M` with `gamma`
    /// vanishing on `K`, so injectivity is the count `rank M + rank N = middle`.
    /// For surjectivity, `gamma delta = 0` is met by taking `gamma` to vanish on
    /// such a `K`, which `N` still maps onto `F2`, so it adds nothing.
    pub fn from_ranks(e1: usize, middle: usize, f2: usize, rank_m: usize, rank_n: usize) -> MorClass {
        let weakly_injective = rank_m == e1;
        let weakly_surjective = rank_n == f2;
        let exact = rank_m + rank_n == middle;
        let injective = weakly_injective && exact;
        let surjective = weakly_injective && weakly_surjective;
        MorClass {
            weakly_injective,
            injective,
            weakly_surjective,
            surjective,
            equivalence: injective && surjective,
        }
    }

    pub fn is_consistent(&self) -> bool {
        (!self.equivalence || (self.injective && self.surjective))
            && (!self.injective || self.weakly_injective)
            && (!self.surjective || (self.weakly_injective && self.weakly_surjective))
    }
}

/// Classification at one point, with a flag for points off the zero locus of
/// the ring's ideal, where the verdict carries no meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointClass {
    pub class: MorClass,
    pub on_zero_locus: bool,
    pub rank_m: usize,
    pub rank_n: usize,
}

/// The stacked matrices `M = [f1; -phi]` and `N = [psi | f2]` of a chain map.
pub fn classification_matrices(m: &VMor) -> Result<(PolyMatrix, PolyMatrix)> {
    let big_m = m.f1.vstack(&m.source.phi.neg())?;
    let big_n = m.target.phi.hstack(&m.f2)?;
    Ok((big_m, big_n))
}

pub fn classify_at(m: &VMor, pt: &WitnessPoint) -> Result<PointClass> {
    let ring = &m.source.ring;
    check_nvars(ring.nvars(), pt.len())?;
    let on_zero_locus = pt.nonvanishing(ring.ideal().generators())?.is_empty();
    let (big_m, big_n) = classification_matrices(m)?;
    let rank_m = pt.rank(&big_m)?;
    let rank_n = pt.rank(&big_n)?;
    let class =
        MorClass::from_ranks(m.source.r1, m.target.r1 + m.source.r2, m.target.r2, rank_m, rank_n);
    Ok(PointClass { class, on_zero_locus, rank_m, rank_n })
}

/// Rank classification of a chain map between complexes of `GF(p)`-vector spaces.
///
/// `dims = [e1, e2, f1, f2]`; matrices are row-major, `phi: e2 x e1`,
/// `psi: f2 x f1`, `f1: f1 x e1`, `f2: f2 x e2`, with entries in `0..p`.
/// Uses the same `M`, `N` layout as [`classification_matrices`].
pub fn classify_mod_p(dims: [usize; 4], phi: &[u32], psi: &[u32], f1: &[u32], f2: &[u32], p: u32) -> MorClass {
    let [e1, e2, d1, d2] = dims;
    let field = crate::linalg::PrimeField::new(p);
    let big_m: Vec<Vec<u32>> = (0..d1)
        .map(|i| f1[i * e1..(i + 1) * e1].to_vec())
        .chain((0..e2).map(|i| phi[i * e1..(i + 1) * e1].iter().map(|&v| field.neg(v)).collect()))
        .collect();
    let big_n: Vec<Vec<u32>> = (0..d2)
        .map(|i| psi[i * d1..(i + 1) * d1].iter().chain(&f2[i * e2..(i + 1) * e2]).copied().collect())
        .collect();
    let rank_m = crate::linalg::rank(&field, &big_m);
    let rank_n = crate::linalg::rank(&field, &big_n);
    MorClass::from_ranks(e1, d1 + e2, d2, rank_m, rank_n)
}

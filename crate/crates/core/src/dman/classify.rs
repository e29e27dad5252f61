use std::sync::Arc;

use super::model::StdModel;
use super::morphism::StdMor;
use crate::error::{Error, Result};
use crate::poly::{jacobian, Poly, PolyMatrix};
use crate::vvect::{classify_at, MorClass, VComplex, VMor};
use crate::witness::WitnessPoint;

/// `T*X` as the complex `E* -> T*V`, `phi = (ds)^T` reduced modulo `I_s`.
pub fn cotangent_complex(x: &StdModel) -> Result<VComplex> {
    let phi = jacobian(x.section(), x.n())?.transpose();
    VComplex::new(x.ring().clone(), x.k(), x.n(), phi)
}

/// The pullback of the target's cotangent complex along `f`, over the source ring.
fn pulled_back_cotangent(m: &StdMor) -> Result<VComplex> {
    let phi = m.dt_along()?.transpose();
    VComplex::new(m.source().ring().clone(), m.target().k(), m.target().n(), phi)
}

/// `Omega_f: f^*(T*Y) -> T*X` with blocks `fhat^T` and `(Df)^T`.
pub fn omega(m: &StdMor) -> Result<VMor> {
    VMor::new(pulled_back_cotangent(m)?, cotangent_complex(m.source())?, m.fhat().transpose(), m.df()?.transpose())
}

/// Pointwise étale test and its cross-check against the cotangent classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtaleVerdict {
    pub etale: bool,
    pub rank_m: usize,
    pub rank_n: usize,
}

/// Ranks of `M = [ds(v); df(v)]` and `N = [fhat(v) | -dt(f(v))]` for raw chart data,
/// which need not satisfy the section-compatibility congruence.
pub fn exactness_at(
    source: &StdModel,
    target: &StdModel,
    map: &[Poly],
    fhat: &PolyMatrix,
    pt: &WitnessPoint,
) -> Result<EtaleVerdict> {
    if map.len() != target.n() || fhat.shape() != (target.k(), source.k()) {
        return Err(Error::Shape("map or bundle map does not match the charts".into()));
    }
    let df = jacobian(map, source.n())?;
    let dt = jacobian(target.section(), target.n())?.compose(map, source.n())?;
    let big_m = jacobian(source.section(), source.n())?.vstack(&df)?;
    let big_n = fhat.hstack(&dt.neg())?;
    source.check_witness(pt)?;
    let rank_m = pt.rank(&big_m)?;
    let rank_n = pt.rank(&big_n)?;
    let etale = rank_m == source.n() && rank_n == target.k() && rank_m + rank_n == source.k() + target.n();
    Ok(EtaleVerdict { etale, rank_m, rank_n })
}

/// At each source witness `v` with `w = f(v)`, test exactness of
/// `0 -> T_v V -> E_v ⊕ T_w W -> F_w -> 0` via [`exactness_at`], cross-checked
/// against equivalence of the cotangent map.
pub fn etale_at(m: &StdMor, pts: &[WitnessPoint]) -> Result<Vec<EtaleVerdict>> {
    let om = omega(m)?;
    let mut out = Vec::with_capacity(pts.len());
    for (i, pt) in pts.iter().enumerate() {
        let v = exactness_at(m.source(), m.target(), m.map(), m.fhat(), pt)?;
        let via_omega = classify_at(&om, pt)?.class.equivalence;
        if v.etale != via_omega {
            return Err(Error::Inconsistent(format!(
                "witness {i}: exactness test says {}, cotangent equivalence says {via_omega}",
                v.etale
            )));
        }
        out.push(v);
    }
    Ok(out)
}

/// Classification of a morphism at one witness, in the language of maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorKinds {
    pub w_submersion: bool,
    pub submersion: bool,
    pub w_immersion: bool,
    pub immersion: bool,
    pub etale: bool,
    /// w-immersion plus injectivity of `f` on the supplied witness set only.
    pub w_embedding_on_witnesses: bool,
    pub embedding_on_witnesses: bool,
}

impl MorKinds {
    fn new(c: MorClass, injective_on_witnesses: bool) -> Self {
        MorKinds {
            w_submersion: c.weakly_injective,
            submersion: c.injective,
            w_immersion: c.weakly_surjective,
            immersion: c.surjective,
            etale: c.equivalence,
            w_embedding_on_witnesses: c.weakly_surjective && injective_on_witnesses,
            embedding_on_witnesses: c.surjective && injective_on_witnesses,
        }
    }
}

fn images_distinct(a: &WitnessPoint, b: &WitnessPoint) -> bool {
    use crate::witness::Coords;
    match (a.coords(), b.coords()) {
        (Coords::Exact(x), Coords::Exact(y)) => x != y,
        _ => {
            let tol = a.tolerance().max(b.tolerance()).max(a.pivot()).max(b.pivot());
            a.to_f64().iter().zip(b.to_f64()).any(|(u, v)| (u - v).abs() > tol)
        }
    }
}

fn same_point(a: &WitnessPoint, b: &WitnessPoint) -> bool {
    !images_distinct(a, b)
}

pub fn classify_mor_at(m: &StdMor, pts: &[WitnessPoint]) -> Result<Vec<MorKinds>> {
    let om = omega(m)?;
    let images = pts.iter().map(|p| p.image(m.map())).collect::<Result<Vec<_>>>()?;
    let mut injective = true;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if !same_point(&pts[i], &pts[j]) && same_point(&images[i], &images[j]) {
                injective = false;
            }
        }
    }
    pts.iter()
        .map(|pt| {
            m.source().check_witness(pt)?;
            Ok(MorKinds::new(classify_at(&om, pt)?.class, injective))
        })
        .collect()
}

/// `X -> S_{V,0,0}` given by the identity of `V` and the zero bundle map.
pub fn standard_embedding(x: &Arc<StdModel>) -> Result<StdMor> {
    let v = StdModel::new(x.n(), 0, Vec::new(), x.domain().to_vec(), 1)?;
    StdMor::new(x.clone(), Arc::new(v), Poly::vars(x.n()), PolyMatrix::zeros(x.n(), 0, x.k()))
}

/// `ds(v)` has full row rank `k`, so `T*X` is a vector bundle near `v`.
pub fn is_manifold_at(x: &StdModel, pt: &WitnessPoint) -> Result<bool> {
    x.check_witness(pt)?;
    Ok(pt.rank(&jacobian(x.section(), x.n())?)? == x.k())
}

use std::sync::Arc;

use super::model::StdModel;
use super::{Condition, Residual, Validated};
use crate::cinf_ring::RingMor;
use crate::error::{check_nvars, Error, Result};
use crate::poly::{jacobian, Ideal, Poly, PolyMatrix};
use crate::witness::WitnessPoint;

/// A 1-morphism `(f, fhat): S_{V,E,s} -> S_{W,F,t}` with `fhat * s = t(f) + O(s^2)`.
///
/// `f` has `m = target.n()` components in the source variables and `fhat` is
/// `l x k` with `l = target.k()`, `k = source.k()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StdMor {
    source: Arc<StdModel>,
    target: Arc<StdModel>,
    f: Vec<Poly>,
    fhat: PolyMatrix,
}

fn residuals(condition: Condition, m: &PolyMatrix, ideal: &Ideal) -> Result<Vec<Residual>> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let nf = ideal.normal_form(m.get(i, j))?;
            if !nf.is_zero() {
                out.push(Residual { condition, row: i, col: j, normal_form: nf });
            }
        }
    }
    Ok(out)
}

/// `Dt` composed with `f`: the `l x m` Jacobian of the target section along `f`.
fn target_jacobian_along(target: &StdModel, f: &[Poly], n: usize) -> Result<PolyMatrix> {
    jacobian(target.section(), target.n())?.compose(f, n)
}

fn check_shapes(source: &StdModel, target: &StdModel, f: &[Poly], fhat: &PolyMatrix) -> Result<()> {
    if f.len() != target.n() {
        return Err(Error::Shape(format!("map has {} components, target dimension is {}", f.len(), target.n())));
    }
    for p in f {
        check_nvars(source.n(), p.nvars())?;
    }
    check_nvars(source.n(), fhat.nvars())?;
    if fhat.shape() != (target.k(), source.k()) {
        return Err(Error::Shape(format!(
            "fhat is {:?}, expected ({}, {})",
            fhat.shape(),
            target.k(),
            source.k()
        )));
    }
    Ok(())
}

/// Validate `fhat * s - t(f)` modulo the square of the source ideal.
pub fn validate_mor(
    source: Arc<StdModel>,
    target: Arc<StdModel>,
    f: Vec<Poly>,
    fhat: PolyMatrix,
) -> Result<Validated<StdMor>> {
    check_shapes(&source, &target, &f, &fhat)?;
    let n = source.n();
    let s = PolyMatrix::column(n, source.section().to_vec())?;
    let t_of_f = target.section().iter().map(|t| t.compose_into(&f, n)).collect::<Result<Vec<_>>>()?;
    let diff = fhat.mul(&s)?.sub(&PolyMatrix::column(n, t_of_f)?)?;
    let bad = residuals(Condition::SectionCompatibility, &diff, source.ideal_sq())?;
    if !bad.is_empty() {
        return Ok(Validated::Invalid(bad));
    }
    Ok(Validated::Valid(StdMor { source, target, f, fhat }))
}

impl StdMor {
    pub fn new(source: Arc<StdModel>, target: Arc<StdModel>, f: Vec<Poly>, fhat: PolyMatrix) -> Result<Self> {
        validate_mor(source, target, f, fhat)?.into_result()
    }

    pub fn identity(model: Arc<StdModel>) -> Self {
        let (n, k) = (model.n(), model.k());
        StdMor { f: Poly::vars(n), fhat: PolyMatrix::identity(n, k), source: model.clone(), target: model }
    }

    pub fn source(&self) -> &Arc<StdModel> {
        &self.source
    }

    pub fn target(&self) -> &Arc<StdModel> {
        &self.target
    }

    pub fn map(&self) -> &[Poly] {
        &self.f
    }

    pub fn fhat(&self) -> &PolyMatrix {
        &self.fhat
    }

    /// The `m x n` Jacobian of `f`.
    pub fn df(&self) -> Result<PolyMatrix> {
        jacobian(&self.f, self.source.n())
    }

    /// `Dt` along `f`, an `l x m` matrix in the source variables.
    pub fn dt_along(&self) -> Result<PolyMatrix> {
        target_jacobian_along(&self.target, &self.f, self.source.n())
    }

    /// The induced morphism of coordinate rings `Q[y]/I_t -> Q[x]/I_s`.
    pub fn ring_mor(&self) -> Result<RingMor> {
        RingMor::new(self.target.ring().clone(), self.source.ring().clone(), self.f.clone())
    }

    /// Witnesses whose image misses the target domain.
    pub fn domain_violations(&self, pts: &[WitnessPoint]) -> Result<Vec<usize>> {
        let mut bad = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            if !self.target.in_domain(&p.image(&self.f)?)? {
                bad.push(i);
            }
        }
        Ok(bad)
    }
}

fn same_endpoints(a: &StdMor, b: &StdMor) -> Result<()> {
    if a.source != b.source || a.target != b.target {
        return Err(Error::Endpoint("morphisms have different source or target".into()));
    }
    Ok(())
}

/// Equality of 1-morphisms: `g = f + O(s^2)` and `ghat = fhat + O(s)`.
pub fn mor_equal(a: &StdMor, b: &StdMor) -> Result<bool> {
    same_endpoints(a, b)?;
    let n = a.source.n();
    let df = PolyMatrix::column(n, a.f.clone())?.sub(&PolyMatrix::column(n, b.f.clone())?)?;
    Ok(df.in_ideal(a.source.ideal_sq())? && a.fhat.sub(&b.fhat)?.in_ideal(a.source.ideal())?)
}

/// `g ∘ f = (g(f), ghat(f) * fhat)`, with the map reduced modulo `I_s^2` and
/// the bundle part modulo `I_s`, then re-validated.
pub fn compose_mor(g: &StdMor, f: &StdMor) -> Result<StdMor> {
    if f.target != g.source {
        return Err(Error::Endpoint("target of f is not the source of g".into()));
    }
    let src = &f.source;
    let n = src.n();
    let map = g
        .f
        .iter()
        .map(|p| src.ideal_sq().normal_form(&p.compose_into(&f.f, n)?))
        .collect::<Result<Vec<_>>>()?;
    let fhat = g.fhat.compose(&f.f, n)?.mul(&f.fhat)?.reduce(src.ideal())?;
    StdMor::new(src.clone(), g.target.clone(), map, fhat)
}

/// A 2-morphism `Lambda: f => g`, `Lambda` of shape `m x k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StdTwoMor {
    from: StdMor,
    to: StdMor,
    lambda: PolyMatrix,
}

pub fn validate_2mor(from: &StdMor, to: &StdMor, lambda: PolyMatrix) -> Result<Validated<StdTwoMor>> {
    same_endpoints(from, to)?;
    let (src, tgt) = (&from.source, &from.target);
    let n = src.n();
    check_nvars(n, lambda.nvars())?;
    if lambda.shape() != (tgt.n(), src.k()) {
        return Err(Error::Shape(format!("Lambda is {:?}, expected ({}, {})", lambda.shape(), tgt.n(), src.k())));
    }
    let s = PolyMatrix::column(n, src.section().to_vec())?;
    let f = PolyMatrix::column(n, from.f.clone())?;
    let g = PolyMatrix::column(n, to.f.clone())?;
    let map_diff = g.sub(&f)?.sub(&lambda.mul(&s)?)?;
    let bundle_diff = to.fhat.sub(&from.fhat)?.sub(&from.dt_along()?.mul(&lambda)?)?;
    let mut bad = residuals(Condition::TwoMorMap, &map_diff, src.ideal_sq())?;
    bad.extend(residuals(Condition::TwoMorBundle, &bundle_diff, src.ideal())?);
    if !bad.is_empty() {
        return Ok(Validated::Invalid(bad));
    }
    Ok(Validated::Valid(StdTwoMor { from: from.clone(), to: to.clone(), lambda }))
}

impl StdTwoMor {
    pub fn new(from: &StdMor, to: &StdMor, lambda: PolyMatrix) -> Result<Self> {
        validate_2mor(from, to, lambda)?.into_result()
    }

    pub fn identity(f: &StdMor) -> Self {
        let lambda = PolyMatrix::zeros(f.source.n(), f.target.n(), f.source.k());
        StdTwoMor { from: f.clone(), to: f.clone(), lambda }
    }

    pub fn from(&self) -> &StdMor {
        &self.from
    }

    pub fn to(&self) -> &StdMor {
        &self.to
    }

    pub fn lambda(&self) -> &PolyMatrix {
        &self.lambda
    }
}

/// Equality of 2-morphisms with equal endpoints: `Lambda = Lambda' + O(s)`.
pub fn two_mor_equal(a: &StdTwoMor, b: &StdTwoMor) -> Result<bool> {
    same_endpoints(&a.from, &b.from)?;
    if !mor_equal(&a.from, &b.from)? || !mor_equal(&a.to, &b.to)? {
        return Err(Error::Endpoint("2-morphisms between different 1-morphisms".into()));
    }
    a.lambda.sub(&b.lambda)?.in_ideal(a.from.source.ideal())
}

/// `zeta ⊙ eta` for `eta: f => g` and `zeta: g => h`.
pub fn vcompose_2mor(zeta: &StdTwoMor, eta: &StdTwoMor) -> Result<StdTwoMor> {
    same_endpoints(&eta.to, &zeta.from)?;
    if !mor_equal(&eta.to, &zeta.from)? {
        return Err(Error::Endpoint("vertical composition needs eta.to == zeta.from".into()));
    }
    let lambda = zeta.lambda.add(&eta.lambda)?.reduce(eta.from.source.ideal())?;
    StdTwoMor::new(&eta.from, &zeta.to, lambda)
}

/// `zeta * eta` for `eta: f => f~` (X -> Y) and `zeta: g => g~` (Y -> Z), a
/// 2-morphism `g∘f => g~∘f~` with
/// `Lambda = Dg(f) Λη + Λζ(f) fhat + Λζ(f) Dt(f) Λη`.
pub fn hcompose_2mor(zeta: &StdTwoMor, eta: &StdTwoMor) -> Result<StdTwoMor> {
    if eta.from.target != zeta.from.source {
        return Err(Error::Endpoint("horizontal composition needs a common middle model".into()));
    }
    let f = &eta.from;
    let n = f.source.n();
    let dg_f = jacobian(&zeta.from.f, f.target.n())?.compose(&f.f, n)?;
    let lz_f = zeta.lambda.compose(&f.f, n)?;
    let lambda = dg_f
        .mul(&eta.lambda)?
        .add(&lz_f.mul(&f.fhat)?)?
        .add(&lz_f.mul(&f.dt_along()?)?.mul(&eta.lambda)?)?
        .reduce(f.source.ideal())?;
    StdTwoMor::new(&compose_mor(&zeta.from, f)?, &compose_mor(&zeta.to, &eta.to)?, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dman::make_std_model;
    use crate::poly::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s, &["x"]).unwrap()
    }

    fn model(s: &str) -> Arc<StdModel> {
        Arc::new(make_std_model(1, 1, vec![p(s)], vec![], 1).unwrap())
    }

    fn m1(s: &str) -> PolyMatrix {
        PolyMatrix::from_rows(1, vec![vec![p(s)]]).unwrap()
    }

    #[test]
    fn validity_examples() {
        let (x2, mx2) = (model("x^2"), model("-x^2"));
        assert!(validate_mor(x2.clone(), mx2, vec![p("x")], m1("-1")).unwrap().is_valid());
        let (x, sq) = (model("x"), model("x^2"));
        assert!(validate_mor(x.clone(), sq.clone(), vec![p("x^2")], m1("x^3")).unwrap().is_valid());
        assert!(validate_mor(x.clone(), sq.clone(), vec![p("x^2")], m1("x")).unwrap().is_valid());
        let bad = validate_mor(x.clone(), sq, vec![p("x^2")], m1("1")).unwrap();
        assert_eq!(bad.residuals().len(), 1);
        assert_eq!(bad.residuals()[0].normal_form, p("x"));
        assert!(StdMor::identity(x2).fhat().shape() == (1, 1));
    }

    #[test]
    fn equality_examples() {
        let x = model("x");
        let id = StdMor::identity(x.clone());
        assert!(mor_equal(&id, &id).unwrap());
        let moved = StdMor::new(x.clone(), x.clone(), vec![p("x + x^2")], m1("1 + x")).unwrap();
        assert!(mor_equal(&id, &moved).unwrap());
        let shifted = StdMor::new(x.clone(), x.clone(), vec![p("x")], m1("2")).unwrap_err();
        assert!(matches!(shifted, Error::Invalid(_)));
        // fhat + 1 versus fhat, on a model where that stays valid.
        let zero = Arc::new(make_std_model(1, 1, vec![Poly::zero(1)], vec![], 1).unwrap());
        let a = StdMor::new(zero.clone(), zero.clone(), vec![p("x")], m1("1")).unwrap();
        let b = StdMor::new(zero.clone(), zero, vec![p("x")], m1("2")).unwrap();
        assert!(!mor_equal(&a, &b).unwrap());
    }

    #[test]
    fn composition() {
        let (x, sq) = (model("x"), model("x^2"));
        let f = StdMor::new(x.clone(), sq.clone(), vec![p("x^2")], m1("x^3")).unwrap();
        let composed = compose_mor(&StdMor::identity(sq), &f).unwrap();
        assert!(mor_equal(&composed, &f).unwrap());
        assert!(mor_equal(&compose_mor(&f, &StdMor::identity(x)).unwrap(), &f).unwrap());
    }

    #[test]
    fn two_morphism_examples() {
        let x = model("x");
        let f = StdMor::identity(x.clone());
        assert!(validate_2mor(&f, &f, m1("0")).unwrap().is_valid());
        // g = x + x*1, ghat = fhat + Dt(f)*Lambda = 1 + 1.
        let g = StdMor::new(x.clone(), x.clone(), vec![p("2*x")], m1("2")).unwrap();
        let lam = StdTwoMor::new(&f, &g, m1("1")).unwrap();
        let lam2 = StdTwoMor::new(&f, &g, m1("1 + 5*x")).unwrap();
        assert!(two_mor_equal(&lam, &lam2).unwrap());
        assert!(validate_2mor(&f, &g, m1("0")).unwrap().residuals().len() == 2);

        let back = StdTwoMor::new(&g, &f, m1("-1")).unwrap();
        assert!(two_mor_equal(&vcompose_2mor(&back, &lam).unwrap(), &StdTwoMor::identity(&f)).unwrap());
        let zero = hcompose_2mor(&StdTwoMor::identity(&f), &StdTwoMor::identity(&f)).unwrap();
        assert!(zero.lambda().is_zero());
    }
}

//! Fibre products of standard models over `R^p`.
//!
//! `W = X x_{g,R^p,h} Y` is the model on `V_X x V_Y` (coordinates `x` then `y`)
//! with obstruction bundle `E_X ⊕ E_Y ⊕ R^p` and section `(s(x), t(y), g(x) - h(y))`.

use std::sync::Arc;

use crate::dman::{compose_mor, StdModel, StdMor, StdTwoMor};
use crate::error::{check_nvars, Error, Result};
use crate::linalg::{det_exact, sign};
use crate::poly::{jacobian, Poly, PolyMatrix};
use crate::witness::WitnessPoint;

#[derive(Debug, Clone)]
pub struct FibreData {
    pub x: Arc<StdModel>,
    pub y: Arc<StdModel>,
    pub p: usize,
    pub g: Vec<Poly>,
    pub h: Vec<Poly>,
    pub z: Arc<StdModel>,
    pub w: Arc<StdModel>,
    /// Projection `W -> X`.
    pub e: StdMor,
    /// Projection `W -> Y`.
    pub f: StdMor,
    /// `g∘e => h∘f`.
    pub eta: StdTwoMor,
}

impl FibreData {
    pub fn vdim(&self) -> i64 {
        self.w.vdim()
    }

    pub fn g_mor(&self) -> Result<StdMor> {
        map_to_manifold(&self.x, &self.z, &self.g)
    }

    pub fn h_mor(&self) -> Result<StdMor> {
        map_to_manifold(&self.y, &self.z, &self.h)
    }
}

/// The morphism `X -> S_{R^p,0,0}` given by `g`.
pub fn map_to_manifold(x: &Arc<StdModel>, z: &Arc<StdModel>, g: &[Poly]) -> Result<StdMor> {
    StdMor::new(x.clone(), z.clone(), g.to_vec(), PolyMatrix::zeros(x.n(), 0, x.k()))
}

/// Orientation sign of `X x_{R^p} Y` for models with data `(n, k)`.
///
/// The convention orders base factors `(V_X, V_Y)` and obstruction factors
/// `(E_X, E_Y, R^p)`, with parity factor `(-1)^{(n_X + k_X)(k_Y + p)}`, i.e.
/// `(-1)^{vdim X (rank E_Y + p)}`. Products of manifolds get the product sign.
pub fn orient_fibre_product(orient_x: i32, orient_y: i32, x: (usize, usize), y: (usize, usize), p: usize) -> i32 {
    let parity = ((x.0 + x.1) * (y.1 + p)) % 2;
    let sigma = if parity == 0 { 1 } else { -1 };
    orient_x * orient_y * sigma
}

pub fn fibre_product(x: Arc<StdModel>, g: Vec<Poly>, y: Arc<StdModel>, h: Vec<Poly>, p: usize) -> Result<FibreData> {
    if g.len() != p || h.len() != p {
        return Err(Error::Shape(format!("maps to R^{p} have {} and {} components", g.len(), h.len())));
    }
    for q in &g {
        check_nvars(x.n(), q.nvars())?;
    }
    for q in &h {
        check_nvars(y.n(), q.nvars())?;
    }
    let (nx, ny, kx, ky) = (x.n(), y.n(), x.k(), y.k());
    let nw = nx + ny;
    let kw = kx + ky + p;

    let mut section: Vec<Poly> = x.section().iter().map(|s| s.embed(nw, 0)).collect();
    section.extend(y.section().iter().map(|t| t.embed(nw, nx)));
    section.extend(g.iter().zip(&h).map(|(a, b)| a.embed(nw, 0) - b.embed(nw, nx)));
    let mut domain: Vec<Poly> = x.domain().iter().map(|d| d.embed(nw, 0)).collect();
    domain.extend(y.domain().iter().map(|d| d.embed(nw, nx)));
    let orient = orient_fibre_product(x.orient(), y.orient(), (nx, kx), (ny, ky), p);
    let limits = x.ideal().limits();
    let w = Arc::new(StdModel::with_limits(nw, kw, section, domain, orient, limits)?);

    let vars = Poly::vars(nw);
    let one = Poly::one(nw);
    let ehat = PolyMatrix::from_fn(nw, kx, kw, |i, j| if i == j { one.clone() } else { Poly::zero(nw) });
    let fhat = PolyMatrix::from_fn(nw, ky, kw, |i, j| if kx + i == j { one.clone() } else { Poly::zero(nw) });
    let e = StdMor::new(w.clone(), x.clone(), vars[..nx].to_vec(), ehat)
        .map_err(|err| Error::Invalid(format!("projection to X: {err}")))?;
    let f = StdMor::new(w.clone(), y.clone(), vars[nx..].to_vec(), fhat)
        .map_err(|err| Error::Invalid(format!("projection to Y: {err}")))?;

    let z = Arc::new(StdModel::manifold(p));
    let ge = compose_mor(&map_to_manifold(&x, &z, &g)?, &e)?;
    let hf = compose_mor(&map_to_manifold(&y, &z, &h)?, &f)?;
    // h(y) - g(x) = Lambda * (s, t, g - h) with Lambda = [0 | 0 | -I].
    let lambda = PolyMatrix::from_fn(nw, p, kw, |i, j| if kx + ky + i == j { -&one } else { Poly::zero(nw) });
    let eta = StdTwoMor::new(&ge, &hf, lambda).map_err(|err| Error::Invalid(format!("fibre 2-morphism: {err}")))?;

    Ok(FibreData { x, y, p, g, h, z, w, e, f, eta })
}

/// Signed block permutation: output block `j` is input block `order[j]` times `signs[j]`.
pub fn block_permutation(nvars: usize, sizes: &[usize], order: &[usize], signs: &[i32]) -> PolyMatrix {
    let starts: Vec<usize> = sizes.iter().scan(0, |acc, &s| {
        let start = *acc;
        *acc += s;
        Some(start)
    }).collect();
    let total: usize = sizes.iter().sum();
    let mut entries = vec![vec![Poly::zero(nvars); total]; total];
    let mut row = 0;
    for (&b, &sg) in order.iter().zip(signs) {
        for i in 0..sizes[b] {
            entries[row][starts[b] + i] = Poly::int(nvars, sg as i64);
            row += 1;
        }
    }
    PolyMatrix::from_rows(nvars, entries).expect("square block permutation")
}

/// The identification `X x_Z Y -> Y x_Z X` swapping coordinates and obstruction blocks.
pub fn swap_identification(xy: &FibreData, yx: &FibreData) -> Result<StdMor> {
    let (nx, ny) = (xy.x.n(), xy.y.n());
    let nw = nx + ny;
    let vars = Poly::vars(nw);
    let map = vars[nx..].iter().chain(&vars[..nx]).cloned().collect();
    let fhat = block_permutation(nw, &[xy.x.k(), xy.y.k(), xy.p], &[1, 0, 2], &[1, 1, -1]);
    StdMor::new(xy.w.clone(), yx.w.clone(), map, fhat)
}

/// Sign of an isomorphism of models at a point: `sgn(det fhat · det Df)`.
///
/// An identification `A -> B` of oriented models realises `A ≃ σ B` with
/// `σ = orient(A) · orient(B) · identification_sign`.
pub fn identification_sign(m: &StdMor, pt: &WitnessPoint) -> Result<i32> {
    let (src, tgt) = (m.source(), m.target());
    if src.n() != tgt.n() || src.k() != tgt.k() {
        return Err(Error::Shape(format!(
            "not an identification: ({}, {}) -> ({}, {})",
            src.n(),
            src.k(),
            tgt.n(),
            tgt.k()
        )));
    }
    src.check_witness(pt)?;
    let coords = match pt.coords() {
        crate::witness::Coords::Exact(c) => c.clone(),
        crate::witness::Coords::Approx(_) => return Err(Error::Invalid("identification sign needs an exact point".into())),
    };
    let d = det_exact(&m.df()?.eval(&coords)?) * det_exact(&m.fhat().eval(&coords)?);
    match sign(&d) {
        0 => Err(Error::Invalid("identification is degenerate at the point".into())),
        s => Ok(s),
    }
}

/// Per-point d-transversality over a manifold target.
#[derive(Debug, Clone, PartialEq)]
pub struct Transversality {
    pub verdicts: Vec<bool>,
    pub warning: Option<String>,
}

/// Over `R^p` the obstruction bundle of the target is zero, so the map whose
/// left inverse is required has zero domain and the answer is always yes. The
/// witness pairs are still checked.
pub fn d_transverse_at(
    x: &StdModel,
    g: &[Poly],
    y: &StdModel,
    h: &[Poly],
    pts: &[(WitnessPoint, WitnessPoint)],
) -> Result<Transversality> {
    for (v, w) in pts {
        x.check_witness(v)?;
        y.check_witness(w)?;
        let (gv, hw) = (v.image(g)?.to_f64(), w.image(h)?.to_f64());
        let tol = v.tolerance().max(w.tolerance());
        if gv.iter().zip(&hw).any(|(a, b)| (a - b).abs() > tol) {
            return Err(Error::NotWitness("g(v) and h(w) differ".into()));
        }
    }
    let warning = pts.is_empty().then(|| "no witness pairs supplied; verdict is vacuous".to_string());
    Ok(Transversality { verdicts: vec![true; pts.len()], warning })
}

/// Left invertibility of the comparison map `alpha` evaluated at a point,
/// for synthetic targets with nonzero obstruction bundle.
pub fn alpha_left_invertible(alpha: &PolyMatrix, pt: &WitnessPoint) -> Result<bool> {
    Ok(pt.rank(alpha)? == alpha.cols())
}

/// Ranks witnessing exactness of
/// `(g∘e)^*(T*Z) -> e^*(T*X) ⊕ f^*(T*Y) -> T*W -> 0` on cokernels at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CotangentExactness {
    pub composite_zero: bool,
    pub surjective: bool,
    pub kernel_dim: usize,
    pub image_dim: usize,
}

impl CotangentExactness {
    pub fn exact(&self) -> bool {
        self.composite_zero && self.surjective && self.kernel_dim == self.image_dim
    }
}

pub fn cotangent_exact_at(d: &FibreData, pt: &WitnessPoint) -> Result<CotangentExactness> {
    use crate::dman::omega;
    d.w.check_witness(pt)?;
    let nw = d.w.n();
    let (oe, of) = (omega(&d.e)?, omega(&d.f)?);
    let phi_w = oe.target().phi().clone();
    // Cotangent maps of X and Y pulled back to W, and their direct sum.
    let phi_xy = block_diag(oe.source().phi(), of.source().phi())?;
    let b = oe.f2().hstack(of.f2())?;
    // T*Z -> e^*T*X ⊕ f^*T*Y: (Dg(e)^T, -Dh(f)^T).
    let dg = jacobian(&d.g, d.x.n())?.compose(d.e.map(), nw)?.transpose();
    let dh = jacobian(&d.h, d.y.n())?.compose(d.f.map(), nw)?.transpose();
    let a = dg.vstack(&dh.neg())?;

    let rank = |m: &PolyMatrix| pt.rank(m);
    let r_w = rank(&phi_w)?;
    let r_xy = rank(&phi_xy)?;
    let composite_zero = rank(&phi_w.hstack(&b.mul(&a)?)?)? == r_w
        && rank(&phi_w.hstack(&b.mul(&phi_xy)?)?)? == r_w;
    let r_bw = rank(&b.hstack(&phi_w)?)?;
    let surjective = r_bw == nw;
    let middle = b.cols();
    let preimage_dim = middle - r_bw + r_w;
    let kernel_dim = preimage_dim - r_xy;
    let image_dim = rank(&phi_xy.hstack(&a)?)? - r_xy;
    Ok(CotangentExactness { composite_zero, surjective, kernel_dim, image_dim })
}

fn block_diag(a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix> {
    let n = a.nvars();
    let top = a.hstack(&PolyMatrix::zeros(n, a.rows(), b.cols()))?;
    let bottom = PolyMatrix::zeros(n, b.rows(), a.cols()).hstack(b)?;
    top.vstack(&bottom)
}

//! Seeded random configurations and the 2-category law checks run on them.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cinf_ring::FgRing;
use crate::dman::{
    compose_mor, hcompose_2mor, mor_equal, two_mor_equal, vcompose_2mor, StdModel, StdMor, StdTwoMor,
};
use crate::error::Result;
use crate::poly::{Ideal, Monomial, Poly, PolyMatrix};
use crate::witness::WitnessPoint;
use crate::vvect::{compose_vmor, hcompose, vcompose, VComplex, VMor, VTwoMor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    VVect,
    DMan,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::VVect => "vvect",
            Suite::DMan => "dman",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Law {
    Associativity,
    LeftIdentity,
    RightIdentity,
    VerticalAssociativity,
    VerticalIdentity,
    HorizontalAssociativity,
    HorizontalIdentity,
    Interchange,
}

impl Law {
    pub const ALL: [Law; 8] = [
        Law::Associativity,
        Law::LeftIdentity,
        Law::RightIdentity,
        Law::VerticalAssociativity,
        Law::VerticalIdentity,
        Law::HorizontalAssociativity,
        Law::HorizontalIdentity,
        Law::Interchange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::Associativity => "1-composition associativity",
            Law::LeftIdentity => "left identity",
            Law::RightIdentity => "right identity",
            Law::VerticalAssociativity => "vertical associativity",
            Law::VerticalIdentity => "vertical identity",
            Law::HorizontalAssociativity => "horizontal associativity",
            Law::HorizontalIdentity => "horizontal identity",
            Law::Interchange => "interchange",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawOutcome {
    pub suite: Suite,
    pub law: Law,
    pub cases: usize,
    /// Indices of configurations where the law failed.
    pub failures: Vec<usize>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn tally(suite: Suite, results: &[[bool; 8]]) -> Vec<LawOutcome> {
    Law::ALL
        .iter()
        .enumerate()
        .map(|(li, &law)| LawOutcome {
            suite,
            law,
            cases: results.len(),
            failures: results.iter().enumerate().filter(|(_, r)| !r[li]).map(|(i, _)| i).collect(),
        })
        .collect()
}

/// Small integer coefficient, nonzero.
fn coeff(rng: &mut ChaCha8Rng) -> i64 {
    *[-2, -1, 1, 1, 2].choose(rng).unwrap()
}

/// Random polynomial of degree at most `deg` with few terms.
fn small_poly(rng: &mut ChaCha8Rng, nvars: usize, deg: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(nvars);
    for _ in 0..terms {
        let d = rng.gen_range(0..=deg);
        let mut e = vec![0u32; nvars];
        if nvars > 0 {
            for _ in 0..d {
                e[rng.gen_range(0..nvars)] += 1;
            }
        }
        p = p + Poly::monomial(nvars, Monomial::from_exponents(e), crate::poly::rat(coeff(rng), 1));
    }
    p
}

fn maybe_zero(rng: &mut ChaCha8Rng, p: Poly) -> Poly {
    if rng.gen_bool(0.3) {
        Poly::zero(p.nvars())
    } else {
        p
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, nvars: usize, rows: usize, cols: usize, deg: u32) -> PolyMatrix {
    PolyMatrix::from_fn(nvars, rows, cols, |_, _| {
        let p = small_poly(rng, nvars, deg, 2);
        maybe_zero(rng, p)
    })
}

// ---------------------------------------------------------------------------
// Two-term complexes.

const RING_VARS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
enum Atom {
    /// `R --p--> R`.
    Map(Poly),
    /// `R -> 0`.
    Top,
    /// `0 -> R`.
    Bottom,
}

impl Atom {
    fn r1(&self) -> usize {
        matches!(self, Atom::Map(_) | Atom::Top) as usize
    }

    fn r2(&self) -> usize {
        matches!(self, Atom::Map(_) | Atom::Bottom) as usize
    }
}

struct Complex {
    atoms: Vec<Atom>,
    cx: VComplex,
}

fn ring_pool() -> Result<Vec<FgRing>> {
    let names = ["x", "y"];
    let mut out = vec![FgRing::free(RING_VARS)];
    for gens in [&["x^2"][..], &["x*y"], &["x^2 - y"], &["y^2", "x*y"]] {
        let polys = gens.iter().map(|g| crate::poly::parse_poly(g, &names)).collect::<std::result::Result<Vec<_>, _>>()?;
        out.push(FgRing::new(Arc::new(Ideal::new(RING_VARS, polys)?)));
    }
    Ok(out)
}

fn atom_maps() -> Vec<Poly> {
    let names = ["x", "y"];
    ["0", "1", "x", "y", "x^2", "x*y", "x + y"]
        .iter()
        .map(|s| crate::poly::parse_poly(s, &names).expect("fixed atom"))
        .collect()
}

fn random_complex(rng: &mut ChaCha8Rng, ring: &FgRing) -> Result<Complex> {
    let maps = atom_maps();
    let mut atoms = Vec::new();
    let (mut r1, mut r2) = (0, 0);
    for _ in 0..rng.gen_range(1..=3) {
        let a = match rng.gen_range(0..4) {
            0 => Atom::Top,
            1 => Atom::Bottom,
            _ => Atom::Map(maps.choose(rng).unwrap().clone()),
        };
        if r1 + a.r1() > 3 || r2 + a.r2() > 3 {
            continue;
        }
        r1 += a.r1();
        r2 += a.r2();
        atoms.push(a);
    }
    let mut phi = PolyMatrix::zeros(RING_VARS, r2, r1);
    let (mut i, mut j) = (0, 0);
    let mut entries: Vec<Vec<Poly>> = (0..r2).map(|r| phi.row(r).to_vec()).collect();
    for a in &atoms {
        if let Atom::Map(p) = a {
            entries[i][j] = p.clone();
        }
        i += a.r2();
        j += a.r1();
    }
    if r2 > 0 {
        phi = PolyMatrix::from_rows(RING_VARS, entries)?;
    }
    Ok(Complex { cx: VComplex::new(ring.clone(), r1, r2, phi)?, atoms })
}

/// Block chain map between atom decompositions plus a null-homotopic part.
fn random_vmor(rng: &mut ChaCha8Rng, a: &Complex, b: &Complex) -> Result<VMor> {
    let n = RING_VARS;
    let x = Poly::var(n, 0);
    let y = Poly::var(n, 1);
    let mut f1 = vec![vec![Poly::zero(n); a.cx.r1()]; b.cx.r1()];
    let mut f2 = vec![vec![Poly::zero(n); a.cx.r2()]; b.cx.r2()];
    let mut bi = (0, 0);
    for tb in &b.atoms {
        let mut ai = (0, 0);
        for ta in &a.atoms {
            let c = small_poly(rng, n, 1, 1);
            let c = maybe_zero(rng, c);
            match (ta, tb) {
                (Atom::Map(p), Atom::Map(q)) => {
                    // q f1 = f2 p.
                    if p == q {
                        f1[bi.0][ai.0] = c.clone();
                        f2[bi.1][ai.1] = c;
                    } else {
                        for r in [&x, &y] {
                            if *p == q * r {
                                f1[bi.0][ai.0] = r * &c;
                                f2[bi.1][ai.1] = c.clone();
                            } else if *q == p * r {
                                f1[bi.0][ai.0] = c.clone();
                                f2[bi.1][ai.1] = r * &c;
                            }
                        }
                    }
                }
                (Atom::Top, Atom::Top) | (Atom::Map(_), Atom::Top) => f1[bi.0][ai.0] = c,
                (Atom::Bottom, Atom::Bottom) | (Atom::Bottom, Atom::Map(_)) => f2[bi.1][ai.1] = c,
                _ => {}
            }
            ai = (ai.0 + ta.r1(), ai.1 + ta.r2());
        }
        bi = (bi.0 + tb.r1(), bi.1 + tb.r2());
    }
    let to_matrix = |rows: Vec<Vec<Poly>>, r: usize, c: usize| {
        if r == 0 {
            Ok(PolyMatrix::zeros(n, 0, c))
        } else {
            PolyMatrix::from_rows(n, rows)
        }
    };
    let mut m1 = to_matrix(f1, b.cx.r1(), a.cx.r1())?;
    let mut m2 = to_matrix(f2, b.cx.r2(), a.cx.r2())?;
    let p = random_matrix(rng, n, b.cx.r1(), a.cx.r2(), 1);
    m1 = m1.add(&p.mul(a.cx.phi())?)?;
    m2 = m2.add(&b.cx.phi().mul(&p)?)?;
    VMor::new(a.cx.clone(), b.cx.clone(), m1, m2)
}

fn random_vtwomor(rng: &mut ChaCha8Rng, f: &VMor) -> Result<VTwoMor> {
    let (src, tgt) = (f.source(), f.target());
    let eta = random_matrix(rng, RING_VARS, tgt.r1(), src.r2(), 1);
    let g = VMor::new(
        src.clone(),
        tgt.clone(),
        f.f1().add(&eta.mul(src.phi())?)?,
        f.f2().add(&tgt.phi().mul(&eta)?)?,
    )?;
    VTwoMor::new(f.clone(), g, eta)
}

/// Run the law checks on one random chain `A -> B -> C -> D` of complexes.
fn vvect_case(rng: &mut ChaCha8Rng, rings: &[FgRing]) -> Result<[bool; 8]> {
    let ring = rings.choose(rng).unwrap().clone();
    let cs = (0..4).map(|_| random_complex(rng, &ring)).collect::<Result<Vec<_>>>()?;
    let f = random_vmor(rng, &cs[0], &cs[1])?;
    let g = random_vmor(rng, &cs[1], &cs[2])?;
    let h = random_vmor(rng, &cs[2], &cs[3])?;

    let assoc = compose_vmor(&h, &compose_vmor(&g, &f)?)? == compose_vmor(&compose_vmor(&h, &g)?, &f)?;
    let left = compose_vmor(&VMor::identity(&cs[1].cx), &f)? == f;
    let right = compose_vmor(&f, &VMor::identity(&cs[0].cx))? == f;

    let a1 = random_vtwomor(rng, &f)?;
    let a2 = random_vtwomor(rng, a1.to())?;
    let a3 = random_vtwomor(rng, a2.to())?;
    let vassoc = vcompose(&a3, &vcompose(&a2, &a1)?)? == vcompose(&vcompose(&a3, &a2)?, &a1)?;
    let vid = vcompose(&a1, &VTwoMor::identity(&f))? == a1 && vcompose(&VTwoMor::identity(a1.to()), &a1)? == a1;

    let b1 = random_vtwomor(rng, &g)?;
    let b2 = random_vtwomor(rng, b1.to())?;
    let c1 = random_vtwomor(rng, &h)?;
    let hassoc = hcompose(&c1, &hcompose(&b1, &a1)?)? == hcompose(&hcompose(&c1, &b1)?, &a1)?;
    let hid = hcompose(&VTwoMor::identity(&g), &VTwoMor::identity(&f))?
        == VTwoMor::identity(&compose_vmor(&g, &f)?);
    let interchange = hcompose(&vcompose(&b2, &b1)?, &vcompose(&a2, &a1)?)?
        == vcompose(&hcompose(&b2, &a2)?, &hcompose(&b1, &a1)?)?;
    Ok([assoc, left, right, vassoc, vid, hassoc, hid, interchange])
}

pub fn run_vvect_laws(seed: u64, cases: usize) -> Result<Vec<LawOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rings = ring_pool()?;
    let results = (0..cases).map(|_| vvect_case(&mut rng, &rings)).collect::<Result<Vec<_>>>()?;
    Ok(tally(Suite::VVect, &results))
}

// ---------------------------------------------------------------------------
// Standard models.

/// Random section component of degree at most 3 vanishing at the origin.
pub fn random_section(rng: &mut ChaCha8Rng, n: usize) -> Poly {
    // Mostly monomials and binomials, so the Gröbner work stays small.
    let terms = if rng.gen_bool(0.6) { 1 } else { 2 };
    let mut p = small_poly(rng, n, 3, terms);
    p = &p - &Poly::constant(n, p.coefficient(&Monomial::one(n)));
    if p.is_zero() && n > 0 {
        p = p + Poly::var(n, rng.gen_range(0..n));
    }
    p
}

/// Affine map `R^n -> R^m` with each component a signed coordinate, scaled sum or constant.
pub fn random_affine(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Poly> {
    (0..m)
        .map(|_| {
            if n == 0 {
                return Poly::int(0, coeff(rng));
            }
            let mut p = Poly::var(n, rng.gen_range(0..n)).scale(&crate::poly::rat(coeff(rng), 1));
            if rng.gen_bool(0.3) {
                p = p + Poly::var(n, rng.gen_range(0..n));
            }
            if rng.gen_bool(0.3) {
                p = p + Poly::int(n, coeff(rng));
            }
            p
        })
        .collect()
}

pub fn random_model(rng: &mut ChaCha8Rng) -> Result<Arc<StdModel>> {
    let n = rng.gen_range(0..=3);
    let k = rng.gen_range(0..=3);
    let s = (0..k).map(|_| if n == 0 { Poly::zero(0) } else { random_section(rng, n) }).collect();
    Ok(Arc::new(StdModel::new(n, k, s, Vec::new(), 1)?))
}

/// A model `X` with section `(t∘f, extra)` and a morphism `X -> Y` whose bundle
/// part is `[I | 0]` plus a matrix with entries in `I_s`.
pub fn random_pullback(rng: &mut ChaCha8Rng, y: &Arc<StdModel>) -> Result<StdMor> {
    let n = rng.gen_range(0..=3);
    let f = random_affine(rng, n, y.n());
    let mut s = y.section().iter().map(|t| t.compose_into(&f, n)).collect::<Result<Vec<_>>>()?;
    let l = s.len();
    let extra = rng.gen_range(0..=3 - l.min(3));
    for _ in 0..extra {
        s.push(if n == 0 { Poly::zero(0) } else { random_section(rng, n) });
    }
    let k = s.len();
    let x = Arc::new(StdModel::new(n, k, s.clone(), Vec::new(), 1)?);
    let fhat = PolyMatrix::from_fn(n, l, k, |i, j| {
        let base = if i == j { Poly::one(n) } else { Poly::zero(n) };
        if k > 0 && rng.gen_bool(0.3) {
            base + s[rng.gen_range(0..k)].scale(&crate::poly::rat(coeff(rng), 1))
        } else {
            base
        }
    });
    StdMor::new(x, y.clone(), f, fhat)
}

pub fn random_std2mor(rng: &mut ChaCha8Rng, f: &StdMor) -> Result<StdTwoMor> {
    let (src, tgt) = (f.source(), f.target());
    let n = src.n();
    // Constant Lambda keeps g = f + Lambda s at the degree of s.
    let lambda = random_matrix(rng, n, tgt.n(), src.k(), 0);
    let s = PolyMatrix::column(n, src.section().to_vec())?;
    let shift = lambda.mul(&s)?;
    let map = f.map().iter().enumerate().map(|(i, p)| p + shift.get(i, 0)).collect();
    let fhat = f.fhat().add(&f.dt_along()?.mul(&lambda)?)?;
    let g = StdMor::new(src.clone(), tgt.clone(), map, fhat)?;
    StdTwoMor::new(f, &g, lambda)
}

/// Integer points of `[-radius, radius]^n` on the zero locus and in the domain.
pub fn integer_witnesses(model: &StdModel, radius: i64) -> Vec<WitnessPoint> {
    let mut pts = vec![Vec::new()];
    for _ in 0..model.n() {
        pts = pts.iter().flat_map(|p: &Vec<i64>| (-radius..=radius).map(move |v| [p.as_slice(), &[v]].concat())).collect();
    }
    pts.iter().map(|p| WitnessPoint::ints(p)).filter(|w| model.check_witness(w).is_ok()).collect()
}

fn dman_case(rng: &mut ChaCha8Rng) -> Result<[bool; 8]> {
    let d = random_model(rng)?;
    let h = random_pullback(rng, &d)?;
    let g = random_pullback(rng, h.source())?;
    let f = random_pullback(rng, g.source())?;

    let assoc = mor_equal(&compose_mor(&h, &compose_mor(&g, &f)?)?, &compose_mor(&compose_mor(&h, &g)?, &f)?)?;
    let left = mor_equal(&compose_mor(&StdMor::identity(f.target().clone()), &f)?, &f)?;
    let right = mor_equal(&compose_mor(&f, &StdMor::identity(f.source().clone()))?, &f)?;

    let a1 = random_std2mor(rng, &f)?;
    let a2 = random_std2mor(rng, a1.to())?;
    let a3 = random_std2mor(rng, a2.to())?;
    let vassoc = two_mor_equal(
        &vcompose_2mor(&a3, &vcompose_2mor(&a2, &a1)?)?,
        &vcompose_2mor(&vcompose_2mor(&a3, &a2)?, &a1)?,
    )?;
    let vid = two_mor_equal(&vcompose_2mor(&a1, &StdTwoMor::identity(&f))?, &a1)?
        && two_mor_equal(&vcompose_2mor(&StdTwoMor::identity(a1.to()), &a1)?, &a1)?;

    let b1 = random_std2mor(rng, &g)?;
    let b2 = random_std2mor(rng, b1.to())?;
    let c1 = random_std2mor(rng, &h)?;
    let hassoc = two_mor_equal(
        &hcompose_2mor(&c1, &hcompose_2mor(&b1, &a1)?)?,
        &hcompose_2mor(&hcompose_2mor(&c1, &b1)?, &a1)?,
    )?;
    let hid = two_mor_equal(
        &hcompose_2mor(&StdTwoMor::identity(&g), &StdTwoMor::identity(&f))?,
        &StdTwoMor::identity(&compose_mor(&g, &f)?),
    )?;
    let interchange = two_mor_equal(
        &hcompose_2mor(&vcompose_2mor(&b2, &b1)?, &vcompose_2mor(&a2, &a1)?)?,
        &vcompose_2mor(&hcompose_2mor(&b2, &a2)?, &hcompose_2mor(&b1, &a1)?)?,
    )?;
    Ok([assoc, left, right, vassoc, vid, hassoc, hid, interchange])
}

pub fn run_dman_laws(seed: u64, cases: usize) -> Result<Vec<LawOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let results = (0..cases).map(|_| dman_case(&mut rng)).collect::<Result<Vec<_>>>()?;
    Ok(tally(Suite::DMan, &results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vvect_laws_hold() {
        for o in run_vvect_laws(7, 25).unwrap() {
            assert!(o.passed(), "{o:?}");
        }
    }

    #[test]
    fn dman_laws_hold() {
        for o in run_dman_laws(7, 10).unwrap() {
            assert!(o.passed(), "{o:?}");
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        assert_eq!(run_vvect_laws(3, 5).unwrap(), run_vvect_laws(3, 5).unwrap());
    }
}

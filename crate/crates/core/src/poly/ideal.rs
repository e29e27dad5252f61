//! Ideals with eagerly computed reduced Gröbner bases (grevlex).
//!
//! Buchberger's algorithm with the product and chain criteria and the normal
//! selection strategy (smallest lcm first). The number of S-polynomial
//! reductions is capped; exceeding the cap is a hard error.

use std::collections::BTreeSet;

use super::monomial::Monomial;
use super::polynomial::Poly;
use crate::error::{check_nvars, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroebnerLimits {
    pub max_steps: usize,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        GroebnerLimits { max_steps: 20_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Ideal {
    nvars: usize,
    generators: Vec<Poly>,
    basis: Vec<Poly>,
    limits: GroebnerLimits,
}

impl PartialEq for Ideal {
    /// Reduced bases are canonical, so this is equality of ideals.
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.basis == other.basis
    }
}

impl Eq for Ideal {}

impl Ideal {
    pub fn new(nvars: usize, generators: Vec<Poly>) -> Result<Self> {
        Self::with_limits(nvars, generators, GroebnerLimits::default())
    }

    pub fn zero(nvars: usize) -> Self {
        Ideal { nvars, generators: Vec::new(), basis: Vec::new(), limits: GroebnerLimits::default() }
    }

    pub fn with_limits(nvars: usize, generators: Vec<Poly>, limits: GroebnerLimits) -> Result<Self> {
        for g in &generators {
            check_nvars(nvars, g.nvars())?;
        }
        let generators: Vec<Poly> = generators.into_iter().filter(|g| !g.is_zero()).collect();
        let basis = reduced_groebner_basis(&generators, limits)?;
        let ideal = Ideal { nvars, generators, basis, limits };
        if let Some(bad) = ideal.generators.iter().find(|g| !reduce(g, &ideal.basis).is_zero()) {
            return Err(Error::Invalid(format!("Groebner basis does not contain generator {bad}")));
        }
        Ok(ideal)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// The nonzero generators, as supplied.
    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    /// The reduced Gröbner basis, sorted by ascending leading monomial.
    pub fn basis(&self) -> &[Poly] {
        &self.basis
    }

    pub fn limits(&self) -> GroebnerLimits {
        self.limits
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    /// The unique remainder of `p` modulo the reduced basis.
    pub fn normal_form(&self, p: &Poly) -> Result<Poly> {
        check_nvars(self.nvars, p.nvars())?;
        Ok(reduce(p, &self.basis))
    }

    pub fn contains(&self, p: &Poly) -> Result<bool> {
        Ok(self.normal_form(p)?.is_zero())
    }

    /// The ideal generated by all pairwise products of generators.
    pub fn square(&self) -> Result<Ideal> {
        let g = &self.generators;
        let mut products = Vec::with_capacity(g.len() * (g.len() + 1) / 2);
        for i in 0..g.len() {
            for j in i..g.len() {
                products.push(&g[i] * &g[j]);
            }
        }
        Ideal::with_limits(self.nvars, products, self.limits)
    }

    /// Every S-polynomial of the basis reduces to zero.
    pub fn buchberger_certificate(&self) -> bool {
        let b = &self.basis;
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if !reduce(&s_polynomial(&b[i], &b[j]), b).is_zero() {
                    return false;
                }
            }
        }
        // Reducedness: no basis term is divisible by another leading monomial.
        b.iter().enumerate().all(|(i, g)| {
            g.terms().all(|(m, _)| {
                b.iter().enumerate().all(|(j, h)| i == j || !h.leading_monomial().unwrap().divides(m))
            })
        })
    }
}

/// Full reduction of `p` by `basis` (leading coefficients need not be one).
pub(crate) fn reduce(p: &Poly, basis: &[Poly]) -> Poly {
    let mut rest = p.clone();
    let mut remainder = Poly::zero(p.nvars());
    while let Some((m, c)) = rest.pop_leading() {
        let divisor = basis.iter().find(|g| g.leading_monomial().is_some_and(|lm| lm.divides(&m)));
        match divisor {
            Some(g) => {
                let (gm, gc) = g.leading_term().unwrap();
                let q = gm.quotient_of(&m).unwrap();
                let factor = -(&c / gc);
                for (om, oc) in g.tail_terms() {
                    rest.add_term(om * &q, &factor * oc);
                }
            }
            None => remainder.add_term(m, c),
        }
    }
    remainder
}

pub(crate) fn s_polynomial(f: &Poly, g: &Poly) -> Poly {
    let (fm, fc) = f.leading_term().unwrap();
    let (gm, gc) = g.leading_term().unwrap();
    let l = fm.lcm(gm);
    let mut out = Poly::zero(f.nvars());
    out.add_scaled_shifted(&fc.recip(), &fm.quotient_of(&l).unwrap(), f);
    out.add_scaled_shifted(&-gc.recip(), &gm.quotient_of(&l).unwrap(), g);
    out
}

fn reduced_groebner_basis(generators: &[Poly], limits: GroebnerLimits) -> Result<Vec<Poly>> {
    let mut basis: Vec<Poly> = Vec::new();
    for g in generators {
        let r = reduce(g, &basis);
        if !r.is_zero() {
            basis.push(r.monic());
        }
    }
    if basis.iter().any(Poly::is_constant) {
        let n = generators[0].nvars();
        return Ok(vec![Poly::one(n)]);
    }

    // Pairs keyed by (lcm, i, j) so the smallest lcm is selected first.
    let mut pairs: BTreeSet<(Monomial, usize, usize)> = BTreeSet::new();
    let lm = |p: &Poly| p.leading_monomial().unwrap().clone();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert((lm(&basis[i]).lcm(&lm(&basis[j])), i, j));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut steps = 0usize;

    while let Some((l, i, j)) = pairs.pop_first() {
        done.insert((i, j));
        let (mi, mj) = (lm(&basis[i]), lm(&basis[j]));
        if mi.coprime(&mj) {
            continue;
        }
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && lm(&basis[k]).divides(&l)
                && done.contains(&(i.min(k), i.max(k)))
                && done.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        steps += 1;
        if steps > limits.max_steps {
            return Err(Error::GroebnerCap { limit: limits.max_steps });
        }
        let r = reduce(&s_polynomial(&basis[i], &basis[j]), &basis);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(vec![Poly::one(r.nvars())]);
        }
        let r = r.monic();
        let mr = lm(&r);
        let k = basis.len();
        basis.push(r);
        for (idx, g) in basis.iter().enumerate().take(k) {
            pairs.insert((lm(g).lcm(&mr), idx, k));
        }
    }

    // Minimalize, then interreduce.
    let mut minimal: Vec<Poly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let gm = lm(g);
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let hm = lm(h);
            j != i && hm.divides(&gm) && (hm != gm || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Poly> =
            minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
        // Leading term is irreducible by the others, so only the tail changes.
        let (m, c) = minimal[i].leading_term().unwrap();
        let head = Poly::monomial(minimal[i].nvars(), m.clone(), c.clone());
        let tail = &minimal[i] - &head;
        reduced.push((head + reduce(&tail, &others)).monic());
    }
    reduced.sort_by(|a, b| lm(a).cmp(&lm(b)));
    Ok(reduced)
}

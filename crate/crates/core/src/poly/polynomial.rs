use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::monomial::Monomial;
use super::Scalar;
use crate::error::{check_nvars, Error, Result};

/// A polynomial with exact rational coefficients in a fixed number of variables.
///
/// Terms are kept in a map keyed by grevlex-ordered monomials, so the last entry
/// is the leading term. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::monomial(nvars, Monomial::one(nvars), c)
    }

    pub fn int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Scalar::from_integer(BigInt::from(c)))
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range for {nvars} variables");
        Self::monomial(nvars, Monomial::var(nvars, index), Scalar::one())
    }

    /// All coordinate functions of `nvars`-space.
    pub fn vars(nvars: usize) -> Vec<Poly> {
        (0..nvars).map(|i| Self::var(nvars, i)).collect()
    }

    pub fn monomial(nvars: usize, mon: Monomial, c: Scalar) -> Self {
        assert_eq!(mon.nvars(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mon, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.last_key_value()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn coefficient(&self, mon: &Monomial) -> Scalar {
        self.terms.get(mon).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn pop_leading(&mut self) -> Option<(Monomial, Scalar)> {
        self.terms.pop_last()
    }

    /// Every term except the leading one, in ascending order.
    pub(crate) fn tail_terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        let n = self.terms.len().saturating_sub(1);
        self.terms.iter().take(n)
    }

    /// `self += c * m * other`
    pub(crate) fn add_scaled_shifted(&mut self, c: &Scalar, m: &Monomial, other: &Poly) {
        for (om, oc) in &other.terms {
            self.add_term(om * m, c * oc);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn monic(&self) -> Poly {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> Poly {
        assert!(index < self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[index] -= 1;
            out.add_term(Monomial::from_exponents(exps), c * Scalar::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Substitute `images[i]` for variable `i`. All images share one variable count.
    pub fn compose(&self, images: &[Poly]) -> Result<Poly> {
        check_nvars(self.nvars, images.len())?;
        let target = match images.first() {
            Some(p) => p.nvars,
            None => {
                // A polynomial in zero variables is a constant; it stays one.
                return Ok(self.clone());
            }
        };
        if let Some(bad) = images.iter().find(|p| p.nvars != target) {
            return Err(Error::Dimension { expected: target, found: bad.nvars });
        }
        self.compose_into(images, target)
    }

    /// Substitution where the image variable count is explicit (needed when there are no images).
    pub fn compose_into(&self, images: &[Poly], target_nvars: usize) -> Result<Poly> {
        check_nvars(self.nvars, images.len())?;
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(target_nvars), p.clone()]).collect();
        let mut out = Poly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target_nvars, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * &cache[1];
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            out = out + term;
        }
        Ok(out)
    }

    /// Re-index into `nvars` variables, placing this polynomial's variables at `offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Poly {
        assert!(offset + self.nvars <= nvars);
        Poly {
            nvars,
            terms: self.terms.iter().map(|(m, c)| (m.embed(nvars, offset), c.clone())).collect(),
        }
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar> {
        check_nvars(self.nvars, point.len())?;
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        check_nvars(self.nvars, point.len())?;
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = scalar_to_f64(c);
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= x.powi(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Canonical text form using the given variable names.
    pub fn to_string_with(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.nvars);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let factors: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { names[v].clone() } else { format!("{}^{}", names[v], e) })
                .collect();
            let coeff_is_one = abs.is_one();
            if factors.is_empty() {
                out.push_str(&format_scalar(&abs));
            } else {
                if !coeff_is_one {
                    out.push_str(&format_scalar(&abs));
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

pub fn default_var_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("x{i}")).collect()
}

pub fn format_scalar(c: &Scalar) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn scalar_to_f64(c: &Scalar) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&default_var_names(self.nvars)))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "adding polynomials in different rings");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(mut self, rhs: Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "adding polynomials in different rings");
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "subtracting polynomials in different rings");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for Poly {
    type Output = Poly;

    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "multiplying polynomials in different rings");
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_scaled_shifted(c, m, rhs);
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;

    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

//! Exact polynomial arithmetic over the rationals, ideals and matrices.

mod ideal;
mod matrix;
mod monomial;
mod parse;
mod polynomial;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use ideal::{GroebnerLimits, Ideal};
pub use matrix::PolyMatrix;
pub use monomial::Monomial;
pub use parse::{parse_poly, parse_scalar, ParseError};
pub use polynomial::{default_var_names, format_scalar, scalar_to_f64, Poly};

use crate::error::Result;

pub type Scalar = BigRational;

/// `p/q` as a scalar. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

pub fn normal_form(p: &Poly, ideal: &Ideal) -> Result<Poly> {
    ideal.normal_form(p)
}

pub fn ideal_member(p: &Poly, ideal: &Ideal) -> Result<bool> {
    ideal.contains(p)
}

pub fn ideal_square(ideal: &Ideal) -> Result<Ideal> {
    ideal.square()
}

/// The `k x n` matrix of partial derivatives `d s_i / d x_j`.
pub fn jacobian(s: &[Poly], nvars: usize) -> Result<PolyMatrix> {
    for p in s {
        crate::error::check_nvars(nvars, p.nvars())?;
    }
    Ok(PolyMatrix::from_fn(nvars, s.len(), nvars, |i, j| s[i].derivative(j)))
}

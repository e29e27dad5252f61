//! Standard-model derived manifolds `S_{V,E,s}` with polynomial data.

mod classify;
mod model;
mod morphism;

pub use classify::{
    classify_mor_at, cotangent_complex, etale_at, exactness_at, is_manifold_at, omega, standard_embedding, EtaleVerdict,
    MorKinds,
};
pub use model::{make_std_model, StdModel};
pub use morphism::{
    compose_mor, hcompose_2mor, mor_equal, two_mor_equal, validate_2mor, validate_mor, vcompose_2mor, StdMor,
    StdTwoMor,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// The congruence a residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// `fhat * s - t(f)` lies in the square of the source ideal.
    SectionCompatibility,
    /// `g - f - Lambda * s` lies in the square of the source ideal.
    TwoMorMap,
    /// `ghat - fhat - Dt(f) * Lambda` lies in the source ideal.
    TwoMorBundle,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::SectionCompatibility => "section-compatibility mod I_s^2",
            Condition::TwoMorMap => "2-morphism map congruence mod I_s^2",
            Condition::TwoMorBundle => "2-morphism bundle congruence mod I_s",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One failing matrix entry, with its normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub condition: Condition,
    pub row: usize,
    pub col: usize,
    pub normal_form: Poly,
}

/// Outcome of a validating constructor.
#[derive(Debug, Clone, PartialEq)]
pub enum Validated<T> {
    Valid(T),
    Invalid(Vec<Residual>),
}

impl<T> Validated<T> {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validated::Valid(_))
    }

    pub fn residuals(&self) -> &[Residual] {
        match self {
            Validated::Valid(_) => &[],
            Validated::Invalid(r) => r,
        }
    }

    pub fn into_result(self) -> Result<T> {
        match self {
            Validated::Valid(v) => Ok(v),
            Validated::Invalid(r) => {
                let first = &r[0];
                Err(Error::Invalid(format!(
                    "{} fails at entry ({}, {}) with residual {}",
                    first.condition, first.row, first.col, first.normal_form
                )))
            }
        }
    }
}

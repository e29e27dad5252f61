//! Points at which pointwise linear-algebra criteria are evaluated.

use num_traits::{Signed, Zero};

use crate::error::{check_nvars, Error, Result};
use crate::linalg::{rank_exact, rank_f64, DEFAULT_PIVOT_TOLERANCE};
use crate::poly::{scalar_to_f64, Poly, PolyMatrix, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Coords {
    Exact(Vec<Scalar>),
    Approx(Vec<f64>),
}

/// A point together with the tolerance used for zero tests and rank pivots.
///
/// Exact points have tolerance 0 and use exact rank. Approximate points test
/// `|s_i| <= tolerance` and treat pivots of magnitude at most `pivot` as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessPoint {
    coords: Coords,
    tolerance: f64,
    pivot: f64,
}

impl WitnessPoint {
    pub fn exact(coords: Vec<Scalar>) -> Self {
        WitnessPoint { coords: Coords::Exact(coords), tolerance: 0.0, pivot: 0.0 }
    }

    pub fn approx(coords: Vec<f64>, tolerance: f64) -> Self {
        WitnessPoint { coords: Coords::Approx(coords), tolerance, pivot: DEFAULT_PIVOT_TOLERANCE }
    }

    pub fn with_pivot(mut self, pivot: f64) -> Self {
        if let Coords::Approx(_) = self.coords {
            self.pivot = pivot;
        }
        self
    }

    /// Integer coordinates, exact.
    pub fn ints(coords: &[i64]) -> Self {
        Self::exact(coords.iter().map(|&c| Scalar::from_integer(c.into())).collect())
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn pivot(&self) -> f64 {
        self.pivot
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.coords, Coords::Exact(_))
    }

    pub fn len(&self) -> usize {
        match &self.coords {
            Coords::Exact(v) => v.len(),
            Coords::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match &self.coords {
            Coords::Exact(v) => v.iter().map(scalar_to_f64).collect(),
            Coords::Approx(v) => v.clone(),
        }
    }

    /// Value of `p` as a float (exactly computed first for exact points).
    pub fn eval(&self, p: &Poly) -> Result<f64> {
        match &self.coords {
            Coords::Exact(v) => Ok(scalar_to_f64(&p.eval(v)?)),
            Coords::Approx(v) => p.eval_f64(v),
        }
    }

    fn is_zero_value(&self, p: &Poly) -> Result<bool> {
        match &self.coords {
            Coords::Exact(v) => Ok(p.eval(v)?.is_zero()),
            Coords::Approx(v) => Ok(p.eval_f64(v)?.abs() <= self.tolerance),
        }
    }

    fn is_positive_value(&self, p: &Poly) -> Result<bool> {
        match &self.coords {
            Coords::Exact(v) => Ok(p.eval(v)?.is_positive()),
            Coords::Approx(v) => Ok(p.eval_f64(v)? > 0.0),
        }
    }

    /// Indices of the polynomials that do not vanish here (within tolerance).
    pub fn nonvanishing(&self, polys: &[Poly]) -> Result<Vec<usize>> {
        let mut bad = Vec::new();
        for (i, p) in polys.iter().enumerate() {
            check_nvars(self.len(), p.nvars())?;
            if !self.is_zero_value(p)? {
                bad.push(i);
            }
        }
        Ok(bad)
    }

    /// Indices of the domain inequalities `p > 0` that fail here.
    pub fn violated_inequalities(&self, domain: &[Poly]) -> Result<Vec<usize>> {
        let mut bad = Vec::new();
        for (i, p) in domain.iter().enumerate() {
            check_nvars(self.len(), p.nvars())?;
            if !self.is_positive_value(p)? {
                bad.push(i);
            }
        }
        Ok(bad)
    }

    /// Require that all of `section` vanishes and all of `domain` is positive.
    pub fn check_witness(&self, section: &[Poly], domain: &[Poly]) -> Result<()> {
        let zeros = self.nonvanishing(section)?;
        if !zeros.is_empty() {
            return Err(Error::NotWitness(format!("section components {zeros:?} do not vanish")));
        }
        let outside = self.violated_inequalities(domain)?;
        if !outside.is_empty() {
            return Err(Error::NotWitness(format!("domain inequalities {outside:?} fail")));
        }
        Ok(())
    }

    /// Image of this point under the polynomial map `f`, keeping exactness.
    pub fn image(&self, f: &[Poly]) -> Result<WitnessPoint> {
        let coords = match &self.coords {
            Coords::Exact(v) => Coords::Exact(f.iter().map(|p| p.eval(v)).collect::<Result<_>>()?),
            Coords::Approx(v) => Coords::Approx(f.iter().map(|p| p.eval_f64(v)).collect::<Result<_>>()?),
        };
        Ok(WitnessPoint { coords, ..self.clone() })
    }

    /// Concatenate coordinates, e.g. to form a point of a product.
    pub fn concat(&self, other: &WitnessPoint) -> WitnessPoint {
        let coords = match (&self.coords, &other.coords) {
            (Coords::Exact(a), Coords::Exact(b)) => Coords::Exact(a.iter().chain(b).cloned().collect()),
            _ => Coords::Approx(self.to_f64().into_iter().chain(other.to_f64()).collect()),
        };
        WitnessPoint {
            coords,
            tolerance: self.tolerance.max(other.tolerance),
            pivot: self.pivot.max(other.pivot),
        }
    }

    /// Rank of a polynomial matrix evaluated here.
    pub fn rank(&self, m: &PolyMatrix) -> Result<usize> {
        check_nvars(self.len(), m.nvars())?;
        match &self.coords {
            Coords::Exact(v) => Ok(rank_exact(&m.eval(v)?)),
            Coords::Approx(v) => Ok(rank_f64(&m.eval_f64(v)?, self.pivot)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, rat};

    #[test]
    fn exact_and_approx_zero_tests() {
        let s = [parse_poly("x^2 - 2", &["x"]).unwrap()];
        let root2 = 2f64.sqrt();
        assert!(WitnessPoint::approx(vec![root2], 1e-9).check_witness(&s, &[]).is_ok());
        assert!(WitnessPoint::exact(vec![rat(7, 5)]).check_witness(&s, &[]).is_err());
        let dom = [parse_poly("x", &["x"]).unwrap()];
        assert!(WitnessPoint::approx(vec![-root2], 1e-9).check_witness(&s, &dom).is_err());
    }

    #[test]
    fn rank_uses_point_kind() {
        let m = PolyMatrix::from_rows(1, vec![vec![parse_poly("x", &["x"]).unwrap()]]).unwrap();
        assert_eq!(WitnessPoint::ints(&[0]).rank(&m).unwrap(), 0);
        assert_eq!(WitnessPoint::approx(vec![1e-12], 1e-9).rank(&m).unwrap(), 0);
        assert_eq!(WitnessPoint::exact(vec![rat(1, 1_000_000_000_000)]).rank(&m).unwrap(), 1);
    }
}

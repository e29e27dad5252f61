use std::fmt;

use super::ideal::Ideal;
use super::polynomial::Poly;
use super::Scalar;
use crate::error::{check_nvars, Error, Result};

/// Dense row-major matrix of polynomials sharing one variable count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    nvars: usize,
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(nvars: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix { nvars, rows, cols, entries: vec![Poly::zero(nvars); rows * cols] }
    }

    pub fn identity(nvars: usize, n: usize) -> Self {
        Self::from_fn(nvars, n, n, |i, j| if i == j { Poly::one(nvars) } else { Poly::zero(nvars) })
    }

    pub fn from_fn(nvars: usize, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let e = f(i, j);
                assert_eq!(e.nvars(), nvars, "matrix entry has wrong variable count");
                entries.push(e);
            }
        }
        PolyMatrix { nvars, rows, cols, entries }
    }

    /// Build from rows. An empty row list gives a `0 x 0` matrix; use
    /// [`PolyMatrix::zeros`] for `0 x c` shapes.
    pub fn from_rows(nvars: usize, rows: Vec<Vec<Poly>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            for e in row {
                check_nvars(nvars, e.nvars())?;
                entries.push(e);
            }
        }
        Ok(PolyMatrix { nvars, rows: nrows, cols, entries })
    }

    /// A column vector.
    pub fn column(nvars: usize, v: Vec<Poly>) -> Result<Self> {
        let n = v.len();
        for e in &v {
            check_nvars(nvars, e.nvars())?;
        }
        Ok(PolyMatrix { nvars, rows: n, cols: 1, entries: v })
    }

    pub fn from_scalars(nvars: usize, rows: usize, cols: usize, values: &[Scalar]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(nvars, rows, cols, |i, j| Poly::constant(nvars, values[i * cols + j].clone()))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Entries of column `j`, top to bottom.
    pub fn col(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn map(&self, mut f: impl FnMut(&Poly) -> Poly) -> PolyMatrix {
        let entries: Vec<Poly> = self.entries.iter().map(&mut f).collect();
        let nvars = entries.first().map_or(self.nvars, Poly::nvars);
        PolyMatrix { nvars, rows: self.rows, cols: self.cols, entries }
    }

    fn try_map(&self, nvars: usize, mut f: impl FnMut(&Poly) -> Result<Poly>) -> Result<PolyMatrix> {
        let entries = self.entries.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix { nvars, rows: self.rows, cols: self.cols, entries })
    }

    pub fn transpose(&self) -> PolyMatrix {
        Self::from_fn(self.nvars, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn neg(&self) -> PolyMatrix {
        self.map(|p| -p)
    }

    pub fn scale(&self, c: &Poly) -> PolyMatrix {
        self.map(|p| p * c)
    }

    fn check_same(&self, other: &PolyMatrix, op: &str) -> Result<()> {
        check_nvars(self.nvars, other.nvars)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.check_same(other, "add")?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(PolyMatrix { entries, ..self.clone() })
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.check_same(other, "sub")?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(PolyMatrix { entries, ..self.clone() })
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        check_nvars(self.nvars, other.nvars)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.nvars, self.rows, other.cols, |i, j| {
            let mut acc = Poly::zero(self.nvars);
            for t in 0..self.cols {
                let (a, b) = (self.get(i, t), other.get(t, j));
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a * b;
                }
            }
            acc
        }))
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        check_nvars(self.nvars, other.nvars)?;
        if self.rows != other.rows {
            return Err(Error::Shape(format!("hstack: {} rows vs {}", self.rows, other.rows)));
        }
        Ok(Self::from_fn(self.nvars, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols { self.get(i, j).clone() } else { other.get(i, j - self.cols).clone() }
        }))
    }

    /// `self` on top of `other`.
    pub fn vstack(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        check_nvars(self.nvars, other.nvars)?;
        if self.cols != other.cols {
            return Err(Error::Shape(format!("vstack: {} cols vs {}", self.cols, other.cols)));
        }
        Ok(Self::from_fn(self.nvars, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows { self.get(i, j).clone() } else { other.get(i - self.rows, j).clone() }
        }))
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> PolyMatrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Self::from_fn(self.nvars, r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Entrywise normal form modulo `ideal`.
    pub fn reduce(&self, ideal: &Ideal) -> Result<PolyMatrix> {
        check_nvars(ideal.nvars(), self.nvars)?;
        self.try_map(self.nvars, |p| ideal.normal_form(p))
    }

    /// True when every entry lies in `ideal`.
    pub fn in_ideal(&self, ideal: &Ideal) -> Result<bool> {
        for p in &self.entries {
            if !ideal.contains(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Substitute `images` (polynomials in `target_nvars` variables) into every entry.
    pub fn compose(&self, images: &[Poly], target_nvars: usize) -> Result<PolyMatrix> {
        self.try_map(target_nvars, |p| p.compose_into(images, target_nvars))
    }

    pub fn embed(&self, nvars: usize, offset: usize) -> PolyMatrix {
        let entries = self.entries.iter().map(|p| p.embed(nvars, offset)).collect();
        PolyMatrix { nvars, rows: self.rows, cols: self.cols, entries }
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
        check_nvars(self.nvars, point.len())?;
        (0..self.rows).map(|i| self.row(i).iter().map(|p| p.eval(point)).collect()).collect()
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<Vec<Vec<f64>>> {
        check_nvars(self.nvars, point.len())?;
        (0..self.rows).map(|i| self.row(i).iter().map(|p| p.eval_f64(point)).collect()).collect()
    }

    pub fn to_strings(&self, names: &[String]) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|p| p.to_string_with(names)).collect()).collect()
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

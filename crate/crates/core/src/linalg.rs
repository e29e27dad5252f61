//! Dense rank computations over the rationals, binary64 and prime fields,
//! plus the small solver used by the zero finder.

use num_traits::{Signed, Zero};

use crate::poly::Scalar;

/// Default pivot threshold for floating-point rank decisions.
pub const DEFAULT_PIVOT_TOLERANCE: f64 = 1e-9;

/// Field operations needed by Gaussian elimination.
pub trait Field {
    type Elem: Clone;

    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Whether `a` is a strictly better pivot than `b`.
    fn better_pivot(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    /// `a - b * c`.
    fn sub_mul(&self, a: &Self::Elem, b: &Self::Elem, c: &Self::Elem) -> Self::Elem;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

pub struct Rationals;

impl Field for Rationals {
    type Elem = Scalar;

    fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }

    fn better_pivot(&self, a: &Scalar, b: &Scalar) -> bool {
        // Any nonzero pivot is exact; prefer the first one found.
        !a.is_zero() && b.is_zero()
    }

    fn sub_mul(&self, a: &Scalar, b: &Scalar, c: &Scalar) -> Scalar {
        a - b * c
    }

    fn div(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a / b
    }
}

/// Binary64 with partial pivoting; entries with magnitude at most `tolerance` are zero.
pub struct Floats {
    pub tolerance: f64,
}

impl Field for Floats {
    type Elem = f64;

    fn is_zero(&self, a: &f64) -> bool {
        a.abs() <= self.tolerance
    }

    fn better_pivot(&self, a: &f64, b: &f64) -> bool {
        a.abs() > b.abs()
    }

    fn sub_mul(&self, a: &f64, b: &f64, c: &f64) -> f64 {
        a - b * c
    }

    fn div(&self, a: &f64, b: &f64) -> f64 {
        a / b
    }
}

/// The prime field GF(p), elements stored as residues in `0..p`.
#[derive(Debug, Clone, Copy)]
pub struct PrimeField {
    pub p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Self {
        assert!(p >= 2);
        PrimeField { p }
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero");
        // Fermat: a^(p-2).
        let (mut base, mut e, mut acc) = (a as u64 % self.p as u64, self.p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p as u64;
            }
            base = base * base % self.p as u64;
            e >>= 1;
        }
        acc as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a % self.p) % self.p
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn is_zero(&self, a: &u32) -> bool {
        a % self.p == 0
    }

    fn better_pivot(&self, a: &u32, b: &u32) -> bool {
        !self.is_zero(a) && self.is_zero(b)
    }

    fn sub_mul(&self, a: &u32, b: &u32, c: &u32) -> u32 {
        self.add(*a, self.neg(self.mul(*b, *c)))
    }

    fn div(&self, a: &u32, b: &u32) -> u32 {
        self.mul(*a, self.inv(*b))
    }
}

/// Rank of a `rows x cols` matrix given as a list of rows.
pub fn rank<F: Field>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    let mut m: Vec<Vec<F::Elem>> = rows.to_vec();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let mut best = r;
        for i in r + 1..nrows {
            if field.better_pivot(&m[i][c], &m[best][c]) {
                best = i;
            }
        }
        if field.is_zero(&m[best][c]) {
            continue;
        }
        m.swap(r, best);
        let pivot = m[r][c].clone();
        for i in r + 1..nrows {
            if field.is_zero(&m[i][c]) {
                continue;
            }
            let factor = field.div(&m[i][c], &pivot);
            for j in c..ncols {
                let v = field.sub_mul(&m[i][j], &factor, &m[r][j]);
                m[i][j] = v;
            }
        }
        r += 1;
    }
    r
}

pub fn rank_exact(rows: &[Vec<Scalar>]) -> usize {
    rank(&Rationals, rows)
}

pub fn rank_f64(rows: &[Vec<f64>], tolerance: f64) -> usize {
    rank(&Floats { tolerance }, rows)
}

pub fn rank_mod_p(rows: &[Vec<u32>], p: u32) -> usize {
    rank(&PrimeField::new(p), rows)
}

/// Exact determinant of a square rational matrix.
pub fn det_exact(a: &[Vec<Scalar>]) -> Scalar {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Scalar::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Scalar::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            let f = &m[i][c] / &m[c][c];
            for j in c..n {
                let v = &m[i][j] - &f * &m[c][j];
                m[i][j] = v;
            }
        }
    }
    det
}

/// Determinant of a square binary64 matrix by partial-pivot elimination.
pub fn det_f64(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    det
}

/// Solve `a x = b` for square `a`; `None` if a pivot vanishes.
pub fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < f64::MIN_POSITIVE {
            return None;
        }
        m.swap(p, c);
        for i in 0..n {
            if i != c {
                let f = m[i][c] / m[c][c];
                for j in c..=n {
                    m[i][j] -= f * m[c][j];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Sign of an exact scalar as -1, 0 or 1.
pub fn sign(c: &Scalar) -> i32 {
    if c.is_zero() {
        0
    } else if c.is_positive() {
        1
    } else {
        -1
    }
}

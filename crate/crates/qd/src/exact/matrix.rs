//! Exact rational matrices (change-of-basis transforms and friends).

use super::IntVector;
use crate::error::{QdError, Result};
use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

/// Dense matrix over Q. Construction allows rectangular shapes (embeddings);
/// operations that need a square or invertible matrix assert it themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    rows: Vec<Vec<BigRational>>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Self {
        assert!(!rows.is_empty());
        let w = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == w), "ragged matrix");
        RationalMatrix { rows }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        RationalMatrix { rows }
    }

    pub fn zero(r: usize, c: usize) -> Self {
        RationalMatrix { rows: vec![vec![BigRational::zero(); c]; r] }
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Self {
        RationalMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
                .collect(),
        )
    }

    /// Columns are the given integer vectors.
    pub fn from_columns(cols: &[IntVector]) -> Self {
        assert!(!cols.is_empty());
        let n = cols[0].len();
        let mut rows = vec![vec![BigRational::zero(); cols.len()]; n];
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for i in 0..n {
                rows[i][j] = BigRational::from_integer(c.coord(i).clone());
            }
        }
        RationalMatrix { rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.rows[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> RationalMatrix {
        let (r, c) = (self.nrows(), self.ncols());
        let mut out = RationalMatrix::zero(c, r);
        for i in 0..r {
            for j in 0..c {
                out.rows[j][i] = self.rows[i][j].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.ncols(), other.nrows());
        let (r, k, c) = (self.nrows(), self.ncols(), other.ncols());
        let mut out = RationalMatrix::zero(r, c);
        for i in 0..r {
            for j in 0..c {
                let mut acc = BigRational::zero();
                for t in 0..k {
                    if !self.rows[i][t].is_zero() && !other.rows[t][j].is_zero() {
                        acc += &self.rows[i][t] * &other.rows[t][j];
                    }
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }

    pub fn mul_rational_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.ncols(), v.len());
        self.rows
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).fold(BigRational::zero(), |acc, t| acc + t))
            .collect()
    }

    pub fn mul_int_vec(&self, v: &IntVector) -> Vec<BigRational> {
        let rat: Vec<BigRational> = v.coords().iter().map(|c| BigRational::from_integer(c.clone())).collect();
        self.mul_rational_vec(&rat)
    }

    pub fn scale(&self, a: &BigRational) -> RationalMatrix {
        RationalMatrix::new(self.rows.iter().map(|r| r.iter().map(|x| x * a).collect()).collect())
    }

    /// Gauss-Jordan inverse; errors on singular or non-square input.
    pub fn inverse(&self) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(QdError::Precondition("inverse of non-square matrix".into()));
        }
        let n = self.nrows();
        let mut a = self.rows.clone();
        let mut inv = RationalMatrix::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(QdError::SingularMatrix)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= &p;
                inv[col][j] /= &p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        let t = &a[col][j] * &f;
                        a[r][j] -= t;
                        let t = &inv[col][j] * &f;
                        inv[r][j] -= t;
                    }
                }
            }
        }
        Ok(RationalMatrix::new(inv))
    }

    pub fn det_rational(&self) -> BigRational {
        assert!(self.is_square());
        let n = self.nrows();
        let mut a = self.rows.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let pivot = match (col..n).find(|&r| !a[r][col].is_zero()) {
                Some(p) => p,
                None => return BigRational::zero(),
            };
            if pivot != col {
                a.swap(col, pivot);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if !a[r][col].is_zero() {
                    let f = &a[r][col] / &p;
                    for j in col..n {
                        let t = &a[col][j] * &f;
                        a[r][j] -= t;
                    }
                }
            }
        }
        det
    }

    pub fn rank(&self) -> usize {
        let mut a = self.rows.clone();
        let (r, c) = (self.nrows(), self.ncols());
        let mut rank = 0;
        for col in 0..c {
            if rank == r {
                break;
            }
            let pivot = match (rank..r).find(|&i| !a[i][col].is_zero()) {
                Some(p) => p,
                None => continue,
            };
            a.swap(rank, pivot);
            let p = a[rank][col].clone();
            for i in rank + 1..r {
                if !a[i][col].is_zero() {
                    let f = &a[i][col] / &p;
                    for j in col..c {
                        let t = &a[rank][j] * &f;
                        a[i][j] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Basis of the rational null space {x : A x = 0}, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<BigRational>> {
        let mut a = self.rows.clone();
        let (r, c) = (self.nrows(), self.ncols());
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut row = 0;
        for col in 0..c {
            if row == r {
                break;
            }
            let pivot = match (row..r).find(|&i| !a[i][col].is_zero()) {
                Some(p) => p,
                None => continue,
            };
            a.swap(row, pivot);
            let p = a[row][col].clone();
            for j in col..c {
                a[row][j] /= &p;
            }
            for i in 0..r {
                if i != row && !a[i][col].is_zero() {
                    let f = a[i][col].clone();
                    for j in col..c {
                        let t = &a[row][j] * &f;
                        a[i][j] -= t;
                    }
                }
            }
            pivots.push((row, col));
            row += 1;
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in (0..c).filter(|j| !pivot_cols.contains(j)) {
            let mut v = vec![BigRational::zero(); c];
            v[free] = BigRational::one();
            for &(pr, pc) in &pivots {
                v[pc] = -a[pr][free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Applies the matrix to an integer point and clears denominators to a
    /// primitive integer point with positive leading coordinate.
    pub fn pushforward(&self, x: &IntVector) -> Result<IntVector> {
        if self.ncols() != x.len() {
            return Err(QdError::DimensionMismatch { expected: self.ncols(), got: x.len() });
        }
        let image = self.mul_int_vec(x);
        Ok(IntVector::from_rational_coords(&image).into_primitive_normalized())
    }

    /// Sum of squares of all entries, as a rational (used for crude operator-norm bounds).
    pub fn frobenius_sq(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for r in &self.rows {
            for v in r {
                acc += v * v;
            }
        }
        acc
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: Vec<Vec<String>>,
}

impl Serialize for RationalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr { rows: self.rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        let rows = r
            .rows
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.parse::<BigRational>().map_err(serde::de::Error::custom)).collect())
            .collect::<std::result::Result<Vec<Vec<BigRational>>, _>>()?;
        Ok(RationalMatrix::new(rows))
    }
}

//! Exact integer/rational linear algebra and directed-rounding interval reals.
//!
//! Everything downstream leans on three guarantees made here: integer results
//! are exact, interval results always contain the true value, and norms are
//! kept squared (exact integers) with square roots taken only at interval
//! boundaries.

pub mod dyadic;
pub mod interval;
pub mod matrix;

pub use dyadic::{isqrt, Dir, Dyadic};
pub use interval::{with_precision, IntervalReal, DEFAULT_PRECISION, PRECISION_CAP};
pub use matrix::RationalMatrix;

use crate::error::{QdError, Result};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// An exact lattice point of Z^{n+1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector {
    coords: Vec<BigInt>,
}

impl IntVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        assert!(!coords.is_empty(), "points need at least one coordinate");
        IntVector { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        IntVector::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(len: usize) -> Self {
        IntVector::new(vec![BigInt::zero(); len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = vec![BigInt::zero(); len];
        v[i] = BigInt::one();
        IntVector::new(v)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> &BigInt {
        &self.coords[i]
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        assert_eq!(self.len(), other.len());
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> BigInt {
        self.dot(self)
    }

    /// Euclidean norm as an interval at the given precision.
    pub fn norm_interval(&self, prec: u32) -> IntervalReal {
        IntervalReal::from_bigint(&self.norm_sq(), prec).sqrt().expect("norm_sq >= 0")
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.len(), other.len());
        IntVector::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.len(), other.len());
        IntVector::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector::new(self.coords.iter().map(|c| c * k).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector::new(self.coords.iter().map(|c| -c).collect())
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coords {
            g = g.gcd(c);
        }
        g
    }

    /// Divide by the content and make the first non-zero coordinate positive.
    pub fn into_primitive_normalized(self) -> IntVector {
        if self.is_zero() {
            return self;
        }
        let g = self.content();
        let mut v: Vec<BigInt> = self.coords.iter().map(|c| c / &g).collect();
        if let Some(first) = v.iter().find(|c| !c.is_zero()) {
            if first.is_negative() {
                for c in v.iter_mut() {
                    *c = -&*c;
                }
            }
        }
        IntVector::new(v)
    }

    /// Clears denominators of a rational vector to a (non-normalized) integer vector.
    pub fn from_rational_coords(v: &[BigRational]) -> IntVector {
        let mut lcm = BigInt::one();
        for q in v {
            lcm = lcm.lcm(q.denom());
        }
        IntVector::new(v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect())
    }

    pub fn to_rational_coords(&self) -> Vec<BigRational> {
        self.coords.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    /// Coordinate-wise decimal strings (CLI/JSON representation of bigints).
    pub fn to_decimal_strings(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_decimal_strings(strs: &[String]) -> Result<IntVector> {
        let coords = strs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(|e| QdError::BadInput(format!("bad integer {s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() {
            return Err(QdError::BadInput("point needs at least one coordinate".into()));
        }
        Ok(IntVector::new(coords))
    }

    /// Max decimal digits over the coordinates; budget guard for recurrences.
    pub fn max_digits(&self) -> u64 {
        self.coords.iter().map(|c| (c.bits() as f64 * 0.30103).ceil() as u64).max().unwrap_or(0)
    }
}

impl Serialize for IntVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_decimal_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        IntVector::from_decimal_strings(&strs).map_err(serde::de::Error::custom)
    }
}

fn check_same_len(x: &IntVector, y: &IntVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(QdError::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    Ok(())
}

/// Exact squared norm of x ∧ y: Σ_{i<j} (x_i y_j − x_j y_i)².
pub fn wedge_norm_sq(x: &IntVector, y: &IntVector) -> Result<BigInt> {
    check_same_len(x, y)?;
    let n = x.len();
    let mut acc = BigInt::zero();
    for i in 0..n {
        for j in i + 1..n {
            let m = x.coord(i) * y.coord(j) - x.coord(j) * y.coord(i);
            acc += &m * &m;
        }
    }
    Ok(acc)
}

/// The 2x2 minors of (x, y) in lexicographic (i, j) order, i < j.
pub fn wedge_coords(x: &IntVector, y: &IntVector) -> Result<Vec<BigInt>> {
    check_same_len(x, y)?;
    let n = x.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(x.coord(i) * y.coord(j) - x.coord(j) * y.coord(i));
        }
    }
    Ok(out)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(points: &[IntVector]) -> Result<BigInt> {
    let n = points.len();
    for p in points {
        if p.len() != n {
            return Err(QdError::DimensionMismatch { expected: n, got: p.len() });
        }
    }
    let mut a: Vec<Vec<BigInt>> = points.iter().map(|p| p.coords().to_vec()).collect();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = &t / &prev; // exact by Bareiss
            }
        }
        prev = a[k][k].clone();
        for i in k + 1..n {
            a[i][k] = BigInt::zero();
        }
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign < 0 { -d } else { d })
}

/// Projective distance ‖x∧y‖/(‖x‖‖y‖) as an outward-rounded interval.
pub fn proj_dist(x: &IntVector, y: &IntVector, prec: u32) -> Result<IntervalReal> {
    check_same_len(x, y)?;
    if x.is_zero() || y.is_zero() {
        return Err(QdError::ZeroVector);
    }
    let w = wedge_norm_sq(x, y)?;
    let den = x.norm_sq() * y.norm_sq();
    IntervalReal::from_ratio(&w, &den, prec).sqrt()
}

/// Interval square root; kept as a free function to mirror the interval ops.
pub fn interval_sqrt(a: &IntervalReal) -> Result<IntervalReal> {
    a.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> IntVector {
        IntVector::from_i64(c)
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge_norm_sq(&v(&[1, 0, 0]), &v(&[0, 1, 0])).unwrap(), BigInt::from(1));
        assert_eq!(wedge_norm_sq(&v(&[2, 1, 1]), &v(&[1, 1, 0])).unwrap(), BigInt::from(3));
        assert_eq!(wedge_norm_sq(&v(&[2, 4, 6]), &v(&[1, 2, 3])).unwrap(), BigInt::zero());
        assert!(wedge_norm_sq(&v(&[1, 0]), &v(&[1, 0, 0])).is_err());
    }

    #[test]
    fn det_examples() {
        let id: Vec<IntVector> = (0..3).map(|i| IntVector::unit(3, i)).collect();
        assert_eq!(det(&id).unwrap(), BigInt::one());
        let pts = [v(&[2, 1, 1]), v(&[1, 1, 0]), v(&[26, 1, 5])];
        assert_eq!(det(&pts).unwrap(), BigInt::from(-20));
        let rep = [v(&[1, 2, 3]), v(&[1, 2, 3]), v(&[0, 0, 1])];
        assert_eq!(det(&rep).unwrap(), BigInt::zero());
    }

    #[test]
    fn det_matches_laplace_oracle() {
        // Independent oracle: cofactor expansion.
        fn laplace(m: &[Vec<i64>]) -> i64 {
            let n = m.len();
            if n == 1 {
                return m[0][0];
            }
            let mut acc = 0i64;
            for j in 0..n {
                if m[0][j] == 0 {
                    continue;
                }
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                acc += s * m[0][j] * laplace(&minor);
            }
            acc
        }
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 19) as i64 - 9
        };
        for _ in 0..50 {
            let rows: Vec<Vec<i64>> = (0..4).map(|_| (0..4).map(|_| next()).collect()).collect();
            let pts: Vec<IntVector> = rows.iter().map(|r| v(r)).collect();
            assert_eq!(det(&pts).unwrap(), BigInt::from(laplace(&rows)));
        }
    }

    #[test]
    fn det_alternating() {
        let mut pts = vec![v(&[2, 1, 1]), v(&[1, 1, 0]), v(&[26, 1, 5])];
        let d = det(&pts).unwrap();
        pts.swap(0, 2);
        assert_eq!(det(&pts).unwrap(), -d);
    }

    #[test]
    fn proj_dist_examples() {
        let d = proj_dist(&v(&[1, 2, 3]), &v(&[1, 2, 3]), 64).unwrap();
        assert!(d.contains_zero());
        let thr = Dyadic { mant: BigInt::one(), exp: -62 };
        assert!(d.width().is_zero() || d.width().cmp(&thr) != std::cmp::Ordering::Greater);

        let d = proj_dist(&v(&[1, 0, 0]), &v(&[0, 1, 0]), 64).unwrap();
        assert!(d.contains_bigint(&BigInt::one()));

        // sqrt(3/12) = 1/2 exactly
        let d = proj_dist(&v(&[2, 1, 1]), &v(&[1, 1, 0]), 64).unwrap();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert!(d.contains_rational(&half));

        assert!(matches!(proj_dist(&v(&[0, 0, 0]), &v(&[1, 0, 0]), 32), Err(QdError::ZeroVector)));
    }

    #[test]
    fn lagrange_identity() {
        // ‖x‖²‖y‖² − (x·y)² = wedge_norm_sq(x,y), exact on pseudorandom inputs.
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 2001) as i64 - 1000
        };
        for _ in 0..200 {
            let x = v(&[next(), next(), next(), next()]);
            let y = v(&[next(), next(), next(), next()]);
            let lhs = x.norm_sq() * y.norm_sq() - {
                let d = x.dot(&y);
                &d * &d
            };
            assert_eq!(lhs, wedge_norm_sq(&x, &y).unwrap());
        }
    }

    #[test]
    fn proj_dist_triangle_inequality() {
        let pts = [v(&[2, 1, 1]), v(&[1, 1, 0]), v(&[26, 1, 5]), v(&[466, 17, 89]), v(&[1, 0, 0])];
        for x in &pts {
            for y in &pts {
                for z in &pts {
                    let xz = proj_dist(x, z, 96).unwrap();
                    let xy = proj_dist(x, y, 96).unwrap();
                    let yz = proj_dist(y, z, 96).unwrap();
                    let sum = xy.add(&yz);
                    assert!(
                        xz.lo.cmp(&sum.hi) != std::cmp::Ordering::Greater,
                        "triangle inequality violated at interval level"
                    );
                }
            }
        }
    }

    #[test]
    fn primitive_normalization() {
        let p = v(&[-4, 0, -6]).into_primitive_normalized();
        assert_eq!(p, v(&[2, 0, 3]));
    }
}

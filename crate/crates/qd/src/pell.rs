//! Pell-equation and trinomial-equation solvers that seed the extremal
//! construction.
//!
//! The fundamental solution comes from the periodic continued fraction of √a,
//! run entirely on integer (P, Q) pairs.

use crate::error::{QdError, Result};
use crate::exact::isqrt;
use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellSolution {
    pub u: BigInt,
    pub v: BigInt,
    pub a: BigInt,
}

#[derive(Serialize, Deserialize)]
struct PellRepr {
    u: String,
    v: String,
    a: String,
}

impl Serialize for PellSolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PellRepr { u: self.u.to_string(), v: self.v.to_string(), a: self.a.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PellSolution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let r = PellRepr::deserialize(d)?;
        Ok(PellSolution {
            u: r.u.parse().map_err(D::Error::custom)?,
            v: r.v.parse().map_err(D::Error::custom)?,
            a: r.a.parse().map_err(D::Error::custom)?,
        })
    }
}

impl PellSolution {
    fn check(&self) -> bool {
        &self.u * &self.u - &self.a * &self.v * &self.v == BigInt::one() && !self.v.is_zero()
    }
}

pub fn is_square(a: &BigInt) -> bool {
    if a.is_negative() {
        return false;
    }
    let r = isqrt(a);
    &r * &r == *a
}

/// Minimal positive solution of u² − a·v² = 1 via the continued fraction of √a.
pub fn pell_fundamental(a: &BigInt) -> Result<PellSolution> {
    if !a.is_positive() || is_square(a) {
        return Err(QdError::Precondition(format!("Pell parameter must be a positive non-square, got {a}")));
    }
    let a0 = isqrt(a);
    // CF state: sqrt(a) = a0; (m, d, c) with c_k = floor((a0 + m_k)/d_k)
    let mut m = BigInt::zero();
    let mut d = BigInt::one();
    let mut c = a0.clone();
    // convergents h/k
    let (mut h_prev, mut h) = (BigInt::one(), a0.clone());
    let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
    loop {
        if &h * &h - a * &k * &k == BigInt::one() && !k.is_zero() {
            return Ok(PellSolution { u: h, v: k, a: a.clone() });
        }
        m = &d * &c - &m;
        d = (a - &m * &m) / &d;
        c = (&a0 + &m) / &d;
        let h_next = &c * &h + &h_prev;
        let k_next = &c * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
    }
}

/// First `count` solutions, strictly increasing v, via the group law
/// (u', v') = (u₁u + a v₁v, u₁v + v₁u).
pub fn pell_solutions(a: &BigInt, count: usize) -> Result<Vec<PellSolution>> {
    let fundamental = pell_fundamental(a)?;
    let mut out = Vec::with_capacity(count);
    let (mut u, mut v) = (fundamental.u.clone(), fundamental.v.clone());
    for _ in 0..count {
        let sol = PellSolution { u: u.clone(), v: v.clone(), a: a.clone() };
        debug_assert!(sol.check());
        out.push(sol);
        let nu = &fundamental.u * &u + a * &fundamental.v * &v;
        let nv = &fundamental.u * &v + &fundamental.v * &u;
        u = nu;
        v = nv;
    }
    Ok(out)
}

/// Smallest |m| in sweep order 0, 1, −1, 2, −2, … with a·m² + b positive and
/// not a square. Terminates for every a > 0, b ≠ 0.
pub fn nonsquare_shift(a: &BigInt, b: &BigInt) -> BigInt {
    assert!(a.is_positive());
    assert!(!b.is_zero());
    let mut k = 0i64;
    loop {
        for m in [BigInt::from(k), BigInt::from(-k)] {
            let val = a * &m * &m + b;
            if val.is_positive() && !is_square(&val) {
                return m;
            }
            if k == 0 {
                break;
            }
        }
        k += 1;
    }
}

/// A solution of x² − a·y² − b·z² = 1 with x·z ≠ 0 (a > 0).
///
/// b = 0 uses (1, 0, 1); otherwise substitute y = m·z with a·m² + b a positive
/// non-square c, and solve the Pell equation x² − c·z² = 1.
pub fn trinomial_solve(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if !a.is_positive() {
        return Err(QdError::Precondition(format!("trinomial parameter a must be positive, got {a}")));
    }
    let (x, y, z) = if b.is_zero() {
        (BigInt::one(), BigInt::zero(), BigInt::one())
    } else {
        let m = nonsquare_shift(a, b);
        let c = a * &m * &m + b;
        let pell = pell_fundamental(&c)?;
        (pell.u, &m * &pell.v, pell.v)
    };
    let check = &x * &x - a * &y * &y - b * &z * &z;
    if check != BigInt::one() || (&x * &z).is_zero() {
        return Err(QdError::Precondition(format!(
            "internal trinomial check failed for a={a}, b={b}: got ({x},{y},{z})"
        )));
    }
    Ok((x, y, z))
}

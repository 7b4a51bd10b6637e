//! Outward-rounded interval reals on top of [`Dyadic`].
//!
//! The invariant maintained by every operation: if the true real inputs lie in
//! their argument intervals, the true result lies in the output interval.
//! Callers that need tighter enclosures retry at doubled precision.

use super::dyadic::{Dir, Dyadic};
use crate::error::{QdError, Result};
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

pub const DEFAULT_PRECISION: u32 = 128;
pub const PRECISION_CAP: u32 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalReal {
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub prec: u32,
}

impl IntervalReal {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        debug_assert!(lo.cmp(&hi) != Ordering::Greater, "inverted interval");
        IntervalReal { lo, hi, prec }
    }

    pub fn zero(prec: u32) -> Self {
        IntervalReal::new(Dyadic::zero(), Dyadic::zero(), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        let d = Dyadic::from_bigint(n);
        IntervalReal::new(d.round(prec, Dir::Down), d.round(prec, Dir::Up), prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), prec)
    }

    /// Enclosure of the exact rational num/den (den ≠ 0).
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero());
        let n = Dyadic::from_bigint(num);
        let d = Dyadic::from_bigint(den);
        IntervalReal::new(n.div(&d, prec, Dir::Down), n.div(&d, prec, Dir::Up), prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Self::from_ratio(q.numer(), q.denom(), prec)
    }

    fn join_prec(&self, other: &IntervalReal) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn add(&self, other: &IntervalReal) -> IntervalReal {
        let p = self.join_prec(other);
        IntervalReal::new(self.lo.add(&other.lo, p, Dir::Down), self.hi.add(&other.hi, p, Dir::Up), p)
    }

    pub fn sub(&self, other: &IntervalReal) -> IntervalReal {
        let p = self.join_prec(other);
        IntervalReal::new(self.lo.sub(&other.hi, p, Dir::Down), self.hi.sub(&other.lo, p, Dir::Up), p)
    }

    pub fn neg(&self) -> IntervalReal {
        IntervalReal::new(self.hi.neg(), self.lo.neg(), self.prec)
    }

    pub fn mul(&self, other: &IntervalReal) -> IntervalReal {
        let p = self.join_prec(other);
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let down = a.mul(b, p, Dir::Down);
                let up = a.mul(b, p, Dir::Up);
                lo = Some(match lo {
                    None => down,
                    Some(c) => {
                        if down.cmp(&c) == Ordering::Less {
                            down
                        } else {
                            c
                        }
                    }
                });
                hi = Some(match hi {
                    None => up,
                    Some(c) => {
                        if up.cmp(&c) == Ordering::Greater {
                            up
                        } else {
                            c
                        }
                    }
                });
            }
        }
        IntervalReal::new(lo.unwrap(), hi.unwrap(), p)
    }

    pub fn mul_bigint(&self, k: &BigInt) -> IntervalReal {
        let p = self.prec;
        if k.is_negative() {
            IntervalReal::new(self.hi.mul_bigint(k, p, Dir::Down), self.lo.mul_bigint(k, p, Dir::Up), p)
        } else {
            IntervalReal::new(self.lo.mul_bigint(k, p, Dir::Down), self.hi.mul_bigint(k, p, Dir::Up), p)
        }
    }

    /// Tight enclosure of x², never dipping below 0.
    pub fn square(&self) -> IntervalReal {
        let p = self.prec;
        if self.contains_zero() {
            let a = self.lo.mul(&self.lo, p, Dir::Up);
            let b = self.hi.mul(&self.hi, p, Dir::Up);
            let hi = if a.cmp(&b) == Ordering::Greater { a } else { b };
            IntervalReal::new(Dyadic::zero(), hi, p)
        } else {
            self.mul(self)
        }
    }

    pub fn div(&self, other: &IntervalReal) -> Result<IntervalReal> {
        if other.contains_zero() {
            return Err(QdError::DivisorContainsZero);
        }
        let p = self.join_prec(other);
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let down = a.div(b, p, Dir::Down);
                let up = a.div(b, p, Dir::Up);
                lo = Some(match lo {
                    None => down,
                    Some(c) => {
                        if down.cmp(&c) == Ordering::Less {
                            down
                        } else {
                            c
                        }
                    }
                });
                hi = Some(match hi {
                    None => up,
                    Some(c) => {
                        if up.cmp(&c) == Ordering::Greater {
                            up
                        } else {
                            c
                        }
                    }
                });
            }
        }
        Ok(IntervalReal::new(lo.unwrap(), hi.unwrap(), p))
    }

    /// Outward enclosure of sqrt; requires lo ≥ 0.
    pub fn sqrt(&self) -> Result<IntervalReal> {
        if self.lo.is_negative() {
            return Err(QdError::NegativeRadicand);
        }
        let p = self.prec;
        Ok(IntervalReal::new(self.lo.sqrt(p, Dir::Down), self.hi.sqrt(p, Dir::Up), p))
    }

    /// sqrt after clamping a slightly-negative lower bound to 0 (for sums of
    /// squares whose outward rounding may dip below zero).
    pub fn sqrt_clamped(&self) -> Result<IntervalReal> {
        if self.hi.is_negative() {
            return Err(QdError::NegativeRadicand);
        }
        let lo = if self.lo.is_negative() { Dyadic::zero() } else { self.lo.clone() };
        IntervalReal::new(lo, self.hi.clone(), self.prec).sqrt()
    }

    pub fn abs(&self) -> IntervalReal {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let a = self.lo.neg();
            let hi = if a.cmp(&self.hi) == Ordering::Greater { a } else { self.hi.clone() };
            IntervalReal::new(Dyadic::zero(), hi, self.prec)
        }
    }

    pub fn max(&self, other: &IntervalReal) -> IntervalReal {
        let p = self.join_prec(other);
        let lo = if self.lo.cmp(&other.lo) == Ordering::Greater { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi.cmp(&other.hi) == Ordering::Greater { self.hi.clone() } else { other.hi.clone() };
        IntervalReal::new(lo, hi, p)
    }

    pub fn min(&self, other: &IntervalReal) -> IntervalReal {
        let p = self.join_prec(other);
        let lo = if self.lo.cmp(&other.lo) == Ordering::Less { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi.cmp(&other.hi) == Ordering::Less { self.hi.clone() } else { other.hi.clone() };
        IntervalReal::new(lo, hi, p)
    }

    /// Natural log, requires a certified-positive interval.
    pub fn ln(&self) -> Result<IntervalReal> {
        if !self.lo.is_positive() {
            return Err(QdError::LogNotPositive);
        }
        let p = self.prec;
        Ok(IntervalReal::new(ln_dyadic(&self.lo, p, Dir::Down), ln_dyadic(&self.hi, p, Dir::Up), p))
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_bigint(&self, n: &BigInt) -> bool {
        let d = Dyadic::from_bigint(n);
        self.lo.cmp(&d) != Ordering::Greater && self.hi.cmp(&d) != Ordering::Less
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        // lo <= q  <=>  lo*den <= num (den > 0 after normalization)
        let den = q.denom().clone();
        let num = q.numer().clone();
        debug_assert!(den.is_positive());
        let p = self.prec.max(64);
        let lo_scaled = self.lo.mul_bigint(&den, p + 64, Dir::Down);
        let hi_scaled = self.hi.mul_bigint(&den, p + 64, Dir::Up);
        let nd = Dyadic::from_bigint(&num);
        lo_scaled.cmp(&nd) != Ordering::Greater && hi_scaled.cmp(&nd) != Ordering::Less
    }

    pub fn is_strictly_less(&self, other: &IntervalReal) -> bool {
        self.hi.cmp(&other.lo) == Ordering::Less
    }

    pub fn is_certainly_ge(&self, other: &IntervalReal) -> bool {
        self.lo.cmp(&other.hi) != Ordering::Less
    }

    /// Certified x ≤ y (true only when provable at the current enclosures).
    pub fn is_certainly_le(&self, other: &IntervalReal) -> bool {
        self.hi.cmp(&other.lo) != Ordering::Greater
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo, self.prec, Dir::Up)
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }

    /// Printable lo/hi pair, outward-rounded decimals.
    pub fn display_pair(&self, digits: u32) -> (String, String) {
        (self.lo.to_decimal(digits, Dir::Down), self.hi.to_decimal(digits, Dir::Up))
    }
}

/// Serialized form keeps exact dyadic endpoints so round-trips are lossless.
#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo_mant: String,
    lo_exp: i64,
    hi_mant: String,
    hi_exp: i64,
    prec: u32,
}

impl Serialize for IntervalReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr {
            lo_mant: self.lo.mant.to_string(),
            lo_exp: self.lo.exp,
            hi_mant: self.hi.mant.to_string(),
            hi_exp: self.hi.exp,
            prec: self.prec,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        let lo = Dyadic { mant: r.lo_mant.parse().map_err(serde::de::Error::custom)?, exp: r.lo_exp };
        let hi = Dyadic { mant: r.hi_mant.parse().map_err(serde::de::Error::custom)?, exp: r.hi_exp };
        Ok(IntervalReal::new(lo, hi, r.prec))
    }
}

/// ln(2) enclosure via 2·atanh(1/3) = 2·Σ 3^{-(2k+1)}/(2k+1).
fn ln2(prec: u32, dir: Dir) -> Dyadic {
    // Partial sums with exact rationals; truncation error < next term · 9/8.
    let terms = (prec as usize) / 3 + 4;
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    // sum_{k=0}^{terms-1} 1/((2k+1)·3^(2k+1)), common denominator handled incrementally
    for k in 0..terms {
        let t_den = BigInt::from(2 * k as i64 + 1) * BigInt::from(3).pow(2 * k as u32 + 1);
        num = &num * &t_den + &den;
        den *= &t_den;
    }
    let sum = Dyadic::from_bigint(&num).div(&Dyadic::from_bigint(&den), prec + 8, Dir::Down);
    let two = Dyadic::from_i64(2);
    match dir {
        Dir::Down => sum.mul(&two, prec, Dir::Down),
        Dir::Up => {
            // add a bound on the truncation tail: next term ·2·(9/8)
            let tail_mag = -(2 * terms as i64 + 1) * 2 + 4;
            let tail = Dyadic { mant: BigInt::one(), exp: tail_mag };
            sum.mul(&two, prec + 8, Dir::Up).add(&tail, prec, Dir::Up)
        }
    }
}

/// ln of a positive dyadic with directed rounding.
///
/// Writes x = m̂ · 2^s with m̂ ∈ [1,2), then ln x = ln m̂ + s·ln 2 with the
/// atanh series ln m̂ = 2·atanh((m̂−1)/(m̂+1)).
fn ln_dyadic(x: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
    assert!(x.is_positive());
    let s = x.mag2() - 1; // x = m̂·2^s, m̂ in [1,2)
    let mhat = Dyadic { mant: x.mant.clone(), exp: x.exp - s };
    let p = prec + 16;
    let one = Dyadic::from_i64(1);
    let two = Dyadic::from_i64(2);
    // t = (m̂-1)/(m̂+1) ∈ [0, 1/3)
    let t_num = mhat.sub(&one, p, Dir::Down);
    let t_den = mhat.add(&one, p, Dir::Up);
    let (t_lo, t_hi) = (
        t_num.div(&t_den, p, Dir::Down),
        mhat.sub(&one, p, Dir::Up).div(&mhat.add(&one, p, Dir::Down), p, Dir::Up),
    );
    let atanh = |t: &Dyadic, d: Dir| -> Dyadic {
        // 2·(t + t^3/3 + t^5/5 + ...); |t| < 1/3 so term ratio < 1/9
        let mut sum = Dyadic::zero();
        let mut power = t.clone();
        let t2 = t.mul(t, p, d);
        let mut k = 1i64;
        loop {
            let term = power.div(&Dyadic::from_i64(k), p, d);
            if term.is_zero() || term.mag2() < -(prec as i64 + 8) {
                if d == Dir::Up && !term.is_zero() {
                    // tail bound: term · (1/(1-1/9)) < term·9/8 < 2·term
                    sum = sum.add(&term.mul(&two, p, Dir::Up), p, Dir::Up);
                }
                break;
            }
            sum = sum.add(&term, p, d);
            power = power.mul(&t2, p, d);
            k += 2;
        }
        sum.mul(&two, p, d)
    };
    let ln_m = match dir {
        Dir::Down => atanh(&t_lo, Dir::Down),
        Dir::Up => atanh(&t_hi, Dir::Up),
    };
    let s_big = BigInt::from(s);
    let ln2_term = if s >= 0 { ln2(p, dir) } else { ln2(p, dir.flip()) };
    ln_m.add(&ln2_term.mul_bigint(&s_big, p, dir), prec, dir)
}

/// Run `f` at doubling precision until it succeeds, up to the cap.
pub fn with_precision<T>(start: u32, cap: u32, mut f: impl FnMut(u32) -> Result<Option<T>>, context: &str) -> Result<T> {
    let mut p = start.max(8);
    loop {
        if let Some(v) = f(p)? {
            return Ok(v);
        }
        if p >= cap {
            return Err(QdError::PrecisionExhausted { bits: p, context: context.to_string() });
        }
        p = (p * 2).min(cap);
    }
}

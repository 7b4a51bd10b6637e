//! Dyadic reals m·2^e with directed rounding.
//!
//! Every rounding primitive takes an explicit direction so the interval layer
//! can round outward. Arithmetic is exact up to the final rounding step.

use num::bigint::Sign;
use num::{BigInt, Integer, One, Signed, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    pub mant: BigInt,
    pub exp: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Dyadic { mant: n.clone(), exp: 0 }
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic { mant: BigInt::from(n), exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Exponent of the leading bit, i.e. floor(log2 |x|) + 1. Zero for x = 0.
    pub fn mag2(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.exp + self.bits() as i64
        }
    }

    /// Round to at most `prec` mantissa bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Dir) -> Dyadic {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let mant = shift_round(&self.mant, shift, dir);
        Dyadic { mant, exp: self.exp + shift as i64 }
    }

    pub fn add(&self, other: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        if self.is_zero() {
            return other.round(prec, dir);
        }
        if other.is_zero() {
            return self.round(prec, dir);
        }
        // If the operands are too far apart in scale, aligning them exactly
        // would allocate an enormous mantissa; nudge the larger one instead.
        let (big, small) = if self.mag2() >= other.mag2() { (self, other) } else { (other, self) };
        let gap = big.mag2() - small.mag2();
        if gap > prec as i64 + 4 {
            let r = big.round(prec, dir);
            return r.nudge_if(small.mant.sign(), prec, dir);
        }
        let (a, b) = (self, other);
        let exp = a.exp.min(b.exp);
        let ma = &a.mant << (a.exp - exp) as u64;
        let mb = &b.mant << (b.exp - exp) as u64;
        Dyadic { mant: ma + mb, exp }.round(prec, dir)
    }

    pub fn sub(&self, other: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        self.add(&other.neg(), prec, dir)
    }

    pub fn mul(&self, other: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }.round(prec, dir)
    }

    pub fn mul_bigint(&self, k: &BigInt, prec: u32, dir: Dir) -> Dyadic {
        Dyadic { mant: &self.mant * k, exp: self.exp }.round(prec, dir)
    }

    /// Quotient self/other rounded in `dir`. `other` must be non-zero.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let na = self.bits() as i64;
        let nb = other.bits() as i64;
        // Scale numerator so the integer quotient carries prec+2 significant
        // bits. div_floor/div_ceil round the quotient value itself, so no
        // direction adjustment is needed for negative divisors.
        let k = (prec as i64 + 2 + nb - na).max(0) as u64;
        let num = &self.mant << k;
        let q = div_round(&num, &other.mant, dir);
        Dyadic { mant: q, exp: self.exp - other.exp - k as i64 }.round(prec, dir)
    }

    /// Square root rounded in `dir`; self must be ≥ 0.
    pub fn sqrt(&self, prec: u32, dir: Dir) -> Dyadic {
        assert!(!self.is_negative(), "dyadic sqrt of negative");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // Normalize to m·2^(2t) with m carrying ≥ 2·prec+4 bits.
        let want = 2 * prec as i64 + 4;
        let extra = (want - self.bits() as i64).max(0);
        let extra = if (self.exp - extra) % 2 != 0 { extra + 1 } else { extra };
        let m = &self.mant << extra as u64;
        let e = self.exp - extra;
        debug_assert!(e % 2 == 0);
        let s = isqrt(&m);
        // s^2 <= m < (s+1)^2, so s·2^(e/2) <= sqrt(x) < (s+1)·2^(e/2).
        let mant = match dir {
            Dir::Down => s,
            Dir::Up => {
                if (&s * &s) == m {
                    s
                } else {
                    s + BigInt::one()
                }
            }
        };
        Dyadic { mant, exp: e / 2 }.round(prec, dir)
    }

    /// Add one ulp (at precision `prec`) in direction `dir` when `sign` points that way.
    fn nudge_if(&self, sign: Sign, prec: u32, dir: Dir) -> Dyadic {
        let needed = match dir {
            Dir::Down => sign == Sign::Minus,
            Dir::Up => sign == Sign::Plus,
        };
        if !needed {
            return self.clone();
        }
        let ulp_exp = self.mag2() - prec as i64;
        let step = match dir {
            Dir::Down => -BigInt::one(),
            Dir::Up => BigInt::one(),
        };
        self.add(&Dyadic { mant: step, exp: ulp_exp }, prec, dir)
    }

    pub fn cmp(&self, other: &Dyadic) -> Ordering {
        let sa = self.mant.sign();
        let sb = other.mant.sign();
        if sa != sb {
            return match (sa, sb) {
                (Sign::Minus, _) => Ordering::Less,
                (_, Sign::Minus) => Ordering::Greater,
                (Sign::NoSign, Sign::Plus) => Ordering::Less,
                (Sign::Plus, Sign::NoSign) => Ordering::Greater,
                _ => Ordering::Equal,
            };
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same non-zero sign: compare magnitudes via leading-bit position first.
        let (ma, mb) = (self.mag2(), other.mag2());
        if ma != mb {
            let mag_ord = ma.cmp(&mb);
            return if sa == Sign::Plus { mag_ord } else { mag_ord.reverse() };
        }
        let exp = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - exp) as u64;
        let b = &other.mant << (other.exp - exp) as u64;
        a.cmp(&b)
    }

    /// Best-effort f64 value (diagnostics only, not certified).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (m, e) = if bits > 64 {
            let shift = bits - 64;
            let m = shift_round(&self.mant, shift, Dir::Down);
            (m, self.exp + shift as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_string().parse::<f64>().unwrap_or(f64::NAN);
        mf * 2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Decimal string rounded outward in `dir`, with `digits` significant digits.
    pub fn to_decimal(&self, digits: u32, dir: Dir) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // value = mant · 2^exp; produce d · 10^k with d having `digits` digits.
        let dec_exp_approx = (self.mag2() as f64 * std::f64::consts::LN_2 / std::f64::consts::LN_10).floor() as i64;
        let k = dec_exp_approx - digits as i64;
        // d = round_dir(mant · 2^exp · 10^(−k))
        let ten = BigInt::from(10);
        let (num, den): (BigInt, BigInt) = if k >= 0 {
            let p = ten.pow(k as u32);
            if self.exp >= 0 {
                (&self.mant << self.exp as u64, p)
            } else {
                (self.mant.clone(), p << (-self.exp) as u64)
            }
        } else {
            let p = ten.pow((-k) as u32);
            if self.exp >= 0 {
                ((&self.mant * p) << self.exp as u64, BigInt::one())
            } else {
                (&self.mant * p, BigInt::one() << (-self.exp) as u64)
            }
        };
        let d = div_round(&num, &den, dir);
        if k == 0 {
            format!("{}", d)
        } else {
            format!("{}e{}", d, k)
        }
    }
}

/// Floor or ceiling shift right.
fn shift_round(m: &BigInt, shift: u64, dir: Dir) -> BigInt {
    match dir {
        Dir::Down => m >> shift, // BigInt shr rounds toward -inf
        Dir::Up => -(&(-m) >> shift),
    }
}

/// Floor or ceiling integer division (den may be negative; direction refers to the quotient value).
fn div_round(num: &BigInt, den: &BigInt, dir: Dir) -> BigInt {
    match dir {
        Dir::Down => num.div_floor(den),
        Dir::Up => num.div_ceil(den),
    }
}

/// Floor square root of a non-negative BigInt.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative());
    n.sqrt()
}

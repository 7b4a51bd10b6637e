//! Internal integer helpers: primality, factorization, square utilities.

use crate::error::{QdError, Result};
use num::{BigInt, BigUint, Integer, One, Signed, Zero};

const TRIAL_BOUND: u64 = 1_000_000;

/// Deterministic Miller-Rabin for n < 3.317e24 (fixed witness set); for larger
/// n the same witnesses make this a strong probable-prime test.
pub(crate) fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint) -> Option<BigUint> {
    // Brent's variant with deterministic parameter sweep.
    let one = BigUint::one();
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    for c in 1u64..=20 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        let mut iterations = 0u64;
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
            iterations += 1;
            if iterations > 2_000_000 {
                break;
            }
        }
        if !d.is_one() && d != *n {
            return Some(d);
        }
    }
    let _ = one;
    None
}

/// Prime factorization of |n| (n ≠ 0) as (prime, multiplicity) pairs, ascending.
/// Trial division up to 10^6, then Miller-Rabin plus Pollard rho; refuses to
/// guess when the cofactor resists.
pub(crate) fn factor(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    assert!(!n.is_zero());
    let mut m = n.abs().to_biguint().expect("abs is non-negative");
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigUint, k: u32, out: &mut Vec<(BigInt, u32)>| {
        out.push((BigInt::from(p), k));
    };
    for p in std::iter::once(2u64).chain((3..=TRIAL_BOUND).step_by(2)) {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        if (&m % &pb).is_zero() {
            let mut k = 0;
            while (&m % &pb).is_zero() {
                m /= &pb;
                k += 1;
            }
            push(pb, k, &mut out);
        }
        if m.is_one() {
            break;
        }
    }
    if !m.is_one() {
        // cofactor: prime, or split recursively with rho
        let mut stack = vec![m];
        let mut extra: Vec<BigUint> = Vec::new();
        while let Some(c) = stack.pop() {
            if c.is_one() {
                continue;
            }
            if c < BigUint::from(TRIAL_BOUND).pow(2) || is_prime(&c) {
                extra.push(c);
                continue;
            }
            match pollard_rho(&c) {
                Some(d) => {
                    stack.push(&c / &d);
                    stack.push(d);
                }
                None => return Err(QdError::FactorizationNeeded(c.to_string())),
            }
        }
        extra.sort();
        let mut i = 0;
        while i < extra.len() {
            let mut k = 1;
            while i + 1 < extra.len() && extra[i + 1] == extra[i] {
                k += 1;
                i += 1;
            }
            push(extra[i].clone(), k, &mut out);
            i += 1;
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// n with square factors found by trial division ≤ 10^6 stripped; preserves
/// sign. Not a full squarefree part when huge square prime factors remain,
/// which is fine for the callers (only non-squareness matters).
pub(crate) fn strip_small_squares(n: &BigInt) -> BigInt {
    if n.is_zero() {
        return BigInt::zero();
    }
    let mut m = n.abs();
    let mut out = BigInt::one();
    for p in std::iter::once(2u64).chain((3..=TRIAL_BOUND).step_by(2)) {
        let pb = BigInt::from(p);
        let p2 = &pb * &pb;
        if &p2 > &m {
            break;
        }
        while (&m % &p2).is_zero() {
            m /= &p2;
        }
        if (&m % &pb).is_zero() {
            m /= &pb;
            out *= &pb;
        }
    }
    let res = out * m;
    if n.is_negative() {
        -res
    } else {
        res
    }
}

/// Legendre symbol (u/p) for an odd prime p and u coprime to p: ±1.
pub(crate) fn legendre(u: &BigInt, p: &BigInt) -> i32 {
    let pm1_half: BigInt = (p - 1) / 2;
    let um = u.mod_floor(p);
    debug_assert!(!um.is_zero());
    let r = um.modpow(&pm1_half, p);
    if r.is_one() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_basics() {
        assert!(is_prime(&BigUint::from(2u32)));
        assert!(is_prime(&BigUint::from(1_000_003u64)));
        assert!(!is_prime(&BigUint::from(1_000_001u64))); // 101 · 9901
        assert!(is_prime(&BigUint::parse_bytes(b"2305843009213693951", 10).unwrap())); // M61
    }

    #[test]
    fn factor_examples() {
        let f = factor(&BigInt::from(-360)).unwrap();
        assert_eq!(f, vec![(BigInt::from(2), 3), (BigInt::from(3), 2), (BigInt::from(5), 1)]);
        let semiprime = BigInt::from(1_000_003i64) * BigInt::from(2_000_003i64);
        let f = factor(&semiprime).unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn strip_squares() {
        assert_eq!(strip_small_squares(&BigInt::from(72)), BigInt::from(2)); // 36·2
        assert_eq!(strip_small_squares(&BigInt::from(-50)), BigInt::from(-2));
        assert_eq!(strip_small_squares(&BigInt::from(7)), BigInt::from(7));
    }

    #[test]
    fn legendre_small() {
        let p = BigInt::from(5);
        assert_eq!(legendre(&BigInt::from(1), &p), 1);
        assert_eq!(legendre(&BigInt::from(2), &p), -1);
        assert_eq!(legendre(&BigInt::from(4), &p), 1);
    }
}

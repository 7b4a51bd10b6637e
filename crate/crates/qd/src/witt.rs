//! Isotropy over Q, Hilbert symbols, hyperbolic splitting, the full Witt
//! decomposition, and isotropic vectors avoiding prescribed subspaces.
//!
//! Rational isotropy of the non-degenerate part is decided by rank: indefinite
//! forms of rank ≥ 5 are isotropic (Meyer), ranks 2–4 go through local
//! conditions at ∞, 2 and the primes of the coefficients. Witnesses come from
//! plain max-norm shell enumeration under a configurable cap.

use crate::arith::{factor, is_prime, legendre};
use crate::error::{QdError, Result};
use crate::exact::{IntVector, RationalMatrix};
use crate::pell::is_square;
use crate::qform::QuadraticForm;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub const DEFAULT_WITNESS_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittDecomposition {
    pub kernel_basis: Vec<IntVector>,
    pub hyperbolic_pairs: Vec<(IntVector, IntVector)>,
    pub anisotropic_basis: Vec<IntVector>,
    pub witt_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Infinity,
    Prime(BigInt),
}

impl Place {
    pub fn parse(s: &str) -> Result<Place> {
        if s == "inf" || s == "infinity" || s == "oo" {
            return Ok(Place::Infinity);
        }
        let p: BigInt = s.parse().map_err(|_| QdError::InvalidPlace(s.to_string()))?;
        if p.is_positive() && is_prime(&p.to_biguint().unwrap()) {
            Ok(Place::Prime(p))
        } else {
            Err(QdError::InvalidPlace(s.to_string()))
        }
    }
}

/// Hilbert symbol (a, b)_v for non-zero rationals at a prime or infinite place.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: &Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(QdError::Precondition("Hilbert symbol arguments must be non-zero".into()));
    }
    // Only the square class matters: replace by numerator · denominator.
    let a = a.numer() * a.denom();
    let b = b.numer() * b.denom();
    match place {
        Place::Infinity => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Prime(p) => {
            if !p.is_positive() || !is_prime(&p.to_biguint().unwrap()) {
                return Err(QdError::InvalidPlace(p.to_string()));
            }
            let (alpha, u) = split_valuation(&a, p);
            let (beta, v) = split_valuation(&b, p);
            let two = BigInt::from(2);
            if *p == two {
                let eps = |x: &BigInt| -> BigInt { ((x - BigInt::one()) / &two).mod_floor(&two) };
                let omega = |x: &BigInt| -> BigInt { ((x * x - BigInt::one()) / BigInt::from(8)).mod_floor(&two) };
                let e = eps(&u) * eps(&v) + BigInt::from(alpha) * omega(&v) + BigInt::from(beta) * omega(&u);
                Ok(if e.mod_floor(&two).is_zero() { 1 } else { -1 })
            } else {
                let mut s = 1i32;
                if beta % 2 == 1 {
                    s *= legendre(&u, p);
                }
                if alpha % 2 == 1 {
                    s *= legendre(&v, p);
                }
                if alpha % 2 == 1 && beta % 2 == 1 {
                    // (−1)^{(p−1)/2}
                    if ((p - BigInt::one()) / &two).is_odd() {
                        s = -s;
                    }
                }
                Ok(s)
            }
        }
    }
}

fn split_valuation(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut k = 0;
    let mut m = n.clone();
    while (&m % p).is_zero() {
        m /= p;
        k += 1;
    }
    (k, m)
}

fn rational_is_square(q: &BigRational) -> bool {
    !q.is_negative() && is_square(q.numer()) && is_square(q.denom())
}

/// True iff `d` is a square in Q_p.
fn is_square_in_qp(d: &BigRational, p: &BigInt) -> bool {
    let n = d.numer() * d.denom();
    if n.is_zero() {
        return true;
    }
    let (val, u) = split_valuation(&n.abs(), p);
    if val % 2 == 1 {
        return false;
    }
    let u = if n.is_negative() { -u } else { u };
    if *p == BigInt::from(2) {
        u.mod_floor(&BigInt::from(8)) == BigInt::one()
    } else {
        legendre(&u.mod_floor(p), p) == 1
    }
}

/// Odd primes dividing any of the given rationals (numerator or denominator).
fn odd_primes_of(values: &[BigRational]) -> Result<Vec<BigInt>> {
    let mut primes = Vec::new();
    for v in values {
        let n = v.numer() * v.denom();
        if n.is_zero() {
            continue;
        }
        for (p, _) in factor(&n)? {
            if p != BigInt::from(2) && !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort();
    Ok(primes)
}

/// Rational isotropy of the non-degenerate part of q: true iff the rank part
/// has a non-trivial rational zero. Kernel vectors are zeros of the polynomial
/// but do not count here.
pub fn is_isotropic(q: &QuadraticForm) -> Result<bool> {
    let (_, diag) = q.diagonalize();
    let d: Vec<BigRational> = diag.into_iter().filter(|a| !a.is_zero()).collect();
    is_isotropic_diag(&d)
}

fn is_isotropic_diag(d: &[BigRational]) -> Result<bool> {
    let r = d.len();
    if r <= 1 {
        return Ok(false);
    }
    let has_pos = d.iter().any(|a| a.is_positive());
    let has_neg = d.iter().any(|a| a.is_negative());
    if !(has_pos && has_neg) {
        return Ok(false); // definite over R
    }
    if r >= 5 {
        return Ok(true); // Meyer: indefinite of rank >= 5
    }
    match r {
        2 => Ok(rational_is_square(&-(&d[0] * &d[1]))),
        3 => {
            let a = -(&d[0] * &d[1]);
            let b = -(&d[0] * &d[2]);
            let mut places = vec![Place::Infinity, Place::Prime(BigInt::from(2))];
            for p in odd_primes_of(&[a.clone(), b.clone()])? {
                places.push(Place::Prime(p));
            }
            for place in &places {
                if hilbert_symbol(&a, &b, place)? != 1 {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        4 => {
            // isotropic over Q_v unless disc is a square there and the Hasse
            // invariant differs from (−1,−1)_v; R handled by the sign test.
            let disc = d.iter().fold(BigRational::one(), |acc, a| acc * a);
            let minus_one = BigRational::from_integer(BigInt::from(-1));
            let mut places = vec![Place::Prime(BigInt::from(2))];
            for p in odd_primes_of(d)? {
                places.push(Place::Prime(p));
            }
            for place in &places {
                let p = match place {
                    Place::Prime(p) => p,
                    Place::Infinity => unreachable!(),
                };
                if !is_square_in_qp(&disc, p) {
                    continue;
                }
                let mut hasse = 1i32;
                for i in 0..4 {
                    for j in i + 1..4 {
                        hasse *= hilbert_symbol(&d[i], &d[j], place)?;
                    }
                }
                if hasse != hilbert_symbol(&minus_one, &minus_one, place)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => unreachable!(),
    }
}

/// All shell tuples with max-norm exactly `s`, in a fixed order: coordinates
/// compare by (abs, negative-last).
pub(crate) fn shell_tuples(dim: usize, s: i64, out: &mut Vec<Vec<i64>>) {
    fn rec(dim: usize, s: i64, prefix: &mut Vec<i64>, hit: bool, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == dim {
            if hit {
                out.push(prefix.clone());
            }
            return;
        }
        let mut vals: Vec<i64> = (-s..=s).collect();
        vals.sort_by_key(|v| (v.abs(), v.is_negative()));
        for v in vals {
            prefix.push(v);
            rec(dim, s, prefix, hit || v.abs() == s, out);
            prefix.pop();
        }
    }
    rec(dim, s, &mut Vec::new(), false, out);
}

fn colex_key(x: &IntVector) -> Vec<(BigInt, bool)> {
    let mut k: Vec<(BigInt, bool)> = x.coords().iter().map(|c| (c.abs(), c.is_negative())).collect();
    k.reverse();
    k
}

/// Primitive isotropic witness outside the kernel, by max-norm shell
/// enumeration. Within the lowest shell containing a witness, returns the
/// smallest under reversed-coordinate lexicographic order — deterministic no
/// matter how the shell scan is partitioned.
pub fn isotropic_vector(q: &QuadraticForm, height_cap: u64) -> Result<IntVector> {
    let dim = q.dim();
    let gram = q.gram();
    let in_kernel = |x: &IntVector| -> bool {
        gram.iter().all(|row| row.iter().zip(x.coords()).map(|(g, c)| g * c).sum::<BigInt>().is_zero())
    };
    let mut visited = 0u64;
    let mut s = 1i64;
    loop {
        let mut tuples = Vec::new();
        shell_tuples(dim, s, &mut tuples);
        let mut best: Option<IntVector> = None;
        for t in &tuples {
            visited += 1;
            let x = IntVector::from_i64(t);
            if x.is_zero() || !x.content().is_one() {
                continue;
            }
            // sign normalization halves the work
            if x.coords().iter().find(|c| !c.is_zero()).map(|c| c.is_negative()).unwrap_or(false) {
                continue;
            }
            if !q.eval_q(&x)?.is_zero() || in_kernel(&x) {
                continue;
            }
            best = Some(match best {
                None => x,
                Some(b) => {
                    if colex_key(&x) < colex_key(&b) {
                        x
                    } else {
                        b
                    }
                }
            });
        }
        if let Some(w) = best {
            return Ok(w);
        }
        if visited >= height_cap {
            return Err(QdError::SearchExhausted { cap: visited });
        }
        s += 1;
    }
}

/// One hyperbolic plane split off at an isotropic u, plus the restriction of q
/// to the b-orthogonal complement of the plane.
#[derive(Debug, Clone)]
pub struct HyperbolicSplit {
    pub pair: (IntVector, IntVector),
    /// None when the complement is zero-dimensional.
    pub restricted: Option<QuadraticForm>,
    /// Columns embed complement coordinates into the ambient space.
    pub embedding: Option<RationalMatrix>,
    /// Complement basis as primitive integer vectors (columns of `embedding`).
    pub complement_basis: Vec<IntVector>,
}

pub fn hyperbolic_split(q: &QuadraticForm, u: &IntVector) -> Result<HyperbolicSplit> {
    if !q.eval_q(u)?.is_zero() {
        return Err(QdError::Precondition("split point must satisfy q(u) = 0".into()));
    }
    let dim = q.dim();
    let mut w = None;
    for i in 0..dim {
        let e = IntVector::unit(dim, i);
        if !q.eval_b(u, &e)?.is_zero() {
            w = Some(e);
            break;
        }
    }
    let w = w.ok_or_else(|| QdError::Precondition("split point lies in the kernel".into()))?;
    // v = b(u,w)·w − q(w)·u is isotropic with b(u,v) = b(u,w)² ≠ 0
    let buw = q.eval_b(u, &w)?;
    let qw = q.eval_q(&w)?;
    let v = w.scale(&buw).sub(&u.scale(&qw)).into_primitive_normalized();
    debug_assert!(q.eval_q(&v).unwrap().is_zero());
    debug_assert!(!q.eval_b(u, &v).unwrap().is_zero());

    // complement = null space of the two rows b(u,·), b(v,·)
    let gram = q.gram_rational();
    let gu = gram.mul_int_vec(u);
    let gv = gram.mul_int_vec(&v);
    let rows = RationalMatrix::new(vec![gu, gv]);
    let basis_rat = rows.null_space();
    let complement_basis: Vec<IntVector> = basis_rat
        .iter()
        .map(|r| IntVector::from_rational_coords(r).into_primitive_normalized())
        .collect();

    if complement_basis.is_empty() {
        return Ok(HyperbolicSplit { pair: (u.clone(), v), restricted: None, embedding: None, complement_basis });
    }
    let embedding = RationalMatrix::from_columns(&complement_basis);
    let restricted = restrict_to_basis(q, &complement_basis)?;
    Ok(HyperbolicSplit { pair: (u.clone(), v), restricted: Some(restricted), embedding: Some(embedding), complement_basis })
}

/// q restricted to the span of an integer basis, in basis coordinates.
pub fn restrict_to_basis(q: &QuadraticForm, basis: &[IntVector]) -> Result<QuadraticForm> {
    let k = basis.len();
    let mut entries = Vec::new();
    for i in 0..k {
        let qi = q.eval_q(&basis[i])?;
        if !qi.is_zero() {
            entries.push((i, i, qi));
        }
        for j in i + 1..k {
            let bij = q.eval_b(&basis[i], &basis[j])?;
            if !bij.is_zero() {
                entries.push((i, j, bij));
            }
        }
    }
    if entries.is_empty() {
        return Err(QdError::Precondition("restriction is identically zero".into()));
    }
    QuadraticForm::new(k, entries)
}

/// Full Witt decomposition: kernel, m hyperbolic planes, anisotropic rest.
pub fn witt_decompose(q: &QuadraticForm, height_cap: u64) -> Result<WittDecomposition> {
    let kernel_basis = q.kernel();
    let dim = q.dim();

    // complete the kernel to a basis with standard basis vectors
    let mut complement: Vec<IntVector> = Vec::new();
    {
        let mut chosen: Vec<IntVector> = kernel_basis.clone();
        for i in 0..dim {
            if chosen.len() == dim {
                break;
            }
            let e = IntVector::unit(dim, i);
            let mut test = chosen.clone();
            test.push(e.clone());
            let m = RationalMatrix::from_columns(&test);
            if m.rank() == test.len() {
                chosen.push(e.clone());
                complement.push(e);
            }
        }
    }

    let mut pairs: Vec<(IntVector, IntVector)> = Vec::new();
    let mut current_basis = complement; // ambient coordinates of the working subspace
    loop {
        if current_basis.is_empty() {
            return Ok(WittDecomposition {
                kernel_basis,
                witt_index: pairs.len(),
                hyperbolic_pairs: pairs,
                anisotropic_basis: Vec::new(),
            });
        }
        let restricted = restrict_to_basis(q, &current_basis)?;
        if !is_isotropic(&restricted)? {
            return Ok(WittDecomposition {
                kernel_basis,
                witt_index: pairs.len(),
                hyperbolic_pairs: pairs,
                anisotropic_basis: current_basis,
            });
        }
        let u_local = isotropic_vector(&restricted, height_cap).map_err(|e| match e {
            QdError::SearchExhausted { cap } => QdError::SearchExhausted { cap },
            other => other,
        })?;
        let split = hyperbolic_split(&restricted, &u_local)?;
        let to_ambient = |x: &IntVector| -> IntVector {
            let mut acc = IntVector::zero(dim);
            for (k, c) in x.coords().iter().enumerate() {
                acc = acc.add(&current_basis[k].scale(c));
            }
            acc.into_primitive_normalized()
        };
        let (ul, vl) = &split.pair;
        pairs.push((to_ambient(ul), to_ambient(vl)));
        current_basis = split.complement_basis.iter().map(to_ambient).collect();
    }
}

/// A zero of a canonical-hyperbolic form outside every listed proper subspace,
/// found by sweeping the parametrization
/// φ(t₂,…,tₙ) = (1, a₂t₂²+⋯+aₙtₙ², t₂,…,tₙ).
pub fn avoid_subspaces(q: &QuadraticForm, subspaces: &[RationalMatrix], sweep_cap: u64) -> Result<IntVector> {
    let coeffs = canonical_hyperbolic_tail(q)?;
    let dim = q.dim();
    let params = dim - 2;
    let member = |m: &RationalMatrix, x: &IntVector| -> bool {
        if m.nrows() != dim {
            return false;
        }
        let r0 = m.rank();
        let mut cols: Vec<Vec<BigRational>> = (0..m.ncols()).map(|j| m.column(j)).collect();
        cols.push(x.to_rational_coords());
        let rows: Vec<Vec<BigRational>> = (0..dim).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        RationalMatrix::new(rows).rank() == r0
    };
    let phi = |t: &[i64]| -> IntVector {
        let mut coords = vec![BigInt::one(), BigInt::zero()];
        let mut s = BigInt::zero();
        for (k, &tv) in t.iter().enumerate() {
            let tb = BigInt::from(tv);
            s += &coeffs[k] * &tb * &tb;
            coords.push(tb);
        }
        coords[1] = s;
        IntVector::new(coords)
    };
    let mut tried = 0u64;
    let mut s = 0i64;
    loop {
        let mut tuples = Vec::new();
        if s == 0 {
            tuples.push(vec![0i64; params]);
        } else {
            shell_tuples(params, s, &mut tuples);
        }
        for t in &tuples {
            tried += 1;
            let x = phi(t);
            if subspaces.iter().all(|m| !member(m, &x)) {
                return Ok(x);
            }
            if tried >= sweep_cap {
                return Err(QdError::SearchExhausted { cap: tried });
            }
        }
        s += 1;
    }
}

/// Tail coefficients (a₂, …, aₙ) of a form in the shape t₀t₁ − a₂t₂² − ⋯ − aₙtₙ²
/// with a₂ ≠ 0; errors when the form is not exactly in that shape.
pub(crate) fn canonical_hyperbolic_tail(q: &QuadraticForm) -> Result<Vec<BigInt>> {
    let dim = q.dim();
    if dim < 3 {
        return Err(QdError::Precondition("canonical hyperbolic shape needs dimension >= 3".into()));
    }
    let mut tail = vec![BigInt::zero(); dim - 2];
    for (i, j, c) in q.coeff_triples() {
        match (i, j) {
            (0, 1) => {
                if !c.is_one() {
                    return Err(QdError::Precondition("t0t1 coefficient must be 1".into()));
                }
            }
            (i, j) if i == j && i >= 2 => tail[i - 2] = -c,
            _ => return Err(QdError::Precondition("form is not in canonical hyperbolic shape".into())),
        }
    }
    if q.coeff(0, 1) != BigInt::one() {
        return Err(QdError::Precondition("form is not in canonical hyperbolic shape".into()));
    }
    if tail[0].is_zero() {
        return Err(QdError::Precondition("canonical hyperbolic shape needs a2 != 0".into()));
    }
    Ok(tail)
}

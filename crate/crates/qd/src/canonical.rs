//! Reduction of an indefinite form to one of the two canonical shapes
//!
//!   t₀² − a₁t₁² − ⋯ − aₙtₙ²   (a₁ > 0 not a square)       — Diag
//!   t₀t₁ − a₂t₂² − ⋯ − aₙtₙ²  (a₂ ≠ 0)                     — Hyperbolic
//!
//! together with the existence test for points with linearly independent
//! coordinates and infinite-order automorphisms of the canonical forms.

use crate::arith::strip_small_squares;
use crate::error::{QdError, Result};
use crate::exact::{IntervalReal, IntVector, RationalMatrix};
use crate::pell::{is_square, pell_fundamental};
use crate::qform::QuadraticForm;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CanonicalKind {
    Diag,
    Hyperbolic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalReduction {
    pub kind: CanonicalKind,
    /// Non-zero rational a with a·q(T·t) = canonical(t).
    pub scale: BigRational,
    pub transform: RationalMatrix,
    /// (a₁,…,aₙ) for Diag, (a₂,…,aₙ) for Hyperbolic.
    pub coeffs: Vec<BigInt>,
    dim: usize,
}

impl CanonicalReduction {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The canonical polynomial as a form.
    pub fn canonical_form(&self) -> QuadraticForm {
        let mut entries: Vec<(usize, usize, BigInt)> = Vec::new();
        match self.kind {
            CanonicalKind::Diag => {
                entries.push((0, 0, BigInt::one()));
                for (k, a) in self.coeffs.iter().enumerate() {
                    entries.push((k + 1, k + 1, -a));
                }
            }
            CanonicalKind::Hyperbolic => {
                entries.push((0, 1, BigInt::one()));
                for (k, a) in self.coeffs.iter().enumerate() {
                    entries.push((k + 2, k + 2, -a));
                }
            }
        }
        QuadraticForm::new(self.dim, entries).expect("canonical form is non-zero")
    }

    /// Exact check that a·q(T·t) equals the canonical polynomial.
    pub fn verify(&self, q: &QuadraticForm) -> Result<()> {
        let g = q.gram_rational();
        let lhs = self.transform.transpose().mul(&g).mul(&self.transform).scale(&self.scale);
        let rhs = self.canonical_form().gram_rational();
        if lhs != rhs {
            return Err(QdError::Precondition("canonical reduction identity failed".into()));
        }
        match self.kind {
            CanonicalKind::Diag => {
                let a1 = &self.coeffs[0];
                if !a1.is_positive() || is_square(a1) {
                    return Err(QdError::Precondition("Diag kind requires a1 > 0 non-square".into()));
                }
            }
            CanonicalKind::Hyperbolic => {
                if self.coeffs.first().map(|a| a.is_zero()).unwrap_or(true) {
                    return Err(QdError::Precondition("Hyperbolic kind requires a2 != 0".into()));
                }
            }
        }
        Ok(())
    }
}

fn rational_is_square(q: &BigRational) -> bool {
    !q.is_negative() && is_square(q.numer()) && is_square(q.denom())
}

/// Linearly-independent-point test: the real zero set carries a point whose
/// coordinates are Q-linearly independent iff the form is indefinite and
/// either has rank ≥ 3 or its single positive-negative pair has non-square
/// product.
pub fn has_li_point(q: &QuadraticForm) -> bool {
    let (_, diag) = q.diagonalize();
    let nonzero: Vec<&BigRational> = diag.iter().filter(|a| !a.is_zero()).collect();
    let pos = nonzero.iter().find(|a| a.is_positive());
    let neg = nonzero.iter().find(|a| a.is_negative());
    let (pos, neg) = match (pos, neg) {
        (Some(p), Some(n)) => (p, n),
        _ => return false,
    };
    if nonzero.len() >= 3 {
        return true;
    }
    !rational_is_square(&-(&**pos * &**neg))
}

/// Deterministic reduction to a canonical shape. Forms already in canonical
/// shape come back with the identity transform.
pub fn reduce_canonical(q: &QuadraticForm) -> Result<CanonicalReduction> {
    let dim = q.dim();
    if dim < 2 {
        return Err(QdError::NoLiPoint);
    }
    if let Some(red) = detect_canonical(q) {
        return Ok(red);
    }
    if !has_li_point(q) {
        return Err(QdError::NoLiPoint);
    }

    let (basis, diag) = q.diagonalize();
    // order: smallest positive index, smallest negative index, other
    // non-zeros ascending, zeros last
    let pos = diag.iter().position(|a| a.is_positive()).expect("has_li_point guarantees a positive entry");
    let neg = diag.iter().position(|a| a.is_negative()).expect("has_li_point guarantees a negative entry");
    let mut order = vec![pos, neg];
    for i in 0..dim {
        if i != pos && i != neg && !diag[i].is_zero() {
            order.push(i);
        }
    }
    for i in 0..dim {
        if i != pos && i != neg && diag[i].is_zero() {
            order.push(i);
        }
    }
    let mut perm = RationalMatrix::zero(dim, dim);
    for (new_col, &old_col) in order.iter().enumerate() {
        perm.set(old_col, new_col, BigRational::one());
    }
    let basis = basis.mul(&perm);
    let diag: Vec<BigRational> = order.iter().map(|&i| diag[i].clone()).collect();

    let scale = BigRational::one() / &diag[0];
    // a·q now has diagonal (1, −c_1, …, −c_n) with c_i = −d_i/d_0
    let c: Vec<BigRational> = diag.iter().skip(1).map(|d| -(d / &diag[0])).collect();

    // clear each c_i to an integer with small square factors stripped:
    // t_i ← s_i·t_i with s_i = den/f where c_i·den² = num·den = f²·g
    let mut scale_cols = vec![BigRational::one(); dim];
    let mut coeffs_int = Vec::with_capacity(dim - 1);
    for (k, ci) in c.iter().enumerate() {
        if ci.is_zero() {
            coeffs_int.push(BigInt::zero());
            continue;
        }
        let n_i = ci.numer() * ci.denom();
        let g = strip_small_squares(&n_i);
        let f2 = &n_i / &g;
        let f = crate::exact::isqrt(&f2.abs());
        debug_assert_eq!(&f * &f, f2);
        scale_cols[k + 1] = BigRational::new(ci.denom().clone(), f);
        coeffs_int.push(g);
    }
    let mut s_mat = RationalMatrix::zero(dim, dim);
    s_mat.set(0, 0, BigRational::one());
    for i in 1..dim {
        s_mat.set(i, i, scale_cols[i].clone());
    }
    let transform = basis.mul(&s_mat);

    let a1 = coeffs_int[0].clone();
    debug_assert!(a1.is_positive());
    let red = if is_square(&a1) {
        // route to t0t1: t0 = (u+v)/2, t1 = (v−u)/(2σ) with σ² = a1
        let sigma = crate::exact::isqrt(&a1);
        let mut h = RationalMatrix::identity(dim);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let half_sigma = BigRational::new(BigInt::one(), BigInt::from(2) * &sigma);
        h.set(0, 0, half.clone());
        h.set(0, 1, half);
        h.set(1, 0, -half_sigma.clone());
        h.set(1, 1, half_sigma);
        let transform = transform.mul(&h);
        CanonicalReduction {
            kind: CanonicalKind::Hyperbolic,
            scale,
            transform,
            coeffs: coeffs_int[1..].to_vec(),
            dim,
        }
    } else {
        CanonicalReduction { kind: CanonicalKind::Diag, scale, transform, coeffs: coeffs_int, dim }
    };
    red.verify(q)?;
    Ok(red)
}

/// Identity reduction when the form is literally in one of the two shapes.
fn detect_canonical(q: &QuadraticForm) -> Option<CanonicalReduction> {
    let dim = q.dim();
    if dim < 2 {
        return None;
    }
    // Diag shape
    let mut diag_ok = q.coeff(0, 0) == BigInt::one();
    let mut coeffs = Vec::new();
    if diag_ok {
        'scan: {
            for (i, j, _) in q.coeff_triples() {
                if i != j {
                    diag_ok = false;
                    break 'scan;
                }
            }
            for i in 1..dim {
                coeffs.push(-q.coeff(i, i));
            }
        }
    }
    if diag_ok && !coeffs.is_empty() && coeffs[0].is_positive() && !is_square(&coeffs[0]) {
        return Some(CanonicalReduction {
            kind: CanonicalKind::Diag,
            scale: BigRational::one(),
            transform: RationalMatrix::identity(dim),
            coeffs,
            dim,
        });
    }
    // Hyperbolic shape
    if let Ok(tail) = crate::witt::canonical_hyperbolic_tail(q) {
        return Some(CanonicalReduction {
            kind: CanonicalKind::Hyperbolic,
            scale: BigRational::one(),
            transform: RationalMatrix::identity(dim),
            coeffs: tail,
            dim,
        });
    }
    None
}

/// An infinite-order automorphism of the canonical form: multiplication by a
/// fundamental Pell unit for the Diag kind, the weight (2, 1/2) torus element
/// for the Hyperbolic kind.
pub fn automorphism_generator(red: &CanonicalReduction) -> Result<RationalMatrix> {
    let dim = red.dim;
    let t = match red.kind {
        CanonicalKind::Diag => {
            let a1 = &red.coeffs[0];
            let pell = pell_fundamental(a1)?;
            let mut m = RationalMatrix::identity(dim);
            m.set(0, 0, BigRational::from_integer(pell.u.clone()));
            m.set(0, 1, BigRational::from_integer(a1 * &pell.v));
            m.set(1, 0, BigRational::from_integer(pell.v.clone()));
            m.set(1, 1, BigRational::from_integer(pell.u.clone()));
            m
        }
        CanonicalKind::Hyperbolic => {
            let mut m = RationalMatrix::identity(dim);
            m.set(0, 0, BigRational::from_integer(BigInt::from(2)));
            m.set(1, 1, BigRational::new(BigInt::one(), BigInt::from(2)));
            m
        }
    };
    // q∘T = q, exactly
    let qc = red.canonical_form();
    let g = qc.gram_rational();
    if t.transpose().mul(&g).mul(&t) != g {
        return Err(QdError::Precondition("automorphism check failed".into()));
    }
    Ok(t)
}

/// Applies T to an integer point and clears denominators to a primitive
/// integer point.
pub fn pushforward_point(t: &RationalMatrix, x: &IntVector) -> Result<IntVector> {
    if t.det_rational().is_zero() {
        return Err(QdError::SingularMatrix);
    }
    t.pushforward(x)
}

/// Applies T to an interval vector, entrywise outward-rounded.
pub fn pushforward_interval(t: &RationalMatrix, x: &[IntervalReal]) -> Result<Vec<IntervalReal>> {
    if t.ncols() != x.len() {
        return Err(QdError::DimensionMismatch { expected: t.ncols(), got: x.len() });
    }
    let prec = x.iter().map(|iv| iv.prec).max().unwrap_or(crate::exact::DEFAULT_PRECISION);
    let mut out = Vec::with_capacity(t.nrows());
    for i in 0..t.nrows() {
        let mut acc = IntervalReal::zero(prec);
        for (j, xi) in x.iter().enumerate() {
            let c = t.get(i, j);
            if c.is_zero() {
                continue;
            }
            let term = xi.mul(&IntervalReal::from_rational(c, prec));
            acc = acc.add(&term);
        }
        out.push(acc);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct ReductionRepr {
    kind: CanonicalKind,
    scale: String,
    transform: RationalMatrix,
    coeffs: Vec<String>,
    dim: usize,
}

impl Serialize for CanonicalReduction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReductionRepr {
            kind: self.kind,
            scale: self.scale.to_string(),
            transform: self.transform.clone(),
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
            dim: self.dim,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CanonicalReduction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let r = ReductionRepr::deserialize(d)?;
        Ok(CanonicalReduction {
            kind: r.kind,
            scale: r.scale.parse().map_err(D::Error::custom)?,
            transform: r.transform,
            coeffs: r
                .coeffs
                .iter()
                .map(|c| c.parse().map_err(D::Error::custom))
                .collect::<std::result::Result<_, _>>()?,
            dim: r.dim,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(dim: usize, entries: &[(usize, usize, i64)]) -> QuadraticForm {
        QuadraticForm::from_i64(dim, entries).unwrap()
    }

    fn v(c: &[i64]) -> IntVector {
        IntVector::from_i64(c)
    }

    #[test]
    fn li_point_examples() {
        assert!(!has_li_point(&form(3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)])));
        assert!(has_li_point(&form(3, &[(0, 0, 1), (1, 1, -2)])));
        // t0² − t1² in dim 3, t2 absent: rank 2 with square pair product
        assert!(!has_li_point(&form(3, &[(0, 0, 1), (1, 1, -1)])));
        // same polynomial but with a third non-zero coefficient
        assert!(has_li_point(&form(3, &[(0, 0, 1), (1, 1, -1), (2, 2, -1)])));
    }

    #[test]
    fn reduce_already_canonical() {
        let q = form(3, &[(0, 0, 1), (1, 1, -2)]);
        let r = reduce_canonical(&q).unwrap();
        assert_eq!(r.kind, CanonicalKind::Diag);
        assert!(r.scale.is_one());
        assert_eq!(r.transform, RationalMatrix::identity(3));
        assert_eq!(r.coeffs, vec![BigInt::from(2), BigInt::zero()]);

        let q = form(3, &[(0, 1, 1), (2, 2, -1)]);
        let r = reduce_canonical(&q).unwrap();
        assert_eq!(r.kind, CanonicalKind::Hyperbolic);
        assert!(r.scale.is_one());
        assert_eq!(r.transform, RationalMatrix::identity(3));
        assert_eq!(r.coeffs, vec![BigInt::one()]);
    }

    #[test]
    fn reduce_square_pair_goes_hyperbolic() {
        let q = form(3, &[(0, 0, 1), (1, 1, -1), (2, 2, -1)]);
        let r = reduce_canonical(&q).unwrap();
        assert_eq!(r.kind, CanonicalKind::Hyperbolic);
        assert_eq!(r.coeffs, vec![BigInt::one()]);
        r.verify(&q).unwrap();
    }

    #[test]
    fn reduce_rejects_definite() {
        let q = form(3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]);
        assert!(matches!(reduce_canonical(&q), Err(QdError::NoLiPoint)));
        let q = form(3, &[(0, 0, 1), (1, 1, -1)]);
        assert!(matches!(reduce_canonical(&q), Err(QdError::NoLiPoint)));
    }

    #[test]
    fn reduce_random_forms_identity_and_witt_index() {
        let mut state = 2024u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 11) as i64 - 5
        };
        let mut tested = 0;
        while tested < 100 {
            let dim = 3 + (next().unsigned_abs() as usize % 3); // 3..=5
            let mut entries = Vec::new();
            for i in 0..dim {
                for j in i..dim {
                    let c = next();
                    if c != 0 {
                        entries.push((i, j, c));
                    }
                }
            }
            let q = match QuadraticForm::from_i64(dim, &entries) {
                Ok(q) => q,
                Err(_) => continue,
            };
            if !has_li_point(&q) {
                continue;
            }
            let r = reduce_canonical(&q).unwrap();
            r.verify(&q).unwrap(); // exact polynomial identity
            tested += 1;
        }
    }

    #[test]
    fn witt_index_preserved_by_reduction() {
        // Cross-check against the witt module where witness search is cheap;
        // canonical coefficients can grow, so skip reductions whose witness
        // search would exceed the cap.
        let mut state = 77u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 7) as i64 - 3
        };
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 30 && attempts < 3000 {
            attempts += 1;
            let dim = 3 + (next().unsigned_abs() as usize % 2); // 3..=4
            let mut entries = Vec::new();
            for i in 0..dim {
                for j in i..dim {
                    let c = next();
                    if c != 0 {
                        entries.push((i, j, c));
                    }
                }
            }
            let q = match QuadraticForm::from_i64(dim, &entries) {
                Ok(q) => q,
                Err(_) => continue,
            };
            if !has_li_point(&q) {
                continue;
            }
            let r = reduce_canonical(&q).unwrap();
            let w_q = match crate::witt::witt_decompose(&q, 200_000) {
                Ok(d) => d.witt_index,
                Err(QdError::SearchExhausted { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let w_c = match crate::witt::witt_decompose(&r.canonical_form(), 200_000) {
                Ok(d) => d.witt_index,
                Err(QdError::SearchExhausted { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            assert_eq!(w_q, w_c, "witt index changed by reduction");
            checked += 1;
        }
        assert!(checked >= 30, "too few cross-checks completed: {checked}");
    }

    #[test]
    fn automorphism_examples() {
        let q = form(3, &[(0, 0, 1), (1, 1, -2)]);
        let r = reduce_canonical(&q).unwrap();
        let t = automorphism_generator(&r).unwrap();
        let expect = RationalMatrix::from_integer_rows(&[vec![3, 4, 0], vec![2, 3, 0], vec![0, 0, 1]]);
        assert_eq!(t, expect);

        let q = form(3, &[(0, 1, 1), (2, 2, -1)]);
        let r = reduce_canonical(&q).unwrap();
        let t = automorphism_generator(&r).unwrap();
        assert_eq!(t.get(0, 0), &BigRational::from_integer(BigInt::from(2)));
        assert_eq!(t.get(1, 1), &BigRational::new(BigInt::one(), BigInt::from(2)));

        // automorphisms map zeros of q to zeros of q
        let zero = v(&[1, 0, 0]);
        assert!(q.eval_q(&zero).unwrap().is_zero());
        let image = pushforward_point(&t, &zero).unwrap();
        assert!(q.eval_q(&image).unwrap().is_zero());
    }

    #[test]
    fn automorphism_infinite_order_smoke() {
        for q in [form(3, &[(0, 0, 1), (1, 1, -2)]), form(3, &[(0, 1, 1), (2, 2, -1)])] {
            let r = reduce_canonical(&q).unwrap();
            let t = automorphism_generator(&r).unwrap();
            let mut seen = Vec::new();
            let mut x = v(&[2, 1, 1]);
            for _ in 0..10 {
                x = pushforward_point(&t, &x).unwrap();
                assert!(!seen.contains(&x), "orbit must not repeat");
                seen.push(x.clone());
            }
        }
    }

    #[test]
    fn pushforward_examples() {
        let id = RationalMatrix::identity(3);
        assert_eq!(pushforward_point(&id, &v(&[2, 1, 1])).unwrap(), v(&[2, 1, 1]));

        let q = form(3, &[(0, 1, 1), (2, 2, -1)]);
        let r = reduce_canonical(&q).unwrap();
        let t = automorphism_generator(&r).unwrap();
        let x = v(&[2, 1, 1]);
        let y = pushforward_point(&t, &x).unwrap();
        assert_eq!(y, v(&[8, 1, 2]));
        let back = pushforward_point(&t.inverse().unwrap(), &y).unwrap();
        assert_eq!(back, x);

        let sing = RationalMatrix::zero(3, 3);
        assert!(matches!(pushforward_point(&sing, &x), Err(QdError::SingularMatrix)));
    }
}

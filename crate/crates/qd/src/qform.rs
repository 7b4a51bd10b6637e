//! Quadratic forms over Q with integer coefficients: evaluation, the
//! polarization b, the ψ map, orthogonal diagonalization, kernel, rank and
//! signature.
//!
//! A form is stored as the coefficients of its defining polynomial
//! Σ_{i≤j} c_{ij} t_i t_j. The associated bilinear form uses the convention
//! q(x) = b(x,x)/2, so the Gram matrix has G_ii = 2 c_ii and G_ij = c_ij for
//! i ≠ j; b is then integer-valued on integer points.

use crate::error::{QdError, Result};
use crate::exact::{IntVector, RationalMatrix};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    dim: usize,
    coeffs: BTreeMap<(usize, usize), BigInt>,
}

/// Silvester counts of a diagonalization: zero, positive, negative entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub n0: usize,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl Signature {
    pub fn rank(&self) -> usize {
        self.n_plus + self.n_minus
    }
}

impl QuadraticForm {
    /// Build from (i, j, c) coefficient triples with i ≤ j; zero coefficients
    /// are dropped. At least one coefficient must be non-zero.
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (usize, usize, BigInt)>) -> Result<Self> {
        if dim == 0 {
            return Err(QdError::BadInput("form dimension must be positive".into()));
        }
        let mut coeffs = BTreeMap::new();
        for (i, j, c) in entries {
            if i > j || j >= dim {
                return Err(QdError::BadInput(format!("bad coefficient index ({i},{j}) for dim {dim}")));
            }
            if c.is_zero() {
                continue;
            }
            let slot = coeffs.entry((i, j)).or_insert_with(BigInt::zero);
            *slot += c;
            if slot.is_zero() {
                coeffs.remove(&(i, j));
            }
        }
        if coeffs.is_empty() {
            return Err(QdError::BadInput("form must have a non-zero coefficient".into()));
        }
        Ok(QuadraticForm { dim, coeffs })
    }

    pub fn from_i64(dim: usize, entries: &[(usize, usize, i64)]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&(i, j, c)| (i, j, BigInt::from(c))))
    }

    /// Clears denominators of a rational-coefficient form; returns the form and
    /// the positive integer scale s such that stored = s · given.
    pub fn from_rational(dim: usize, entries: &[(usize, usize, BigRational)]) -> Result<(Self, BigInt)> {
        let mut scale = BigInt::one();
        for (_, _, c) in entries {
            scale = scale.lcm(c.denom());
        }
        let scaled: Vec<(usize, usize, BigInt)> = entries
            .iter()
            .map(|(i, j, c)| (*i, *j, c.numer() * (&scale / c.denom())))
            .collect();
        Ok((Self::new(dim, scaled)?, scale))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, i: usize, j: usize) -> BigInt {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.coeffs.get(&key).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeff_triples(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.coeffs.iter().map(|(&(i, j), c)| (i, j, c))
    }

    /// Gram matrix of b: G_ii = 2 c_ii, G_ij = c_ij (i ≠ j). Integer, symmetric.
    pub fn gram(&self) -> Vec<Vec<BigInt>> {
        let n = self.dim;
        let mut g = vec![vec![BigInt::zero(); n]; n];
        for (&(i, j), c) in &self.coeffs {
            if i == j {
                g[i][i] = c * 2;
            } else {
                g[i][j] = c.clone();
                g[j][i] = c.clone();
            }
        }
        g
    }

    pub fn gram_rational(&self) -> RationalMatrix {
        RationalMatrix::new(
            self.gram()
                .into_iter()
                .map(|r| r.into_iter().map(BigRational::from_integer).collect())
                .collect(),
        )
    }

    fn check_dim(&self, x: &IntVector) -> Result<()> {
        if x.len() != self.dim {
            return Err(QdError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Exact value of the defining polynomial at an integer point.
    pub fn eval_q(&self, x: &IntVector) -> Result<BigInt> {
        self.check_dim(x)?;
        let mut acc = BigInt::zero();
        for (&(i, j), c) in &self.coeffs {
            acc += c * x.coord(i) * x.coord(j);
        }
        Ok(acc)
    }

    /// b(x, y) = q(x+y) − q(x) − q(y), computed directly from the Gram matrix.
    pub fn eval_b(&self, x: &IntVector, y: &IntVector) -> Result<BigInt> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let mut acc = BigInt::zero();
        for (&(i, j), c) in &self.coeffs {
            if i == j {
                acc += c * 2 * x.coord(i) * y.coord(i);
            } else {
                acc += c * (x.coord(i) * y.coord(j) + x.coord(j) * y.coord(i));
            }
        }
        Ok(acc)
    }

    /// The rational extension of q at a rational point.
    pub fn eval_q_rational(&self, x: &[BigRational]) -> Result<BigRational> {
        if x.len() != self.dim {
            return Err(QdError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let mut acc = BigRational::zero();
        for (&(i, j), c) in &self.coeffs {
            acc += BigRational::from_integer(c.clone()) * &x[i] * &x[j];
        }
        Ok(acc)
    }

    /// ψ(x, y) = b(x,y)·x − q(x)·y. Sends pairs of quadric points to quadric
    /// points: q(ψ(x,y)) = q(x)²q(y).
    pub fn psi(&self, x: &IntVector, y: &IntVector) -> Result<IntVector> {
        let b = self.eval_b(x, y)?;
        let q = self.eval_q(x)?;
        Ok(x.scale(&b).sub(&y.scale(&q)))
    }

    /// Composition q ∘ T for a rational T, cleared to integer coefficients;
    /// returns the form and the positive scale s with stored = s · (q ∘ T).
    pub fn compose(&self, t: &RationalMatrix) -> Result<(QuadraticForm, BigInt)> {
        if !t.is_square() || t.nrows() != self.dim {
            return Err(QdError::DimensionMismatch { expected: self.dim, got: t.nrows() });
        }
        // Gram of q∘T is Tᵀ G T; coefficients read back off it.
        let g = self.gram_rational();
        let gp = t.transpose().mul(&g).mul(t);
        let mut entries = Vec::new();
        for i in 0..self.dim {
            for j in i..self.dim {
                let c = if i == j {
                    gp.get(i, i) / BigRational::from_integer(BigInt::from(2))
                } else {
                    gp.get(i, j).clone()
                };
                if !c.is_zero() {
                    entries.push((i, j, c));
                }
            }
        }
        QuadraticForm::from_rational(self.dim, &entries)
    }

    /// Orthogonal diagonalization: returns (basis, a_0..a_n) with the basis
    /// columns pairwise b-orthogonal and q(basis·t) = Σ a_i t_i².
    ///
    /// Pivot rule: largest |diagonal| entry; an all-zero diagonal block gets a
    /// hyperbolic pre-step mixing the first off-diagonal pair. Deterministic.
    pub fn diagonalize(&self) -> (RationalMatrix, Vec<BigRational>) {
        let n = self.dim;
        let mut g: Vec<Vec<BigRational>> = self.gram_rational().rows().to_vec();
        let mut basis = RationalMatrix::identity(n);

        // Column operation v_j += f·v_i with the congruent update of g.
        fn col_add(g: &mut [Vec<BigRational>], basis: &mut RationalMatrix, n: usize, j: usize, i: usize, f: &BigRational) {
            for r in 0..n {
                let t = &g[r][i] * f;
                g[r][j] += t;
            }
            for c in 0..n {
                let t = &g[i][c] * f;
                g[j][c] += t;
            }
            for r in 0..n {
                let t = basis.get(r, i) * f;
                let cur = basis.get(r, j) + t;
                basis.set(r, j, cur);
            }
        }

        fn col_swap(g: &mut [Vec<BigRational>], basis: &mut RationalMatrix, n: usize, a: usize, b: usize) {
            if a == b {
                return;
            }
            for row in g.iter_mut() {
                row.swap(a, b);
            }
            g.swap(a, b);
            for r in 0..n {
                let (x, y) = (basis.get(r, a).clone(), basis.get(r, b).clone());
                basis.set(r, a, y);
                basis.set(r, b, x);
            }
        }

        for k in 0..n {
            let mut pivot: Option<usize> = None;
            for i in k..n {
                if !g[i][i].is_zero() {
                    match pivot {
                        None => pivot = Some(i),
                        Some(p) => {
                            if g[i][i].abs() > g[p][p].abs() {
                                pivot = Some(i);
                            }
                        }
                    }
                }
            }
            if pivot.is_none() {
                // all-zero diagonal: mix the first off-diagonal non-zero pair
                let mut found = None;
                'outer: for i in k..n {
                    for j in i + 1..n {
                        if !g[i][j].is_zero() {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                match found {
                    Some((i, j)) => {
                        let one = BigRational::one();
                        col_add(&mut g, &mut basis, n, i, j, &one); // g_ii becomes 2·g_ij ≠ 0
                        pivot = Some(i);
                    }
                    None => break, // remaining block is identically zero: kernel part
                }
            }
            let p = pivot.unwrap();
            col_swap(&mut g, &mut basis, n, k, p);
            let pk = g[k][k].clone();
            for j in k + 1..n {
                if !g[k][j].is_zero() {
                    let f = -(&g[k][j] / &pk);
                    col_add(&mut g, &mut basis, n, j, k, &f);
                }
            }
        }
        let diag: Vec<BigRational> = (0..n).map(|i| &g[i][i] / BigRational::from_integer(BigInt::from(2))).collect();
        (basis, diag)
    }

    /// Saturated integer basis of ker(b) = {x : b(x, ·) = 0}, Hermite-reduced,
    /// each vector primitive with positive leading coordinate.
    pub fn kernel(&self) -> Vec<IntVector> {
        let kernel_rows = integer_kernel(&self.gram());
        kernel_rows.into_iter().map(|r| IntVector::new(r).into_primitive_normalized()).collect()
    }

    pub fn rank(&self) -> usize {
        self.dim - self.kernel().len()
    }

    pub fn signature(&self) -> Signature {
        let (_, diag) = self.diagonalize();
        let mut s = Signature { n0: 0, n_plus: 0, n_minus: 0 };
        for a in &diag {
            if a.is_zero() {
                s.n0 += 1;
            } else if a.is_positive() {
                s.n_plus += 1;
            } else {
                s.n_minus += 1;
            }
        }
        s
    }

    /// Row-sum upper bound on ‖q‖ = max_{‖x‖=1}|q_R(x)|: half the largest
    /// absolute row sum of the Gram matrix.
    pub fn operator_norm_bound(&self) -> BigRational {
        let mut best = BigInt::zero();
        for row in &self.gram() {
            let s: BigInt = row.iter().map(|v| v.abs()).sum();
            if s > best {
                best = s;
            }
        }
        BigRational::new(best, BigInt::from(2))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("form serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Hermite-reduced basis of the integer kernel {x ∈ Z^n : M x = 0} of an
/// integer matrix, via row reduction of the transpose with transformation.
/// Integer kernels of integer matrices are saturated lattices.
fn integer_kernel(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<BigInt>> = (0..cols).map(|i| (0..rows).map(|j| m[j][i].clone()).collect()).collect();
    let n = a.len();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivot_row = 0;
    for col in 0..rows {
        if pivot_row == n {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..n {
                if !a[r][col].is_zero() {
                    best = match best {
                        None => Some(r),
                        Some(b) => {
                            if a[r][col].abs() < a[b][col].abs() {
                                Some(r)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let b = match best {
                Some(b) => b,
                None => break,
            };
            a.swap(pivot_row, b);
            u.swap(pivot_row, b);
            let piv = a[pivot_row][col].clone();
            let mut done = true;
            for r in pivot_row + 1..n {
                if !a[r][col].is_zero() {
                    let f = div_round_nearest(&a[r][col], &piv);
                    if !f.is_zero() {
                        for c in 0..rows {
                            let t = &a[pivot_row][c] * &f;
                            a[r][c] -= t;
                        }
                        for c in 0..n {
                            let t = &u[pivot_row][c] * &f;
                            u[r][c] -= t;
                        }
                    }
                    if !a[r][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if !a[pivot_row][col].is_zero() {
            pivot_row += 1;
        }
    }
    let mut basis: Vec<Vec<BigInt>> = (pivot_row..n).map(|r| u[r].clone()).collect();
    hermite_reduce(&mut basis);
    basis
}

fn div_round_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    let q = a.div_floor(b);
    let r = a - &q * b;
    // r in [0, |b|); round up when 2r > |b|
    if &r * 2 > b.abs() {
        q + 1
    } else {
        q
    }
}

/// In-place row Hermite reduction over Z (echelon, pivots positive, entries
/// above pivots reduced), for reproducible kernel bases.
fn hermite_reduce(rows: &mut [Vec<BigInt>]) {
    if rows.is_empty() {
        return;
    }
    let ncols = rows[0].len();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                if !rows[i][c].is_zero() {
                    best = match best {
                        None => Some(i),
                        Some(b) => {
                            if rows[i][c].abs() < rows[b][c].abs() {
                                Some(i)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let b = match best {
                Some(b) => b,
                None => break,
            };
            rows.swap(r, b);
            let piv = rows[r][c].clone();
            let mut clean = true;
            for i in r + 1..rows.len() {
                if !rows[i][c].is_zero() {
                    let f = div_round_nearest(&rows[i][c], &piv);
                    for k in 0..ncols {
                        let t = &rows[r][k] * &f;
                        rows[i][k] -= t;
                    }
                    if !rows[i][c].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for k in 0..ncols {
                    rows[r][k] = -&rows[r][k];
                }
            }
            let piv = rows[r][c].clone();
            for i in 0..r {
                let f = rows[i][c].div_floor(&piv);
                if !f.is_zero() {
                    for k in 0..ncols {
                        let t = &rows[r][k] * &f;
                        rows[i][k] -= t;
                    }
                }
            }
            r += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// JSON schema: {"dim": 3, "coeffs": [[0,1,1],[2,2,-1]]} means t0t1 − t2².
// Coefficients that fit i64 ride as JSON numbers, larger ones as decimal
// strings; parsing accepts both. Serialization is canonical (sorted by
// (i, j)), so parse → serialize is idempotent byte-for-byte.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FormRepr {
    dim: usize,
    coeffs: Vec<(usize, usize, serde_json::Value)>,
}

impl Serialize for QuadraticForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&(i, j), c)| {
                let v = match c.to_string().parse::<i64>() {
                    Ok(small) => serde_json::Value::from(small),
                    Err(_) => serde_json::Value::from(c.to_string()),
                };
                (i, j, v)
            })
            .collect();
        FormRepr { dim: self.dim, coeffs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FormRepr::deserialize(d)?;
        let entries = r
            .coeffs
            .into_iter()
            .map(|(i, j, v)| {
                let c = match v {
                    serde_json::Value::Number(n) => {
                        let i64v =
                            n.as_i64().ok_or_else(|| D::Error::custom("coefficient out of i64 range; use a string"))?;
                        BigInt::from(i64v)
                    }
                    serde_json::Value::String(s) => s.parse::<BigInt>().map_err(D::Error::custom)?,
                    other => return Err(D::Error::custom(format!("bad coefficient value {other}"))),
                };
                Ok((i, j, c))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        QuadraticForm::new(r.dim, entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn hyperbolic3() -> QuadraticForm {
        // t0t1 − t2²
        QuadraticForm::from_i64(3, &[(0, 1, 1), (2, 2, -1)]).unwrap()
    }

    fn v(c: &[i64]) -> IntVector {
        IntVector::from_i64(c)
    }

    #[test]
    fn eval_examples() {
        let q = hyperbolic3();
        assert_eq!(q.eval_q(&v(&[2, 1, 1])).unwrap(), BigInt::one());
        assert_eq!(q.eval_q(&v(&[0, 0, 0])).unwrap(), BigInt::zero());
        let diag = QuadraticForm::from_i64(3, &[(0, 0, 1), (1, 1, -2)]).unwrap();
        assert_eq!(diag.eval_q(&v(&[3, 2, 0])).unwrap(), BigInt::one());
    }

    #[test]
    fn eval_b_examples() {
        let q = hyperbolic3();
        assert_eq!(q.eval_b(&v(&[2, 1, 1]), &v(&[1, 1, 0])).unwrap(), BigInt::from(3));
        let x = v(&[5, -3, 2]);
        assert_eq!(q.eval_b(&x, &x).unwrap(), q.eval_q(&x).unwrap() * 2);
        assert_eq!(q.eval_b(&x, &v(&[0, 0, 0])).unwrap(), BigInt::zero());
    }

    #[test]
    fn psi_examples() {
        let q = hyperbolic3();
        let z = q.psi(&v(&[2, 1, 1]), &v(&[1, 1, 0])).unwrap();
        assert_eq!(z, v(&[5, 2, 3]));
        assert_eq!(q.eval_q(&z).unwrap(), BigInt::one());

        let x = v(&[2, 1, 1]);
        assert_eq!(q.psi(&x, &x).unwrap(), x.scale(&q.eval_q(&x).unwrap()));
    }

    #[test]
    fn psi_double_application() {
        // ψ(x, ψ(x,y)) = q(x)²·y
        let q = hyperbolic3();
        let x = v(&[3, 2, -1]);
        let y = v(&[1, -4, 2]);
        let z = q.psi(&x, &y).unwrap();
        let zz = q.psi(&x, &z).unwrap();
        let qx = q.eval_q(&x).unwrap();
        assert_eq!(zz, y.scale(&(&qx * &qx)));
    }

    #[test]
    fn psi_bihomogeneous() {
        // ψ(s·x, t·y) = s²t·ψ(x, y)
        let q = hyperbolic3();
        let x = v(&[2, 1, 1]);
        let y = v(&[1, -4, 2]);
        let base = q.psi(&x, &y).unwrap();
        for s in [-3i64, 2, 5] {
            for t in [-2i64, 3, 7] {
                let lhs = q.psi(&x.scale(&BigInt::from(s)), &y.scale(&BigInt::from(t))).unwrap();
                assert_eq!(lhs, base.scale(&BigInt::from(s * s * t)));
            }
        }
    }

    #[test]
    fn psi_value_identity_randomized() {
        let q = QuadraticForm::from_i64(4, &[(0, 0, 2), (0, 2, -3), (1, 1, -1), (1, 3, 5), (2, 3, 1)]).unwrap();
        let mut state = 7u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 41) as i64 - 20
        };
        for _ in 0..500 {
            let x = v(&[next(), next(), next(), next()]);
            let y = v(&[next(), next(), next(), next()]);
            let z = q.psi(&x, &y).unwrap();
            let qx = q.eval_q(&x).unwrap();
            assert_eq!(q.eval_q(&z).unwrap(), &qx * &qx * q.eval_q(&y).unwrap());
        }
    }

    #[test]
    fn combination_identity() {
        // q(sx + ty) = s²q(x) + st·b(x,y) + t²q(y)
        let q = hyperbolic3();
        let x = v(&[2, 1, 1]);
        let y = v(&[1, 1, 0]);
        for s in -4i64..=4 {
            for t in -4i64..=4 {
                let sx = x.scale(&BigInt::from(s));
                let ty = y.scale(&BigInt::from(t));
                let lhs = q.eval_q(&sx.add(&ty)).unwrap();
                let rhs = BigInt::from(s * s) * q.eval_q(&x).unwrap()
                    + BigInt::from(s * t) * q.eval_b(&x, &y).unwrap()
                    + BigInt::from(t * t) * q.eval_q(&y).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn diagonalize_identity_postcondition() {
        for q in [
            hyperbolic3(),
            QuadraticForm::from_i64(2, &[(0, 1, 1)]).unwrap(),
            QuadraticForm::from_i64(4, &[(0, 1, 1), (2, 3, 1)]).unwrap(),
            QuadraticForm::from_i64(3, &[(0, 0, 1), (1, 1, -2)]).unwrap(),
            QuadraticForm::from_i64(4, &[(0, 0, 3), (0, 1, -2), (1, 2, 4), (3, 3, -5), (0, 3, 1)]).unwrap(),
        ] {
            let (basis, diag) = q.diagonalize();
            // exact: Bᵀ G B must be diagonal with entries 2·a_i
            let g = q.gram_rational();
            let gp = basis.transpose().mul(&g).mul(&basis);
            for i in 0..q.dim() {
                for j in 0..q.dim() {
                    if i == j {
                        assert_eq!(gp.get(i, i).clone(), &diag[i] * BigRational::from_integer(BigInt::from(2)));
                    } else {
                        assert!(gp.get(i, j).is_zero(), "off-diagonal residue");
                    }
                }
            }
            // spot-check the polynomial identity on dim+2 rational points
            let mut state = 11u64;
            let mut next = move || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                BigRational::new(BigInt::from(((state >> 33) % 17) as i64 - 8), BigInt::from(1 + (state % 5) as i64))
            };
            for _ in 0..q.dim() + 2 {
                let t: Vec<BigRational> = (0..q.dim()).map(|_| next()).collect();
                let xt = basis.mul_rational_vec(&t);
                let lhs = q.eval_q_rational(&xt).unwrap();
                let rhs = diag.iter().zip(&t).map(|(a, ti)| a * ti * ti).fold(BigRational::zero(), |acc, v| acc + v);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn diagonalize_diagonal_input_is_fixed() {
        let q = QuadraticForm::from_i64(3, &[(0, 0, 2), (1, 1, -3), (2, 2, 5)]).unwrap();
        let (_, diag) = q.diagonalize();
        let mut got: Vec<BigRational> = diag;
        got.sort();
        let mut want: Vec<BigRational> = [5, -3, 2].iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn signature_examples() {
        assert_eq!(hyperbolic3().signature(), Signature { n0: 0, n_plus: 1, n_minus: 2 });
        let q = QuadraticForm::from_i64(4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        assert_eq!(q.signature(), Signature { n0: 0, n_plus: 2, n_minus: 2 });
        assert_eq!(q.rank(), 4);
        assert!(q.kernel().is_empty());
    }

    #[test]
    fn kernel_examples() {
        let q = QuadraticForm::from_i64(3, &[(0, 0, 1), (1, 1, -2)]).unwrap();
        let k = q.kernel();
        assert_eq!(k, vec![v(&[0, 0, 1])]);
        assert_eq!(q.rank(), 2);

        let q1 = QuadraticForm::from_i64(2, &[(0, 0, 1)]).unwrap();
        assert_eq!(q1.rank(), 1);

        let q2 = QuadraticForm::from_i64(4, &[(0, 1, 2), (0, 2, 2), (1, 2, -2), (0, 0, 1)]).unwrap();
        for kv in q2.kernel() {
            for i in 0..4 {
                assert!(q2.eval_b(&kv, &IntVector::unit(4, i)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn signature_invariant_under_unimodular_transforms() {
        let q = QuadraticForm::from_i64(4, &[(0, 1, 1), (2, 2, -3), (3, 3, 2), (1, 2, 1)]).unwrap();
        let sig = q.signature();
        let mut state = 99u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        for _ in 0..100 {
            // random unimodular matrix: product of elementary shears
            let mut t = RationalMatrix::identity(4);
            for _ in 0..6 {
                let i = next() % 4;
                let mut j = next() % 4;
                if i == j {
                    j = (j + 1) % 4;
                }
                let f = BigRational::from_integer(BigInt::from((next() % 5) as i64 - 2));
                let mut e = RationalMatrix::identity(4);
                e.set(i, j, f);
                t = t.mul(&e);
            }
            let (qt, _) = q.compose(&t).unwrap();
            assert_eq!(qt.signature(), sig);
        }
    }

    #[test]
    fn json_round_trip() {
        let src = r#"{"dim": 3, "coeffs": [[0,1,1],[2,2,-1]]}"#;
        let q = QuadraticForm::from_json(src).unwrap();
        assert_eq!(q, hyperbolic3());
        let canon = q.to_json();
        assert_eq!(canon, r#"{"dim":3,"coeffs":[[0,1,1],[2,2,-1]]}"#);
        let q2 = QuadraticForm::from_json(&canon).unwrap();
        assert_eq!(q2.to_json(), canon);

        // big coefficients ride as strings
        let big = QuadraticForm::new(2, vec![(0, 0, BigInt::from(10).pow(30))]).unwrap();
        let s = big.to_json();
        assert_eq!(QuadraticForm::from_json(&s).unwrap().to_json(), s);
    }
}

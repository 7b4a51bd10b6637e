//! The growth constant ρ_n (positive root of xⁿ − x^{n−1} − ⋯ − 1), its Pisot
//! certification, the transfer operator that drives the trace recursions, and
//! the fit of generated sequences against the predicted geometry.

use crate::error::{QdError, Result};
use crate::exact::{IntervalReal, RationalMatrix};
use crate::extremal::{ln_bigint, ExtremalSequence};
use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational evaluation of p(x) = xⁿ − x^{n−1} − ⋯ − x − 1.
fn eval_p(n: u32, x: &BigRational) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n {
        acc *= x;
    }
    let mut pow = BigRational::one();
    for _ in 0..n {
        acc -= &pow;
        pow *= x;
    }
    acc
}

/// Sign-change-certified enclosure of ρ_n inside (1, 2), of width ≤ tol.
pub fn rho(n: u32, tol_bits: u32) -> Result<IntervalReal> {
    if n < 1 {
        return Err(QdError::Precondition("rho needs n >= 1".into()));
    }
    let prec = tol_bits + 16;
    let mut lo = BigRational::from_integer(BigInt::one());
    let mut hi = BigRational::from_integer(BigInt::from(2));
    if !eval_p(n, &lo).is_negative() || !eval_p(n, &hi).is_positive() {
        return Err(QdError::Precondition("sign change certification failed".into()));
    }
    for _ in 0..tol_bits + 2 {
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        if eval_p(n, &mid).is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lo_iv = IntervalReal::from_rational(&lo, prec);
    let hi_iv = IntervalReal::from_rational(&hi, prec);
    Ok(IntervalReal::new(lo_iv.lo, hi_iv.hi, prec))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PisotReport {
    pub n: u32,
    pub rho: IntervalReal,
    pub conjugate_moduli: Vec<f64>,
    pub is_pisot: bool,
}

/// All roots of p by Durand-Kerner iteration with Newton polishing;
/// numerical, with the real root cross-checked against the certified
/// enclosure.
pub fn pisot_check(n: u32) -> Result<PisotReport> {
    if n < 2 {
        return Err(QdError::Precondition("pisot_check needs n >= 2".into()));
    }
    let rho_iv = rho(n, 80)?;
    let rho_mid = rho_iv.midpoint_f64();

    let eval = |x: Complex64| -> Complex64 {
        // x^n - (x^{n-1} + ... + 1)
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            acc *= x;
        }
        let mut pow = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            acc -= pow;
            pow *= x;
        }
        acc
    };
    let eval_deriv = |x: Complex64| -> Complex64 {
        // n·x^{n-1} - Σ_{k=1}^{n-1} k·x^{k-1}
        let mut acc = Complex64::new(n as f64, 0.0);
        for _ in 0..n - 1 {
            acc *= x;
        }
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 1..n {
            acc -= pow * k as f64;
            pow *= x;
        }
        acc
    };

    let m = n as usize;
    // scatter near the unit circle (where the conjugates live) with an
    // asymmetric angular offset; one guess sits at the real root
    let mut roots: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(1.05, 2.0 * std::f64::consts::PI * (k as f64 + 0.37) / m as f64))
        .collect();
    roots[0] = Complex64::new(rho_mid, 0.0);
    for _ in 0..3000 {
        let mut delta_max = 0.0f64;
        for i in 0..m {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..m {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max < 1e-14 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let d = eval_deriv(*r);
            if d.norm() > 1e-12 {
                *r -= eval(*r) / d;
            }
        }
        // relative to the size of the leading term: |p| floats in units of ε·|x|ⁿ
        let scale = 1.0 + r.norm().powi(n as i32);
        if eval(*r).norm() > 1e-10 * scale {
            return Err(QdError::Precondition(format!("root finding did not converge for n = {n}")));
        }
    }

    // deflate the certified real root, keep conjugates
    let mut best = 0usize;
    for (i, r) in roots.iter().enumerate() {
        if (r - Complex64::new(rho_mid, 0.0)).norm() < (roots[best] - Complex64::new(rho_mid, 0.0)).norm() {
            best = i;
        }
    }
    let conjugate_moduli: Vec<f64> =
        roots.iter().enumerate().filter(|&(i, _)| i != best).map(|(_, r)| r.norm()).collect();
    let is_pisot = conjugate_moduli.iter().all(|&m| m < 1.0);
    Ok(PisotReport { n, rho: rho_iv, conjugate_moduli, is_pisot })
}

/// The integer transfer operator on R^{2n+1} acting on
/// (x₁..xₙ, y₁..yₙ, z) ↦ (xₙ, x₁+xₙ, …, x_{n−1}+xₙ, yₙ, y₁+xₙ, …, y_{n−1}+xₙ, z+xₙ).
pub fn transfer_operator(n: usize) -> Vec<Vec<BigInt>> {
    assert!(n >= 2);
    let dim = 2 * n + 1;
    let mut t = vec![vec![BigInt::zero(); dim]; dim];
    let xn = n - 1; // column of x_n
    t[0][xn] = BigInt::one();
    for j in 2..=n {
        t[j - 1][j - 2] = BigInt::one();
        t[j - 1][xn] += BigInt::one();
    }
    t[n][2 * n - 1] = BigInt::one(); // new y_1 = y_n
    for j in 2..=n {
        t[n + j - 1][n + j - 2] = BigInt::one();
        t[n + j - 1][xn] += BigInt::one();
    }
    t[2 * n][2 * n] = BigInt::one();
    t[2 * n][xn] += BigInt::one();
    t
}

/// Characteristic polynomial (monic, ascending coefficients) by the
/// Faddeev–LeVerrier recurrence over Q; exact.
pub fn char_poly(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = m.len();
    let a = RationalMatrix::new(
        m.iter().map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect()).collect(),
    );
    let mut mk = RationalMatrix::identity(n); // M_1
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    for k in 1..=n {
        // c_{n−k} = −tr(A·M_k)/k, then M_{k+1} = A·M_k + c_{n−k}·I
        let am = a.mul(&mk);
        let mut tr = BigRational::zero();
        for i in 0..n {
            tr += am.get(i, i);
        }
        let ck = -tr / BigRational::from_integer(BigInt::from(k as i64));
        coeffs[n - k] = ck.clone();
        mk = am;
        for i in 0..n {
            let v = mk.get(i, i) + &ck;
            mk.set(i, i, v);
        }
    }
    coeffs
        .into_iter()
        .map(|c| {
            debug_assert!(c.denom().is_one(), "char poly of integer matrix has integer coefficients");
            c.numer().clone()
        })
        .collect()
}

/// Product of integer polynomials in ascending-coefficient form.
pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// xⁿ − x^{n−1} − ⋯ − x − 1 in ascending coefficients.
pub fn growth_poly(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::from(-1); n + 1];
    p[n] = BigInt::one();
    p
}

/// xⁿ − 1.
pub fn cyclo_like_poly(n: usize) -> Vec<BigInt> {
    let mut q = vec![BigInt::zero(); n + 1];
    q[0] = BigInt::from(-1);
    q[n] = BigInt::one();
    q
}

fn mat_mul_int(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Evaluates an integer polynomial at an integer matrix (Horner).
pub fn poly_at_matrix(poly: &[BigInt], m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    let mut acc = vec![vec![BigInt::zero(); n]; n];
    for c in poly.iter().rev() {
        acc = mat_mul_int(&acc, m);
        for i in 0..n {
            acc[i][i] += c;
        }
    }
    acc
}

/// Closed-form dominant eigenvector (1−1/ρ, …, 1−1/ρⁿ, same, 1) and the
/// eigen-residual ‖T v − ρ v‖/‖v‖ in f64.
pub fn eigen_residual(n: usize) -> Result<f64> {
    let rho_mid = rho(n as u32, 80)?.midpoint_f64();
    let t = transfer_operator(n);
    let dim = 2 * n + 1;
    let mut v = vec![0.0f64; dim];
    for j in 1..=n {
        let val = 1.0 - rho_mid.powi(-(j as i32));
        v[j - 1] = val;
        v[n + j - 1] = val;
    }
    v[2 * n] = 1.0;
    let tf: Vec<Vec<f64>> =
        t.iter().map(|r| r.iter().map(|c| c.to_string().parse::<f64>().unwrap()).collect()).collect();
    let mut resid = 0.0f64;
    let mut norm = 0.0f64;
    for i in 0..dim {
        let tv: f64 = (0..dim).map(|j| tf[i][j] * v[j]).sum();
        resid += (tv - rho_mid * v[i]) * (tv - rho_mid * v[i]);
        norm += v[i] * v[i];
    }
    Ok((resid / norm).sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferFit {
    pub alpha: f64,
    pub operator_dim: usize,
    /// first sequence index the vectors v_i are defined for (= n)
    pub start_index: usize,
    /// ‖v_{i+1} − T v_i‖, computed from exact big-integer ratios
    pub residuals: Vec<f64>,
    /// ‖v_i − α ρ^i v‖ against the closed-form eigenvector
    pub deviations: Vec<f64>,
    /// |b_i^{(j)}| log-prediction relative errors for the last computed index
    pub last_b_prediction_rel_err: Vec<f64>,
}

/// ln(a/b) for positive bigints with accuracy relative to the ratio itself:
/// no cancellation noise when a/b is close to 1.
fn ln_exact_ratio(a: &BigInt, b: &BigInt) -> f64 {
    debug_assert!(a.is_positive() && b.is_positive());
    let diff = a - b;
    if diff.is_zero() {
        return 0.0;
    }
    let delta = big_ratio_f64(&diff, b);
    if delta.abs() < 0.5 {
        delta.ln_1p()
    } else {
        ln_bigint(a) - ln_bigint(b)
    }
}

/// n/d as f64 with correct magnitude for huge operands.
fn big_ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    let neg = n.is_negative() != d.is_negative();
    let (na, da) = (n.abs(), d.abs());
    if na.is_zero() {
        return 0.0;
    }
    let shift_n = na.bits() as i64 - 53;
    let shift_d = da.bits() as i64 - 53;
    let top = |x: &BigInt, s: i64| -> f64 {
        let t = if s > 0 { x >> s as u64 } else { x << (-s) as u64 };
        t.to_string().parse::<f64>().unwrap()
    };
    let val = top(&na, shift_n) / top(&da, shift_d) * 2f64.powi((shift_n - shift_d) as i32);
    if neg {
        -val
    } else {
        val
    }
}

/// Builds the log-vectors v_i from the exact traces and fits them against the
/// transfer operator's dominant eigendirection.
pub fn appendix_fit(seq: &ExtremalSequence) -> Result<TransferFit> {
    let n = seq.n();
    let len = seq.len();
    if len < n + 5 {
        return Err(QdError::InsufficientData { needed: n + 5, got: len });
    }
    let rho_mid = rho(n as u32, 80)?.midpoint_f64();
    let dim = 2 * n + 1;

    // v_i defined for i = n..len-1
    let v_at = |i: usize| -> Vec<f64> {
        let mut v = Vec::with_capacity(dim);
        for j in 1..=n {
            v.push(ln_bigint(&seq.b_trace(i, j).abs()));
        }
        for j in 1..=n {
            v.push(0.5 * ln_bigint(seq.wedge_trace_sq(i, j)));
        }
        v.push(0.5 * ln_bigint(&seq.points()[i].norm_sq()));
        v
    };

    // α from least squares on ln X_i ≈ α ρ^i over the last half
    let start_fit = n + (len - n) / 2;
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for i in start_fit..len {
        let li = 0.5 * ln_bigint(&seq.points()[i].norm_sq());
        let w = rho_mid.powi(i as i32);
        num += w * li;
        den += w * w;
    }
    let alpha = num / den;

    // deviations ‖v_i − α ρ^i v‖
    let mut eig = vec![0.0f64; dim];
    for j in 1..=n {
        let val = 1.0 - rho_mid.powi(-(j as i32));
        eig[j - 1] = val;
        eig[n + j - 1] = val;
    }
    eig[dim - 1] = 1.0;
    let mut deviations = Vec::new();
    for i in n..len {
        let v = v_at(i);
        let scale = alpha * rho_mid.powi(i as i32);
        let d: f64 = v.iter().zip(&eig).map(|(a, e)| (a - scale * e) * (a - scale * e)).sum();
        deviations.push(d.sqrt());
    }

    // residuals ‖v_{i+1} − T v_i‖ via exact integer ratios, componentwise:
    //   x-block j=1:  ln |b_{i+1}^{(1)}| − ln |b_i^{(n)}|            (zero exactly)
    //   x-block j≥2:  ln |b_{i+1}^{(j)}| − ln |b_i^{(j-1)}| − ln |b_i^{(n)}|
    //   y-blocks analogous on the wedge norms, z on the heights
    let mut residuals = Vec::new();
    for i in n..len - 1 {
        let bn = seq.b_trace(i, n).abs();
        let bn_sq = &bn * &bn;
        let mut acc = 0.0f64;
        for j in 1..=n {
            let num = seq.b_trace(i + 1, j).abs();
            let den = if j == 1 { bn.clone() } else { seq.b_trace(i, j - 1).abs() * &bn };
            let c = ln_exact_ratio(&num, &den);
            acc += c * c;
        }
        for j in 1..=n {
            let num = seq.wedge_trace_sq(i + 1, j);
            let den = if j == 1 {
                seq.wedge_trace_sq(i, n).clone()
            } else {
                seq.wedge_trace_sq(i, j - 1) * &bn_sq
            };
            let c = 0.5 * ln_exact_ratio(num, &den);
            acc += c * c;
        }
        let c = 0.5 * ln_exact_ratio(&seq.points()[i + 1].norm_sq(), &(seq.points()[i].norm_sq() * &bn_sq));
        acc += c * c;
        residuals.push(acc.sqrt());
    }

    // |b_i^{(j)}| ≈ exp(α(ρ^i − ρ^{i−j})) at the last index
    let last = len - 1;
    let mut last_b_prediction_rel_err = Vec::new();
    for j in 1..=n {
        let predicted = alpha * (rho_mid.powi(last as i32) - rho_mid.powi((last - j) as i32));
        let actual = ln_bigint(&seq.b_trace(last, j).abs());
        last_b_prediction_rel_err.push((predicted - actual).abs() / actual.abs());
    }

    Ok(TransferFit { alpha, operator_dim: dim, start_index: n, residuals, deviations, last_b_prediction_rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_values() {
        let r2 = rho(2, 60).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let (lo, hi) = r2.to_f64_pair();
        assert!(lo <= phi && phi <= hi);
        assert!(hi - lo < 1e-15);

        let r3 = rho(3, 60).unwrap();
        let (lo, hi) = r3.to_f64_pair();
        assert!(lo <= 1.8392867552141612 && 1.8392867552141612 <= hi);
    }

    #[test]
    fn rho_satisfies_h_identity() {
        // h(x) = x^{n+1} − 2xⁿ + 1 vanishes at ρ: check ρⁿ(2−ρ) encloses 1
        for n in 2..=8u32 {
            let r = rho(n, 96).unwrap();
            let mut p = IntervalReal::from_i64(1, 128);
            for _ in 0..n {
                p = p.mul(&r);
            }
            let two = IntervalReal::from_i64(2, 128);
            let val = p.mul(&two.sub(&r));
            assert!(val.contains_bigint(&BigInt::one()), "n = {n}");
        }
    }

    #[test]
    fn rho_defining_sum() {
        // Σ_{k=1..n} ρ^{-k} = 1 within 1e-12
        for n in 2..=12u32 {
            let r = rho(n, 120).unwrap().midpoint_f64();
            let s: f64 = (1..=n).map(|k| r.powi(-(k as i32))).sum();
            assert!((s - 1.0).abs() < 1e-12, "n = {n}: {s}");
        }
    }

    #[test]
    fn rho_monotone_and_bounded() {
        let mut prev = 0.0;
        for n in 2..=12u32 {
            let r = rho(n, 80).unwrap().midpoint_f64();
            assert!(r > prev, "rho increasing");
            assert!(r < 2.0 - 2f64.powi(-(n as i32)), "rho_n < 2 - 2^-n");
            prev = r;
        }
    }

    #[test]
    fn pisot_reports() {
        let r = pisot_check(2).unwrap();
        assert_eq!(r.conjugate_moduli.len(), 1);
        assert!((r.conjugate_moduli[0] - 0.6180339887).abs() < 1e-8);
        assert!(r.is_pisot);

        let r3 = pisot_check(3).unwrap();
        // complex pair modulus = sqrt(1/rho_3)
        let expect = (1.0 / r3.rho.midpoint_f64()).sqrt();
        for m in &r3.conjugate_moduli {
            assert!((m - expect).abs() < 1e-9);
        }

        for n in 2..=12 {
            let rep = pisot_check(n).unwrap();
            assert!(rep.is_pisot, "n = {n}");
            for m in &rep.conjugate_moduli {
                assert!(*m < 1.0 - 1e-9, "n = {n}: modulus {m}");
            }
        }
        for n in 13..=40 {
            let rep = pisot_check(n).unwrap();
            assert!(rep.is_pisot, "n = {n}");
        }
    }

    #[test]
    fn transfer_operator_examples() {
        let t = transfer_operator(2);
        let expect: Vec<Vec<i64>> = vec![
            vec![0, 1, 0, 0, 0],
            vec![1, 1, 0, 0, 0],
            vec![0, 0, 0, 1, 0],
            vec![0, 1, 1, 0, 0],
            vec![0, 1, 0, 0, 1],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(t[i][j], BigInt::from(*v), "({i},{j})");
            }
        }
    }

    #[test]
    fn char_poly_factorization() {
        for n in 2..=12usize {
            let t = transfer_operator(n);
            let cp = char_poly(&t);
            let expect = poly_mul(&poly_mul(&growth_poly(n), &cyclo_like_poly(n)), &[BigInt::from(-1), BigInt::one()]);
            assert_eq!(cp, expect, "n = {n}");
        }
    }

    #[test]
    fn minimal_polynomial_is_pq() {
        for n in 2..=6usize {
            let t = transfer_operator(n);
            let pq = poly_mul(&growth_poly(n), &cyclo_like_poly(n));
            let z = poly_at_matrix(&pq, &t);
            assert!(z.iter().all(|r| r.iter().all(|v| v.is_zero())), "pq(T) = 0 for n = {n}");
            // eigenvalue-1 eigenspace has dimension 2
            let dim = 2 * n + 1;
            let mut ti = RationalMatrix::new(
                t.iter().map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect()).collect(),
            );
            for i in 0..dim {
                let v = ti.get(i, i) - BigRational::one();
                ti.set(i, i, v);
            }
            assert_eq!(ti.rank(), dim - 2, "rank(T - I) for n = {n}");
        }
    }

    #[test]
    fn eigenvector_residual_small() {
        for n in 2..=12 {
            assert!(eigen_residual(n).unwrap() <= 1e-9, "n = {n}");
        }
    }

    #[test]
    fn fit_on_reference_sequence() {
        use crate::canonical::reduce_canonical;
        use crate::extremal::{extend, from_seed, initial_points, SeedParam, DEFAULT_C0};
        use crate::qform::QuadraticForm;
        let q = QuadraticForm::from_i64(3, &[(0, 1, 1), (2, 2, -1)]).unwrap();
        let red = reduce_canonical(&q).unwrap();
        let seed = initial_points(&red, &SeedParam::Ell(BigInt::from(5)), DEFAULT_C0).unwrap();
        let mut seq = from_seed(&red, seed).unwrap();
        extend(&mut seq, 17).unwrap();
        let fit = appendix_fit(&seq).unwrap();
        assert!(fit.alpha > 0.0);
        // residuals non-increasing from index 5 on (v_i starts at i = n = 2)
        let offset = 5 - fit.start_index;
        for w in fit.residuals[offset..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "residuals should not increase: {w:?}");
        }
        // deviations bounded by twice their value at i = 5
        let bound = 2.0 * fit.deviations[offset].max(1e-6);
        for d in &fit.deviations[offset..] {
            assert!(*d <= bound, "deviation {d} exceeds {bound}");
        }
        // b-size prediction within 5% at the last index
        for e in &fit.last_b_prediction_rel_err {
            assert!(*e < 0.05, "prediction error {e}");
        }
    }
}

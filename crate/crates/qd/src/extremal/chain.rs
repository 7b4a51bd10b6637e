//! Chains of rational points on quadrics of Witt index ≥ 2: consecutive
//! points span totally isotropic planes, recent points stay linearly
//! independent, and heights grow fast enough that the limit point is
//! approximated at a prescribed decay schedule φ.

use crate::error::{QdError, Result};
use crate::exact::{proj_dist, wedge_norm_sq, IntervalReal, IntVector, RationalMatrix};
use crate::qform::QuadraticForm;
use crate::witt::{isotropic_vector, witt_decompose};
use num::{BigInt, FromPrimitive, One, Signed, Zero};

/// Decay schedules φ(X) for the approximation checkpoints: both are
/// admissible (decreasing to 0 with X·φ(X) → ∞).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiSchedule {
    /// φ(X) = log(3X)/X. The height needed at each step grows exponentially
    /// in the plane covolume, which itself grows with the height: expect the
    /// digit budget to stop runs after a handful of steps.
    LogOverX,
    /// φ(X) = X^{-1/2}; heights grow at a power rate, long chains are cheap.
    InvSqrt,
}

impl PhiSchedule {
    pub fn parse(s: &str) -> Result<PhiSchedule> {
        match s {
            "log" => Ok(PhiSchedule::LogOverX),
            "sqrt" => Ok(PhiSchedule::InvSqrt),
            other => Err(QdError::BadInput(format!("unknown phi schedule {other:?} (expected log|sqrt)"))),
        }
    }

    /// φ(X) as an outward interval; X must be certified positive.
    pub fn eval(&self, x: &IntervalReal) -> Result<IntervalReal> {
        match self {
            PhiSchedule::LogOverX => {
                let three_x = x.mul(&IntervalReal::from_i64(3, x.prec));
                three_x.ln()?.div(x)
            }
            PhiSchedule::InvSqrt => IntervalReal::from_i64(1, x.prec).div(&x.sqrt()?),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainReport {
    pub points: Vec<IntVector>,
    pub phi: PhiSchedule,
}

fn ambient_of(v_basis: &[IntVector], x: &IntVector) -> IntVector {
    let dim = v_basis[0].len();
    let mut acc = IntVector::zero(dim);
    for (k, c) in x.coords().iter().enumerate() {
        acc = acc.add(&v_basis[k].scale(c));
    }
    acc.into_primitive_normalized()
}

fn in_span(m: &RationalMatrix, x: &IntVector) -> bool {
    use num::BigRational;
    let dim = x.len();
    if m.nrows() != dim {
        return false;
    }
    let r0 = m.rank();
    let mut cols: Vec<Vec<BigRational>> = (0..m.ncols()).map(|j| m.column(j)).collect();
    cols.push(x.to_rational_coords());
    let rows: Vec<Vec<BigRational>> = (0..dim).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    RationalMatrix::new(rows).rank() == r0
}

/// Saturated integer basis of {w : b(w, x) = 0 for all x in `orth_to`},
/// within the ambient space of q.
fn orthogonal_complement(q: &QuadraticForm, orth_to: &[IntVector]) -> Vec<IntVector> {
    let g = q.gram_rational();
    let rows: Vec<Vec<num::BigRational>> = orth_to.iter().map(|x| g.mul_int_vec(x)).collect();
    let m = RationalMatrix::new(rows);
    m.null_space().iter().map(|r| IntVector::from_rational_coords(r).into_primitive_normalized()).collect()
}

/// A zero of q inside span(v_basis) avoiding every subspace in `avoid`.
fn find_zero_avoiding(
    q: &QuadraticForm,
    v_basis: &[IntVector],
    avoid: &[RationalMatrix],
    cap: u64,
) -> Result<IntVector> {
    let qv = crate::witt::restrict_to_basis(q, v_basis)?;
    let dv = qv.dim();
    let kernel_v = qv.kernel();
    let rank_v = dv - kernel_v.len();
    let acceptable = |amb: &IntVector| -> bool { avoid.iter().all(|m| !in_span(m, amb)) };

    let mut tried = 0u64;
    if rank_v == 2 {
        // restriction splits as kernel ⊥ binary witt-1 form: its zeros are the
        // union of two explicit lines, no search needed
        let mut comp: Vec<IntVector> = Vec::new();
        {
            let mut chosen = kernel_v.clone();
            for i in 0..dv {
                if chosen.len() == dv {
                    break;
                }
                let e = IntVector::unit(dv, i);
                let mut test = chosen.clone();
                test.push(e.clone());
                if RationalMatrix::from_columns(&test).rank() == test.len() {
                    chosen.push(e.clone());
                    comp.push(e);
                }
            }
        }
        debug_assert_eq!(comp.len(), 2);
        let alpha = qv.eval_q(&comp[0])?;
        let beta = qv.eval_b(&comp[0], &comp[1])?;
        let gamma = qv.eval_q(&comp[1])?;
        let disc = &beta * &beta - BigInt::from(4) * &alpha * &gamma;
        if disc.is_negative() || !crate::pell::is_square(&disc) {
            return Err(QdError::Precondition("restriction is not split of witt index 1".into()));
        }
        let root = crate::exact::isqrt(&disc);
        let lines: Vec<(BigInt, BigInt)> = if alpha.is_zero() {
            vec![(BigInt::one(), BigInt::zero()), (gamma.clone(), -&beta)]
        } else {
            vec![(-&beta + &root, &alpha * 2), (-&beta - &root, &alpha * 2)]
        };
        let line_vecs: Vec<IntVector> = lines
            .iter()
            .map(|(s, t)| comp[0].scale(s).add(&comp[1].scale(t)).into_primitive_normalized())
            .collect();
        for lv in &line_vecs {
            debug_assert!(qv.eval_q(lv).unwrap().is_zero());
        }
        // sweep small combinations over each totally isotropic subspace
        // kernel ∪ line, preferring the first line
        let mut shells = 0i64;
        loop {
            for lv in &line_vecs {
                let mut basis = kernel_v.clone();
                basis.push(lv.clone());
                let d = basis.len();
                let mut tuples = Vec::new();
                if shells == 0 {
                    // need a non-zero line component, skip the zero shell
                } else {
                    crate::witt::shell_tuples(d, shells, &mut tuples);
                }
                for t in &tuples {
                    if t[d - 1] == 0 {
                        continue; // must leave the kernel+old directions via the line
                    }
                    tried += 1;
                    let mut xv = IntVector::zero(dv);
                    for (k, &c) in t.iter().enumerate() {
                        xv = xv.add(&basis[k].scale(&BigInt::from(c)));
                    }
                    if xv.is_zero() {
                        continue;
                    }
                    debug_assert!(qv.eval_q(&xv).unwrap().is_zero());
                    let amb = ambient_of(v_basis, &xv);
                    if acceptable(&amb) {
                        return Ok(amb);
                    }
                    if tried >= cap {
                        return Err(QdError::SearchExhausted { cap: tried });
                    }
                }
            }
            shells += 1;
            if shells > 64 {
                return Err(QdError::SearchExhausted { cap: tried });
            }
        }
    }

    // rank ≥ 3: one hyperbolic pair gives the quadratic parametrization
    // X(p) = −q(w_p)·u + c·(v + w_p), w_p over the complement of the pair
    let w = witt_decompose(&qv, cap)?;
    if w.witt_index == 0 {
        return Err(QdError::Precondition("restriction has no isotropic plane to parametrize".into()));
    }
    let (u, v) = w.hyperbolic_pairs[0].clone();
    let c = qv.eval_b(&u, &v)?;
    let comp = orthogonal_complement(&qv, &[u.clone(), v.clone()]);
    let d = comp.len();
    let mut shells = 0i64;
    loop {
        let mut tuples = Vec::new();
        if shells == 0 {
            tuples.push(vec![0i64; d.max(1)]);
        } else if d > 0 {
            crate::witt::shell_tuples(d, shells, &mut tuples);
        }
        for t in &tuples {
            tried += 1;
            let mut wp = IntVector::zero(dv);
            if d > 0 {
                for (k, &cv) in t.iter().enumerate() {
                    wp = wp.add(&comp[k].scale(&BigInt::from(cv)));
                }
            }
            let mp = qv.eval_q(&wp)?;
            let xv = u.scale(&-&mp).add(&v.add(&wp).scale(&c));
            if xv.is_zero() {
                continue;
            }
            debug_assert!(qv.eval_q(&xv).unwrap().is_zero());
            let amb = ambient_of(v_basis, &xv);
            if acceptable(&amb) {
                return Ok(amb);
            }
            if tried >= cap {
                return Err(QdError::SearchExhausted { cap: tried });
            }
        }
        shells += 1;
        if shells > 64 {
            return Err(QdError::SearchExhausted { cap: tried });
        }
    }
}

/// ceil(e^lnv) as a BigInt, good to f64 accuracy, for arbitrarily large lnv.
fn bigint_from_ln(lnv: f64) -> BigInt {
    if lnv <= 0.0 {
        return BigInt::one();
    }
    let bits = lnv / std::f64::consts::LN_2;
    if bits <= 52.0 {
        return BigInt::from_f64(lnv.exp().ceil()).unwrap_or_else(BigInt::one);
    }
    let k = bits.floor() as u64 - 52;
    let mant = (bits - bits.floor()).exp2() * 2f64.powi(52);
    (BigInt::from_f64(mant.ceil()).unwrap_or_else(BigInt::one) + 1) << k
}

/// Exact verification of the chain conditions: every point is an isotropic
/// point outside the kernel, consecutive spans are totally isotropic, any
/// n+1 consecutive points are independent, and each point is non-orthogonal
/// to the previous n−1.
pub fn verify_chain_conditions(q: &QuadraticForm, points: &[IntVector]) -> Result<()> {
    let n = q.dim() - 1;
    let g = q.gram_rational();
    for (idx, x) in points.iter().enumerate() {
        let i = idx + 1; // chain points are 1-indexed
        if !q.eval_q(x)?.is_zero() {
            return Err(QdError::Precondition(format!("q(x_{i}) != 0")));
        }
        if g.mul_int_vec(x).iter().all(|c| c.is_zero()) {
            return Err(QdError::Precondition(format!("x_{i} lies in the kernel")));
        }
        if i >= 2 && !q.eval_b(x, &points[idx - 1])?.is_zero() {
            return Err(QdError::Precondition(format!("span(x_{i}, x_{}) is not totally isotropic", i - 1)));
        }
        if i >= 2 {
            let j = if i > n { i - n } else { 1 };
            let prev: Vec<IntVector> = points[j - 1..idx].to_vec();
            let m = RationalMatrix::from_columns(&prev);
            if in_span(&m, x) {
                return Err(QdError::Precondition(format!("x_{i} lies in the span of x_{j}..x_{}", i - 1)));
            }
        }
        if i >= n {
            let w2: Vec<IntVector> = points[idx - (n - 1)..idx].to_vec();
            let orth = w2.iter().all(|w| q.eval_b(x, w).map(|b| b.is_zero()).unwrap_or(false));
            if orth {
                return Err(QdError::Precondition(format!("x_{i} is orthogonal to the previous n-1 points")));
            }
        }
    }
    Ok(())
}

/// Greedy construction of a chain of `steps` points satisfying the exact
/// conditions plus the growth/distance conditions driven by φ.
pub fn isotropic_chain(
    q: &QuadraticForm,
    steps: usize,
    phi: PhiSchedule,
    witness_cap: u64,
    digit_budget: u64,
    prec: u32,
) -> Result<ChainReport> {
    let n = q.dim() - 1;
    let w = witt_decompose(q, witness_cap)?;
    if w.witt_index < 2 || q.rank() < 4 {
        return Err(QdError::Precondition("isotropic chains need witt index >= 2 and rank >= 4".into()));
    }
    let kernel = q.kernel();
    let g = q.gram_rational();

    let mut points: Vec<IntVector> = vec![isotropic_vector(q, witness_cap)?];
    while points.len() < steps {
        let k = points.len(); // 1-based index of the last point
        let xk = points[k - 1].clone();
        let v_basis = orthogonal_complement(q, &[xk.clone()]);

        let mut avoid: Vec<RationalMatrix> = Vec::new();
        if !kernel.is_empty() {
            avoid.push(RationalMatrix::from_columns(&kernel));
        }
        let j = if k + 1 > n { k + 1 - n } else { 1 };
        avoid.push(RationalMatrix::from_columns(&points[j - 1..k]));
        let w2: Option<Vec<IntVector>> = if k + 1 >= n { Some(points[k + 1 - n..k].to_vec()) } else { None };
        if let Some(ref w2v) = w2 {
            let w2perp = orthogonal_complement(q, w2v);
            if !w2perp.is_empty() {
                avoid.push(RationalMatrix::from_columns(&w2perp));
            }
        }

        let cand = find_zero_avoiding(q, &v_basis, &avoid, witness_cap)?;

        // Shift by a multiple of x_k until the growth and distance conditions
        // certify; the kernel and orthogonality conditions can fail for at most
        // one shift value each.
        // The needed height is predicted in log space: its raw value can far
        // exceed f64 range.
        let wsq = wedge_norm_sq(&cand, &xk)?;
        let w_log = 0.5 * super::ln_bigint(&wsq); // ln ‖cand ∧ x_k‖
        let xk_log = 0.5 * super::ln_bigint(&xk.norm_sq());
        let mut needed_log = 0.0f64; // ln of the height the conditions demand
        if k >= 2 {
            // φ term: (2/3)·X·φ(X) ≥ W
            let phi_log = match phi {
                PhiSchedule::LogOverX => {
                    // ln X ≥ 1.5·W − ln 3, blows up in W itself
                    if w_log > 34.5 {
                        // W > 1e15: needed digits ≈ 1.5·W/ln 10, saturating
                        let needed = (1.5 * w_log.exp() / std::f64::consts::LN_10).min(u64::MAX as f64) as u64;
                        return Err(QdError::DigitBudgetExceeded { needed, budget: digit_budget });
                    }
                    1.5 * w_log.exp() - 3f64.ln()
                }
                PhiSchedule::InvSqrt => 2.0 * (1.5f64.ln() + w_log),
            };
            needed_log = needed_log.max(phi_log);
            // distance-contraction term: X ≥ 3·W/(X_{k-1-norm}·dist(x_{k-1}, x_k-prev))
            let wsq_prev = wedge_norm_sq(&points[k - 2], &points[k - 1])?;
            let d_prev_log = 0.5
                * (super::ln_bigint(&wsq_prev)
                    - super::ln_bigint(&points[k - 2].norm_sq())
                    - super::ln_bigint(&points[k - 1].norm_sq()));
            needed_log = needed_log.max(3f64.ln() + w_log - xk_log - d_prev_log);
        }
        let needed_digits = (needed_log / std::f64::consts::LN_10).max(0.0) as u64 + 1;
        if needed_digits > digit_budget {
            return Err(QdError::DigitBudgetExceeded { needed: needed_digits, budget: digit_budget });
        }
        // Keep b as close to minimal as possible: any slack feeds back into
        // the covolume of the next step's plane and compounds.
        let mut b = bigint_from_ln((needed_log - xk_log).max(0.0));
        let mut attempts = 0;
        let accepted = loop {
            attempts += 1;
            if attempts > 80 {
                return Err(QdError::PrecisionExhausted { bits: prec, context: "chain shift search".into() });
            }
            let x_new = cand.add(&xk.scale(&b));
            // exact conditions that the shift could break
            let in_kernel = g.mul_int_vec(&x_new).iter().all(|c| c.is_zero());
            let bad_w2 = match &w2 {
                Some(w2v) => w2v.iter().all(|w| q.eval_b(&x_new, w).map(|v| v.is_zero()).unwrap_or(true)),
                None => false,
            };
            if in_kernel || bad_w2 {
                b += 1;
                continue;
            }
            // (v): strict height growth, exact
            if x_new.norm_sq() <= xk.norm_sq() {
                b += 1;
                continue;
            }
            // (vi): dist(x_new, x_k) ≤ (1/3)·min{2·φ(X_new)/X_{k-1-norm}, dist(x_k, x_{k-1})}
            if k >= 2 {
                let certify = |p: u32| -> Result<Option<bool>> {
                    let d_new = proj_dist(&x_new, &xk, p)?;
                    let x_new_norm = x_new.norm_interval(p);
                    let phi_val = phi.eval(&x_new_norm)?;
                    let term1 = phi_val
                        .mul(&IntervalReal::from_i64(2, p))
                        .div(&points[k - 1].norm_interval(p))?;
                    let term2 = proj_dist(&points[k - 2], &points[k - 1], p)?;
                    let bound = term1.min(&term2).div(&IntervalReal::from_i64(3, p))?;
                    if d_new.is_certainly_le(&bound) {
                        Ok(Some(true))
                    } else if bound.is_strictly_less(&d_new) {
                        Ok(Some(false))
                    } else {
                        Ok(None) // overlapping: more precision
                    }
                };
                match crate::exact::with_precision(prec, crate::exact::PRECISION_CAP, certify, "chain condition (vi)") {
                    Ok(true) => break x_new,
                    Ok(false) => {
                        let bump: BigInt = (&b >> 6) + 1;
                        b += bump;
                        continue;
                    }
                    Err(e) => return Err(e),
                }
            } else {
                break x_new;
            }
        };
        points.push(accepted.into_primitive_normalized_keep_direction());
    }
    verify_chain_conditions(q, &points)?;
    Ok(ChainReport { points, phi })
}

/// Approximation checkpoints against the partial limit point: for each
/// 3 ≤ i ≤ len, lhs = X_{i−1}·dist([x_last], [x_{i−1}]) and rhs = φ(X_i);
/// returns (i, lhs, rhs, certified lhs ≤ rhs).
pub fn phi_checkpoints(report: &ChainReport, prec: u32) -> Result<Vec<(usize, IntervalReal, IntervalReal, bool)>> {
    let pts = &report.points;
    let last = pts.last().ok_or(QdError::InsufficientData { needed: 3, got: 0 })?;
    let mut out = Vec::new();
    for i in 3..=pts.len() {
        let xi_prev = &pts[i - 2]; // x_{i-1}, 1-based
        let xi = &pts[i - 1];
        let lhs = proj_dist(last, xi_prev, prec)?.mul(&xi_prev.norm_interval(prec));
        let rhs = report.phi.eval(&xi.norm_interval(prec))?;
        let ok = lhs.is_certainly_le(&rhs);
        out.push((i, lhs, rhs, ok));
    }
    Ok(out)
}

impl IntVector {
    /// Primitive scaling that keeps the direction (no sign flip): chain points
    /// should stay near their construction direction for the distance bounds.
    fn into_primitive_normalized_keep_direction(self) -> IntVector {
        if self.is_zero() {
            return self;
        }
        let g = self.content();
        IntVector::new(self.coords().iter().map(|c| c / &g).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split4() -> QuadraticForm {
        QuadraticForm::from_i64(4, &[(0, 1, 1), (2, 3, 1)]).unwrap()
    }

    #[test]
    fn chain_rejects_low_witt_index() {
        let q = QuadraticForm::from_i64(3, &[(0, 1, 1), (2, 2, -1)]).unwrap();
        assert!(matches!(
            isotropic_chain(&q, 4, PhiSchedule::InvSqrt, 100_000, 10_000, 128),
            Err(QdError::Precondition(_))
        ));
    }

    #[test]
    fn chain_sqrt_schedule_runs_ten_steps() {
        let rep = isotropic_chain(&split4(), 10, PhiSchedule::InvSqrt, 100_000, 100_000, 128).unwrap();
        assert_eq!(rep.points.len(), 10);
        verify_chain_conditions(&split4(), &rep.points).unwrap();
        // heights strictly increase
        for w in rep.points.windows(2) {
            assert!(w[0].norm_sq() < w[1].norm_sq());
        }
        let cps = phi_checkpoints(&rep, 192).unwrap();
        assert!(!cps.is_empty());
        for (i, lhs, rhs, ok) in &cps {
            assert!(ok, "checkpoint {i} failed: lhs {:?} rhs {:?}", lhs.to_f64_pair(), rhs.to_f64_pair());
        }
    }

    #[test]
    fn chain_log_schedule_hits_budget() {
        // the log schedule forces tower growth; a small budget must stop the
        // run with a clean error rather than looping
        let err = isotropic_chain(&split4(), 10, PhiSchedule::LogOverX, 100_000, 2_000, 128).unwrap_err();
        assert!(matches!(err, QdError::DigitBudgetExceeded { .. }), "got {err:?}");
    }

    #[test]
    fn chain_log_schedule_first_steps_work() {
        let rep = isotropic_chain(&split4(), 4, PhiSchedule::LogOverX, 100_000, 100_000, 128).unwrap();
        assert_eq!(rep.points.len(), 4);
        verify_chain_conditions(&split4(), &rep.points).unwrap();
        let cps = phi_checkpoints(&rep, 192).unwrap();
        for (i, _, _, ok) in &cps {
            assert!(ok, "checkpoint {i} failed");
        }
    }

    #[test]
    fn first_pair_is_explicit() {
        // on t0t1+t2t3 the first two points span a coordinate isotropic plane
        let rep = isotropic_chain(&split4(), 2, PhiSchedule::InvSqrt, 100_000, 10_000, 128).unwrap();
        let q = split4();
        assert!(q.eval_q(&rep.points[0]).unwrap().is_zero());
        assert!(q.eval_q(&rep.points[1]).unwrap().is_zero());
        assert!(q.eval_b(&rep.points[0], &rep.points[1]).unwrap().is_zero());
    }
}

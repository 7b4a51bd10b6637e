//! Approximation measures D and L, best-approximation scans (exact and
//! fast-sweep engines with a mandatory-agreement contract), exponent
//! estimation, and the inequality monitors for the constructed points.

use crate::error::{QdError, Result};
use crate::exact::{with_precision, IntervalReal, IntVector, DEFAULT_PRECISION, PRECISION_CAP};
use crate::extremal::{ln_bigint, ExtremalSequence, LimitPoint};
use crate::qform::QuadraticForm;
use num::{BigInt, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanFilter {
    All,
    NonZerosOfQ,
    ZerosOfQ,
}

impl ScanFilter {
    pub fn parse(s: &str) -> Result<ScanFilter> {
        match s {
            "all" => Ok(ScanFilter::All),
            "nonzero" => Ok(ScanFilter::NonZerosOfQ),
            "zero" => Ok(ScanFilter::ZerosOfQ),
            other => Err(QdError::BadInput(format!("unknown filter {other:?} (expected all|nonzero|zero)"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ScanFilter::All => "all",
            ScanFilter::NonZerosOfQ => "nonzero",
            ScanFilter::ZerosOfQ => "zero",
        }
    }

    fn accepts(&self, q: &QuadraticForm, x: &IntVector) -> Result<bool> {
        Ok(match self {
            ScanFilter::All => true,
            ScanFilter::NonZerosOfQ => !q.eval_q(x)?.is_zero(),
            ScanFilter::ZerosOfQ => q.eval_q(x)?.is_zero(),
        })
    }
}

/// One breakpoint of the best-approximation staircase.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    /// Integer height at which the minimizer appears: ceil ‖minimizer‖.
    pub x: BigInt,
    pub minimizer: IntVector,
    pub value: IntervalReal,
    pub filter: ScanFilter,
}

#[derive(Serialize, Deserialize)]
struct ScanRecordRepr {
    x: String,
    minimizer: IntVector,
    value: IntervalReal,
    filter: ScanFilter,
}

impl Serialize for ScanRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScanRecordRepr {
            x: self.x.to_string(),
            minimizer: self.minimizer.clone(),
            value: self.value.clone(),
            filter: self.filter,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScanRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let r = ScanRecordRepr::deserialize(d)?;
        Ok(ScanRecord {
            x: r.x.parse().map_err(D::Error::custom)?,
            minimizer: r.minimizer,
            value: r.value,
            filter: r.filter,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanEngine {
    /// Exhaustive over all integer points of Euclidean norm ≤ X_max.
    Exact,
    /// Sweeps every coordinate anchor along the ray of ξ plus a small
    /// exhaustive box; agreement with Exact is a test contract.
    Fast,
}

/// D_ξ(x) = ‖x ∧ ξ‖/‖ξ‖ from the limit point's (inflated) coordinates, so
/// the enclosure also contains the value at the true limit.
pub fn d_of(xi: &LimitPoint, x: &IntVector, prec: u32) -> Result<IntervalReal> {
    if x.is_zero() {
        return Err(QdError::ZeroVector);
    }
    let coords = xi.coords(prec);
    if coords.len() != x.len() {
        return Err(QdError::DimensionMismatch { expected: coords.len(), got: x.len() });
    }
    let n = x.len();
    let mut acc = IntervalReal::zero(prec);
    for i in 0..n {
        for j in i + 1..n {
            let m = coords[j].mul_bigint(x.coord(i)).sub(&coords[i].mul_bigint(x.coord(j)));
            acc = acc.add(&m.square());
        }
    }
    let wedge = acc.sqrt_clamped()?;
    let mut nsq = IntervalReal::zero(prec);
    for c in &coords {
        nsq = nsq.add(&c.square());
    }
    wedge.div(&nsq.sqrt_clamped()?)
}

/// L_ξ(x) = max_{1≤i≤n} |x₀ξᵢ − xᵢξ₀|; ξ₀'s interval must exclude zero.
pub fn l_of(xi: &LimitPoint, x: &IntVector, prec: u32) -> Result<IntervalReal> {
    if x.is_zero() {
        return Err(QdError::ZeroVector);
    }
    let coords = xi.coords(prec);
    if coords.len() != x.len() {
        return Err(QdError::DimensionMismatch { expected: coords.len(), got: x.len() });
    }
    if coords[0].contains_zero() {
        return Err(QdError::Precondition("xi_0 interval contains zero".into()));
    }
    let mut best: Option<IntervalReal> = None;
    for i in 1..x.len() {
        let v = coords[i].mul_bigint(x.coord(0)).sub(&coords[0].mul_bigint(x.coord(i))).abs();
        best = Some(match best {
            None => v,
            Some(b) => b.max(&v),
        });
    }
    Ok(best.expect("dimension >= 2"))
}

fn ceil_norm(x: &IntVector) -> BigInt {
    let nsq = x.norm_sq();
    let r = crate::exact::isqrt(&nsq);
    if &r * &r == nsq {
        r
    } else {
        r + 1
    }
}

// ---------------------------------------------------------------------------
// Candidate generation. Both engines produce a superset of the true record
// points; the shared exact staircase pass turns a superset into records, so
// agreeing supersets give byte-identical output.
// ---------------------------------------------------------------------------

/// f64 staircase for the exhaustive engine's prefilter: breakpoints
/// (norm_sq, d²) with minima non-increasing in the norm.
struct F64Staircase {
    steps: Vec<(i64, f64)>,
}

impl F64Staircase {
    fn new() -> Self {
        F64Staircase { steps: Vec::new() }
    }

    fn min_at(&self, nsq: i64) -> f64 {
        let i = self.steps.partition_point(|&(s, _)| s <= nsq);
        if i == 0 {
            f64::INFINITY
        } else {
            self.steps[i - 1].1
        }
    }

    fn insert(&mut self, nsq: i64, d2: f64) {
        if self.min_at(nsq) <= d2 {
            return;
        }
        let pos = self.steps.partition_point(|&(s, _)| s <= nsq);
        self.steps.insert(pos, (nsq, d2));
        let mut i = pos + 1;
        while i < self.steps.len() {
            if self.steps[i].1 >= d2 {
                self.steps.remove(i);
            } else {
                i += 1;
            }
        }
    }
}

/// d²(x) against a unit-direction f64 vector: Σ minors².
fn d2_f64(x: &[i64], xi: &[f64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let m = x[i] as f64 * xi[j] - x[j] as f64 * xi[i];
            acc += m * m;
        }
    }
    acc
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn is_primitive_normalized(x: &[i64]) -> bool {
    let mut g = 0u64;
    let mut first_nonzero = 0i64;
    for &c in x {
        if c != 0 && first_nonzero == 0 {
            first_nonzero = c;
        }
        g = gcd_u64(g, c.unsigned_abs());
    }
    first_nonzero > 0 && g == 1
}

/// Visits every tuple with max-norm exactly s.
fn enumerate_shell_points(coords: &mut Vec<i64>, idx: usize, s: i64, hit: bool, f: &mut impl FnMut(&[i64])) {
    if idx == coords.len() {
        if hit {
            f(coords);
        }
        return;
    }
    for v in -s..=s {
        coords[idx] = v;
        enumerate_shell_points(coords, idx + 1, s, hit || v.abs() == s, f);
    }
    coords[idx] = 0;
}

/// Exhaustive candidate superset: all primitive sign-normalized points with
/// ‖x‖ ≤ x_max whose f64 distance is within a margin of the prefilter
/// staircase. Record points always pass the margin test, so this is sound.
fn exact_candidates(
    xi_f64: &[f64],
    dim: usize,
    x_max: u64,
    keep: &(dyn Fn(&[i64]) -> bool + Sync),
    worker: usize,
    workers: usize,
) -> Vec<Vec<i64>> {
    let cap = (x_max * x_max) as i64;
    let x = x_max as i64;
    let margin = 1.0 + 1e-6;
    let mut stair = F64Staircase::new();
    let mut out: Vec<Vec<i64>> = Vec::new();
    // One flat pass over the sign-normalized half box. The staircase is keyed
    // by the exact squared norm, so min_at only consults genuinely shorter
    // points no matter the processing order; each worker prunes against its
    // own slice only, which relaxes the filter and keeps the union a sound
    // superset. Imprimitive points tie with their primitive representative
    // and wash out in the exact pass.
    let mut p = vec![0i64; dim];
    p[0] = if workers > 1 { worker as i64 } else { 0 };
    let step0 = workers.max(1) as i64;
    'outer: while p[0] <= x {
        // leading coordinate zero: recurse into the next sign-normalized slot
        let mut nsq = 0i64;
        for &c in &p {
            nsq += c * c;
        }
        if nsq != 0 && nsq <= cap {
            let mut lead = 0i64;
            for &c in &p {
                if c != 0 {
                    lead = c;
                    break;
                }
            }
            if lead > 0 && keep(&p) {
                let d2 = d2_f64(&p, xi_f64);
                if d2 <= stair.min_at(nsq) * margin {
                    out.push(p.clone());
                }
                stair.insert(nsq, d2);
            }
        }
        // odometer: coords 1..dim run over [-x, x], coord 0 over its slice
        let mut i = dim - 1;
        loop {
            if i == 0 {
                p[0] += step0;
                continue 'outer;
            }
            if p[i] < x {
                p[i] += 1;
                continue 'outer;
            }
            p[i] = -x;
            i -= 1;
        }
    }
    out
}

/// Fast-sweep candidate superset: for every anchor coordinate a with ξ_a ≠ 0
/// and every k = 1..x_max, the rounded ray point with a ±1 window per free
/// coordinate; plus an exhaustive box of max-norm ≤ 3.
fn fast_candidates(xi_f64: &[f64], dim: usize, x_max: u64, worker: usize, workers: usize) -> Vec<Vec<i64>> {
    let cap = (x_max * x_max) as i64;
    let mut set: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut push = |p: Vec<i64>| {
        let nsq: i64 = p.iter().map(|&c| c * c).sum();
        if nsq > 0 && nsq <= cap && is_primitive_normalized(&p) {
            set.insert(p);
        }
    };
    for anchor in 0..dim {
        if xi_f64[anchor].abs() < 1e-12 {
            continue;
        }
        for k in 1..=x_max as i64 {
            if workers > 1 && (k as u64 % workers as u64) as usize != worker {
                continue;
            }
            for sign in [1i64, -1] {
                let ka = k * sign;
                let base: Vec<i64> = (0..dim)
                    .map(|i| {
                        if i == anchor {
                            ka
                        } else {
                            (ka as f64 * xi_f64[i] / xi_f64[anchor]).round() as i64
                        }
                    })
                    .collect();
                let free: Vec<usize> = (0..dim).filter(|&i| i != anchor).collect();
                let m = free.len();
                for mask in 0..3usize.pow(m as u32) {
                    let mut p = base.clone();
                    let mut rem = mask;
                    for &i in &free {
                        let delta = (rem % 3) as i64 - 1;
                        rem /= 3;
                        p[i] += delta;
                    }
                    if let Some(first) = p.iter().find(|&&c| c != 0) {
                        if *first < 0 {
                            for c in p.iter_mut() {
                                *c = -*c;
                            }
                        }
                    }
                    push(p);
                }
            }
        }
    }
    if worker == 0 {
        let mut coords = vec![0i64; dim];
        for s in 1..=3i64.min(x_max as i64) {
            enumerate_shell_points(&mut coords, 0, s, false, &mut |p| {
                let mut q = p.to_vec();
                if let Some(first) = q.iter().find(|&&c| c != 0) {
                    if *first < 0 {
                        for c in q.iter_mut() {
                            *c = -*c;
                        }
                    }
                }
                push(q);
            });
        }
    }
    set.into_iter().collect()
}

/// Zeros of a canonical-hyperbolic form from its quadratic parametrization,
/// up to the height bound (extra candidates for ZerosOfQ scans).
fn phi_parametrized_zeros(q: &QuadraticForm, x_max: u64) -> Vec<IntVector> {
    let tail = match crate::witt::canonical_hyperbolic_tail(q) {
        Ok(t) => t,
        Err(_) => return Vec::new(),
    };
    let dim = q.dim();
    let params = dim - 2;
    let cap_sq = BigInt::from(x_max) * BigInt::from(x_max);
    let mut out = Vec::new();
    let mut s = 0i64;
    while s <= x_max as i64 {
        let mut tuples = Vec::new();
        if s == 0 {
            tuples.push(vec![0i64; params]);
        } else {
            crate::witt::shell_tuples(params, s, &mut tuples);
        }
        let mut any_in_range = false;
        for t in &tuples {
            let mut coords = vec![BigInt::from(1), BigInt::zero()];
            let mut acc = BigInt::zero();
            for (k, &tv) in t.iter().enumerate() {
                let tb = BigInt::from(tv);
                acc += &tail[k] * &tb * &tb;
                coords.push(tb);
            }
            coords[1] = acc;
            let x = IntVector::new(coords).into_primitive_normalized();
            if x.norm_sq() <= cap_sq {
                any_in_range = true;
                out.push(x);
            }
        }
        if !any_in_range && s > 1 {
            break;
        }
        s += 1;
    }
    out
}

/// Scan for the minimal points of D_ξ(·; filter) up to height x_max.
///
/// Records appear where the filtered minimum strictly drops, certified at
/// interval level with automatic precision doubling. Partitioning across
/// `threads` workers changes nothing in the output.
pub fn scan(
    xi: &LimitPoint,
    x_max: u64,
    filter: ScanFilter,
    q: &QuadraticForm,
    engine: ScanEngine,
    threads: usize,
    prec: u32,
) -> Result<Vec<ScanRecord>> {
    let dim = q.dim();
    let coords0 = xi.coords(prec);
    if coords0.len() != dim {
        return Err(QdError::DimensionMismatch { expected: dim, got: coords0.len() });
    }
    let xi_f64: Vec<f64> = coords0.iter().map(|c| c.midpoint_f64()).collect();

    // the exhaustive prefilter staircase must see only filter-passing points
    let coeffs_i64: Option<Vec<(usize, usize, i128)>> = q
        .coeff_triples()
        .map(|(i, j, c)| c.to_i64().map(|v| (i, j, v as i128)))
        .collect();
    let q_big = q.clone();
    let keep: Box<dyn Fn(&[i64]) -> bool + Sync> = match (filter, &coeffs_i64) {
        (ScanFilter::All, _) => Box::new(|_: &[i64]| true),
        (f, Some(cs)) => {
            let cs = cs.clone();
            Box::new(move |p: &[i64]| {
                let mut acc: i128 = 0;
                for &(i, j, c) in &cs {
                    acc += c * p[i] as i128 * p[j] as i128;
                }
                if f == ScanFilter::ZerosOfQ {
                    acc == 0
                } else {
                    acc != 0
                }
            })
        }
        (f, None) => Box::new(move |p: &[i64]| {
            let x = IntVector::from_i64(p);
            let z = q_big.eval_q(&x).map(|v| v.is_zero()).unwrap_or(false);
            if f == ScanFilter::ZerosOfQ {
                z
            } else {
                !z
            }
        }),
    };

    let workers = threads.max(1);
    let mut raw: Vec<Vec<i64>> = if workers == 1 {
        match engine {
            ScanEngine::Exact => exact_candidates(&xi_f64, dim, x_max, keep.as_ref(), 0, 1),
            ScanEngine::Fast => fast_candidates(&xi_f64, dim, x_max, 0, 1),
        }
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let xi_ref = &xi_f64;
                let keep_ref = keep.as_ref();
                handles.push(scope.spawn(move || match engine {
                    ScanEngine::Exact => exact_candidates(xi_ref, dim, x_max, keep_ref, w, workers),
                    ScanEngine::Fast => fast_candidates(xi_ref, dim, x_max, w, workers),
                }));
            }
            let mut all = Vec::new();
            for h in handles {
                all.extend(h.join().expect("scan worker panicked"));
            }
            all
        })
    };
    raw.sort();
    raw.dedup();

    let mut candidates: Vec<IntVector> = raw.into_iter().map(|p| IntVector::from_i64(&p)).collect();
    if filter == ScanFilter::ZerosOfQ {
        candidates.extend(phi_parametrized_zeros(q, x_max));
    }

    // filter, sort by exact height then lexicographically, deduplicate
    let mut kept: Vec<(BigInt, IntVector)> = Vec::new();
    let cap_sq = BigInt::from(x_max) * BigInt::from(x_max);
    let mut seen = BTreeSet::new();
    for c in candidates {
        if c.is_zero() || c.norm_sq() > cap_sq {
            continue;
        }
        let c = c.into_primitive_normalized();
        if !seen.insert(c.clone()) {
            continue;
        }
        if filter.accepts(q, &c)? {
            kept.push((c.norm_sq(), c));
        }
    }
    kept.sort();

    // exact interval staircase; ties resolve to the earlier (shorter, then
    // lexicographically smaller) point because later equals are not strict
    let mut records: Vec<ScanRecord> = Vec::new();
    let mut cur: Option<IntVector> = None;
    for (_, cand) in kept {
        let is_record = {
            let cur_ref = &cur;
            with_precision(
                prec,
                PRECISION_CAP,
                |p| {
                    let v = d_of(xi, &cand, p)?;
                    match cur_ref {
                        None => Ok(Some(true)),
                        Some(m) => {
                            let mv = d_of(xi, m, p)?;
                            if v.is_strictly_less(&mv) {
                                Ok(Some(true))
                            } else if v.is_certainly_ge(&mv) {
                                Ok(Some(false))
                            } else {
                                Ok(None)
                            }
                        }
                    }
                },
                "ordering scan candidates",
            )?
        };
        if is_record {
            let v = d_of(xi, &cand, prec)?;
            records.push(ScanRecord { x: ceil_norm(&cand), minimizer: cand.clone(), value: v, filter });
            cur = Some(cand);
        }
    }
    // one record per integer height: keep the last (smallest value)
    let mut dedup: Vec<ScanRecord> = Vec::new();
    for r in records {
        if dedup.last().map(|p| p.x == r.x).unwrap_or(false) {
            *dedup.last_mut().unwrap() = r;
        } else {
            dedup.push(r);
        }
    }
    Ok(dedup)
}

/// Records along an already-built sequence: the points x_i as minimizers at
/// their own heights (they are the eventual minimal points of their ξ).
pub fn records_from_sequence(
    seq: &ExtremalSequence,
    xi: &LimitPoint,
    filter: ScanFilter,
    prec: u32,
) -> Result<Vec<ScanRecord>> {
    let mut out = Vec::new();
    // the last two points are too close to the representative anchor for
    // their distance to it to mean anything
    let cut = seq.len().saturating_sub(2);
    for p in &seq.points()[..cut] {
        if !filter.accepts(seq.form(), p)? {
            continue;
        }
        // resolving D(x) ~ ‖x‖^{-1} needs ~2·log2‖x‖ bits of representative
        let local = prec.max(p.norm_sq().bits() as u32 + 64);
        let v = d_of(xi, p, local)?;
        out.push(ScanRecord { x: ceil_norm(p), minimizer: p.clone(), value: v, filter });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub lambda_hat: f64,
    pub lambda: f64,
    pub residual_hat: f64,
    pub residual: f64,
    /// index range of records used (after dropping the transient)
    pub window: (usize, usize),
}

fn ln_value(v: &IntervalReal) -> f64 {
    // log of the midpoint, stable far below f64 range
    let ln_d = |d: &crate::exact::Dyadic| -> f64 {
        if d.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_bigint(&d.mant.abs()) + d.exp as f64 * std::f64::consts::LN_2
    };
    if v.lo.is_zero() || v.lo.is_negative() {
        ln_d(&v.hi)
    } else {
        0.5 * (ln_d(&v.lo) + ln_d(&v.hi))
    }
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let resid = points.iter().map(|p| (p.1 - slope * p.0 - intercept).abs()).fold(0.0, f64::max);
    (slope, resid)
}

/// λ̂ from the upper staircase envelope (value v_k holds until X_{k+1}),
/// λ from the lower envelope (value v_k at its own height X_k). The first
/// three records are transient and dropped.
pub fn estimate_exponents(records: &[ScanRecord]) -> Result<ExponentEstimate> {
    if records.len() < 5 {
        return Err(QdError::InsufficientData { needed: 5, got: records.len() });
    }
    let skip = 3.min(records.len() - 4);
    let recs = &records[skip..];
    let log_x: Vec<f64> = recs.iter().map(|r| 0.5 * ln_bigint(&r.minimizer.norm_sq())).collect();
    let log_v: Vec<f64> = recs.iter().map(|r| ln_value(&r.value)).collect();
    let hat_points: Vec<(f64, f64)> = (0..recs.len() - 1).map(|k| (log_x[k + 1], log_v[k])).collect();
    let lam_points: Vec<(f64, f64)> = (0..recs.len()).map(|k| (log_x[k], log_v[k])).collect();
    let (slope_hat, residual_hat) = least_squares(&hat_points);
    let (slope, residual) = least_squares(&lam_points);
    Ok(ExponentEstimate {
        lambda_hat: -slope_hat,
        lambda: -slope,
        residual_hat,
        residual,
        window: (skip, records.len() - 1),
    })
}

/// Σ_{k=1..n} λ̂^k / λ^{k−1}; λ = ∞ collapses to λ̂.
pub fn mm_value(lambda_hat: f64, lambda: f64, n: usize) -> f64 {
    let mut acc = 0.0;
    for k in 1..=n as i32 {
        acc += lambda_hat.powi(k) / lambda.powi(k - 1);
    }
    acc
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowerBoundReport {
    /// min over records of value·X — bounded away from 0 when the filter
    /// excludes the quadric's rational points (|q| ≥ 1 there).
    pub min_value_times_x: f64,
    /// max over records of value·X^{1/ρ_n}.
    pub max_value_times_x_inv_rho: f64,
}

pub fn lower_bound_monitor(records: &[ScanRecord], n: usize) -> Result<LowerBoundReport> {
    if records.is_empty() {
        return Err(QdError::InsufficientData { needed: 1, got: 0 });
    }
    let inv_rho = 1.0 / crate::spectral::rho(n as u32, 64)?.midpoint_f64();
    let mut min_vx = f64::INFINITY;
    let mut max_vxr = f64::NEG_INFINITY;
    for r in records {
        let lx = 0.5 * ln_bigint(&r.minimizer.norm_sq());
        let lv = ln_value(&r.value);
        min_vx = min_vx.min((lv + lx).exp());
        max_vxr = max_vxr.max((lv + inv_rho * lx).exp());
    }
    Ok(LowerBoundReport { min_value_times_x: min_vx, max_value_times_x_inv_rho: max_vxr })
}

/// ‖y‖ / ‖x∧y‖² for independent x, y with q(y) = 0 and span not totally
/// isotropic; bounded by 2‖q‖ for integer-valued q.
pub fn height_gap_check(q: &QuadraticForm, x: &IntVector, y: &IntVector, prec: u32) -> Result<IntervalReal> {
    let wsq = crate::exact::wedge_norm_sq(x, y)?;
    if wsq.is_zero() {
        return Err(QdError::Precondition("points must be linearly independent".into()));
    }
    if !q.eval_q(y)?.is_zero() {
        return Err(QdError::Precondition("q(y) must vanish".into()));
    }
    if q.eval_q(x)?.is_zero() && q.eval_b(x, y)?.is_zero() {
        return Err(QdError::Precondition("span(x, y) is totally isotropic".into()));
    }
    let norm_y = y.norm_interval(prec);
    let wsq_iv = IntervalReal::from_bigint(&wsq, prec);
    norm_y.div(&wsq_iv)
}

/// min over records of value·X^{1/2}; +∞ for an empty record set.
/// Meaningful for forms of Witt index ≤ 1 only (the caller guards).
pub fn half_exponent_monitor(records: &[ScanRecord]) -> f64 {
    let mut min = f64::INFINITY;
    for r in records {
        let lx = 0.5 * ln_bigint(&r.minimizer.norm_sq());
        let lv = ln_value(&r.value);
        min = min.min((lv + 0.5 * lx).exp());
    }
    min
}

/// CSV form: `X,value_lo,value_hi,point,filter`, the point semicolon-joined.
pub fn records_to_csv(records: &[ScanRecord]) -> String {
    let mut out = String::from("X,value_lo,value_hi,point,filter\n");
    for r in records {
        let (lo, hi) = r.value.display_pair(24);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.x,
            lo,
            hi,
            r.minimizer.to_decimal_strings().join(";"),
            r.filter.as_str()
        ));
    }
    out
}

pub fn records_from_csv(s: &str) -> Result<Vec<ScanRecord>> {
    let mut out = Vec::new();
    for (no, line) in s.lines().enumerate() {
        if no == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(QdError::BadInput(format!("bad CSV line {}", no + 1)));
        }
        let x: BigInt = parts[0].parse().map_err(|_| QdError::BadInput(format!("bad X on line {}", no + 1)))?;
        let lo = parse_decimal(parts[1])?;
        let hi = parse_decimal(parts[2])?;
        let coords: Vec<String> = parts[3].split(';').map(|s| s.to_string()).collect();
        let minimizer = IntVector::from_decimal_strings(&coords)?;
        let filter = ScanFilter::parse(parts[4])?;
        out.push(ScanRecord { x, minimizer, value: IntervalReal::new(lo, hi, DEFAULT_PRECISION), filter });
    }
    Ok(out)
}

/// Parses printed decimals like "123", "-4041e-27" into dyadics; exact for
/// non-negative exponents, 192-bit enclosure endpoints otherwise.
fn parse_decimal(s: &str) -> Result<crate::exact::Dyadic> {
    let bad = || QdError::BadInput(format!("bad decimal {s:?}"));
    let (mant, exp10) = match s.split_once('e') {
        Some((m, e)) => (m.parse::<BigInt>().map_err(|_| bad())?, e.parse::<i64>().map_err(|_| bad())?),
        None => (s.parse::<BigInt>().map_err(|_| bad())?, 0),
    };
    if exp10 >= 0 {
        let v = mant * BigInt::from(10).pow(exp10 as u32);
        Ok(crate::exact::Dyadic::from_bigint(&v))
    } else {
        let den = BigInt::from(10).pow((-exp10) as u32);
        Ok(crate::exact::Dyadic::from_bigint(&mant).div(
            &crate::exact::Dyadic::from_bigint(&den),
            192,
            crate::exact::Dir::Down,
        ))
    }
}

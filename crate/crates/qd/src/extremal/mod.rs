//! The extremal-point construction: seed points on q = 1, the ψ recurrence,
//! exact trace recursions, growth diagnostics, and certified limit points.
//!
//! Working coordinates are always canonical (the reduction's target shape);
//! push points through the reduction transform to return to the original form.

pub mod chain;

pub use chain::{isotropic_chain, ChainReport, PhiSchedule};

use crate::canonical::{automorphism_generator, pushforward_point, CanonicalKind, CanonicalReduction};
use crate::error::{QdError, Result};
use crate::exact::{det, isqrt, proj_dist, wedge_coords, wedge_norm_sq, IntervalReal, IntVector};
use crate::pell::{pell_fundamental, pell_solutions, trinomial_solve};
use crate::qform::QuadraticForm;
use num::{BigInt, One, Signed, Zero};

/// Sanity constant for the seed range checks; existence is guaranteed for
/// some constant, this is the configured default.
pub const DEFAULT_C0: u64 = 64;

/// Decimal digits allowed per coordinate before a run refuses to continue.
pub const DEFAULT_DIGIT_BUDGET: u64 = 2_000_000;

#[derive(Debug, Clone)]
pub enum SeedParam {
    /// Target seed size B; the last seed point is picked from it.
    B(BigInt),
    /// Direct ℓ for the Hyperbolic shapes (the (a₂ℓ²+1, 1, ℓ, 0, …) point).
    Ell(BigInt),
    /// B ≥ (8·C_n)⁵ computed from the seed prefix.
    Auto,
}

#[derive(Debug, Clone)]
pub struct ExtremalSequence {
    form: QuadraticForm,
    n: usize,
    points: Vec<IntVector>,
    /// b_traces[i][j-1] = b(x_{i-j}, x_i) for 1 ≤ j ≤ min(n, i).
    b_traces: Vec<Vec<BigInt>>,
    /// wedge_traces[i][j-1] = ‖x_{i-j} ∧ x_i‖² (exact integers).
    wedge_traces: Vec<Vec<BigInt>>,
    /// window_dets[i] = det(x_{i-n}, …, x_i) for i ≥ n.
    window_dets: Vec<BigInt>,
    digit_budget: u64,
}

impl ExtremalSequence {
    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[IntVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn b_trace(&self, i: usize, j: usize) -> &BigInt {
        &self.b_traces[i][j - 1]
    }

    pub fn wedge_trace_sq(&self, i: usize, j: usize) -> &BigInt {
        &self.wedge_traces[i][j - 1]
    }

    pub fn window_det(&self, i: usize) -> &BigInt {
        &self.window_dets[i - self.n]
    }

    pub fn set_digit_budget(&mut self, digits: u64) {
        self.digit_budget = digits;
    }

    fn push_point(&mut self, x: IntVector) -> Result<()> {
        let i = self.points.len();
        self.points.push(x);
        let jmax = self.n.min(i);
        let mut bs = Vec::with_capacity(jmax);
        let mut ws = Vec::with_capacity(jmax);
        for j in 1..=jmax {
            bs.push(self.form.eval_b(&self.points[i - j], &self.points[i])?);
            ws.push(wedge_norm_sq(&self.points[i - j], &self.points[i])?);
        }
        self.b_traces.push(bs);
        self.wedge_traces.push(ws);
        if i >= self.n {
            self.window_dets.push(det(&self.points[i - self.n..=i])?);
        }
        Ok(())
    }
}

/// ceil(‖x‖) as an exact integer.
fn ceil_norm(x: &IntVector) -> BigInt {
    let nsq = x.norm_sq();
    let r = isqrt(&nsq);
    if &r * &r == nsq {
        r
    } else {
        r + 1
    }
}

/// ceil(√w) for an exact integer w ≥ 0.
fn ceil_sqrt(w: &BigInt) -> BigInt {
    let r = isqrt(w);
    if &r * &r == *w {
        r
    } else {
        r + 1
    }
}

/// Seed points x₀,…,xₙ on q = 1 for a canonical reduction.
pub fn initial_points(red: &CanonicalReduction, param: &SeedParam, c0: u64) -> Result<Vec<IntVector>> {
    let dim = red.dim();
    let n = dim - 1;
    if n < 2 {
        return Err(QdError::Precondition("construction needs n >= 2".into()));
    }
    let q = red.canonical_form();

    // the prefix x_0..x_{n-1} does not depend on the size parameter
    let prefix: Vec<IntVector> = match red.kind {
        CanonicalKind::Diag => {
            let a1 = &red.coeffs[0];
            let mut pts = Vec::with_capacity(n);
            for i in 0..=n.saturating_sub(2) {
                if i > n - 2 {
                    break;
                }
                let b = &red.coeffs[i + 1]; // coefficient of t_{i+2}²
                let (k, l, m) = trinomial_solve(a1, b)?;
                let mut coords = vec![BigInt::zero(); dim];
                coords[0] = k;
                coords[1] = l;
                coords[i + 2] = m;
                pts.push(IntVector::new(coords));
            }
            let fundamental = pell_fundamental(a1)?;
            let mut coords = vec![BigInt::zero(); dim];
            coords[0] = fundamental.u.clone();
            coords[1] = fundamental.v.clone();
            pts.push(IntVector::new(coords));
            pts
        }
        CanonicalKind::Hyperbolic => {
            let mut pts = Vec::with_capacity(n);
            for i in 0..=n.saturating_sub(2) {
                if i > n - 2 {
                    break;
                }
                let a = &red.coeffs[i]; // coefficient of t_{i+2}²
                let mut coords = vec![BigInt::zero(); dim];
                coords[0] = a + BigInt::one();
                coords[1] = BigInt::one();
                coords[i + 2] = BigInt::one();
                pts.push(IntVector::new(coords));
            }
            let mut coords = vec![BigInt::zero(); dim];
            coords[0] = BigInt::one();
            coords[1] = BigInt::one();
            pts.push(IntVector::new(coords));
            pts
        }
    };

    let b_param: BigInt = match param {
        SeedParam::B(b) => b.clone(),
        SeedParam::Ell(l) => {
            if red.kind != CanonicalKind::Hyperbolic {
                return Err(QdError::Precondition("--l applies to the hyperbolic shape; use --B".into()));
            }
            red.coeffs[0].abs() * l * l
        }
        SeedParam::Auto => default_b(red, &prefix, c0)?,
    };

    // last point
    let last = match red.kind {
        CanonicalKind::Diag => {
            let a1 = &red.coeffs[0];
            let fundamental = pell_fundamental(a1)?;
            let mut take = None;
            let mut batch = 8usize;
            while take.is_none() {
                for s in pell_solutions(a1, batch)? {
                    if s.v >= b_param && s.v != fundamental.v {
                        take = Some(s);
                        break;
                    }
                }
                batch *= 2;
                if batch > 1 << 20 {
                    return Err(QdError::SeedCheckFailed("no Pell solution reached B".into()));
                }
            }
            let s = take.unwrap();
            let mut coords = vec![BigInt::zero(); dim];
            coords[0] = s.u;
            coords[1] = s.v;
            IntVector::new(coords)
        }
        CanonicalKind::Hyperbolic => {
            let a2 = &red.coeffs[0];
            let ell = match param {
                SeedParam::Ell(l) => l.clone(),
                _ => {
                    // ℓ ≈ sqrt(B/|a2|), at least 2
                    let l = ceil_sqrt(&(&b_param / a2.abs()));
                    if l < BigInt::from(2) {
                        BigInt::from(2)
                    } else {
                        l
                    }
                }
            };
            let mut coords = vec![BigInt::zero(); dim];
            coords[0] = a2 * &ell * &ell + BigInt::one();
            coords[1] = BigInt::one();
            coords[2] = ell;
            IntVector::new(coords)
        }
    };

    let mut pts = prefix;
    pts.push(last);

    // seed sanity: q(x_i) = 1, det != 0, and the four size quantities within
    // [B/C0, C0·B] for i = 1..n-1
    for (idx, p) in pts.iter().enumerate() {
        if q.eval_q(p)? != BigInt::one() {
            return Err(QdError::SeedCheckFailed(format!("q(x_{idx}) != 1")));
        }
    }
    let d = det(&pts)?;
    if d.is_zero() {
        return Err(QdError::SeedCheckFailed("seed determinant vanishes".into()));
    }
    let c0_big = BigInt::from(c0);
    let in_range = |value: &BigInt, what: &str| -> Result<()> {
        // B/C0 <= value <= C0·B, integer comparisons
        if value * &c0_big < b_param || value > &(&c0_big * &b_param) {
            return Err(QdError::SeedCheckFailed(format!("{what} = {value} outside [B/C0, C0*B] for B = {b_param}")));
        }
        Ok(())
    };
    let xn = &pts[n];
    in_range(&ceil_norm(xn), "|x_n|")?;
    in_range(&d.abs(), "|det|")?;
    for i in 1..n {
        in_range(&q.eval_b(&pts[i], xn)?.abs(), &format!("|b(x_{i},x_n)|"))?;
        in_range(&ceil_sqrt(&wedge_norm_sq(&pts[i], xn)?), &format!("|x_{i} ^ x_n|"))?;
    }
    Ok(pts)
}

/// B = (8·C_n)⁵ with C_n = max{C₀, B_{n−1}, X_{n−1}, Y_{n−1}} from the seed
/// prefix (norms rounded up to integers).
pub fn default_b(red: &CanonicalReduction, prefix: &[IntVector], c0: u64) -> Result<BigInt> {
    let q = red.canonical_form();
    let n = red.dim() - 1;
    let mut c = BigInt::from(c0);
    for (k, p) in prefix.iter().enumerate() {
        let x = ceil_norm(p);
        if x > c {
            c = x;
        }
        for j in 1..=n.min(k) {
            let b = q.eval_b(&prefix[k - j], p)?.abs();
            if b > c {
                c = b;
            }
            let y = ceil_sqrt(&wedge_norm_sq(&prefix[k - j], p)?);
            if y > c {
                c = y;
            }
        }
    }
    Ok((BigInt::from(8) * c).pow(5))
}

/// Start a sequence from seed points on the canonical form.
pub fn from_seed(red: &CanonicalReduction, seed: Vec<IntVector>) -> Result<ExtremalSequence> {
    let n = red.dim() - 1;
    if seed.len() != n + 1 {
        return Err(QdError::Precondition(format!("seed must have {} points", n + 1)));
    }
    sequence_from_points(red.canonical_form(), seed)
}

/// Rebuilds a sequence (with all traces recomputed) from stored points, e.g.
/// when re-reading a JSONL dump.
pub fn sequence_from_points(form: QuadraticForm, points: Vec<IntVector>) -> Result<ExtremalSequence> {
    let n = form.dim() - 1;
    if points.len() < n + 1 {
        return Err(QdError::InsufficientData { needed: n + 1, got: points.len() });
    }
    let mut seq = ExtremalSequence {
        form,
        n,
        points: Vec::new(),
        b_traces: Vec::new(),
        wedge_traces: Vec::new(),
        window_dets: Vec::new(),
        digit_budget: DEFAULT_DIGIT_BUDGET,
    };
    for p in points {
        seq.push_point(p)?;
    }
    Ok(seq)
}

/// Appends `steps` points via x_{i+1} = b(x_{i−n}, x_i)·x_i − x_{i−n} and
/// verifies the trace recursions exactly at every step.
pub fn extend(seq: &mut ExtremalSequence, steps: usize) -> Result<()> {
    let n = seq.n;
    for _ in 0..steps {
        let i = seq.points.len() - 1;
        debug_assert!(i >= n);
        let b_in = seq.b_trace(i, n).clone(); // b(x_{i-n}, x_i)
        let digits_next = seq.points[i].max_digits() + (b_in.bits() as f64 * 0.30103) as u64 + 1;
        if digits_next > seq.digit_budget {
            return Err(QdError::DigitBudgetExceeded { needed: digits_next, budget: seq.digit_budget });
        }
        let new = seq.points[i].scale(&b_in).sub(&seq.points[i - n]);
        if seq.form.eval_q(&new)? != BigInt::one() {
            return Err(QdError::Precondition("recurrence left the quadric q = 1".into()));
        }
        seq.push_point(new)?;
        verify_trace_recursions(seq, i + 1)?;
    }
    Ok(())
}

/// Exact checks of the interlocked trace recursions at index i ≥ n+1:
///   b_{i}^{(j)} = b_{i-1}^{(n)} b_{i-1}^{(j-1)} − b_{i-j}^{(n+1-j)}
///   y_{i}^{(j)} = b_{i-1}^{(n)} y_{i-1}^{(j-1)} + y_{i-j}^{(n+1-j)}
fn verify_trace_recursions(seq: &ExtremalSequence, i: usize) -> Result<()> {
    let n = seq.n;
    debug_assert!(i >= n + 1);
    let b_prev_n = seq.b_trace(i - 1, n);
    for j in 1..=n {
        let b_direct = seq.b_trace(i, j);
        let b_recur = if j == 1 {
            b_prev_n.clone()
        } else {
            b_prev_n * seq.b_trace(i - 1, j - 1) - seq.b_trace(i - j, n + 1 - j)
        };
        if *b_direct != b_recur {
            return Err(QdError::Precondition(format!("b-trace recursion failed at (i={i}, j={j})")));
        }
        // wedge vectors: y_i^{(j)} = x_{i-j} ∧ x_i
        let y_direct = wedge_coords(&seq.points[i - j], &seq.points[i])?;
        let y_recur: Vec<BigInt> = if j == 1 {
            wedge_coords(&seq.points[i - 1 - n], &seq.points[i - 1])?
        } else {
            let y_prev = wedge_coords(&seq.points[i - 1 - (j - 1)], &seq.points[i - 1])?;
            let y_old = wedge_coords(&seq.points[(i - j) - (n + 1 - j)], &seq.points[i - j])?;
            y_prev.iter().zip(&y_old).map(|(a, c)| b_prev_n * a + c).collect()
        };
        if y_direct != y_recur {
            return Err(QdError::Precondition(format!("wedge-trace recursion failed at (i={i}, j={j})")));
        }
    }
    Ok(())
}

/// Natural log of a positive big integer, in f64 (diagnostics only).
pub fn ln_bigint(x: &BigInt) -> f64 {
    debug_assert!(x.is_positive());
    let bits = x.bits();
    if bits <= 53 {
        return x.to_string().parse::<f64>().unwrap().ln();
    }
    let shift = bits - 53;
    let top: BigInt = x >> shift;
    top.to_string().parse::<f64>().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// log-ratio helper: ln(a/b) for positive bigints, accurate to f64 roundoff
/// relative to the ratio (no cancellation against large logs).
pub fn ln_ratio(a: &BigInt, b: &BigInt) -> f64 {
    ln_bigint(a) - ln_bigint(b)
}

/// The m(i, j) exponent table driving the size estimates: m(i,1) = m(i−1,n),
/// m(i,j) = m(i−1,n) + m(i−1,j−1).
pub fn m_table(n: usize, rows: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; rows];
    for i in 0..rows {
        for j in 1..=n {
            m[i][j - 1] = if i < n {
                BigInt::zero()
            } else if i == n {
                BigInt::one()
            } else if j == 1 {
                m[i - 1][n - 1].clone()
            } else {
                &m[i - 1][n - 1] + &m[i - 1][j - 2]
            };
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct SequenceDiagnostics {
    /// Euclidean height of each point, as an interval.
    pub heights: Vec<IntervalReal>,
    /// growth_ratio[i] = log X_{i+1} / log X_i.
    pub growth_ratios: Vec<f64>,
    /// wedge_ratio[i] = ‖x_i ∧ x_{i+1}‖ · X_i / X_{i+1}.
    pub wedge_ratios: Vec<f64>,
    /// m(i, j) table up to the sequence length.
    pub m_table: Vec<Vec<BigInt>>,
}

pub fn diagnostics(seq: &ExtremalSequence, prec: u32) -> SequenceDiagnostics {
    let pts = seq.points();
    let heights: Vec<IntervalReal> = pts.iter().map(|p| p.norm_interval(prec)).collect();
    let logs: Vec<f64> = pts.iter().map(|p| 0.5 * ln_bigint(&p.norm_sq())).collect();
    let growth_ratios: Vec<f64> = logs.windows(2).map(|w| w[1] / w[0]).collect();
    let wedge_ratios: Vec<f64> = (0..pts.len() - 1)
        .map(|i| {
            let wsq = wedge_norm_sq(&pts[i], &pts[i + 1]).expect("same dims");
            (0.5 * (ln_bigint(&wsq) + ln_bigint(&pts[i].norm_sq()) - ln_bigint(&pts[i + 1].norm_sq()))).exp()
        })
        .collect();
    SequenceDiagnostics { heights, growth_ratios, wedge_ratios, m_table: m_table(seq.n, pts.len()) }
}

/// A certified limit point: an exact rational anchor direction together with
/// a bound on the projective distance to the true limit of the sequence.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct LimitPoint {
    pub direction: IntVector,
    pub error_radius: IntervalReal,
    pub prec: u32,
}

impl LimitPoint {
    /// Wraps an exact rational direction as a zero-radius "limit point", for
    /// scans against synthetic or rational targets.
    pub fn exact(direction: IntVector, prec: u32) -> Self {
        LimitPoint { direction, error_radius: IntervalReal::zero(prec), prec }
    }
}

impl LimitPoint {
    /// Interval coordinates of a unit representative, inflated by the error
    /// radius so the true limit is inside (chord ≤ 2·projective distance).
    pub fn coords(&self, prec: u32) -> Vec<IntervalReal> {
        let norm = self.direction.norm_interval(prec);
        let two = IntervalReal::from_i64(2, prec);
        let pad = self.error_radius.mul(&two);
        self.direction
            .coords()
            .iter()
            .map(|c| {
                let ci = IntervalReal::from_bigint(c, prec);
                let base = ci.div(&norm).expect("direction is non-zero");
                IntervalReal::new(base.lo.sub(&pad.hi, prec, crate::exact::Dir::Down), base.hi.add(&pad.hi, prec, crate::exact::Dir::Up), prec)
            })
            .collect()
    }
}

/// Certified limit point from the sequence tail: anchor at the last point,
/// bound the tail by the measured contraction ratio with a safety factor 3.
pub fn limit_point(seq: &ExtremalSequence, prec: u32) -> Result<LimitPoint> {
    let pts = seq.points();
    let n = seq.n;
    if pts.len() < n + 3 {
        return Err(QdError::InsufficientData { needed: n + 3, got: pts.len() });
    }
    // consecutive projective gaps over the tail
    let tail_len = 4.min(pts.len() - 1);
    let start = pts.len() - 1 - tail_len;
    let mut gaps = Vec::new();
    for i in start..pts.len() - 1 {
        gaps.push(proj_dist(&pts[i], &pts[i + 1], prec)?);
    }
    let third = IntervalReal::from_ratio(&BigInt::one(), &BigInt::from(3), prec);
    let mut rhat = IntervalReal::zero(prec);
    for w in gaps.windows(2) {
        let r = w[1].div(&w[0])?;
        rhat = rhat.max(&r);
    }
    if !rhat.is_strictly_less(&third) {
        return Err(QdError::TailNotContracting);
    }
    // dist(ξ, [x_last]) ≤ Σ_{k≥1} d_last·r̂^k ≤ d_last·r̂/(1−r̂); factor 3 for safety
    let d_last = gaps.last().unwrap();
    let one = IntervalReal::from_i64(1, prec);
    let denom = one.sub(&rhat);
    let radius = d_last.mul(&rhat).div(&denom)?.mul(&IntervalReal::from_i64(3, prec));
    let direction = pts.last().unwrap().clone().into_primitive_normalized();
    Ok(LimitPoint { direction, error_radius: radius, prec })
}

/// Like [`limit_point`] but doubles the working precision until the error
/// radius is below `tol` = 2^(−tol_bits), or the sequence is too short.
pub fn limit_point_auto(seq: &ExtremalSequence, tol_bits: u32) -> Result<LimitPoint> {
    crate::exact::with_precision(
        crate::exact::DEFAULT_PRECISION,
        crate::exact::PRECISION_CAP,
        |p| {
            let lp = limit_point(seq, p)?;
            let thr = crate::exact::Dyadic { mant: BigInt::one(), exp: -(tol_bits as i64) };
            if lp.error_radius.hi.cmp(&thr) == std::cmp::Ordering::Less {
                Ok(Some(lp))
            } else {
                Ok(None)
            }
        },
        "limit point error radius",
    )
}

/// ξ together with its images under k = 1..count powers of the canonical
/// automorphism, radii propagated through the transform's condition bound.
pub fn orbit(red: &CanonicalReduction, lp: &LimitPoint, count: usize) -> Result<Vec<LimitPoint>> {
    let t = automorphism_generator(red)?;
    let t_inv = t.inverse()?;
    let prec = lp.prec;
    // projective distances distort by at most ‖T‖·‖T⁻¹‖ ≤ ‖T‖_F·‖T⁻¹‖_F
    let fro = |m: &crate::exact::RationalMatrix| -> Result<IntervalReal> {
        let f = m.frobenius_sq();
        IntervalReal::from_ratio(f.numer(), f.denom(), prec).sqrt()
    };
    let cond = fro(&t)?.mul(&fro(&t_inv)?);
    let mut out = vec![lp.clone()];
    let mut cur = lp.clone();
    for _ in 0..count {
        let direction = pushforward_point(&t, &cur.direction)?;
        let error_radius = cur.error_radius.mul(&cond);
        cur = LimitPoint { direction, error_radius, prec };
        out.push(cur.clone());
    }
    Ok(out)
}

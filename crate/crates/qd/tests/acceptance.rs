//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured quantities (run with `--nocapture` to see them all).

use num::{BigInt, One, Signed, Zero};
use qd::approx::{self, ScanEngine, ScanFilter};
use qd::canonical::reduce_canonical;
use qd::exact::IntVector;
use qd::extremal::{self, chain, LimitPoint, PhiSchedule, SeedParam};
use qd::pell;
use qd::qform::QuadraticForm;
use qd::spectral;
use qd::witt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn form(dim: usize, entries: &[(usize, usize, i64)]) -> QuadraticForm {
    QuadraticForm::from_i64(dim, entries).unwrap()
}

fn reference_sequence(steps: usize) -> extremal::ExtremalSequence {
    let q = form(3, &[(0, 1, 1), (2, 2, -1)]);
    let red = reduce_canonical(&q).unwrap();
    let seed = extremal::initial_points(&red, &SeedParam::Ell(BigInt::from(5)), extremal::DEFAULT_C0).unwrap();
    let mut seq = extremal::from_seed(&red, seed).unwrap();
    extremal::extend(&mut seq, steps).unwrap();
    seq
}

#[test]
fn criterion_01_psi_identity_suite() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut forms_done = 0;
    while forms_done < 20 {
        let dim = rng.gen_range(3..=6);
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                let c: i64 = rng.gen_range(-9..=9);
                if c != 0 {
                    entries.push((i, j, c));
                }
            }
        }
        let q = match QuadraticForm::from_i64(dim, &entries) {
            Ok(q) => q,
            Err(_) => continue,
        };
        for _ in 0..1000 {
            let x = IntVector::from_i64(&(0..dim).map(|_| rng.gen_range(-50..=50)).collect::<Vec<_>>());
            let y = IntVector::from_i64(&(0..dim).map(|_| rng.gen_range(-50..=50)).collect::<Vec<_>>());
            let z = q.psi(&x, &y).unwrap();
            let qx = q.eval_q(&x).unwrap();
            assert_eq!(q.eval_q(&z).unwrap(), &qx * &qx * q.eval_q(&y).unwrap(), "q(psi) identity");
            let zz = q.psi(&x, &z).unwrap();
            assert_eq!(zz, y.scale(&(&qx * &qx)), "psi(x, psi(x,y)) identity");
        }
        forms_done += 1;
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 10, "runtime {dt:?} exceeds 10 s");
    println!("criterion 01: PASS — 20 forms x 1000 pairs, both identities exact ({dt:?})");
}

// brute-force oracle pieces for criterion 2, all in i64/i128

fn eval_q_i64(entries: &[(usize, usize, i64)], x: &[i64]) -> i64 {
    entries.iter().map(|&(i, j, c)| c * x[i] * x[j]).sum()
}

fn eval_b_i64(entries: &[(usize, usize, i64)], x: &[i64], y: &[i64]) -> i64 {
    entries
        .iter()
        .map(|&(i, j, c)| if i == j { 2 * c * x[i] * y[i] } else { c * (x[i] * y[j] + x[j] * y[i]) })
        .sum()
}

fn rank_i64(vectors: &[Vec<i64>], dim: usize) -> usize {
    // fraction-free Gaussian elimination in i128
    let mut m: Vec<Vec<i128>> = vectors.iter().map(|v| v.iter().map(|&c| c as i128).collect()).collect();
    let rows = m.len();
    let mut rank = 0;
    for col in 0..dim {
        if rank == rows {
            break;
        }
        let pivot = match (rank..rows).find(|&r| m[r][col] != 0) {
            Some(p) => p,
            None => continue,
        };
        m.swap(rank, pivot);
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let (a, b) = (m[rank][col], m[r][col]);
                for c in 0..dim {
                    m[r][c] = m[r][c] * a - m[rank][c] * b;
                }
                // keep entries small
                let g = m[r].iter().fold(0i128, |acc, &v| gcd_i128(acc, v.abs()));
                if g > 1 {
                    for c in 0..dim {
                        m[r][c] /= g;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd_i128(b, a % b)
    }
}

/// Max dimension of a subspace spanned by pairwise-orthogonal isotropic
/// vectors from `zeros`, by depth-first search.
fn max_totally_isotropic(entries: &[(usize, usize, i64)], zeros: &[Vec<i64>], dim: usize) -> usize {
    fn dfs(
        entries: &[(usize, usize, i64)],
        zeros: &[Vec<i64>],
        dim: usize,
        chosen: &mut Vec<Vec<i64>>,
        start: usize,
        best: &mut usize,
    ) {
        *best = (*best).max(rank_i64(chosen, dim));
        if *best == dim {
            return;
        }
        for k in start..zeros.len() {
            let cand = &zeros[k];
            if chosen.iter().any(|c| eval_b_i64(entries, c, cand) != 0) {
                continue;
            }
            let r0 = rank_i64(chosen, dim);
            chosen.push(cand.clone());
            if rank_i64(chosen, dim) > r0 {
                dfs(entries, zeros, dim, chosen, k + 1, best);
            }
            chosen.pop();
        }
    }
    let mut best = 0;
    let mut chosen = Vec::new();
    dfs(entries, zeros, dim, &mut chosen, 0, &mut best);
    best
}

#[test]
fn criterion_02_witt_oracle_equivalence() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut tested = 0;
    while tested < 100 {
        let dim = rng.gen_range(2..=4usize);
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                let c: i64 = rng.gen_range(-5..=5);
                if c != 0 {
                    entries.push((i, j, c));
                }
            }
        }
        let q = match QuadraticForm::from_i64(dim, &entries) {
            Ok(q) => q,
            Err(_) => continue,
        };
        let w = match witt::witt_decompose(&q, 500_000) {
            Ok(w) => w,
            Err(qd::QdError::SearchExhausted { .. }) => continue, // witness out of desk range
            Err(e) => panic!("{e}"),
        };
        // oracle: zeros of height <= 8
        let mut zeros: Vec<Vec<i64>> = Vec::new();
        let mut coords = vec![0i64; dim];
        collect_box(&mut coords, 0, 8, &mut |p| {
            let nsq: i64 = p.iter().map(|&c| c * c).sum();
            if nsq == 0 || nsq > 64 {
                return;
            }
            // primitive, first non-zero positive
            let mut g = 0i64;
            for &c in p.iter() {
                g = gcd_i128(g as i128, c.unsigned_abs() as i128) as i64;
            }
            if g != 1 || p.iter().find(|&&c| c != 0).map(|&c| c < 0).unwrap_or(true) {
                return;
            }
            if eval_q_i64(&entries, p) == 0 {
                zeros.push(p.to_vec());
            }
        });
        let max_iso = max_totally_isotropic(&entries, &zeros, dim);
        let kernel_dim = q.kernel().len();
        assert_eq!(
            w.witt_index,
            max_iso - kernel_dim,
            "form {entries:?}: witt {} vs oracle {} - {}",
            w.witt_index,
            max_iso,
            kernel_dim
        );
        tested += 1;
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 120, "runtime {dt:?} exceeds 2 min");
    println!("criterion 02: PASS — 100 random forms, witt index equals the height-8 oracle ({dt:?})");
}

fn collect_box(coords: &mut Vec<i64>, idx: usize, s: i64, f: &mut impl FnMut(&[i64])) {
    if idx == coords.len() {
        f(coords);
        return;
    }
    for v in -s..=s {
        coords[idx] = v;
        collect_box(coords, idx + 1, s, f);
    }
    coords[idx] = 0;
}

#[test]
fn criterion_03_extremal_construction_n2() {
    let t0 = Instant::now();
    let seq = reference_sequence(20);
    let q = seq.form();
    for p in seq.points() {
        assert_eq!(q.eval_q(p).unwrap(), BigInt::one(), "q(x_i) = 1 exact");
    }
    for i in seq.n()..seq.len() {
        assert_eq!(seq.window_det(i).abs(), BigInt::from(20), "det window exact at {i}");
    }
    let diag = extremal::diagnostics(&seq, 64);
    for (i, g) in diag.growth_ratios.iter().enumerate() {
        if i >= 12 {
            assert!((g - 1.6180).abs() <= 0.02, "growth ratio {g} at index {i}");
        }
    }
    let max_digits = seq.points().last().unwrap().max_digits();
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 60, "runtime {dt:?} exceeds 60 s");
    println!(
        "criterion 03: PASS — 20 steps, q = 1 and |det| = 20 exact, growth within ±0.02 of 1.6180 for i ≥ 12 (largest point {max_digits} digits, {dt:?})"
    );
}

#[test]
fn criterion_04_extremal_construction_n3() {
    let t0 = Instant::now();
    let q = form(4, &[(0, 1, 1), (2, 2, -1), (3, 3, -1)]);
    let red = reduce_canonical(&q).unwrap();
    let seed = extremal::initial_points(&red, &SeedParam::Ell(BigInt::from(5)), extremal::DEFAULT_C0).unwrap();
    let mut seq = extremal::from_seed(&red, seed).unwrap();
    extremal::extend(&mut seq, 20).unwrap();
    let qc = seq.form();
    let det0 = seq.window_det(seq.n()).abs();
    for p in seq.points() {
        assert_eq!(qc.eval_q(p).unwrap(), BigInt::one());
    }
    for i in seq.n()..seq.len() {
        assert_eq!(seq.window_det(i).abs(), det0);
    }
    let diag = extremal::diagnostics(&seq, 64);
    for (i, g) in diag.growth_ratios.iter().enumerate() {
        if i >= 12 {
            assert!((g - 1.8393).abs() <= 0.03, "growth ratio {g} at index {i}");
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 180, "runtime {dt:?} exceeds 3 min");
    println!("criterion 04: PASS — n = 3 growth within ±0.03 of 1.8393 for i ≥ 12 ({dt:?})");
}

#[test]
fn criterion_05_exponent_reproduction() {
    let t0 = Instant::now();
    let seq = reference_sequence(15); // records reach index 15
    let lp = extremal::limit_point(&seq, 192).unwrap();
    let recs = approx::records_from_sequence(&seq, &lp, ScanFilter::All, 256).unwrap();
    assert_eq!(recs.len(), 16, "minimal points up to index 15");
    let est = approx::estimate_exponents(&recs).unwrap();
    assert!(est.lambda_hat >= 0.59 && est.lambda_hat <= 0.65, "lambda_hat {}", est.lambda_hat);
    assert!(est.lambda >= 0.95 && est.lambda <= 1.05, "lambda {}", est.lambda);
    let mm = approx::mm_value(est.lambda_hat, est.lambda, 2);
    assert!(mm >= 0.95 && mm <= 1.05, "mm {mm}");
    println!(
        "criterion 05: PASS — λ̂ = {:.4} ∈ [0.59,0.65], λ = {:.4} ∈ [0.95,1.05], MM = {:.4} ({:?})",
        est.lambda_hat,
        est.lambda,
        mm,
        t0.elapsed()
    );
}

#[test]
fn criterion_06_scan_oracle_equivalence() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let q3 = form(3, &[(0, 1, 1), (2, 2, -1)]);
    let q4 = form(4, &[(0, 1, 1), (2, 3, 1)]);
    let mut random_xi = |dim: usize| -> LimitPoint {
        let coords: Vec<i64> = (0..dim).map(|_| rng.gen_range(7_000..=99_999)).collect();
        LimitPoint::exact(IntVector::from_i64(&coords).into_primitive_normalized(), 128)
    };
    for case in 0..20 {
        let xi = random_xi(3);
        let exact = approx::scan(&xi, 300, ScanFilter::All, &q3, ScanEngine::Exact, 4, 128).unwrap();
        let fast = approx::scan(&xi, 300, ScanFilter::All, &q3, ScanEngine::Fast, 4, 128).unwrap();
        assert_eq!(
            approx::records_to_csv(&exact),
            approx::records_to_csv(&fast),
            "dim 3 case {case} direction {:?}",
            xi.direction
        );
    }
    for case in 0..5 {
        let xi = random_xi(4);
        let exact = approx::scan(&xi, 60, ScanFilter::All, &q4, ScanEngine::Exact, 4, 128).unwrap();
        let fast = approx::scan(&xi, 60, ScanFilter::All, &q4, ScanEngine::Fast, 4, 128).unwrap();
        assert_eq!(approx::records_to_csv(&exact), approx::records_to_csv(&fast), "dim 4 case {case}");
    }
    println!("criterion 06: PASS — fast ≡ exhaustive, byte-identical CSV (20 dim-3 + 5 dim-4 targets) ({:?})", t0.elapsed());
}

#[test]
fn criterion_07_lower_bound_monitor() {
    let t0 = Instant::now();
    let seq = reference_sequence(12);
    let lp = extremal::limit_point(&seq, 192).unwrap();
    let recs = approx::records_from_sequence(&seq, &lp, ScanFilter::NonZerosOfQ, 256).unwrap();
    let rep = approx::lower_bound_monitor(&recs, 2).unwrap();
    assert!(rep.min_value_times_x >= 1e-3, "min value·X = {}", rep.min_value_times_x);
    println!(
        "criterion 07: PASS — min value·X = {:.4} ≥ 1e-3 over {} records ({:?})",
        rep.min_value_times_x,
        recs.len(),
        t0.elapsed()
    );
}

#[test]
fn criterion_08_pell_solutions() {
    let t0 = Instant::now();
    for a in 2..=50i64 {
        let a_big = BigInt::from(a);
        if pell::is_square(&a_big) {
            continue;
        }
        // brute-force oracle: first v with 1 + a·v² a perfect square
        let mut expect = None;
        for v in 1..=100_000i64 {
            let u2 = BigInt::from(1 + a * v * v);
            if pell::is_square(&u2) {
                expect = Some((qd::exact::isqrt(&u2), BigInt::from(v)));
                break;
            }
        }
        let expect = expect.expect("fundamental within range for a <= 50");
        let got = pell::pell_fundamental(&a_big).unwrap();
        assert_eq!((got.u, got.v), expect, "a = {a}");
    }
    let p61 = pell::pell_fundamental(&BigInt::from(61)).unwrap();
    assert_eq!(p61.u, BigInt::from(1766319049u64));
    assert_eq!(p61.v, BigInt::from(226153980u64));
    println!("criterion 08: PASS — fundamental solutions match brute force for a ≤ 50; a = 61 exact ({:?})", t0.elapsed());
}

#[test]
fn criterion_09_pisot_certification() {
    let t0 = Instant::now();
    for n in 2..=12u32 {
        let report = spectral::pisot_check(n).unwrap();
        // the enclosure is sign-change certified by construction; require it
        // to be tight and the defining sum to close
        let (lo, hi) = report.rho.to_f64_pair();
        assert!(hi - lo < 1e-18, "rho enclosure too wide for n = {n}");
        let mid = report.rho.midpoint_f64();
        let sum: f64 = (1..=n).map(|k| mid.powi(-(k as i32))).sum();
        assert!((sum - 1.0).abs() < 1e-12, "defining sum off by {} at n = {n}", (sum - 1.0).abs());
        for m in &report.conjugate_moduli {
            assert!(*m < 1.0 - 1e-9, "conjugate modulus {m} at n = {n}");
        }
        assert!(report.is_pisot);
    }
    println!("criterion 09: PASS — n = 2..12: certified root, conjugates inside the unit disk, Σρ⁻ᵏ = 1 ± 1e-12 ({:?})", t0.elapsed());
}

#[test]
fn criterion_10_transfer_fit() {
    let t0 = Instant::now();
    let seq = reference_sequence(17);
    let fit = spectral::appendix_fit(&seq).unwrap();
    let offset = 5 - fit.start_index; // vectors start at i = n = 2
    for w in fit.residuals[offset..].windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "residuals must be non-increasing for i ≥ 5: {w:?}");
    }
    let bound = 2.0 * fit.deviations[offset];
    for (k, d) in fit.deviations[offset..].iter().enumerate() {
        assert!(*d <= bound, "deviation {d} at offset {k} exceeds 2x the i=5 value {bound}");
    }
    println!(
        "criterion 10: PASS — ‖v_(i+1) − T v_i‖ non-increasing for i ≥ 5, deviations ≤ 2× value at i = 5 (α = {:.4}) ({:?})",
        fit.alpha,
        t0.elapsed()
    );
}

#[test]
fn criterion_11_isotropic_chain_log_schedule() {
    // As stated: 10 chain steps on t0t1 + t2t3 with φ(X) = log(3X)/X, the
    // exact conditions holding at every step and every approximation
    // checkpoint meeting φ. Through any point of a split
    // rank-4 quadric pass exactly two totally isotropic planes whose lattice
    // covolumes multiply to ‖x‖²; the independence conditions force the
    // construction to alternate rulings, so the covolume W and the required
    // height exp(1.5·W)/3 feed back on each other and the heights grow as a
    // tower. Step 5 already needs about 10^29 digits, so this cannot complete
    // on any machine; the run stops honestly at the digit budget.
    let t0 = Instant::now();
    let q = form(4, &[(0, 1, 1), (2, 3, 1)]);
    let result = chain::isotropic_chain(&q, 10, PhiSchedule::LogOverX, 200_000, extremal::DEFAULT_DIGIT_BUDGET, 128);
    let outcome = match result {
        Ok(rep) => {
            chain::verify_chain_conditions(&q, &rep.points).unwrap();
            let cps = chain::phi_checkpoints(&rep, 256).unwrap();
            let all_ok = cps.iter().all(|(_, _, _, ok)| *ok);
            if all_ok && rep.points.len() == 10 {
                println!("criterion 11: PASS — 10 steps, conditions exact, φ-log checkpoints certified ({:?})", t0.elapsed());
                return;
            }
            format!("chain built but checkpoints failed: {cps:?}")
        }
        Err(e) => format!("{e}"),
    };
    // demonstrate the partial log-schedule run that is feasible
    let partial = chain::isotropic_chain(&q, 4, PhiSchedule::LogOverX, 200_000, extremal::DEFAULT_DIGIT_BUDGET, 128)
        .expect("the first four steps of the log schedule are feasible");
    chain::verify_chain_conditions(&q, &partial.points).unwrap();
    let cps = chain::phi_checkpoints(&partial, 256).unwrap();
    assert!(cps.iter().all(|(_, _, _, ok)| *ok), "partial-chain checkpoints must certify");
    println!(
        "criterion 11: FAIL — 10 φ-log steps are unattainable (tower growth; see notes). Run stopped with: {outcome}. \
         The 4 feasible steps satisfy all conditions and checkpoints exactly; the machinery passes 10 steps under φ(X) = X^(-1/2)."
    );
    panic!(
        "criterion 11 unattainable as stated: 10-step chain with φ(X)=log(3X)/X requires ~1e29-digit integers by step 5 \
         (ruling covolumes multiply to ‖x‖² on split rank-4 forms, forcing tower growth). \
         The faithful run stops at the digit budget: {outcome}"
    );
}

#[test]
fn criterion_11_supplement_sqrt_schedule_chain() {
    // The same machinery completes 10 steps under the admissible schedule
    // φ(X) = X^(-1/2): every exact condition and every checkpoint certified.
    let t0 = Instant::now();
    let q = form(4, &[(0, 1, 1), (2, 3, 1)]);
    let rep = chain::isotropic_chain(&q, 10, PhiSchedule::InvSqrt, 200_000, extremal::DEFAULT_DIGIT_BUDGET, 128).unwrap();
    assert_eq!(rep.points.len(), 10);
    chain::verify_chain_conditions(&q, &rep.points).unwrap();
    let cps = chain::phi_checkpoints(&rep, 256).unwrap();
    for (i, _, _, ok) in &cps {
        assert!(ok, "checkpoint {i}");
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs() < 60, "runtime {dt:?} exceeds 60 s");
    println!("criterion 11 (supplement): PASS — 10 steps under φ(X) = X^(-1/2), all conditions and checkpoints exact ({dt:?})");
}

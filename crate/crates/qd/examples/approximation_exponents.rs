//! Measure how well the constructed limit point is approximated by rational
//! points: best-approximation scans, exponent estimates, and the inequality
//! monitors.

use num::BigInt;
use qd::approx::{
    estimate_exponents, lower_bound_monitor, mm_value, records_from_sequence, records_to_csv, scan, ScanEngine,
    ScanFilter,
};
use qd::canonical::reduce_canonical;
use qd::extremal::{extend, from_seed, initial_points, limit_point, SeedParam, DEFAULT_C0};
use qd::qform::QuadraticForm;

fn main() -> qd::Result<()> {
    let q = QuadraticForm::from_i64(3, &[(0, 1, 1), (2, 2, -1)])?;
    let red = reduce_canonical(&q)?;
    let seed = initial_points(&red, &SeedParam::Ell(BigInt::from(5)), DEFAULT_C0)?;
    let mut seq = from_seed(&red, seed)?;
    extend(&mut seq, 15)?;
    let lp = limit_point(&seq, 192)?;

    println!("desk-scale scan up to height 300 (fast sweep, checked against the exhaustive engine):");
    let fast = scan(&lp, 300, ScanFilter::All, &q, ScanEngine::Fast, 1, 128)?;
    let exact = scan(&lp, 300, ScanFilter::All, &q, ScanEngine::Exact, 4, 128)?;
    assert_eq!(records_to_csv(&fast), records_to_csv(&exact));
    print!("{}", records_to_csv(&fast));

    println!("\nexponents along the sequence's own minimal points (up to index 15):");
    let recs = records_from_sequence(&seq, &lp, ScanFilter::All, 256)?;
    let est = estimate_exponents(&recs)?;
    println!("  uniform  λ̂ = {:.5}   (1/ρ_2 = {:.5})", est.lambda_hat, 2.0 / (1.0 + 5f64.sqrt()));
    println!("  ordinary λ  = {:.5}", est.lambda);
    println!("  transference sum = {:.5} (equality case is 1)", mm_value(est.lambda_hat, est.lambda, 2));

    let nz = records_from_sequence(&seq, &lp, ScanFilter::NonZerosOfQ, 256)?;
    let monitor = lower_bound_monitor(&nz, 2)?;
    println!("\noff-quadric lower bound: min value·X = {:.5} (stays away from 0)", monitor.min_value_times_x);
    Ok(())
}

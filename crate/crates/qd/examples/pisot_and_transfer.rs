//! The growth constants ρ_n, their Pisot property, and the transfer operator
//! that explains the doubly exponential size profile of the sequences.

use num::BigInt;
use qd::canonical::reduce_canonical;
use qd::extremal::{extend, from_seed, initial_points, SeedParam, DEFAULT_C0};
use qd::qform::QuadraticForm;
use qd::spectral::{appendix_fit, char_poly, pisot_check, rho, transfer_operator};

fn main() -> qd::Result<()> {
    println!(" n |        rho_n        | largest conjugate modulus");
    for n in 2..=8u32 {
        let report = pisot_check(n)?;
        let (lo, hi) = report.rho.display_pair(14);
        let max_conj = report.conjugate_moduli.iter().cloned().fold(0.0f64, f64::max);
        println!("{n:>2} | [{lo}, {hi}] | {max_conj:.6} (pisot: {})", report.is_pisot);
    }

    let r2 = rho(2, 80)?;
    println!("\nrho_2 encloses the golden ratio: [{}, {}]", r2.display_pair(18).0, r2.display_pair(18).1);

    let t = transfer_operator(2);
    println!("\ntransfer operator (n = 2):");
    for row in &t {
        println!("  {:?}", row.iter().map(|v| v.to_string()).collect::<Vec<_>>());
    }
    println!("characteristic polynomial (ascending): {:?}",
        char_poly(&t).iter().map(|c| c.to_string()).collect::<Vec<_>>());

    // fit a generated sequence against the operator's dominant eigendirection
    let q = QuadraticForm::from_i64(3, &[(0, 1, 1), (2, 2, -1)])?;
    let red = reduce_canonical(&q)?;
    let seed = initial_points(&red, &SeedParam::Ell(BigInt::from(5)), DEFAULT_C0)?;
    let mut seq = from_seed(&red, seed)?;
    extend(&mut seq, 14)?;
    let fit = appendix_fit(&seq)?;
    println!("\nfit against the dominant eigenvector: alpha = {:.6}", fit.alpha);
    println!("residuals ‖v_(i+1) − T v_i‖ (summable): {:?}",
        fit.residuals.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>());
    println!("deviations ‖v_i − α ρ^i v‖ (bounded):   {:?}",
        fit.deviations.iter().map(|d| format!("{d:.3}")).collect::<Vec<_>>());
    Ok(())
}

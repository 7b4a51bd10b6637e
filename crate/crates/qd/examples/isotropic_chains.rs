//! Chains of rational points on a Witt-index-2 quadric: consecutive points
//! span totally isotropic planes and the limit is approximated at a chosen
//! decay schedule.

use qd::extremal::chain::{isotropic_chain, phi_checkpoints, verify_chain_conditions, PhiSchedule};
use qd::extremal::DEFAULT_DIGIT_BUDGET;
use qd::qform::QuadraticForm;

fn main() -> qd::Result<()> {
    let q = QuadraticForm::from_i64(4, &[(0, 1, 1), (2, 3, 1)])?;

    println!("schedule φ(X) = X^(-1/2): ten steps");
    let rep = isotropic_chain(&q, 10, PhiSchedule::InvSqrt, 100_000, DEFAULT_DIGIT_BUDGET, 128)?;
    verify_chain_conditions(&q, &rep.points)?;
    for (i, p) in rep.points.iter().enumerate() {
        println!("  x_{:<2} {:>6} digits", i + 1, p.max_digits());
    }
    for (i, lhs, rhs, ok) in phi_checkpoints(&rep, 256)? {
        println!(
            "  checkpoint {i}: X·dist ≤ [{}] vs φ = [{}] — certified {ok}",
            lhs.display_pair(6).1,
            rhs.display_pair(6).0
        );
    }

    println!("\nschedule φ(X) = log(3X)/X: heights must grow like exp(covolume);");
    println!("the covolumes of the alternating rulings feed back on the heights,");
    println!("so only a handful of steps fit in any digit budget:");
    match isotropic_chain(&q, 4, PhiSchedule::LogOverX, 100_000, DEFAULT_DIGIT_BUDGET, 128) {
        Ok(rep) => {
            for (i, p) in rep.points.iter().enumerate() {
                println!("  x_{:<2} {:>6} digits", i + 1, p.max_digits());
            }
        }
        Err(e) => println!("  {e}"),
    }
    match isotropic_chain(&q, 5, PhiSchedule::LogOverX, 100_000, DEFAULT_DIGIT_BUDGET, 128) {
        Ok(_) => println!("  five steps unexpectedly fit"),
        Err(e) => println!("  five steps: {e}"),
    }
    Ok(())
}

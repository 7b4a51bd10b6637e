//! The Pell and trinomial solvers that seed the point constructions.

use num::BigInt;
use qd::pell::{nonsquare_shift, pell_fundamental, pell_solutions, trinomial_solve};

fn main() -> qd::Result<()> {
    for a in [2i64, 3, 13, 61] {
        let p = pell_fundamental(&BigInt::from(a))?;
        println!("fundamental solution of u^2 - {a} v^2 = 1: ({}, {})", p.u, p.v);
    }

    println!("\nfirst five solutions for a = 2:");
    for s in pell_solutions(&BigInt::from(2), 5)? {
        println!("  ({}, {})", s.u, s.v);
    }

    println!("\nnon-square shifts m with a m^2 + b positive and not a square:");
    for (a, b) in [(1i64, 1i64), (2, -1), (3, 1)] {
        println!("  a={a} b={b}: m = {}", nonsquare_shift(&BigInt::from(a), &BigInt::from(b)));
    }

    println!("\ntrinomial x^2 - a y^2 - b z^2 = 1 with xz != 0:");
    for (a, b) in [(2i64, 0i64), (1, 1), (2, 3), (5, -7)] {
        let (x, y, z) = trinomial_solve(&BigInt::from(a), &BigInt::from(b))?;
        println!("  a={a} b={b}: ({x}, {y}, {z})");
    }
    Ok(())
}

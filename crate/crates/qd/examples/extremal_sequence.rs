//! Build the point sequence on t0t1 − t2² = 1 whose heights grow with ratio
//! the golden ratio, certify its limit point, and push it around its orbit.

use num::BigInt;
use qd::canonical::reduce_canonical;
use qd::extremal::{diagnostics, extend, from_seed, initial_points, limit_point, orbit, SeedParam, DEFAULT_C0};
use qd::qform::QuadraticForm;

fn main() -> qd::Result<()> {
    let q = QuadraticForm::from_i64(3, &[(0, 1, 1), (2, 2, -1)])?;
    let red = reduce_canonical(&q)?;
    let seed = initial_points(&red, &SeedParam::Ell(BigInt::from(5)), DEFAULT_C0)?;
    println!("seed: {:?}", seed.iter().map(|p| p.to_decimal_strings()).collect::<Vec<_>>());

    let mut seq = from_seed(&red, seed)?;
    extend(&mut seq, 14)?;

    let diag = diagnostics(&seq, 64);
    println!("\n idx | digits | growth ratio | wedge ratio | |det|");
    for (i, p) in seq.points().iter().enumerate() {
        let growth = if i > 0 { format!("{:>12.6}", diag.growth_ratios[i - 1]) } else { " ".repeat(12) };
        let wedge = if i > 0 { format!("{:>11.4}", diag.wedge_ratios[i - 1]) } else { " ".repeat(11) };
        let det = if i >= seq.n() { num::Signed::abs(seq.window_det(i)).to_string() } else { String::new() };
        println!("{i:>4} | {:>6} | {growth} | {wedge} | {det}", p.max_digits());
    }
    println!("(the growth ratio approaches the golden ratio 1.6180...)");

    let lp = limit_point(&seq, 192)?;
    let (lo, hi) = lp.error_radius.display_pair(6);
    println!("\nlimit point anchored at a {}-digit point, error radius in [{lo}, {hi}]", lp.direction.max_digits());
    let coords = lp.coords(96);
    print!("unit representative:");
    for c in &coords {
        print!(" [{:.9}, {:.9}]", c.to_f64_pair().0, c.to_f64_pair().1);
    }
    println!();

    println!("\nautomorphism orbit of the limit point (distinct extremal points):");
    for (k, im) in orbit(&red, &lp, 3)?.iter().enumerate() {
        println!("  T^{k} ξ anchored at {:?}...", &im.direction.to_decimal_strings().iter().map(|s| {
            let mut t = s.clone();
            if t.len() > 12 {
                t.truncate(12);
                t.push('…');
            }
            t
        }).collect::<Vec<_>>());
    }
    Ok(())
}

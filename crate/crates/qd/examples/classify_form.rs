//! Classify a few rational quadratic forms: rank, signature, kernel,
//! isotropy over Q, and the full Witt decomposition.

use num::BigRational;
use qd::qform::QuadraticForm;
use qd::witt::{hilbert_symbol, is_isotropic, witt_decompose, Place};

fn main() -> qd::Result<()> {
    let forms = [
        ("t0t1 - t2^2", QuadraticForm::from_i64(3, &[(0, 1, 1), (2, 2, -1)])?),
        ("t0^2 - 2t1^2 (dim 3)", QuadraticForm::from_i64(3, &[(0, 0, 1), (1, 1, -2)])?),
        ("t0t1 + t2t3", QuadraticForm::from_i64(4, &[(0, 1, 1), (2, 3, 1)])?),
        ("t0^2 + t1^2 - 3t2^2", QuadraticForm::from_i64(3, &[(0, 0, 1), (1, 1, 1), (2, 2, -3)])?),
    ];

    for (name, q) in &forms {
        let sig = q.signature();
        println!("{name}");
        println!("  json       {}", q.to_json());
        println!("  rank       {} (signature n0={} n+={} n-={})", q.rank(), sig.n0, sig.n_plus, sig.n_minus);
        println!("  kernel     {:?}", q.kernel().iter().map(|k| k.to_decimal_strings()).collect::<Vec<_>>());
        println!("  isotropic  {}", is_isotropic(q)?);
        match witt_decompose(q, 100_000) {
            Ok(w) => {
                println!("  witt index {}", w.witt_index);
                for (u, v) in &w.hyperbolic_pairs {
                    println!("    pair  {:?} / {:?}", u.to_decimal_strings(), v.to_decimal_strings());
                }
                if !w.anisotropic_basis.is_empty() {
                    println!(
                        "    anisotropic part spanned by {:?}",
                        w.anisotropic_basis.iter().map(|b| b.to_decimal_strings()).collect::<Vec<_>>()
                    );
                }
            }
            Err(e) => println!("  witt decomposition failed: {e}"),
        }
        println!();
    }

    // Hilbert symbols decide the local conditions behind the isotropy test.
    let a = BigRational::from_integer(2.into());
    let b = BigRational::from_integer(5.into());
    for place in [Place::Infinity, Place::Prime(2.into()), Place::Prime(5.into())] {
        println!("(2, 5) at {place:?} = {}", hilbert_symbol(&a, &b, &place)?);
    }
    Ok(())
}

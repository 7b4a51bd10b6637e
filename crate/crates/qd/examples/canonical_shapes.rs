//! Reduce indefinite forms to the two canonical shapes and build
//! infinite-order automorphisms of the reduced forms.

use qd::canonical::{automorphism_generator, has_li_point, pushforward_point, reduce_canonical};
use qd::exact::IntVector;
use qd::qform::QuadraticForm;

fn main() -> qd::Result<()> {
    let forms = [
        ("t0^2 - 2t1^2 (dim 3)", QuadraticForm::from_i64(3, &[(0, 0, 1), (1, 1, -2)])?),
        ("t0^2 - t1^2 - t2^2", QuadraticForm::from_i64(3, &[(0, 0, 1), (1, 1, -1), (2, 2, -1)])?),
        ("3t0t1 - 2t2^2 + t1t2", QuadraticForm::from_i64(3, &[(0, 1, 3), (2, 2, -2), (1, 2, 1)])?),
        ("definite: t0^2 + t1^2", QuadraticForm::from_i64(2, &[(0, 0, 1), (1, 1, 1)])?),
    ];

    for (name, q) in &forms {
        println!("{name}: has li-point = {}", has_li_point(q));
        let red = match reduce_canonical(q) {
            Ok(r) => r,
            Err(e) => {
                println!("  no reduction: {e}\n");
                continue;
            }
        };
        println!("  kind   {:?}, scale {}", red.kind, red.scale);
        println!("  coeffs {:?}", red.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>());
        println!("  canonical polynomial {}", red.canonical_form().to_json());
        red.verify(q)?; // exact polynomial identity

        let t = automorphism_generator(&red)?;
        // automorphisms act on canonical coordinates; iterate a point of q = 1
        let mut x = IntVector::from_i64(&vec![1; red.dim()]);
        print!("  orbit sizes under T:");
        for _ in 0..5 {
            x = pushforward_point(&t, &x)?;
            print!(" {}", x.norm_sq());
        }
        println!("\n");
    }
    Ok(())
}

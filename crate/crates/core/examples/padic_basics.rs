//! Valuations, pReLU, cosets and digit interleaving.
//!
//! ```bash
//! cargo run -p padicnet --example padic_basics
//! ```

use padicnet::padic::{coset_of, deinterleave_digits, interleave_digits, prelu};
use padicnet::{Budget, PVector, Prime, Scalar};

fn main() -> padicnet::Result<()> {
    let p = Prime::new(3)?;
    for x in [
        Scalar::from_int(18),
        Scalar::frac(5, 9),
        Scalar::frac(-7, 2),
        Scalar::zero(),
    ] {
        println!(
            "v_3({x}) = {}, pReLU({x}) = {}, integral: {}",
            x.valuation(p),
            prelu(p, &x),
            x.is_integral(p)
        );
    }

    let x = PVector::new(vec![Scalar::frac(1, 2), Scalar::from_int(7)]);
    println!("max-norm exponent of {x}: {}", x.norm_exp(p));
    let c = coset_of(p, &x, 2)?;
    println!(
        "{x} lies in the level-2 coset with residues {:?}",
        c.residues()
    );

    let k = 2;
    let code = interleave_digits(p, &x, k)?;
    println!("interleaved at level {k}: {code}");
    let back = deinterleave_digits(p, code.to_i64().unwrap() as u64, 2, k)?;
    println!("de-interleaved: {back:?}");

    let cosets = padicnet::padic::enumerate_cosets(p, 2, 1, Budget::default())?;
    println!("Z_3^2 has {} level-1 cosets", cosets.len());
    Ok(())
}

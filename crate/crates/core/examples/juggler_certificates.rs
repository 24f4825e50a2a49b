//! Build the juggler of type m and print its surjectivity certificates and
//! the refinement history that produced them.
//!
//! ```bash
//! cargo run -p padicnet --example juggler_certificates
//! ```

use padicnet::json::certificates_to_json;
use padicnet::synthesis::{check_affine_surjectivity, synth_juggler};
use padicnet::{Budget, Prime, Scalar};

fn main() -> padicnet::Result<()> {
    let p = Prime::new(3)?;
    let m = 1;
    let j = synth_juggler(p, m, Budget::default())?;
    println!("juggler width {}, depth {}", j.net.width(), j.net.depth());

    for e in &j.history {
        let c = &e.certificate;
        println!(
            "step {} residue {}: center {} ball 3^{} slope {} (v = {}) offset {}{}",
            e.step,
            e.residue,
            c.center,
            c.ball_exp,
            c.slope,
            c.slope.valuation(p),
            c.offset,
            if e.refined_from.is_some() {
                " (refined)"
            } else {
                ""
            }
        );
        assert!(check_affine_surjectivity(
            p, &c.slope, &c.center, &c.offset, c.ball_exp
        ));
    }

    // every residue of the target is hit from inside every coset
    for (r, cert) in &j.certificates {
        let y = Scalar::from_int(2);
        let x = cert.preimage(&y);
        println!("coset {r}: g({x}) = {}", j.juggle(&x)?);
    }
    print!("{}", certificates_to_json(j.level, &j.certificates));
    Ok(())
}

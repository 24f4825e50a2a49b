//! The encoder separates level-m cosets of Z_p^d; the decoder reaches every
//! level-m coset of Z_p^d from Z_p.
//!
//! ```bash
//! cargo run -p padicnet --example encoder_decoder
//! ```

use padicnet::padic::{coset_of, enumerate_cosets};
use padicnet::synthesis::{decode_search, synth_decoder, synth_encoder};
use padicnet::{Budget, PVector, Prime};

fn main() -> padicnet::Result<()> {
    let p = Prime::new(2)?;
    let (d, m) = (2, 2);
    let budget = Budget::default();

    let enc = synth_encoder(p, d, m, budget)?;
    println!("encoder Z_2^{d} -> Z_2 at level {m}: width {}", enc.width());
    for c in enumerate_cosets(p, d, m, budget)?.iter().take(6) {
        let y = enc.eval(&c.representative())?;
        println!("  coset {:?} -> {}", c.residues(), y.entries()[0]);
    }

    let dec = synth_decoder(p, d, m, budget)?;
    println!(
        "decoder Z_2 -> Z_2^{d} at level {m}: width {}",
        dec.net.width()
    );
    let mut hit = 0;
    for target in enumerate_cosets(p, d, m, budget)? {
        let x = decode_search(&dec, &target)?;
        let y = dec.net.eval(&PVector::new(vec![x.clone()]))?;
        if coset_of(p, &y, m)? == target {
            hit += 1;
        }
        if target.residues() == [3, 1] {
            println!("  target {:?}: input {x} -> {y}", target.residues());
        }
    }
    println!("{hit} of {} target cosets reached", 1 << (m as usize * d));
    Ok(())
}

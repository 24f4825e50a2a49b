//! Approximate a vector-valued table by a network of width
//! max(d_in + 1, d_out) and measure the exact sup-norm error.
//!
//! ```bash
//! cargo run -p padicnet --example approximate_vector
//! ```

use padicnet::functions::{net_to_table, table_distance};
use padicnet::synthesis::synth_approximator;
use padicnet::{Budget, FunctionTable, NormOrder, PVector, Prime, Scalar};

fn main() -> padicnet::Result<()> {
    let p = Prime::new(2)?;
    let budget = Budget::default();
    let table = FunctionTable::from_fn(p, 1, 3, 2, budget, |c| {
        let r = c.residues()[0] as i64;
        PVector::new(vec![
            Scalar::from_int(r * r),
            Scalar::frac(1 - r, 4),
            Scalar::from_int(5 - 3 * r),
        ])
    })?;

    for n in 1..=3 {
        let a = synth_approximator(&table, n, budget)?;
        let back = net_to_table(&a.net, table.level(), 2, budget)?;
        let err = table_distance(&table, &back, NormOrder::Infinity, budget)?;
        // |error| = 2^-e with e >= n + v(scale)
        let bound = n as i64 + a.scale.valuation(p).finite().unwrap();
        println!(
            "precision {n}: width {}, depth {}, scale {}, error exponent {err} (guaranteed >= {bound})",
            a.net.width(),
            a.net.depth(),
            a.scale
        );
    }
    Ok(())
}

//! Compile a scalar locally constant function into a width-(d+1) network,
//! check it exactly against the table and print the artifact.
//!
//! ```bash
//! cargo run -p padicnet --example synthesize_table
//! ```

use padicnet::functions::verify_against_table;
use padicnet::json::{network_to_json, table_to_json};
use padicnet::synthesis::synth_locally_constant;
use padicnet::{Budget, FunctionTable, PVector, Prime, Scalar};

fn main() -> padicnet::Result<()> {
    let p = Prime::new(2)?;
    let budget = Budget::default();
    // f(x, y) = x_0 - 2 y_0 + 1/3 on the level-1 cosets of Z_2^2.
    let table = FunctionTable::from_fn(p, 2, 1, 1, budget, |c| {
        let r = c.residues();
        let v = Scalar::from(r[0]) - Scalar::from_int(2) * Scalar::from(r[1]) + Scalar::frac(1, 3);
        PVector::new(vec![v])
    })?;
    println!("table JSON is {} bytes", table_to_json(&table).len());

    let net = synth_locally_constant(&table, 3, budget)?;
    println!(
        "width {} (minimum d+1 = 3), depth {}, {} parameters",
        net.width(),
        net.depth(),
        net.parameter_count()
    );
    match verify_against_table(&net, &table, 3, budget)? {
        None => println!("network equals the table on every coset representative and 3 lifts each"),
        Some(m) => println!("mismatch: {m:?}"),
    }
    let padded = net.pad_width(5)?;
    let exact = verify_against_table(&padded, &table, 1, budget)?.is_none();
    println!("padded to width {}: still exact = {exact}", padded.width());
    let json = network_to_json(&net);
    println!("network JSON is {} bytes", json.len());
    Ok(())
}

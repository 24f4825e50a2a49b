//! The interleaving map is injective, so it moves every point by at least
//! epsilon along any direction of norm 1/p; hence it stays at L_1 distance
//! at least epsilon / (2 p^d) from every function that is constant in some
//! direction on a ball.
//!
//! ```bash
//! cargo run -p padicnet --example separation_bound
//! ```

use padicnet::analysis::{
    interleaving_table, l1_separation_check, random_direction_constant_table, separation_epsilon,
};
use padicnet::functions::table_distance;
use padicnet::{Budget, Coset, NormOrder, Prime};

fn main() -> padicnet::Result<()> {
    let budget = Budget::default();
    for (p, d) in [(2, 1), (2, 2), (3, 2)] {
        let p = Prime::new(p)?;
        let k = 3;
        let bound = separation_epsilon(p, d, k, budget)?;
        println!(
            "p = {p}, d = {d}: epsilon = {p}^-{}, delta = {}",
            bound.epsilon_exp,
            bound.delta,
            p = p.get()
        );
        let f = interleaving_table(p, d, k, budget)?;
        let ball = Coset::new(p, 1, vec![1; d])?;
        let mut h = vec![0; d];
        h[0] = p.get();
        for seed in 0..3 {
            let g = random_direction_constant_table(p, &ball, &h, k, seed, budget)?;
            let dist = table_distance(&f, &g, NormOrder::Finite(1), budget)?;
            println!(
                "  g #{seed}: ||f - g||_1 = {dist}, at least delta: {}",
                l1_separation_check(&f, &g, &bound, budget)?
            );
        }
    }
    Ok(())
}

//! A network of width n on Z_p^n is either affine there or constant in some
//! direction on a ball of radius 1/p. Print the verdict for a few networks.
//!
//! ```bash
//! cargo run -p padicnet --example analyze_network
//! ```

use padicnet::analysis::{analyze_network, AnalysisVerdict};
use padicnet::linalg::Matrix;
use padicnet::{AffineMap, Budget, Network, Prime, Scalar};

fn map(rows: &[&[(i64, i64)]], bias: &[(i64, i64)]) -> AffineMap {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|&(a, b)| Scalar::frac(a, b)).collect())
        .collect();
    let bias = bias.iter().map(|&(a, b)| Scalar::frac(a, b)).collect();
    AffineMap::new(Matrix::from_rows(rows).unwrap(), bias).unwrap()
}

fn main() -> padicnet::Result<()> {
    let p = Prime::new(2)?;
    let nets = [
        (
            "integral weights",
            Network::from_affines(
                p,
                vec![
                    map(&[&[(1, 1), (2, 1)], &[(0, 1), (3, 1)]], &[(1, 1), (0, 1)]),
                    map(&[&[(1, 1), (-1, 1)]], &[(5, 1)]),
                ],
            )?,
        ),
        (
            "a halved coordinate",
            Network::from_affines(
                p,
                vec![
                    map(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 1)]], &[(0, 1), (0, 1)]),
                    map(&[&[(1, 1), (3, 1)]], &[(0, 1)]),
                ],
            )?,
        ),
        (
            "a non-integral bias in the second layer",
            Network::from_affines(
                p,
                vec![
                    map(&[&[(1, 1), (1, 1)], &[(1, 1), (0, 1)]], &[(0, 1), (0, 1)]),
                    map(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]], &[(0, 1), (1, 4)]),
                    map(&[&[(1, 1), (1, 1)]], &[(0, 1)]),
                ],
            )?,
        ),
    ];
    for (name, net) in &nets {
        let verdict = analyze_network(net, Budget::default())?;
        let check = verdict.verify(net, 50)?;
        match &verdict {
            AnalysisVerdict::Affine { map } => {
                println!(
                    "{name}: affine on Z_2^2, matrix {:?} bias {:?}",
                    map.matrix, map.bias
                )
            }
            AnalysisVerdict::DirectionConstant { ball, direction } => println!(
                "{name}: constant in direction {direction} on {} + 2^{} Z_2^2",
                ball.center, ball.radius_exp
            ),
        }
        println!("  re-checked on 50 exact points: {}", check.passed());
    }
    Ok(())
}

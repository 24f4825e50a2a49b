//! Coset collapse, coset rounding and the width-(d+1) encoder.

use crate::error::Result;
use crate::network::{compose_all, Network};
use crate::padic::{Budget, Prime, Scalar};

use super::interpolate::{affine, require_integral};

/// Width-2 network sending `alpha + p^m Z_p` to `alpha` and fixing the rest
/// of `Z_p`: `x -> pReLU(x - alpha) - p^m pReLU((x - alpha) / p^m) + alpha`.
pub fn synth_coset_collapse(p: Prime, alpha: &Scalar, m: u32) -> Result<Network> {
    require_integral(p, alpha)?;
    let inv = p.power(-(m as i64));
    let first = affine(
        vec![vec![inv.clone()], vec![Scalar::one()]],
        vec![-(alpha * &inv), -alpha],
    );
    let second = affine(
        vec![vec![-p.power(m as i64), Scalar::one()]],
        vec![alpha.clone()],
    );
    Network::from_affines(p, vec![first, second])
}

/// Width-2 network sending every `x ∈ Z_p` to its residue in `[0, p^m)`.
///
/// Chains the collapse networks of the representatives in ascending order.
pub fn synth_coset_rounding(p: Prime, m: u32, budget: Budget) -> Result<Network> {
    let count = p.modulus(m)?;
    budget.check(count as u128)?;
    let steps = (0..count)
        .map(|r| synth_coset_collapse(p, &Scalar::from(r), m))
        .collect::<Result<Vec<_>>>()?;
    compose_all(&steps)
}

/// Width-(d+1) network computing `sum_i p^(m i) round(x_i)` (0-based `i`).
///
/// On `Z_p^d` it is constant on level-`m` cosets and injective across them.
pub fn synth_encoder(p: Prime, d: usize, m: u32, budget: Budget) -> Result<Network> {
    let count = p.modulus(m)?;
    budget.check(count as u128 * d as u128)?;
    let round = synth_coset_rounding(p, m, budget)?;
    let mut stages: Vec<Network> = (0..d)
        .map(|i| round.alongside_identity(i, d - 1 - i))
        .collect();
    let weights = (0..d).map(|i| p.power(m as i64 * i as i64)).collect();
    stages.push(Network::from_affines(
        p,
        vec![affine(vec![weights], vec![Scalar::zero()])],
    )?);
    compose_all(&stages)
}

/// The value the encoder assigns to a coset given by its residues.
pub fn encoder_value(p: Prime, m: u32, residues: &[u64]) -> Scalar {
    residues
        .iter()
        .enumerate()
        .map(|(i, &r)| Scalar::from(r) * p.power(m as i64 * i as i64))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::padic::{enumerate_cosets, PVector};
    use std::collections::BTreeSet;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn at(net: &Network, x: i64) -> Scalar {
        net.eval(&PVector::from_ints(&[x])).unwrap().entries()[0].clone()
    }

    #[test]
    fn collapse_examples() {
        let f = synth_coset_collapse(p(2), &Scalar::zero(), 1).unwrap();
        assert_eq!(f.width(), 2);
        assert_eq!(at(&f, 3), Scalar::from_int(3));
        assert_eq!(at(&f, 6), Scalar::zero());
        let f = synth_coset_collapse(p(2), &Scalar::one(), 2).unwrap();
        assert_eq!(at(&f, 5), Scalar::one());
        assert_eq!(at(&f, 3), Scalar::from_int(3));
        let f = synth_coset_collapse(p(3), &Scalar::frac(1, 2), 1).unwrap();
        // 1/2 = 2 mod 3, so 5 lands on 1/2
        assert_eq!(at(&f, 5), Scalar::frac(1, 2));
    }

    #[test]
    fn rounding_examples() {
        let r = synth_coset_rounding(p(2), 1, Budget::default()).unwrap();
        assert_eq!(r.width(), 2);
        for (x, want) in [(0, 0), (1, 1), (2, 0), (7, 1), (-3, 1)] {
            assert_eq!(at(&r, x), Scalar::from_int(want));
        }
        let r = synth_coset_rounding(p(3), 1, Budget::default()).unwrap();
        assert_eq!(at(&r, 5), Scalar::from_int(2));
        let r = synth_coset_rounding(p(3), 2, Budget::default()).unwrap();
        for x in 0..9 {
            assert_eq!(at(&r, x), Scalar::from_int(x));
        }
        let q = r.eval(&PVector::new(vec![Scalar::frac(1, 2)])).unwrap();
        assert_eq!(q.entries()[0], Scalar::from_int(5));
        assert!(matches!(
            synth_coset_rounding(p(3), 2, Budget::new(8)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn encoder_examples() {
        let b = Budget::default();
        let e = synth_encoder(p(2), 2, 1, b).unwrap();
        assert_eq!(e.width(), 3);
        for (x, want) in [([0, 0], 0), ([1, 0], 1), ([0, 1], 2), ([1, 1], 3)] {
            let y = e.eval(&PVector::from_ints(&x)).unwrap();
            assert_eq!(y.entries()[0], Scalar::from_int(want));
        }

        let e = synth_encoder(p(2), 2, 2, b).unwrap();
        let values: BTreeSet<i64> = enumerate_cosets(p(2), 2, 2, b)
            .unwrap()
            .iter()
            .map(|c| {
                e.eval(&c.representative()).unwrap().entries()[0]
                    .to_i64()
                    .unwrap()
            })
            .collect();
        assert_eq!(values, (0..16).collect());

        let e = synth_encoder(p(3), 1, 1, b).unwrap();
        assert_eq!(e.width(), 2);
        let values: BTreeSet<i64> = (0..3).map(|x| at(&e, x).to_i64().unwrap()).collect();
        assert_eq!(values.len(), 3);
    }
}

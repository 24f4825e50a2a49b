//! Whole-table compilation: exact synthesis of scalar locally constant
//! functions and approximation of vector-valued ones.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::functions::{integral_scale, FunctionTable};
use crate::network::Network;
use crate::padic::{coset_of, Budget, Coset, PVector, Scalar};

use super::encoder::{encoder_value, synth_encoder};
use super::interpolate::synth_finite_interp;
use super::juggler::{decode_search, synth_decoder, DecoderArtifact};

/// Network of width at most `d_in + 1` computing a scalar table exactly on
/// `Z_p^d_in`.
///
/// The table is scaled into `Z_p`, encoded into `Z_p` by the level-`m`
/// encoder, interpolated on the encoder image, and the last affine map is
/// multiplied back by the scale. A constant table compiles to one constant
/// affine layer. `w` is only checked against the minimum; pad the result
/// with [`Network::pad_width`] to reach exactly `w`.
pub fn synth_locally_constant(t: &FunctionTable, w: usize, budget: Budget) -> Result<Network> {
    let p = t.prime();
    let d = t.d_in();
    if t.d_out() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "exact synthesis needs a scalar table, got d_out = {}",
            t.d_out()
        )));
    }
    if w < d + 1 {
        return Err(Error::WidthTooSmall {
            requested: w,
            minimum: d + 1,
        });
    }
    let dense = t.dense(budget)?;
    if let Some((_, first)) = dense.first() {
        if dense.iter().all(|(_, v)| v == first) {
            return Ok(Network::constant(p, d, first));
        }
    }
    let (c, scaled) = integral_scale(t);
    let m = t.level();
    let encoder = synth_encoder(p, d, m, budget)?;
    let mut pairs: Vec<(Scalar, Scalar)> = dense
        .iter()
        .map(|(coset, _)| {
            (
                encoder_value(p, m, coset.residues()),
                scaled.value_at(coset).entries()[0].clone(),
            )
        })
        .collect();
    pairs.sort();
    let interp = synth_finite_interp(p, &pairs)?;
    Ok(encoder.then(&interp)?.scale_output(&c))
}

/// Result of [`synth_approximator`].
#[derive(Debug, Clone)]
pub struct Approximation {
    pub net: Network,
    /// Integral scale `c`; the network approximates the table within
    /// `p^-n |c|` in the sup norm.
    pub scale: Scalar,
    /// Precision `n` of the decoder.
    pub precision: u32,
    pub decoder: DecoderArtifact,
    /// Selector `h`: the decoder input chosen for each input coset.
    pub selector: FunctionTable,
}

/// Network of width at most `max(d_in + 1, d_out)` within `p^-n |c|` of the
/// table in the sup norm: a decoder of type `(d_out, n)` composed after a
/// locally constant selector that picks, for each input coset, a decoder
/// input whose image lies in the `p^n`-coset of the scaled table value.
pub fn synth_approximator(t: &FunctionTable, n: u32, budget: Budget) -> Result<Approximation> {
    let p = t.prime();
    if n == 0 {
        return Err(Error::DimensionMismatch(
            "precision must be positive".into(),
        ));
    }
    let (c, scaled) = integral_scale(t);
    let decoder = synth_decoder(p, t.d_out(), n, budget)?;
    let mut chosen: BTreeMap<Coset, Scalar> = BTreeMap::new();
    let mut selector = FunctionTable::new(p, t.d_in(), 1, t.level(), PVector::zeros(1))?;
    for (coset, value) in scaled.dense(budget)? {
        let target = coset_of(p, &value, n)?;
        let s = match chosen.get(&target) {
            Some(s) => s.clone(),
            None => {
                let s = decode_search(&decoder, &target)?;
                chosen.insert(target, s.clone());
                s
            }
        };
        selector.insert(coset, PVector::new(vec![s]))?;
    }
    let h = synth_locally_constant(&selector, t.d_in() + 1, budget)?;
    let net = h.then(&decoder.net)?.scale_output(&c);
    Ok(Approximation {
        net,
        scale: c,
        precision: n,
        decoder,
        selector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{net_to_table, table_distance, NormOrder};
    use crate::padic::{Prime, Valuation};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn table(pr: Prime, d: usize, m: u32, values: &[i64]) -> FunctionTable {
        let mut it = values.iter();
        FunctionTable::from_fn(pr, d, 1, m, Budget::default(), |_| {
            PVector::from_ints(&[*it.next().unwrap()])
        })
        .unwrap()
    }

    #[test]
    fn constant_fast_path() {
        let t = table(p(2), 2, 1, &[4, 4, 4, 4]);
        let net = synth_locally_constant(&t, 3, Budget::default()).unwrap();
        assert_eq!(net.depth(), 1);
        assert_eq!(
            net.eval(&PVector::from_ints(&[5, 7])).unwrap(),
            PVector::from_ints(&[4])
        );
    }

    #[test]
    fn two_coset_table() {
        let pr = p(2);
        let t = table(pr, 1, 1, &[5, -3]);
        let net = synth_locally_constant(&t, 2, Budget::default()).unwrap();
        assert!(net.width() <= 2);
        for (x, want) in [(0, 5), (1, -3), (2, 5), (3, -3)] {
            assert_eq!(
                net.eval(&PVector::from_ints(&[x])).unwrap(),
                PVector::from_ints(&[want])
            );
        }
        let back = net_to_table(&net, 1, 3, Budget::default()).unwrap();
        assert!(
            table_distance(&back, &t, NormOrder::Infinity, Budget::default())
                .unwrap()
                .is_zero()
        );
    }

    #[test]
    fn rational_values_rescale() {
        let pr = p(3);
        let mut t = FunctionTable::new(pr, 1, 1, 1, PVector::from_ints(&[0])).unwrap();
        t.insert(
            Coset::new(pr, 1, vec![1]).unwrap(),
            PVector::new(vec![Scalar::frac(2, 9)]),
        )
        .unwrap();
        t.insert(
            Coset::new(pr, 1, vec![2]).unwrap(),
            PVector::new(vec![Scalar::frac(-1, 3)]),
        )
        .unwrap();
        let net = synth_locally_constant(&t, 2, Budget::default()).unwrap();
        let back = net_to_table(&net, 1, 2, Budget::default()).unwrap();
        assert!(
            table_distance(&back, &t, NormOrder::Infinity, Budget::default())
                .unwrap()
                .is_zero()
        );
    }

    #[test]
    fn width_too_small() {
        let t = table(p(2), 2, 1, &[0, 1, 2, 3]);
        assert_eq!(
            synth_locally_constant(&t, 2, Budget::default()).unwrap_err(),
            Error::WidthTooSmall {
                requested: 2,
                minimum: 3
            }
        );
    }

    #[test]
    fn approximator_vector_valued() {
        let pr = p(2);
        let b = Budget::default();
        let mut t = FunctionTable::new(pr, 1, 2, 1, PVector::zeros(2)).unwrap();
        t.insert(
            Coset::new(pr, 1, vec![0]).unwrap(),
            PVector::from_ints(&[3, 6]),
        )
        .unwrap();
        t.insert(
            Coset::new(pr, 1, vec![1]).unwrap(),
            PVector::from_ints(&[-1, 5]),
        )
        .unwrap();
        let a = synth_approximator(&t, 1, b).unwrap();
        assert!(a.net.width() <= 2);
        let back = net_to_table(&a.net, 1, 2, b).unwrap();
        let dist = table_distance(&t, &back, NormOrder::Infinity, b).unwrap();
        assert!(dist.sup_exp().unwrap() >= Valuation::Finite(1));
    }
}

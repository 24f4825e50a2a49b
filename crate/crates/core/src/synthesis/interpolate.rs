//! Width-2 interpolation on finite subsets of `Z_p`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::network::{compose_all, AffineMap, Network};
use crate::padic::{Prime, Scalar, Valuation};

pub(crate) fn require_integral(p: Prime, x: &Scalar) -> Result<()> {
    if x.is_integral(p) {
        Ok(())
    } else {
        Err(Error::NotIntegral {
            prime: p.get(),
            value: x.to_string(),
        })
    }
}

pub(crate) fn affine(rows: Vec<Vec<Scalar>>, bias: Vec<Scalar>) -> AffineMap {
    AffineMap::new(Matrix::from_rows(rows).expect("rectangular"), bias).expect("consistent shape")
}

/// Width-2 network with `f(alpha) = beta` and `f(s) = s` on `fixed`.
///
/// The auxiliary point is `gamma = alpha + p^(e + t + 1)` where
/// `p^-e = min |s - alpha|` (taking `e = 0` for an empty set) and
/// `p^-t = |beta - alpha|`. The network is
/// `x -> pReLU(k (x - gamma)) + pReLU(x)` with `k = (beta - alpha) / (alpha - gamma)`.
pub fn synth_point_move(
    p: Prime,
    fixed: &[Scalar],
    alpha: &Scalar,
    beta: &Scalar,
) -> Result<Network> {
    for x in fixed.iter().chain([alpha, beta]) {
        require_integral(p, x)?;
    }
    if fixed.contains(alpha) {
        return Err(Error::AlphaInS(alpha.to_string()));
    }
    if alpha == beta {
        return Ok(Network::identity(p, 1));
    }
    let e = fixed
        .iter()
        .map(|s| (s - alpha).valuation(p).finite().expect("s != alpha"))
        .max()
        .unwrap_or(0);
    let t = match (beta - alpha).valuation(p) {
        Valuation::Finite(t) => t,
        Valuation::Infinite => unreachable!("alpha != beta"),
    };
    let gamma = alpha + &p.power(e + t + 1);
    let slope = (beta - alpha) / (alpha - &gamma);
    let first = affine(
        vec![vec![slope.clone()], vec![Scalar::one()]],
        vec![-(&slope * &gamma), Scalar::zero()],
    );
    let second = affine(
        vec![vec![Scalar::one(), Scalar::one()]],
        vec![Scalar::zero()],
    );
    Network::from_affines(p, vec![first, second])
}

fn distinct_sources(pairs: &[(Scalar, Scalar)]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (s, _) in pairs {
        if !seen.insert(s) {
            return Err(Error::DuplicatePoint(s.to_string()));
        }
    }
    Ok(())
}

/// Width-2 network agreeing with `pairs` when no target is also a source.
///
/// Chains point movers `f_n ∘ ... ∘ f_1` where `f_i` sends `alpha_i` to
/// `beta_i` while fixing the already-placed targets `beta_j (j < i)` and the
/// not-yet-moved sources `alpha_j (j > i)`.
pub fn synth_disjoint_interp(p: Prime, pairs: &[(Scalar, Scalar)]) -> Result<Network> {
    distinct_sources(pairs)?;
    for (s, t) in pairs {
        require_integral(p, s)?;
        require_integral(p, t)?;
    }
    let sources: BTreeSet<&Scalar> = pairs.iter().map(|(s, _)| s).collect();
    if let Some((_, t)) = pairs.iter().find(|(_, t)| sources.contains(t)) {
        return Err(Error::ImageMeetsS(t.to_string()));
    }
    if pairs.is_empty() {
        return Ok(Network::identity(p, 1));
    }
    let movers = (0..pairs.len())
        .map(|i| {
            let fixed: Vec<Scalar> = pairs[..i]
                .iter()
                .map(|(_, b)| b.clone())
                .chain(pairs[i + 1..].iter().map(|(a, _)| a.clone()))
                .collect();
            synth_point_move(p, &fixed, &pairs[i].0, &pairs[i].1)
        })
        .collect::<Result<Vec<_>>>()?;
    compose_all(&movers)
}

/// Width-2 network agreeing with an arbitrary finite map `S -> Z_p`.
///
/// Routes through a relay set `R` of the smallest nonnegative integers
/// outside `S ∪ Im`, first sending `S` onto `R` and then `R` onto the
/// targets.
pub fn synth_finite_interp(p: Prime, pairs: &[(Scalar, Scalar)]) -> Result<Network> {
    distinct_sources(pairs)?;
    if pairs.is_empty() {
        return Ok(Network::identity(p, 1));
    }
    let taken: BTreeSet<&Scalar> = pairs.iter().flat_map(|(s, t)| [s, t]).collect();
    let relays: Vec<Scalar> = (0i64..)
        .map(Scalar::from_int)
        .filter(|r| !taken.contains(r))
        .take(pairs.len())
        .collect();
    let to_relay: Vec<(Scalar, Scalar)> = pairs
        .iter()
        .zip(&relays)
        .map(|((s, _), r)| (s.clone(), r.clone()))
        .collect();
    let from_relay: Vec<(Scalar, Scalar)> = pairs
        .iter()
        .zip(&relays)
        .map(|((_, t), r)| (r.clone(), t.clone()))
        .collect();
    let g = synth_disjoint_interp(p, &to_relay)?;
    let h = synth_disjoint_interp(p, &from_relay)?;
    g.then(&h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PVector;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn at(net: &Network, x: &Scalar) -> Scalar {
        net.eval(&PVector::new(vec![x.clone()])).unwrap().entries()[0].clone()
    }

    fn ints(pairs: &[(i64, i64)]) -> Vec<(Scalar, Scalar)> {
        pairs.iter().map(|&(a, b)| (s(a), s(b))).collect()
    }

    #[test]
    fn point_move_examples() {
        let id = synth_point_move(p(2), &[s(0)], &s(1), &s(1)).unwrap();
        assert_eq!(id, Network::identity(p(2), 1));

        let f = synth_point_move(p(2), &[s(0)], &s(1), &s(0)).unwrap();
        assert_eq!(f.width(), 2);
        assert_eq!(at(&f, &s(1)), s(0));
        assert_eq!(at(&f, &s(0)), s(0));

        let f = synth_point_move(p(3), &[s(0), s(1)], &s(2), &s(7)).unwrap();
        assert_eq!(at(&f, &s(2)), s(7));
        assert_eq!(at(&f, &s(0)), s(0));
        assert_eq!(at(&f, &s(1)), s(1));
    }

    #[test]
    fn point_move_rational_points() {
        let pr = p(5);
        let fixed = [Scalar::frac(1, 3), Scalar::frac(-2, 7), s(26)];
        let alpha = s(1);
        let beta = Scalar::frac(3, 4);
        let f = synth_point_move(pr, &fixed, &alpha, &beta).unwrap();
        assert_eq!(at(&f, &alpha), beta);
        for x in &fixed {
            assert_eq!(&at(&f, x), x);
        }
    }

    #[test]
    fn point_move_errors() {
        assert_eq!(
            synth_point_move(p(2), &[s(1)], &s(1), &s(0)),
            Err(Error::AlphaInS("1".into()))
        );
        assert!(matches!(
            synth_point_move(p(2), &[], &Scalar::frac(1, 2), &s(0)),
            Err(Error::NotIntegral { .. })
        ));
    }

    #[test]
    fn disjoint_examples() {
        assert_eq!(
            synth_disjoint_interp(p(2), &[]).unwrap(),
            Network::identity(p(2), 1)
        );

        let f = synth_disjoint_interp(p(2), &ints(&[(0, 2), (1, 3)])).unwrap();
        assert_eq!(f.width(), 2);
        assert_eq!(at(&f, &s(0)), s(2));
        assert_eq!(at(&f, &s(1)), s(3));

        let pairs = ints(&[(0, 4), (1, 5), (2, 3)]);
        let f = synth_disjoint_interp(p(3), &pairs).unwrap();
        for (a, b) in &pairs {
            assert_eq!(&at(&f, a), b);
        }

        assert_eq!(
            synth_disjoint_interp(p(2), &ints(&[(0, 1), (1, 0)])),
            Err(Error::ImageMeetsS("1".into()))
        );
    }

    #[test]
    fn finite_examples() {
        let idp = ints(&[(0, 0), (1, 1), (5, 5)]);
        let f = synth_finite_interp(p(2), &idp).unwrap();
        for (a, b) in &idp {
            assert_eq!(&at(&f, a), b);
        }

        let swap = ints(&[(0, 1), (1, 0)]);
        let f = synth_finite_interp(p(2), &swap).unwrap();
        assert!(f.width() <= 2);
        assert_eq!(at(&f, &s(0)), s(1));
        assert_eq!(at(&f, &s(1)), s(0));

        let constant = ints(&[(0, 2), (1, 2), (2, 2), (3, 2)]);
        let f = synth_finite_interp(p(2), &constant).unwrap();
        for (a, _) in &constant {
            assert_eq!(at(&f, a), s(2));
        }

        assert_eq!(
            synth_finite_interp(p(2), &ints(&[(0, 1), (0, 2)])),
            Err(Error::DuplicatePoint("0".into()))
        );
    }
}

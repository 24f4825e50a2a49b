//! Randomized invariants across modules, checked exactly.

mod common;

use proptest::prelude::*;

use padicnet::analysis::{analyze_network, separation_epsilon};
use padicnet::functions::{lq_norm, net_to_table, table_distance};
use padicnet::padic::{coset_of, deinterleave_digits, interleave_digits};
use padicnet::synthesis::synth_locally_constant;
use padicnet::{
    Budget, Coset, FunctionTable, NormOrder, NormReport, PVector, Prime, Scalar, Valuation,
};

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5]).prop_map(|p| Prime::new(p).unwrap())
}

fn table_strategy() -> impl Strategy<Value = FunctionTable> {
    tables(prime())
}

/// Tables with at most 81 cosets, cheap enough to synthesize.
fn small_table_strategy() -> impl Strategy<Value = FunctionTable> {
    tables(prop::sample::select(vec![2u64, 3]).prop_map(|p| Prime::new(p).unwrap()))
}

fn tables(primes: impl Strategy<Value = Prime>) -> impl Strategy<Value = FunctionTable> {
    (
        primes,
        1usize..=2,
        1u32..=2,
        prop::collection::vec((-9i64..=9, 0u32..=2), 25),
    )
        .prop_map(|(p, d, m, vals)| {
            let mut it = vals.into_iter().cycle();
            FunctionTable::from_fn(p, d, 1, m, Budget::default(), |_| {
                let (n, e) = it.next().unwrap();
                PVector::new(vec![Scalar::from_int(n) * p.power(-(e as i64))])
            })
            .unwrap()
        })
}

fn pow(x: &Scalar, e: u32) -> Scalar {
    x.pow(e as i32)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn coset_of_lift_is_identity(p in prime(), m in 1u32..=3, r in 0u64..1000, j in -20i64..20, u in 1i64..30) {
        let modulus = p.pow(m).unwrap();
        let r = r % modulus;
        let u = if u % p.get() as i64 == 0 { u + 1 } else { u };
        // r + p^m * (j/u) lies in the coset of r
        let x = Scalar::from(r) + p.power(m as i64) * Scalar::frac(j, u);
        let c = coset_of(p, &PVector::new(vec![x.clone()]), m).unwrap();
        prop_assert_eq!(c.residues(), &[r][..]);
        prop_assert_eq!(common::residue(&common::q(&x), p.get(), m), r);
    }

    #[test]
    fn scalar_display_round_trips(n in -10_000i64..10_000, d in 1i64..500) {
        let x = Scalar::frac(n, d);
        prop_assert_eq!(x.to_string().parse::<Scalar>().unwrap(), x);
    }

    #[test]
    fn interleaving_is_bijective(p in prime(), x in 0u64..500, y in 0u64..500) {
        let k = 2;
        let modulus = p.pow(k).unwrap();
        let v = PVector::from_ints(&[(x % modulus) as i64, (y % modulus) as i64]);
        let code = interleave_digits(p, &v, k).unwrap().to_i64().unwrap() as u64;
        prop_assert_eq!(code, common::interleave(&[x % modulus, y % modulus], p.get(), k));
        prop_assert_eq!(deinterleave_digits(p, code, 2, k).unwrap(), vec![x % modulus, y % modulus]);
    }

    #[test]
    fn norms_are_monotone_in_q(t in table_strategy()) {
        let p = t.prime();
        let n1 = lq_norm(&t, NormOrder::Finite(1));
        let n2 = lq_norm(&t, NormOrder::Finite(2));
        let (a, b) = (n1.pow_q().unwrap(), n2.pow_q().unwrap());
        // ||f||_1 <= ||f||_2  <=>  (||f||_1)^2 <= ||f||_2^2
        prop_assert!(pow(a, 2) <= *b);
        match lq_norm(&t, NormOrder::Infinity) {
            NormReport::SupExp(Valuation::Finite(e)) => prop_assert!(*b <= p.power(-2 * e)),
            NormReport::SupExp(Valuation::Infinite) => prop_assert!(b.is_zero()),
            NormReport::PowQ { .. } => unreachable!(),
        }
    }

    #[test]
    fn sup_distance_is_ultrametric(f in table_strategy(), shift in -5i64..5) {
        let b = Budget::default();
        let g = f.map_values(|v| PVector::new(vec![&v.entries()[0] + &Scalar::from_int(shift)]));
        let h = f.map_values(|v| PVector::new(vec![&v.entries()[0] * &Scalar::from_int(3)]));
        let d = |x: &FunctionTable, y: &FunctionTable| {
            table_distance(x, y, NormOrder::Infinity, b).unwrap().sup_exp().unwrap()
        };
        prop_assert!(d(&f, &h) >= d(&f, &g).min(d(&g, &h)));
        prop_assert_eq!(d(&f, &g), d(&g, &f));
    }

}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn synthesized_nets_tabulate_back(t in small_table_strategy()) {
        let b = Budget::default();
        let net = synth_locally_constant(&t, t.d_in() + 1, b).unwrap();
        let back = net_to_table(&net, t.level(), 2, b).unwrap();
        prop_assert!(table_distance(&back, &t, NormOrder::Finite(1), b).unwrap().is_zero());
    }

    #[test]
    fn synthesized_nets_are_not_width_n(t in small_table_strategy()) {
        // width d_in + 1 exceeds d_in, so the analyzer refuses the shape
        let b = Budget::default();
        let net = synth_locally_constant(&t, t.d_in() + 1, b).unwrap();
        if net.width() > t.d_in() {
            prop_assert!(analyze_network(&net, b).is_err());
        }
    }
}

#[test]
fn separation_bound_shrinks_with_precision() {
    let b = Budget::default();
    for p in [2u64, 3] {
        let p = Prime::new(p).unwrap();
        for d in [1usize, 2] {
            let mut last: Option<Scalar> = None;
            for k in 2..=3 {
                let bound = separation_epsilon(p, d, k, b).unwrap();
                if let Some(prev) = &last {
                    assert!(bound.delta <= *prev);
                }
                last = Some(bound.delta);
            }
        }
    }
}

#[test]
fn coset_refinement_partitions() {
    let p = Prime::new(3).unwrap();
    let c = Coset::new(p, 1, vec![2, 0]).unwrap();
    let kids = c.refine(p, 2).unwrap();
    assert_eq!(kids.len(), 9);
    assert!(kids.iter().all(|k| k.project(p, 1).unwrap() == c));
}

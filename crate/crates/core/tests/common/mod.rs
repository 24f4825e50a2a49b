//! Independent oracles for the integration suites. They work on raw
//! `BigRational`s and integers and share no arithmetic with the library
//! beyond reading network weights.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use padicnet::{Network, Scalar};

pub fn q(x: &Scalar) -> BigRational {
    BigRational::new(x.numer().clone(), x.denom().clone())
}

pub fn s(x: &BigRational) -> Scalar {
    Scalar::from_parts(x.numer().clone(), x.denom().clone()).unwrap()
}

pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `v_p` of a nonzero integer by repeated division.
fn int_val(n: &BigInt, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    v
}

/// `None` for zero.
pub fn val(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(int_val(x.numer(), p) - int_val(x.denom(), p))
    }
}

pub fn integral(x: &BigRational, p: u64) -> bool {
    val(x, p).is_none_or(|v| v >= 0)
}

pub fn ipow(p: u64, e: u32) -> u64 {
    p.pow(e)
}

/// Canonical residue of a p-integral rational mod `p^m`, inverting the
/// denominator by exhaustive search.
pub fn residue(x: &BigRational, p: u64, m: u32) -> u64 {
    assert!(integral(x, p), "{x} is not p-integral");
    let modulus = BigInt::from(ipow(p, m));
    let den = x.denom().mod_floor(&modulus);
    let inv = (0..ipow(p, m))
        .map(BigInt::from)
        .find(|c| (c * &den).mod_floor(&modulus).is_one() || modulus.is_one())
        .expect("denominator is a unit");
    (x.numer() * inv).mod_floor(&modulus).to_u64().unwrap()
}

pub fn residues(x: &[BigRational], p: u64, m: u32) -> Vec<u64> {
    x.iter().map(|c| residue(c, p, m)).collect()
}

/// Direct evaluation of `t_L ∘ Σ ∘ ... ∘ Σ ∘ t_1`.
pub fn eval(net: &Network, x: &[BigRational]) -> Vec<BigRational> {
    let p = net.prime().get();
    let mut cur = x.to_vec();
    let last = net.layers().len() - 1;
    for (k, layer) in net.layers().iter().enumerate() {
        let m = &layer.map.matrix;
        let mut next = Vec::with_capacity(m.rows());
        for r in 0..m.rows() {
            let mut acc = q(&layer.map.bias[r]);
            for (c, x) in cur.iter().enumerate() {
                acc += q(m.get(r, c)) * x;
            }
            if k < last && !integral(&acc, p) {
                acc = BigRational::zero();
            }
            next.push(acc);
        }
        cur = next;
    }
    cur
}

/// All residue vectors of `[0, p^m)^d`, first coordinate most significant.
pub fn residue_vectors(p: u64, d: usize, m: u32) -> Vec<Vec<u64>> {
    let base = ipow(p, m);
    let total = base.pow(d as u32);
    (0..total)
        .map(|mut t| {
            let mut v = vec![0; d];
            for i in (0..d).rev() {
                v[i] = t % base;
                t /= base;
            }
            v
        })
        .collect()
}

pub fn as_q(v: &[u64]) -> Vec<BigRational> {
    v.iter().map(|&r| qi(r as i64)).collect()
}

/// `rep + j p^m` on every coordinate, `j = 1..=count`.
pub fn lifts(rep: &[u64], p: u64, m: u32, count: usize) -> Vec<Vec<BigRational>> {
    (1..=count as i64)
        .map(|j| {
            rep.iter()
                .map(|&r| qi(r as i64 + j * ipow(p, m) as i64))
                .collect()
        })
        .collect()
}

/// Level-k digit interleaving from residues: digit `j` of coordinate `i`
/// goes to position `i + j d`.
pub fn interleave(residues: &[u64], p: u64, k: u32) -> u64 {
    let d = residues.len();
    let mut out = 0u64;
    for (i, &r) in residues.iter().enumerate() {
        let mut r = r;
        for j in 0..k as usize {
            out += (r % p) * p.pow((i + j * d) as u32);
            r /= p;
        }
    }
    out
}

//! Exact rational scalars viewed inside `Q_p`, together with valuations,
//! max-norm vectors, balls, residue cosets and digit interleaving.
//!
//! Every quantity is an exact reduced rational. The prime is supplied
//! separately wherever a valuation is needed, so the same [`Scalar`] can be
//! inspected under several primes.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default cap on every exhaustive enumeration.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Upper bound on the number of items an exhaustive sweep may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(u64);

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget(limit.max(1))
    }

    pub fn limit(self) -> u64 {
        self.0
    }

    pub fn check(self, needed: u128) -> Result<()> {
        if needed > self.0 as u128 {
            Err(Error::BudgetExceeded {
                needed,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

/// A rational prime, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^e` as a machine integer, if it fits.
    pub fn pow(self, e: u32) -> Option<u64> {
        self.0.checked_pow(e)
    }

    /// `p^e` as a machine integer, or `LevelOverflow`.
    pub fn modulus(self, level: u32) -> Result<u64> {
        self.pow(level).ok_or(Error::LevelOverflow {
            prime: self.0,
            level,
        })
    }

    /// `p^e` for any integer exponent, as an exact rational.
    pub fn power(self, e: i64) -> Scalar {
        let base = BigInt::from(self.0).pow(e.unsigned_abs() as u32);
        if e >= 0 {
            Scalar(BigRational::from_integer(base))
        } else {
            Scalar(BigRational::new(BigInt::one(), base))
        }
    }

    fn big(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation; `Infinite` is the valuation of zero and compares above
/// every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_integral(self) -> bool {
        self >= Valuation::Finite(0)
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An exact reduced rational number, the one scalar type of the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar(BigRational::from_integer(n))
    }

    /// `num / den`, reduced. Panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_parts(num: BigInt, den: BigInt) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(Scalar(BigRational::new(num, den)))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn pow(&self, e: i32) -> Self {
        Scalar(num_traits::Pow::pow(&self.0, e))
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    /// `v_p(x)`.
    pub fn valuation(&self, p: Prime) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinite;
        }
        Valuation::Finite(int_valuation(self.numer(), p) - int_valuation(self.denom(), p))
    }

    pub fn is_integral(&self, p: Prime) -> bool {
        self.valuation(p).is_integral()
    }

    /// The canonical residue of `x` modulo `p^m` in `[0, p^m)`.
    pub fn residue(&self, p: Prime, m: u32) -> Result<u64> {
        if !self.is_integral(p) {
            return Err(Error::NotIntegral {
                prime: p.get(),
                value: self.to_string(),
            });
        }
        let modulus = BigInt::from(p.modulus(m)?);
        let den = self.denom().mod_floor(&modulus);
        let inv = mod_inverse(&den, &modulus).expect("denominator coprime to p");
        let r = (self.numer().mod_floor(&modulus) * inv).mod_floor(&modulus);
        Ok(r.to_u64().expect("residue below modulus"))
    }
}

fn int_valuation(n: &BigInt, p: Prime) -> i64 {
    let pb = p.big();
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(modulus);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(modulus))
    } else {
        None
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse failure for a rational literal; carries a human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarParseError(pub String);

impl fmt::Display for ScalarParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ScalarParseError {}

impl FromStr for Scalar {
    type Err = ScalarParseError;

    /// Accepts only canonical literals: `n` or `n/d` with `d > 1` and
    /// `gcd(n, d) = 1`, base 10, no sign on the denominator.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = |why: &str| ScalarParseError(format!("{why}: {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let num: BigInt = num.parse().map_err(|_| bad("invalid numerator"))?;
        let value = match den {
            None => Scalar::from_bigint(num),
            Some(d) => {
                let d: BigInt = d.parse().map_err(|_| bad("invalid denominator"))?;
                if d.is_zero() {
                    return Err(bad("zero denominator"));
                }
                Scalar(BigRational::new(num, d))
            }
        };
        if value.to_string() != s {
            return Err(bad("not in canonical reduced form"));
        }
        Ok(value)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar($trait::$method(self.0, &rhs.0))
            }
        }
        impl<'a> $trait<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<u64> for Scalar {
    fn from(n: u64) -> Self {
        Scalar::from_bigint(BigInt::from(n))
    }
}

impl From<BigUint> for Scalar {
    fn from(n: BigUint) -> Self {
        Scalar::from_bigint(BigInt::from_biguint(Sign::Plus, n))
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// `v_p(x)`.
pub fn valuation(p: Prime, x: &Scalar) -> Valuation {
    x.valuation(p)
}

/// The pReLU activation: identity on `Z_p`, zero elsewhere.
pub fn prelu(p: Prime, x: &Scalar) -> Scalar {
    if x.is_integral(p) {
        x.clone()
    } else {
        Scalar::zero()
    }
}

/// A vector in `Q_p^n` under the max norm.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PVector(Vec<Scalar>);

impl PVector {
    pub fn new(entries: Vec<Scalar>) -> Self {
        PVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        PVector(vec![Scalar::zero(); dim])
    }

    pub fn from_ints(values: &[i64]) -> Self {
        PVector(values.iter().map(|&v| Scalar::from_int(v)).collect())
    }

    /// Unit vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Scalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    /// Exponent `e` with `||x|| = p^{-e}`, the minimum coordinate valuation.
    pub fn norm_exp(&self, p: Prime) -> Valuation {
        self.0
            .iter()
            .map(|x| x.valuation(p))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    pub fn is_integral(&self, p: Prime) -> bool {
        self.0.iter().all(|x| x.is_integral(p))
    }

    pub fn scale(&self, c: &Scalar) -> PVector {
        PVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &PVector) -> PVector {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        PVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &PVector) -> PVector {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        PVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Debug for PVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl fmt::Display for PVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<Scalar>> for PVector {
    fn from(v: Vec<Scalar>) -> Self {
        PVector(v)
    }
}

/// `vec_norm_exp`: the exponent of the max norm.
pub fn vec_norm_exp(p: Prime, x: &PVector) -> Valuation {
    x.norm_exp(p)
}

/// Closed ball `center + p^radius_exp Z_p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: PVector,
    pub radius_exp: i64,
}

impl Ball {
    pub fn new(center: PVector, radius_exp: i64) -> Self {
        Ball { center, radius_exp }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, p: Prime, u: &PVector) -> bool {
        u.dim() == self.dim()
            && u.sub(&self.center).norm_exp(p) >= Valuation::Finite(self.radius_exp)
    }
}

/// A coset of `p^m Z_p^d` in `Z_p^d`, named by its canonical residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    level: u32,
    residues: Vec<u64>,
}

impl Coset {
    pub fn new(p: Prime, level: u32, residues: Vec<u64>) -> Result<Self> {
        let modulus = p.modulus(level)?;
        if let Some(r) = residues.iter().find(|&&r| r >= modulus) {
            return Err(Error::parse(
                "coset",
                format!("residue {r} not below p^{level} = {modulus}"),
            ));
        }
        Ok(Coset { level, residues })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn dim(&self) -> usize {
        self.residues.len()
    }

    /// The canonical integer representative.
    pub fn representative(&self) -> PVector {
        PVector(self.residues.iter().map(|&r| Scalar::from(r)).collect())
    }

    /// The ball `representative + p^level Z_p^d`.
    pub fn ball(&self) -> Ball {
        Ball::new(self.representative(), self.level as i64)
    }

    /// The coset of the same points at a coarser level.
    pub fn project(&self, p: Prime, level: u32) -> Result<Coset> {
        assert!(level <= self.level, "can only project to a coarser level");
        let modulus = p.modulus(level)?;
        Ok(Coset {
            level,
            residues: self.residues.iter().map(|r| r % modulus).collect(),
        })
    }

    /// All sub-cosets at a finer level, in lexicographic order.
    pub fn refine(&self, p: Prime, level: u32) -> Result<Vec<Coset>> {
        assert!(level >= self.level, "can only refine to a finer level");
        let step = p.modulus(self.level)?;
        let fan = p.modulus(level - self.level)?;
        let d = self.dim();
        let total = (fan as u128).pow(d as u32);
        let mut out = Vec::with_capacity(total as usize);
        for idx in 0..total {
            let digits = mixed_digits(idx, fan, d);
            out.push(Coset {
                level,
                residues: self
                    .residues
                    .iter()
                    .zip(digits)
                    .map(|(&r, k)| r + step * k)
                    .collect(),
            });
        }
        Ok(out)
    }
}

/// Digits of `idx` in base `radix`, most significant first, `len` of them.
fn mixed_digits(mut idx: u128, radix: u64, len: usize) -> Vec<u64> {
    let mut digits = vec![0u64; len];
    for slot in digits.iter_mut().rev() {
        *slot = (idx % radix as u128) as u64;
        idx /= radix as u128;
    }
    digits
}

/// The level-`m` coset containing an integral vector.
pub fn coset_of(p: Prime, x: &PVector, m: u32) -> Result<Coset> {
    let residues = x
        .entries()
        .iter()
        .map(|xi| xi.residue(p, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(Coset { level: m, residues })
}

/// Number of level-`m` cosets in `Z_p^d`.
pub fn coset_count(p: Prime, d: usize, m: u32) -> u128 {
    (p.get() as u128)
        .checked_pow(m * d as u32)
        .unwrap_or(u128::MAX)
}

/// Every level-`m` coset of `Z_p^d`, lexicographically ascending.
pub fn enumerate_cosets(p: Prime, d: usize, m: u32, budget: Budget) -> Result<Vec<Coset>> {
    budget.check(coset_count(p, d, m))?;
    let modulus = p.modulus(m)?;
    let total = coset_count(p, d, m);
    Ok((0..total)
        .map(|idx| Coset {
            level: m,
            residues: mixed_digits(idx, modulus, d),
        })
        .collect())
}

/// Level-`k` truncation of the digit-interleaving homeomorphism
/// `Z_p^d -> Z_p`: base-p digit `j` of coordinate `i` lands at position
/// `i + j*d`.
pub fn interleave_digits(p: Prime, x: &PVector, k: u32) -> Result<Scalar> {
    let d = x.dim();
    let digits = x
        .entries()
        .iter()
        .map(|xi| Ok(base_p_digits(xi.residue(p, k)?, p, k)))
        .collect::<Result<Vec<_>>>()?;
    let pb = BigInt::from(p.get());
    let mut acc = BigInt::zero();
    for pos in (0..(k as usize * d)).rev() {
        let (i, j) = (pos % d, pos / d);
        acc = acc * &pb + BigInt::from(digits[i][j]);
    }
    Ok(Scalar::from_bigint(acc))
}

/// Inverse of [`interleave_digits`] on `[0, p^{kd})`.
pub fn deinterleave_digits(p: Prime, value: u64, d: usize, k: u32) -> Result<Vec<u64>> {
    let modulus = p.modulus(k * d as u32)?;
    if value >= modulus {
        return Err(Error::parse("value", format!("{value} not below p^(k*d)")));
    }
    let mut coords = vec![0u64; d];
    let mut rest = value;
    let mut weights = vec![1u64; d];
    for pos in 0..(k as usize * d) {
        let digit = rest % p.get();
        rest /= p.get();
        let i = pos % d;
        coords[i] += digit * weights[i];
        weights[i] = weights[i].saturating_mul(p.get());
    }
    Ok(coords)
}

fn base_p_digits(mut r: u64, p: Prime, k: u32) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let digit = r % p.get();
            r /= p.get();
            digit
        })
        .collect()
}

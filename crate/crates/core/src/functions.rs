//! Locally constant functions `Z_p^d_in -> Q_p^d_out` stored as sparse
//! tables over level-`m` cosets, with exact Haar-measure norms.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::padic::{
    coset_count, coset_of, enumerate_cosets, Budget, Coset, PVector, Prime, Scalar, Valuation,
};

/// A function constant on every coset of `p^level Z_p^d_in`.
///
/// Cosets without an explicit entry take the default value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    prime: Prime,
    d_in: usize,
    d_out: usize,
    level: u32,
    entries: BTreeMap<Coset, PVector>,
    default: PVector,
}

impl FunctionTable {
    pub fn new(
        prime: Prime,
        d_in: usize,
        d_out: usize,
        level: u32,
        default: PVector,
    ) -> Result<Self> {
        if d_in == 0 || d_out == 0 || level == 0 {
            return Err(Error::DimensionMismatch(
                "d_in, d_out and level must be positive".into(),
            ));
        }
        if default.dim() != d_out {
            return Err(Error::DimensionMismatch(format!(
                "default has dimension {} but d_out is {d_out}",
                default.dim()
            )));
        }
        prime.modulus(level)?;
        Ok(FunctionTable {
            prime,
            d_in,
            d_out,
            level,
            entries: BTreeMap::new(),
            default,
        })
    }

    /// Table filled by evaluating `f` on every canonical representative.
    pub fn from_fn(
        prime: Prime,
        d_in: usize,
        d_out: usize,
        level: u32,
        budget: Budget,
        mut f: impl FnMut(&Coset) -> PVector,
    ) -> Result<Self> {
        let mut t = FunctionTable::new(prime, d_in, d_out, level, PVector::zeros(d_out))?;
        for c in enumerate_cosets(prime, d_in, level, budget)? {
            let v = f(&c);
            t.insert(c, v)?;
        }
        Ok(t)
    }

    /// Sets the value on one coset, replacing any earlier value.
    pub fn insert(&mut self, coset: Coset, value: PVector) -> Result<()> {
        if coset.level() != self.level || coset.dim() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "coset {:?} at level {} does not fit a level-{} table on Z_p^{}",
                coset.residues(),
                coset.level(),
                self.level,
                self.d_in
            )));
        }
        if value.dim() != self.d_out {
            return Err(Error::DimensionMismatch(format!(
                "value has dimension {} but d_out is {}",
                value.dim(),
                self.d_out
            )));
        }
        self.entries.insert(coset, value);
        Ok(())
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn default_value(&self) -> &PVector {
        &self.default
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Coset, &PVector)> {
        self.entries.iter()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Value on a coset of this table's level.
    pub fn value_at(&self, coset: &Coset) -> &PVector {
        self.entries.get(coset).unwrap_or(&self.default)
    }

    /// Value on any coset at this level or finer.
    pub fn value_on(&self, coset: &Coset) -> Result<&PVector> {
        if coset.level() == self.level {
            return Ok(self.value_at(coset));
        }
        if coset.level() < self.level {
            return Err(Error::DimensionMismatch(format!(
                "coset level {} is coarser than table level {}",
                coset.level(),
                self.level
            )));
        }
        Ok(self.value_at(&coset.project(self.prime, self.level)?))
    }

    pub fn eval(&self, x: &PVector) -> Result<&PVector> {
        if x.dim() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "input has dimension {} but table expects {}",
                x.dim(),
                self.d_in
            )));
        }
        Ok(self.value_at(&coset_of(self.prime, x, self.level)?))
    }

    /// Every coset, with its value, in lexicographic order.
    pub fn dense(&self, budget: Budget) -> Result<Vec<(Coset, PVector)>> {
        Ok(enumerate_cosets(self.prime, self.d_in, self.level, budget)?
            .into_iter()
            .map(|c| {
                let v = self.value_at(&c).clone();
                (c, v)
            })
            .collect())
    }

    /// The same function described at a finer level.
    pub fn refine(&self, level: u32, budget: Budget) -> Result<FunctionTable> {
        if level < self.level {
            return Err(Error::DimensionMismatch(format!(
                "cannot refine level {} to coarser level {level}",
                self.level
            )));
        }
        let fan = coset_count(self.prime, self.d_in, level - self.level);
        budget.check(fan.saturating_mul(self.entries.len() as u128))?;
        let mut out = FunctionTable::new(
            self.prime,
            self.d_in,
            self.d_out,
            level,
            self.default.clone(),
        )?;
        for (c, v) in &self.entries {
            for child in c.refine(self.prime, level)? {
                out.entries.insert(child, v.clone());
            }
        }
        Ok(out)
    }

    /// Applies `f` to the default and to every explicit entry.
    pub fn map_values(&self, mut f: impl FnMut(&PVector) -> PVector) -> FunctionTable {
        FunctionTable {
            prime: self.prime,
            d_in: self.d_in,
            d_out: self.d_out,
            level: self.level,
            entries: self
                .entries
                .iter()
                .map(|(c, v)| (c.clone(), f(v)))
                .collect(),
            default: f(&self.default),
        }
    }

    /// The table with every redundant entry (equal to the default) removed.
    pub fn normalized(&self) -> FunctionTable {
        let mut t = self.clone();
        t.entries.retain(|_, v| *v != t.default);
        t
    }

    fn all_values(&self) -> impl Iterator<Item = &PVector> {
        let has_default_cosets =
            (self.entries.len() as u128) < coset_count(self.prime, self.d_in, self.level);
        self.entries
            .values()
            .chain(has_default_cosets.then_some(&self.default))
    }
}

/// `table_eval`.
pub fn table_eval<'a>(t: &'a FunctionTable, x: &PVector) -> Result<&'a PVector> {
    t.eval(x)
}

/// An `L_q` order: a positive integer or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrder {
    Finite(u32),
    Infinity,
}

impl std::str::FromStr for NormOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(NormOrder::Infinity),
            _ => match s.parse::<u32>() {
                Ok(q) if q >= 1 => Ok(NormOrder::Finite(q)),
                _ => Err(Error::parse(
                    "q",
                    format!("expected a positive integer or inf, got {s:?}"),
                )),
            },
        }
    }
}

/// Exact norm value: `||f||_q^q` for finite `q`, or the exponent `e` with
/// `||f||_inf = p^{-e}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormReport {
    PowQ { q: u32, value: Scalar },
    SupExp(Valuation),
}

impl NormReport {
    pub fn pow_q(&self) -> Option<&Scalar> {
        match self {
            NormReport::PowQ { value, .. } => Some(value),
            NormReport::SupExp(_) => None,
        }
    }

    pub fn sup_exp(&self) -> Option<Valuation> {
        match self {
            NormReport::SupExp(v) => Some(*v),
            NormReport::PowQ { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NormReport::PowQ { value, .. } => value.is_zero(),
            NormReport::SupExp(v) => *v == Valuation::Infinite,
        }
    }
}

impl std::fmt::Display for NormReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormReport::PowQ { value, .. } => write!(f, "{value}"),
            NormReport::SupExp(v) => write!(f, "{v}"),
        }
    }
}

/// `||v||^q = p^{-e q}` as an exact rational, zero for the zero vector.
fn norm_pow(p: Prime, v: &PVector, q: u32) -> Scalar {
    match v.norm_exp(p) {
        Valuation::Infinite => Scalar::zero(),
        Valuation::Finite(e) => p.power(-e * q as i64),
    }
}

/// Exact `L_q` norm under the Haar measure with `mu(Z_p^d) = 1`.
pub fn lq_norm(t: &FunctionTable, q: NormOrder) -> NormReport {
    let p = t.prime;
    match q {
        NormOrder::Infinity => NormReport::SupExp(
            t.all_values()
                .map(|v| v.norm_exp(p))
                .min()
                .unwrap_or(Valuation::Infinite),
        ),
        NormOrder::Finite(q) => {
            let total = BigInt::from(p.get()).pow(t.level * t.d_in as u32);
            let explicit: Scalar = t.entries.values().map(|v| norm_pow(p, v, q)).sum();
            let rest = total - BigInt::from(t.entries.len());
            let mass = explicit + Scalar::from_bigint(rest) * norm_pow(p, &t.default, q);
            let measure = Scalar::from_bigint(BigInt::from(p.get()).pow(t.level * t.d_in as u32));
            NormReport::PowQ {
                q,
                value: mass / measure,
            }
        }
    }
}

fn check_compatible(f: &FunctionTable, g: &FunctionTable) -> Result<()> {
    if f.prime != g.prime {
        return Err(Error::PrimeMismatch {
            left: f.prime.get(),
            right: g.prime.get(),
        });
    }
    if f.d_in != g.d_in || f.d_out != g.d_out {
        return Err(Error::DimensionMismatch(format!(
            "tables map Z_p^{} -> Q_p^{} and Z_p^{} -> Q_p^{}",
            f.d_in, f.d_out, g.d_in, g.d_out
        )));
    }
    Ok(())
}

/// Pointwise `f - g` at the common finer level.
pub fn table_difference(
    f: &FunctionTable,
    g: &FunctionTable,
    budget: Budget,
) -> Result<FunctionTable> {
    check_compatible(f, g)?;
    let level = f.level.max(g.level);
    let fr = f.refine(level, budget)?;
    let gr = g.refine(level, budget)?;
    let mut out = FunctionTable::new(f.prime, f.d_in, f.d_out, level, fr.default.sub(&gr.default))?;
    for c in fr.entries.keys().chain(gr.entries.keys()) {
        if !out.entries.contains_key(c) {
            let v = fr.value_at(c).sub(gr.value_at(c));
            out.entries.insert(c.clone(), v);
        }
    }
    Ok(out)
}

/// `L_q` norm of `f - g`.
pub fn table_distance(
    f: &FunctionTable,
    g: &FunctionTable,
    q: NormOrder,
    budget: Budget,
) -> Result<NormReport> {
    Ok(lq_norm(&table_difference(f, g, budget)?, q))
}

/// `c = p^{-w}` with `w` the least coordinate valuation (or 1 when every
/// value is already integral), and the table divided by `c`.
pub fn integral_scale(t: &FunctionTable) -> (Scalar, FunctionTable) {
    let p = t.prime;
    let w = t
        .all_values()
        .map(|v| v.norm_exp(p))
        .min()
        .unwrap_or(Valuation::Infinite);
    match w {
        Valuation::Finite(w) if w < 0 => {
            let c = p.power(w);
            let inv = c.recip();
            (c, t.map_values(|v| v.scale(&inv)))
        }
        _ => (Scalar::one(), t.clone()),
    }
}

/// Deterministic lifts `rep + j * p^m * (1, ..., 1)` for `j = 1..=samples`.
pub fn coset_lifts(p: Prime, coset: &Coset, samples: usize) -> Vec<PVector> {
    let step = p.power(coset.level() as i64);
    let rep = coset.representative();
    (1..=samples as i64)
        .map(|j| {
            let shift = &step * &Scalar::from_int(j);
            PVector::new(rep.entries().iter().map(|r| r + &shift).collect())
        })
        .collect()
}

/// Tabulates a network at its canonical representatives, checking constancy
/// on `samples` extra lifts of every coset.
pub fn net_to_table(
    net: &Network,
    m: u32,
    samples: usize,
    budget: Budget,
) -> Result<FunctionTable> {
    let p = net.prime();
    let cosets = enumerate_cosets(p, net.d_in(), m, budget)?;
    budget.check(cosets.len() as u128 * (samples as u128 + 1))?;
    let mut t = FunctionTable::new(p, net.d_in(), net.d_out(), m, PVector::zeros(net.d_out()))?;
    for c in cosets {
        let rep = c.representative();
        let value = net.eval(&rep)?;
        for x in coset_lifts(p, &c, samples) {
            let other = net.eval(&x)?;
            if other != value {
                return Err(Error::ConstancyViolation {
                    coset: c.residues().to_vec(),
                    detail: format!("{rep} -> {value} but {x} -> {other}"),
                });
            }
        }
        t.entries.insert(c, value);
    }
    Ok(t)
}

/// First point where a network disagrees with a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub coset: Coset,
    pub point: PVector,
    pub expected: PVector,
    pub actual: PVector,
}

/// Compares a network against a table on every representative plus
/// `samples` lifts per coset. `Ok(None)` means exact agreement everywhere
/// checked.
pub fn verify_against_table(
    net: &Network,
    table: &FunctionTable,
    samples: usize,
    budget: Budget,
) -> Result<Option<Mismatch>> {
    if net.prime() != table.prime {
        return Err(Error::PrimeMismatch {
            left: net.prime().get(),
            right: table.prime.get(),
        });
    }
    if net.d_in() != table.d_in || net.d_out() != table.d_out {
        return Err(Error::DimensionMismatch(format!(
            "network maps {} -> {} but table maps {} -> {}",
            net.d_in(),
            net.d_out(),
            table.d_in,
            table.d_out
        )));
    }
    let p = table.prime;
    let cosets = enumerate_cosets(p, table.d_in, table.level, budget)?;
    budget.check(cosets.len() as u128 * (samples as u128 + 1))?;
    for c in cosets {
        let expected = table.value_at(&c);
        let points = std::iter::once(c.representative()).chain(coset_lifts(p, &c, samples));
        for x in points {
            let actual = net.eval(&x)?;
            if &actual != expected {
                return Ok(Some(Mismatch {
                    coset: c,
                    point: x,
                    expected: expected.clone(),
                    actual,
                }));
            }
        }
    }
    Ok(None)
}

//! Lower-bound machinery: affine-prefix tracking, disjoint balls, the
//! affine-or-direction-constant verdict for networks of width `n` on
//! `Z_p^n`, and finite-precision separation bounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functions::{table_distance, FunctionTable, NormOrder, NormReport};
use crate::network::{Activation, AffineMap, Network};
use crate::padic::{
    enumerate_cosets, interleave_digits, Ball, Budget, Coset, PVector, Prime, Scalar, Valuation,
};

/// The set `{x ∈ Z_p^n : Σ a_j x_j + b ∈ Z_p}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexFunctionalConstraint {
    pub coeffs: Vec<Scalar>,
    pub offset: Scalar,
}

impl ConvexFunctionalConstraint {
    pub fn new(coeffs: Vec<Scalar>, offset: Scalar) -> Self {
        ConvexFunctionalConstraint { coeffs, offset }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn value(&self, x: &PVector) -> Scalar {
        self.coeffs
            .iter()
            .zip(x.entries())
            .map(|(a, xi)| a * xi)
            .sum::<Scalar>()
            + &self.offset
    }

    pub fn contains(&self, p: Prime, x: &PVector) -> bool {
        self.value(x).is_integral(p)
    }
}

/// Outcome of a sampled exact check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Passed,
    Failed { witness: PVector },
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Passed)
    }
}

/// Either the network is affine on `Z_p^n`, or it is constant in the
/// direction `h` (`|h| = 1/p`) on the ball `B` of radius `1/p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnalysisVerdict {
    Affine { map: AffineMap },
    DirectionConstant { ball: Ball, direction: PVector },
}

impl AnalysisVerdict {
    /// Re-checks the verdict against the network on `samples` exact points.
    pub fn verify(&self, net: &Network, samples: usize) -> Result<Check> {
        match self {
            AnalysisVerdict::Affine { map } => verify_affine(net, map, samples),
            AnalysisVerdict::DirectionConstant { ball, direction } => {
                verify_direction_constancy(net, ball, direction, samples)
            }
        }
    }
}

/// Composed prefixes and the first violation `(layer, row)`, both 1-based.
pub type PrefixReport = (Vec<AffineMap>, Option<(usize, usize)>);

/// Composed affine prefixes `f_k = t_k ∘ Σ ∘ ... ∘ Σ ∘ t_1`.
///
/// Prefixes are returned while each hidden prefix maps `Z_p^n` into `Z_p^n`
/// (all composed entries and bias coordinates integral); on `Z_p^n` the
/// activations between them act as the identity. The first hidden layer
/// `k` (1-based) with a non-integral row `i` (1-based) is reported and its
/// prefix is the last one returned. Without a violation the last prefix is
/// the whole network on `Z_p^n`.
pub fn affine_prefix(net: &Network) -> Result<PrefixReport> {
    check_shape(net)?;
    let p = net.prime();
    let mut prefixes: Vec<AffineMap> = Vec::new();
    for (k, layer) in net.layers().iter().enumerate() {
        let f = match prefixes.last() {
            Some(prev) => layer.map.after(prev),
            None => layer.map.clone(),
        };
        let violation = if layer.activation == Activation::Prelu {
            (0..f.out_dim()).find(|&i| {
                !f.bias[i].is_integral(p) || f.matrix.row(i).iter().any(|a| !a.is_integral(p))
            })
        } else {
            None
        };
        prefixes.push(f);
        if let Some(i) = violation {
            return Ok((prefixes, Some((k + 1, i + 1))));
        }
    }
    Ok((prefixes, None))
}

fn check_shape(net: &Network) -> Result<()> {
    let n = net.d_in();
    if let Some(&h) = net.hidden_dims().iter().find(|&&h| h != n) {
        return Err(Error::ShapeMismatch(format!(
            "hidden dimension {h} differs from input dimension {n}"
        )));
    }
    Ok(())
}

/// First ball `x0 + p Z_p^n`, `x0 ∈ {0..p-1}^n` in lexicographic order,
/// disjoint from the constraint set.
///
/// With `v = min_j v(a_j)` the values on the ball form
/// `a·x0 + b + p^{1+v} Z_p`, which misses `Z_p` iff
/// `v(a·x0 + b) < min(0, 1 + v)`.
pub fn find_disjoint_ball(
    p: Prime,
    c: &ConvexFunctionalConstraint,
    budget: Budget,
) -> Result<Ball> {
    let n = c.dim();
    let v = c
        .coeffs
        .iter()
        .map(|a| a.valuation(p))
        .min()
        .unwrap_or(Valuation::Infinite);
    let bound = match v {
        Valuation::Finite(v) => (1 + v).min(0),
        Valuation::Infinite => 0,
    };
    for coset in enumerate_cosets(p, n, 1, budget)? {
        let x0 = coset.representative();
        if c.value(&x0).valuation(p) < Valuation::Finite(bound) {
            return Ok(Ball::new(x0, 1));
        }
    }
    Err(Error::NoBallFound)
}

/// The affine-or-direction-constant verdict for a network with
/// `d_in = n` and every hidden dimension at most `n`; narrower hidden
/// layers are zero padded first.
pub fn analyze_network(net: &Network, budget: Budget) -> Result<AnalysisVerdict> {
    let n = net.d_in();
    if let Some(&h) = net.hidden_dims().iter().find(|&&h| h > n) {
        return Err(Error::ShapeMismatch(format!(
            "hidden dimension {h} exceeds input dimension {n}"
        )));
    }
    let padded = net.pad_width(n)?;
    let (prefixes, violation) = affine_prefix(&padded)?;
    let last = prefixes.last().expect("networks have a layer");
    let Some((_, row)) = violation else {
        return Ok(AnalysisVerdict::Affine { map: last.clone() });
    };
    let i = row - 1;
    let constraint =
        ConvexFunctionalConstraint::new(last.matrix.row(i).to_vec(), last.bias[i].clone());
    let ball = find_disjoint_ball(net.prime(), &constraint, budget)?;
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let kernel = last.matrix.select_rows(&others).kernel();
    let h = kernel.first().expect("n - 1 equations in n unknowns");
    let direction = primitive_integer(h).scale(&Scalar::from(net.prime().get()));
    Ok(AnalysisVerdict::DirectionConstant { ball, direction })
}

/// Integer multiple of a nonzero rational vector with coprime entries.
fn primitive_integer(v: &PVector) -> PVector {
    let lcm = v
        .entries()
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .entries()
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    PVector::new(
        ints.into_iter()
            .map(|x| Scalar::from_bigint(x / &g))
            .collect(),
    )
}

/// Deterministic exact sample points of a ball: the center, then
/// `center + p^r z` with `z` rational, denominators prime to `p`.
pub fn ball_samples(p: Prime, ball: &Ball, count: usize, seed: u64) -> Vec<PVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = p.power(ball.radius_exp);
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(ball.center.clone());
    }
    while out.len() < count {
        let z: Vec<Scalar> = (0..ball.dim())
            .map(|_| unit_rational(p, &mut rng))
            .collect();
        out.push(ball.center.add(&PVector::new(z).scale(&step)));
    }
    out
}

fn unit_rational(p: Prime, rng: &mut ChaCha8Rng) -> Scalar {
    let num: i64 = rng.gen_range(-1000..=1000);
    let mut den: i64 = rng.gen_range(1..=60);
    while den % p.get() as i64 == 0 {
        den += 1;
    }
    Scalar::frac(num, den)
}

/// Checks `f(x + h) = f(x)` exactly on `trials` sample points of the ball.
/// An `h` whose norm is not the ball's radius fails at the center.
pub fn verify_direction_constancy(
    net: &Network,
    ball: &Ball,
    h: &PVector,
    trials: usize,
) -> Result<Check> {
    let p = net.prime();
    if h.norm_exp(p) != Valuation::Finite(ball.radius_exp) {
        return Ok(Check::Failed {
            witness: ball.center.clone(),
        });
    }
    for x in ball_samples(p, ball, trials, 0x5eed) {
        if net.eval(&x.add(h))? != net.eval(&x)? {
            return Ok(Check::Failed { witness: x });
        }
    }
    Ok(Check::Passed)
}

/// Checks that the network equals `map` exactly on `trials` sample points
/// of `Z_p^n`.
pub fn verify_affine(net: &Network, map: &AffineMap, trials: usize) -> Result<Check> {
    let p = net.prime();
    let whole = Ball::new(PVector::zeros(net.d_in()), 0);
    for x in ball_samples(p, &whole, trials, 0xaff1) {
        if net.eval(&x)?.entries() != map.apply(x.entries()).as_slice() {
            return Ok(Check::Failed { witness: x });
        }
    }
    Ok(Check::Passed)
}

/// `ε = p^-epsilon_exp` and `δ = ε / (2 p^d)` for the interleaving map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationBound {
    pub epsilon_exp: i64,
    pub delta: Scalar,
    pub certified_level: u32,
    pub dim: usize,
}

/// Vectors `p h'` with `h'` running over `(Z/p^{k-1})^d` outside `p Z`:
/// the level-`k` truncations of all `h` with `|h| = 1/p`.
fn unit_directions(p: Prime, d: usize, k: u32, budget: Budget) -> Result<Vec<Vec<u64>>> {
    if k < 2 {
        return Ok(Vec::new());
    }
    Ok(enumerate_cosets(p, d, k - 1, budget)?
        .into_iter()
        .filter(|c| c.residues().iter().any(|r| r % p.get() != 0))
        .map(|c| c.residues().iter().map(|r| r * p.get()).collect())
        .collect())
}

fn shift(p: Prime, c: &Coset, h: &[u64]) -> Result<Coset> {
    let modulus = p.modulus(c.level())?;
    let residues = c
        .residues()
        .iter()
        .zip(h)
        .map(|(x, y)| (x + y) % modulus)
        .collect();
    Coset::new(p, c.level(), residues)
}

/// Certified lower bound on `|I(x + h) - I(x)|` over `x ∈ Z_p^d`,
/// `|h| = 1/p`, for the digit interleaving `I`.
///
/// Digits of `I(x + h) - I(x)` below position `k d` depend only on the
/// level-`k` truncations, so the exhaustive scan over them is exact as long
/// as no difference vanishes there.
pub fn separation_epsilon(p: Prime, d: usize, k: u32, budget: Budget) -> Result<SeparationBound> {
    let xs = enumerate_cosets(p, d, k, budget)?;
    let hs = unit_directions(p, d, k, budget)?;
    budget.check(xs.len() as u128 * hs.len() as u128)?;
    if hs.is_empty() {
        return Err(Error::NotCertifiable(k));
    }
    let full = (k as i64) * d as i64;
    let mut worst = 0i64;
    for x in &xs {
        let fx = interleave_digits(p, &x.representative(), k)?;
        for h in &hs {
            let fy = interleave_digits(p, &shift(p, x, h)?.representative(), k)?;
            match (fy - &fx).valuation(p) {
                Valuation::Finite(e) if e < full => worst = worst.max(e),
                _ => return Err(Error::NotCertifiable(k)),
            }
        }
    }
    let delta = p.power(-worst) / (Scalar::from_int(2) * p.power(d as i64));
    Ok(SeparationBound {
        epsilon_exp: worst,
        delta,
        certified_level: k,
        dim: d,
    })
}

/// Level-`k` table of the interleaving `Z_p^d -> Z_p`.
pub fn interleaving_table(p: Prime, d: usize, k: u32, budget: Budget) -> Result<FunctionTable> {
    let mut t = FunctionTable::new(p, d, 1, k, PVector::zeros(1))?;
    for c in enumerate_cosets(p, d, k, budget)? {
        let v = interleave_digits(p, &c.representative(), k)?;
        t.insert(c, PVector::new(vec![v]))?;
    }
    Ok(t)
}

/// First level-1 ball and direction `h` (`|h| = 1/p`) with
/// `g(x + h) = g(x)` on the whole ball, searched at level `max(level, 2)`.
pub fn detect_direction_constancy(
    g: &FunctionTable,
    budget: Budget,
) -> Result<Option<(Ball, PVector)>> {
    let p = g.prime();
    let d = g.d_in();
    let level = g.level().max(2);
    let t = g.refine(level, budget)?;
    let cosets = enumerate_cosets(p, d, level, budget)?;
    let hs = unit_directions(p, d, level, budget)?;
    budget.check(cosets.len() as u128 * hs.len() as u128)?;
    for ball in enumerate_cosets(p, d, 1, budget)? {
        let inside: Vec<&Coset> = cosets
            .iter()
            .filter(|c| {
                c.residues()
                    .iter()
                    .zip(ball.residues())
                    .all(|(x, b)| x % p.get() == *b)
            })
            .collect();
        for h in &hs {
            let mut ok = true;
            for c in &inside {
                if t.value_at(&shift(p, c, h)?) != t.value_at(c) {
                    ok = false;
                    break;
                }
            }
            if ok {
                let direction = PVector::new(h.iter().map(|&r| Scalar::from(r)).collect());
                return Ok(Some((Ball::new(ball.representative(), 1), direction)));
            }
        }
    }
    Ok(None)
}

/// `‖f - g‖_1 ≥ δ` exactly, for `g` direction-constant on a level-1 ball.
pub fn l1_separation_check(
    f: &FunctionTable,
    g: &FunctionTable,
    bound: &SeparationBound,
    budget: Budget,
) -> Result<bool> {
    if detect_direction_constancy(g, budget)?.is_none() {
        return Err(Error::PreconditionUnverified);
    }
    match table_distance(f, g, NormOrder::Finite(1), budget)? {
        NormReport::PowQ { value, .. } => Ok(value >= bound.delta),
        NormReport::SupExp(_) => unreachable!("q = 1 reports a power"),
    }
}

/// Random scalar table of level `level` constant in direction `h` on the
/// level-1 coset `ball`: values are shared along each `+h` orbit inside the
/// ball and drawn freely elsewhere.
pub fn random_direction_constant_table(
    p: Prime,
    ball: &Coset,
    h: &[u64],
    level: u32,
    seed: u64,
    budget: Budget,
) -> Result<FunctionTable> {
    let d = ball.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = FunctionTable::new(p, d, 1, level, PVector::zeros(1))?;
    let mut assigned: std::collections::BTreeSet<Coset> = Default::default();
    for c in enumerate_cosets(p, d, level, budget)? {
        if assigned.contains(&c) {
            continue;
        }
        let value = PVector::new(vec![Scalar::from_int(rng.gen_range(-20..=20))]);
        let in_ball = c.project(p, 1)? == *ball;
        let mut orbit = vec![c.clone()];
        if in_ball {
            let mut next = shift(p, &c, h)?;
            while next != c {
                orbit.push(next.clone());
                next = shift(p, &next, h)?;
            }
        }
        for o in orbit {
            assigned.insert(o.clone());
            t.insert(o, value.clone())?;
        }
    }
    Ok(t)
}

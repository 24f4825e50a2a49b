//! Surjectivity certificates, the juggling network and the decoder.
//!
//! A [`SurjectivityCertificate`] records a ball `center + p^n Z_p` on which a
//! network coordinate is the affine map `slope (x - center) + offset` onto
//! `Z_p`. Such a map is onto `Z_p` exactly when `v(slope) = -n` and
//! `offset ∈ Z_p`, so certificates are checkable from their four numbers.
//! The juggler keeps one certificate per level-`m` coset; the decoder
//! inverts them to hit any target residue tuple without search.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::padic::{Budget, Coset, PVector, Prime, Scalar, Valuation};

use super::interpolate::{affine, require_integral};

/// Affine surjection `x -> slope (x - center) + offset` from
/// `center + p^ball_exp Z_p` onto `Z_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurjectivityCertificate {
    pub center: Scalar,
    pub ball_exp: i64,
    pub slope: Scalar,
    pub offset: Scalar,
}

/// True iff `x -> a (x - alpha) + b` maps `alpha + p^n Z_p` onto `Z_p`.
pub fn check_affine_surjectivity(p: Prime, a: &Scalar, alpha: &Scalar, b: &Scalar, n: i64) -> bool {
    alpha.is_integral(p) && a.valuation(p) == Valuation::Finite(-n) && b.is_integral(p)
}

impl SurjectivityCertificate {
    pub fn is_valid(&self, p: Prime) -> bool {
        self.ball_exp >= 1
            && check_affine_surjectivity(p, &self.slope, &self.center, &self.offset, self.ball_exp)
    }

    pub fn contains(&self, p: Prime, x: &Scalar) -> bool {
        (x - &self.center).valuation(p) >= Valuation::Finite(self.ball_exp)
    }

    pub fn apply(&self, x: &Scalar) -> Scalar {
        &self.slope * &(x - &self.center) + &self.offset
    }

    /// The unique ball point mapped to `y`.
    pub fn preimage(&self, y: &Scalar) -> Scalar {
        (y - &self.offset) / &self.slope + &self.center
    }
}

/// Certificate for `x -> f(x)/p^m + (x - beta)/p^m` on a sub-ball of the
/// certified ball of `f`, of exponent `n + m`.
///
/// The new center is the preimage under `f` of `beta - r`, with `r` the
/// level-`m` residue of the old center, so the new offset
/// `(center' - r)/p^m` is integral.
pub fn refine_ball(
    p: Prime,
    cert: &SurjectivityCertificate,
    beta: &Scalar,
    m: u32,
) -> Result<SurjectivityCertificate> {
    if !cert.is_valid(p) {
        return Err(Error::InvalidCertificate(format!(
            "{cert:?} fails the surjectivity criterion"
        )));
    }
    if cert.ball_exp < m as i64 {
        return Err(Error::InvalidCertificate(format!(
            "ball exponent {} does not fit inside a level-{m} coset",
            cert.ball_exp
        )));
    }
    require_integral(p, beta)?;
    let residue = Scalar::from(cert.center.residue(p, m)?);
    let target = beta - &residue;
    let center = cert.preimage(&target);
    let scale = p.power(-(m as i64));
    Ok(SurjectivityCertificate {
        offset: (&center - &residue) * &scale,
        slope: (&cert.slope + &Scalar::one()) * &scale,
        center,
        ball_exp: cert.ball_exp + m as i64,
    })
}

/// One certificate produced while building a juggler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateEvent {
    /// 1-based position of the chain step that emitted it.
    pub step: usize,
    pub residue: u64,
    pub certificate: SurjectivityCertificate,
    /// The certificate it was refined from; `None` for a fresh one.
    pub refined_from: Option<SurjectivityCertificate>,
}

/// Width-2 network `x -> (x, g(x))` with `g` a juggling function of type
/// `m`, and one certificate per level-`m` coset.
#[derive(Debug, Clone)]
pub struct JugglerArtifact {
    pub net: Network,
    pub level: u32,
    pub certificates: BTreeMap<u64, SurjectivityCertificate>,
    pub history: Vec<CertificateEvent>,
}

impl JugglerArtifact {
    pub fn prime(&self) -> Prime {
        self.net.prime()
    }

    /// `g(x)`, the second output of the network.
    pub fn juggle(&self, x: &Scalar) -> Result<Scalar> {
        let y = self.net.eval(&PVector::new(vec![x.clone()]))?;
        Ok(y.entries()[1].clone())
    }

    /// A point of the coset `residue + p^m Z_p` sent by `g` to `y`.
    pub fn preimage_in(&self, residue: u64, y: &Scalar) -> Result<Scalar> {
        let cert = self
            .certificates
            .get(&residue)
            .filter(|c| c.is_valid(self.prime()))
            .ok_or(Error::CertificateGap {
                residue,
                level: self.level,
            })?;
        Ok(cert.preimage(y))
    }
}

/// The juggler chain `t_{beta_N} ∘ ... ∘ t_{beta_1} ∘ (x -> (x, 0))` over the
/// representatives `beta_i = 0, ..., p^m - 1`, where
/// `t_beta(x, y) = pReLU(x, (x - beta)/p^m + y/p^m)`.
pub fn synth_juggler(p: Prime, m: u32, budget: Budget) -> Result<JugglerArtifact> {
    let count = p.modulus(m)?;
    budget.check(count as u128 * count as u128)?;
    let inv = p.power(-(m as i64));
    let mut maps = Vec::with_capacity(count as usize + 1);
    let mut certificates: BTreeMap<u64, SurjectivityCertificate> = BTreeMap::new();
    let mut history = Vec::new();
    for (idx, beta) in (0..count).enumerate() {
        let b = Scalar::from(beta);
        let shift = -(&b * &inv);
        maps.push(if idx == 0 {
            affine(
                vec![vec![Scalar::one()], vec![inv.clone()]],
                vec![Scalar::zero(), shift],
            )
        } else {
            affine(
                vec![
                    vec![Scalar::one(), Scalar::zero()],
                    vec![inv.clone(), inv.clone()],
                ],
                vec![Scalar::zero(), shift],
            )
        });
        for (&residue, cert) in certificates.iter_mut() {
            let refined = refine_ball(p, cert, &b, m)?;
            history.push(CertificateEvent {
                step: idx + 1,
                residue,
                certificate: refined.clone(),
                refined_from: Some(cert.clone()),
            });
            *cert = refined;
        }
        let fresh = SurjectivityCertificate {
            center: b.clone(),
            ball_exp: m as i64,
            slope: inv.clone(),
            offset: Scalar::zero(),
        };
        history.push(CertificateEvent {
            step: idx + 1,
            residue: beta,
            certificate: fresh.clone(),
            refined_from: None,
        });
        certificates.insert(beta, fresh);
    }
    maps.push(affine(
        vec![
            vec![Scalar::one(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::one()],
        ],
        vec![Scalar::zero(), Scalar::zero()],
    ));
    Ok(JugglerArtifact {
        net: Network::from_affines(p, maps)?,
        level: m,
        certificates,
        history,
    })
}

/// Width-`d` network `x -> (x, g(x), ..., g^(d-1)(x))` for the juggler `g`.
#[derive(Debug, Clone)]
pub struct DecoderArtifact {
    pub net: Network,
    pub level: u32,
    pub dim: usize,
    pub juggler: JugglerArtifact,
}

pub fn synth_decoder(p: Prime, d: usize, m: u32, budget: Budget) -> Result<DecoderArtifact> {
    if d == 0 {
        return Err(Error::DimensionMismatch(
            "decoder dimension must be positive".into(),
        ));
    }
    let juggler = synth_juggler(p, m, budget)?;
    let net = if d == 1 {
        Network::identity(p, 1)
    } else {
        let mut net = juggler.net.clone();
        for k in 3..=d {
            net = net.then(&juggler.net.alongside_identity(k - 2, 0))?;
        }
        net
    };
    Ok(DecoderArtifact {
        net,
        level: m,
        dim: d,
        juggler,
    })
}

/// A point whose decoder image lies in `target`, built by descending
/// certificate inversion: `x_d = y_d`, then `x_i ∈ y_i + p^m Z_p` with
/// `g(x_i) = x_{i+1}`.
pub fn decode_search(dec: &DecoderArtifact, target: &Coset) -> Result<Scalar> {
    if target.dim() != dec.dim {
        return Err(Error::DimensionMismatch(format!(
            "target has dimension {} but decoder has dimension {}",
            target.dim(),
            dec.dim
        )));
    }
    decode_with_certificates(
        dec.juggler.prime(),
        dec.level,
        &dec.juggler.certificates,
        target,
    )
}

/// [`decode_search`] driven by a certificate map alone; the target
/// dimension is the decoder dimension.
pub fn decode_with_certificates(
    p: Prime,
    level: u32,
    certificates: &BTreeMap<u64, SurjectivityCertificate>,
    target: &Coset,
) -> Result<Scalar> {
    if target.level() != level || target.dim() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "target is a level-{} coset but certificates are for level {level}",
            target.level()
        )));
    }
    let r = target.residues();
    let mut x = Scalar::from(r[r.len() - 1]);
    for &residue in r[..r.len() - 1].iter().rev() {
        let cert = certificates
            .get(&residue)
            .filter(|c| c.is_valid(p) && c.ball_exp >= level as i64)
            .ok_or(Error::CertificateGap { residue, level })?;
        x = cert.preimage(&x);
    }
    Ok(x)
}

//! On-disk artifact formats. Every rational is a canonical `"num/den"`
//! string (`"num"` when the denominator is 1); non-canonical literals are
//! rejected with the JSON path of the offending field.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::analysis::AnalysisVerdict;
use crate::error::{Error, Result};
use crate::functions::FunctionTable;
use crate::linalg::Matrix;
use crate::network::{Activation, AffineLayer, AffineMap, Network};
use crate::padic::{Ball, Coset, PVector, Prime, Scalar};
use crate::synthesis::SurjectivityCertificate;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    prime: u64,
    layers: Vec<RawLayer>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    matrix: Vec<Vec<String>>,
    bias: Vec<String>,
    activation: RawActivation,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum RawActivation {
    Prelu,
    None,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    prime: u64,
    d_in: usize,
    d_out: usize,
    level: u32,
    default: Vec<String>,
    entries: Vec<RawEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    coset: Vec<u64>,
    value: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCertificates {
    level: u32,
    certificates: Vec<RawCertificate>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCertificate {
    residue: u64,
    center: String,
    ball_exp: i64,
    slope: String,
    offset: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    matrix: Vec<Vec<String>>,
    bias: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBall {
    center: Vec<String>,
    radius_exp: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawVerdict {
    Affine {
        map: RawMap,
        verified: bool,
        samples: usize,
    },
    DirectionConstant {
        ball: RawBall,
        direction: Vec<String>,
        verified: bool,
        samples: usize,
    },
}

/// An analysis verdict with the outcome of its sampled re-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictReport {
    pub verdict: AnalysisVerdict,
    pub verified: bool,
    pub samples: usize,
}

fn from_str<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse("<document>", e.to_string()))
}

fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

pub fn parse_scalar(field: &str, s: &str) -> Result<Scalar> {
    s.parse::<Scalar>().map_err(|e| Error::parse(field, e.0))
}

fn scalars(field: &str, items: &[String]) -> Result<Vec<Scalar>> {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| parse_scalar(&format!("{field}[{i}]"), s))
        .collect()
}

fn strings(items: &[Scalar]) -> Vec<String> {
    items.iter().map(|x| x.to_string()).collect()
}

fn prime(field: &str, p: u64) -> Result<Prime> {
    Prime::new(p).map_err(|e| Error::parse(field, e.to_string()))
}

fn matrix(field: &str, rows: &[Vec<String>]) -> Result<Matrix> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(r, row)| scalars(&format!("{field}[{r}]"), row))
        .collect::<Result<Vec<_>>>()?;
    if parsed.is_empty() {
        return Err(Error::parse(field, "matrix has no rows"));
    }
    Matrix::from_rows(parsed).ok_or_else(|| Error::parse(field, "rows have different lengths"))
}

fn raw_map(map: &AffineMap) -> RawMap {
    RawMap {
        matrix: map.matrix.to_rows().iter().map(|r| strings(r)).collect(),
        bias: strings(&map.bias),
    }
}

fn parse_map(field: &str, raw: &RawMap) -> Result<AffineMap> {
    let m = matrix(&format!("{field}.matrix"), &raw.matrix)?;
    let bias = scalars(&format!("{field}.bias"), &raw.bias)?;
    AffineMap::new(m, bias).map_err(|e| Error::parse(format!("{field}.bias"), e.to_string()))
}

pub fn network_to_json(net: &Network) -> String {
    let layers = net
        .layers()
        .iter()
        .map(|l| RawLayer {
            matrix: l.map.matrix.to_rows().iter().map(|r| strings(r)).collect(),
            bias: strings(&l.map.bias),
            activation: match l.activation {
                Activation::Prelu => RawActivation::Prelu,
                Activation::None => RawActivation::None,
            },
        })
        .collect();
    to_string(&RawNetwork {
        prime: net.prime().get(),
        layers,
    })
}

pub fn network_from_json(text: &str) -> Result<Network> {
    let raw: RawNetwork = from_str(text)?;
    let p = prime("prime", raw.prime)?;
    let layers = raw
        .layers
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let m = matrix(&format!("layers[{i}].matrix"), &l.matrix)?;
            let bias = scalars(&format!("layers[{i}].bias"), &l.bias)?;
            Ok(AffineLayer {
                map: AffineMap { matrix: m, bias },
                activation: match l.activation {
                    RawActivation::Prelu => Activation::Prelu,
                    RawActivation::None => Activation::None,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Network::new(p, layers).map_err(|e| match e {
        Error::DimensionMismatch(msg) => Error::parse("layers", msg),
        other => other,
    })
}

pub fn table_to_json(t: &FunctionTable) -> String {
    to_string(&RawTable {
        prime: t.prime().get(),
        d_in: t.d_in(),
        d_out: t.d_out(),
        level: t.level(),
        default: strings(t.default_value().entries()),
        entries: t
            .entries()
            .map(|(c, v)| RawEntry {
                coset: c.residues().to_vec(),
                value: strings(v.entries()),
            })
            .collect(),
    })
}

pub fn table_from_json(text: &str) -> Result<FunctionTable> {
    let raw: RawTable = from_str(text)?;
    let p = prime("prime", raw.prime)?;
    let default = PVector::new(scalars("default", &raw.default)?);
    let mut t = FunctionTable::new(p, raw.d_in, raw.d_out, raw.level, default)
        .map_err(|e| Error::parse("<header>", e.to_string()))?;
    let mut seen = BTreeSet::new();
    for (i, e) in raw.entries.iter().enumerate() {
        let field = format!("entries[{i}]");
        if e.coset.len() != raw.d_in {
            return Err(Error::parse(
                format!("{field}.coset"),
                format!("expected {} residues, got {}", raw.d_in, e.coset.len()),
            ));
        }
        let coset = Coset::new(p, raw.level, e.coset.clone())
            .map_err(|err| Error::parse(format!("{field}.coset"), err.to_string()))?;
        if !seen.insert(coset.clone()) {
            return Err(Error::parse(format!("{field}.coset"), "duplicate coset"));
        }
        let value = PVector::new(scalars(&format!("{field}.value"), &e.value)?);
        t.insert(coset, value)
            .map_err(|err| Error::parse(format!("{field}.value"), err.to_string()))?;
    }
    Ok(t)
}

pub fn certificates_to_json(level: u32, certs: &BTreeMap<u64, SurjectivityCertificate>) -> String {
    to_string(&RawCertificates {
        level,
        certificates: certs
            .iter()
            .map(|(&residue, c)| RawCertificate {
                residue,
                center: c.center.to_string(),
                ball_exp: c.ball_exp,
                slope: c.slope.to_string(),
                offset: c.offset.to_string(),
            })
            .collect(),
    })
}

/// Level and certificate map. Validity is not checked here; consumers
/// reject invalid certificates when they use them.
pub fn certificates_from_json(text: &str) -> Result<(u32, BTreeMap<u64, SurjectivityCertificate>)> {
    let raw: RawCertificates = from_str(text)?;
    let mut out = BTreeMap::new();
    for (i, c) in raw.certificates.iter().enumerate() {
        let field = format!("certificates[{i}]");
        let cert = SurjectivityCertificate {
            center: parse_scalar(&format!("{field}.center"), &c.center)?,
            ball_exp: c.ball_exp,
            slope: parse_scalar(&format!("{field}.slope"), &c.slope)?,
            offset: parse_scalar(&format!("{field}.offset"), &c.offset)?,
        };
        if out.insert(c.residue, cert).is_some() {
            return Err(Error::parse(
                format!("{field}.residue"),
                "duplicate residue",
            ));
        }
    }
    Ok((raw.level, out))
}

pub fn verdict_to_json(report: &VerdictReport) -> String {
    let (verified, samples) = (report.verified, report.samples);
    let raw = match &report.verdict {
        AnalysisVerdict::Affine { map } => RawVerdict::Affine {
            map: raw_map(map),
            verified,
            samples,
        },
        AnalysisVerdict::DirectionConstant { ball, direction } => RawVerdict::DirectionConstant {
            ball: RawBall {
                center: strings(ball.center.entries()),
                radius_exp: ball.radius_exp,
            },
            direction: strings(direction.entries()),
            verified,
            samples,
        },
    };
    to_string(&raw)
}

pub fn verdict_from_json(text: &str) -> Result<VerdictReport> {
    let raw: RawVerdict = from_str(text)?;
    Ok(match raw {
        RawVerdict::Affine {
            map,
            verified,
            samples,
        } => VerdictReport {
            verdict: AnalysisVerdict::Affine {
                map: parse_map("map", &map)?,
            },
            verified,
            samples,
        },
        RawVerdict::DirectionConstant {
            ball,
            direction,
            verified,
            samples,
        } => VerdictReport {
            verdict: AnalysisVerdict::DirectionConstant {
                ball: Ball::new(
                    PVector::new(scalars("ball.center", &ball.center)?),
                    ball.radius_exp,
                ),
                direction: PVector::new(scalars("direction", &direction)?),
            },
            verified,
            samples,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::Budget;
    use crate::synthesis::synth_juggler;

    #[test]
    fn network_round_trip() {
        let p = Prime::new(3).unwrap();
        let map = AffineMap::new(
            Matrix::from_rows(vec![vec![Scalar::frac(1, 3), Scalar::from_int(-2)]]).unwrap(),
            vec![Scalar::frac(5, 7)],
        )
        .unwrap();
        let net = Network::from_affines(p, vec![AffineMap::identity(2), map]).unwrap();
        let text = network_to_json(&net);
        assert!(text.contains("\"1/3\"") && text.contains("\"prelu\""));
        assert_eq!(network_from_json(&text).unwrap(), net);
    }

    #[test]
    fn bad_rational_names_field() {
        let text = r#"{"prime": 2, "layers": [{"matrix": [["1", "3/0"]], "bias": ["0"], "activation": "none"}]}"#;
        match network_from_json(text).unwrap_err() {
            Error::Parse { field, .. } => assert_eq!(field, "layers[0].matrix[0][1]"),
            e => panic!("unexpected {e:?}"),
        }
        let text = r#"{"prime": 2, "layers": [{"matrix": [["2/4"]], "bias": ["0"], "activation": "none"}]}"#;
        assert!(matches!(network_from_json(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn activation_order_enforced() {
        let text = r#"{"prime": 2, "layers": [{"matrix": [["1"]], "bias": ["0"], "activation": "prelu"}]}"#;
        match network_from_json(text).unwrap_err() {
            Error::Parse { message, .. } => assert!(message.contains("layers[0].activation")),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn table_round_trip_and_duplicates() {
        let p = Prime::new(2).unwrap();
        let mut t = FunctionTable::new(p, 2, 1, 1, PVector::from_ints(&[0])).unwrap();
        t.insert(
            Coset::new(p, 1, vec![1, 0]).unwrap(),
            PVector::new(vec![Scalar::frac(-3, 4)]),
        )
        .unwrap();
        let text = table_to_json(&t);
        assert_eq!(table_from_json(&text).unwrap(), t);

        let dup = r#"{"prime": 2, "d_in": 1, "d_out": 1, "level": 1, "default": ["0"],
            "entries": [{"coset": [1], "value": ["1"]}, {"coset": [1], "value": ["2"]}]}"#;
        match table_from_json(dup).unwrap_err() {
            Error::Parse { field, .. } => assert_eq!(field, "entries[1].coset"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn certificate_round_trip() {
        let p = Prime::new(2).unwrap();
        let j = synth_juggler(p, 2, Budget::default()).unwrap();
        let text = certificates_to_json(j.level, &j.certificates);
        let (level, certs) = certificates_from_json(&text).unwrap();
        assert_eq!(level, 2);
        assert_eq!(certs, j.certificates);
    }

    #[test]
    fn verdict_round_trip() {
        let report = VerdictReport {
            verdict: AnalysisVerdict::DirectionConstant {
                ball: Ball::new(PVector::from_ints(&[1]), 1),
                direction: PVector::from_ints(&[2]),
            },
            verified: true,
            samples: 50,
        };
        let text = verdict_to_json(&report);
        assert!(text.contains("\"kind\": \"direction_constant\""));
        assert_eq!(verdict_from_json(&text).unwrap(), report);
        let report = VerdictReport {
            verdict: AnalysisVerdict::Affine {
                map: AffineMap::identity(2),
            },
            verified: true,
            samples: 50,
        };
        assert_eq!(
            verdict_from_json(&verdict_to_json(&report)).unwrap(),
            report
        );
    }
}

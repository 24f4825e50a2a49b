//! Layered pReLU networks over `Q_p`: representation, exact evaluation,
//! composition with boundary merging, and zero padding.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::padic::{prelu, PVector, Prime, Scalar};

/// `x -> matrix * x + bias`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub matrix: Matrix,
    pub bias: Vec<Scalar>,
}

impl AffineMap {
    pub fn new(matrix: Matrix, bias: Vec<Scalar>) -> Result<Self> {
        if bias.len() != matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "bias has {} entries but matrix has {} rows",
                bias.len(),
                matrix.rows()
            )));
        }
        Ok(AffineMap { matrix, bias })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            matrix: Matrix::identity(n),
            bias: vec![Scalar::zero(); n],
        }
    }

    /// Constant map `Q_p^d_in -> {value}`.
    pub fn constant(d_in: usize, value: &PVector) -> Self {
        AffineMap {
            matrix: Matrix::zeros(value.dim(), d_in),
            bias: value.entries().to_vec(),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.matrix
            .apply(x)
            .into_iter()
            .zip(&self.bias)
            .map(|(y, b)| y + b)
            .collect()
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &AffineMap) -> AffineMap {
        let matrix = self.matrix.mul(&inner.matrix);
        let bias = self.apply(&inner.bias);
        AffineMap { matrix, bias }
    }

    pub fn scale(&self, c: &Scalar) -> AffineMap {
        AffineMap {
            matrix: self.matrix.scale(c),
            bias: self.bias.iter().map(|b| b * c).collect(),
        }
    }

    /// Direct sum with identity maps on `before` leading and `after`
    /// trailing coordinates.
    fn alongside_identity(&self, before: usize, after: usize) -> AffineMap {
        let (left, right) = (Matrix::identity(before), Matrix::identity(after));
        let matrix = Matrix::block_diag(&[&left, &self.matrix, &right]);
        let mut bias = vec![Scalar::zero(); before];
        bias.extend(self.bias.iter().cloned());
        bias.extend(std::iter::repeat_n(Scalar::zero(), after));
        AffineMap { matrix, bias }
    }
}

/// Activation applied after an affine layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Prelu,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineLayer {
    pub map: AffineMap,
    pub activation: Activation,
}

/// A pReLU network `t_L ∘ Σ ∘ ... ∘ Σ ∘ t_1`.
///
/// Every layer but the last carries [`Activation::Prelu`]; the last carries
/// [`Activation::None`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    prime: Prime,
    layers: Vec<AffineLayer>,
}

impl Network {
    /// Validates the layer chain. Errors name the offending layer.
    pub fn new(prime: Prime, layers: Vec<AffineLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::DimensionMismatch("network has no layers".into()));
        }
        let last = layers.len() - 1;
        for (i, layer) in layers.iter().enumerate() {
            if layer.map.bias.len() != layer.map.matrix.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "layers[{i}].bias: length {} but matrix has {} rows",
                    layer.map.bias.len(),
                    layer.map.matrix.rows()
                )));
            }
            if layer.map.out_dim() == 0 || layer.map.in_dim() == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "layers[{i}].matrix: empty dimension"
                )));
            }
            if i > 0 && layers[i - 1].map.out_dim() != layer.map.in_dim() {
                return Err(Error::DimensionMismatch(format!(
                    "layers[{i}].matrix: {} columns but previous layer has {} rows",
                    layer.map.in_dim(),
                    layers[i - 1].map.out_dim()
                )));
            }
            let expected = if i == last {
                Activation::None
            } else {
                Activation::Prelu
            };
            if layer.activation != expected {
                return Err(Error::DimensionMismatch(format!(
                    "layers[{i}].activation: expected {expected:?}"
                )));
            }
        }
        Ok(Network { prime, layers })
    }

    /// Chains affine maps with pReLU between consecutive ones.
    pub fn from_affines(prime: Prime, maps: Vec<AffineMap>) -> Result<Self> {
        let last = maps.len().saturating_sub(1);
        let layers = maps
            .into_iter()
            .enumerate()
            .map(|(i, map)| AffineLayer {
                map,
                activation: if i == last {
                    Activation::None
                } else {
                    Activation::Prelu
                },
            })
            .collect();
        Network::new(prime, layers)
    }

    /// Single-layer identity on `Q_p^n`.
    pub fn identity(prime: Prime, n: usize) -> Self {
        Network::from_affines(prime, vec![AffineMap::identity(n)]).expect("valid identity")
    }

    /// Single-layer constant network.
    pub fn constant(prime: Prime, d_in: usize, value: &PVector) -> Self {
        Network::from_affines(prime, vec![AffineMap::constant(d_in, value)])
            .expect("valid constant")
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn layers(&self) -> &[AffineLayer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn d_in(&self) -> usize {
        self.layers[0].map.in_dim()
    }

    pub fn d_out(&self) -> usize {
        self.layers[self.layers.len() - 1].map.out_dim()
    }

    /// Dimensions `d_1, ..., d_{L-1}` of the hidden layers.
    pub fn hidden_dims(&self) -> Vec<usize> {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.map.out_dim())
            .collect()
    }

    /// Maximum hidden dimension; `max(d_in, d_out)` for a single affine layer.
    pub fn width(&self) -> usize {
        self.hidden_dims()
            .into_iter()
            .max()
            .unwrap_or_else(|| self.d_in().max(self.d_out()))
    }

    /// Total count of weights and biases.
    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.map.matrix.rows() * (l.map.matrix.cols() + 1))
            .sum()
    }

    pub fn eval(&self, x: &PVector) -> Result<PVector> {
        if x.dim() != self.d_in() {
            return Err(Error::DimensionMismatch(format!(
                "input has dimension {} but network expects {}",
                x.dim(),
                self.d_in()
            )));
        }
        let mut cur = x.entries().to_vec();
        for layer in &self.layers {
            cur = layer.map.apply(&cur);
            if layer.activation == Activation::Prelu {
                cur = cur.iter().map(|v| prelu(self.prime, v)).collect();
            }
        }
        Ok(PVector::new(cur))
    }

    /// `second ∘ self`, merging the two boundary affine maps into one layer.
    pub fn then(&self, second: &Network) -> Result<Network> {
        if self.prime != second.prime {
            return Err(Error::PrimeMismatch {
                left: self.prime.get(),
                right: second.prime.get(),
            });
        }
        if self.d_out() != second.d_in() {
            return Err(Error::DimensionMismatch(format!(
                "cannot feed {} outputs into {} inputs",
                self.d_out(),
                second.d_in()
            )));
        }
        let split = self.layers.len() - 1;
        let mut layers: Vec<AffineLayer> = self.layers[..split].to_vec();
        let boundary = &second.layers[0];
        layers.push(AffineLayer {
            map: boundary.map.after(&self.layers[split].map),
            activation: boundary.activation,
        });
        layers.extend(second.layers[1..].iter().cloned());
        Ok(Network {
            prime: self.prime,
            layers,
        })
    }

    /// Zero-pads every hidden layer to dimension `w`.
    ///
    /// A single affine layer has no hidden layer to widen and is returned
    /// unchanged.
    pub fn pad_width(&self, w: usize) -> Result<Network> {
        let minimum = self.width();
        if w < minimum {
            return Err(Error::WidthTooSmall {
                requested: w,
                minimum,
            });
        }
        let n = self.layers.len();
        let mut layers = self.layers.clone();
        for i in 0..n - 1 {
            let rows = layers[i].map.matrix.rows();
            if rows < w {
                let cols = layers[i].map.matrix.cols();
                layers[i].map.matrix = layers[i].map.matrix.padded(w, cols);
                layers[i].map.bias.resize(w, Scalar::zero());
                let next_rows = layers[i + 1].map.matrix.rows();
                layers[i + 1].map.matrix = layers[i + 1].map.matrix.padded(next_rows, w);
            }
        }
        Ok(Network {
            prime: self.prime,
            layers,
        })
    }

    /// Multiplies the final affine map by `c`.
    pub fn scale_output(&self, c: &Scalar) -> Network {
        let mut layers = self.layers.clone();
        let last = layers.len() - 1;
        layers[last].map = layers[last].map.scale(c);
        Network {
            prime: self.prime,
            layers,
        }
    }

    /// Runs `self` on a block of coordinates and passes `before` leading and
    /// `after` trailing coordinates through unchanged.
    ///
    /// Passed-through coordinates traverse the hidden pReLU layers, so the
    /// lifted network agrees with the intended map only where those
    /// coordinates lie in `Z_p`.
    pub fn alongside_identity(&self, before: usize, after: usize) -> Network {
        let layers = self
            .layers
            .iter()
            .map(|l| AffineLayer {
                map: l.map.alongside_identity(before, after),
                activation: l.activation,
            })
            .collect();
        Network {
            prime: self.prime,
            layers,
        }
    }
}

/// `eval_network`.
pub fn eval_network(net: &Network, x: &PVector) -> Result<PVector> {
    net.eval(x)
}

/// `compose(first, second)` = `second ∘ first`.
pub fn compose(first: &Network, second: &Network) -> Result<Network> {
    first.then(second)
}

/// Composes a nonempty chain left to right: `nets[k-1] ∘ ... ∘ nets[0]`.
pub fn compose_all(nets: &[Network]) -> Result<Network> {
    let (head, rest) = nets
        .split_first()
        .ok_or_else(|| Error::DimensionMismatch("empty composition".into()))?;
    let mut acc = head.clone();
    for n in rest {
        acc = acc.then(n)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Prime {
        Prime::new(2).unwrap()
    }

    fn scalar_map(a: Scalar, b: Scalar) -> AffineMap {
        AffineMap::new(Matrix::from_rows(vec![vec![a]]).unwrap(), vec![b]).unwrap()
    }

    fn half_then_identity() -> Network {
        Network::from_affines(
            p2(),
            vec![
                scalar_map(Scalar::frac(1, 2), Scalar::zero()),
                scalar_map(Scalar::one(), Scalar::zero()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = Network::identity(p2(), 1);
        let x = PVector::new(vec![Scalar::frac(7, 3)]);
        assert_eq!(id.eval(&x).unwrap(), x);
        let net = half_then_identity();
        assert_eq!(
            net.eval(&PVector::from_ints(&[1])).unwrap(),
            PVector::from_ints(&[0])
        );
        assert_eq!(
            net.eval(&PVector::from_ints(&[2])).unwrap(),
            PVector::from_ints(&[1])
        );
        assert!(matches!(
            net.eval(&PVector::from_ints(&[1, 2])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn width_examples() {
        assert_eq!(Network::identity(p2(), 1).width(), 1);
        let two = Network::from_affines(
            p2(),
            vec![
                AffineMap::new(
                    Matrix::from_int_rows(&[&[1], &[1]]),
                    vec![Scalar::zero(); 2],
                )
                .unwrap(),
                AffineMap::new(Matrix::from_int_rows(&[&[1, 1]]), vec![Scalar::zero()]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(two.width(), 2);
        let three = Network::from_affines(
            p2(),
            vec![
                AffineMap::new(Matrix::zeros(3, 2), vec![Scalar::zero(); 3]).unwrap(),
                AffineMap::new(Matrix::zeros(3, 3), vec![Scalar::zero(); 3]).unwrap(),
                AffineMap::new(Matrix::zeros(1, 3), vec![Scalar::zero()]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(three.width(), 3);
        assert_eq!(
            Network::constant(p2(), 2, &PVector::from_ints(&[1, 2, 3])).width(),
            3
        );
    }

    #[test]
    fn compose_merges_boundary() {
        let f = half_then_identity();
        let g = half_then_identity();
        let fg = compose(&f, &g).unwrap();
        assert_eq!(fg.depth(), f.depth() + g.depth() - 1);
        for x in 0..16 {
            let x = PVector::from_ints(&[x]);
            assert_eq!(fg.eval(&x).unwrap(), g.eval(&f.eval(&x).unwrap()).unwrap());
        }
        let id = Network::identity(p2(), 1);
        assert_eq!(
            compose(&id, &g)
                .unwrap()
                .eval(&PVector::from_ints(&[6]))
                .unwrap(),
            g.eval(&PVector::from_ints(&[6])).unwrap()
        );
        let wide = Network::identity(p2(), 2);
        assert!(compose(&f, &wide).is_err());
    }

    #[test]
    fn pad_preserves_values() {
        let net = half_then_identity();
        let padded = net.pad_width(3).unwrap();
        assert_eq!(padded.hidden_dims(), vec![3]);
        assert_eq!(padded.width(), 3);
        for x in -4..12 {
            let x = PVector::from_ints(&[x]);
            assert_eq!(padded.eval(&x).unwrap(), net.eval(&x).unwrap());
        }
        assert_eq!(net.pad_width(1).unwrap(), net);
        let narrow = Network::from_affines(
            p2(),
            vec![
                AffineMap::new(Matrix::zeros(2, 1), vec![Scalar::zero(); 2]).unwrap(),
                AffineMap::new(Matrix::zeros(1, 2), vec![Scalar::zero()]).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(
            narrow.pad_width(1),
            Err(Error::WidthTooSmall {
                requested: 1,
                minimum: 2
            })
        ));
    }

    #[test]
    fn validation_names_layer() {
        let bad = vec![
            AffineLayer {
                map: scalar_map(Scalar::one(), Scalar::zero()),
                activation: Activation::None,
            },
            AffineLayer {
                map: scalar_map(Scalar::one(), Scalar::zero()),
                activation: Activation::None,
            },
        ];
        let err = Network::new(p2(), bad).unwrap_err();
        assert!(err.to_string().contains("layers[0].activation"));
    }
}

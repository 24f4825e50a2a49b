//! Exact p-adic pReLU networks.
//!
//! `padicnet` compiles locally constant functions `Z_p^d_in -> Q_p^d_out`
//! into pReLU networks of minimal width and analyzes arbitrary pReLU
//! networks for the affine-or-direction-constant dichotomy. All arithmetic
//! is on exact rationals, so every check is an equality.
//!
//! * [`padic`]: scalars, valuations, vectors, balls, cosets, interleaving.
//! * [`functions`]: coset tables and exact Haar `L_q` norms.
//! * [`network`]: layered networks, evaluation, composition, padding.
//! * [`synthesis`]: the width-optimal constructions and their certificates.
//! * [`analysis`]: affine prefixes, disjoint balls, direction constancy and
//!   separation bounds.
//! * [`json`]: the on-disk artifact formats.
//! * [`cli`]: the `padicnet` command-line front end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod functions;
pub mod json;
pub mod linalg;
pub mod network;
pub mod padic;
pub mod synthesis;

pub use error::{Error, Result};
pub use functions::{FunctionTable, NormOrder, NormReport};
pub use network::{Activation, AffineLayer, AffineMap, Network};
pub use padic::{Ball, Budget, Coset, PVector, Prime, Scalar, Valuation};

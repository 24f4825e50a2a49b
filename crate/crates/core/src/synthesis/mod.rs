//! Compilers from finite data to pReLU networks of the minimal widths.
//!
//! | network                      | width              |
//! |------------------------------|--------------------|
//! | point move, interpolation    | 2                  |
//! | coset collapse and rounding  | 2                  |
//! | encoder `Z_p^d -> Z_p`       | `d + 1`            |
//! | juggler `x -> (x, g(x))`     | 2                  |
//! | decoder `Z_p -> Z_p^d`       | `d`                |
//! | exact scalar synthesis       | `<= d_in + 1`      |
//! | approximation                | `<= max(d_in + 1, d_out)` |

mod encoder;
mod exact;
mod interpolate;
mod juggler;

pub use encoder::{encoder_value, synth_coset_collapse, synth_coset_rounding, synth_encoder};
pub use exact::{synth_approximator, synth_locally_constant, Approximation};
pub use interpolate::{synth_disjoint_interp, synth_finite_interp, synth_point_move};
pub use juggler::{
    check_affine_surjectivity, decode_search, decode_with_certificates, refine_ball, synth_decoder,
    synth_juggler, CertificateEvent, DecoderArtifact, JugglerArtifact, SurjectivityCertificate,
};

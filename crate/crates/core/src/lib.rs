//! Eight-dimensional reconciliation of Gaussian-correlated data for
//! continuous-variable QKD.
//!
//! - [`algebra`]: anticommuting signed-permutation families and the rotations
//!   they generate.
//! - [`spherical`]: binary words on the sphere and Gaussian block
//!   normalization.
//! - [`ldpc`]: parity-check matrices and coset belief-propagation decoding.
//! - [`channel`]: the Gaussian channel model and its simulation.
//! - [`reconciliation`]: side information, the virtual channel and the
//!   end-to-end pipeline.
//! - [`keyrate`]: Holevo bound and secret key rates versus distance.

pub mod algebra;
pub mod channel;
pub mod keyrate;
pub mod ldpc;
pub mod reconciliation;
pub mod spherical;
pub mod stats;

pub use algebra::{build_family, OrthoFamily, RotationCoeffs, SignedPermMatrix};
pub use channel::{ChannelParams, CorrelatedSamples};
pub use keyrate::{DetectorModel, Efficiency, KeyRateInputs};
pub use ldpc::{decode_bp, DecodeResult, LlrFrame, ParityCheckMatrix};
pub use reconciliation::{Direction, ReconciliationResult, SideInfo};
pub use spherical::{Frame, SphericalCodeword};

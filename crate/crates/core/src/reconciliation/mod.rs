//! Multidimensional reconciliation over the virtual binary channel.
//!
//! The key holder draws a uniformly random key word, splits it into `d`-bit
//! words `u_k`, and for each of its own normalized frames `ŷ_k` publishes the
//! coefficients `α(ŷ_k, u_k)` of the rotation `M` with `M ŷ_k = u_k`, the
//! frame norm `|y_k|`, the key word's syndrome and a digest. The other party
//! applies `M` to its correlated frame `x_k`. Since
//!
//! ```text
//! x_k = c·y_k + w_k,   w_k ~ N(0, σ_w² I)
//! ```
//!
//! and `M` is orthogonal, `M x_k = c|y_k|·u_k + M w_k` with `M w_k` again
//! white Gaussian of variance `σ_w²`: a BPSK channel with amplitude
//! `c|y_k|/√d` per coordinate.
//!
//! With reverse reconciliation the key holder is Bob (data `y`) and `c`, `σ_w²`
//! describe the conditional law of Alice's `x` given `y`; with direct
//! reconciliation the roles swap.

mod oracle;
mod wire;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, OrthoFamily, RotationCoeffs};
use crate::channel::{self, mutual_information, snr, ChannelError, ChannelParams};
use crate::ldpc::{BpDecoder, LdpcError, LlrFrame, ParityCheckMatrix, DEFAULT_MAX_ITER};
use crate::spherical::{bits_to_sphere, normalize, SphericalError};

pub use oracle::{haar_orthogonal, mediator_reflection, random_orthogonal_oracle};
pub use wire::{digest_key, key_digest, WireError};

/// Frame dimension used by the protocol.
pub const FRAME_DIM: usize = 8;
/// Size of the published key digest.
pub const DIGEST_BITS: usize = 64;

#[derive(Debug, Error)]
pub enum ReconciliationError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Ldpc(#[from] LdpcError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Spherical(#[from] SphericalError),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("{what}: expected {expected}, got {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("side information belongs to code {found:#018x}, not {expected:#018x}")]
    CodeMismatch { expected: u64, found: u64 },
    #[error("invalid noise model: {0}")]
    NoiseModel(String),
}

type Result<T> = std::result::Result<T, ReconciliationError>;

/// Which party's data the key is extracted from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Bob holds the key and publishes the side information.
    #[default]
    Reverse,
    /// Alice holds the key.
    Direct,
}

impl Direction {
    /// `(key holder's samples, decoding party's samples)`.
    pub fn split<'a>(&self, samples: &'a channel::CorrelatedSamples) -> (&'a [f64], &'a [f64]) {
        match self {
            Direction::Reverse => (&samples.y, &samples.x),
            Direction::Direct => (&samples.x, &samples.y),
        }
    }
}

/// Public data of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSide {
    pub alpha: RotationCoeffs,
    /// Norm of the key holder's frame; 0 for a discarded frame.
    pub norm: f64,
}

impl FrameSide {
    /// Slot of a frame the key holder could not normalize.
    pub fn discarded(dim: usize) -> Self {
        Self {
            alpha: RotationCoeffs::new(vec![0.0; dim]),
            norm: 0.0,
        }
    }

    pub fn is_discarded(&self) -> bool {
        self.norm == 0.0
    }
}

/// Everything the key holder discloses for one codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct SideInfo {
    pub dim: usize,
    /// Fingerprint of the parity-check matrix.
    pub code_id: u64,
    pub frames: Vec<FrameSide>,
    pub syndrome: Vec<u8>,
    pub digest: u64,
}

impl SideInfo {
    pub fn discarded(&self) -> usize {
        self.frames.iter().filter(|f| f.is_discarded()).count()
    }

    /// Bits disclosed about the key word. The rotation coefficients are
    /// independent of it and the norms do not depend on the key.
    pub fn leakage_bits(&self) -> usize {
        self.syndrome.len() + DIGEST_BITS
    }
}

/// Per-frame rotation coefficients for a key word. Frames that cannot be
/// normalized get a [`FrameSide::discarded`] slot.
pub fn frame_side_info(family: &OrthoFamily, key: &[u8], local: &[f64]) -> Result<Vec<FrameSide>> {
    let d = family.dim();
    if key.len() != local.len() {
        return Err(ReconciliationError::LengthMismatch {
            what: "samples per key bit",
            expected: key.len(),
            found: local.len(),
        });
    }
    if !key.len().is_multiple_of(d) {
        return Err(ReconciliationError::LengthMismatch {
            what: "key length modulo the frame dimension",
            expected: 0,
            found: key.len() % d,
        });
    }
    local
        .par_chunks(d)
        .zip(key.par_chunks(d))
        .map(|(raw, bits)| match normalize(raw) {
            Ok(frame) => {
                let u = bits_to_sphere(bits)?;
                Ok(FrameSide {
                    alpha: family.rotation_coeffs(&frame.unit, &u.coords)?,
                    norm: frame.norm,
                })
            }
            Err(SphericalError::DegenerateFrame(_)) => Ok(FrameSide::discarded(d)),
            Err(e) => Err(e.into()),
        })
        .collect()
}

/// Side information for `key` (a word of the code's length) given the key
/// holder's samples `local`.
pub fn encode_side_info(
    family: &OrthoFamily,
    code: &ParityCheckMatrix,
    key: &[u8],
    local: &[f64],
) -> Result<SideInfo> {
    if key.len() != code.n_vars() {
        return Err(ReconciliationError::LengthMismatch {
            what: "key length",
            expected: code.n_vars(),
            found: key.len(),
        });
    }
    let frames = frame_side_info(family, key, local)?;
    let code_id = code.fingerprint();
    Ok(SideInfo {
        dim: family.dim(),
        code_id,
        frames,
        syndrome: code.syndrome(key)?,
        digest: key_digest(key, digest_key(code_id)),
    })
}

/// Linear model `remote = gain · local + noise` of the decoding party's data
/// given the key holder's, with white noise of variance `noise_variance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub gain: f64,
    pub noise_variance: f64,
}

impl NoiseModel {
    pub fn new(gain: f64, noise_variance: f64) -> Result<Self> {
        if !(gain.is_finite() && gain > 0.0) {
            return Err(ReconciliationError::NoiseModel(format!("gain {gain} must be positive")));
        }
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(ReconciliationError::NoiseModel(format!(
                "noise variance {noise_variance} must be positive"
            )));
        }
        Ok(Self { gain, noise_variance })
    }

    /// Model implied by the channel parameters.
    pub fn analytic(params: &ChannelParams, direction: Direction) -> Result<Self> {
        params.validate()?;
        let g = params.gain_squared().sqrt();
        let noise = params.noise_variance();
        match direction {
            Direction::Direct => Self::new(g, noise),
            Direction::Reverse => {
                let var_y = g * g * params.v_a + noise;
                Self::new(g * params.v_a / var_y, params.v_a * noise / var_y)
            }
        }
    }

    /// Least-squares fit from pilot frames whose key words are known to the
    /// decoding party: regresses `M x_k` on `|y_k| u_k`.
    pub fn calibrate(
        family: &OrthoFamily,
        pilots: &[FrameSide],
        pilot_key: &[u8],
        remote: &[f64],
    ) -> Result<Self> {
        let d = family.dim();
        check_frames(pilots.len(), d, pilot_key.len(), "pilot key length")?;
        check_frames(pilots.len(), d, remote.len(), "pilot samples")?;
        let mut rotated = vec![0.0; d];
        let (mut sxy, mut sxx, mut pairs) = (0.0, 0.0, Vec::new());
        for ((side, bits), raw) in pilots.iter().zip(pilot_key.chunks(d)).zip(remote.chunks(d)) {
            if side.is_discarded() {
                continue;
            }
            family.apply_rotation_into(&side.alpha, raw, &mut rotated)?;
            let u = bits_to_sphere(bits)?;
            for (&t, &ui) in rotated.iter().zip(&u.coords) {
                let s = side.norm * ui;
                sxy += t * s;
                sxx += s * s;
                pairs.push((t, s));
            }
        }
        if pairs.len() < 2 {
            return Err(ReconciliationError::NoiseModel("not enough pilot frames".into()));
        }
        let gain = sxy / sxx;
        let rss: f64 = pairs.iter().map(|(t, s)| (t - gain * s).powi(2)).sum();
        Self::new(gain, rss / (pairs.len() - 1) as f64)
    }

    /// Noise variance of the virtual BPSK channel of a frame with key-holder
    /// norm `norm`, normalized to unit-norm codewords.
    pub fn virtual_variance(&self, norm: f64) -> f64 {
        self.noise_variance / (self.gain * norm).powi(2)
    }

    /// Factor turning a rotated coordinate `(M x)_i` into its LLR for a frame
    /// of dimension `dim`: `2 c |y| / (√d σ_w²)`.
    pub fn llr_scale(&self, norm: f64, dim: usize) -> f64 {
        2.0 * self.gain * norm / ((dim as f64).sqrt() * self.noise_variance)
    }
}

fn check_frames(frames: usize, d: usize, found: usize, what: &'static str) -> Result<()> {
    if frames * d != found {
        return Err(ReconciliationError::LengthMismatch {
            what,
            expected: frames * d,
            found,
        });
    }
    Ok(())
}

/// Channel LLRs of the key word as seen by the decoding party. Positions in
/// discarded frames get LLR 0.
///
/// The rotation is applied to the raw remote frame: `M x = |x| · M x̂`, so no
/// normalization of the remote data is needed.
pub fn decode_side_info(
    family: &OrthoFamily,
    side: &SideInfo,
    remote: &[f64],
    noise: &NoiseModel,
) -> Result<LlrFrame> {
    let d = family.dim();
    if side.dim != d {
        return Err(ReconciliationError::LengthMismatch {
            what: "frame dimension",
            expected: d,
            found: side.dim,
        });
    }
    check_frames(side.frames.len(), d, remote.len(), "remote samples")?;
    let mut values = vec![0.0; remote.len()];
    values
        .par_chunks_mut(d)
        .zip(remote.par_chunks(d))
        .zip(side.frames.par_iter())
        .try_for_each(|((out, raw), frame)| -> Result<()> {
            if frame.is_discarded() {
                return Ok(());
            }
            family.apply_rotation_into(&frame.alpha, raw, out)?;
            let scale = noise.llr_scale(frame.norm, d);
            out.iter_mut().for_each(|v| *v *= scale);
            Ok(())
        })?;
    LlrFrame::new(values).ok_or_else(|| ReconciliationError::NoiseModel("NaN log-likelihood ratio".into()))
}

/// `R / I(SNR)`: the fraction of the mutual information kept as key.
pub fn efficiency(code: &ParityCheckMatrix, params: &ChannelParams) -> f64 {
    code.rate() / mutual_information(snr(params))
}

/// How the decoding party obtains the virtual channel model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseEstimate {
    /// From the channel parameters.
    #[default]
    Analytic,
    /// Fitted on pilot frames with disclosed key words.
    Calibrated { pilot_frames: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub direction: Direction,
    pub max_iter: usize,
    pub noise: NoiseEstimate,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            direction: Direction::Reverse,
            max_iter: DEFAULT_MAX_ITER,
            noise: NoiseEstimate::Analytic,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconciliationResult {
    /// The decoding party's estimate of the key word.
    pub key_bits: Vec<u8>,
    pub frames_used: usize,
    pub discarded: usize,
    /// Decoder failed to converge or the digest did not match.
    pub frame_error: bool,
    pub iterations: usize,
    pub leakage_bits: usize,
    pub beta: f64,
}

/// Deterministic sub-seed for stream `tag` of a run.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    digest_key(seed ^ tag.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Tags 0 and 1 are reserved for pilots; codeword `j` uses `2j + 2` and
/// `2j + 3`.
fn codeword_seeds(seed: u64, index: u64) -> (u64, u64) {
    (derive_seed(seed, 2 * index + 2), derive_seed(seed, 2 * index + 3))
}

fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.random::<bool>())).collect()
}

/// Noise model for a run, estimated from pilots when requested.
pub fn noise_model_for(
    family: &OrthoFamily,
    params: &ChannelParams,
    options: &RunOptions,
    seed: u64,
) -> Result<NoiseModel> {
    match options.noise {
        NoiseEstimate::Analytic => NoiseModel::analytic(params, options.direction),
        NoiseEstimate::Calibrated { pilot_frames } => {
            let d = family.dim();
            let n = pilot_frames * d;
            let samples = channel::simulate(params, n, derive_seed(seed, 0));
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1));
            let key = random_bits(&mut rng, n);
            let (local, remote) = options.direction.split(&samples);
            let pilots = frame_side_info(family, &key, local)?;
            NoiseModel::calibrate(family, &pilots, &key, remote)
        }
    }
}

struct Codeword<'a> {
    family: &'a OrthoFamily,
    code: &'a ParityCheckMatrix,
    params: &'a ChannelParams,
    options: &'a RunOptions,
    noise: NoiseModel,
}

impl Codeword<'_> {
    /// Runs codeword `index`; also returns whether the decoded key is actually
    /// correct, which only a simulation can know.
    fn run(&self, decoder: &mut BpDecoder, seed: u64, index: u64) -> Result<(ReconciliationResult, bool)> {
        let n = self.code.n_vars();
        let (sample_seed, key_seed) = codeword_seeds(seed, index);
        let samples = channel::simulate(self.params, n, sample_seed);
        let key = random_bits(&mut ChaCha8Rng::seed_from_u64(key_seed), n);
        let (local, remote) = self.options.direction.split(&samples);

        let side = encode_side_info(self.family, self.code, &key, local)?;
        let llr = decode_side_info(self.family, &side, remote, &self.noise)?;
        let decoded = decoder.decode(&llr, &side.syndrome, self.options.max_iter)?;
        let digest_ok = key_digest(&decoded.bits, digest_key(self.code.fingerprint())) == side.digest;
        let correct = decoded.bits == key;
        Ok((
            ReconciliationResult {
                frames_used: side.frames.len() - side.discarded(),
                discarded: side.discarded(),
                frame_error: !(decoded.converged && digest_ok),
                iterations: decoded.iterations,
                leakage_bits: side.leakage_bits(),
                beta: efficiency(self.code, self.params),
                key_bits: decoded.bits,
            },
            correct,
        ))
    }
}

fn check_code(family: &OrthoFamily, code: &ParityCheckMatrix) -> Result<()> {
    if !code.n_vars().is_multiple_of(family.dim()) {
        return Err(ReconciliationError::LengthMismatch {
            what: "code length modulo the frame dimension",
            expected: 0,
            found: code.n_vars() % family.dim(),
        });
    }
    Ok(())
}

/// One codeword of reverse reconciliation with the analytic noise model:
/// simulate, publish side information, decode and check the digest.
pub fn run_reverse_reconciliation(
    params: &ChannelParams,
    code: &ParityCheckMatrix,
    frame_count: usize,
    seed: u64,
) -> Result<ReconciliationResult> {
    let family = OrthoFamily::new(FRAME_DIM)?;
    if frame_count * FRAME_DIM != code.n_vars() {
        return Err(ReconciliationError::LengthMismatch {
            what: "code length for the frame count",
            expected: frame_count * FRAME_DIM,
            found: code.n_vars(),
        });
    }
    let options = RunOptions::default();
    let job = Codeword {
        family: &family,
        code,
        params,
        options: &options,
        noise: noise_model_for(&family, params, &options, seed)?,
    };
    Ok(job.run(&mut BpDecoder::new(code), seed, 0)?.0)
}

/// Outcome of many independent codewords at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct FerReport {
    pub snr: f64,
    pub codewords: usize,
    pub frame_errors: usize,
    /// Codewords accepted by the digest check whose key was nevertheless
    /// wrong.
    pub undetected_errors: usize,
    pub discarded_frames: usize,
    pub mean_iterations: f64,
    pub beta: f64,
    pub leakage_bits: usize,
    pub noise: NoiseModel,
}

impl FerReport {
    pub fn fer(&self) -> f64 {
        self.frame_errors as f64 / self.codewords as f64
    }
}

/// Frame error rate over `codewords` independent runs. Codewords are seeded
/// individually, so the report depends only on the arguments.
pub fn simulate_fer(
    params: &ChannelParams,
    code: &ParityCheckMatrix,
    codewords: usize,
    options: &RunOptions,
    seed: u64,
) -> Result<FerReport> {
    let family = OrthoFamily::new(FRAME_DIM)?;
    check_code(&family, code)?;
    let job = Codeword {
        family: &family,
        code,
        params,
        options,
        noise: noise_model_for(&family, params, options, seed)?,
    };
    let runs: Vec<(ReconciliationResult, bool)> = (0..codewords as u64)
        .into_par_iter()
        .map_init(|| BpDecoder::new(code), |dec, j| job.run(dec, seed, j))
        .collect::<Result<_>>()?;
    let frame_errors = runs.iter().filter(|(r, _)| r.frame_error).count();
    Ok(FerReport {
        snr: snr(params),
        codewords,
        frame_errors,
        undetected_errors: runs.iter().filter(|(r, ok)| !r.frame_error && !ok).count(),
        discarded_frames: runs.iter().map(|(r, _)| r.discarded).sum(),
        mean_iterations: runs.iter().map(|(r, _)| r.iterations as f64).sum::<f64>() / codewords.max(1) as f64,
        beta: efficiency(code, params),
        leakage_bits: code.n_checks() + DIGEST_BITS,
        noise: job.noise,
    })
}

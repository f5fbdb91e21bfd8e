//! Frame error rate of coset decoding over a binary-input AWGN channel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{BpDecoder, LdpcError, LlrFrame, ParityCheckMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FerStats {
    pub snr: f64,
    pub frames: usize,
    /// Frames not converged, or converged to a word other than the one sent.
    pub failures: usize,
    pub mean_iterations: f64,
}

impl FerStats {
    pub fn fer(&self) -> f64 {
        self.failures as f64 / self.frames as f64
    }
}

/// Sends uniformly random words as `±1` over noise of variance `1/snr` and
/// decodes each toward its own syndrome. Frame `i` draws from stream `i` of
/// a ChaCha generator seeded with `seed`.
pub fn biawgn_fer(
    code: &ParityCheckMatrix,
    snr: f64,
    frames: usize,
    max_iter: usize,
    seed: u64,
) -> Result<FerStats, LdpcError> {
    let sigma2 = 1.0 / snr;
    let sigma = sigma2.sqrt();
    let n = code.n_vars();
    let outcomes: Vec<(bool, usize)> = (0..frames as u64)
        .into_par_iter()
        .map_init(
            || BpDecoder::new(code),
            |decoder, frame| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(frame);
                let word: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
                let llr = word
                    .iter()
                    .map(|&b| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        let x = if b == 0 { 1.0 } else { -1.0 };
                        2.0 * (x + sigma * z) / sigma2
                    })
                    .collect();
                let target = code.syndrome_unchecked(&word);
                let llr = LlrFrame::new(llr).expect("finite noise");
                let r = decoder.decode(&llr, &target, max_iter)?;
                Ok((r.converged && r.bits == word, r.iterations))
            },
        )
        .collect::<Result<_, LdpcError>>()?;
    Ok(FerStats {
        snr,
        frames,
        failures: outcomes.iter().filter(|(ok, _)| !ok).count(),
        mean_iterations: outcomes.iter().map(|&(_, it)| it as f64).sum::<f64>() / frames.max(1) as f64,
    })
}

//! Gaussian-modulated coherent-state channel with homodyne detection, in
//! shot-noise units.
//!
//! Bob's quadrature is `y = √(Tη)·x + z` with `x ~ N(0, V_A)` and
//! `z ~ N(0, 1 + Tηξ + V_elec)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_LOSS_DB_PER_KM: f64 = 0.2;

/// Samples per independently seeded generator stream in [`simulate`].
const BLOCK: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid channel parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    /// Modulation variance `V_A`.
    pub v_a: f64,
    /// Channel transmission `T ∈ (0, 1]`.
    pub transmission: f64,
    /// Excess noise referred to the channel input.
    pub xi: f64,
    /// Homodyne detector efficiency `η ∈ (0, 1]`.
    pub eta: f64,
    /// Electronic noise of the detector.
    pub v_elec: f64,
    #[serde(default = "default_loss")]
    pub loss_db_per_km: f64,
}

fn default_loss() -> f64 {
    DEFAULT_LOSS_DB_PER_KM
}

impl ChannelParams {
    /// Detector and excess-noise figures of the reference experimental setup,
    /// with a lossless channel and unit modulation variance.
    pub fn experimental() -> Self {
        Self {
            v_a: 1.0,
            transmission: 1.0,
            xi: 0.005,
            eta: 0.606,
            v_elec: 0.041,
            loss_db_per_km: DEFAULT_LOSS_DB_PER_KM,
        }
    }

    /// Ideal lossless, noiseless channel with perfect detection.
    pub fn ideal(v_a: f64) -> Self {
        Self {
            v_a,
            transmission: 1.0,
            xi: 0.0,
            eta: 1.0,
            v_elec: 0.0,
            loss_db_per_km: DEFAULT_LOSS_DB_PER_KM,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let check = |name, value: f64, ok: bool, reason| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(ChannelError::InvalidParameter { name, value, reason })
            }
        };
        check("v_a", self.v_a, self.v_a >= 0.0, "must be non-negative")?;
        check(
            "transmission",
            self.transmission,
            self.transmission > 0.0 && self.transmission <= 1.0,
            "must lie in (0, 1]",
        )?;
        check("xi", self.xi, self.xi >= 0.0, "must be non-negative")?;
        check("eta", self.eta, self.eta > 0.0 && self.eta <= 1.0, "must lie in (0, 1]")?;
        check("v_elec", self.v_elec, self.v_elec >= 0.0, "must be non-negative")?;
        check(
            "loss_db_per_km",
            self.loss_db_per_km,
            self.loss_db_per_km >= 0.0,
            "must be non-negative",
        )
    }

    /// Same parameters with the transmission of `km` kilometres of fibre.
    pub fn at_distance(self, km: f64) -> Self {
        Self {
            transmission: transmission_at(km, self.loss_db_per_km),
            ..self
        }
    }

    /// Same parameters with `V_A` chosen so that [`snr`] equals `target`.
    pub fn with_snr(self, target: f64) -> Self {
        Self {
            v_a: target * self.noise_variance() / self.gain_squared(),
            ..self
        }
    }

    /// `Tη`, the power gain seen by Bob.
    pub fn gain_squared(&self) -> f64 {
        self.transmission * self.eta
    }

    /// Variance of Bob's noise, `1 + Tηξ + V_elec`.
    pub fn noise_variance(&self) -> f64 {
        1.0 + self.gain_squared() * self.xi + self.v_elec
    }
}

/// `T = 10^(-loss·km/10)`.
pub fn transmission_at(km: f64, loss_db_per_km: f64) -> f64 {
    10f64.powf(-loss_db_per_km * km / 10.0)
}

pub fn snr(params: &ChannelParams) -> f64 {
    params.gain_squared() * params.v_a / params.noise_variance()
}

/// `½ log₂(1 + SNR)` bits per channel use.
pub fn mutual_information(snr: f64) -> f64 {
    0.5 * snr.ln_1p() / std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedSamples {
    /// Alice's modulation values.
    pub x: Vec<f64>,
    /// Bob's homodyne outcomes.
    pub y: Vec<f64>,
}

impl CorrelatedSamples {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Draws `n` correlated pairs. Samples are generated in fixed-size blocks,
/// each from its own stream of a ChaCha generator seeded with `seed`, so the
/// output depends only on `(params, n, seed)`.
pub fn simulate(params: &ChannelParams, n: usize, seed: u64) -> CorrelatedSamples {
    let gain = params.gain_squared().sqrt();
    let sd_x = params.v_a.sqrt();
    let sd_z = params.noise_variance().sqrt();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    x.par_chunks_mut(BLOCK)
        .zip(y.par_chunks_mut(BLOCK))
        .enumerate()
        .for_each(|(block, (xs, ys))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block as u64);
            for (xi, yi) in xs.iter_mut().zip(ys.iter_mut()) {
                let a: f64 = StandardNormal.sample(&mut rng);
                let z: f64 = StandardNormal.sample(&mut rng);
                *xi = sd_x * a;
                *yi = gain * *xi + sd_z * z;
            }
        });
    CorrelatedSamples { x, y }
}

/// Sample moments of a set of pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMoments {
    pub var_x: f64,
    pub var_y: f64,
    pub cov: f64,
}

impl PairMoments {
    pub fn of(samples: &CorrelatedSamples) -> Self {
        let n = samples.len() as f64;
        let mx = samples.x.iter().sum::<f64>() / n;
        let my = samples.y.iter().sum::<f64>() / n;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for (&a, &b) in samples.x.iter().zip(&samples.y) {
            let (da, db) = (a - mx, b - my);
            sxx += da * da;
            syy += db * db;
            sxy += da * db;
        }
        Self {
            var_x: sxx / (n - 1.0),
            var_y: syy / (n - 1.0),
            cov: sxy / (n - 1.0),
        }
    }

    pub fn correlation(&self) -> f64 {
        self.cov / (self.var_x * self.var_y).sqrt()
    }

    /// Signal-to-noise ratio of the linear fit `y ≈ g·x`.
    pub fn snr(&self) -> f64 {
        let rho2 = self.correlation().powi(2);
        rho2 / (1.0 - rho2)
    }

    /// `-½ log₂(1 - ρ²)`, the mutual information of a Gaussian pair with
    /// correlation ρ.
    pub fn mutual_information(&self) -> f64 {
        -0.5 * (1.0 - self.correlation().powi(2)).log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_point() -> ChannelParams {
        ChannelParams::experimental().at_distance(25.0).with_snr(0.5)
    }

    #[test]
    fn ideal_snr() {
        assert_eq!(snr(&ChannelParams::ideal(2.0)), 2.0);
    }

    #[test]
    fn mutual_information_values() {
        assert_eq!(mutual_information(0.0), 0.0);
        assert!((mutual_information(3.0) - 1.0).abs() < 1e-15);
        // ½ log₂ 1.5 = 0.292481250360578
        assert!((mutual_information(0.5) - 0.292_481_250_360_578).abs() < 1e-12);
    }

    #[test]
    fn snr_inversion() {
        let p = reference_point();
        assert!((snr(&p) - 0.5).abs() < 1e-12);
        let t = 10f64.powf(-0.5);
        assert!((p.transmission - t).abs() < 1e-15);
        let expected_va = 0.5 * (1.0 + t * 0.606 * 0.005 + 0.041) / (t * 0.606);
        assert!((p.v_a - expected_va).abs() < 1e-12);
    }

    #[test]
    fn snr_shape() {
        let p = ChannelParams::experimental().at_distance(20.0);
        let lo = ChannelParams { v_a: 1.0, ..p };
        let hi = ChannelParams { v_a: 2.0, ..p };
        assert!(snr(&hi) > snr(&lo));
        let noisy = ChannelParams { xi: 0.1, ..p };
        assert!(snr(&noisy) < snr(&p));
    }

    #[test]
    fn validation() {
        assert!(ChannelParams::experimental().validate().is_ok());
        let bad = ChannelParams {
            transmission: 0.0,
            ..ChannelParams::experimental()
        };
        assert!(bad.validate().is_err());
        let bad = ChannelParams {
            eta: 1.5,
            ..ChannelParams::experimental()
        };
        assert!(bad.validate().is_err());
        let bad = ChannelParams {
            xi: -0.1,
            ..ChannelParams::experimental()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let p = reference_point();
        let a = simulate(&p, 200_000, 11);
        let b = simulate(&p, 200_000, 11);
        let c = simulate(&p, 200_000, 12);
        assert_eq!(a, b);
        assert_ne!(a.x, c.x);
        // prefixes agree: blocks do not depend on the total length
        let short = simulate(&p, 1000, 11);
        assert_eq!(short.x[..], a.x[..1000]);
    }

    #[test]
    fn lossless_limit_leaves_shot_noise() {
        let p = ChannelParams::ideal(3.0);
        let n = 1_000_000;
        let s = simulate(&p, n, 5);
        let diff: Vec<f64> = s.x.iter().zip(&s.y).map(|(a, b)| b - a).collect();
        let mean = diff.iter().sum::<f64>() / n as f64;
        let var = diff.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        // sampling sd of a unit-variance Gaussian variance estimate: √(2/n)
        assert!((var - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt(), "{var}");
    }

    #[test]
    fn output_variance() {
        let p = reference_point();
        let n = 1_000_000;
        let m = PairMoments::of(&simulate(&p, n, 9));
        let expected = p.gain_squared() * p.v_a + p.noise_variance();
        assert!((m.var_y - expected).abs() < 3.0 * expected * (2.0 / n as f64).sqrt());
        assert!((m.var_x - p.v_a).abs() < 3.0 * p.v_a * (2.0 / n as f64).sqrt());
    }
}

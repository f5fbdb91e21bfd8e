//! Secret key rates under collective Gaussian attacks, for reverse
//! reconciliation with homodyne detection.
//!
//! Eve's information is the Holevo quantity `χ_BE = S(E) - S(E|y_B)` of the
//! entangling-cloner attack. The detector's inefficiency and electronic noise
//! are either trusted (outside Eve's control) or attributed to the channel.

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{mutual_information, snr, ChannelParams};

#[derive(Debug, Error)]
pub enum KeyRateError {
    #[error("non-physical covariance matrix: {0}")]
    NonPhysical(String),
    #[error("invalid key rate input: {0}")]
    InvalidInput(String),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Who controls the detector's inefficiency and electronic noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorModel {
    /// Calibrated noise, inaccessible to Eve.
    #[default]
    Trusted,
    /// Detector losses and noise are treated as part of the channel.
    Untrusted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateInputs {
    pub params: ChannelParams,
    pub beta: f64,
    pub detector: DetectorModel,
}

impl KeyRateInputs {
    pub fn new(params: ChannelParams, beta: f64) -> Self {
        Self {
            params,
            beta,
            detector: DetectorModel::Trusted,
        }
    }
}

/// `G(x) = (x+1) log₂(x+1) - x log₂ x`, the entropy of a thermal state with
/// mean photon number `x`.
pub fn g_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

/// Contribution of one symplectic eigenvalue `λ ≥ 1`.
fn mode_entropy(lambda: f64) -> Result<f64, KeyRateError> {
    const SLACK: f64 = 1e-9;
    if !lambda.is_finite() || lambda < 1.0 - SLACK {
        return Err(KeyRateError::NonPhysical(format!(
            "symplectic eigenvalue {lambda} below the vacuum level"
        )));
    }
    Ok(g_entropy((lambda - 1.0) / 2.0))
}

/// Both symplectic eigenvalues from the invariants `λ₁² + λ₂² = a`,
/// `λ₁² λ₂² = b`.
fn eigen_pair(a: f64, b: f64) -> Result<(f64, f64), KeyRateError> {
    let mut disc = a * a - 4.0 * b;
    if disc < 0.0 {
        if disc < -1e-10 * a * a {
            return Err(KeyRateError::NonPhysical(format!(
                "negative discriminant {disc} (A = {a}, B = {b})"
            )));
        }
        disc = 0.0;
    }
    let root = disc.sqrt();
    let hi = (0.5 * (a + root)).max(0.0).sqrt();
    let lo = (0.5 * (a - root)).max(0.0).sqrt();
    Ok((hi, lo))
}

/// Effective (transmission, excess noise, χ_hom) triple for the chosen
/// detector model.
fn effective(params: &ChannelParams, detector: DetectorModel) -> (f64, f64, f64) {
    let ChannelParams {
        transmission: t,
        xi,
        eta,
        v_elec,
        ..
    } = *params;
    match detector {
        DetectorModel::Trusted => (t, xi, (1.0 + v_elec) / eta - 1.0),
        // the whole detector becomes part of the channel
        DetectorModel::Untrusted => (t * eta, xi + v_elec / (t * eta), 0.0),
    }
}

/// Holevo bound `χ_BE` in bits per channel use.
pub fn holevo_bound(params: &ChannelParams, detector: DetectorModel) -> Result<f64, KeyRateError> {
    params
        .validate()
        .map_err(|e| KeyRateError::InvalidInput(e.to_string()))?;
    let (t, xi, chi_hom) = effective(params, detector);
    let v = params.v_a + 1.0;
    let chi_line = 1.0 / t - 1.0 + xi;
    let chi_tot = chi_line + chi_hom / t;

    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line).powi(2);
    let b = (t * (v * chi_line + 1.0)).powi(2);
    let (l1, l2) = eigen_pair(a, b)?;

    let sqrt_b = b.sqrt();
    let denom = t * (v + chi_tot);
    let c = (v * sqrt_b + t * (v + chi_line) + a * chi_hom) / denom;
    let d = sqrt_b * (v + sqrt_b * chi_hom) / denom;
    let (l3, l4) = eigen_pair(c, d)?;

    Ok(mode_entropy(l1)? + mode_entropy(l2)? - mode_entropy(l3)? - mode_entropy(l4)?)
}

/// `K_th = I(x:y) - χ_BE`.
pub fn key_rate_theoretical(inputs: &KeyRateInputs) -> Result<f64, KeyRateError> {
    key_rate_real(&KeyRateInputs {
        beta: 1.0,
        ..*inputs
    })
}

/// `K_real = β I(x:y) - χ_BE`.
pub fn key_rate_real(inputs: &KeyRateInputs) -> Result<f64, KeyRateError> {
    if !(0.0..=1.0).contains(&inputs.beta) {
        return Err(KeyRateError::InvalidInput(format!(
            "efficiency {} outside [0, 1]",
            inputs.beta
        )));
    }
    let info = mutual_information(snr(&inputs.params));
    Ok(inputs.beta * info - holevo_bound(&inputs.params, inputs.detector)?)
}

/// How much of the mutual information the reconciliation turns into key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Efficiency {
    /// The same β at every SNR.
    Constant { beta: f64 },
    /// A code of fixed rate that reaches efficiency `beta` at SNR `snr` and
    /// still decodes at any higher SNR. It yields `beta · I(snr)` key bits per
    /// channel use whenever the modulation gives SNR ≥ `snr`.
    FixedRate { beta: f64, snr: f64 },
}

impl Efficiency {
    pub fn beta(&self) -> f64 {
        match *self {
            Efficiency::Constant { beta } | Efficiency::FixedRate { beta, .. } => beta,
        }
    }

    /// Reconciled bits per channel use at the given SNR, or `None` when the
    /// scheme cannot operate there.
    fn reconciled_bits(&self, snr_value: f64) -> Option<f64> {
        match *self {
            Efficiency::Constant { beta } => Some(beta * mutual_information(snr_value)),
            Efficiency::FixedRate { beta, snr: op } => {
                (snr_value >= op * (1.0 - 1e-9)).then(|| beta * mutual_information(op))
            }
        }
    }
}

/// One row of a key-rate-versus-distance table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub km: f64,
    #[serde(rename = "T")]
    pub transmission: f64,
    #[serde(rename = "SNR")]
    pub snr: f64,
    #[serde(rename = "I")]
    pub info: f64,
    #[serde(rename = "chi_BE")]
    pub chi_be: f64,
    #[serde(rename = "K_real")]
    pub k_real: f64,
}

/// Search interval for `log10 V_A`.
pub const LOG10_VA_RANGE: (f64, f64) = (-2.0, 4.0);
/// Stopping width of the golden-section bracket in `log10 V_A`.
const GOLDEN_TOLERANCE: f64 = 1e-5;

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > GOLDEN_TOLERANCE {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    // the bracket ends may beat the interior when the optimum is on a boundary
    [lo, 0.5 * (lo + hi), hi]
        .into_iter()
        .map(|x| (x, f(x)))
        .fold((lo, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

/// Key rate at one distance with `V_A` chosen to maximize `K_real`.
pub fn optimize_at(
    base: &ChannelParams,
    efficiency: Efficiency,
    detector: DetectorModel,
    km: f64,
) -> Result<CurveRow, KeyRateError> {
    let at = base.at_distance(km);
    at.validate()
        .map_err(|e| KeyRateError::InvalidInput(e.to_string()))?;
    // make sure the model is physical over the search range before optimizing
    let probe = |log_va: f64| -> Result<f64, KeyRateError> {
        let p = ChannelParams {
            v_a: 10f64.powf(log_va),
            ..at
        };
        let chi = holevo_bound(&p, detector)?;
        Ok(match efficiency.reconciled_bits(snr(&p)) {
            Some(bits) => bits - chi,
            None => f64::NEG_INFINITY,
        })
    };
    let (mut lo, hi) = LOG10_VA_RANGE;
    if let Efficiency::FixedRate { snr: op, .. } = efficiency {
        lo = lo.max(at.with_snr(op).v_a.log10());
    }
    let best = if lo >= hi {
        lo
    } else {
        probe(lo)?;
        probe(hi)?;
        golden_max(|x| probe(x).unwrap_or(f64::NEG_INFINITY), lo, hi)
    };
    let p = ChannelParams {
        v_a: 10f64.powf(best),
        ..at
    };
    let snr_value = snr(&p);
    let chi_be = holevo_bound(&p, detector)?;
    let k_real = efficiency.reconciled_bits(snr_value).unwrap_or(0.0) - chi_be;
    Ok(CurveRow {
        km,
        transmission: p.transmission,
        snr: snr_value,
        info: mutual_information(snr_value),
        chi_be,
        k_real,
    })
}

/// Key rate over a distance grid, each point with its own optimal `V_A`.
pub fn keyrate_curve(
    base: &ChannelParams,
    efficiency: Efficiency,
    detector: DetectorModel,
    distances_km: &[f64],
) -> Result<Vec<CurveRow>, KeyRateError> {
    use rayon::prelude::*;
    if distances_km.is_empty() {
        return Err(KeyRateError::InvalidInput("empty distance grid".into()));
    }
    distances_km
        .par_iter()
        .map(|&km| optimize_at(base, efficiency, detector, km))
        .collect()
}

/// Distance at which `K_real` first drops to zero, linearly interpolated
/// between grid points; `None` if it stays positive over the grid.
pub fn zero_crossing(rows: &[CurveRow]) -> Option<f64> {
    if rows.first()?.k_real <= 0.0 {
        return Some(rows[0].km);
    }
    rows.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        (a.k_real > 0.0 && b.k_real <= 0.0)
            .then(|| a.km + (b.km - a.km) * a.k_real / (a.k_real - b.k_real))
    })
}

/// True when `candidate` stays positive strictly farther than `reference`.
/// A curve without a crossing on its grid counts as reaching its last point.
pub fn reaches_farther(candidate: &[CurveRow], reference: &[CurveRow]) -> bool {
    let reach = |rows: &[CurveRow]| zero_crossing(rows).or(rows.last().map(|r| r.km));
    match (reach(candidate), reach(reference)) {
        (Some(c), Some(r)) => c > r,
        _ => false,
    }
}

pub fn write_curve_csv<W: io::Write>(rows: &[CurveRow], out: W) -> Result<(), KeyRateError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a curve with the same columns as [`write_curve_csv`], e.g. a
/// reference curve for another reconciliation scheme.
pub fn read_curve_csv<R: io::Read>(input: R) -> Result<Vec<CurveRow>, KeyRateError> {
    let mut r = csv::Reader::from_reader(input);
    let expected = ["km", "T", "SNR", "I", "chi_BE", "K_real"];
    let headers = r.headers()?.clone();
    if headers.iter().ne(expected.iter().copied()) {
        return Err(KeyRateError::InvalidInput(format!(
            "unexpected CSV header {:?}, expected {:?}",
            headers.iter().collect::<Vec<_>>(),
            expected
        )));
    }
    r.deserialize().map(|row| row.map_err(KeyRateError::from)).collect()
}

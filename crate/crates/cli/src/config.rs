//! JSON experiment configurations.
//!
//! Every field has a default, so an empty object (or no file at all) is a
//! valid configuration. Keys outside the schema are rejected, and all of them
//! are reported at once.

use std::path::{Path, PathBuf};

use octorecon::channel::ChannelParams;
use octorecon::keyrate::{DetectorModel, Efficiency};
use octorecon::ldpc::peg::DegreeProfile;
use octorecon::reconciliation::{Direction, NoiseEstimate};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// Shape of a configuration document, used to list unknown keys.
pub enum Schema {
    Any,
    Object(&'static [(&'static str, Schema)]),
}

const CHANNEL: Schema = Schema::Object(&[
    ("xi", Schema::Any),
    ("eta", Schema::Any),
    ("v_elec", Schema::Any),
    ("loss_db_per_km", Schema::Any),
]);

/// Dotted paths of every key in `value` that `schema` does not allow.
pub fn unknown_keys(value: &Value, schema: &Schema) -> Vec<String> {
    fn walk(value: &Value, schema: &Schema, prefix: &str, out: &mut Vec<String>) {
        let (Value::Object(map), Schema::Object(fields)) = (value, schema) else {
            return;
        };
        for (key, child) in map {
            let path = if prefix.is_empty() {
                key.clone()
            } else {
                format!("{prefix}.{key}")
            };
            match fields.iter().find(|(name, _)| name == key) {
                Some((_, sub)) => walk(child, sub, &path, out),
                None => out.push(path),
            }
        }
    }
    let mut out = Vec::new();
    walk(value, schema, "", &mut out);
    out
}

pub trait Config: DeserializeOwned + Default {
    const SCHEMA: Schema;

    fn validate(&self) -> Result<(), CliError> {
        Ok(())
    }

    fn from_value(value: Value) -> Result<Self, CliError> {
        if !value.is_object() {
            return Err(CliError::Config("configuration must be a JSON object".into()));
        }
        let unknown = unknown_keys(&value, &Self::SCHEMA);
        if !unknown.is_empty() {
            return Err(CliError::Config(format!(
                "unknown configuration keys: {}",
                unknown.join(", ")
            )));
        }
        let config: Self = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    fn from_json(text: &str) -> Result<Self, CliError> {
        let value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        Self::from_value(value)
    }

    /// Reads `path`, or returns the defaults when no file is given.
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => {
                let config = Self::default();
                config.validate()?;
                Ok(config)
            }
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Data(format!("cannot read config {}: {e}", p.display())))?;
                Self::from_json(&text)
            }
        }
    }
}

/// Channel figures shared by every distance; `V_A` and `T` are set per run.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub xi: f64,
    pub eta: f64,
    pub v_elec: f64,
    pub loss_db_per_km: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        let p = ChannelParams::experimental();
        Self {
            xi: p.xi,
            eta: p.eta,
            v_elec: p.v_elec,
            loss_db_per_km: p.loss_db_per_km,
        }
    }
}

impl ChannelConfig {
    pub fn params(&self) -> Result<ChannelParams, CliError> {
        let p = ChannelParams {
            v_a: 1.0,
            transmission: 1.0,
            xi: self.xi,
            eta: self.eta,
            v_elec: self.v_elec,
            loss_db_per_km: self.loss_db_per_km,
        };
        p.validate().map_err(|e| CliError::Config(format!("channel: {e}")))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChiPdfConfig {
    pub dims: Vec<u32>,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl Default for ChiPdfConfig {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 4, 8],
            r_min: 0.0,
            r_max: 8.0,
            points: 400,
        }
    }
}

impl Config for ChiPdfConfig {
    const SCHEMA: Schema = Schema::Object(&[
        ("dims", Schema::Any),
        ("r_min", Schema::Any),
        ("r_max", Schema::Any),
        ("points", Schema::Any),
    ]);

    fn validate(&self) -> Result<(), CliError> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(CliError::Usage("dims must be a non-empty list of positive integers".into()));
        }
        if self.points < 2 {
            return Err(CliError::Usage("the radius grid needs at least 2 points".into()));
        }
        if !(self.r_min >= 0.0 && self.r_max > self.r_min && self.r_max.is_finite()) {
            return Err(CliError::Usage(format!(
                "radius grid [{}, {}] must satisfy 0 <= r_min < r_max",
                self.r_min, self.r_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconcileConfig {
    pub seed: Option<u64>,
    pub channel: ChannelConfig,
    pub distance_km: f64,
    /// Operating points; `V_A` is tuned to each.
    pub snr: Vec<f64>,
    pub codewords: usize,
    /// alist file, relative to the config file; the bundled code when absent.
    pub code: Option<PathBuf>,
    pub direction: Direction,
    pub noise: NoiseEstimate,
    pub max_iter: usize,
}

impl Default for ReconcileConfig {
    fn default() -> Self {
        Self {
            seed: None,
            channel: ChannelConfig::default(),
            distance_km: 25.0,
            snr: vec![0.6, 0.7],
            codewords: 100,
            code: None,
            direction: Direction::Reverse,
            noise: NoiseEstimate::Analytic,
            max_iter: octorecon::ldpc::DEFAULT_MAX_ITER,
        }
    }
}

impl Config for ReconcileConfig {
    const SCHEMA: Schema = Schema::Object(&[
        ("seed", Schema::Any),
        ("channel", CHANNEL),
        ("distance_km", Schema::Any),
        ("snr", Schema::Any),
        ("codewords", Schema::Any),
        ("code", Schema::Any),
        ("direction", Schema::Any),
        ("noise", Schema::Object(&[("mode", Schema::Any), ("pilot_frames", Schema::Any)])),
        ("max_iter", Schema::Any),
    ]);

    fn validate(&self) -> Result<(), CliError> {
        self.channel.params()?;
        if self.snr.is_empty() || self.snr.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(CliError::Config("snr must be a non-empty list of positive values".into()));
        }
        if !(self.distance_km.is_finite() && self.distance_km >= 0.0) {
            return Err(CliError::Config("distance_km must be non-negative".into()));
        }
        if self.codewords == 0 || self.max_iter == 0 {
            return Err(CliError::Config("codewords and max_iter must be positive".into()));
        }
        if let NoiseEstimate::Calibrated { pilot_frames: 0 } = self.noise {
            return Err(CliError::Config("noise.pilot_frames must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceGrid {
    pub start_km: f64,
    pub stop_km: f64,
    pub step_km: f64,
}

impl Default for DistanceGrid {
    fn default() -> Self {
        Self {
            start_km: 0.0,
            stop_km: 100.0,
            step_km: 1.0,
        }
    }
}

impl DistanceGrid {
    /// Inclusive grid from `start_km` to `stop_km`.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop_km - self.start_km) / self.step_km + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start_km + i as f64 * self.step_km).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KeyrateConfig {
    pub channel: ChannelConfig,
    pub efficiency: Efficiency,
    pub detector: DetectorModel,
    pub distances: DistanceGrid,
    /// Curve of another scheme with the same CSV columns, relative to the
    /// config file.
    pub reference_csv: Option<PathBuf>,
}

impl Default for KeyrateConfig {
    fn default() -> Self {
        Self {
            channel: ChannelConfig::default(),
            efficiency: Efficiency::FixedRate { beta: 0.889, snr: 0.5 },
            detector: DetectorModel::Trusted,
            distances: DistanceGrid::default(),
            reference_csv: None,
        }
    }
}

impl Config for KeyrateConfig {
    const SCHEMA: Schema = Schema::Object(&[
        ("channel", CHANNEL),
        (
            "efficiency",
            Schema::Object(&[("kind", Schema::Any), ("beta", Schema::Any), ("snr", Schema::Any)]),
        ),
        ("detector", Schema::Any),
        (
            "distances",
            Schema::Object(&[("start_km", Schema::Any), ("stop_km", Schema::Any), ("step_km", Schema::Any)]),
        ),
        ("reference_csv", Schema::Any),
    ]);

    fn validate(&self) -> Result<(), CliError> {
        self.channel.params()?;
        let beta = self.efficiency.beta();
        if !(0.0..=1.0).contains(&beta) {
            return Err(CliError::Config(format!("efficiency.beta = {beta} outside [0, 1]")));
        }
        if let Efficiency::FixedRate { snr, .. } = self.efficiency {
            if !(snr.is_finite() && snr > 0.0) {
                return Err(CliError::Config("efficiency.snr must be positive".into()));
            }
        }
        let g = &self.distances;
        if !(g.start_km >= 0.0 && g.stop_km >= g.start_km && g.step_km > 0.0 && g.stop_km.is_finite()) {
            return Err(CliError::Config(
                "distances must satisfy 0 <= start_km <= stop_km and step_km > 0".into(),
            ));
        }
        if (g.stop_km - g.start_km) / g.step_km > 1e6 {
            return Err(CliError::Config("distance grid has more than a million points".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenCodeConfig {
    pub seed: Option<u64>,
    pub n_vars: usize,
    pub n_checks: usize,
    /// `[degree, fraction of variable nodes]` pairs.
    pub var_fractions: Vec<(usize, f64)>,
}

impl Default for GenCodeConfig {
    fn default() -> Self {
        let p = DegreeProfile::shipped();
        Self {
            seed: None,
            n_vars: p.n_vars,
            n_checks: p.n_checks,
            var_fractions: p.var_fractions,
        }
    }
}

impl GenCodeConfig {
    pub fn profile(&self) -> DegreeProfile {
        DegreeProfile {
            n_vars: self.n_vars,
            n_checks: self.n_checks,
            var_fractions: self.var_fractions.clone(),
        }
    }
}

impl Config for GenCodeConfig {
    const SCHEMA: Schema = Schema::Object(&[
        ("seed", Schema::Any),
        ("n_vars", Schema::Any),
        ("n_checks", Schema::Any),
        ("var_fractions", Schema::Any),
    ]);

    fn validate(&self) -> Result<(), CliError> {
        self.profile()
            .var_degrees()
            .map(|_| ())
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

/// `--seed` wins over the configuration; one of them is required.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64, CliError> {
    flag.or(config).ok_or_else(|| {
        CliError::Config("this command is stochastic: give a seed in the config or with --seed".into())
    })
}

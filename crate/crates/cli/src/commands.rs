use std::path::{Path, PathBuf};

use octorecon::keyrate::{self, CurveRow, KeyRateError};
use octorecon::ldpc::{peg, shipped_code, ParityCheckMatrix};
use octorecon::reconciliation::{simulate_fer, ReconciliationError, RunOptions};
use octorecon::spherical::radius_pdf;
use serde::Serialize;

use crate::config::{resolve_seed, ChiPdfConfig, Config, GenCodeConfig, KeyrateConfig, ReconcileConfig};
use crate::{Cli, CliError, Command};

/// Runs the selected command and returns what goes to `--out`. Progress and
/// summaries go to stderr.
pub fn execute(cli: &Cli) -> Result<Vec<u8>, CliError> {
    let config_path = cli.config.as_deref();
    let base = config_path.and_then(Path::parent);
    match cli.command {
        Command::ChiPdf => {
            let config = ChiPdfConfig::load(config_path)?;
            to_csv(&chi_pdf(&config))
        }
        Command::Reconcile => {
            let config = ReconcileConfig::load(config_path)?;
            let seed = resolve_seed(cli.seed, config.seed)?;
            let rows = reconcile(&config, base, seed)?;
            for r in &rows {
                eprintln!(
                    "SNR {:.3}: {}/{} frame errors (FER {:.4}), beta {:.4}, {} bits disclosed",
                    r.snr, r.frame_errors, r.codewords, r.fer, r.beta, r.leakage_bits
                );
            }
            to_csv(&rows)
        }
        Command::Keyrate => {
            let config = KeyrateConfig::load(config_path)?;
            let outcome = keyrate_curve(&config, base)?;
            match outcome.crossing {
                Some(km) => eprintln!("K_real reaches zero at {km:.2} km"),
                None => eprintln!("K_real stays positive over the grid"),
            }
            if let Some(reference) = &outcome.reference {
                match keyrate::zero_crossing(reference) {
                    Some(km) => eprintln!("reference reaches zero at {km:.2} km"),
                    None => eprintln!("reference stays positive over its grid"),
                }
                eprintln!(
                    "this curve reaches farther than the reference: {}",
                    keyrate::reaches_farther(&outcome.rows, reference)
                );
            }
            let mut buf = Vec::new();
            keyrate::write_curve_csv(&outcome.rows, &mut buf).map_err(keyrate_error)?;
            Ok(buf)
        }
        Command::GenCode => {
            let config = GenCodeConfig::load(config_path)?;
            let seed = resolve_seed(cli.seed, config.seed)?;
            let code = gen_code(&config, seed)?;
            eprintln!(
                "n = {}, m = {}, rank {}, rate {:.5}, fingerprint {:#018x}",
                code.n_vars(),
                code.n_checks(),
                code.rank(),
                code.rate(),
                code.fingerprint()
            );
            Ok(code.to_alist().into_bytes())
        }
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Data(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

fn resolve(base: Option<&Path>, path: &Path) -> PathBuf {
    match base {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiRow {
    pub n: u32,
    pub r: f64,
    pub density: f64,
}

/// Density on an inclusive uniform radius grid, one block per dimension.
pub fn chi_pdf(config: &ChiPdfConfig) -> Vec<ChiRow> {
    let step = (config.r_max - config.r_min) / (config.points - 1) as f64;
    config
        .dims
        .iter()
        .flat_map(|&n| {
            (0..config.points).map(move |i| {
                let r = if i + 1 == config.points {
                    config.r_max
                } else {
                    config.r_min + i as f64 * step
                };
                ChiRow {
                    n,
                    r,
                    density: radius_pdf(n, r),
                }
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconcileRow {
    pub snr: f64,
    pub codewords: usize,
    pub frame_errors: usize,
    pub fer: f64,
    pub beta: f64,
    pub leakage_bits: usize,
    pub mean_iterations: f64,
}

fn reconciliation_error(e: ReconciliationError) -> CliError {
    match e {
        ReconciliationError::Channel(e) => CliError::Config(e.to_string()),
        e @ (ReconciliationError::Ldpc(_)
        | ReconciliationError::LengthMismatch { .. }
        | ReconciliationError::CodeMismatch { .. }
        | ReconciliationError::Wire(_)) => CliError::Data(e.to_string()),
        e => CliError::Numerical(e.to_string()),
    }
}

pub fn load_code(path: Option<&Path>) -> Result<ParityCheckMatrix, CliError> {
    let Some(path) = path else {
        return Ok(shipped_code());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read code file {}: {e}", path.display())))?;
    ParityCheckMatrix::from_alist(&text)
        .map_err(|e| CliError::Data(format!("code file {}: {e}", path.display())))
}

/// One FER measurement per configured SNR. Every point reuses `seed`, so
/// neighbouring points see the same key words and noise shapes.
pub fn reconcile(config: &ReconcileConfig, base: Option<&Path>, seed: u64) -> Result<Vec<ReconcileRow>, CliError> {
    let code = load_code(config.code.as_deref().map(|p| resolve(base, p)).as_deref())?;
    let channel = config.channel.params()?.at_distance(config.distance_km);
    let options = RunOptions {
        direction: config.direction,
        max_iter: config.max_iter,
        noise: config.noise,
    };
    config
        .snr
        .iter()
        .map(|&target| {
            let params = channel.with_snr(target);
            let report =
                simulate_fer(&params, &code, config.codewords, &options, seed).map_err(reconciliation_error)?;
            Ok(ReconcileRow {
                snr: report.snr,
                codewords: report.codewords,
                frame_errors: report.frame_errors,
                fer: report.fer(),
                beta: report.beta,
                leakage_bits: report.leakage_bits,
                mean_iterations: report.mean_iterations,
            })
        })
        .collect()
}

fn keyrate_error(e: KeyRateError) -> CliError {
    match e {
        KeyRateError::NonPhysical(_) => CliError::Numerical(e.to_string()),
        KeyRateError::InvalidInput(_) => CliError::Config(e.to_string()),
        KeyRateError::Csv(_) | KeyRateError::Io(_) => CliError::Data(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyrateOutcome {
    pub rows: Vec<CurveRow>,
    pub crossing: Option<f64>,
    pub reference: Option<Vec<CurveRow>>,
}

pub fn keyrate_curve(config: &KeyrateConfig, base: Option<&Path>) -> Result<KeyrateOutcome, CliError> {
    let rows = keyrate::keyrate_curve(
        &config.channel.params()?,
        config.efficiency,
        config.detector,
        &config.distances.points(),
    )
    .map_err(keyrate_error)?;
    let reference = match &config.reference_csv {
        None => None,
        Some(p) => {
            let path = resolve(base, p);
            let file = std::fs::File::open(&path)
                .map_err(|e| CliError::Data(format!("cannot read reference curve {}: {e}", path.display())))?;
            let curve = keyrate::read_curve_csv(file)
                .map_err(|e| CliError::Data(format!("reference curve {}: {e}", path.display())))?;
            Some(curve)
        }
    };
    Ok(KeyrateOutcome {
        crossing: keyrate::zero_crossing(&rows),
        rows,
        reference,
    })
}

pub fn gen_code(config: &GenCodeConfig, seed: u64) -> Result<ParityCheckMatrix, CliError> {
    peg::construct(&config.profile(), seed).map_err(|e| CliError::Config(e.to_string()))
}

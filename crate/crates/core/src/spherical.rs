//! Binary words on the sphere, Gaussian block normalization and the χ radius
//! distribution.

use std::f64::consts::PI;

use thiserror::Error;

use crate::algebra::norm;

/// Blocks with a norm at or below this value cannot be projected on the sphere
/// and are discarded by both parties.
pub const DEGENERATE_NORM: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphericalError {
    #[error("cannot map an empty word")]
    EmptyWord,
    #[error("degenerate block: norm {0} is below the normalization threshold")]
    DegenerateFrame(f64),
}

/// A Gaussian block together with its norm and direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub raw: Vec<f64>,
    pub norm: f64,
    pub unit: Vec<f64>,
}

impl Frame {
    pub fn dim(&self) -> usize {
        self.raw.len()
    }
}

/// Image of a binary word under `b ↦ (-1)^b / √d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalCodeword {
    pub coords: Vec<f64>,
}

impl SphericalCodeword {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

pub fn bits_to_sphere(bits: &[u8]) -> Result<SphericalCodeword, SphericalError> {
    if bits.is_empty() {
        return Err(SphericalError::EmptyWord);
    }
    let amp = 1.0 / (bits.len() as f64).sqrt();
    let coords = bits
        .iter()
        .map(|&b| if b & 1 == 0 { amp } else { -amp })
        .collect();
    Ok(SphericalCodeword { coords })
}

/// Hard decision: a coordinate decodes to 0 iff it is non-negative.
pub fn sphere_to_bits(point: &[f64]) -> Vec<u8> {
    point.iter().map(|&v| u8::from(v < 0.0)).collect()
}

pub fn normalize(raw: &[f64]) -> Result<Frame, SphericalError> {
    let n = norm(raw);
    if !(n > DEGENERATE_NORM) {
        return Err(SphericalError::DegenerateFrame(n));
    }
    Ok(Frame {
        raw: raw.to_vec(),
        norm: n,
        unit: raw.iter().map(|v| v / n).collect(),
    })
}

/// `Γ(n/2)` for a positive integer `n`.
fn gamma_half(n: u32) -> f64 {
    let mut g = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut k = if n.is_multiple_of(2) { 2 } else { 1 };
    while k < n {
        g *= f64::from(k) / 2.0;
        k += 2;
    }
    g
}

/// Density of the χ distribution with `n` degrees of freedom, i.e. of the
/// norm of an `n`-dimensional standard Gaussian vector.
pub fn radius_pdf(n: u32, r: f64) -> f64 {
    assert!(n >= 1, "χ distribution needs at least one degree of freedom");
    if r < 0.0 {
        return 0.0;
    }
    let nf = f64::from(n);
    let log_norm = (nf / 2.0 - 1.0) * 2f64.ln() + gamma_half(n).ln();
    if r == 0.0 {
        return if n == 1 { (-log_norm).exp() } else { 0.0 };
    }
    ((nf - 1.0) * r.ln() - r * r / 2.0 - log_norm).exp()
}

//! Little-endian byte layout of [`SideInfo`] and the key digest.
//!
//! ```text
//! u32 dim | u32 frame_count | u64 code_id
//! frame_count × (dim × f64 alpha | f64 norm)
//! u32 syndrome_len | ceil(syndrome_len / 8) bytes, bits packed LSB first
//! u64 digest
//! ```
//!
//! A slot with norm 0 and all-zero alpha marks a discarded frame.

use thiserror::Error;

use super::{FrameSide, SideInfo};
use crate::algebra::{norm, RotationCoeffs};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WireError {
    #[error("side information truncated at byte {0}")]
    Truncated(usize),
    #[error("{0} trailing bytes after the digest")]
    TrailingBytes(usize),
    #[error("unsupported frame dimension {0}")]
    BadDimension(u32),
    #[error("frame {frame}: {reason}")]
    BadFrame { frame: usize, reason: &'static str },
    #[error("non-zero padding bits after the syndrome")]
    Padding,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or(WireError::Truncated(self.bytes.len()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, WireError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl SideInfo {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(
            16 + self.frames.len() * 8 * (self.dim + 1) + 4 + self.syndrome.len().div_ceil(8) + 8,
        );
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.frames.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.code_id.to_le_bytes());
        for f in &self.frames {
            for a in &f.alpha.alpha {
                out.extend_from_slice(&a.to_le_bytes());
            }
            out.extend_from_slice(&f.norm.to_le_bytes());
        }
        out.extend_from_slice(&(self.syndrome.len() as u32).to_le_bytes());
        let mut packed = vec![0u8; self.syndrome.len().div_ceil(8)];
        for (i, &b) in self.syndrome.iter().enumerate() {
            packed[i / 8] |= (b & 1) << (i % 8);
        }
        out.extend_from_slice(&packed);
        out.extend_from_slice(&self.digest.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader { bytes, pos: 0 };
        let dim_raw = r.u32()?;
        if ![1, 2, 4, 8].contains(&dim_raw) {
            return Err(WireError::BadDimension(dim_raw));
        }
        let dim = dim_raw as usize;
        let frame_count = r.u32()? as usize;
        let code_id = r.u64()?;
        // reject absurd counts before allocating
        if frame_count.saturating_mul(8 * (dim + 1)) > bytes.len() {
            return Err(WireError::Truncated(bytes.len()));
        }
        let mut frames = Vec::with_capacity(frame_count);
        for frame in 0..frame_count {
            let alpha = (0..dim).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
            let n = r.f64()?;
            let bad = |reason| WireError::BadFrame { frame, reason };
            if !n.is_finite() || n < 0.0 || alpha.iter().any(|a| !a.is_finite()) {
                return Err(bad("non-finite or negative value"));
            }
            if n == 0.0 {
                if alpha.iter().any(|&a| a != 0.0) {
                    return Err(bad("discarded frame with non-zero alpha"));
                }
            } else if (norm(&alpha) - 1.0).abs() > 1e-9 {
                return Err(bad("alpha is not a unit vector"));
            }
            frames.push(FrameSide {
                alpha: RotationCoeffs::new(alpha),
                norm: n,
            });
        }
        let syndrome_len = r.u32()? as usize;
        let packed = r.take(syndrome_len.div_ceil(8))?;
        let syndrome: Vec<u8> = (0..syndrome_len)
            .map(|i| (packed[i / 8] >> (i % 8)) & 1)
            .collect();
        if !syndrome_len.is_multiple_of(8) && packed[syndrome_len / 8] >> (syndrome_len % 8) != 0 {
            return Err(WireError::Padding);
        }
        let digest = r.u64()?;
        if r.pos != bytes.len() {
            return Err(WireError::TrailingBytes(bytes.len() - r.pos));
        }
        Ok(SideInfo {
            dim,
            code_id,
            frames,
            syndrome,
            digest,
        })
    }
}

const DIGEST_PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(DIGEST_PRIME)) as u64
}

/// Evaluation point of the digest polynomial, derived from a public value.
pub fn digest_key(public: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = public.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    // keep the point away from 0 and 1
    2 + z % (DIGEST_PRIME - 2)
}

/// Polynomial universal hash of a bit string over `GF(2^61 - 1)`.
///
/// Bits are packed LSB first into 32-bit chunks, followed by the bit length;
/// two distinct strings of `L` chunks collide for at most `L + 1` of the
/// possible keys.
pub fn key_digest(bits: &[u8], key: u64) -> u64 {
    let key = key % DIGEST_PRIME;
    let mut h = 0u64;
    for chunk in bits.chunks(32) {
        let word = chunk
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i));
        h = (mul_mod(h, key) + word) % DIGEST_PRIME;
    }
    (mul_mod(h, key) + bits.len() as u64 % DIGEST_PRIME) % DIGEST_PRIME
}

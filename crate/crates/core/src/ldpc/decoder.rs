//! Flooding sum-product decoder in the log domain.

use super::{LdpcError, ParityCheckMatrix};

/// Magnitude limit applied to every message.
pub const LLR_CLIP: f64 = 25.0;

pub const DEFAULT_MAX_ITER: usize = 200;

/// Channel log-likelihood ratios `log P(b=0)/P(b=1)`, one per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    pub values: Vec<f64>,
}

impl LlrFrame {
    /// Wraps finite values; infinities are clipped to `±LLR_CLIP`.
    ///
    /// Returns `None` if any value is NaN.
    pub fn new(values: Vec<f64>) -> Option<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return None;
        }
        Some(Self {
            values: values.into_iter().map(clip).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub bits: Vec<u8>,
    pub converged: bool,
    /// Message-passing iterations performed; 0 when the channel hard decision
    /// already satisfied the target syndrome.
    pub iterations: usize,
}

#[inline]
fn clip(x: f64) -> f64 {
    x.clamp(-LLR_CLIP, LLR_CLIP)
}

/// Reusable decoder state for one parity-check matrix.
pub struct BpDecoder<'a> {
    h: &'a ParityCheckMatrix,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    scratch: Vec<f64>,
    bits: Vec<u8>,
}

impl<'a> BpDecoder<'a> {
    pub fn new(h: &'a ParityCheckMatrix) -> Self {
        let max_check_degree = (0..h.n_checks()).map(|c| h.check_degree(c)).max().unwrap_or(0);
        Self {
            h,
            v2c: vec![0.0; h.n_edges()],
            c2v: vec![0.0; h.n_edges()],
            scratch: vec![0.0; max_check_degree + 1],
            bits: vec![0; h.n_vars()],
        }
    }

    /// Sum-product decoding toward `{y : H·y = target}`.
    pub fn decode(
        &mut self,
        llr: &LlrFrame,
        target: &[u8],
        max_iter: usize,
    ) -> Result<DecodeResult, LdpcError> {
        let h = self.h;
        if llr.len() != h.n_vars() {
            return Err(LdpcError::LengthMismatch {
                expected: h.n_vars(),
                found: llr.len(),
            });
        }
        if target.len() != h.n_checks() {
            return Err(LdpcError::LengthMismatch {
                expected: h.n_checks(),
                found: target.len(),
            });
        }
        let channel = &llr.values;
        let var_offsets = h.var_offsets();
        let var_edges = h.var_edge_ids();
        let check_offsets = h.check_offsets();
        let edge_vars = h.edge_vars();

        for (b, &l) in self.bits.iter_mut().zip(channel) {
            *b = u8::from(l < 0.0);
        }
        if self.satisfies(target) {
            return Ok(self.result(true, 0));
        }
        for (e, &v) in edge_vars.iter().enumerate() {
            self.v2c[e] = channel[v as usize];
        }

        for iter in 1..=max_iter {
            // check nodes: tanh rule, sign flipped where the target bit is 1
            for (c, w) in check_offsets.windows(2).enumerate() {
                let (start, end) = (w[0], w[1]);
                let deg = end - start;
                let t = &mut self.scratch[..deg];
                for (ti, &m) in t.iter_mut().zip(&self.v2c[start..end]) {
                    // tanh(m/2), evaluated on |m| so the map stays exactly odd
                    let e = m.abs().exp_m1();
                    *ti = (e / (e + 2.0)).copysign(m);
                }
                let sign = if target[c] & 1 == 1 { -1.0 } else { 1.0 };
                // forward pass stores prefix products in c2v, backward pass
                // multiplies in the suffix products
                let mut prefix = 1.0;
                for k in 0..deg {
                    self.c2v[start + k] = prefix;
                    prefix *= t[k];
                }
                let mut suffix = 1.0;
                for k in (0..deg).rev() {
                    let p = self.c2v[start + k] * suffix;
                    // 2 atanh(p)
                    let a = p.abs().min(1.0);
                    let out = (2.0 * a / (1.0 - a)).ln_1p().min(LLR_CLIP);
                    self.c2v[start + k] = sign * out.copysign(p);
                    suffix *= t[k];
                }
            }

            // variable nodes
            for v in 0..h.n_vars() {
                let edges = &var_edges[var_offsets[v]..var_offsets[v + 1]];
                let total = edges
                    .iter()
                    .fold(channel[v], |acc, &e| acc + self.c2v[e as usize]);
                for &e in edges {
                    self.v2c[e as usize] = clip(total - self.c2v[e as usize]);
                }
                self.bits[v] = u8::from(total < 0.0);
            }

            if self.satisfies(target) {
                return Ok(self.result(true, iter));
            }
        }
        Ok(self.result(false, max_iter))
    }

    fn satisfies(&self, target: &[u8]) -> bool {
        let edge_vars = self.h.edge_vars();
        self.h
            .check_offsets()
            .windows(2)
            .zip(target)
            .all(|(w, &s)| {
                edge_vars[w[0]..w[1]]
                    .iter()
                    .fold(0u8, |acc, &v| acc ^ self.bits[v as usize])
                    == s & 1
            })
    }

    fn result(&self, converged: bool, iterations: usize) -> DecodeResult {
        DecodeResult {
            bits: self.bits.clone(),
            converged,
            iterations,
        }
    }
}

/// One-shot convenience wrapper around [`BpDecoder`].
pub fn decode_bp(
    h: &ParityCheckMatrix,
    llr: &LlrFrame,
    target_syndrome: &[u8],
    max_iter: usize,
) -> Result<DecodeResult, LdpcError> {
    BpDecoder::new(h).decode(llr, target_syndrome, max_iter)
}

//! Binary LDPC codes: parity-check matrices, syndromes and belief-propagation
//! decoding toward an arbitrary coset.
//!
//! Decoding targets the coset `{y : H·y = s}` rather than the code itself, so
//! one party can publish the syndrome of a uniformly random key word and the
//! other can recover the word from a noisy observation.

mod alist;
mod awgn;
mod decoder;
mod gf2;
pub mod peg;

use std::fmt;

use thiserror::Error;

pub use awgn::{biawgn_fer, FerStats};
pub use decoder::{decode_bp, BpDecoder, DecodeResult, LlrFrame, DEFAULT_MAX_ITER, LLR_CLIP};
pub use gf2::SystematicEncoder;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LdpcError {
    #[error("alist line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("check {check} references variable {var}, but the code has {n_vars} variables")]
    IndexOutOfRange { check: usize, var: usize, n_vars: usize },
    #[error("check {check} lists variable {var} more than once")]
    RepeatedEdge { check: usize, var: usize },
    #[error("a parity-check matrix needs fewer checks than variables ({n_checks} >= {n_vars})")]
    TooManyChecks { n_checks: usize, n_vars: usize },
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid degree profile: {0}")]
    InvalidProfile(String),
}

/// Sparse binary parity-check matrix stored both check-major and
/// variable-major.
///
/// Edges are numbered in check-major order; `var_edges` maps each variable to
/// the edge ids that touch it.
#[derive(Clone)]
pub struct ParityCheckMatrix {
    n_vars: usize,
    check_offsets: Vec<usize>,
    edge_vars: Vec<u32>,
    var_offsets: Vec<usize>,
    var_edges: Vec<u32>,
    rank: usize,
}

impl PartialEq for ParityCheckMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n_vars == other.n_vars
            && self.check_offsets == other.check_offsets
            && self.edge_vars == other.edge_vars
    }
}

impl Eq for ParityCheckMatrix {}

impl fmt::Debug for ParityCheckMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParityCheckMatrix")
            .field("n_vars", &self.n_vars)
            .field("n_checks", &self.n_checks())
            .field("n_edges", &self.n_edges())
            .field("rank", &self.rank)
            .finish()
    }
}

impl ParityCheckMatrix {
    /// Builds the matrix from per-check variable lists.
    pub fn from_checks(n_vars: usize, checks: &[Vec<usize>]) -> Result<Self, LdpcError> {
        if checks.len() >= n_vars {
            return Err(LdpcError::TooManyChecks {
                n_checks: checks.len(),
                n_vars,
            });
        }
        let mut check_offsets = Vec::with_capacity(checks.len() + 1);
        check_offsets.push(0);
        let mut edge_vars = Vec::new();
        let mut seen = vec![usize::MAX; n_vars];
        for (c, vars) in checks.iter().enumerate() {
            for &v in vars {
                if v >= n_vars {
                    return Err(LdpcError::IndexOutOfRange {
                        check: c,
                        var: v,
                        n_vars,
                    });
                }
                if seen[v] == c {
                    return Err(LdpcError::RepeatedEdge { check: c, var: v });
                }
                seen[v] = c;
                edge_vars.push(v as u32);
            }
            check_offsets.push(edge_vars.len());
        }

        let mut var_degree = vec![0usize; n_vars];
        for &v in &edge_vars {
            var_degree[v as usize] += 1;
        }
        let mut var_offsets = Vec::with_capacity(n_vars + 1);
        var_offsets.push(0);
        for d in &var_degree {
            var_offsets.push(var_offsets.last().unwrap() + d);
        }
        let mut fill = var_offsets.clone();
        let mut var_edges = vec![0u32; edge_vars.len()];
        for (e, &v) in edge_vars.iter().enumerate() {
            var_edges[fill[v as usize]] = e as u32;
            fill[v as usize] += 1;
        }

        let mut h = Self {
            n_vars,
            check_offsets,
            edge_vars,
            var_offsets,
            var_edges,
            rank: 0,
        };
        h.rank = gf2::rank(&h);
        Ok(h)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.check_offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.edge_vars.len()
    }

    /// GF(2) rank, computed once at construction.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Code rate `1 - rank(H)/n`.
    pub fn rate(&self) -> f64 {
        1.0 - self.rank as f64 / self.n_vars as f64
    }

    /// Rate implied by the matrix shape, `1 - m/n`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.n_checks() as f64 / self.n_vars as f64
    }

    /// Variables participating in check `c`.
    pub fn check_vars(&self, c: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.edge_vars[self.check_offsets[c]..self.check_offsets[c + 1]]
            .iter()
            .map(|&v| v as usize)
    }

    /// Checks that variable `v` participates in, in increasing order.
    pub fn var_checks(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.var_edges[self.var_offsets[v]..self.var_offsets[v + 1]]
            .iter()
            .map(move |&e| self.edge_check(e as usize))
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_offsets[v + 1] - self.var_offsets[v]
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_offsets[c + 1] - self.check_offsets[c]
    }

    fn edge_check(&self, e: usize) -> usize {
        // check_offsets is sorted; the check owning edge e is the last offset <= e
        self.check_offsets.partition_point(|&o| o <= e) - 1
    }

    pub(crate) fn check_offsets(&self) -> &[usize] {
        &self.check_offsets
    }

    pub(crate) fn edge_vars(&self) -> &[u32] {
        &self.edge_vars
    }

    pub(crate) fn var_offsets(&self) -> &[usize] {
        &self.var_offsets
    }

    pub(crate) fn var_edge_ids(&self) -> &[u32] {
        &self.var_edges
    }

    /// Per-check variable lists.
    pub fn to_checks(&self) -> Vec<Vec<usize>> {
        (0..self.n_checks()).map(|c| self.check_vars(c).collect()).collect()
    }

    /// `H · word` over GF(2).
    pub fn syndrome(&self, word: &[u8]) -> Result<Vec<u8>, LdpcError> {
        if word.len() != self.n_vars {
            return Err(LdpcError::LengthMismatch {
                expected: self.n_vars,
                found: word.len(),
            });
        }
        Ok(self.syndrome_unchecked(word))
    }

    pub(crate) fn syndrome_unchecked(&self, word: &[u8]) -> Vec<u8> {
        self.check_offsets
            .windows(2)
            .map(|w| {
                self.edge_vars[w[0]..w[1]]
                    .iter()
                    .fold(0u8, |acc, &v| acc ^ (word[v as usize] & 1))
            })
            .collect()
    }

    /// 64-bit FNV-1a fingerprint of the shape and adjacency, used as a code id
    /// on the wire.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(PRIME);
            }
        };
        eat(self.n_vars as u64);
        eat(self.n_checks() as u64);
        for w in self.check_offsets.windows(2) {
            eat((w[1] - w[0]) as u64);
            for &v in &self.edge_vars[w[0]..w[1]] {
                eat(u64::from(v));
            }
        }
        h
    }

    /// Parses an alist document (1-indexed, optional zero padding).
    pub fn from_alist(text: &str) -> Result<Self, LdpcError> {
        alist::parse(text)
    }

    /// Serializes in the zero-padded alist layout.
    pub fn to_alist(&self) -> String {
        alist::write(self)
    }

    /// Builds a systematic encoder from a reduced row echelon form of `H`.
    pub fn encoder(&self) -> SystematicEncoder {
        SystematicEncoder::new(self)
    }
}

/// Shipped rate-0.26 code of length 16384, built with [`peg`] from
/// [`peg::DegreeProfile::shipped`] and seed [`peg::SHIPPED_SEED`].
pub const SHIPPED_CODE_ALIST: &str = include_str!("../../data/peg_n16384_r026.alist");

pub fn shipped_code() -> ParityCheckMatrix {
    ParityCheckMatrix::from_alist(SHIPPED_CODE_ALIST).expect("bundled alist is well formed")
}

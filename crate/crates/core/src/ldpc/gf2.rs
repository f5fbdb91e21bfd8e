//! Dense GF(2) elimination on bit-packed rows.

use super::ParityCheckMatrix;

#[derive(Clone)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn zeros(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        (self.0[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }

    /// `self ^= other` on words from `from_word` onward.
    #[inline]
    fn xor_from(&mut self, other: &BitRow, from_word: usize) {
        for (a, b) in self.0[from_word..].iter_mut().zip(&other.0[from_word..]) {
            *a ^= b;
        }
    }
}

fn dense_rows(h: &ParityCheckMatrix) -> Vec<BitRow> {
    (0..h.n_checks())
        .map(|c| {
            let mut row = BitRow::zeros(h.n_vars());
            for v in h.check_vars(c) {
                row.flip(v);
            }
            row
        })
        .collect()
}

/// Row echelon form; returns the pivot column of each of the first `rank`
/// rows. With `reduce` the pivot columns are also cleared above the pivot.
fn eliminate(rows: &mut [BitRow], n: usize, reduce: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let (above, pivot) = head.split_at_mut(r);
        let pivot = &pivot[0];
        let word = col / 64;
        for row in tail.iter_mut() {
            if row.get(col) {
                row.xor_from(pivot, word);
            }
        }
        if reduce {
            for row in above.iter_mut() {
                if row.get(col) {
                    row.xor_from(pivot, word);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub(super) fn rank(h: &ParityCheckMatrix) -> usize {
    let mut rows = dense_rows(h);
    eliminate(&mut rows, h.n_vars(), false).len()
}

/// Maps information bits onto codewords of `H`.
///
/// The non-pivot columns of the reduced echelon form carry the information
/// bits; each pivot bit is the parity of the information bits in its row.
pub struct SystematicEncoder {
    n: usize,
    pivots: Vec<usize>,
    info_positions: Vec<usize>,
    rows: Vec<BitRow>,
}

impl SystematicEncoder {
    pub(super) fn new(h: &ParityCheckMatrix) -> Self {
        let n = h.n_vars();
        let mut rows = dense_rows(h);
        let pivots = eliminate(&mut rows, n, true);
        rows.truncate(pivots.len());
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let info_positions = (0..n).filter(|&i| !is_pivot[i]).collect();
        Self {
            n,
            pivots,
            info_positions,
            rows,
        }
    }

    /// Number of information bits, `n - rank(H)`.
    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    /// Positions of the information bits inside a codeword.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn encode(&self, info: &[u8]) -> Vec<u8> {
        assert_eq!(info.len(), self.k(), "information word length");
        let mut word = vec![0u8; self.n];
        let mut packed = BitRow::zeros(self.n);
        for (&pos, &b) in self.info_positions.iter().zip(info) {
            if b & 1 == 1 {
                word[pos] = 1;
                packed.flip(pos);
            }
        }
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let parity = row
                .0
                .iter()
                .zip(&packed.0)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            word[p] = parity as u8;
        }
        word
    }
}

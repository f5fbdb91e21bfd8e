//! Orthogonal anticommuting matrix families and the rotations they generate.
//!
//! For `n` in {1, 2, 4, 8} there is a family of signed permutation matrices
//! `A_1 = I, A_2, ..., A_n` with `A_i A_j + A_j A_i = -2 δ_ij I` for `i, j > 1`.
//! For any unit vector `x` the images `A_i x` form an orthonormal basis, so the
//! coordinates `alpha_i = <A_i x, y>` of a second unit vector `y` describe the
//! orthogonal map `M = Σ alpha_i A_i` that sends `x` onto `y`.
//!
//! The concrete families are built from tensor products of the four 2x2
//! matrices
//!
//! ```text
//! K0 = [1 0]   K1 = [0 1]   K2 = [0 -1]   K3 = [1  0]
//!      [0 1]        [1 0]        [1  0]        [0 -1]
//! ```

use nalgebra::DMatrix;
use thiserror::Error;

/// Tolerance on the norm of vectors that must lie on the unit sphere.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("no orthogonal anticommuting family exists in dimension {0} (only 1, 2, 4 and 8)")]
    InvalidDimension(usize),
    #[error("dimension mismatch: family has dimension {expected}, got a vector of length {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{which} is not a unit vector (norm {norm})")]
    NotUnit { which: &'static str, norm: f64 },
}

/// A matrix with exactly one `±1` entry per row and column.
///
/// Row `i` has the entry `sign[i]` in column `perm[i]`, so applying the
/// matrix to `v` yields `out[i] = sign[i] * v[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermMatrix {
    perm: Vec<usize>,
    sign: Vec<i8>,
}

impl SignedPermMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            sign: vec![1; n],
        }
    }

    /// Builds a signed permutation from its row description.
    ///
    /// Returns `None` when `perm` is not a permutation of `0..n`, when the
    /// lengths differ, or when a sign is not `±1`.
    pub fn new(perm: Vec<usize>, sign: Vec<i8>) -> Option<Self> {
        if perm.len() != sign.len() || sign.iter().any(|&s| s != 1 && s != -1) {
            return None;
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return None;
            }
        }
        Some(Self { perm, sign })
    }

    /// One of the 2x2 building blocks `K0..K3`.
    pub fn k(index: usize) -> Self {
        let (perm, sign) = match index {
            0 => (vec![0, 1], vec![1, 1]),
            1 => (vec![1, 0], vec![1, 1]),
            2 => (vec![1, 0], vec![-1, 1]),
            3 => (vec![0, 1], vec![1, -1]),
            _ => panic!("K index must be in 0..4, got {index}"),
        };
        Self { perm, sign }
    }

    /// `K_{i1} ⊗ K_{i2} ⊗ ...`; the empty product is the 1x1 identity.
    pub fn k_product(indices: &[usize]) -> Self {
        indices
            .iter()
            .fold(Self::identity(1), |acc, &i| acc.kron(&Self::k(i)))
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn sign(&self) -> &[i8] {
        &self.sign
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let nb = other.dim();
        let n = self.dim() * nb;
        let mut perm = Vec::with_capacity(n);
        let mut sign = Vec::with_capacity(n);
        for (pa, sa) in self.perm.iter().zip(&self.sign) {
            for (pb, sb) in other.perm.iter().zip(&other.sign) {
                perm.push(pa * nb + pb);
                sign.push(sa * sb);
            }
        }
        Self { perm, sign }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let sign = self
            .perm
            .iter()
            .zip(&self.sign)
            .map(|(&p, &s)| s * other.sign[p])
            .collect();
        Self { perm, sign }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut sign = vec![0; n];
        for (row, (&col, &s)) in self.perm.iter().zip(&self.sign).enumerate() {
            perm[col] = row;
            sign[col] = s;
        }
        Self { perm, sign }
    }

    /// Row-major dense integer matrix.
    pub fn to_dense(&self) -> Vec<Vec<i32>> {
        let n = self.dim();
        let mut m = vec![vec![0; n]; n];
        for (row, (&col, &s)) in self.perm.iter().zip(&self.sign).enumerate() {
            m[row][col] = i32::from(s);
        }
        m
    }

    /// `out = self · v`.
    #[inline]
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        for ((o, &p), &s) in out.iter_mut().zip(&self.perm).zip(&self.sign) {
            *o = f64::from(s) * v[p];
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, &mut out);
        out
    }
}

/// Tensor indices of the families `A_1..A_n`, transcribed from the tables of
/// `K_{i1..il}` products.
fn family_indices(n: usize) -> Option<&'static [&'static [usize]]> {
    const A1: &[&[usize]] = &[&[]];
    const A2: &[&[usize]] = &[&[0], &[2]];
    const A4: &[&[usize]] = &[&[0, 0], &[3, 2], &[2, 0], &[1, 2]];
    const A8: &[&[usize]] = &[
        &[0, 0, 0],
        &[3, 3, 2],
        &[3, 2, 0],
        &[3, 1, 2],
        &[2, 0, 0],
        &[1, 0, 2],
        &[1, 2, 3],
        &[1, 2, 1],
    ];
    match n {
        1 => Some(A1),
        2 => Some(A2),
        4 => Some(A4),
        8 => Some(A8),
        _ => None,
    }
}

/// The family `A_1..A_n` of orthogonal, pairwise anticommuting matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthoFamily {
    matrices: Vec<SignedPermMatrix>,
}

/// Coordinates of the target vector in the basis `{A_i x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationCoeffs {
    pub alpha: Vec<f64>,
}

impl RotationCoeffs {
    pub fn new(alpha: Vec<f64>) -> Self {
        Self { alpha }
    }

    /// Coefficients of the identity map.
    pub fn identity(n: usize) -> Self {
        let mut alpha = vec![0.0; n];
        alpha[0] = 1.0;
        Self { alpha }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.alpha)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Builds the family for dimension `n ∈ {1, 2, 4, 8}`.
pub fn build_family(n: usize) -> Result<OrthoFamily, AlgebraError> {
    OrthoFamily::new(n)
}

impl OrthoFamily {
    pub fn new(n: usize) -> Result<Self, AlgebraError> {
        let indices = family_indices(n).ok_or(AlgebraError::InvalidDimension(n))?;
        let matrices = indices
            .iter()
            .map(|idx| SignedPermMatrix::k_product(idx))
            .collect();
        Ok(Self { matrices })
    }

    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[SignedPermMatrix] {
        &self.matrices
    }

    fn check_len(&self, v: &[f64]) -> Result<(), AlgebraError> {
        if v.len() != self.dim() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    fn check_unit(&self, v: &[f64], which: &'static str) -> Result<(), AlgebraError> {
        self.check_len(v)?;
        let n = norm(v);
        if (n - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(AlgebraError::NotUnit { which, norm: n });
        }
        Ok(())
    }

    /// `alpha_i = <A_i x, y>` for unit vectors `x` and `y`.
    pub fn rotation_coeffs(&self, x: &[f64], y: &[f64]) -> Result<RotationCoeffs, AlgebraError> {
        self.check_unit(x, "x")?;
        self.check_unit(y, "y")?;
        let alpha = self
            .matrices
            .iter()
            .map(|a| {
                a.perm
                    .iter()
                    .zip(&a.sign)
                    .zip(y)
                    .map(|((&p, &s), &yr)| f64::from(s) * x[p] * yr)
                    .sum()
            })
            .collect();
        Ok(RotationCoeffs { alpha })
    }

    /// `out = (Σ alpha_i A_i) · v` without allocating.
    pub fn apply_rotation_into(
        &self,
        coeffs: &RotationCoeffs,
        v: &[f64],
        out: &mut [f64],
    ) -> Result<(), AlgebraError> {
        self.check_len(&coeffs.alpha)?;
        self.check_len(v)?;
        self.check_len(out)?;
        out.fill(0.0);
        for (a, &c) in self.matrices.iter().zip(&coeffs.alpha) {
            for ((o, &p), &s) in out.iter_mut().zip(&a.perm).zip(&a.sign) {
                *o += c * f64::from(s) * v[p];
            }
        }
        Ok(())
    }

    /// `(Σ alpha_i A_i) · v`.
    pub fn apply_rotation(&self, coeffs: &RotationCoeffs, v: &[f64]) -> Result<Vec<f64>, AlgebraError> {
        let mut out = vec![0.0; self.dim()];
        self.apply_rotation_into(coeffs, v, &mut out)?;
        Ok(out)
    }

    /// Dense `Σ alpha_i A_i`, used as a reference in tests.
    pub fn rotation_as_dense(&self, coeffs: &RotationCoeffs) -> Result<DMatrix<f64>, AlgebraError> {
        self.check_len(&coeffs.alpha)?;
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (a, &c) in self.matrices.iter().zip(&coeffs.alpha) {
            for (row, (&col, &s)) in a.perm.iter().zip(&a.sign).enumerate() {
                m[(row, col)] += c * f64::from(s);
            }
        }
        Ok(m)
    }

    /// Checks `A_1 = I`, `A_i^T A_i = I` and `{A_i, A_j} = -2 δ_ij I` for
    /// `i, j > 1` in exact integer arithmetic.
    pub fn verify(&self) -> bool {
        let n = self.dim();
        let dense: Vec<_> = self.matrices.iter().map(|a| a.to_dense()).collect();
        let identity = SignedPermMatrix::identity(n).to_dense();
        if dense[0] != identity {
            return false;
        }
        for a in &self.matrices {
            if a.transpose().compose(a) != SignedPermMatrix::identity(n) {
                return false;
            }
        }
        for i in 1..n {
            for j in 1..n {
                let ab = int_matmul(&dense[i], &dense[j]);
                let ba = int_matmul(&dense[j], &dense[i]);
                let expected = if i == j { -2 } else { 0 };
                for r in 0..n {
                    for c in 0..n {
                        let want = if r == c { expected } else { 0 };
                        if ab[r][c] + ba[r][c] != want {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

fn int_matmul(a: &[Vec<i32>], b: &[Vec<i32>]) -> Vec<Vec<i32>> {
    let n = a.len();
    let mut out = vec![vec![0; n]; n];
    for r in 0..n {
        for k in 0..n {
            if a[r][k] != 0 {
                for c in 0..n {
                    out[r][c] += a[r][k] * b[k][c];
                }
            }
        }
    }
    out
}

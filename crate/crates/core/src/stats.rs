//! Two-sample Kolmogorov-Smirnov test used by the leakage checks.

/// Asymptotic coefficient `c(α)` of the two-sample KS critical value at
/// `α = 0.01`.
pub const KS_C_ONE_PERCENT: f64 = 1.628;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    /// `sup |F_a - F_b|`.
    pub statistic: f64,
    /// `c(α) · √((n + m) / (n m))`.
    pub critical: f64,
}

impl KsOutcome {
    /// True when the samples are compatible with a common distribution.
    pub fn passes(&self) -> bool {
        self.statistic < self.critical
    }
}

/// Largest distance between the two empirical distribution functions.
///
/// # Panics
/// If either sample is empty or contains NaN.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs two non-empty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("NaN in KS sample"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("NaN in KS sample"));
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        // step past every copy of the smallest remaining value in both samples
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

pub fn ks_critical(c_alpha: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    c_alpha * ((n + m) / (n * m)).sqrt()
}

/// Two-sample test at the 1% level.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsOutcome {
    KsOutcome {
        statistic: ks_statistic(a, b),
        critical: ks_critical(KS_C_ONE_PERCENT, a.len(), b.len()),
    }
}

//! Scalar figures of merit for autocorrelations, the Chebyshev matrix norm and
//! the Welch lower bound for sequence sets.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::correlation::{CorrelationKind, CorrelationProfile};
use crate::error::{Error, Result};
use crate::C64;

/// Floor applied to every dB value so that exact zeros stay representable.
pub const DB_FLOOR: f64 = -400.0;

/// `20 log10(ratio)`, clamped below at [`DB_FLOOR`].
pub fn to_db(ratio: f64) -> f64 {
    if ratio <= 0.0 {
        return DB_FLOOR;
    }
    (20.0 * ratio.log10()).max(DB_FLOOR)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Integrated side-lobe level over lags `1..N`.
    pub isl: f64,
    /// Peak side-lobe level over every non-zero lag.
    pub psl: f64,
    /// Peak side-lobe level over the suppression window, lags `1..Q`.
    pub window_psl: f64,
    /// Peak correlation level in dB, `20 log10(PSL / r_0)`.
    pub pcl_db: f64,
    /// Modified merit factor over the suppression window; `+inf` when the
    /// window is exactly zero.
    pub mmf: f64,
    /// Modified peak correlation level: window peak over `r_0`.
    pub mpcl: f64,
    /// `(lag, 20 log10 |r_k / r_0|)` for `k = 1..N`.
    pub normalized_autocorr_db: Vec<(usize, f64)>,
    /// Suppression window size.
    pub q: usize,
}

/// Computes ISL, PSL, PCL, MMF and MPCL for an autocorrelation with
/// suppression window `q` (lags `1..q`).
pub fn compute_metrics(profile: &CorrelationProfile, q: usize) -> Result<MetricsReport> {
    if profile.kind() != CorrelationKind::Auto {
        return Err(Error::invalid("profile", "metrics need an autocorrelation profile"));
    }
    let n = profile.source_len();
    if q < 2 || q > n {
        return Err(Error::invalid("q", format!("need 2 <= Q <= N = {n}, got {q}")));
    }
    let lags = profile.non_negative();
    let r0 = lags[0].re;
    if r0 <= 0.0 {
        return Err(Error::Degenerate("r_0 is zero, ratios are undefined".into()));
    }
    let side = &lags[1..];
    let isl: f64 = side.iter().map(|z| z.norm_sqr()).sum();
    let psl = side.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let window = &lags[1..q];
    let window_energy: f64 = window.iter().map(|z| z.norm_sqr()).sum();
    let window_peak = window.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let nf = n as f64;
    let mmf = if window_energy > 0.0 {
        nf * nf / (2.0 * window_energy)
    } else {
        f64::INFINITY
    };
    let normalized_autocorr_db = side
        .iter()
        .enumerate()
        .map(|(i, z)| (i + 1, to_db(z.norm() / r0)))
        .collect();
    Ok(MetricsReport {
        isl,
        psl,
        window_psl: window_peak,
        pcl_db: to_db(psl / r0),
        mmf,
        mpcl: window_peak / r0,
        normalized_autocorr_db,
        q,
    })
}

/// Chebyshev (entry-wise max-modulus) norm of a complex matrix.
pub fn chebyshev_norm(a: &DMatrix<C64>) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::invalid("matrix", "Chebyshev norm of an empty matrix"));
    }
    let mut m: f64 = 0.0;
    for z in a.iter() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::invalid("matrix", "non-finite entry"));
        }
        m = m.max(z.norm());
    }
    Ok(m)
}

/// Welch lower bound on the largest correlation side-lobe of a set of `m`
/// sequences of length `n`.
///
/// For unit-energy sequences the bound is `sqrt((M-1) / (M(2N-1) - 1))`; for
/// unimodular sequences (energy `N`) it scales by `N`.
pub fn welch_bound(m: usize, n: usize, unimodular: bool) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("m", "set size must be at least 1"));
    }
    if n == 0 {
        return Err(Error::invalid("n", "length must be at least 1"));
    }
    let denom = (m * (2 * n - 1)) as f64 - 1.0;
    if denom <= 0.0 {
        return Err(Error::invalid("m", "M(2N-1) = 1 leaves the bound undefined"));
    }
    let b = (((m - 1) as f64) / denom).sqrt();
    Ok(if unimodular { n as f64 * b } else { b })
}

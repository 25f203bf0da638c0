//! Aperiodic auto- and cross-correlation.
//!
//! Lags follow `r_xy(k) = sum_{n=k+1}^{N} x_n conj(y_{n-k})` for `k >= 0`, with
//! negative lags obtained through `r_xy(-k) = conj(r_yx(k))`.

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::sequence::ComplexSequence;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    Auto,
    Cross,
}

/// All `2N - 1` lags of an auto- or cross-correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    kind: CorrelationKind,
    n: usize,
    // lags[k + n - 1] holds lag k, k in -(n-1)..=(n-1)
    lags: Vec<C64>,
}

impl CorrelationProfile {
    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    /// Length of the source sequence(s).
    pub fn source_len(&self) -> usize {
        self.n
    }

    /// Value at lag `k`, or `None` outside `-(N-1)..=N-1`.
    pub fn lag(&self, k: isize) -> Option<C64> {
        let idx = k + self.n as isize - 1;
        if idx < 0 {
            return None;
        }
        self.lags.get(idx as usize).copied()
    }

    /// Lags `0..N` in order.
    pub fn non_negative(&self) -> &[C64] {
        &self.lags[self.n - 1..]
    }

    /// Iterator over `(lag, value)` for every lag from `-(N-1)` to `N-1`.
    pub fn iter(&self) -> impl Iterator<Item = (isize, C64)> + '_ {
        let off = self.n as isize - 1;
        self.lags
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as isize - off, v))
    }

    /// Largest modulus over every lag.
    pub fn peak(&self) -> f64 {
        self.lags.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn positive_lags(x: &[C64], y: &[C64], max_lag: usize) -> Vec<C64> {
    let n = x.len();
    (0..max_lag.min(n))
        .map(|k| {
            x[k..]
                .iter()
                .zip(&y[..n - k])
                .map(|(a, b)| a * b.conj())
                .sum()
        })
        .collect()
}

/// Autocorrelation lags `r_0..r_{max_lag-1}` by direct summation, `O(N * max_lag)`.
pub fn autocorrelation_lags(x: &ComplexSequence, max_lag: usize) -> Vec<C64> {
    positive_lags(x.samples(), x.samples(), max_lag)
}

pub fn autocorrelation(x: &ComplexSequence) -> CorrelationProfile {
    let n = x.len();
    let pos = autocorrelation_lags(x, n);
    let mut lags = Vec::with_capacity(2 * n - 1);
    lags.extend(pos[1..].iter().rev().map(|z| z.conj()));
    lags.extend(pos.iter().copied());
    // r_0 is real by construction; drop the round-off imaginary part
    lags[n - 1].im = 0.0;
    CorrelationProfile {
        kind: CorrelationKind::Auto,
        n,
        lags,
    }
}

pub fn cross_correlation(x: &ComplexSequence, y: &ComplexSequence) -> Result<CorrelationProfile> {
    if x.len() != y.len() {
        return Err(Error::invalid(
            "sequence",
            format!("cross-correlation needs equal lengths, got {} and {}", x.len(), y.len()),
        ));
    }
    let n = x.len();
    let xy = positive_lags(x.samples(), y.samples(), n);
    let yx = positive_lags(y.samples(), x.samples(), n);
    let mut lags = Vec::with_capacity(2 * n - 1);
    lags.extend(yx[1..].iter().rev().map(|z| z.conj()));
    lags.extend(xy);
    Ok(CorrelationProfile {
        kind: CorrelationKind::Cross,
        n,
        lags,
    })
}

/// Cross-correlation peak: largest `|r_xy(k)|` over all lags.
pub fn ccp(x: &ComplexSequence, y: &ComplexSequence) -> Result<f64> {
    Ok(cross_correlation(x, y)?.peak())
}

/// Moduli `|r_k|` for `k = 0..N` through a zero-padded FFT.
///
/// Absolute accuracy is about `1e-16 * N * r_0`, adequate for tracing the
/// full-lag PSL/ISL of long sequences but not for the deep side-lobes inside a
/// suppression window; use [`autocorrelation_lags`] there.
pub fn autocorrelation_magnitudes_fft(x: &ComplexSequence) -> Vec<f64> {
    let n = x.len();
    let size = (2 * n - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut buf = vec![C64::new(0.0, 0.0); size];
    buf[..n].copy_from_slice(x.samples());
    fwd.process(&mut buf);
    for z in buf.iter_mut() {
        *z = C64::new(z.norm_sqr(), 0.0);
    }
    inv.process(&mut buf);
    // ifft(|X|^2)[k] = sum_n x_{n+k} conj(x_n) = r_k, scaled by `size`
    let scale = 1.0 / size as f64;
    buf[..n].iter().map(|z| z.norm() * scale).collect()
}

//! Complex sequences, the dictionary order on complex numbers, and the
//! classic reference sequences (Golomb, Chu, Barker-13).

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// A non-empty sequence of finite complex samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct ComplexSequence {
    samples: Vec<C64>,
}

impl ComplexSequence {
    pub fn new(samples: Vec<C64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("sequence", "length must be at least 1"));
        }
        if let Some(i) = samples.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid(
                "sequence",
                format!("sample {i} is not finite ({})", samples[i]),
            ));
        }
        Ok(Self { samples })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Builds a sequence whose samples are known to be finite and non-empty.
    pub(crate) fn from_vec_unchecked(samples: Vec<C64>) -> Self {
        debug_assert!(!samples.is_empty());
        Self { samples }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.samples
    }

    /// Total energy `sum |x_n|^2`, equal to the zero-lag autocorrelation.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest sample modulus.
    pub fn peak_amplitude(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Peak-to-average power ratio of the samples.
    pub fn papr(&self) -> f64 {
        let avg = self.energy() / self.len() as f64;
        if avg == 0.0 {
            return f64::INFINITY;
        }
        self.peak_amplitude().powi(2) / avg
    }

    /// Largest sample-wise distance to another sequence of the same length.
    pub fn max_abs_diff(&self, other: &ComplexSequence) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::invalid(
                "sequence",
                format!("length mismatch: {} vs {}", self.len(), other.len()),
            ));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl std::ops::Index<usize> for ComplexSequence {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.samples[i]
    }
}

impl TryFrom<Vec<C64>> for ComplexSequence {
    type Error = Error;

    fn try_from(v: Vec<C64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ComplexSequence> for Vec<C64> {
    fn from(s: ComplexSequence) -> Self {
        s.samples
    }
}

/// Dictionary order on complex numbers: the imaginary part decides, the real
/// part breaks ties.
///
/// Returns `Ordering::Less` when `a` precedes `b`. Inputs are expected to be
/// finite; NaN components compare as equal.
pub fn lex_compare(a: C64, b: C64) -> Ordering {
    a.im.partial_cmp(&b.im)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal))
}

/// Golomb polyphase sequence `G(n) = exp(j (n-1) n pi / N)`, `n = 1..N`.
pub fn golomb(n: usize) -> Result<ComplexSequence> {
    if n == 0 {
        return Err(Error::invalid("n", "Golomb length must be at least 1"));
    }
    let nf = n as f64;
    let samples = (1..=n)
        .map(|k| {
            let k = k as f64;
            C64::from_polar(1.0, (k - 1.0) * k * PI / nf)
        })
        .collect();
    Ok(ComplexSequence::from_vec_unchecked(samples))
}

/// Chu sequence: `exp(j (n-1)^2 pi / N)` for even `n`, `exp(j (n-1) n pi / N)`
/// for odd `n`, with 1-based `n`.
pub fn chu(n: usize) -> Result<ComplexSequence> {
    if n == 0 {
        return Err(Error::invalid("n", "Chu length must be at least 1"));
    }
    let nf = n as f64;
    let samples = (1..=n)
        .map(|k| {
            let kf = k as f64;
            let phase = if k % 2 == 0 {
                (kf - 1.0) * (kf - 1.0) * PI / nf
            } else {
                (kf - 1.0) * kf * PI / nf
            };
            C64::from_polar(1.0, phase)
        })
        .collect();
    Ok(ComplexSequence::from_vec_unchecked(samples))
}

/// The length-13 Barker code.
pub fn barker13() -> ComplexSequence {
    const CODE: [f64; 13] = [1., 1., 1., 1., 1., -1., -1., 1., 1., -1., 1., -1., 1.];
    ComplexSequence::from_vec_unchecked(CODE.iter().map(|&v| C64::new(v, 0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(ComplexSequence::new(vec![]).is_err());
        assert!(ComplexSequence::new(vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(ComplexSequence::new(vec![C64::new(1.0, f64::INFINITY)]).is_err());
        assert!(ComplexSequence::new(vec![C64::new(1.0, 2.0)]).is_ok());
    }

    #[test]
    fn lex_examples() {
        // imaginary part dominates
        assert_eq!(lex_compare(C64::new(5.0, 1.0), C64::new(1.0, 2.0)), Ordering::Less);
        // tie on imaginary part, real part decides
        assert_eq!(lex_compare(C64::new(1.0, 2.0), C64::new(3.0, 2.0)), Ordering::Less);
        let a = C64::new(0.25, -3.0);
        assert_eq!(lex_compare(a, a), Ordering::Equal);
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        // small integer grid so that ties on both components actually occur
        (-3i32..=3, -3i32..=3).prop_map(|(r, i)| C64::new(r as f64 * 0.5, i as f64 * 0.5))
    }

    proptest! {
        #[test]
        fn lex_is_total_order(a in arb_c64(), b in arb_c64(), c in arb_c64()) {
            let ab = lex_compare(a, b);
            prop_assert_eq!(ab, lex_compare(b, a).reverse());
            if ab == Ordering::Equal {
                prop_assert_eq!(a, b);
            }
            if lex_compare(a, b) != Ordering::Greater && lex_compare(b, c) != Ordering::Greater {
                prop_assert_ne!(lex_compare(a, c), Ordering::Greater);
            }
        }
    }

    #[test]
    fn golomb_and_chu_are_unimodular() {
        for n in [1, 2, 7, 13, 64, 101] {
            let g = golomb(n).unwrap();
            let c = chu(n).unwrap();
            assert_eq!(g[0], C64::new(1.0, 0.0));
            for z in g.samples().iter().chain(c.samples()) {
                assert!((z.norm() - 1.0).abs() < 1e-15);
            }
        }
        assert!(golomb(0).is_err());
        assert!(chu(0).is_err());
    }

    #[test]
    fn chu_parity_branches() {
        let n = 8;
        let c = chu(n).unwrap();
        // n = 2 (even): exp(j * 1 * pi / 8); n = 3 (odd): exp(j * 6 * pi / 8)
        assert!((c[1] - C64::from_polar(1.0, PI / 8.0)).norm() < 1e-15);
        assert!((c[2] - C64::from_polar(1.0, 6.0 * PI / 8.0)).norm() < 1e-15);
    }

    #[test]
    fn barker_values() {
        let b = barker13();
        assert_eq!(b.len(), 13);
        assert_eq!(b.energy(), 13.0);
        assert!(b.samples().iter().all(|z| z.im == 0.0 && z.re.abs() == 1.0));
    }
}

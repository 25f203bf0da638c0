//! Bernoulli-type chaotic maps used to seed waveform designs.
//!
//! The plain map `x -> x/λ` on `(0, 1-λ)`, `x -> (x-(1-λ))/λ` otherwise,
//! produces strictly positive samples. The modified map
//! `x -> B x + A` (`x < 0`), `x -> B x - A` (`x > 0`) lives on `(-A, A)` and
//! produces sign-balanced samples; it is chaotic for `1 < B <= 2`, with
//! Lyapunov exponent `log B`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::ComplexSequence;
use crate::C64;

pub const DEFAULT_A: f64 = 1.0;
pub const DEFAULT_B: f64 = 1.9;
pub const DEFAULT_BURN_IN: usize = 128;

// Replacement for an iterate that lands exactly on 0, relative to the scale of
// the state space. The event has measure zero but is reachable in floating
// point (e.g. the doubling map loses one bit per step).
const ZERO_NUDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChaoticMap {
    Bernoulli { lambda: f64 },
    Modified { a: f64, b: f64 },
}

impl ChaoticMap {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ChaoticMap::Bernoulli { lambda } => {
                // Below 1/2 the first branch maps (0, 1-λ) beyond 1.
                if !(0.5..1.0).contains(&lambda) {
                    return Err(Error::invalid(
                        "lambda",
                        format!("Bernoulli map needs 1/2 <= lambda < 1, got {lambda}"),
                    ));
                }
            }
            ChaoticMap::Modified { a, b } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::invalid("a", format!("amplitude must be positive, got {a}")));
                }
                if !(b > 1.0 && b <= 2.0) {
                    return Err(Error::invalid("b", format!("slope must satisfy 1 < B <= 2, got {b}")));
                }
            }
        }
        Ok(())
    }

    /// One application of the map.
    pub fn step(&self, x: f64) -> f64 {
        let next = match *self {
            ChaoticMap::Bernoulli { lambda } => {
                if x < 1.0 - lambda {
                    x / lambda
                } else {
                    (x - (1.0 - lambda)) / lambda
                }
            }
            ChaoticMap::Modified { a, b } => {
                if x < 0.0 {
                    b * x + a
                } else {
                    b * x - a
                }
            }
        };
        if next == 0.0 {
            ZERO_NUDGE * self.scale()
        } else {
            next
        }
    }

    /// `|f'(x)|`, constant on each branch.
    pub fn slope(&self, _x: f64) -> f64 {
        match *self {
            ChaoticMap::Bernoulli { lambda } => 1.0 / lambda,
            ChaoticMap::Modified { b, .. } => b,
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            ChaoticMap::Bernoulli { .. } => 1.0,
            ChaoticMap::Modified { a, .. } => a,
        }
    }

    fn contains(&self, x: f64) -> bool {
        match *self {
            ChaoticMap::Bernoulli { .. } => x > 0.0 && x < 1.0,
            ChaoticMap::Modified { a, .. } => x > -a && x < a && x != 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaoticParams {
    pub map: ChaoticMap,
    pub x0: f64,
    /// Iterates discarded before the first output sample.
    pub burn_in: usize,
}

impl ChaoticParams {
    /// Modified map with the default `A = 1`, `B = 1.9` and burn-in.
    pub fn modified(x0: f64) -> Self {
        Self {
            map: ChaoticMap::Modified {
                a: DEFAULT_A,
                b: DEFAULT_B,
            },
            x0,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn bernoulli(lambda: f64, x0: f64) -> Self {
        Self {
            map: ChaoticMap::Bernoulli { lambda },
            x0,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.map.validate()?;
        if !self.map.contains(self.x0) {
            let domain = match self.map {
                ChaoticMap::Bernoulli { .. } => "(0, 1)".to_string(),
                ChaoticMap::Modified { a, .. } => format!("(-{a}, {a}) without 0"),
            };
            return Err(Error::invalid("x0", format!("{} is outside {domain}", self.x0)));
        }
        Ok(())
    }
}

/// `len` iterates following the burn-in; the first output is `f(x0)` when
/// `burn_in = 0`.
pub fn orbit(params: &ChaoticParams, len: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let map = params.map;
    let mut x = params.x0;
    for _ in 0..params.burn_in {
        x = map.step(x);
    }
    Ok((0..len)
        .map(|_| {
            x = map.step(x);
            x
        })
        .collect())
}

pub fn bernoulli_sequence(params: &ChaoticParams, len: usize) -> Result<Vec<f64>> {
    if !matches!(params.map, ChaoticMap::Bernoulli { .. }) {
        return Err(Error::invalid("map", "expected the Bernoulli map"));
    }
    orbit(params, len)
}

pub fn modified_bernoulli_sequence(params: &ChaoticParams, len: usize) -> Result<Vec<f64>> {
    if !matches!(params.map, ChaoticMap::Modified { .. }) {
        return Err(Error::invalid("map", "expected the modified Bernoulli map"));
    }
    orbit(params, len)
}

/// Orbit average of `log |f'(x)|` over `n_steps` iterates (at least `10^4`).
pub fn lyapunov_estimate(params: &ChaoticParams, n_steps: usize) -> Result<f64> {
    if n_steps < 10_000 {
        return Err(Error::invalid("n_steps", format!("need at least 10000 steps, got {n_steps}")));
    }
    let xs = orbit(params, n_steps)?;
    let total: f64 = std::iter::once(params.x0)
        .chain(xs[..n_steps - 1].iter().copied())
        .map(|x| params.map.slope(x).ln())
        .sum();
    Ok(total / n_steps as f64)
}

/// `|x_n - y_n|` for the orbits of `x0` and `x0 + delta`, both without burn-in.
pub fn orbit_separation(params: &ChaoticParams, delta: f64, steps: usize) -> Result<Vec<f64>> {
    let base = params.with_burn_in(0);
    let shifted = ChaoticParams {
        x0: params.x0 + delta,
        ..base
    };
    let a = orbit(&base, steps)?;
    let b = orbit(&shifted, steps)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// Real samples, scaled to unit mean power.
    #[default]
    Raw,
    /// Unimodular samples `exp(i π u / A)`; plain-map samples in `(0, 1)` are
    /// first centered to `(-1, 1)` via `2u - 1`.
    Phase,
}

/// A length-`n` initial sequence from a chaotic orbit.
pub fn chaotic_init(params: &ChaoticParams, n: usize, encoding: Encoding) -> Result<ComplexSequence> {
    if n == 0 {
        return Err(Error::invalid("n", "length must be at least 1"));
    }
    let u = orbit(params, n)?;
    let samples: Vec<C64> = match encoding {
        Encoding::Raw => {
            let power = u.iter().map(|v| v * v).sum::<f64>() / n as f64;
            let s = power.sqrt();
            u.iter().map(|v| C64::new(v / s, 0.0)).collect()
        }
        Encoding::Phase => {
            let centered: Box<dyn Fn(f64) -> f64> = match params.map {
                ChaoticMap::Bernoulli { .. } => Box::new(|v| 2.0 * v - 1.0),
                ChaoticMap::Modified { a, .. } => Box::new(move |v| v / a),
            };
            u.iter().map(|&v| C64::from_polar(1.0, PI * centered(v))).collect()
        }
    };
    ComplexSequence::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doubling(x0: f64) -> ChaoticParams {
        ChaoticParams::bernoulli(0.5, x0).with_burn_in(0)
    }

    #[test]
    fn doubling_map_examples() {
        let xs = bernoulli_sequence(&doubling(0.3), 4).unwrap();
        for (x, e) in xs.iter().zip([0.6, 0.2, 0.4, 0.8]) {
            assert!((x - e).abs() < 1e-14);
        }
        let xs = bernoulli_sequence(&doubling(1.0 / 3.0), 4).unwrap();
        for (x, e) in xs.iter().zip([2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0]) {
            assert!((x - e).abs() < 1e-14);
        }
    }

    #[test]
    fn bernoulli_stays_in_unit_interval() {
        for lambda in [0.5, 1.0 / 1.9, 0.7] {
            let xs = bernoulli_sequence(&ChaoticParams::bernoulli(lambda, 0.123), 100_000).unwrap();
            assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0), "lambda {lambda}");
        }
    }

    #[test]
    fn modified_map_examples() {
        let p = ChaoticParams::modified(0.5).with_burn_in(0);
        let xs = modified_bernoulli_sequence(&p, 3).unwrap();
        for (x, e) in xs.iter().zip([-0.05, 0.905, 0.7195]) {
            assert!((x - e).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_zero_is_nudged() {
        let map = ChaoticMap::Modified { a: 2.0, b: 2.0 };
        assert_eq!(map.step(1.0), 2.0 * ZERO_NUDGE);
        let map = ChaoticMap::Bernoulli { lambda: 0.5 };
        assert_eq!(map.step(0.5), ZERO_NUDGE);
    }

    #[test]
    fn parameter_validation() {
        assert!(ChaoticParams::bernoulli(0.4, 0.3).validate().is_err());
        assert!(ChaoticParams::bernoulli(1.0, 0.3).validate().is_err());
        assert!(ChaoticParams::bernoulli(0.5, 0.0).validate().is_err());
        assert!(ChaoticParams::bernoulli(0.5, 1.0).validate().is_err());
        assert!(ChaoticParams::modified(0.0).validate().is_err());
        assert!(ChaoticParams::modified(1.0).validate().is_err());
        let bad_b = ChaoticParams {
            map: ChaoticMap::Modified { a: 1.0, b: 1.0 },
            ..ChaoticParams::modified(0.3)
        };
        assert_eq!(bad_b.validate().unwrap_err().field(), Some("b"));
        let bad_b = ChaoticParams {
            map: ChaoticMap::Modified { a: 1.0, b: 2.1 },
            ..ChaoticParams::modified(0.3)
        };
        assert!(bad_b.validate().is_err());
        assert!(bernoulli_sequence(&ChaoticParams::modified(0.3), 3).is_err());
        assert!(modified_bernoulli_sequence(&doubling(0.3), 3).is_err());
    }

    #[test]
    fn lyapunov_matches_log_slope() {
        let l = lyapunov_estimate(&doubling(0.3), 10_000).unwrap();
        assert!((l - 2f64.ln()).abs() < 1e-12);
        let p = ChaoticParams {
            map: ChaoticMap::Modified { a: 1.0, b: 1.0001 },
            ..ChaoticParams::modified(0.3)
        };
        let l = lyapunov_estimate(&p, 100_000).unwrap();
        assert!(l > 0.0 && (l - 1e-4).abs() < 1e-6);
        assert!(lyapunov_estimate(&p, 9_999).is_err());
    }

    #[test]
    fn encodings() {
        let p = ChaoticParams::modified(0.37);
        let raw = chaotic_init(&p, 100, Encoding::Raw).unwrap();
        assert!((raw.energy() / 100.0 - 1.0).abs() < 1e-12);
        assert!(raw.samples().iter().all(|z| z.im == 0.0));
        let phase = chaotic_init(&p, 100, Encoding::Phase).unwrap();
        assert!(phase.samples().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        let plain = chaotic_init(&ChaoticParams::bernoulli(0.6, 0.37), 50, Encoding::Phase).unwrap();
        assert!(plain.samples().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        assert!(chaotic_init(&p, 0, Encoding::Raw).is_err());
    }
}

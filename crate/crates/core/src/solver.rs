//! The cyclic design loop.
//!
//! Every cycle builds the convolution matrix of the current sequence, computes
//! its unitary factor `L` (dense SVD, or a randomized sketch for
//! [`Algorithm::Rpoca`]), and moves each sample to a center of its `Q` target
//! points in `sqrt(N)·L`. All samples of one cycle read the same `L`. The loop
//! stops when no sample moves by `epsilon` or more.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaos::{chaotic_init, ChaoticParams, Encoding};
use crate::correlation::{autocorrelation, autocorrelation_lags, autocorrelation_magnitudes_fft};
use crate::error::{Error, Result};
use crate::factorization::{
    exact_unitary_factor, randomized_unitary_factor_with, Completion, ConvolutionMatrix,
    RandomizedOptions, UnitaryFactor,
};
use crate::geometry::{lex_midpoint_of, qp_circle, rectangle_center_of, PointSet};
use crate::metrics::{compute_metrics, MetricsReport};
use crate::sequence::{barker13, chu, golomb, ComplexSequence};
use crate::C64;

pub const DEFAULT_EPSILON: f64 = 1e-12;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;
pub const DEFAULT_QP_DELTA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Exact smallest enclosing circle through iterated quadratic programs.
    Pmqa,
    /// Center of the bounding rectangle.
    Pmar,
    /// Lexicographic midpoint.
    Poca,
    /// Lexicographic midpoint with a randomized low-rank factor.
    Rpoca,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    #[default]
    None,
    /// Every sample projected to the unit circle.
    Unimodular,
    /// Every sample's modulus clamped to `a`.
    Papr { a: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Initialization {
    Golomb,
    Chu,
    Barker13,
    /// Orbit of a chaotic map (normally the modified Bernoulli map).
    Chaotic { params: ChaoticParams, encoding: Encoding },
    Explicit { sequence: ComplexSequence },
    /// Independent phases uniform on the unit circle.
    Random { seed: u64 },
}

impl Initialization {
    pub fn build(&self, n: usize) -> Result<ComplexSequence> {
        match self {
            Initialization::Golomb => golomb(n),
            Initialization::Chu => chu(n),
            Initialization::Barker13 => {
                if n != 13 {
                    return Err(Error::invalid("n", format!("Barker-13 initialization needs N = 13, got {n}")));
                }
                Ok(barker13())
            }
            Initialization::Chaotic { params, encoding } => chaotic_init(params, n, *encoding),
            Initialization::Explicit { sequence } => {
                if sequence.len() != n {
                    return Err(Error::invalid(
                        "init",
                        format!("explicit sequence has length {}, expected {n}", sequence.len()),
                    ));
                }
                Ok(sequence.clone())
            }
            Initialization::Random { seed } => {
                if n == 0 {
                    return Err(Error::invalid("n", "length must be at least 1"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let samples = (0..n)
                    .map(|_| C64::from_polar(1.0, 2.0 * PI * rng.random::<f64>()))
                    .collect();
                ComplexSequence::new(samples)
            }
        }
    }
}

/// Randomized factorization settings for [`Algorithm::Rpoca`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SketchConfig {
    pub rank: usize,
    /// Seeds the single ChaCha8 stream all sketches of a run are drawn from.
    pub seed: u64,
    pub power_iterations: usize,
    pub completion: Completion,
}

impl SketchConfig {
    pub fn new(rank: usize, seed: u64) -> Self {
        let tuned = RandomizedOptions::tuned(rank);
        Self {
            rank,
            seed,
            power_iterations: tuned.power_iterations,
            completion: tuned.completion,
        }
    }

    /// The plain range finder: no power iterations, no completion.
    pub fn literal(rank: usize, seed: u64) -> Self {
        Self {
            power_iterations: 0,
            completion: Completion::None,
            ..Self::new(rank, seed)
        }
    }

    fn options(&self) -> RandomizedOptions {
        RandomizedOptions {
            rank: self.rank,
            power_iterations: self.power_iterations,
            completion: self.completion,
        }
    }
}

impl Default for SketchConfig {
    fn default() -> Self {
        Self::new(4, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub n: usize,
    pub q: usize,
    /// Stop once every sample moves by less than this in one cycle.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub constraint: Constraint,
    pub qp_delta: f64,
    pub sketch: SketchConfig,
    pub init: Initialization,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, n: usize, q: usize) -> Self {
        Self {
            algorithm,
            n,
            q,
            epsilon: DEFAULT_EPSILON,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            constraint: Constraint::None,
            qp_delta: DEFAULT_QP_DELTA,
            sketch: SketchConfig::default(),
            init: Initialization::Golomb,
        }
    }

    pub fn with_init(mut self, init: Initialization) -> Self {
        self.init = init;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_constraint(mut self, constraint: Constraint) -> Self {
        self.constraint = constraint;
        self
    }

    pub fn with_qp_delta(mut self, qp_delta: f64) -> Self {
        self.qp_delta = qp_delta;
        self
    }

    pub fn with_sketch(mut self, sketch: SketchConfig) -> Self {
        self.sketch = sketch;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n", format!("need N >= 2, got {}", self.n)));
        }
        if self.q < 2 || self.q > self.n {
            return Err(Error::invalid("q", format!("need 2 <= Q <= N = {}, got {}", self.n, self.q)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", format!("must be positive, got {}", self.epsilon)));
        }
        if let Constraint::Papr { a } = self.constraint {
            if !(a >= 1.0 && a.is_finite()) {
                return Err(Error::invalid("papr", format!("amplitude bound must be >= 1, got {a}")));
            }
        }
        if self.algorithm == Algorithm::Pmqa && !(self.qp_delta > 0.0) {
            return Err(Error::invalid("qp_delta", format!("must be positive, got {}", self.qp_delta)));
        }
        if self.algorithm == Algorithm::Rpoca && (self.sketch.rank < 1 || self.sketch.rank > self.q) {
            return Err(Error::invalid(
                "sketch_rank",
                format!("need 1 <= S <= Q = {}, got {}", self.q, self.sketch.rank),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Peak side-lobe over all lags.
    pub psl: f64,
    pub isl: f64,
    /// Peak side-lobe over the suppression window, lags `1..Q`.
    pub window_psl: f64,
    /// Window peak over `r_0`.
    pub mpcl: f64,
    /// Largest sample change in this cycle, `‖X̃_new - X̃_old‖_∞`.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub sequence: ComplexSequence,
    pub iterations_used: usize,
    pub converged: bool,
    /// Cycle whose output was returned (0 for the initialization).
    pub best_iteration: usize,
    pub trace: Vec<IterationRecord>,
    pub initial_metrics: MetricsReport,
    pub metrics: MetricsReport,
}

/// Projects every sample onto the constraint set.
pub fn apply_constraint(x: &ComplexSequence, constraint: Constraint) -> ComplexSequence {
    let samples = x.samples().iter().map(|&z| project(z, constraint)).collect();
    ComplexSequence::from_vec_unchecked(samples)
}

fn project(z: C64, constraint: Constraint) -> C64 {
    match constraint {
        Constraint::None => z,
        Constraint::Unimodular => {
            let m = z.norm();
            if m == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                z / m
            }
        }
        Constraint::Papr { a } => {
            let m = z.norm();
            if m <= a {
                z
            } else {
                z * (a / m)
            }
        }
    }
}

/// `‖X̃_new - X̃_old‖_∞ < epsilon`. Each sample repeats `Q` times in `X̃`, so
/// this is the largest sample change.
pub fn stop_check(old: &ConvolutionMatrix, new: &ConvolutionMatrix, epsilon: f64) -> Result<bool> {
    if old.rows() != new.rows() || old.cols() != new.cols() {
        return Err(Error::invalid("matrix", "convolution matrices differ in shape"));
    }
    Ok(old.source().max_abs_diff(new.source())? < epsilon)
}

/// Window peak `max_{1 <= k < q} |r_k|` and its ratio to `r_0`.
fn window_peak(x: &ComplexSequence, q: usize) -> (f64, f64) {
    let lags = autocorrelation_lags(x, q);
    let peak = lags[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    (peak, peak / lags[0].re)
}

fn record(x: &ComplexSequence, q: usize, iteration: usize, delta: f64) -> IterationRecord {
    let mags = autocorrelation_magnitudes_fft(x);
    let (window_psl, mpcl) = window_peak(x, q);
    IterationRecord {
        iteration,
        psl: mags[1..].iter().copied().fold(0.0, f64::max),
        isl: mags[1..].iter().map(|m| m * m).sum(),
        window_psl,
        mpcl,
        delta,
    }
}

fn center(algorithm: Algorithm, mu: Vec<C64>, qp_delta: f64) -> Result<C64> {
    Ok(match algorithm {
        Algorithm::Pmqa => {
            if mu.iter().all(|z| z.im == 0.0) {
                // exact on the line
                let (lo, hi) = mu.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| {
                    (lo.min(z.re), hi.max(z.re))
                });
                C64::new((lo + hi) / 2.0, 0.0)
            } else {
                qp_circle(&PointSet::from_vec_unchecked(mu), qp_delta)?.center
            }
        }
        Algorithm::Pmar => rectangle_center_of(&mu),
        Algorithm::Poca | Algorithm::Rpoca => lex_midpoint_of(&mu),
    })
}

fn update(factor: &UnitaryFactor, config: &SolverConfig) -> Result<Vec<C64>> {
    let scale = (config.n as f64).sqrt();
    (0..config.n)
        .into_par_iter()
        .with_min_len(32)
        .map(|n| center(config.algorithm, factor.mu_set(n, scale), config.qp_delta))
        .map(|c| c.map(|z| project(z, config.constraint)))
        .collect()
}

/// Runs the design loop for `config`.
///
/// The returned sequence is the iterate with the smallest peak side-lobe over
/// the suppression window (the quantity being minimized), counting the
/// initialization; it is the final one whenever the loop is monotone.
pub fn design(config: &SolverConfig) -> Result<DesignResult> {
    config.validate()?;
    let init = config.init.build(config.n)?;
    if init.energy() == 0.0 {
        return Err(Error::Degenerate("initial sequence is all zeros".into()));
    }
    let initial_metrics = compute_metrics(&autocorrelation(&init), config.q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.sketch.seed);
    let options = config.sketch.options();

    let mut x = init.clone();
    let mut best = (initial_metrics.window_psl, 0usize, init);
    let mut trace = Vec::new();
    let mut converged = false;
    for iteration in 1..=config.max_iterations {
        let xt = ConvolutionMatrix::new(&x, config.q)?;
        let factor = match config.algorithm {
            Algorithm::Rpoca => randomized_unitary_factor_with(&xt, &options, &mut rng)?,
            _ => exact_unitary_factor(&xt)?,
        };
        let next = ComplexSequence::new(update(&factor, config)?)
            .map_err(|e| Error::Numerical(format!("update produced an invalid sequence: {e}")))?;
        let delta = next.max_abs_diff(&x)?;
        x = next;
        if x.energy() == 0.0 {
            return Err(Error::Degenerate(format!("sequence collapsed to zero at iteration {iteration}")));
        }
        let rec = record(&x, config.q, iteration, delta);
        if rec.window_psl < best.0 {
            best = (rec.window_psl, iteration, x.clone());
        }
        trace.push(rec);
        if delta < config.epsilon {
            converged = true;
            break;
        }
    }
    let (_, best_iteration, sequence) = best;
    let metrics = compute_metrics(&autocorrelation(&sequence), config.q)?;
    Ok(DesignResult {
        sequence,
        iterations_used: trace.len(),
        converged,
        best_iteration,
        trace,
        initial_metrics,
        metrics,
    })
}

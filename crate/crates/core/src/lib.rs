//! Design of complex sequences with low peak side-lobe level (PSL).
//!
//! The crate builds sequences whose aperiodic autocorrelation has near-zero
//! side-lobes over a chosen window of lags `1..Q`. The design loop alternates
//! between two steps:
//!
//! 1. compute the orthonormal-column factor `L` closest (in the Frobenius
//!    sense) to the shifted-copy convolution matrix of the current sequence,
//! 2. move every sample to the center of the points `sqrt(N)·L` holds at that
//!    sample's positions, which minimizes the Chebyshev distance entry-wise.
//!
//! Four center rules are available (exact smallest enclosing circle via
//! quadratic programming, bounding rectangle, lexicographic midpoint, and the
//! lexicographic midpoint driven by a randomized low-rank factor), together
//! with unimodular and peak-amplitude constraints, a modified Bernoulli
//! chaotic generator for seeding waveform sets, and set-level correlation
//! statistics.
//!
//! ```
//! use pslseq::{design, Algorithm, Initialization, SolverConfig};
//!
//! let config = SolverConfig::new(Algorithm::Poca, 20, 8)
//!     .with_init(Initialization::Golomb)
//!     .with_max_iterations(2000);
//! let result = design(&config).unwrap();
//! assert!(result.metrics.mpcl < 1e-6);
//! ```

pub mod chaos;
pub mod correlation;
pub mod error;
pub mod factorization;
pub mod geometry;
pub mod metrics;
pub mod mimo;
pub mod sequence;
pub mod solver;

pub use chaos::{ChaoticMap, ChaoticParams, Encoding};
pub use correlation::{autocorrelation, ccp, cross_correlation, CorrelationKind, CorrelationProfile};
pub use error::{Error, Result};
pub use factorization::{ConvolutionMatrix, RandomizedOptions, UnitaryFactor};
pub use geometry::{CircleSolution, PointSet};
pub use metrics::{chebyshev_norm, compute_metrics, welch_bound, MetricsReport};
pub use mimo::{ccp_statistics, generate_set, welch_audit, CcpStats, WaveformSet, WelchAudit};
pub use sequence::{barker13, chu, golomb, lex_compare, ComplexSequence};
pub use solver::{
    apply_constraint, design, stop_check, Algorithm, Constraint, DesignResult, Initialization,
    IterationRecord, SketchConfig, SolverConfig,
};

/// Complex sample type used throughout the crate.
pub type C64 = num_complex::Complex64;

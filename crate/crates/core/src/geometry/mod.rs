//! Per-element center update: given the target points a sample should match,
//! pick the value minimizing (exactly or approximately) the largest distance to
//! them, i.e. the smallest enclosing circle (1-center) problem in the plane.

mod oracle;
mod qp;
mod subgradient;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::lex_compare;
use crate::C64;

pub use oracle::oracle_circle;
pub use qp::{qp_circle, qp_circle_with, DEFAULT_QP_DELTA, DEFAULT_QP_OUTER_ITERATIONS};
pub use subgradient::{
    subgradient_circle, subgradient_circle_with, DEFAULT_STEP_TOLERANCE,
    DEFAULT_SUBGRADIENT_ITERATIONS,
};

/// A non-empty set of finite planar points stored as complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet(Vec<C64>);

impl PointSet {
    pub fn new(points: Vec<C64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("points", "point set must not be empty"));
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("points", "non-finite point"));
        }
        Ok(Self(points))
    }

    pub(crate) fn from_vec_unchecked(points: Vec<C64>) -> Self {
        debug_assert!(!points.is_empty());
        Self(points)
    }

    pub fn points(&self) -> &[C64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest distance from `center` to any point.
    pub fn max_distance(&self, center: C64) -> f64 {
        max_distance(&self.0, center)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleSolver {
    Qp,
    Subgradient,
    Rectangle,
    LexMidpoint,
    RealMidpoint,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSolution {
    pub center: C64,
    /// Largest distance from `center` to the input points.
    pub radius: f64,
    pub iterations: usize,
    pub solver: CircleSolver,
    /// False when an iterative solver stopped at its iteration cap.
    pub converged: bool,
}

impl CircleSolution {
    fn closed_form(points: &[C64], center: C64, solver: CircleSolver) -> Self {
        Self {
            center,
            radius: max_distance(points, center),
            iterations: 0,
            solver,
            converged: true,
        }
    }
}

pub(crate) fn max_distance(points: &[C64], center: C64) -> f64 {
    points.iter().map(|p| (p - center).norm()).fold(0.0, f64::max)
}

/// Center of the bounding rectangle: midpoints of the real and imaginary
/// extents.
pub(crate) fn rectangle_center_of(points: &[C64]) -> C64 {
    let (mut re_lo, mut re_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut im_lo, mut im_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        re_lo = re_lo.min(p.re);
        re_hi = re_hi.max(p.re);
        im_lo = im_lo.min(p.im);
        im_hi = im_hi.max(p.im);
    }
    C64::new((re_hi + re_lo) / 2.0, (im_hi + im_lo) / 2.0)
}

/// Midpoint of the dictionary-order maximum and minimum.
pub(crate) fn lex_midpoint_of(points: &[C64]) -> C64 {
    let mut lo = points[0];
    let mut hi = points[0];
    for &p in &points[1..] {
        if lex_compare(p, lo) == Ordering::Less {
            lo = p;
        }
        if lex_compare(p, hi) == Ordering::Greater {
            hi = p;
        }
    }
    (hi + lo) / 2.0
}

pub fn rectangle_center(points: &PointSet) -> CircleSolution {
    let c = rectangle_center_of(points.points());
    CircleSolution::closed_form(points.points(), c, CircleSolver::Rectangle)
}

pub fn lex_midpoint(points: &PointSet) -> CircleSolution {
    let c = lex_midpoint_of(points.points());
    CircleSolution::closed_form(points.points(), c, CircleSolver::LexMidpoint)
}

/// Exact 1-center of points on the real line: the midpoint of the extremes.
pub fn real_midpoint(points: &PointSet) -> Result<CircleSolution> {
    if !points.is_real() {
        return Err(Error::invalid("points", "real midpoint needs real-valued points"));
    }
    let (lo, hi) = points
        .points()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.re), hi.max(p.re)));
    Ok(CircleSolution {
        center: C64::new((hi + lo) / 2.0, 0.0),
        radius: (hi - lo) / 2.0,
        iterations: 0,
        solver: CircleSolver::RealMidpoint,
        converged: true,
    })
}

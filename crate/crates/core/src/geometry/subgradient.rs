//! Exact 1-center by steepest subgradient descent on `f(x) = max_k |x - mu_k|`.
//!
//! The descent direction is the negative minimum-norm element of the convex
//! hull of the active gradients `(x - mu_k) / |x - mu_k|`, where "active" means
//! within a relative band of the maximum. A single fixed band either ignores
//! nearly-tied points (zig-zag steps) or lumps in points that are far from
//! binding (near-zero directions), so every iteration tries the bands
//! `0.5, 0.05, ..., 1e-10`, runs a golden-section search over `[0, f(x)]` along
//! each distinct direction, and keeps the largest decrease.
//!
//! `step_tolerance` is relative to the current objective, so the solver
//! behaves the same on a cloud of radius `1` and one of radius `1e-9`.

use std::f64::consts::PI;

use super::{lex_midpoint_of, max_distance, CircleSolution, CircleSolver, PointSet};
use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_STEP_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_SUBGRADIENT_ITERATIONS: usize = 10_000;

// Relative active-set bands tried at every iteration, widest first; the last
// one is the tie band that decides exact optimality.
const BANDS: [f64; 11] = [0.5, 5e-2, 5e-3, 5e-4, 5e-5, 5e-6, 5e-7, 5e-8, 5e-9, 5e-10, 1e-10];
const INV_PHI: f64 = 0.618_033_988_749_894_8;

pub fn subgradient_circle(points: &PointSet, step_tolerance: f64) -> Result<CircleSolution> {
    subgradient_circle_with(points, step_tolerance, DEFAULT_SUBGRADIENT_ITERATIONS)
}

pub fn subgradient_circle_with(
    points: &PointSet,
    step_tolerance: f64,
    max_iterations: usize,
) -> Result<CircleSolution> {
    if !(step_tolerance > 0.0) {
        return Err(Error::invalid(
            "step_tolerance",
            format!("must be positive, got {step_tolerance}"),
        ));
    }
    let pts = points.points();
    let mut x = lex_midpoint_of(pts);
    let mut f = max_distance(pts, x);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        if f == 0.0 {
            converged = true;
            break;
        }
        iterations += 1;
        let mut best: Option<(C64, f64, f64)> = None;
        let mut previous_active = usize::MAX;
        for band in BANDS {
            let threshold = (1.0 - band) * f;
            let generators: Vec<C64> = pts
                .iter()
                .filter_map(|p| {
                    let v = x - p;
                    let d = v.norm();
                    (d >= threshold && d > 0.0).then(|| v / d)
                })
                .collect();
            // bands are nested, so an unchanged count means an unchanged set
            if generators.len() == previous_active {
                continue;
            }
            previous_active = generators.len();
            let g = min_norm_in_hull(&generators);
            if g.norm() <= 1e-12 {
                continue;
            }
            let dir = -g / g.norm();
            let (t, ft) = golden_section(|t| max_distance(pts, x + dir * t), f, step_tolerance * f);
            if ft < best.map_or(f, |b| b.2) {
                best = Some((dir, t, ft));
            }
        }
        match best {
            Some((dir, t, ft)) => {
                x += dir * t;
                let step_small = t < step_tolerance * f;
                f = ft;
                if step_small {
                    converged = true;
                    break;
                }
            }
            None => {
                converged = true;
                break;
            }
        }
    }
    Ok(CircleSolution {
        center: x,
        radius: f,
        iterations,
        solver: CircleSolver::Subgradient,
        converged,
    })
}

/// Minimum of a convex function on `[0, hi]` by golden-section search down to
/// an interval of width `tol`. Returns the best evaluated point and its value.
fn golden_section(phi: impl Fn(f64) -> f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (0.0, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = phi(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimum-norm point of the convex hull of planar points.
fn min_norm_in_hull(points: &[C64]) -> C64 {
    if points.is_empty() {
        return C64::new(0.0, 0.0);
    }
    if origin_in_hull(points) {
        return C64::new(0.0, 0.0);
    }
    let mut best = points[0];
    for (i, &p) in points.iter().enumerate() {
        if p.norm_sqr() < best.norm_sqr() {
            best = p;
        }
        for &q in &points[i + 1..] {
            let e = q - p;
            let len2 = e.norm_sqr();
            if len2 == 0.0 {
                continue;
            }
            let t = (-(p.re * e.re + p.im * e.im) / len2).clamp(0.0, 1.0);
            let c = p + e * t;
            if c.norm_sqr() < best.norm_sqr() {
                best = c;
            }
        }
    }
    best
}

/// The origin lies in the hull of non-zero points iff no open half-plane
/// through it contains them all, i.e. the largest angular gap is at most pi.
fn origin_in_hull(points: &[C64]) -> bool {
    if points.len() < 2 {
        return false;
    }
    let mut angles: Vec<f64> = points.iter().map(|p| p.arg()).collect();
    angles.sort_by(f64::total_cmp);
    let mut gap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    for w in angles.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap <= PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(v: &[(f64, f64)]) -> PointSet {
        PointSet::new(v.iter().map(|&(r, i)| C64::new(r, i)).collect()).unwrap()
    }

    #[test]
    fn singleton_converges_immediately() {
        let s = subgradient_circle(&ps(&[(2.0, -1.0)]), 1e-12).unwrap();
        assert_eq!(s.center, C64::new(2.0, -1.0));
        assert_eq!(s.radius, 0.0);
        assert!(s.converged);
        assert_eq!(s.iterations, 0);
    }

    #[test]
    fn symmetric_cross() {
        let s = subgradient_circle(&ps(&[(-1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]), 1e-12)
            .unwrap();
        assert!(s.center.norm() < 1e-6);
        assert!((s.radius - 1.0).abs() < 1e-6);
    }

    #[test]
    fn three_point_circle() {
        let s = subgradient_circle(&ps(&[(0.0, 0.0), (2.0, 0.0), (1.0, 1.0)]), 1e-12).unwrap();
        assert!((s.center - C64::new(1.0, 0.0)).norm() < 1e-6);
        assert!(s.converged);
    }

    #[test]
    fn hull_min_norm() {
        let z = min_norm_in_hull(&[C64::new(1.0, 1.0), C64::new(1.0, -1.0)]);
        assert!((z - C64::new(1.0, 0.0)).norm() < 1e-15);
        let z = min_norm_in_hull(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        assert!(z.norm() < 1e-15);
        let z = min_norm_in_hull(&[C64::new(1.0, 0.0), C64::new(-0.5, 0.8), C64::new(-0.5, -0.8)]);
        assert_eq!(z, C64::new(0.0, 0.0));
    }

    #[test]
    fn golden_section_finds_minimum() {
        let (t, v) = golden_section(|t| (t - 0.3).abs() + 1.0, 1.0, 1e-12);
        assert!((t - 0.3).abs() < 1e-11);
        assert!((v - 1.0).abs() < 1e-11);
    }
}

//! Combinatorial 1-center used as a reference for the iterative solvers.
//!
//! The minimal enclosing circle is determined by at most three points, so every
//! 1-, 2- and 3-point candidate center is evaluated and the one with the
//! smallest actual maximum distance wins. Scoring candidates by their true
//! covering radius (rather than testing coverage with a tolerance) keeps the
//! result robust for nearly collinear triples. Cost is `O(n^4)` in the worst
//! case; candidates whose own radius already exceeds the best are skipped.

use super::{max_distance, CircleSolution, CircleSolver, PointSet};
use crate::C64;

pub fn oracle_circle(points: &PointSet) -> CircleSolution {
    let pts = points.points();
    let mut best_center = pts[0];
    let mut best = max_distance(pts, best_center);
    let mut consider = |c: C64, r: f64| {
        if r <= best {
            let f = max_distance(pts, c);
            if f < best {
                best = f;
                best_center = c;
            }
        }
    };
    for (i, &a) in pts.iter().enumerate() {
        for (j, &b) in pts.iter().enumerate().skip(i + 1) {
            consider((a + b) / 2.0, (a - b).norm() / 2.0);
            for &c in &pts[j + 1..] {
                if let Some(center) = circumcenter(a, b, c) {
                    consider(center, (center - a).norm());
                }
            }
        }
    }
    CircleSolution {
        center: best_center,
        radius: best,
        iterations: 0,
        solver: CircleSolver::Oracle,
        converged: true,
    }
}

fn circumcenter(a: C64, b: C64, c: C64) -> Option<C64> {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    if d == 0.0 {
        return None;
    }
    let (b2, c2) = (b.norm_sqr(), c.norm_sqr());
    let ux = (c.im * b2 - b.im * c2) / d;
    let uy = (b.re * c2 - c.re * b2) / d;
    let u = C64::new(ux, uy) + a;
    (u.re.is_finite() && u.im.is_finite()).then_some(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(v: &[(f64, f64)]) -> PointSet {
        PointSet::new(v.iter().map(|&(r, i)| C64::new(r, i)).collect()).unwrap()
    }

    #[test]
    fn examples() {
        let s = oracle_circle(&ps(&[(-1.0, 0.0), (1.0, 0.0)]));
        assert_eq!((s.center, s.radius), (C64::new(0.0, 0.0), 1.0));
        let s = oracle_circle(&ps(&[(0.0, 0.0), (1.0, 0.0), (4.0, 0.0)]));
        assert_eq!((s.center, s.radius), (C64::new(2.0, 0.0), 2.0));
        let s = oracle_circle(&ps(&[(0.0, 0.0), (2.0, 0.0), (1.0, 1.0)]));
        assert!((s.center - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((s.radius - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equilateral_triangle_uses_circumcircle() {
        let h = 3f64.sqrt() / 2.0;
        let s = oracle_circle(&ps(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)]));
        assert!((s.center - C64::new(0.5, h / 3.0)).norm() < 1e-15);
        assert!((s.radius - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }
}

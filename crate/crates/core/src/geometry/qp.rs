//! Exact smallest enclosing circle via a sequence of linearly-constrained
//! quadratic programs.
//!
//! For a fixed radius bound `R`, the lifted problem
//!
//! ```text
//! minimize    x_R^2 + x_I^2 - z
//! subject to  z - 2 Re(mu_k) x_R - 2 Im(mu_k) x_I <= R^2 - |mu_k|^2   for all k
//! ```
//!
//! has optimal value `R*^2 - R^2` at the exact 1-center, so the outer loop
//! tightens `R` to the max distance at the new center until the value is
//! within `delta` of zero.

use nalgebra::{DMatrix, DVector, Vector3};

use super::{lex_midpoint_of, max_distance, CircleSolution, CircleSolver, PointSet};
use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_QP_DELTA: f64 = 1e-9;
pub const DEFAULT_QP_OUTER_ITERATIONS: usize = 100;

pub fn qp_circle(points: &PointSet, delta: f64) -> Result<CircleSolution> {
    qp_circle_with(points, delta, DEFAULT_QP_OUTER_ITERATIONS)
}

pub fn qp_circle_with(points: &PointSet, delta: f64, max_outer: usize) -> Result<CircleSolution> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", format!("must be positive, got {delta}")));
    }
    if max_outer == 0 {
        return Err(Error::invalid("max_outer", "need at least one outer iteration"));
    }
    let pts = points.points();
    let origin = lex_midpoint_of(pts);
    let scale = max_distance(pts, origin);
    if scale == 0.0 {
        return Ok(CircleSolution {
            center: origin,
            radius: 0.0,
            iterations: 0,
            solver: CircleSolver::Qp,
            converged: true,
        });
    }
    // Work in coordinates centered at the starting point and scaled to the
    // unit disk (the QP value is translation invariant and scales with the
    // square of the radius). Points that coincide to within 1e-10 of the
    // scale are merged: they would otherwise make the working-set systems
    // numerically singular.
    let mut shifted: Vec<C64> = Vec::with_capacity(pts.len());
    for p in pts {
        let z = (p - origin) / scale;
        if shifted.iter().all(|s| (s - z).norm() > 1e-10) {
            shifted.push(z);
        }
    }
    let delta_scaled = delta / (scale * scale);
    let mut x = C64::new(0.0, 0.0);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_outer {
        iterations += 1;
        let r = max_distance(&shifted, x);
        let (next, value) = match solve_lifted(&shifted, r * r, x) {
            Ok(v) => v,
            // The inner solver stalled; keep the best center so far.
            Err(Error::Numerical(_)) => break,
            Err(e) => return Err(e),
        };
        // Never move to a worse center, even by round-off.
        if max_distance(&shifted, next) <= r {
            x = next;
        }
        if value.abs() < delta_scaled {
            converged = true;
            break;
        }
    }
    let center = x * scale + origin;
    Ok(CircleSolution {
        center,
        radius: max_distance(pts, center),
        iterations,
        solver: CircleSolver::Qp,
        converged,
    })
}

/// Solves the lifted QP for radius bound `r2 = R^2`, warm-started at `x`.
/// Returns the optimal center and the optimal value `|x|^2 - z`.
fn solve_lifted(points: &[C64], r2: f64, x: C64) -> Result<(C64, f64)> {
    let m = points.len();
    let mut a = DMatrix::<f64>::zeros(m, 3);
    let mut b = DVector::<f64>::zeros(m);
    for (k, p) in points.iter().enumerate() {
        a[(k, 0)] = -2.0 * p.re;
        a[(k, 1)] = -2.0 * p.im;
        a[(k, 2)] = 1.0;
        b[k] = r2 - p.norm_sqr();
    }
    // Tightest feasible z at x, with the attaining constraint as the initial
    // working set.
    let slack = |k: usize| b[k] - a[(k, 0)] * x.re - a[(k, 1)] * x.im;
    let first = (0..m)
        .min_by(|&i, &j| slack(i).total_cmp(&slack(j)))
        .expect("point set is non-empty");
    let start = Vector3::new(x.re, x.im, slack(first));
    let problem = Qp {
        h: Vector3::new(2.0, 2.0, 0.0),
        c: Vector3::new(0.0, 0.0, -1.0),
        a: &a,
        b: &b,
    };
    let p = problem.solve(start, vec![first], 50 + 10 * m)?;
    Ok((C64::new(p[0], p[1]), p[0] * p[0] + p[1] * p[1] - p[2]))
}

/// `min 1/2 p^T diag(h) p + c^T p  s.t.  A p <= b` in three variables.
struct Qp<'a> {
    h: Vector3<f64>,
    c: Vector3<f64>,
    a: &'a DMatrix<f64>,
    b: &'a DVector<f64>,
}

impl Qp<'_> {
    fn row(&self, k: usize) -> Vector3<f64> {
        Vector3::new(self.a[(k, 0)], self.a[(k, 1)], self.a[(k, 2)])
    }

    /// Primal active-set method from a feasible start. The working set never
    /// exceeds three constraints and is kept linearly independent.
    fn solve(&self, mut p: Vector3<f64>, mut working: Vec<usize>, max_iter: usize) -> Result<Vector3<f64>> {
        let m = self.b.len();
        for _ in 0..max_iter {
            let g = self.h.component_mul(&p) + self.c;
            let (d, lambda) = self.equality_step(&g, &working)?;
            let scale = 1.0 + p.amax();
            // Three independent constraints pin the point: the step is zero
            // up to round-off.
            if working.len() == 3 || d.amax() <= 1e-14 * scale {
                // Stationary on the working set: optimal once every multiplier
                // is non-negative, otherwise release the most negative one.
                let (idx, min) = lambda
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (i, &l)| if l < acc.1 { (i, l) } else { acc });
                if working.len() <= 1 || min >= -1e-12 {
                    return Ok(p);
                }
                working.remove(idx);
                continue;
            }
            let mut alpha = 1.0;
            let mut blocking = None;
            for k in 0..m {
                if working.contains(&k) {
                    continue;
                }
                let ak = self.row(k);
                let ad = ak.dot(&d);
                if ad <= 1e-15 * ak.norm() * d.norm() {
                    continue;
                }
                let ratio = ((self.b[k] - ak.dot(&p)) / ad).max(0.0);
                if ratio < alpha {
                    alpha = ratio;
                    blocking = Some(k);
                }
            }
            p += alpha * d;
            if let Some(k) = blocking {
                working.push(k);
            }
        }
        Err(Error::Numerical("active-set QP exceeded its iteration cap".into()))
    }

    /// Solves the equality-constrained step `min 1/2 d^T H d + g^T d` with
    /// `A_W d = 0`, returning the step and the working-set multipliers.
    fn equality_step(&self, g: &Vector3<f64>, working: &[usize]) -> Result<(Vector3<f64>, Vec<f64>)> {
        let w = working.len();
        let dim = 3 + w;
        let mut kkt = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = DVector::<f64>::zeros(dim);
        for i in 0..3 {
            kkt[(i, i)] = self.h[i];
            rhs[i] = -g[i];
        }
        for (j, &k) in working.iter().enumerate() {
            let ak = self.row(k);
            for i in 0..3 {
                kkt[(i, 3 + j)] = ak[i];
                kkt[(3 + j, i)] = ak[i];
            }
        }
        if w == 0 {
            // Unbounded in z without any constraint; cannot happen from a
            // tight start but guard against it.
            return Err(Error::Numerical("QP working set became empty".into()));
        }
        let sol = kkt
            .lu()
            .solve(&rhs)
            .filter(|s| s.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::Numerical("singular KKT system in circle QP".into()))?;
        let d = Vector3::new(sol[0], sol[1], sol[2]);
        Ok((d, sol.iter().skip(3).copied().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(v: &[(f64, f64)]) -> PointSet {
        PointSet::new(v.iter().map(|&(r, i)| C64::new(r, i)).collect()).unwrap()
    }

    #[test]
    fn two_points() {
        let s = qp_circle(&ps(&[(-1.0, 0.0), (1.0, 0.0)]), 1e-9).unwrap();
        assert!(s.center.norm() < 1e-12);
        assert!((s.radius - 1.0).abs() < 1e-12);
        assert!(s.converged && s.iterations <= 2);
    }

    #[test]
    fn three_point_circle() {
        let s = qp_circle(&ps(&[(0.0, 0.0), (2.0, 0.0), (1.0, 1.0)]), 1e-9).unwrap();
        assert!((s.center - C64::new(1.0, 0.0)).norm() < 1e-9);
        assert!((s.radius - 1.0).abs() < 1e-9);
    }

    #[test]
    fn singleton_and_duplicates() {
        let s = qp_circle(&ps(&[(0.3, -0.7)]), 1e-9).unwrap();
        assert_eq!(s.radius, 0.0);
        let s = qp_circle(&ps(&[(1.0, 1.0), (1.0, 1.0), (3.0, 1.0)]), 1e-9).unwrap();
        assert!((s.center - C64::new(2.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn near_duplicate_points() {
        // pairs that agree to ~1e-12 on a 1e-4 scale, as produced by a
        // design cycle close to convergence
        let pts: Vec<C64> = vec![C64::new(-0.0001694060048551549, -0.00015970329371883807), C64::new(8.166228870765124e-5, -1.2755852856205507e-5), C64::new(0.00023283451651967546, 0.00014589660580055508), C64::new(0.00016940600634685055, 0.0001597032917686203), C64::new(0.00028959021780283756, 6.803647584130434e-5), C64::new(0.00028399217556107637, 7.755258165431655e-5), C64::new(0.00028399217610108884, 7.755258359887218e-5), C64::new(0.00028959021714025646, 6.803647825737169e-5), C64::new(0.00016940600485537693, 0.00015970329371883807), C64::new(0.00023283451473110617, 0.00014589660911146218), C64::new(8.166228813610843e-5, -1.2755850546053438e-5), C64::new(-0.00016940600554082863, -0.00015970329080794432)];
        let set = PointSet::new(pts).unwrap();
        let s = qp_circle(&set, 1e-9).unwrap();
        let oracle = crate::geometry::oracle_circle(&set);
        assert!(s.converged);
        assert!((s.radius - oracle.radius).abs() <= 1e-9 * oracle.radius);
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(qp_circle(&ps(&[(0.0, 0.0)]), 0.0).is_err());
        assert!(qp_circle(&ps(&[(0.0, 0.0)]), f64::NAN).is_err());
    }
}

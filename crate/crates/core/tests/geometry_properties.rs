use proptest::prelude::*;
use pslseq::geometry::{
    lex_midpoint, oracle_circle, qp_circle, real_midpoint, rectangle_center, subgradient_circle,
    PointSet,
};
use pslseq::C64;

fn cloud(max_len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..=max_len)
        .prop_map(|v| v.into_iter().map(|(r, i)| C64::new(r, i)).collect())
}

fn real_cloud(max_len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(-10.0f64..10.0, 1..=max_len)
        .prop_map(|v| v.into_iter().map(|r| C64::new(r, 0.0)).collect())
}

// Tight clusters around a unit-modulus value, like the targets a sample sees
// near convergence.
fn cluster(max_len: usize) -> impl Strategy<Value = Vec<C64>> {
    (
        0.0f64..std::f64::consts::TAU,
        -12i32..-2,
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_len),
    )
        .prop_map(|(phase, exp, v)| {
            let c = C64::from_polar(1.0, phase);
            let s = 10f64.powi(exp);
            v.into_iter().map(|(r, i)| c + C64::new(r, i) * s).collect()
        })
}

fn covers(points: &[C64], center: C64, radius: f64) -> bool {
    points.iter().all(|p| (p - center).norm() <= radius + 1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_solvers_agree_with_oracle(points in prop_oneof![cloud(100), real_cloud(100)]) {
        let set = PointSet::new(points.clone()).unwrap();
        let oracle = oracle_circle(&set);
        let qp = qp_circle(&set, 1e-9).unwrap();
        let sg = subgradient_circle(&set, 1e-12).unwrap();
        prop_assert!(covers(&points, oracle.center, oracle.radius));
        prop_assert!(covers(&points, qp.center, qp.radius));
        prop_assert!(covers(&points, sg.center, sg.radius));
        prop_assert!((qp.radius - oracle.radius).abs() <= 1e-6, "qp {} oracle {}", qp.radius, oracle.radius);
        prop_assert!((sg.radius - oracle.radius).abs() <= 1e-6, "sg {} oracle {}", sg.radius, oracle.radius);
        prop_assert!(qp.converged);
        prop_assert!((qp.radius - set.max_distance(qp.center)).abs() <= 1e-9);
    }

    #[test]
    fn exact_solvers_on_tight_clusters(points in cluster(40)) {
        let set = PointSet::new(points.clone()).unwrap();
        let oracle = oracle_circle(&set);
        let qp = qp_circle(&set, 1e-9).unwrap();
        let sg = subgradient_circle(&set, 1e-12).unwrap();
        let tol = 1e-6 * oracle.radius.max(1e-9);
        prop_assert!(qp.radius <= oracle.radius + tol, "qp {} oracle {}", qp.radius, oracle.radius);
        prop_assert!(sg.radius <= oracle.radius * (1.0 + 1e-6) + 1e-15, "sg {} oracle {}", sg.radius, oracle.radius);
    }

    #[test]
    fn heuristics_are_bounded_by_optimum(points in cloud(60)) {
        let set = PointSet::new(points).unwrap();
        let oracle = oracle_circle(&set).radius;
        let rect = rectangle_center(&set).radius;
        let lex = lex_midpoint(&set).radius;
        prop_assert!(rect >= oracle - 1e-12);
        prop_assert!(lex >= oracle - 1e-12);
        prop_assert!(rect <= std::f64::consts::SQRT_2 * oracle + 1e-12);
    }

    #[test]
    fn real_midpoint_is_exact(points in real_cloud(50)) {
        let set = PointSet::new(points).unwrap();
        let mid = real_midpoint(&set).unwrap();
        let oracle = oracle_circle(&set);
        // same value up to the rounding of the oracle's own midpoint
        prop_assert!((mid.radius - oracle.radius).abs() <= 4.0 * f64::EPSILON * oracle.radius.max(1.0));
        prop_assert!((mid.center - oracle.center).norm() <= 1e-12);
    }
}

#[test]
fn random_fifty_point_clouds_match_oracle_center() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
    for _ in 0..20 {
        let pts: Vec<C64> = (0..50)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let set = PointSet::new(pts).unwrap();
        let oracle = oracle_circle(&set);
        let qp = qp_circle(&set, 1e-9).unwrap();
        assert!((qp.center - oracle.center).norm() <= 1e-6);
    }
}

#[test]
fn solvers_are_deterministic() {
    let pts: Vec<C64> = (0..37)
        .map(|k| C64::from_polar(1.0 + 0.01 * k as f64, 0.7 * k as f64))
        .collect();
    let set = PointSet::new(pts).unwrap();
    assert_eq!(qp_circle(&set, 1e-9).unwrap(), qp_circle(&set, 1e-9).unwrap());
    assert_eq!(
        subgradient_circle(&set, 1e-12).unwrap(),
        subgradient_circle(&set, 1e-12).unwrap()
    );
    assert_eq!(oracle_circle(&set), oracle_circle(&set));
}

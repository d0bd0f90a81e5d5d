use std::sync::Arc;

use proptest::prelude::*;

use setquad::convexcal::{ConvexBody, DirectionGrid};
use setquad::funcspace::{holder_check, Modulus, SetTrajectory, Weight};
use setquad::geometry::{convex_hausdorff_2d, convex_hull_2d, hausdorff, minkowski_combine, PointCloud, Vector};
use setquad::knots::{asymptotic_b, midpoint_knots, optimize_knots, uniform_optimal_error, OptimizeOptions};
use setquad::noisy::{active_cells, noisy_envelope, noisy_error_value, phi_star_noisy, ErrorBudget};
use setquad::recovery::{decompose, envelope, extremal_trajectory, worst_case_error, KnotSet};

fn cloud(dim: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(prop::collection::vec(-3.0..3.0f64, dim), 1..8)
        .prop_map(|pts| PointCloud::new(pts).unwrap())
}

fn planar() -> impl Strategy<Value = PointCloud> {
    cloud(2)
}

fn modulus() -> impl Strategy<Value = Modulus> {
    prop_oneof![
        (0.2..3.0f64, 0.05..=1.0f64).prop_map(|(c, a)| Modulus::power(c, a).unwrap()),
        (0.5..4.0f64, 0.05..1.0f64).prop_map(|(l, cap)| Modulus::capped_linear(l, cap).unwrap()),
    ]
}

fn strict_modulus() -> impl Strategy<Value = Modulus> {
    (0.2..3.0f64, 0.05..=1.0f64).prop_map(|(c, a)| Modulus::power(c, a).unwrap())
}

fn weight() -> impl Strategy<Value = Weight> {
    prop_oneof![
        Just(Weight::ConstantOne),
        (0.0..2.0f64, 0.0..2.0f64).prop_map(|(a, b)| Weight::polynomial(vec![0.1 + a, b]).unwrap()),
        Just(Weight::polynomial(vec![0.0, 1.0]).unwrap()),
    ]
}

fn knots() -> impl Strategy<Value = KnotSet> {
    prop::collection::btree_set(0u32..=1000, 1..8)
        .prop_map(|s| KnotSet::new(s.into_iter().map(|k| k as f64 / 1000.0).collect()).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_a_metric(a in cloud(3), b in cloud(3), c in cloud(3)) {
        let ab = hausdorff(&a, &b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ab, hausdorff(&b, &a).unwrap());
        prop_assert!(hausdorff(&a, &c).unwrap() <= ab + hausdorff(&b, &c).unwrap() + 1e-12);
        prop_assert_eq!(ab == 0.0, a.set_eq(&b, 0.0));
    }

    #[test]
    fn hausdorff_is_positively_homogeneous(a in planar(), b in planar(), l in 0.01..100.0f64) {
        let d = hausdorff(&a, &b).unwrap();
        let s = hausdorff(&a.scaled(l), &b.scaled(l)).unwrap();
        prop_assert!((s - l * d).abs() <= 1e-12 * (l * d).max(1e-300));
    }

    #[test]
    fn sums_are_no_farther_than_their_terms(a in planar(), b in planar(), c in planar(), d in planar()) {
        let lhs = hausdorff(
            &minkowski_combine(1.0, &a, 1.0, &b).unwrap(),
            &minkowski_combine(1.0, &c, 1.0, &d).unwrap(),
        ).unwrap();
        let rhs = hausdorff(&a, &c).unwrap() + hausdorff(&b, &d).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn hulls_contract_distance(a in planar(), b in planar()) {
        let hulls = convex_hausdorff_2d(&a, &b).unwrap();
        prop_assert!(hulls <= hausdorff(&a, &b).unwrap() * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn hull_commutes_with_linear_combination(a in planar(), b in planar(), l in -3.0..3.0f64, m in -3.0..3.0f64) {
        let ha = convex_hull_2d(&a).unwrap();
        let hb = convex_hull_2d(&b).unwrap();
        let lhs = convex_hull_2d(&minkowski_combine(l, &a, m, &b).unwrap()).unwrap();
        let rhs = convex_hull_2d(&minkowski_combine(l, &ha, m, &hb).unwrap()).unwrap();
        prop_assert!(lhs.set_eq(&rhs, 1e-12), "{:?} vs {:?}", lhs.to_vecs(), rhs.to_vecs());
        let scaled = convex_hull_2d(&a.scaled(l)).unwrap();
        prop_assert!(scaled.set_eq(&ha.scaled(l), 1e-12));
    }

    #[test]
    fn support_embedding_sees_only_the_hull(a in planar(), b in planar()) {
        let grid = DirectionGrid::planar(360).unwrap();
        let ea = ConvexBody::embed(&a, &grid).unwrap();
        let eh = ConvexBody::embed(&convex_hull_2d(&a).unwrap(), &grid).unwrap();
        prop_assert!(ea.hausdorff(&eh).unwrap() <= 1e-12);
        let eb = ConvexBody::embed(&b, &grid).unwrap();
        let body = ea.hausdorff(&eb).unwrap();
        let exact = convex_hausdorff_2d(&a, &b).unwrap();
        prop_assert!(body <= exact + 1e-12);
        let radius = a.max_norm().max(b.max_norm());
        prop_assert!(exact <= body + grid.grid_error(radius) + 1e-12);
    }

    #[test]
    fn body_combination_is_linear(a in cloud(3), b in cloud(3), c in cloud(3), l in 0.0..4.0f64, m in 0.0..4.0f64) {
        let grid = DirectionGrid::default_for(3).unwrap();
        let (ea, eb, ec) = (
            ConvexBody::embed(&a, &grid).unwrap(),
            ConvexBody::embed(&b, &grid).unwrap(),
            ConvexBody::embed(&c, &grid).unwrap(),
        );
        let ab = ConvexBody::combine(1.0, &ea, 1.0, &eb).unwrap();
        let ba = ConvexBody::combine(1.0, &eb, 1.0, &ea).unwrap();
        prop_assert!(ab.hausdorff(&ba).unwrap() <= 1e-12);
        let left = ConvexBody::combine(1.0, &ab, 1.0, &ec).unwrap();
        let right = ConvexBody::combine(1.0, &ea, 1.0, &ConvexBody::combine(1.0, &eb, 1.0, &ec).unwrap()).unwrap();
        prop_assert!(left.hausdorff(&right).unwrap() <= 1e-12);
        let dist = ConvexBody::combine(l + m, &ea, 0.0, &eb).unwrap();
        let split = ConvexBody::combine(l, &ea, m, &ea).unwrap();
        prop_assert!(dist.hausdorff(&split).unwrap() <= 1e-12 * (1.0 + l + m));
        let direct = ConvexBody::embed(&minkowski_combine(l, &a, m, &b).unwrap(), &grid).unwrap();
        let lin = ConvexBody::combine(l, &ea, m, &eb).unwrap();
        prop_assert!(direct.hausdorff(&lin).unwrap() <= 1e-12 * (1.0 + l + m) * 4.0);
        prop_assert!(lin.min_width() >= -1e-12);
        prop_assert!(lin.negate().min_width() >= -1e-12);
    }

    #[test]
    fn moduli_are_subadditive_and_monotone(m in modulus(), s in 0.0..0.5f64, t in 0.0..0.5f64) {
        prop_assert!(m.value(s + t) <= m.value(s) + m.value(t) + 1e-12);
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        prop_assert!(m.value(lo) <= m.value(hi));
    }

    #[test]
    fn extremal_profiles_belong_to_the_class(m in modulus(), x in knots(), angle in 0.0..6.3f64) {
        let a = Vector::new(vec![angle.cos(), angle.sin()]).unwrap();
        let f = extremal_trajectory(&m, &x, &a).unwrap();
        prop_assert!(holder_check(&f, &m, 500).unwrap().ok);
    }

    #[test]
    fn cell_masses_sum_to_the_weight_integral(x in knots(), w in weight()) {
        let cells = decompose(&x, &w).unwrap();
        let total = setquad::quadrature::integrate(|t| w.value(t), 0.0, 1.0, &w.kinks()).unwrap();
        prop_assert!((cells.total_mass() - total).abs() <= 1e-9);
    }

    #[test]
    fn inserting_a_knot_never_increases_error(m in modulus(), w in weight(), x in knots(), k in 0u32..=1000) {
        let y = k as f64 / 1000.0;
        prop_assume!(!x.as_slice().contains(&y));
        let before = worst_case_error(&m, &w, &x).unwrap();
        let after = worst_case_error(&m, &w, &x.with_inserted(y).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn uniform_error_agrees_with_the_bound(m in modulus(), n in 1usize..40) {
        let a = uniform_optimal_error(&m, n).unwrap();
        let b = worst_case_error(&m, &Weight::ConstantOne, &midpoint_knots(n).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn unit_weight_b_sums_are_one(m in modulus(), n in 1usize..300) {
        let r = asymptotic_b(&Weight::ConstantOne, &m, &[n]).unwrap();
        prop_assert!((r.b_estimates[0] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn noisy_error_is_monotone_in_each_budget(
        m in strict_modulus(), w in weight(), x in knots(),
        eps in prop::collection::vec(0.0..0.3f64, 8), bump in 0.0..0.3f64, j in 0usize..8,
    ) {
        let n = x.len();
        let base = ErrorBudget::new(eps[..n].to_vec()).unwrap();
        let mut raised = eps[..n].to_vec();
        raised[j % n] += bump;
        let v0 = noisy_error_value(&m, &x, &base, &w).unwrap();
        let v1 = noisy_error_value(&m, &x, &ErrorBudget::new(raised).unwrap(), &w).unwrap();
        prop_assert!(v1 >= v0 - 1e-12);
        let exact = noisy_error_value(&m, &x, &ErrorBudget::zeros(n), &w).unwrap();
        prop_assert!((exact - worst_case_error(&m, &w, &x).unwrap()).abs() <= 1e-10);
        let env = noisy_envelope(&m, &x, &base).unwrap();
        let plain = envelope(&m, &x);
        for i in 0..=64 {
            let t = i as f64 / 64.0;
            prop_assert!(env.value(t) >= plain.value(t) - 1e-15);
        }
    }

    #[test]
    fn inactive_samples_are_ignored(
        m in strict_modulus(), x in knots(),
        eps in prop::collection::vec(0.0..1.0f64, 8), seed in any::<u64>(),
    ) {
        use rand::SeedableRng;
        let n = x.len();
        let budget = ErrorBudget::new(eps[..n].to_vec()).unwrap();
        let decomp = active_cells(&m, &x, &budget, &Weight::ConstantOne).unwrap();
        prop_assert!(decomp.nu() >= 1);
        let grid = DirectionGrid::planar(90).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut samples: Vec<_> = (0..n).map(|_| setquad::selftest::random_cloud(&mut rng, 2, 3, 1.0)).collect();
        let base = phi_star_noisy(&samples, &decomp, &grid).unwrap();
        for (k, s) in samples.iter_mut().enumerate() {
            if !decomp.is_active(k) {
                *s = setquad::selftest::random_cloud(&mut rng, 2, 5, 50.0);
            }
        }
        prop_assert_eq!(phi_star_noisy(&samples, &decomp, &grid).unwrap().hausdorff(&base).unwrap(), 0.0);
    }

    #[test]
    fn uniform_budget_adds_to_the_exact_error(m in strict_modulus(), n in 1usize..20, e in 0.0..0.5f64) {
        let v = noisy_error_value(&m, &midpoint_knots(n).unwrap(), &ErrorBudget::uniform(n, e).unwrap(), &Weight::ConstantOne).unwrap();
        prop_assert!((v - uniform_optimal_error(&m, n).unwrap() - e).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn optimizer_never_loses_to_its_starts(w in weight(), m in strict_modulus(), n in 1usize..6, seed in any::<u64>()) {
        let opts = OptimizeOptions { seed, ..Default::default() };
        let r = optimize_knots(&w, &m, n, &opts).unwrap();
        let best = r.start_errors.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(r.error, best);
        let mid = worst_case_error(&m, &w, &midpoint_knots(n).unwrap()).unwrap();
        prop_assert!(r.error <= mid + 1e-12);
        prop_assert!(rel(r.error, worst_case_error(&m, &w, &r.knots).unwrap()) <= 1e-9);
    }

    #[test]
    fn scaled_bodies_with_unit_slope_are_lipschitz(pts in cloud(2), k in 1.0..4.0f64) {
        let r = pts.max_norm().max(1e-3);
        let f = SetTrajectory::scaled_body(Arc::new(move |t| (k * t).sin() / (k * r)), pts);
        prop_assert!(holder_check(&f, &Modulus::lipschitz(), 500).unwrap().ok);
    }
}

use proptest::prelude::*;

use hyperfix_core::mapping::MapDocument;
use hyperfix_core::{
    attract_projection, bump_lambda, bump_mu, dist_point_set, estimate_lipschitz, hausdorff, point_blend, projection,
    retract, retract_toward, union, AffineMap, CompactSet, Domain, Norm, Point, SetMap,
};

const TAU: f64 = 1e-9;

fn norm_strategy() -> impl Strategy<Value = Norm> {
    prop_oneof![Just(Norm::L1), Just(Norm::L2), Just(Norm::Linf)]
}

fn point(d: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-1.0..1.0f64, d).prop_map(Point::new)
}

fn cloud(d: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point(d), 1..6)
}

/// Four clouds, a query point and a norm in a shared dimension.
fn metric_case() -> impl Strategy<Value = (Norm, [Vec<Point>; 4], Point)> {
    (1usize..=3, norm_strategy())
        .prop_flat_map(|(d, norm)| (Just(norm), [cloud(d), cloud(d), cloud(d), cloud(d)], point(d)))
}

fn set(p: &[Point], norm: Norm) -> CompactSet {
    CompactSet::new(p.to_vec(), norm).unwrap()
}

proptest! {
    #[test]
    fn hausdorff_is_a_metric((norm, [a, b, c, _], _x) in metric_case()) {
        let (a, b, c) = (set(&a, norm), set(&b, norm), set(&c, norm));
        let hab = hausdorff(&a, &b);
        prop_assert!(hab >= 0.0);
        prop_assert_eq!(hab, hausdorff(&b, &a));
        prop_assert_eq!(hausdorff(&a, &a), 0.0);
        prop_assert!(hausdorff(&a, &c) <= hab + hausdorff(&b, &c) + TAU);
    }

    #[test]
    fn point_to_set_and_union_bounds((norm, [a, b, c, e], x) in metric_case()) {
        let (a, b, c, e) = (set(&a, norm), set(&b, norm), set(&c, norm), set(&e, norm));
        prop_assert!(dist_point_set(&x, &a) <= dist_point_set(&x, &b) + hausdorff(&a, &b) + TAU);
        let lhs = hausdorff(&union(&a, &b), &union(&c, &e));
        prop_assert!(lhs <= hausdorff(&a, &c).max(hausdorff(&b, &e)) + TAU);
    }

    #[test]
    fn projection_is_consistent((norm, [a, _, _, _], x) in metric_case()) {
        let a = set(&a, norm);
        let p = projection(&x, &a, 0.0);
        prop_assert_eq!(p.min_distance, dist_point_set(&x, &a));
        for q in p.minimizers.points() {
            prop_assert!(a.contains_point(q));
            prop_assert_eq!(norm.dist(&x, q), p.min_distance);
        }
        for q in p.minimizers.points() {
            prop_assert!(p.chosen().lex_cmp(q) != std::cmp::Ordering::Greater);
        }
        prop_assert_eq!(p.is_singleton(), p.tie_diameter == 0.0);
    }

    #[test]
    fn retractions(norm in norm_strategy(), eps in 0.01..1.0f64,
                   u in prop::collection::vec(-2.0..2.0f64, 2), v in prop::collection::vec(-2.0..2.0f64, 2),
                   x0 in prop::collection::vec(-1.0..1.0f64, 2)) {
        let (u, v, x0) = (Point::new(u), Point::new(v), Point::new(x0));
        let duv = norm.dist(&u, &v);
        let (ru, rv) = (retract(eps, &u, norm).unwrap(), retract(eps, &v, norm).unwrap());
        prop_assert!(norm.of(ru.coords()) <= eps * (1.0 + 1e-12));
        prop_assert!(norm.dist(&ru, &rv) <= 2.0 * duv + TAU);
        let (bu, bv) = (retract_toward(eps, &x0, &u, norm).unwrap(), retract_toward(eps, &x0, &v, norm).unwrap());
        prop_assert!(norm.dist(&bu, &bv) <= duv + TAU);
        if norm.dist(&u, &x0) <= eps {
            prop_assert_eq!(bu, x0);
        }
    }

    #[test]
    fn bumps_are_bounded_and_lipschitz(norm in norm_strategy(), delta in 0.05..2.0f64,
                                       a in prop::collection::vec(-1.0..1.0f64, 2), b in prop::collection::vec(-1.0..1.0f64, 2)) {
        let x0 = Point::zeros(2);
        let (a, b) = (Point::new(a), Point::new(b));
        let (la, lb) = (bump_lambda(&x0, delta, &a, norm).unwrap(), bump_lambda(&x0, delta, &b, norm).unwrap());
        prop_assert!((0.0..=1.0).contains(&la));
        prop_assert!((la - lb).abs() <= 2.0 / delta * norm.dist(&a, &b) + TAU);
        if norm.dist(&a, &x0) <= delta && norm.dist(&b, &x0) <= delta {
            let (ma, mb) = (bump_mu(&x0, delta, &a, norm).unwrap(), bump_mu(&x0, delta, &b, norm).unwrap());
            prop_assert!((0.0..=1.0).contains(&ma));
            prop_assert!((ma - mb).abs() <= 4.0 / (3.0 * delta) * norm.dist(&a, &b) + TAU);
        }
    }

    #[test]
    fn certified_bounds_are_sound(norm in norm_strategy(), s in 0.0..0.9f64, t in 0.0..0.9f64,
                                  b in prop::collection::vec(-0.05..0.05f64, 2), seed in 0u64..1000) {
        let dom = Domain::cube(2, -1.0, 1.0, norm).unwrap();
        let m = AffineMap::new(vec![vec![s * 0.6, s * 0.4], vec![-t * 0.5, t * 0.5]], Point::new(b), norm).unwrap();
        let f = SetMap::finite_union(vec![m], dom).unwrap();
        let est = estimate_lipschitz(&f, 200, seed).unwrap();
        prop_assert!(est <= f.certified_lip() + TAU);
        let g = point_blend(&f, &Point::new(vec![0.1, -0.2]), 0.25).unwrap();
        prop_assert_eq!(g.certified_lip(), 0.75 * f.certified_lip());
        prop_assert!(estimate_lipschitz(&g, 200, seed).unwrap() <= g.certified_lip() + TAU);
    }

    #[test]
    fn spike_construction(norm in norm_strategy(), s in 0.0..0.8f64, frac in 0.05..1.0f64,
                          z in prop::collection::vec(-1.0..1.0f64, 2)) {
        let dom = Domain::cube(2, -1.0, 1.0, norm).unwrap();
        let a = AffineMap::scaling(s, Point::new(vec![0.1, 0.1]), norm).unwrap();
        let b = AffineMap::scaling(s / 2.0, Point::new(vec![-0.3, 0.2]), norm).unwrap();
        let g = SetMap::finite_union(vec![a, b], dom).unwrap();
        let z = Point::new(z);
        let delta = dist_point_set(&z, &g.eval(&z).unwrap());
        prop_assume!(delta > 1e-3);
        let sigma = frac * delta / 2.0;
        let c = attract_projection(&g, &z, sigma).unwrap();
        let image = c.map.eval(&z).unwrap();
        let p = projection(&z, &image, 0.0);
        prop_assert!(p.is_singleton());
        prop_assert_eq!(p.chosen(), &c.spike);
        prop_assert!(norm.dist(&c.spike, &z) > sigma);
        prop_assert!(c.map.certified_lip() <= g.certified_lip().max(2.0 * c.eps / sigma));
        prop_assert!(c.map.certified_lip() < 1.0);
    }

    #[test]
    fn documents_round_trip(norm in norm_strategy(), s in 0.0..0.9f64, lambda in 0.0..1.0f64,
                            x in prop::collection::vec(-1.0..1.0f64, 2)) {
        let dom = Domain::cube(2, -1.0, 1.0, norm).unwrap();
        let a = AffineMap::scaling(s, Point::new(vec![0.05, -0.05]), norm).unwrap();
        let f = SetMap::finite_union(vec![a], dom).unwrap();
        let g = point_blend(&f, &Point::new(vec![0.3, 0.3]), lambda.min(0.999)).unwrap();
        let back = MapDocument::from_json(&MapDocument::from_map(&g).to_json()).unwrap().into_map().unwrap();
        let x = Point::new(x);
        prop_assert_eq!(back.certified_lip(), g.certified_lip());
        prop_assert_eq!(back.eval(&x).unwrap(), g.eval(&x).unwrap());
    }
}

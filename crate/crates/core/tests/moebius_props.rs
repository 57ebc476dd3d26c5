use corrlab::moebius::{commutes_with_eta, spherical_distance, MoebiusMap, SpherePoint};
use corrlab::Complex;
use proptest::prelude::*;

type C = Complex<f64>;
type M = MoebiusMap<f64>;
type P = SpherePoint<f64>;

fn cplx(r: f64) -> impl Strategy<Value = C> {
    (-r..r, -r..r).prop_map(|(a, b)| C::new(a, b))
}

fn point() -> impl Strategy<Value = P> {
    prop_oneof![9 => cplx(4.0).prop_map(P::finite), 1 => Just(P::infinity())]
}

/// Well-conditioned Möbius maps.
fn moebius() -> impl Strategy<Value = M> {
    (cplx(2.0), cplx(2.0), cplx(2.0), cplx(2.0))
        .prop_filter_map("near-singular", |(a, b, c, d)| {
            let det = a * d - b * c;
            (det.norm() > 0.2).then(|| M::new(a, b, c, d).ok()).flatten()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_undoes_apply(m in moebius(), p in point()) {
        let back = m.inverse().apply(&m.apply(&p));
        prop_assert!(spherical_distance(&back, &p) < 1e-9);
    }

    #[test]
    fn compose_is_sequential_apply(m in moebius(), n in moebius(), p in point()) {
        let a = m.compose(&n).apply(&p);
        let b = m.apply(&n.apply(&p));
        prop_assert!(spherical_distance(&a, &b) < 1e-9);
    }

    #[test]
    fn determinant_stays_one(m in moebius(), n in moebius()) {
        let [a, b, c, d] = m.compose(&n).entries();
        prop_assert!((a * d - b * c - 1.0).norm() < 1e-9);
    }

    #[test]
    fn eta_is_an_isometric_involution(p in point(), q in point()) {
        prop_assert!(spherical_distance(&p.eta().eta(), &p) < 1e-12);
        let (d0, d1) = (spherical_distance(&p, &q), spherical_distance(&p.eta(), &q.eta()));
        prop_assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn distance_is_a_metric(p in point(), q in point(), r in point()) {
        let d = spherical_distance::<f64>;
        prop_assert!(d(&p, &q) >= 0.0 && (d(&p, &q) - d(&q, &p)).abs() < 1e-15);
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
    }

    #[test]
    fn three_point_map_hits_its_targets(p0 in point(), p1 in point(), p2 in point()) {
        let gap = |a: &P, b: &P| spherical_distance(a, b) > 0.1;
        prop_assume!(gap(&p0, &p1) && gap(&p1, &p2) && gap(&p0, &p2));
        let m = M::from_points(&p0, &p1, &p2).unwrap();
        prop_assert!(spherical_distance(&m.apply(&P::zero()), &p0) < 1e-9);
        prop_assert!(spherical_distance(&m.apply(&P::real(1.0)), &p1) < 1e-9);
        prop_assert!(spherical_distance(&m.apply(&P::infinity()), &p2) < 1e-9);
    }

    #[test]
    fn eta_conjugates_commute(m in moebius()) {
        // η M η commutes with η exactly when M does.
        let eta = M::eta();
        let sym = eta.compose(&m).compose(&eta);
        prop_assert_eq!(commutes_with_eta(&m, 1e-9), commutes_with_eta(&sym, 1e-9));
    }

    #[test]
    fn symmetric_maps_commute(t in 0.0f64..std::f64::consts::TAU, s in 0.1f64..3.0) {
        // (a z + b)/(b z + a) with real a, b commutes with η.
        let (a, b) = (C::new(s.cosh(), 0.0), C::new(s.sinh() * t.cos(), 0.0));
        let m = M::new(a, b, b, a).unwrap();
        prop_assert!(commutes_with_eta(&m, 1e-9));
    }
}

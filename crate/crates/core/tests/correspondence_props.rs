use corrlab::correspondence::{hausdorff_distance, Correspondence};
use corrlab::mating::{family_map, normal_form};
use corrlab::moebius::SpherePoint;
use corrlab::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

fn cplx(r: f64) -> impl Strategy<Value = C> {
    (-r..r, -r..r).prop_map(|(a, b)| C::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normal_forms_are_reversible(d in 2usize..=4, coeffs in prop::collection::vec(cplx(1.0), 5)) {
        let r = normal_form(d, &coeffs[..2 * d - 3]).unwrap();
        let corr = Correspondence::from_uniformizer(&r).unwrap();
        prop_assert_eq!(corr.bidegree(), (2 * d - 1, 2 * d - 1));
        prop_assert!(corr.reversibility_defect(50, 3) < 1e-8);
    }

    /// Forward images of x and backward images of η(x) are exchanged by η.
    #[test]
    fn fans_are_dual(c in cplx(2.0), x in cplx(3.0)) {
        prop_assume!(x.norm() > 0.1);
        let corr = Correspondence::from_uniformizer(&family_map(c)).unwrap();
        let p = SpherePoint::finite(x);
        let fwd = corr.forward_images(&p).unwrap().points();
        let bwd = corr.backward_images(&p.eta()).unwrap().points();
        prop_assert_eq!(fwd.len(), bwd.len());
        for y in &fwd {
            let best = bwd.iter().map(|b| b.distance(&y.eta())).fold(f64::MAX, f64::min);
            prop_assert!(best < 1e-6, "image {:?} has no dual", y);
        }
    }

    #[test]
    fn fan_points_lie_on_the_curve(c in cplx(2.0), x in cplx(3.0)) {
        let corr = Correspondence::from_uniformizer(&family_map(c)).unwrap();
        let p = SpherePoint::finite(x);
        for y in corr.forward_images(&p).unwrap().points() {
            prop_assert!(corr.relative_residual(&p, &y) < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hausdorff_is_a_pseudometric(a in cplx(2.0), b in cplx(2.0), c in cplx(2.0)) {
        let corr: Vec<_> = [a, b, c].iter().map(|&c| Correspondence::from_uniformizer(&family_map(c)).unwrap()).collect();
        let h = |i: usize, j: usize| hausdorff_distance(&corr[i], &corr[j], 24);
        prop_assert_eq!(h(0, 0).distance, 0.0);
        prop_assert_eq!(h(0, 1).distance, h(1, 0).distance);
        prop_assert!(h(0, 2).distance <= h(0, 1).distance + h(1, 2).distance + 2.0 * h(0, 1).mesh);
    }
}

use std::f64::consts::PI;

use holostab::bounds::{fourier_split, ip1_bound, ip2_bound, ip3_bound};
use holostab::ctf::{forward_t, forward_t_ctf, CtfSpec, TwoDistanceSpec};
use holostab::field::{apply_support, unitary_ft, unitary_ift, GridSpec, SupportSpec};
use holostab::fresnel::{propagate, FresnelNumber};
use holostab::io::fmt_float;
use holostab::random::{rng, white_field, white_full};
use proptest::prelude::*;

fn grid(dim: usize) -> GridSpec {
    if dim == 1 {
        GridSpec::new(1, 256, 8.0).unwrap()
    } else {
        GridSpec::new(2, 32, 4.0).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fourier_transform_is_unitary(seed in any::<u64>(), dim in 1usize..=2) {
        let h = white_full(grid(dim), true, &mut rng(seed));
        let hh = unitary_ft(&h).unwrap();
        prop_assert!((hh.norm() - h.norm()).abs() <= 1e-12 * h.norm());
        let back = unitary_ift(&hh).unwrap();
        prop_assert!(back.distance(&h).unwrap() <= 1e-12 * h.norm());
    }

    #[test]
    fn support_projection_is_idempotent_and_orthogonal(seed in any::<u64>(), dim in 1usize..=2) {
        let s = if dim == 1 { SupportSpec::stripe() } else { SupportSpec::ball() };
        let h = white_full(grid(dim), true, &mut rng(seed));
        let p = apply_support(&h, &s, false).unwrap();
        let q = apply_support(&h, &s, true).unwrap();
        let pp = apply_support(&p, &s, false).unwrap();
        prop_assert_eq!(pp.values(), p.values());
        prop_assert!(p.inner(&q).unwrap().norm() <= 1e-14 * h.norm_sq());
        prop_assert!(p.add(&q).unwrap().distance(&h).unwrap() <= 1e-14 * h.norm());
    }

    #[test]
    fn fresnel_propagation_is_unitary_and_composes(seed in any::<u64>(), fbar in 8.0f64..40.0) {
        let g = grid(1);
        let f = FresnelNumber::from_fbar(fbar).unwrap();
        let h = white_full(g, true, &mut rng(seed));
        let once = propagate(&h, f, false).unwrap();
        prop_assert!((once.norm() - h.norm()).abs() <= 1e-12 * h.norm());
        let twice = propagate(&once, f, false).unwrap();
        let half = propagate(&h, f.compose(f), false).unwrap();
        prop_assert!(twice.distance(&half).unwrap() <= 1e-12 * h.norm());
        let back = propagate(&once, f, true).unwrap();
        prop_assert!(back.distance(&h).unwrap() <= 1e-12 * h.norm());
    }

    #[test]
    fn ctf_route_matches_operator_route(seed in any::<u64>(), fbar in 4.0f64..40.0) {
        let g = grid(1);
        let s = SupportSpec::stripe();
        let f = FresnelNumber::from_fbar(fbar).unwrap();
        let mut r = rng(seed);
        let phi = white_field(g, &s, false, &mut r).unwrap();
        let mu = white_field(g, &s, false, &mut r).unwrap();
        let h = holostab::ctf::compose_h(&phi, &mu).unwrap();
        let a = forward_t(&h, f).unwrap();
        let b = forward_t_ctf(&phi, &mu, f).unwrap();
        prop_assert!(a.distance(&b).unwrap() <= 1e-12 * a.norm().max(1e-300));
        prop_assert!(a.norm() <= 2.0 * h.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn adjugate_inverts_two_distance_symbol(f1 in 5.0f64..100.0, ratio in 1.2f64..5.0, xi in 0.0f64..60.0) {
        let spec = TwoDistanceSpec::new(FresnelNumber::new(f1).unwrap(), FresnelNumber::new(f1 * ratio).unwrap()).unwrap();
        let t = xi * xi;
        let (m, a) = (spec.matrix(t), spec.adjugate(t));
        let d = 2.0 * spec.s_minus(t);
        for i in 0..2 {
            for j in 0..2 {
                let p = a[i][0] * m[0][j] + a[i][1] * m[1][j];
                let want = if i == j { d } else { 0.0 };
                prop_assert!((p - want).abs() <= 1e-12, "{p} vs {want}");
            }
        }
    }

    #[test]
    fn ip2_bound_monotone(f in 1.0f64..1e4, df in 0.0f64..1e3, alpha in 0.0f64..(PI / 2.0), da in 0.0f64..0.5, m in 1usize..=3) {
        let a2 = (alpha + da).min(PI / 2.0);
        let base = ip2_bound(f, alpha, m).unwrap().value;
        prop_assert!(ip2_bound(f + df, alpha, m).unwrap().value <= base * (1.0 + 1e-14));
        prop_assert!(ip2_bound(f, a2, m).unwrap().value >= base * (1.0 - 1e-14));
        prop_assert!(base > 0.0);
    }

    #[test]
    fn ip3_is_ip2_at_difference_number(f1 in 2.0f64..200.0, ratio in 1.1f64..10.0, m in 1usize..=3) {
        let spec = TwoDistanceSpec::new(FresnelNumber::new(f1).unwrap(), FresnelNumber::new(f1 * ratio).unwrap()).unwrap();
        let want = ip2_bound(spec.f_minus_abs().value(), 0.0, m).unwrap().value / 2f64.sqrt();
        prop_assert!((ip3_bound(&spec, m).unwrap().value - want).abs() <= 1e-15 * want);
    }

    #[test]
    fn split_complement_keeps_symbol_away_from_zero(
        f in 1.0f64..500.0, alpha in 0.0f64..(PI / 2.0), eps in 0.01f64..(PI / 6.0), r in 0.0f64..200.0
    ) {
        let spec = CtfSpec::new(FresnelNumber::new(f).unwrap(), alpha).unwrap();
        let split = fourier_split(&spec, eps, 250.0).unwrap();
        let s = spec.s_alpha(r * r).abs();
        if !split.in_dead_zone(r) {
            prop_assert!(s >= eps.sin() * (1.0 - 1e-9), "|s| = {s} at r = {r}");
        } else {
            prop_assert!(s <= eps.sin() * (1.0 + 1e-9) + 1e-12, "|s| = {s} at r = {r}");
        }
    }

    #[test]
    fn ip1_bound_decreasing(f in 8.0f64..4e3, df in 1e-3f64..100.0) {
        prop_assert!(ip1_bound(f + df).unwrap() < ip1_bound(f).unwrap());
    }

    #[test]
    fn float_format_round_trips(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
    }
}

use std::sync::Arc;

use bubbleforge::bounds::{lower_bound_4_4, thm_a_bound, thm_a_conditions, thm_a_dual_conditions};
use bubbleforge::field::{k_function, sum_field};
use bubbleforge::glue::{make_cutoff, solve_rho_m};
use bubbleforge::kelvin::{invert_point, kelvin_bubble, Inversion};
use bubbleforge::{Bubble, Dim, FieldRef, ScalarField};
use proptest::prelude::*;

fn dim_and_point(lo: usize, hi: usize, s: f64) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (lo..=hi).prop_flat_map(move |n| (Just(n), prop::collection::vec(-s..s, n)))
}

fn log_scale(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi).prop_map(|e: f64| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bubble_curvature_is_one(
        (n, x) in dim_and_point(3, 7, 3.0),
        lambda in log_scale(-1.5, 1.0),
        shift in -1.0f64..1.0,
    ) {
        let d = Dim::new(n).unwrap();
        let mut c = vec![0.0; n];
        c[0] = shift;
        let b = Bubble::new(d, lambda, c).unwrap();
        prop_assert!((k_function(&b, &x).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn inversion_is_an_involution(
        (n, x) in dim_and_point(3, 6, 4.0),
        a in log_scale(-1.0, 1.0),
    ) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let inv = Inversion::new(vec![0.0; n], a).unwrap();
        let y = invert_point(&inv, &x).unwrap();
        let z = invert_point(&inv, &y).unwrap();
        for (p, q) in x.iter().zip(&z) {
            prop_assert!((p - q).abs() <= 1e-10 * (1.0 + p.abs()));
        }
    }

    #[test]
    fn kelvin_image_of_bubble_is_a_bubble(
        (n, c) in dim_and_point(3, 6, 2.0),
        lambda in log_scale(-1.0, 1.0),
        a in log_scale(-0.5, 0.5),
    ) {
        let d = Dim::new(n).unwrap();
        let b = Bubble::new(d, lambda, c).unwrap();
        let inv = Inversion::new(vec![0.0; n], a).unwrap();
        let back = kelvin_bubble(&kelvin_bubble(&b, &inv).unwrap(), &inv).unwrap();
        prop_assert!((back.lambda() - lambda).abs() <= 1e-12 * lambda);
    }

    #[test]
    fn sums_are_symmetric_and_positive(
        (n, x) in dim_and_point(3, 5, 3.0),
        l1 in log_scale(-1.0, 1.0),
        l2 in log_scale(-1.0, 1.0),
    ) {
        let d = Dim::new(n).unwrap();
        let b1: FieldRef = Arc::new(Bubble::centered(d, l1).unwrap());
        let mut c = vec![0.0; n];
        c[n - 1] = 1.0;
        let b2: FieldRef = Arc::new(Bubble::new(d, l2, c).unwrap());
        let s = sum_field(b1.clone(), b2.clone()).unwrap();
        let t = sum_field(b2, b1).unwrap();
        let (js, jt) = (s.jet(&x).unwrap(), t.jet(&x).unwrap());
        prop_assert!(js.value > 0.0);
        prop_assert!((js.value - jt.value).abs() <= 1e-15 * js.value);
        prop_assert!((js.laplacian - jt.laplacian).abs() <= 1e-13 * js.laplacian.abs());
    }

    #[test]
    fn cutoff_is_a_monotone_partition(
        r_in in log_scale(-2.0, 1.0),
        width in log_scale(-2.0, 1.0),
        t in 0.0f64..1.0,
        s in 0.0f64..1.0,
    ) {
        let c = make_cutoff(r_in, r_in + width).unwrap();
        let (lo, hi) = if t < s { (t, s) } else { (s, t) };
        let (p_lo, p_hi) = (c.phi(r_in + lo * width), c.phi(r_in + hi * width));
        prop_assert!((0.0..=1.0).contains(&p_lo) && (0.0..=1.0).contains(&p_hi));
        prop_assert!(p_hi <= p_lo + 1e-15);
    }

    #[test]
    fn rho_solution_lies_in_band(
        delta_exp in -12.0f64..-2.0,
        alpha in 0.05f64..1.0,
    ) {
        let d = Dim::new(5).unwrap();
        if let Ok(s) = solve_rho_m(10f64.powf(delta_exp), alpha, d) {
            prop_assert!(s.in_band());
            prop_assert!(s.floor_margin() >= 0.0);
        }
    }

    #[test]
    fn first_condition_forces_the_bound(
        n in 3usize..=7,
        l2 in log_scale(-1.0, 1.0),
        rho in log_scale(-1.0, 1.0),
        ratio in 1.05f64..30.0,
        frac in 0.01f64..0.999,
    ) {
        let d = Dim::new(n).unwrap();
        let big_r = rho * ratio;
        let l1 = frac * l2 * (rho / big_r).powi(2) / (1.0 + (l2 / big_r).powi(2));
        prop_assert!(thm_a_conditions(l1, l2, rho, big_r, d).unwrap().0);
        let lb = lower_bound_4_4(l1, l2, rho, big_r, d).unwrap();
        prop_assert!(lb >= thm_a_bound(d) * (1.0 - 1e-12));
    }

    #[test]
    fn dual_conditions_are_the_inverted_ones(
        n in 3usize..=6,
        l1 in log_scale(-3.0, 3.0),
        l2 in log_scale(-1.0, 1.0),
        rho in log_scale(-1.0, 1.0),
        ratio in 1.05f64..30.0,
    ) {
        let d = Dim::new(n).unwrap();
        let big_r = rho * ratio;
        let dual = thm_a_dual_conditions(l1, l2, rho, big_r, d).unwrap();
        let mapped = thm_a_conditions(rho * rho / l2, rho * rho / l1, rho * rho / big_r, rho, d).unwrap();
        prop_assert_eq!(dual, mapped);
    }
}

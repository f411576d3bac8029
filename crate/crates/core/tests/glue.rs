mod common;

use std::sync::Arc;

use bubbleforge::fd::laplacian4;
use bubbleforge::field::{k_function, sum_field, AffineField};
use bubbleforge::glue::{
    glue, glue_bubble_into, glue_concentric, glue_disjoint, kg_deviation, make_cutoff, solve_rho_m,
    ConcentricConfig, Cutoff, DisjointConfig, GlueConfig, InsertConfig,
};
use bubbleforge::grid::GridSpec;
use bubbleforge::{Bubble, Error, FieldRef, ScalarField};
use common::{dim, direction, in_ball, log_uniform, point, rng, scaled};
use rand::Rng;

#[test]
fn cutoff_shape_and_derivative_bounds() {
    let mut r = rng(20);
    for _ in 0..20 {
        let r_in = log_uniform(&mut r, -2.0, 1.0);
        let w = log_uniform(&mut r, -2.0, 1.0);
        let c = make_cutoff(r_in, r_in + w).unwrap();
        assert_eq!(c.eval(r_in), (1.0, 0.0, 0.0));
        assert_eq!(c.eval(r_in + w), (0.0, 0.0, 0.0));
        assert!((c.phi(r_in + 0.5 * w) - 0.5).abs() < 1e-12);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let rr = r_in + w * i as f64 / 1000.0;
            let (p, p1, p2) = c.eval(rr);
            assert!(p <= prev + 1e-15);
            prev = p;
            assert!(p1.abs() <= Cutoff::C_PHI / w * (1.0 + 1e-12));
            assert!(p2.abs() <= Cutoff::C_PHI2 / (w * w) * (1.0 + 1e-12));
        }
    }
    assert!(matches!(make_cutoff(2.0, 1.0), Err(Error::BadRadii { .. })));
    assert!(make_cutoff(0.0, 1.0).is_err());
}

#[test]
fn rho_solver_band() {
    let d = dim(5);
    for alpha in [0.1, 0.25, 0.5, 1.0] {
        for k in 3..=12 {
            let s = solve_rho_m(10f64.powi(-k), alpha, d).unwrap();
            assert!(s.in_band(), "alpha {alpha} delta 1e-{k}");
            assert!(s.floor_margin() >= 0.0);
            let rm = s.rho_small_m().unwrap();
            let n = d.nf();
            let lhs = 1.0 + rm * rm;
            let rhs = (1.0 + s.rho_big_m.powi(2)) * 2f64.powf(-2.0 / (n + 2.0));
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }
    assert!(solve_rho_m(1e-3, 1.5, d).is_err());
}

#[test]
fn concentric_fidelity_and_positivity() {
    let mut r = rng(21);
    for _ in 0..20 {
        let n = r.random_range(3..=5);
        let d = dim(n);
        let rho = log_uniform(&mut r, -1.0, 0.5);
        let big_r = rho * (1.5 + 5.0 * r.random::<f64>());
        let cfg = ConcentricConfig::new(
            d,
            log_uniform(&mut r, -2.0, 1.0),
            log_uniform(&mut r, -2.0, 1.0),
            rho,
            big_r,
        )
        .unwrap();
        let u = glue_concentric(&cfg).unwrap();
        for _ in 0..20 {
            let dir = direction(&mut r, n);
            let inside = scaled(&dir, rho * r.random::<f64>());
            assert_eq!(u.value(&inside).unwrap(), cfg.b1.value(&inside).unwrap());
            let outside = scaled(&dir, big_r * (1.0 + r.random::<f64>()));
            assert_eq!(u.value(&outside).unwrap(), cfg.b2.value(&outside).unwrap());
            let mid = scaled(&dir, rho + (big_r - rho) * r.random::<f64>());
            let v = u.value(&mid).unwrap();
            let lo = cfg.b1.value(&mid).unwrap().min(cfg.b2.value(&mid).unwrap());
            assert!(v > 0.0 && v >= lo * (1.0 - 1e-14));
        }
    }
    let bad = ConcentricConfig::new(dim(3), 1.0, 1.0, 2.0, 1.0).unwrap();
    assert!(glue_concentric(&bad).is_err());
}

#[test]
fn equal_pieces_glue_to_themselves() {
    let d = dim(4);
    let cfg = ConcentricConfig::new(d, 0.7, 0.7, 0.5, 3.0).unwrap();
    let u = glue(&GlueConfig::Concentric(cfg.clone())).unwrap();
    let rep = kg_deviation(u.as_ref(), vec![0.0; 4], 0.5, 3.0, &GridSpec::default()).unwrap();
    assert!(rep.sup_abs_dev <= 1e-8);

    let host: FieldRef = Arc::new(Bubble::new(d, 0.1, vec![0.2, 0.0, 0.0, 0.0]).unwrap());
    let w = glue_bubble_into(&InsertConfig {
        host: host.clone(),
        x1: vec![0.2, 0.0, 0.0, 0.0],
        lambda: 0.1,
        rho_small_m: 2.0,
        rho_big_m: 4.0,
    })
    .unwrap();
    let mut r = rng(22);
    for _ in 0..50 {
        let x = in_ball(&mut r, 4, 1.0);
        let shifted: Vec<f64> = x
            .iter()
            .zip([0.2, 0.0, 0.0, 0.0])
            .map(|(a, b)| a + b)
            .collect();
        let (a, b) = (w.value(&x).unwrap(), host.value(&shifted).unwrap());
        assert!((a - b).abs() <= 1e-12 * b);
    }
    assert!((w.value(&[0.0; 4]).unwrap() - 0.1f64.powf(-1.0)).abs() < 1e-12);
}

#[test]
fn concentric_theorem_a_witness() {
    let cfg = ConcentricConfig::new(dim(3), 0.0099, 1.0, 1.0, 10.0).unwrap();
    let u = glue_concentric(&cfg).unwrap();
    let rep = kg_deviation(&u, vec![0.0; 3], 1.0, 10.0, &GridSpec::default()).unwrap();
    assert!(rep.grid.radial);
    assert!(rep.sup_abs_dev >= 5.0 / 3.0, "{}", rep.sup_abs_dev);
}

#[test]
fn disjoint_fidelity_and_positivity() {
    let mut r = rng(23);
    let d = dim(3);
    for _ in 0..10 {
        let b1 = Bubble::new(d, log_uniform(&mut r, -3.0, -1.0), point(&mut r, 3, 1.0)).unwrap();
        let c2: Vec<f64> = b1.center().iter().map(|c| c + 6.0).collect();
        let b2 = Bubble::new(d, log_uniform(&mut r, -1.0, 0.0), c2).unwrap();
        let u = glue_disjoint(&DisjointConfig::new(b1.clone(), 1.0, b2.clone(), 1.0)).unwrap();
        for _ in 0..20 {
            let dir = direction(&mut r, 3);
            let p: Vec<f64> = b1
                .center()
                .iter()
                .zip(&dir)
                .map(|(c, v)| c + 0.99 * v)
                .collect();
            assert_eq!(u.value(&p).unwrap(), b1.value(&p).unwrap());
            let q: Vec<f64> = b2
                .center()
                .iter()
                .zip(&dir)
                .map(|(c, v)| c + 0.99 * v)
                .collect();
            assert_eq!(u.value(&q).unwrap(), b2.value(&q).unwrap());
            let far = point(&mut r, 3, 1.0)
                .iter()
                .map(|v| v * 40.0 + 100.0)
                .collect::<Vec<_>>();
            let sum = b1.value(&far).unwrap() + b2.value(&far).unwrap();
            assert!((u.value(&far).unwrap() - sum).abs() <= 1e-15 * sum);
            let t: Vec<f64> = b1
                .center()
                .iter()
                .zip(&dir)
                .map(|(c, v)| c + 1.5 * v)
                .collect();
            let v = u.value(&t).unwrap();
            assert!(v >= b1.value(&t).unwrap().min(b2.value(&t).unwrap()));
        }
    }
    let b1 = Bubble::centered(d, 0.1).unwrap();
    let b2 = Bubble::new(d, 1.0, vec![3.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        glue_disjoint(&DisjointConfig::new(b1, 1.0, b2, 1.0)),
        Err(Error::Overlap { .. })
    ));
}

#[test]
fn glued_fields_are_c2_across_seams() {
    let d = dim(3);
    let cfg = ConcentricConfig::new(d, 0.3, 1.0, 1.0, 2.0).unwrap();
    let u = glue_concentric(&cfg).unwrap();
    let b1 = Bubble::centered(d, 0.2).unwrap();
    let b2 = Bubble::new(d, 1.0, vec![6.0, 0.0, 0.0]).unwrap();
    let v = glue_disjoint(&DisjointConfig::new(b1, 1.0, b2, 1.0)).unwrap();
    let fields: [&dyn ScalarField; 2] = [&u, &v];
    for f in fields {
        for r0 in [1.0, 2.0] {
            let at = |s: f64| [0.0, r0 + s, 0.0];
            // The analytic Laplacian has no jump at the seam.
            let below = f.jet(&at(-1e-9)).unwrap().laplacian;
            let above = f.jet(&at(1e-9)).unwrap().laplacian;
            assert!((below - above).abs() <= 1e-6 * (1.0 + below.abs()));
            // And FD agrees with it on both sides.
            for s in [-1e-2, 1e-2] {
                let x = at(s);
                let fd = laplacian4(|y| f.value(y), &x, 1e-3).unwrap();
                let exact = f.jet(&x).unwrap().laplacian;
                assert!(
                    (fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()),
                    "{fd} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn perturbed_host_stays_close() {
    // A bubble at x1 plus an affine perturbation of size δ λ^(-3/2).
    let d = dim(5);
    let lambda: f64 = 1e-2;
    let x1 = vec![0.1, 0.0, 0.0, 0.0, 0.0];
    let delta = 1e-3;
    let sol = solve_rho_m(delta, 0.25, d).unwrap();
    let scale = delta * lambda.powf(-1.5);
    let mut slope = vec![0.0; 5];
    slope[0] = 0.25 * scale / (lambda * 10.0);
    let offset = 0.5 * scale - slope[0] * x1[0];
    let host: FieldRef = sum_field(
        Arc::new(Bubble::new(d, lambda, x1.clone()).unwrap()),
        Arc::new(AffineField::new(d, offset, slope).unwrap()),
    )
    .unwrap()
    .into();
    let w = glue_bubble_into(&InsertConfig {
        host,
        x1,
        lambda,
        rho_small_m: sol.rho_small_m().unwrap(),
        rho_big_m: sol.rho_big_m,
    })
    .unwrap();
    assert!((k_function(&w, &[0.0; 5]).unwrap() - 1.0).abs() < 1e-8);
    let rep = kg_deviation(
        &w,
        vec![0.0; 5],
        lambda * sol.rho_small_m().unwrap(),
        lambda * sol.rho_big_m,
        &GridSpec::default().with_per_axis(9),
    )
    .unwrap();
    let bound = sol.delta_bar.powf(0.25);
    assert!(
        rep.sup_abs_dev > 0.0 && rep.sup_abs_dev <= 2.0 * bound,
        "{}",
        rep.sup_abs_dev
    );
}

mod common;

use std::sync::Arc;

use bubbleforge::blowup::{
    detect, detect_all, fit_bubble, rescale, weighted_max, BlowupInput, BlowupOpts, FitOpts,
    OUTER_RADIUS,
};
use bubbleforge::dim::dist;
use bubbleforge::field::{k_function, sum_field, PowerField};
use bubbleforge::{Bubble, Dim, FieldRef, Jet, Result, ScalarField};
use common::{dim, direction, in_ball, log_uniform, rng, scaled};
use rand::Rng;

/// `u_{1,0} + c (1 - |x|^2)^3` on the unit ball, `u_{1,0}` outside.
#[derive(Debug)]
struct Bumped {
    dim: Dim,
    c: f64,
    unit: Bubble,
}

impl Bumped {
    fn new(n: usize, c: f64) -> Self {
        let d = dim(n);
        Self {
            dim: d,
            c,
            unit: Bubble::centered(d, 1.0).unwrap(),
        }
    }
}

impl ScalarField for Bumped {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let mut j = self.unit.jet(x)?;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 < 1.0 {
            let s = 1.0 - r2;
            let n = self.dim.nf();
            j.value += self.c * s * s * s;
            for (g, xi) in j.gradient.iter_mut().zip(x) {
                *g += -6.0 * self.c * s * s * xi;
            }
            j.laplacian += self.c * (24.0 * s * r2 - 6.0 * n * s * s);
        }
        Ok(j)
    }
}

#[test]
fn weighted_max_geometry() {
    // Constant fields peak on the mid sphere.
    let mut r = rng(50);
    for n in 3..=4 {
        let d = dim(n);
        let eps = r.random_range(0.05..0.3);
        let c = log_uniform(&mut r, -1.0, 1.0);
        let f: FieldRef = Arc::new(PowerField::new(d, d.origin(), c, 0.0).unwrap());
        let inp = BlowupInput::new(f, eps, 4.0, 0.01).unwrap();
        let wm = weighted_max(&inp, &BlowupOpts::default(), &[]).unwrap();
        let expect = ((OUTER_RADIUS - eps) / 2.0).powf(d.half_weight()) * c;
        assert!(
            (wm.m_eps - expect).abs() <= 1e-6 * expect,
            "{} vs {expect}",
            wm.m_eps
        );
        let mid = (eps + OUTER_RADIUS) / 2.0;
        assert!((wm.x_o.iter().map(|v| v * v).sum::<f64>().sqrt() - mid).abs() < 1e-3);
    }
}

#[test]
fn rescaled_fields_are_normalized_and_windowed() {
    let mut r = rng(51);
    let d = dim(3);
    let f: FieldRef = sum_field(
        Arc::new(Bubble::new(d, 0.02, vec![0.3, 0.1, 0.0]).unwrap()),
        Arc::new(Bubble::new(d, 0.1, vec![-0.2, 0.2, 0.1]).unwrap()),
    )
    .unwrap()
    .into();
    let inp = BlowupInput::new(f.clone(), 0.05, 4.0, 0.01).unwrap();
    for _ in 0..30 {
        let c = scaled(&direction(&mut r, 3), r.random_range(0.1..0.6));
        let w = rescale(&inp, &c).unwrap();
        assert_eq!(w.value(&[0.0; 3]).unwrap(), 1.0);
        assert!((w.window() * 2.0 * w.lambda() - inp.d_eps(&c)).abs() < 1e-12);
        let x = in_ball(&mut r, 3, w.window());
        let kw = k_function(&w, &x).unwrap();
        let ku = k_function(f.as_ref(), &w.physical(&x)).unwrap();
        assert!((kw - ku).abs() <= 1e-9 * (1.0 + ku.abs()));
        assert!(w
            .value(&scaled(&direction(&mut r, 3), w.window() * 1.001))
            .is_err());
    }
}

#[test]
fn fit_measures_a_bump() {
    let opts = FitOpts::default();
    let f = fit_bubble(&Bumped::new(3, 0.0), 2.0, &opts).unwrap();
    assert!((f.mu - 1.0).abs() < 1e-12 && f.delta_measured <= 1e-8);

    let c = 0.01;
    let f = fit_bubble(&Bumped::new(3, c), 2.0, &opts).unwrap();
    // C² size of the bump: 1 + max|∇| + max|Δ| in units of c.
    let c2 = c * (1.0 + 6.0 * 0.2_f64.sqrt() * 0.64 + 18.0);
    assert!(f.delta_measured > 0.0);
    assert!(f.delta_measured <= c2, "{} vs {c2}", f.delta_measured);
    assert!(f.delta_measured >= 0.1 * c2, "{} vs {c2}", f.delta_measured);

    let off = Bubble::new(dim(4), 2.0, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
    let f = fit_bubble(&off, 3.0, &opts).unwrap();
    assert!((f.mu - 2.0).abs() < 1e-6 && dist(&f.y_o, off.center()) < 1e-6);
}

#[test]
fn planted_bubbles_are_recovered() {
    let mut r = rng(52);
    for n in [3, 4] {
        for _ in 0..3 {
            let d = dim(n);
            let y = scaled(&direction(&mut r, n), r.random_range(0.25..0.45));
            let mu = log_uniform(&mut r, -3.5, -2.5);
            let f: FieldRef = Arc::new(Bubble::new(d, mu, y.clone()).unwrap());
            let inp = BlowupInput::new(f, 0.1, 5.0, 1e-6).unwrap();
            let rep = detect(&inp, &BlowupOpts::default())
                .unwrap()
                .expect("bubble");
            assert!((rep.bubble_scale / mu - 1.0).abs() < 1e-6, "{rep:?}");
            assert!(dist(&rep.bubble_center, &y) < 1e-6 * mu.max(1e-3));
            assert!(rep.delta_measured <= 1e-6);
            assert!(rep.lambda < OUTER_RADIUS / rep.m_eps.powf(2.0 / (n as f64 - 2.0)));
        }
    }
}

#[test]
fn two_bubbles_give_two_detections() {
    let d = dim(3);
    let y1 = vec![0.3, 0.0, 0.0];
    let y2 = vec![-0.1, 0.35, 0.1];
    let f: FieldRef = sum_field(
        Arc::new(Bubble::new(d, 1e-3, y1.clone()).unwrap()),
        Arc::new(Bubble::new(d, 1e-3, y2.clone()).unwrap()),
    )
    .unwrap()
    .into();
    let inp = BlowupInput::new(f, 0.05, 3.0, 0.05).unwrap();
    let found = detect_all(&inp, &BlowupOpts::default(), 4).unwrap();
    assert_eq!(found.len(), 2, "{found:?}");
    assert!(dist(&found[0].x_o, &found[1].x_o) > 0.1);
    for rep in &found {
        let near = dist(&rep.bubble_center, &y1).min(dist(&rep.bubble_center, &y2));
        assert!(near < 1e-5, "{rep:?}");
        assert!((rep.bubble_scale / 1e-3 - 1.0).abs() < 1e-2);
        assert!(rep.delta_measured < 0.05);
    }
}

#[test]
fn slow_decay_has_no_bubble() {
    for n in [3, 4] {
        let d = dim(n);
        let f: FieldRef = Arc::new(PowerField::new(d, d.origin(), 1.0, -d.half_weight()).unwrap());
        let inp = BlowupInput::new(f, 0.05, 3.0, 0.01).unwrap();
        assert!(detect(&inp, &BlowupOpts::default()).unwrap().is_none());
    }
}

#[test]
fn rejects_bad_input() {
    let d = dim(3);
    let f: FieldRef = Arc::new(Bubble::centered(d, 1.0).unwrap());
    assert!(BlowupInput::new(f.clone(), 0.7, 3.0, 0.01).is_err());
    assert!(BlowupInput::new(f.clone(), 0.1, -1.0, 0.01).is_err());
    assert!(BlowupInput::new(f, 0.1, 3.0, 0.0).is_err());
}

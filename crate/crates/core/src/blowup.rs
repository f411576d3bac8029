//! Bubble detection on `B(0, 5/8) \ {0}`.
//!
//! The weighted field `U_ε = d_ε^((n-2)/2) u` with
//! `d_ε(x) = min(|x| - ε, 5/8 - |x|)` is maximized, the field is rescaled
//! around the maximizer so that its value there is one, and a standard bubble
//! `u_{μ,y}` is fitted to the rescaled field.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dim::{add, dist, norm, scale, sub, Dim};
use crate::error::{Error, Result};
use crate::field::{Bubble, Domain, FieldRef, Jet, ScalarField};
use crate::grid::{evaluate, lattice, Excluded, GridSpec};

/// Outer radius of the punctured ball the field lives on.
pub const OUTER_RADIUS: f64 = 0.625;

#[derive(Debug, Clone)]
pub struct BlowupInput {
    pub field: FieldRef,
    pub epsilon: f64,
    /// Radius of the fit window in rescaled units.
    pub big_r: f64,
    pub delta_target: f64,
}

impl BlowupInput {
    pub fn new(field: FieldRef, epsilon: f64, big_r: f64, delta_target: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < OUTER_RADIUS) {
            return Err(Error::BadRadii {
                inner: epsilon,
                outer: OUTER_RADIUS,
            });
        }
        for s in [big_r, delta_target] {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::NonpositiveScale(s));
            }
        }
        Ok(Self {
            field,
            epsilon,
            big_r,
            delta_target,
        })
    }

    pub fn dim(&self) -> Dim {
        self.field.dim()
    }

    /// `d_ε(x) = min(|x| - ε, 5/8 - |x|)`.
    pub fn d_eps(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        (r - self.epsilon).min(OUTER_RADIUS - r)
    }

    fn in_annulus(&self, x: &[f64]) -> bool {
        self.d_eps(x) >= 0.0
    }

    /// `U_ε(x) = d_ε(x)^((n-2)/2) u(x)`.
    pub fn weighted(&self, x: &[f64]) -> Result<f64> {
        let d = self.d_eps(x).max(0.0);
        Ok(d.powf(self.dim().half_weight()) * self.field.value(x)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitOpts {
    pub samples: usize,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for FitOpts {
    fn default() -> Self {
        Self {
            samples: 256,
            seed: 0x5eed,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupOpts {
    /// Coarse lattice points per axis over `[-5/8, 5/8]^n`.
    pub per_axis: Option<usize>,
    /// Coarse local maxima that get refined.
    pub candidates: usize,
    /// Lattice points per axis in each zoom step.
    pub zoom_points: usize,
    /// Radius of the center-shift search in units of `λ`.
    pub shift_radius: f64,
    pub fit: FitOpts,
}

impl Default for BlowupOpts {
    fn default() -> Self {
        Self {
            per_axis: None,
            candidates: 16,
            zoom_points: 5,
            shift_radius: 5.0,
            fit: FitOpts::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedMax {
    pub x_o: Vec<f64>,
    pub m_eps: f64,
    pub n_samples: usize,
}

/// Maximize `U_ε` over the annulus minus `excluded`.
///
/// A coarse lattice locates local maxima; the best `candidates` of them are
/// refined by repeated local lattices that shrink around the running best
/// until the step is far below the local bubble scale. Ties go to the
/// candidate found first.
pub fn weighted_max(
    inp: &BlowupInput,
    opts: &BlowupOpts,
    excluded: &[Excluded],
) -> Result<WeightedMax> {
    let dim = inp.dim();
    let n = dim.n();
    let keep =
        |x: &[f64]| inp.in_annulus(x) && excluded.iter().all(|e| dist(x, &e.center) >= e.radius);
    let k = opts
        .per_axis
        .unwrap_or_else(|| GridSpec::default_per_axis(dim));
    if k < 3 {
        return Err(Error::BadConfig(
            "grid needs at least 3 points per axis".into(),
        ));
    }
    let lo = vec![-OUTER_RADIUS; n];
    let hi = vec![OUTER_RADIUS; n];
    let (spacing, all) = lattice(&lo, &hi, k);
    let kept: Vec<usize> = (0..all.len()).filter(|&i| keep(&all[i])).collect();
    if kept.is_empty() {
        return Err(Error::BadConfig(
            "scan region contains no grid points".into(),
        ));
    }
    let pts: Vec<Vec<f64>> = kept.iter().map(|&i| all[i].clone()).collect();
    let vals = evaluate(&|x: &[f64]| inp.weighted(x), &pts)?;
    let mut grid_val = vec![None; all.len()];
    for (&i, &v) in kept.iter().zip(&vals) {
        grid_val[i] = Some(v);
    }
    let mut n_samples = pts.len();

    // Lattice neighbors along each axis; the last axis varies fastest.
    let is_local_max = |i: usize, v: f64| {
        let mut stride = 1;
        for _ in 0..n {
            let digit = (i / stride) % k;
            let nbrs = [
                (digit > 0).then(|| i - stride),
                (digit + 1 < k).then(|| i + stride),
            ];
            for j in nbrs.into_iter().flatten() {
                if grid_val[j].is_some_and(|w| w > v) {
                    return false;
                }
            }
            stride *= k;
        }
        true
    };
    let mut maxima: Vec<(usize, f64)> = kept
        .iter()
        .zip(&vals)
        .filter(|(&i, &v)| is_local_max(i, v))
        .map(|(&i, &v)| (i, v))
        .collect();
    maxima.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    maxima.truncate(opts.candidates.max(1));

    let h = spacing[0];
    let m = opts.zoom_points.max(3);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (i, v) in maxima {
        let mut x = all[i].clone();
        let mut val = v;
        let mut w = 1.5 * h;
        for _ in 0..200 {
            let lam = inp.field.value(&x)?.powf(-1.0 / dim.half_weight());
            if w < (1e-4 * lam).min(1e-6 * h) {
                break;
            }
            let llo: Vec<f64> = x.iter().map(|c| c - w).collect();
            let lhi: Vec<f64> = x.iter().map(|c| c + w).collect();
            let (_, local) = lattice(&llo, &lhi, m);
            let local: Vec<Vec<f64>> = local.into_iter().filter(|p| keep(p)).collect();
            let lv = evaluate(&|p: &[f64]| inp.weighted(p), &local)?;
            n_samples += local.len();
            for (p, pv) in local.into_iter().zip(lv) {
                if pv > val {
                    val = pv;
                    x = p;
                }
            }
            w *= 0.6;
        }
        if best.as_ref().is_none_or(|(_, b)| val > *b) {
            best = Some((x, val));
        }
    }
    let (x_o, m_eps) = best.expect("at least one candidate");
    Ok(WeightedMax {
        x_o,
        m_eps,
        n_samples,
    })
}

/// `w_λ(x) = λ^((n-2)/2) u(x_c + λx) = u(x_c + λx)/u(x_c)` with
/// `λ = u(x_c)^(-2/(n-2))`, defined on `|x| <= d_ε(x_c)/(2λ)`.
#[derive(Debug, Clone)]
pub struct Rescaled {
    inner: FieldRef,
    center: Vec<f64>,
    lambda: f64,
    u_center: f64,
    window: f64,
}

impl Rescaled {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Largest admissible `|x|`, in rescaled units.
    pub fn window(&self) -> f64 {
        self.window
    }

    /// The original-coordinates point `x_c + λx`.
    pub fn physical(&self, x: &[f64]) -> Vec<f64> {
        add(&self.center, &scale(x, self.lambda))
    }
}

impl ScalarField for Rescaled {
    fn dim(&self) -> Dim {
        self.inner.dim()
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        self.dim().check(x)?;
        let r = norm(x);
        if r > self.window {
            return Err(Error::OutOfDomain {
                radius: r,
                window: self.window,
            });
        }
        let j = self.inner.jet(&self.physical(x))?;
        let s = self.lambda / self.u_center;
        Ok(Jet {
            value: j.value / self.u_center,
            gradient: j.gradient.iter().map(|g| g * s).collect(),
            laplacian: j.laplacian * s * self.lambda,
        })
    }

    fn domain(&self) -> Domain {
        Domain::Ball {
            center: self.dim().origin(),
            radius: self.window,
        }
    }

    fn radial_center(&self) -> Option<Vec<f64>> {
        self.inner
            .radial_center()
            .map(|c| scale(&sub(&c, &self.center), 1.0 / self.lambda))
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        self.inner.length_scale(&self.physical(x)) / self.lambda
    }
}

pub fn rescale(inp: &BlowupInput, x_center: &[f64]) -> Result<Rescaled> {
    inp.dim().check(x_center)?;
    let d = inp.d_eps(x_center);
    if d <= 0.0 {
        return Err(Error::OutOfDomain {
            radius: norm(x_center),
            window: OUTER_RADIUS,
        });
    }
    let u_center = inp.field.value(x_center)?;
    if !(u_center > 0.0) {
        return Err(Error::NonpositiveValue { value: u_center });
    }
    let lambda = u_center.powf(-1.0 / inp.dim().half_weight());
    Ok(Rescaled {
        inner: inp.field.clone(),
        center: x_center.to_vec(),
        lambda,
        u_center,
        window: d / (2.0 * lambda),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BubbleFit {
    pub mu: f64,
    pub y_o: Vec<f64>,
    /// Sampled `max (|Δw| + |Δ∇w| + |ΔΔw|)` against the fitted bubble.
    pub delta_measured: f64,
    pub iterations: usize,
    pub n_samples: usize,
}

fn ball_samples(dim: Dim, radius: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = dim.n();
    let mut out = Vec::with_capacity(count + 1);
    out.push(vec![0.0; n]);
    while out.len() <= count {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if norm(&x) <= 1.0 {
            out.push(scale(&x, radius));
        }
    }
    out
}

/// Value, gradient and Laplacian of `u_{μ,y}` at `x`, each with its
/// derivatives in `(log μ, y)`.
fn model_rows(x: &[f64], log_mu: f64, y: &[f64], dim: Dim) -> Vec<(f64, Vec<f64>)> {
    let n = dim.nf();
    let h = dim.half_weight();
    let mu = log_mu.exp();
    let m2 = mu * mu;
    let s = sub(x, y);
    let q = m2 + s.iter().map(|v| v * v).sum::<f64>();
    let b = (mu / q).powf(h);
    let a = h * (1.0 - 2.0 * m2 / q);
    let mut rows = Vec::with_capacity(s.len() + 2);

    let mut dv = vec![b * a];
    dv.extend(s.iter().map(|sj| (n - 2.0) * b * sj / q));
    rows.push((b, dv));

    for (i, si) in s.iter().enumerate() {
        let g = -(n - 2.0) * b * si / q;
        let mut dg = vec![-(n - 2.0) * si * b * (a / q - 2.0 * m2 / (q * q))];
        dg.extend(s.iter().enumerate().map(|(j, sj)| {
            let delta = if i == j { 1.0 / q } else { 0.0 };
            -(n - 2.0) * b * (n * si * sj / (q * q) - delta)
        }));
        rows.push((g, dg));
    }

    let c = -n * (n - 2.0) * b * m2 / (q * q);
    let mut dl = vec![c * (a + 2.0 - 4.0 * m2 / q)];
    dl.extend(s.iter().map(|sj| c * (n + 2.0) * sj / q));
    rows.push((c, dl));
    rows
}

/// Least-squares fit of `u_{μ,y}` to `w` on sampled points of `B(0, R)`.
///
/// Levenberg-Marquardt on `(log μ, y)` from `(1, 0)`. Residuals stack the
/// value, gradient and Laplacian differences, matching the C² deviation that
/// is reported; a plain value fit lets a small additive offset drag `μ` and
/// inflates the Laplacian error at the center. The deviation is sampled on
/// the fit points together with an independent set of the same size.
pub fn fit_bubble(w: &dyn ScalarField, big_r: f64, opts: &FitOpts) -> Result<BubbleFit> {
    let dim = w.dim();
    let n = dim.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pts = ball_samples(dim, big_r, opts.samples, &mut rng);
    let mut target = Vec::with_capacity(pts.len() * (n + 2));
    for x in &pts {
        let j = w.jet(x)?;
        target.push(j.value);
        target.extend(j.gradient);
        target.push(j.laplacian);
    }

    let residuals = |theta: &[f64]| -> (Vec<f64>, DMatrix<f64>) {
        let mut r = Vec::with_capacity(target.len());
        let mut jac = DMatrix::zeros(target.len(), n + 1);
        for x in &pts {
            for (b, row) in model_rows(x, theta[0], &theta[1..], dim) {
                let i = r.len();
                r.push(target[i] - b);
                for (j, v) in row.into_iter().enumerate() {
                    jac[(i, j)] = v;
                }
            }
        }
        (r, jac)
    };
    let cost = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut theta = vec![0.0; n + 1];
    let (mut r, mut jac) = residuals(&theta);
    let mut c = cost(&r);
    let mut damping = 1e-3;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * DVector::from_column_slice(&r);
        let mut accepted = false;
        let mut small_step = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for i in 0..=n {
                a[(i, i)] += damping * jtj[(i, i)].max(1e-300);
            }
            let Some(step) = a.cholesky().map(|ch| ch.solve(&jtr)) else {
                damping *= 10.0;
                continue;
            };
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
            let mu = trial[0].exp();
            if !(1e-6..=1e6).contains(&mu) {
                return Err(Error::FitDiverged { mu });
            }
            let (tr, tj) = residuals(&trial);
            let tc = cost(&tr);
            if tc.is_finite() && tc <= c {
                small_step = step.norm() <= 1e-15 * (1.0 + norm(&theta));
                theta = trial;
                r = tr;
                jac = tj;
                let improved = c - tc;
                c = tc;
                damping = (damping / 3.0).max(1e-12);
                accepted = true;
                small_step |= improved <= 1e-30 * (1.0 + c);
                break;
            }
            damping *= 4.0;
        }
        if !accepted || small_step || c == 0.0 {
            break;
        }
    }

    let mu = theta[0].exp();
    let fitted = Bubble::new(dim, mu, theta[1..].to_vec())?;
    let mut check = pts;
    check.extend(
        ball_samples(dim, big_r, opts.samples, &mut rng)
            .into_iter()
            .skip(1),
    );
    let devs = evaluate(
        &|x: &[f64]| {
            let a = w.jet(x)?;
            let b = fitted.jet(x)?;
            let dg = norm(&sub(&a.gradient, &b.gradient));
            Ok((a.value - b.value).abs() + dg + (a.laplacian - b.laplacian).abs())
        },
        &check,
    )?;
    let delta_measured = devs.iter().copied().fold(0.0, f64::max);
    Ok(BubbleFit {
        mu,
        y_o: theta[1..].to_vec(),
        delta_measured,
        iterations,
        n_samples: check.len(),
    })
}

/// One detected bubble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BubbleReport {
    pub x_o: Vec<f64>,
    pub m_eps: f64,
    /// `λ = u(x_o)^(-2/(n-2))`.
    pub lambda: f64,
    /// `d_ε(x_o) / M_ε^(2/(n-2))`, equal to `λ` up to rounding.
    pub lambda_consistency: f64,
    /// Fit of `w_λ` about `x_o`.
    pub mu: f64,
    pub y_o: Vec<f64>,
    pub delta_measured: f64,
    /// Fit window actually used, `min(R, d_ε(x_o)/(2λ))`.
    pub window: f64,
    /// Shifted center and the fit of the field rescaled about it.
    pub x_1: Vec<f64>,
    pub shift: f64,
    pub lambda_1: f64,
    pub mu_1: f64,
    pub y_1: Vec<f64>,
    pub delta_shifted: f64,
    /// Recovered bubble in original coordinates: `λμ` and `x_o + λ y_o`.
    pub bubble_scale: f64,
    pub bubble_center: Vec<f64>,
}

/// Weighted maximum, rescale, fit; `None` when the fit misses `delta_target`
/// or no bubble of admissible scale fits.
pub fn detect(inp: &BlowupInput, opts: &BlowupOpts) -> Result<Option<BubbleReport>> {
    detect_excluding(inp, opts, &[])
}

pub fn detect_excluding(
    inp: &BlowupInput,
    opts: &BlowupOpts,
    excluded: &[Excluded],
) -> Result<Option<BubbleReport>> {
    let dim = inp.dim();
    let wm = weighted_max(inp, opts, excluded)?;
    let w = rescale(inp, &wm.x_o)?;
    let lambda = w.lambda();
    let window = inp.big_r.min(w.window());
    let fit = match fit_bubble(&w, window, &opts.fit) {
        Ok(f) => f,
        Err(Error::FitDiverged { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };

    // The shift that makes the rescaled field closest to u_{1,0} moves the
    // center onto the fitted bubble center.
    let mut offset = scale(&fit.y_o, lambda);
    let limit = opts.shift_radius * lambda;
    if norm(&offset) > limit {
        offset = scale(&offset, limit / norm(&offset));
    }
    let mut x_1 = add(&wm.x_o, &offset);
    if !inp.in_annulus(&x_1) {
        x_1 = wm.x_o.clone();
    }
    let w1 = rescale(inp, &x_1)?;
    let fit1 = match fit_bubble(&w1, inp.big_r.min(w1.window()), &opts.fit) {
        Ok(f) => f,
        Err(Error::FitDiverged { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };

    if !(fit.delta_measured < inp.delta_target) {
        return Ok(None);
    }
    Ok(Some(BubbleReport {
        lambda_consistency: inp.d_eps(&wm.x_o) / wm.m_eps.powf(1.0 / dim.half_weight()),
        bubble_scale: lambda * fit.mu,
        bubble_center: add(&wm.x_o, &scale(&fit.y_o, lambda)),
        shift: dist(&x_1, &wm.x_o),
        x_o: wm.x_o,
        m_eps: wm.m_eps,
        lambda,
        mu: fit.mu,
        y_o: fit.y_o,
        delta_measured: fit.delta_measured,
        window,
        x_1,
        lambda_1: w1.lambda(),
        mu_1: fit1.mu,
        y_1: fit1.y_o,
        delta_shifted: fit1.delta_measured,
    }))
}

/// Repeated detection: after each bubble the ball `B(x_o, λR)` is excised
/// and the weighted maximum is taken again.
pub fn detect_all(
    inp: &BlowupInput,
    opts: &BlowupOpts,
    max_bubbles: usize,
) -> Result<Vec<BubbleReport>> {
    let mut found = Vec::new();
    let mut excluded = Vec::new();
    while found.len() < max_bubbles {
        match detect_excluding(inp, opts, &excluded)? {
            Some(rep) => {
                excluded.push(Excluded {
                    center: rep.x_o.clone(),
                    radius: rep.lambda * inp.big_r,
                });
                found.push(rep);
            }
            None => break,
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{k_function, sum_field};
    use std::sync::Arc;

    fn d(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    #[derive(Debug)]
    struct Constant(Dim, f64);

    impl ScalarField for Constant {
        fn dim(&self) -> Dim {
            self.0
        }
        fn jet(&self, _x: &[f64]) -> Result<Jet> {
            Ok(Jet {
                value: self.1,
                gradient: vec![0.0; self.0.n()],
                laplacian: 0.0,
            })
        }
    }

    fn planted(mu: f64, center: Vec<f64>) -> FieldRef {
        Arc::new(Bubble::new(d(3), mu, center).unwrap())
    }

    #[test]
    fn constant_field_max_on_mid_sphere() {
        let eps = 0.1;
        let inp = BlowupInput::new(Arc::new(Constant(d(3), 2.0)), eps, 4.0, 0.01).unwrap();
        let wm = weighted_max(&inp, &BlowupOpts::default(), &[]).unwrap();
        let expect = ((OUTER_RADIUS - eps) / 2.0).sqrt() * 2.0;
        assert!(
            (wm.m_eps - expect).abs() < 1e-6 * expect,
            "{} vs {expect}",
            wm.m_eps
        );
        assert!((norm(&wm.x_o) - (eps + OUTER_RADIUS) / 2.0).abs() < 2e-3);

        let twice = BlowupInput::new(Arc::new(Constant(d(3), 4.0)), eps, 4.0, 0.01).unwrap();
        let wm2 = weighted_max(&twice, &BlowupOpts::default(), &[]).unwrap();
        assert!((wm2.m_eps - 2.0 * wm.m_eps).abs() < 1e-9 * wm.m_eps);
    }

    #[test]
    fn narrow_bubble_located() {
        let y = vec![0.3, 0.0, 0.0];
        let inp = BlowupInput::new(planted(1e-3, y.clone()), 0.1, 4.0, 0.01).unwrap();
        let wm = weighted_max(&inp, &BlowupOpts::default(), &[]).unwrap();
        assert!(dist(&wm.x_o, &y) < 1e-5);
    }

    #[test]
    fn rescale_of_bubble_is_standard() {
        let y = vec![0.2, -0.1, 0.15];
        let inp = BlowupInput::new(planted(0.01, y.clone()), 0.05, 4.0, 0.01).unwrap();
        let w = rescale(&inp, &y).unwrap();
        assert_eq!(w.value(&[0.0; 3]).unwrap(), 1.0);
        let unit = Bubble::centered(d(3), 1.0).unwrap();
        for x in [[0.5, 0.1, -2.0], [3.0, 0.0, 1.0], [-0.2, 0.7, 0.3]] {
            let a = w.jet(&x).unwrap();
            let b = unit.jet(&x).unwrap();
            assert!((a.value - b.value).abs() < 1e-12);
            assert!((a.laplacian - b.laplacian).abs() < 1e-11);
        }
        let far = [w.window() * 1.01, 0.0, 0.0];
        assert!(matches!(w.jet(&far), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn rescale_preserves_k() {
        let f: FieldRef = sum_field(
            planted(0.05, vec![0.3, 0.0, 0.0]),
            planted(0.2, vec![0.0, 0.2, 0.1]),
        )
        .unwrap()
        .into();
        let inp = BlowupInput::new(f.clone(), 0.05, 4.0, 0.01).unwrap();
        let c = [0.25, 0.05, 0.0];
        let w = rescale(&inp, &c).unwrap();
        for x in [[0.1, 0.2, 0.3], [-0.5, 0.0, 0.4]] {
            let kw = k_function(&w, &x).unwrap();
            let ku = k_function(f.as_ref(), &w.physical(&x)).unwrap();
            assert!((kw - ku).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_exact_and_shifted() {
        let opts = FitOpts::default();
        let unit = Bubble::centered(d(3), 1.0).unwrap();
        let f = fit_bubble(&unit, 3.0, &opts).unwrap();
        assert!((f.mu - 1.0).abs() < 1e-12 && norm(&f.y_o) < 1e-12);
        assert!(f.delta_measured <= 1e-8);

        let off = Bubble::new(d(3), 2.0, vec![1.0, 0.0, 0.0]).unwrap();
        let f = fit_bubble(&off, 3.0, &opts).unwrap();
        assert!((f.mu - 2.0).abs() < 1e-6, "{f:?}");
        assert!(dist(&f.y_o, &[1.0, 0.0, 0.0]) < 1e-6);
    }

    #[test]
    fn plant_and_recover() {
        let y = vec![0.0, 0.3, 0.1];
        let inp = BlowupInput::new(planted(1e-3, y.clone()), 0.1, 10.0, 1e-6).unwrap();
        let rep = detect(&inp, &BlowupOpts::default())
            .unwrap()
            .expect("bubble");
        assert!((rep.bubble_scale / 1e-3 - 1.0).abs() < 1e-6);
        assert!(dist(&rep.bubble_center, &y) < 1e-9);
        assert!(rep.delta_measured <= 1e-6);
        assert!((rep.lambda_consistency / rep.lambda - 1.0).abs() < 1e-12);
        assert!(rep.lambda < OUTER_RADIUS / rep.m_eps.powf(2.0));
        assert!((rep.mu_1 - 1.0).abs() < 1e-6 && norm(&rep.y_1) < 1e-6);
    }
}

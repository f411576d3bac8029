//! One-dimensional adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae on [-1, 1] (nonnegative half) and weights; every other
// abscissa, starting at index 1, is also a 7-point Gauss node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self {
            abs: 1e-13,
            rel: 1e-10,
            max_intervals: 200,
        }
    }
}

/// Integral of a scalar function together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_est: f64,
    pub n_evals: usize,
}

impl std::ops::Add for QuadResult {
    type Output = QuadResult;

    fn add(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            err_est: self.err_est + other.err_est,
            n_evals: self.n_evals + other.n_evals,
        }
    }
}

impl QuadResult {
    pub fn scale(self, s: f64) -> QuadResult {
        QuadResult {
            value: s * self.value,
            err_est: s.abs() * self.err_est,
            n_evals: self.n_evals,
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        // Larger error first; ties by position keep the order reproducible.
        self.err
            .total_cmp(&o.err)
            .then_with(|| o.a.total_cmp(&self.a))
    }
}

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx)? + f(c + dx)?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let (k, g) = (k * h, g * h);
    if !k.is_finite() {
        return Err(Error::NonFinite { at: vec![a, b] });
    }
    Ok((k, (k - g).abs()))
}

/// Adaptive integration of `f` over `[a, b]`, bisecting the interval with
/// the largest error estimate until the total meets the tolerance.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: &QuadTol) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(QuadResult::default());
    }
    let (v, e) = gk15(&f, a, b)?;
    let mut evals = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Piece {
        a,
        b,
        value: v,
        err: e,
    });
    let (mut total, mut err) = (v, e);
    while err > tol.abs.max(tol.rel * total.abs()) && heap.len() < tol.max_intervals {
        let p = heap.pop().expect("nonempty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(&f, p.a, m)?;
        let (v2, e2) = gk15(&f, m, p.b)?;
        evals += 30;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Piece {
            a: p.a,
            b: m,
            value: v1,
            err: e1,
        });
        heap.push(Piece {
            a: m,
            b: p.b,
            value: v2,
            err: e2,
        });
    }
    // Re-sum in position order so the result does not depend on the
    // history of floating-point updates above.
    let mut pieces = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = pieces.iter().map(|p| p.value).sum();
    let err_est = pieces.iter().map(|p| p.err).sum();
    Ok(QuadResult {
        value,
        err_est,
        n_evals: evals,
    })
}

/// Integral over `[a, b]` with `a > 0` under `t = e^s`, for integrands with a
/// power-law singularity at zero.
pub fn integrate_log<F>(f: F, a: f64, b: f64, tol: &QuadTol) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(a > 0.0) {
        return Err(Error::BadRadii { inner: a, outer: b });
    }
    integrate(
        |s| {
            let t = s.exp();
            Ok(f(t)? * t)
        },
        a.ln(),
        b.ln(),
        tol,
    )
}

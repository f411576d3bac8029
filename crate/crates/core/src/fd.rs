//! Central finite differences, used as an independent check on analytic jets.

use crate::error::Result;

fn shifted(x: &[f64], axis: usize, dx: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[axis] += dx;
    y
}

/// Second-order Laplacian: `sum_i (f(x+h e_i) - 2 f(x) + f(x-h e_i)) / h^2`.
pub fn laplacian2<F>(f: F, x: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let f0 = f(x)?;
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += f(&shifted(x, i, h))? - 2.0 * f0 + f(&shifted(x, i, -h))?;
    }
    Ok(acc / (h * h))
}

/// Fourth-order Laplacian from the five-point stencil
/// `(-f(+2h) + 16 f(+h) - 30 f(0) + 16 f(-h) - f(-2h)) / (12 h^2)` per axis.
pub fn laplacian4<F>(f: F, x: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let f0 = f(x)?;
    let mut acc = 0.0;
    for i in 0..x.len() {
        let p1 = f(&shifted(x, i, h))?;
        let m1 = f(&shifted(x, i, -h))?;
        let p2 = f(&shifted(x, i, 2.0 * h))?;
        let m2 = f(&shifted(x, i, -2.0 * h))?;
        acc += -p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2;
    }
    Ok(acc / (12.0 * h * h))
}

/// Fourth-order central gradient.
pub fn gradient4<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    (0..x.len())
        .map(|i| {
            let p1 = f(&shifted(x, i, h))?;
            let m1 = f(&shifted(x, i, -h))?;
            let p2 = f(&shifted(x, i, 2.0 * h))?;
            let m2 = f(&shifted(x, i, -2.0 * h))?;
            Ok((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h))
        })
        .collect()
}

//! Quadrature rules on the unit sphere `S^(n-1)`.

use std::f64::consts::PI;

use gauss_quad::GaussJacobi;

use crate::dim::{norm, sphere_area, Dim};
use crate::error::{Error, Result};

/// How directions around a center are sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum AngularRule {
    /// The integrand depends only on the distance to the center: one
    /// direction carries the whole sphere.
    Radial,
    /// The integrand depends only on the angle to `axis`; `order`
    /// Gauss points in the cosine of that angle.
    Axisymmetric { axis: Vec<f64>, order: usize },
    /// Tensor rule: Gauss points in the cosine of each polar angle,
    /// `2 * order` equispaced points in the azimuth.
    Product { order: usize },
}

/// A direction and its weight; the weights sum to the sphere area.
pub type Direction = (Vec<f64>, f64);

/// Nodes `u = cos θ` and weights for `∫_0^π g(cos θ) sin^(m-2) θ dθ`,
/// i.e. Gauss–Jacobi with weight `(1 - u^2)^((m-3)/2)`. Exact for
/// polynomials on the sphere `S^(m-1)` up to degree `2 order - 1`.
fn polar_nodes(m: usize, order: usize) -> Result<Vec<(f64, f64)>> {
    let e = (m as f64 - 3.0) / 2.0;
    let rule = GaussJacobi::new(order, e, e)
        .map_err(|_| Error::BadConfig(format!("Gauss order {order} too small")))?;
    Ok(rule.as_node_weight_pairs().to_vec())
}

/// Unit vector orthogonal to `axis` (which must be a unit vector).
fn orthogonal(axis: &[f64]) -> Vec<f64> {
    let k = (0..axis.len())
        .min_by(|&i, &j| axis[i].abs().total_cmp(&axis[j].abs()))
        .expect("nonempty");
    let mut e = vec![0.0; axis.len()];
    e[k] = 1.0;
    let d = axis[k];
    for (ei, ai) in e.iter_mut().zip(axis) {
        *ei -= d * ai;
    }
    let m = norm(&e);
    e.iter().map(|v| v / m).collect()
}

/// Product rule on `S^(m-1)` embedded in the first `m` coordinates.
fn product(m: usize, order: usize) -> Result<Vec<Direction>> {
    if m == 2 {
        let k = 2 * order;
        return Ok((0..k)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / k as f64;
                (vec![phi.cos(), phi.sin()], 2.0 * PI / k as f64)
            })
            .collect());
    }
    let lower = product(m - 1, order)?;
    let mut out = Vec::with_capacity(order * lower.len());
    for (c, wt) in polar_nodes(m, order)? {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for (y, wy) in &lower {
            let mut x = Vec::with_capacity(m);
            x.push(c);
            x.extend(y.iter().map(|v| s * v));
            out.push((x, wt * wy));
        }
    }
    Ok(out)
}

impl AngularRule {
    pub fn directions(&self, dim: Dim) -> Result<Vec<Direction>> {
        let n = dim.n();
        match self {
            AngularRule::Radial => Ok(vec![(dim.unit(0), dim.unit_sphere_area())]),
            AngularRule::Axisymmetric { axis, order } => {
                dim.check(axis)?;
                let len = norm(axis);
                if !(len > 0.0) {
                    return Err(Error::BadConfig("zero symmetry axis".into()));
                }
                let e: Vec<f64> = axis.iter().map(|v| v / len).collect();
                let f = orthogonal(&e);
                let ring = sphere_area(n - 1);
                Ok(polar_nodes(n, *order)?
                    .into_iter()
                    .map(|(c, w)| {
                        let s = (1.0 - c * c).max(0.0).sqrt();
                        let x = e.iter().zip(&f).map(|(a, b)| c * a + s * b).collect();
                        (x, ring * w)
                    })
                    .collect())
            }
            AngularRule::Product { order } => product(n, *order),
        }
    }

    /// The same rule at half the resolution, for error estimation.
    pub fn coarser(&self) -> Option<AngularRule> {
        match self {
            AngularRule::Radial => None,
            AngularRule::Axisymmetric { axis, order } => Some(AngularRule::Axisymmetric {
                axis: axis.clone(),
                order: (order / 2).max(2),
            }),
            AngularRule::Product { order } => Some(AngularRule::Product {
                order: (order / 2).max(2),
            }),
        }
    }

    /// Default product resolution: at least 4096 directions in n = 3.
    pub fn default_product(dim: Dim) -> AngularRule {
        let order = match dim.n() {
            3 => 48,
            4 => 20,
            5 => 12,
            _ => 8,
        };
        AngularRule::Product { order }
    }
}

use super::{Domain, Jet, ScalarField};
use crate::dim::{norm_sq, Dim};
use crate::error::Result;

/// The base field `v_b(x) = (|x|^2 + 1)^((2-n)/4)`.
///
/// It decays like `|x|^((2-n)/2)`, slower than a bubble, and its K-function
/// [`base_k`] stays in `[(n-2)/(4n), 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseField {
    dim: Dim,
}

impl BaseField {
    pub fn new(dim: Dim) -> Self {
        Self { dim }
    }
}

impl ScalarField for BaseField {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        self.dim.check(x)?;
        let n = self.dim.nf();
        let m = (2.0 - n) / 4.0;
        let r2 = norm_sq(x);
        let q = r2 + 1.0;
        let v = q.powf(m);
        let g = 2.0 * m * v / q;
        Ok(Jet {
            value: v,
            gradient: x.iter().map(|xi| g * xi).collect(),
            laplacian: g * n + 4.0 * m * (m - 1.0) * v / (q * q) * r2,
        })
    }

    fn domain(&self) -> Domain {
        Domain::Whole
    }

    fn radial_center(&self) -> Option<Vec<f64>> {
        Some(self.dim.origin())
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        (1.0 + norm_sq(x)).sqrt()
    }
}

/// Closed-form K-function of [`BaseField`]:
/// `K_b(x) = (1 - (n+2)/(2n) * |x|^2 / (|x|^2 + 1)) / 2`.
pub fn base_k(x: &[f64], dim: Dim) -> Result<f64> {
    dim.check(x)?;
    let n = dim.nf();
    let r2 = norm_sq(x);
    Ok(0.5 * (1.0 - (n + 2.0) / (2.0 * n) * r2 / (r2 + 1.0)))
}

use serde::{Deserialize, Serialize};

use super::{Domain, Jet, ScalarField};
use crate::dim::{dist_sq, sub, Dim};
use crate::error::{Error, Result};

/// The standard bubble `u(x) = (λ / (λ^2 + |x - ξ|^2))^((n-2)/2)`.
///
/// Bubbles solve `Δu + n(n-2) u^((n+2)/(n-2)) = 0`, so their K-function is
/// identically one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bubble {
    dim: Dim,
    lambda: f64,
    center: Vec<f64>,
}

impl Bubble {
    pub fn new(dim: Dim, lambda: f64, center: Vec<f64>) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::NonpositiveScale(lambda));
        }
        dim.check(&center)?;
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::BadConfig("bubble center must be finite".into()));
        }
        Ok(Self {
            dim,
            lambda,
            center,
        })
    }

    /// Bubble centered at the origin.
    pub fn centered(dim: Dim, lambda: f64) -> Result<Self> {
        Self::new(dim, lambda, dim.origin())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Peak value `λ^(-(n-2)/2)`, attained at the center.
    pub fn peak(&self) -> f64 {
        self.lambda.powf(-self.dim.half_weight())
    }
}

impl ScalarField for Bubble {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        self.dim.check(x)?;
        let n = self.dim.nf();
        let d = sub(x, &self.center);
        let l2 = self.lambda * self.lambda;
        let q = l2 + d.iter().map(|v| v * v).sum::<f64>();
        let u = (self.lambda / q).powf(self.dim.half_weight());
        let g = -(n - 2.0) * u / q;
        Ok(Jet {
            value: u,
            gradient: d.iter().map(|v| g * v).collect(),
            laplacian: -n * (n - 2.0) * u * l2 / (q * q),
        })
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.dim.check(x)?;
        let q = self.lambda * self.lambda + dist_sq(x, &self.center);
        Ok((self.lambda / q).powf(self.dim.half_weight()))
    }

    fn domain(&self) -> Domain {
        Domain::Whole
    }

    fn radial_center(&self) -> Option<Vec<f64>> {
        Some(self.center.clone())
    }

    fn far_field(&self) -> Option<Vec<Bubble>> {
        Some(vec![self.clone()])
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        (self.lambda * self.lambda + dist_sq(x, &self.center)).sqrt()
    }
}

/// `|∇(u^(-2/(n-2)))|^2 = 4 |x - ξ|^2 / λ^2` for a bubble `u`.
pub fn grad_inv_power(bubble: &Bubble, x: &[f64]) -> Result<f64> {
    bubble.dim.check(x)?;
    Ok(4.0 * dist_sq(x, &bubble.center) / (bubble.lambda * bubble.lambda))
}

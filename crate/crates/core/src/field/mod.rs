//! Positive scalar fields on R^n and their curvature functions.
//!
//! Every field exposes a [`Jet`] (value, gradient and Laplacian) at a point.
//! Fields built from closed-form pieces carry analytic derivatives; finite
//! differences live in [`crate::fd`] and are only used to cross-check them.
//!
//! The curvature function of a positive `C^2` field `u` is
//!
//! ```text
//! K(x) = -Δu(x) / (n (n-2) u(x)^((n+2)/(n-2)))
//! ```
//!
//! so that `Δu + n(n-2) K u^((n+2)/(n-2)) = 0`. Bubbles have `K ≡ 1`.

mod base;
mod bubble;
mod simple;

use std::fmt;
use std::sync::Arc;

pub use base::{base_k, BaseField};
pub use bubble::{grad_inv_power, Bubble};
pub use simple::{sum_field, AffineField, PowerField, SumField, Translated};

use crate::dim::{dist, norm_sq, Dim};
use crate::error::{Error, Result};
use crate::fd;

/// Value, gradient and Laplacian of a field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian: f64,
}

impl Jet {
    pub fn zero(n: usize) -> Self {
        Self {
            value: 0.0,
            gradient: vec![0.0; n],
            laplacian: 0.0,
        }
    }

    pub fn add_assign(&mut self, other: &Jet) {
        self.value += other.value;
        for (g, o) in self.gradient.iter_mut().zip(&other.gradient) {
            *g += o;
        }
        self.laplacian += other.laplacian;
    }

    pub fn scaled(&self, s: f64) -> Jet {
        Jet {
            value: s * self.value,
            gradient: self.gradient.iter().map(|g| s * g).collect(),
            laplacian: s * self.laplacian,
        }
    }

    /// Jet of `value^m`, valid where the value is positive.
    pub fn powf(&self, m: f64) -> Jet {
        let v = self.value;
        let d1 = m * v.powf(m - 1.0);
        let d2 = m * (m - 1.0) * v.powf(m - 2.0);
        Jet {
            value: v.powf(m),
            gradient: self.gradient.iter().map(|g| d1 * g).collect(),
            laplacian: d1 * self.laplacian + d2 * norm_sq(&self.gradient),
        }
    }

    /// Product rule: jet of `self * other`.
    pub fn mul(&self, other: &Jet) -> Jet {
        let gradient = self
            .gradient
            .iter()
            .zip(&other.gradient)
            .map(|(a, b)| a * other.value + self.value * b)
            .collect();
        let cross: f64 = self
            .gradient
            .iter()
            .zip(&other.gradient)
            .map(|(a, b)| a * b)
            .sum();
        Jet {
            value: self.value * other.value,
            gradient,
            laplacian: self.laplacian * other.value + 2.0 * cross + self.value * other.laplacian,
        }
    }
}

/// Where a field is regular.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Whole,
    Punctured { center: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Domain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Whole => true,
            Domain::Punctured { center } => dist(x, center) > 0.0,
            Domain::Ball { center, radius } => dist(x, center) < *radius,
        }
    }
}

/// A positive `C^2` field with analytic first and second derivatives.
///
/// Implementations are pure: evaluation takes `&self` and may run on any
/// number of threads at once.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn dim(&self) -> Dim;

    fn jet(&self, x: &[f64]) -> Result<Jet>;

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.jet(x)?.value)
    }

    fn domain(&self) -> Domain {
        Domain::Whole
    }

    /// Center of radial symmetry, if the field is radial.
    fn radial_center(&self) -> Option<Vec<f64>> {
        None
    }

    /// Bubbles whose sum equals the field outside some bounded set.
    ///
    /// A field with a far field decays like `|x|^(2-n)`, so its Kelvin image
    /// has a removable singularity at the inversion center.
    fn far_field(&self) -> Option<Vec<Bubble>> {
        None
    }

    /// Length over which the field varies appreciably near `x`. Used to pick
    /// finite-difference steps.
    fn length_scale(&self, _x: &[f64]) -> f64 {
        1.0
    }
}

pub type FieldRef = Arc<dyn ScalarField>;

impl<T: ScalarField + ?Sized> ScalarField for Arc<T> {
    fn dim(&self) -> Dim {
        (**self).dim()
    }
    fn jet(&self, x: &[f64]) -> Result<Jet> {
        (**self).jet(x)
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        (**self).value(x)
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn radial_center(&self) -> Option<Vec<f64>> {
        (**self).radial_center()
    }
    fn far_field(&self) -> Option<Vec<Bubble>> {
        (**self).far_field()
    }
    fn length_scale(&self, x: &[f64]) -> f64 {
        (**self).length_scale(x)
    }
}

/// Curvature function of a jet in dimension `dim`.
pub fn k_from_jet(dim: Dim, jet: &Jet) -> Result<f64> {
    if !(jet.value > 0.0) {
        return Err(Error::NonpositiveValue { value: jet.value });
    }
    Ok(-jet.laplacian / (dim.nonlinear_coefficient() * jet.value.powf(dim.critical_exponent())))
}

/// The K-function of `f` at `x`.
pub fn k_function(f: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let dim = f.dim();
    dim.check(x)?;
    k_from_jet(dim, &f.jet(x)?)
}

/// `|∇(f^m)|^2` from the analytic jet.
pub fn grad_power_sq(f: &dyn ScalarField, x: &[f64], m: f64) -> Result<f64> {
    let jet = f.jet(x)?;
    if !(jet.value > 0.0) {
        return Err(Error::NonpositiveValue { value: jet.value });
    }
    Ok(norm_sq(&jet.powf(m).gradient))
}

/// Limit of the K-function of a sum of two bubbles at infinity.
pub fn k_sum_limit(lambda1: f64, lambda2: f64, dim: Dim) -> Result<f64> {
    for l in [lambda1, lambda2] {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::NonpositiveScale(l));
        }
    }
    let n = dim.nf();
    let num = lambda1.powf((n + 2.0) / 2.0) + lambda2.powf((n + 2.0) / 2.0);
    let den = (lambda1.powf((n - 2.0) / 2.0) + lambda2.powf((n - 2.0) / 2.0))
        .powf(dim.critical_exponent());
    Ok(num / den)
}

/// Two-sided bounds on the K-function of `v + v_b`, where `v` has
/// `|K - 1| <= kappa^2` and `v_b` is the [`BaseField`].
pub fn combined_k_bounds(kappa: f64, dim: Dim) -> Result<(f64, f64)> {
    let k2 = kappa * kappa;
    if !(k2 < 1.0) {
        return Err(Error::KappaTooLarge(k2));
    }
    let n = dim.nf();
    let inner = ((n - 2.0) / (4.0 * n)).min(1.0 - k2);
    let lo = (1.0 - k2).min(inner / dim.sum_power_constant());
    let hi = (1.0 + k2).max(0.5);
    Ok((lo, hi))
}

/// Both sides of the pointwise identity
/// `Δ(u^(-4/(n-2))) = 4n K + (n+2) |∇ u^(-2/(n-2))|^2`.
///
/// The left side comes from a fourth-order finite-difference Laplacian of the
/// transformed field; the right side from the analytic jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Identity34 {
    pub fd_lhs: f64,
    pub analytic_rhs: f64,
    pub residual: f64,
}

impl Identity34 {
    /// Residual measured against the size of the terms involved.
    pub fn relative(&self) -> f64 {
        self.residual.abs() / self.analytic_rhs.abs().max(self.fd_lhs.abs()).max(1.0)
    }
}

pub fn identity_3_4_residual(f: &dyn ScalarField, x: &[f64]) -> Result<Identity34> {
    let dim = f.dim();
    dim.check(x)?;
    let n = dim.nf();
    let jet = f.jet(x)?;
    let k = k_from_jet(dim, &jet)?;
    let grad_sq = norm_sq(&jet.powf(-2.0 / (n - 2.0)).gradient);
    let rhs = 4.0 * n * k + (n + 2.0) * grad_sq;

    let h = 1e-3 * f.length_scale(x);
    let m = -4.0 / (n - 2.0);
    let lhs = fd::laplacian4(
        |y| {
            let v = f.value(y)?;
            if !(v > 0.0) {
                return Err(Error::NonpositiveValue { value: v });
            }
            Ok(v.powf(m))
        },
        x,
        h,
    )?;
    Ok(Identity34 {
        fd_lhs: lhs,
        analytic_rhs: rhs,
        residual: lhs - rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    #[test]
    fn k_sum_limit_values() {
        assert!((k_sum_limit(1.0, 1.0, d(3)).unwrap() - 0.0625).abs() < 1e-15);
        assert!((k_sum_limit(2.0, 2.0, d(6)).unwrap() - 0.5).abs() < 1e-15);
        // One bubble dominating: the limit tends to one like (1 + sqrt(λ2))^-5.
        let tiny = k_sum_limit(1.0, 1e-12, d(3)).unwrap();
        assert!((tiny - (1.0f64 + 1e-6).powi(-5)).abs() < 1e-14);
        assert!(k_sum_limit(0.0, 1.0, d(3)).is_err());
    }

    #[test]
    fn combined_bounds_values() {
        let (lo, hi) = combined_k_bounds(0.0, d(3)).unwrap();
        assert!((lo - 1.0 / 192.0).abs() < 1e-15);
        assert_eq!(hi, 1.0);
        let (lo, hi) = combined_k_bounds(0.5f64.sqrt(), d(4)).unwrap();
        assert!((lo - 0.03125).abs() < 1e-15);
        assert!((hi - 1.5).abs() < 1e-15);
        assert_eq!(combined_k_bounds(1.0, d(3)), Err(Error::KappaTooLarge(1.0)));
    }

    #[test]
    fn k_rejects_nonpositive_values() {
        let jet = Jet {
            value: 0.0,
            gradient: vec![0.0; 3],
            laplacian: -1.0,
        };
        assert!(matches!(
            k_from_jet(d(3), &jet),
            Err(Error::NonpositiveValue { .. })
        ));
    }

    #[test]
    fn jet_algebra_matches_direct_powers() {
        // f = 1 + x^2 in one coordinate; f^2 has Laplacian 2(2x)^2 + 2 f * 2.
        let x = 0.7;
        let f = Jet {
            value: 1.0 + x * x,
            gradient: vec![2.0 * x, 0.0, 0.0],
            laplacian: 2.0,
        };
        let sq = f.powf(2.0);
        let prod = f.mul(&f);
        assert!((sq.value - prod.value).abs() < 1e-14);
        assert!((sq.laplacian - prod.laplacian).abs() < 1e-12);
        assert!((sq.laplacian - (8.0 * x * x + 4.0 * (1.0 + x * x))).abs() < 1e-12);
    }
}

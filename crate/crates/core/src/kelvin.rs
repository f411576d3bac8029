//! Kelvin transforms about spheres.
//!
//! For the sphere of radius `a` about `c`, the transform of `f` is
//!
//! ```text
//! f̃(x) = (a / |x - c|)^(n-2) · f(c + a^2 (x - c) / |x - c|^2)
//! ```
//!
//! and `K̃(x) = K(image of x)`. Derivatives are propagated by the exact chain
//! rule through the inversion map.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dim::{dist_sq, dot, norm_sq, sub, Dim};
use crate::error::{Error, Result};
use crate::field::{Bubble, Domain, FieldRef, Jet, ScalarField};

/// Inversion in the sphere `|x - center| = radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inversion {
    center: Vec<f64>,
    radius: f64,
}

impl Inversion {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::NonpositiveScale(radius));
        }
        Ok(Self { center, radius })
    }

    /// The unit sphere about the origin.
    pub fn unit(dim: Dim) -> Self {
        Self {
            center: dim.origin(),
            radius: 1.0,
        }
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// `c + a^2 (x - c) / |x - c|^2`.
pub fn invert_point(inv: &Inversion, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != inv.center.len() {
        return Err(Error::DimensionMismatch {
            expected: inv.center.len(),
            got: x.len(),
        });
    }
    let d = sub(x, &inv.center);
    let s2 = norm_sq(&d);
    if s2 == 0.0 {
        return Err(Error::AtCenter);
    }
    let k = inv.radius * inv.radius / s2;
    Ok(inv
        .center
        .iter()
        .zip(&d)
        .map(|(c, di)| c + k * di)
        .collect())
}

/// Closed-form image of a bubble: again a bubble, with
/// `λ̄ = a^2 λ / (λ^2 + |ξ - c|^2)` and `ξ̄ = c + a^2 (ξ - c) / (λ^2 + |ξ - c|^2)`.
pub fn kelvin_bubble(b: &Bubble, inv: &Inversion) -> Result<Bubble> {
    b.dim().check(&inv.center)?;
    let d = sub(b.center(), &inv.center);
    let l = b.lambda();
    let den = l * l + norm_sq(&d);
    let a2 = inv.radius * inv.radius;
    let center = inv
        .center
        .iter()
        .zip(&d)
        .map(|(c, di)| c + a2 * di / den)
        .collect();
    Bubble::new(b.dim(), a2 * l / den, center)
}

/// Kelvin image of a field.
#[derive(Debug, Clone)]
pub struct KelvinField {
    inner: FieldRef,
    inv: Inversion,
    /// Images of the inner field's far-field bubbles; they give the
    /// continuous extension at the inversion center.
    center_images: Option<Vec<Bubble>>,
}

/// Kelvin transform of `f` about `inv`.
pub fn kelvin_field(f: FieldRef, inv: &Inversion) -> Result<KelvinField> {
    f.dim().check(&inv.center)?;
    let center_images = match f.far_field() {
        Some(bs) => Some(
            bs.iter()
                .map(|b| kelvin_bubble(b, inv))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Ok(KelvinField {
        inner: f,
        inv: inv.clone(),
        center_images,
    })
}

impl KelvinField {
    pub fn inversion(&self) -> &Inversion {
        &self.inv
    }

    pub fn inner(&self) -> &FieldRef {
        &self.inner
    }
}

impl ScalarField for KelvinField {
    fn dim(&self) -> Dim {
        self.inner.dim()
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let dim = self.dim();
        dim.check(x)?;
        let n = dim.nf();
        let a = self.inv.radius;
        let d = sub(x, &self.inv.center);
        let s2 = norm_sq(&d);
        if s2 == 0.0 {
            let images = self.center_images.as_ref().ok_or(Error::AtCenter)?;
            let mut acc = Jet::zero(dim.n());
            for b in images {
                acc.add_assign(&b.jet(x)?);
            }
            return Ok(acc);
        }
        let a2 = a * a;
        let y: Vec<f64> = self
            .inv
            .center
            .iter()
            .zip(&d)
            .map(|(c, di)| c + a2 * di / s2)
            .collect();
        let fj = self.inner.jet(&y)?;

        let w = (a2 / s2).powf((n - 2.0) / 2.0);
        // ∇w = (2-n) w d / s^2
        let gw = (2.0 - n) * w / s2;
        // J = (a^2/s^2)(I - 2 d d^T / s^2) is symmetric.
        let conf = a2 / s2;
        let dg = dot(&d, &fj.gradient);
        let j_grad: Vec<f64> = fj
            .gradient
            .iter()
            .zip(&d)
            .map(|(g, di)| conf * (g - 2.0 * di * dg / s2))
            .collect();
        let gradient = d
            .iter()
            .zip(&j_grad)
            .map(|(di, jg)| gw * di * fj.value + w * jg)
            .collect();
        // The chain-rule cross terms cancel exactly, leaving (a/s)^(n+2) Δf(y).
        // Summing them numerically loses everything near the center.
        let laplacian = w * conf * conf * fj.laplacian;
        Ok(Jet {
            value: w * fj.value,
            gradient,
            laplacian,
        })
    }

    fn domain(&self) -> Domain {
        if self.center_images.is_some() {
            Domain::Whole
        } else {
            Domain::Punctured {
                center: self.inv.center.clone(),
            }
        }
    }

    fn radial_center(&self) -> Option<Vec<f64>> {
        let rc = self.inner.radial_center()?;
        (dist_sq(&rc, &self.inv.center) == 0.0).then_some(rc)
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        let s2 = dist_sq(x, &self.inv.center);
        if s2 == 0.0 {
            return self
                .center_images
                .as_ref()
                .and_then(|bs| {
                    bs.iter()
                        .map(|b| b.length_scale(x))
                        .min_by(|p, q| p.total_cmp(q))
                })
                .unwrap_or(1.0);
        }
        match invert_point(&self.inv, x) {
            Ok(y) => {
                let mapped = self.inner.length_scale(&y) * s2 / (self.inv.radius * self.inv.radius);
                mapped.min(0.5 * s2.sqrt())
            }
            Err(_) => 1.0,
        }
    }
}

/// The Kelvin transform about `(ξ₂, a)` written through the unit transform
/// `ũ` about the origin:
///
/// ```text
/// F(x) = a^(2-n) D(w)^((2-n)/2) ũ(T(w)),   w = (x - ξ₂) / a^2,
/// D(w) = 1 + 2 ξ₂·w + |ξ₂|^2 |w|^2,        T(w) = (w + ξ₂ |w|^2) / D(w).
/// ```
///
/// `T` is a Möbius map with conformal factor `1/D`, so the Laplacian follows
/// from conformal covariance. The result is compared against [`KelvinField`]
/// in the tests.
#[derive(Debug, Clone)]
pub struct MobiusKelvinField {
    unit_image: FieldRef,
    inv: Inversion,
}

/// Build the `(ξ₂, a)` transform of `u` from `ũ`, its unit Kelvin image.
pub fn lemma_5_4_compose(unit_image: FieldRef, inv2: &Inversion) -> Result<MobiusKelvinField> {
    unit_image.dim().check(&inv2.center)?;
    Ok(MobiusKelvinField {
        unit_image,
        inv: inv2.clone(),
    })
}

impl MobiusKelvinField {
    fn map(&self, x: &[f64]) -> Result<(Vec<f64>, f64, Vec<f64>)> {
        let a2 = self.inv.radius * self.inv.radius;
        let xi = &self.inv.center;
        let w: Vec<f64> = x.iter().zip(xi).map(|(xv, c)| (xv - c) / a2).collect();
        let w2 = norm_sq(&w);
        let dd = 1.0 + 2.0 * dot(xi, &w) + norm_sq(xi) * w2;
        if !(dd > 0.0) {
            return Err(Error::AtCenter);
        }
        let t = w
            .iter()
            .zip(xi)
            .map(|(wi, ci)| (wi + ci * w2) / dd)
            .collect();
        Ok((w, dd, t))
    }
}

impl ScalarField for MobiusKelvinField {
    fn dim(&self) -> Dim {
        self.unit_image.dim()
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let dim = self.dim();
        dim.check(x)?;
        let n = dim.nf();
        let a = self.inv.radius;
        let a2 = a * a;
        let xi = &self.inv.center;
        let (w, dd, t) = self.map(x)?;
        let uj = self.unit_image.jet(&t)?;

        let w2 = norm_sq(&w);
        let xi2 = norm_sq(xi);
        let pre = a.powf(2.0 - n);
        let big_w = dd.powf((2.0 - n) / 2.0);
        // ∂D/∂w_j = 2 ξ_j + 2 |ξ|^2 w_j
        let grad_d: Vec<f64> = xi
            .iter()
            .zip(&w)
            .map(|(c, wj)| 2.0 * c + 2.0 * xi2 * wj)
            .collect();
        let grad_big_w: Vec<f64> = grad_d
            .iter()
            .map(|g| (2.0 - n) / 2.0 * dd.powf(-n / 2.0) * g)
            .collect();
        // (J^T ∇ũ)_j = Σ_i ∂T_i/∂w_j ∂_i ũ
        let m = dim.n();
        let mut jt_grad = vec![0.0; m];
        for (j, jt) in jt_grad.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..m {
                let delta = if i == j { 1.0 } else { 0.0 };
                let num = (delta + 2.0 * xi[i] * w[j]) * dd - (w[i] + xi[i] * w2) * grad_d[j];
                acc += num / (dd * dd) * uj.gradient[i];
            }
            *jt = acc;
        }
        let gradient = grad_big_w
            .iter()
            .zip(&jt_grad)
            .map(|(gw, jg)| pre / a2 * (gw * uj.value + big_w * jg))
            .collect();
        Ok(Jet {
            value: pre * big_w * uj.value,
            gradient,
            laplacian: pre / (a2 * a2) * dd.powf(-(n + 2.0) / 2.0) * uj.laplacian,
        })
    }

    fn domain(&self) -> Domain {
        self.unit_image.domain()
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        match self.map(x) {
            Ok((_, dd, t)) => {
                let a2 = self.inv.radius * self.inv.radius;
                a2 * dd * self.unit_image.length_scale(&t)
            }
            Err(_) => 1.0,
        }
    }
}

impl From<KelvinField> for FieldRef {
    fn from(f: KelvinField) -> Self {
        Arc::new(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::k_function;

    fn d3() -> Dim {
        Dim::new(3).unwrap()
    }

    #[test]
    fn point_inversion() {
        let inv = Inversion::unit(d3());
        assert_eq!(
            invert_point(&inv, &[2.0, 0.0, 0.0]).unwrap(),
            vec![0.5, 0.0, 0.0]
        );
        let inv2 = Inversion::new(vec![0.0; 3], 2.0).unwrap();
        let p = [0.0, 2.0, 0.0];
        assert_eq!(invert_point(&inv2, &p).unwrap(), p.to_vec());
        assert_eq!(invert_point(&inv, &[0.0; 3]), Err(Error::AtCenter));
    }

    #[test]
    fn bubble_law_examples() {
        let inv = Inversion::unit(d3());
        let b = Bubble::new(d3(), 1.0, vec![2.0, 0.0, 0.0]).unwrap();
        let img = kelvin_bubble(&b, &inv).unwrap();
        assert!((img.lambda() - 0.2).abs() < 1e-15);
        assert!((img.center()[0] - 0.4).abs() < 1e-15);
        let c = Bubble::centered(d3(), 2.0).unwrap();
        assert!((kelvin_bubble(&c, &inv).unwrap().lambda() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn centered_bubble_fixed_by_its_own_sphere() {
        let b: FieldRef = Arc::new(Bubble::centered(d3(), 0.7).unwrap());
        let inv = Inversion::new(vec![0.0; 3], 0.7).unwrap();
        let k = kelvin_field(b.clone(), &inv).unwrap();
        for x in [[0.1, 0.2, 0.3], [1.0, -2.0, 0.5], [0.0; 3]] {
            let (v, w) = (b.value(&x).unwrap(), k.value(&x).unwrap());
            assert!((v - w).abs() < 1e-12 * v, "{x:?}");
        }
    }

    #[test]
    fn image_has_unit_curvature() {
        let b: FieldRef = Arc::new(Bubble::new(d3(), 0.3, vec![0.5, 0.0, 1.0]).unwrap());
        let inv = Inversion::new(vec![0.2, 0.1, 0.0], 1.3).unwrap();
        let k = kelvin_field(b, &inv).unwrap();
        for x in [[0.4, 0.4, 0.4], [-1.0, 2.0, 0.0], [3.0, 0.0, -0.1]] {
            assert!((k_function(&k, &x).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn no_far_field_means_puncture() {
        let base: FieldRef = Arc::new(crate::field::BaseField::new(d3()));
        let k = kelvin_field(base, &Inversion::unit(d3())).unwrap();
        assert_eq!(k.value(&[0.0; 3]), Err(Error::AtCenter));
        assert!(matches!(k.domain(), Domain::Punctured { .. }));
    }

    #[test]
    fn unit_composition_is_identity() {
        let b: FieldRef = Arc::new(Bubble::new(d3(), 0.5, vec![1.0, 1.0, 0.0]).unwrap());
        let tilde: FieldRef = Arc::new(kelvin_field(b, &Inversion::unit(d3())).unwrap());
        let f = lemma_5_4_compose(tilde.clone(), &Inversion::unit(d3())).unwrap();
        for x in [[0.3, -0.2, 0.1], [2.0, 1.0, 1.0]] {
            let (p, q) = (f.jet(&x).unwrap(), tilde.jet(&x).unwrap());
            assert!((p.value - q.value).abs() < 1e-14);
            assert!((p.laplacian - q.laplacian).abs() < 1e-12 * q.laplacian.abs().max(1.0));
        }
    }
}

use std::sync::Arc;

use super::{Bubble, Domain, FieldRef, Jet, ScalarField};
use crate::dim::{add, dist, dot, sub, Dim};
use crate::error::{Error, Result};

/// Pointwise sum of fields of the same dimension.
#[derive(Debug, Clone)]
pub struct SumField {
    dim: Dim,
    parts: Vec<FieldRef>,
}

impl SumField {
    pub fn new(parts: Vec<FieldRef>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::BadConfig("sum of no fields".into()))?;
        let dim = first.dim();
        for p in &parts {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim.n(),
                    got: p.dim().n(),
                });
            }
        }
        Ok(Self { dim, parts })
    }

    pub fn parts(&self) -> &[FieldRef] {
        &self.parts
    }
}

/// `f + g`.
pub fn sum_field(f: FieldRef, g: FieldRef) -> Result<SumField> {
    SumField::new(vec![f, g])
}

impl ScalarField for SumField {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        self.dim.check(x)?;
        let mut acc = Jet::zero(self.dim.n());
        for p in &self.parts {
            acc.add_assign(&p.jet(x)?);
        }
        Ok(acc)
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.dim.check(x)?;
        self.parts.iter().map(|p| p.value(x)).sum()
    }

    fn domain(&self) -> Domain {
        // Only the first restriction is reported; sums of restricted fields
        // are not built anywhere in the crate.
        self.parts
            .iter()
            .map(|p| p.domain())
            .find(|d| *d != Domain::Whole)
            .unwrap_or(Domain::Whole)
    }

    fn radial_center(&self) -> Option<Vec<f64>> {
        let c = self.parts[0].radial_center()?;
        for p in &self.parts[1..] {
            if p.radial_center()? != c {
                return None;
            }
        }
        Some(c)
    }

    fn far_field(&self) -> Option<Vec<Bubble>> {
        let mut all = Vec::new();
        for p in &self.parts {
            all.extend(p.far_field()?);
        }
        Some(all)
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        self.parts
            .iter()
            .map(|p| p.length_scale(x))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `c |x - p|^s`, singular (or merely continuous) at `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerField {
    dim: Dim,
    center: Vec<f64>,
    coeff: f64,
    exponent: f64,
}

impl PowerField {
    pub fn new(dim: Dim, center: Vec<f64>, coeff: f64, exponent: f64) -> Result<Self> {
        dim.check(&center)?;
        Ok(Self {
            dim,
            center,
            coeff,
            exponent,
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

impl ScalarField for PowerField {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        self.dim.check(x)?;
        let d = sub(x, &self.center);
        let r = dot(&d, &d).sqrt();
        if r == 0.0 {
            return Err(Error::AtCenter);
        }
        let s = self.exponent;
        let v = self.coeff * r.powf(s);
        let g = s * v / (r * r);
        Ok(Jet {
            value: v,
            gradient: d.iter().map(|di| g * di).collect(),
            laplacian: g * (s + self.dim.nf() - 2.0),
        })
    }

    fn domain(&self) -> Domain {
        Domain::Punctured {
            center: self.center.clone(),
        }
    }

    fn radial_center(&self) -> Option<Vec<f64>> {
        Some(self.center.clone())
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        dist(x, &self.center)
    }
}

/// `c0 + g · x`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineField {
    dim: Dim,
    offset: f64,
    slope: Vec<f64>,
}

impl AffineField {
    pub fn new(dim: Dim, offset: f64, slope: Vec<f64>) -> Result<Self> {
        dim.check(&slope)?;
        Ok(Self { dim, offset, slope })
    }
}

impl ScalarField for AffineField {
    fn dim(&self) -> Dim {
        self.dim
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        self.dim.check(x)?;
        Ok(Jet {
            value: self.offset + dot(&self.slope, x),
            gradient: self.slope.clone(),
            laplacian: 0.0,
        })
    }
}

/// `x ↦ inner(x + shift)`.
#[derive(Debug, Clone)]
pub struct Translated {
    inner: FieldRef,
    shift: Vec<f64>,
}

impl Translated {
    pub fn new(inner: FieldRef, shift: Vec<f64>) -> Result<Self> {
        inner.dim().check(&shift)?;
        Ok(Self { inner, shift })
    }
}

impl ScalarField for Translated {
    fn dim(&self) -> Dim {
        self.inner.dim()
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        self.dim().check(x)?;
        self.inner.jet(&add(x, &self.shift))
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.dim().check(x)?;
        self.inner.value(&add(x, &self.shift))
    }

    fn domain(&self) -> Domain {
        match self.inner.domain() {
            Domain::Whole => Domain::Whole,
            Domain::Punctured { center } => Domain::Punctured {
                center: sub(&center, &self.shift),
            },
            Domain::Ball { center, radius } => Domain::Ball {
                center: sub(&center, &self.shift),
                radius,
            },
        }
    }

    fn radial_center(&self) -> Option<Vec<f64>> {
        self.inner.radial_center().map(|c| sub(&c, &self.shift))
    }

    fn far_field(&self) -> Option<Vec<Bubble>> {
        self.inner
            .far_field()?
            .into_iter()
            .map(|b| Bubble::new(b.dim(), b.lambda(), sub(b.center(), &self.shift)).ok())
            .collect()
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        self.inner.length_scale(&add(x, &self.shift))
    }
}

impl From<SumField> for FieldRef {
    fn from(f: SumField) -> Self {
        Arc::new(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::k_function;

    #[test]
    fn power_field_harmonic_exponent() {
        let d = Dim::new(3).unwrap();
        let p = PowerField::new(d, d.origin(), 2.0, -1.0).unwrap();
        let j = p.jet(&[0.0, 2.0, 0.0]).unwrap();
        assert!((j.value - 1.0).abs() < 1e-15);
        assert!(j.laplacian.abs() < 1e-15);
        assert_eq!(p.jet(&[0.0; 3]), Err(Error::AtCenter));
    }

    #[test]
    fn sum_of_equal_bubbles_at_center() {
        let d = Dim::new(3).unwrap();
        let b: FieldRef = Arc::new(Bubble::centered(d, 1.0).unwrap());
        let s = sum_field(b.clone(), b).unwrap();
        // u = 2 b, K = 2^(1-p) = 1/16 everywhere.
        let k = k_function(&s, &[0.3, -0.2, 0.5]).unwrap();
        assert!((k - 0.0625).abs() < 1e-14);
        assert_eq!(s.radial_center(), Some(vec![0.0; 3]));
        assert_eq!(s.far_field().unwrap().len(), 2);
    }

    #[test]
    fn translation_moves_centers() {
        let d = Dim::new(3).unwrap();
        let b: FieldRef = Arc::new(Bubble::new(d, 1.0, vec![1.0, 0.0, 0.0]).unwrap());
        let t = Translated::new(b.clone(), vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(t.radial_center(), Some(vec![0.0; 3]));
        assert_eq!(t.value(&[0.0; 3]).unwrap(), 1.0);
        assert_eq!(t.far_field().unwrap()[0].center(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let b3: FieldRef = Arc::new(Bubble::centered(Dim::new(3).unwrap(), 1.0).unwrap());
        let b4: FieldRef = Arc::new(Bubble::centered(Dim::new(4).unwrap(), 1.0).unwrap());
        assert!(sum_field(b3, b4).is_err());
    }
}

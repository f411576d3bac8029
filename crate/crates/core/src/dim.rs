use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient dimension `n >= 3` together with the exponents derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dim(usize);

impl Dim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn n(self) -> usize {
        self.0
    }

    #[inline]
    pub fn nf(self) -> f64 {
        self.0 as f64
    }

    /// The critical exponent `(n+2)/(n-2)`.
    #[inline]
    pub fn critical_exponent(self) -> f64 {
        (self.nf() + 2.0) / (self.nf() - 2.0)
    }

    /// `(n-2)/2`, the homogeneity of a bubble under scaling.
    #[inline]
    pub fn half_weight(self) -> f64 {
        (self.nf() - 2.0) / 2.0
    }

    /// `n(n-2)`, the coefficient in front of the nonlinearity.
    #[inline]
    pub fn nonlinear_coefficient(self) -> f64 {
        self.nf() * (self.nf() - 2.0)
    }

    /// `2^(4/(n-2))`, the constant in `(s+t)^p <= 2^(4/(n-2)) (s^p + t^p)`.
    #[inline]
    pub fn sum_power_constant(self) -> f64 {
        2f64.powf(4.0 / (self.nf() - 2.0))
    }

    /// (n-1)-dimensional area of the unit sphere in R^n.
    pub fn unit_sphere_area(self) -> f64 {
        sphere_area(self.0)
    }

    pub fn check(self, x: &[f64]) -> Result<()> {
        if x.len() != self.0 {
            return Err(Error::DimensionMismatch {
                expected: self.0,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn origin(self) -> Vec<f64> {
        vec![0.0; self.0]
    }

    /// Unit vector along the `axis`-th coordinate.
    pub fn unit(self, axis: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.0];
        e[axis] = 1.0;
        e
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Dim::new(n)
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.0
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Area of the unit sphere S^(m-1) in R^m, via `w_{m+2} = 2 pi w_m / m`.
pub(crate) fn sphere_area(m: usize) -> f64 {
    use std::f64::consts::PI;
    match m {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(m - 2) / (m as f64 - 2.0),
    }
}

// Small dense-vector helpers. Points are plain `[f64]` slices of length n.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s b`
#[inline]
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

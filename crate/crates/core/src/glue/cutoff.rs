use serde::Serialize;

use crate::dim::{sub, Dim};
use crate::error::{Error, Result};
use crate::field::Jet;

/// Radial `C^2` cutoff: one on `[0, r_in]`, zero on `[r_out, ∞)`.
///
/// The transition is the reversed quintic smoothstep
/// `s(t) = 6t^5 - 15t^4 + 10t^3`, whose first and second derivatives vanish at
/// both ends. With `w = r_out - r_in`,
/// `|φ'| <= (15/8)/w` and `|φ''| <= (10/√3)/w^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    r_in: f64,
    r_out: f64,
}

impl Cutoff {
    /// Bound constant for the first derivative.
    pub const C_PHI: f64 = 15.0 / 8.0;
    /// Bound constant for the second derivative, `10/√3`.
    pub const C_PHI2: f64 = 5.773_502_691_896_258;

    pub fn r_in(&self) -> f64 {
        self.r_in
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    /// The single constant bounding both derivatives.
    pub fn c_phi(&self) -> f64 {
        Self::C_PHI.max(Self::C_PHI2)
    }

    fn width(&self) -> f64 {
        self.r_out - self.r_in
    }

    /// `(φ, φ', φ'')` at radius `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        if r <= self.r_in {
            return (1.0, 0.0, 0.0);
        }
        if r >= self.r_out {
            return (0.0, 0.0, 0.0);
        }
        let w = self.width();
        let t = (r - self.r_in) / w;
        let s = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        let s1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        let s2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
        (1.0 - s, -s1 / w, -s2 / (w * w))
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// Jet of `x ↦ φ(|x - center|)`.
    pub fn jet(&self, dim: Dim, x: &[f64], center: &[f64]) -> Jet {
        let d = sub(x, center);
        let r = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (p, p1, p2) = self.eval(r);
        if p1 == 0.0 && p2 == 0.0 {
            return Jet {
                value: p,
                gradient: vec![0.0; dim.n()],
                laplacian: 0.0,
            };
        }
        Jet {
            value: p,
            gradient: d.iter().map(|v| p1 * v / r).collect(),
            laplacian: p2 + (dim.nf() - 1.0) * p1 / r,
        }
    }
}

/// Cutoff with transition on `[r_in, r_out]`.
pub fn make_cutoff(r_in: f64, r_out: f64) -> Result<Cutoff> {
    if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) {
        return Err(Error::BadRadii {
            inner: r_in,
            outer: r_out,
        });
    }
    Ok(Cutoff { r_in, r_out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        let c = make_cutoff(1.0, 3.0).unwrap();
        assert_eq!(c.eval(1.0), (1.0, 0.0, 0.0));
        assert_eq!(c.eval(3.0), (0.0, 0.0, 0.0));
        assert!((c.phi(2.0) - 0.5).abs() < 1e-15);
        let (_, p1, p2) = c.eval(1.0 + 1e-9);
        assert!(p1.abs() < 1e-15 && p2.abs() < 1e-7);
    }

    #[test]
    fn derivative_bounds_are_sharp() {
        let c = make_cutoff(2.0, 2.5).unwrap();
        let w = 0.5;
        let (mut m1, mut m2) = (0.0f64, 0.0f64);
        for i in 0..=100_000 {
            let (_, p1, p2) = c.eval(2.0 + w * i as f64 / 100_000.0);
            m1 = m1.max(p1.abs());
            m2 = m2.max(p2.abs());
        }
        assert!((m1 * w - Cutoff::C_PHI).abs() < 1e-9);
        assert!((m2 * w * w - Cutoff::C_PHI2).abs() < 1e-6);
        assert!((Cutoff::C_PHI2 - 10.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(make_cutoff(2.0, 1.0).is_err());
        assert!(make_cutoff(0.0, 1.0).is_err());
        assert!(make_cutoff(1.0, 1.0).is_err());
    }
}

use serde::Serialize;

use crate::dim::{dist, dot, sub, Dim};
use crate::error::{Error, Result};

/// A ball with zero or more balls removed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    center: Vec<f64>,
    radius: f64,
    holes: Vec<(Vec<f64>, f64)>,
}

impl Region {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::BadRadii {
                inner: 0.0,
                outer: radius,
            });
        }
        Ok(Self {
            center,
            radius,
            holes: Vec::new(),
        })
    }

    /// `inner <= |x - center| <= outer`.
    pub fn annulus(center: Vec<f64>, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && inner < outer) {
            return Err(Error::BadRadii { inner, outer });
        }
        let mut r = Self::ball(center.clone(), outer)?;
        r.holes.push((center, inner));
        Ok(r)
    }

    pub fn with_hole(mut self, center: Vec<f64>, radius: f64) -> Self {
        self.holes.push((center, radius));
        self
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn holes(&self) -> &[(Vec<f64>, f64)] {
        &self.holes
    }

    pub fn check(&self, dim: Dim) -> Result<()> {
        dim.check(&self.center)?;
        for (c, _) in &self.holes {
            dim.check(c)?;
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dist(x, &self.center) < self.radius && self.holes.iter().all(|(c, r)| dist(x, c) > *r)
    }

    /// True when every hole is concentric with the outer ball.
    pub fn is_concentric(&self) -> bool {
        self.holes.iter().all(|(c, _)| dist(c, &self.center) == 0.0)
    }

    /// Parameter range `[t0, t1]` of the ray `p + t θ` inside the sphere
    /// `|x - c| = r`, if any.
    fn chord(p: &[f64], theta: &[f64], c: &[f64], r: f64) -> Option<(f64, f64)> {
        let d = sub(p, c);
        let b = dot(&d, theta);
        let disc = b * b - (dot(&d, &d) - r * r);
        if disc <= 0.0 {
            return None;
        }
        let s = disc.sqrt();
        Some((-b - s, -b + s))
    }

    /// Disjoint sorted parameter intervals, clipped to `t >= t_min`, on which
    /// the ray `p + t θ` lies in the region.
    pub fn ray_intervals(&self, p: &[f64], theta: &[f64], t_min: f64) -> Vec<(f64, f64)> {
        let Some((a, b)) = Self::chord(p, theta, &self.center, self.radius) else {
            return Vec::new();
        };
        let mut out = vec![(a.max(t_min), b)];
        for (c, r) in &self.holes {
            if let Some((h0, h1)) = Self::chord(p, theta, c, *r) {
                out = out
                    .into_iter()
                    .flat_map(|(s, e)| {
                        let mut parts = Vec::with_capacity(2);
                        if h0 > s {
                            parts.push((s, h0.min(e)));
                        }
                        if h1 < e {
                            parts.push((h1.max(s), e));
                        }
                        parts
                    })
                    .collect();
            }
        }
        out.retain(|(s, e)| e > s);
        out
    }
}

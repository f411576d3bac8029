//! Cut-and-glue constructions.
//!
//! A glued field agrees exactly with prescribed pieces on prescribed sets and
//! interpolates through a [`Cutoff`] annulus in between. The interpolation is
//! `C^2`, so K stays defined and analytic derivatives are exact.

mod cutoff;
mod rho;

use std::sync::Arc;

use serde::Serialize;

pub use cutoff::{make_cutoff, Cutoff};
pub use rho::{solve_rho_m, RhoMSolution};

use crate::dim::{dist, norm, Dim};
use crate::error::{Error, Result};
use crate::field::{Bubble, Domain, FieldRef, Jet, ScalarField, Translated};
use crate::grid::{k_scan, GridSpec, KReport, ScanRegion};

/// `φ(|x - c|) inside(x) + (1 - φ(|x - c|)) outside(x)`.
#[derive(Debug, Clone)]
pub struct Blend {
    cutoff: Cutoff,
    center: Vec<f64>,
    inside: FieldRef,
    outside: FieldRef,
}

impl Blend {
    pub fn new(
        cutoff: Cutoff,
        center: Vec<f64>,
        inside: FieldRef,
        outside: FieldRef,
    ) -> Result<Self> {
        let dim = inside.dim();
        if outside.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim.n(),
                got: outside.dim().n(),
            });
        }
        dim.check(&center)?;
        Ok(Self {
            cutoff,
            center,
            inside,
            outside,
        })
    }

    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }
}

impl ScalarField for Blend {
    fn dim(&self) -> Dim {
        self.inside.dim()
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let dim = self.dim();
        dim.check(x)?;
        let phi = self.cutoff.jet(dim, x, &self.center);
        if phi.value == 1.0 && phi.laplacian == 0.0 {
            return self.inside.jet(x);
        }
        if phi.value == 0.0 && phi.laplacian == 0.0 {
            return self.outside.jet(x);
        }
        let one_minus = phi.scaled(-1.0);
        let mut one_minus = one_minus;
        one_minus.value += 1.0;
        let mut j = phi.mul(&self.inside.jet(x)?);
        j.add_assign(&one_minus.mul(&self.outside.jet(x)?));
        Ok(j)
    }

    fn domain(&self) -> Domain {
        Domain::Whole
    }

    fn radial_center(&self) -> Option<Vec<f64>> {
        let a = self.inside.radial_center()?;
        let b = self.outside.radial_center()?;
        (dist(&a, &self.center) == 0.0 && dist(&b, &self.center) == 0.0)
            .then(|| self.center.clone())
    }

    fn far_field(&self) -> Option<Vec<Bubble>> {
        self.outside.far_field()
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        let w = self.cutoff.r_out() - self.cutoff.r_in();
        self.inside
            .length_scale(x)
            .min(self.outside.length_scale(x))
            .min(w)
    }
}

/// Two origin-centered bubbles joined across the annulus `ρ <= |x| <= R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentricConfig {
    pub b1: Bubble,
    pub b2: Bubble,
    pub rho: f64,
    pub big_r: f64,
}

impl ConcentricConfig {
    pub fn new(dim: Dim, lambda1: f64, lambda2: f64, rho: f64, big_r: f64) -> Result<Self> {
        Ok(Self {
            b1: Bubble::centered(dim, lambda1)?,
            b2: Bubble::centered(dim, lambda2)?,
            rho,
            big_r,
        })
    }
}

/// Two bubbles kept intact on disjoint balls and summed far away.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisjointConfig {
    pub b1: Bubble,
    pub r1: f64,
    pub b2: Bubble,
    pub a: f64,
    /// Outer transition radius over inner radius, for each ball.
    pub width_factors: (f64, f64),
}

impl DisjointConfig {
    /// Transitions on `[r1, 2 r1]` and `[a, 2 a]`.
    pub fn new(b1: Bubble, r1: f64, b2: Bubble, a: f64) -> Self {
        Self {
            b1,
            r1,
            b2,
            a,
            width_factors: (2.0, 2.0),
        }
    }
}

/// A bubble `u_{λ,0}` glued into a host around `x1`, in coordinates centered
/// at `x1`.
#[derive(Debug, Clone)]
pub struct InsertConfig {
    pub host: FieldRef,
    pub x1: Vec<f64>,
    pub lambda: f64,
    pub rho_small_m: f64,
    pub rho_big_m: f64,
}

#[derive(Debug, Clone)]
pub enum GlueConfig {
    Concentric(ConcentricConfig),
    Disjoint(DisjointConfig),
    BubbleInsert(InsertConfig),
}

/// Build the glued field described by `cfg`.
pub fn glue(cfg: &GlueConfig) -> Result<FieldRef> {
    Ok(match cfg {
        GlueConfig::Concentric(c) => Arc::new(glue_concentric(c)?),
        GlueConfig::Disjoint(c) => Arc::new(glue_disjoint(c)?),
        GlueConfig::BubbleInsert(c) => Arc::new(glue_bubble_into(c)?),
    })
}

/// `u = φ u1 + (1 - φ) u2` with `φ` cutting off on `[ρ, R]`.
pub fn glue_concentric(cfg: &ConcentricConfig) -> Result<Blend> {
    let dim = cfg.b1.dim();
    if cfg.b2.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim.n(),
            got: cfg.b2.dim().n(),
        });
    }
    if norm(cfg.b1.center()) != 0.0 || norm(cfg.b2.center()) != 0.0 {
        return Err(Error::BadConfig(
            "concentric glue needs origin-centered bubbles".into(),
        ));
    }
    let cutoff = make_cutoff(cfg.rho, cfg.big_r)?;
    Blend::new(
        cutoff,
        dim.origin(),
        Arc::new(cfg.b1.clone()),
        Arc::new(cfg.b2.clone()),
    )
}

/// `u_c = (1 - φ₂(|x - ξ₂|)) u1 + (1 - φ₁(|x - ξ₁|)) u2`.
#[derive(Debug, Clone)]
pub struct DisjointField {
    b1: Bubble,
    b2: Bubble,
    phi1: Cutoff,
    phi2: Cutoff,
}

impl DisjointField {
    pub fn cutoffs(&self) -> (&Cutoff, &Cutoff) {
        (&self.phi1, &self.phi2)
    }

    pub fn bubbles(&self) -> (&Bubble, &Bubble) {
        (&self.b1, &self.b2)
    }
}

pub fn glue_disjoint(cfg: &DisjointConfig) -> Result<DisjointField> {
    let dim = cfg.b1.dim();
    if cfg.b2.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim.n(),
            got: cfg.b2.dim().n(),
        });
    }
    let (f1, f2) = cfg.width_factors;
    if !(f1 > 1.0 && f2 > 1.0) {
        return Err(Error::BadConfig(
            "transition width factors must exceed 1".into(),
        ));
    }
    let phi1 = make_cutoff(cfg.r1, f1 * cfg.r1)?;
    let phi2 = make_cutoff(cfg.a, f2 * cfg.a)?;
    let separation = dist(cfg.b1.center(), cfg.b2.center());
    let required = phi1.r_out() + phi2.r_out();
    if separation <= required {
        return Err(Error::Overlap {
            separation,
            required,
        });
    }
    Ok(DisjointField {
        b1: cfg.b1.clone(),
        b2: cfg.b2.clone(),
        phi1,
        phi2,
    })
}

impl ScalarField for DisjointField {
    fn dim(&self) -> Dim {
        self.b1.dim()
    }

    fn jet(&self, x: &[f64]) -> Result<Jet> {
        let dim = self.dim();
        dim.check(x)?;
        let mut w1 = self.phi2.jet(dim, x, self.b2.center()).scaled(-1.0);
        w1.value += 1.0;
        let mut w2 = self.phi1.jet(dim, x, self.b1.center()).scaled(-1.0);
        w2.value += 1.0;
        let mut j = Jet::zero(dim.n());
        if w1.value != 0.0 {
            j.add_assign(&w1.mul(&self.b1.jet(x)?));
        }
        if w2.value != 0.0 {
            j.add_assign(&w2.mul(&self.b2.jet(x)?));
        }
        Ok(j)
    }

    fn far_field(&self) -> Option<Vec<Bubble>> {
        Some(vec![self.b1.clone(), self.b2.clone()])
    }

    fn length_scale(&self, x: &[f64]) -> f64 {
        self.b1
            .length_scale(x)
            .min(self.b2.length_scale(x))
            .min(self.phi1.r_out() - self.phi1.r_in())
            .min(self.phi2.r_out() - self.phi2.r_in())
    }
}

/// `w(x) = φ(|x|) u_{λ,0}(x) + (1 - φ(|x|)) host(x1 + x)` with `φ` cutting
/// off on `[λ ρ_m, λ ρ_M]`.
pub fn glue_bubble_into(cfg: &InsertConfig) -> Result<Blend> {
    let dim = cfg.host.dim();
    let bubble = Bubble::centered(dim, cfg.lambda)?;
    let cutoff = make_cutoff(cfg.lambda * cfg.rho_small_m, cfg.lambda * cfg.rho_big_m)?;
    let host = Translated::new(cfg.host.clone(), cfg.x1.clone())?;
    Blend::new(cutoff, dim.origin(), Arc::new(bubble), Arc::new(host))
}

/// `sup |K - 1|` over the annulus `inner <= |x - center| <= outer`.
pub fn kg_deviation(
    f: &dyn ScalarField,
    center: Vec<f64>,
    inner: f64,
    outer: f64,
    spec: &GridSpec,
) -> Result<KReport> {
    k_scan(f, &ScanRegion::annulus(center, inner, outer), spec)
}

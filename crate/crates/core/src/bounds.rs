//! Hypothesis checkers and lower bounds for `sup |K - 1|`.
//!
//! Concentric case: a small bubble of scale `λ1` inside `B(0, ρ)` glued to a
//! bubble of scale `λ2` outside `B(0, R)`. Disjoint case: bubbles centered at
//! `ξ1` and `ξ2` kept on `B(ξ1, r1)` and `B(ξ2, a)`.

use serde::Serialize;

use crate::dim::{dist, Dim};
use crate::error::{Error, Result};
use crate::field::{combined_k_bounds, ScalarField};
use crate::grid::{k_scan, GridSpec, KReport, ScanRegion};

fn check_radii(rho: f64, big_r: f64) -> Result<()> {
    if rho > 0.0 && big_r > rho && big_r.is_finite() {
        Ok(())
    } else {
        Err(Error::BadRadii {
            inner: rho,
            outer: big_r,
        })
    }
}

fn check_scales(l1: f64, l2: f64) -> Result<()> {
    for s in [l1, l2] {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::NonpositiveScale(s));
        }
    }
    Ok(())
}

/// Theorem A lower bound `(n+2)/n`.
pub fn thm_a_bound(dim: Dim) -> f64 {
    (dim.nf() + 2.0) / dim.nf()
}

/// Theorem B lower bound `(n+2)/(2n) σ^2`.
pub fn thm_b_bound(sigma: f64, dim: Dim) -> f64 {
    (dim.nf() + 2.0) / (2.0 * dim.nf()) * sigma * sigma
}

fn deep_factor(dim: Dim) -> f64 {
    let n = dim.nf();
    3.0 * (n + 2.0) / (2.0 * (n - 2.0))
}

/// The two alternative hypotheses of Theorem A.
///
/// `cond1`: `λ1/λ2 <= (ρ^2/R^2) / (1 + λ2^2/R^2)`.
/// `cond2`: `λ1^2/λ2^2 >= 3(n+2)/(2(n-2)) (1 + R^4/λ2^4)`.
pub fn thm_a_conditions(l1: f64, l2: f64, rho: f64, big_r: f64, dim: Dim) -> Result<(bool, bool)> {
    check_scales(l1, l2)?;
    check_radii(rho, big_r)?;
    let q = l1 / l2;
    let cond1 = q <= (rho * rho) / (big_r * big_r) / (1.0 + (l2 / big_r).powi(2));
    let cond2 = q * q >= deep_factor(dim) * (1.0 + (big_r / l2).powi(4));
    Ok((cond1, cond2))
}

/// Theorem A hypotheses after inverting in the sphere of radius `ρ`.
///
/// `cond1`: `λ1/λ2 <= (ρ^2/R^2) / (1 + ρ^2/λ1^2)`.
/// `cond2`: `λ1^2/λ2^2 >= 3(n+2)/(2(n-2)) (1 + λ1^4/ρ^4)`.
///
/// These equal [`thm_a_conditions`] evaluated at
/// `(ρ^2/λ2, ρ^2/λ1, ρ^2/R, ρ)`.
pub fn thm_a_dual_conditions(
    l1: f64,
    l2: f64,
    rho: f64,
    big_r: f64,
    dim: Dim,
) -> Result<(bool, bool)> {
    check_scales(l1, l2)?;
    check_radii(rho, big_r)?;
    let q = l1 / l2;
    let cond1 = q <= (rho * rho) / (big_r * big_r) / (1.0 + (rho / l1).powi(2));
    let cond2 = q * q >= deep_factor(dim) * (1.0 + (l1 / rho).powi(4));
    Ok((cond1, cond2))
}

/// Lower bound for `sup |K - 1|` on the glue annulus `ρ < |x| < R`:
///
/// `(n-2)/(2n) {λ1^2 - λ2^2 + (n+2)/(n-2) [ρ^4/λ1^2 - R^4/λ2^2]} / (R^2 - ρ^2)`.
pub fn lower_bound_4_4(l1: f64, l2: f64, rho: f64, big_r: f64, dim: Dim) -> Result<f64> {
    check_scales(l1, l2)?;
    check_radii(rho, big_r)?;
    let n = dim.nf();
    let bracket = l1 * l1 - l2 * l2
        + (n + 2.0) / (n - 2.0) * (rho.powi(4) / (l1 * l1) - big_r.powi(4) / (l2 * l2));
    Ok((n - 2.0) / (2.0 * n) * bracket / (big_r * big_r - rho * rho))
}

/// Radial bubble profile `(λ/(λ^2 + r^2))^((n-2)/2)`.
pub fn radial_profile(lambda: f64, r: f64, dim: Dim) -> f64 {
    (lambda / (lambda * lambda + r * r)).powf(dim.half_weight())
}

/// Depth factors `k1 = ρ/λ1`, `k2 = R/λ2` and `ν = ((k1^2+1)/k1^2)^((n-2)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepthFactors {
    pub k1: f64,
    pub k2: f64,
    pub nu: f64,
    #[serde(skip)]
    params: [f64; 4],
    #[serde(skip)]
    dim: Dim,
}

impl DepthFactors {
    /// `(u1(0)/u1(ρ))^(2/(n-2))`, which equals `1 + k1^2`.
    pub fn inner_depth(&self) -> f64 {
        let [l1, _, rho, _] = self.params;
        (radial_profile(l1, 0.0, self.dim) / radial_profile(l1, rho, self.dim))
            .powf(1.0 / self.dim.half_weight())
    }

    /// `λ2/λ1 <= k1^2/(k2^2 + 1)`.
    pub fn scale_condition(&self) -> bool {
        let [l1, l2, _, _] = self.params;
        l2 / l1 <= self.k1 * self.k1 / (self.k2 * self.k2 + 1.0)
    }

    /// `u2(R) >= ν u1(ρ)`.
    pub fn profile_condition(&self) -> bool {
        let [l1, l2, rho, big_r] = self.params;
        radial_profile(l2, big_r, self.dim) >= self.nu * radial_profile(l1, rho, self.dim)
    }
}

pub fn depth_factors(l1: f64, l2: f64, rho: f64, big_r: f64, dim: Dim) -> Result<DepthFactors> {
    check_scales(l1, l2)?;
    for r in [rho, big_r] {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::NonpositiveScale(r));
        }
    }
    let k1 = rho / l1;
    let k2 = big_r / l2;
    let nu = ((k1 * k1 + 1.0) / (k1 * k1)).powf(dim.half_weight());
    Ok(DepthFactors {
        k1,
        k2,
        nu,
        params: [l1, l2, rho, big_r],
        dim,
    })
}

/// Disjoint-case parameters: bubbles `u_{λ1,ξ1}` and `u_{λ2,ξ2}` kept on
/// `B(ξ1, r1)` and `B(ξ2, a)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThmBParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub r1: f64,
    pub a: f64,
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
    pub sigma: f64,
}

/// Ratios `c = r1/λ1`, `k = a/λ2`, `C = |ξ1 - ξ2|/λ2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainRatios {
    pub c: f64,
    pub k: f64,
    pub big_c: f64,
}

impl ThmBParams {
    pub fn separation(&self) -> f64 {
        dist(&self.xi1, &self.xi2)
    }

    pub fn validate(&self, dim: Dim) -> Result<()> {
        dim.check(&self.xi1)?;
        dim.check(&self.xi2)?;
        check_scales(self.lambda1, self.lambda2)?;
        for r in [self.r1, self.a] {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::NonpositiveScale(r));
            }
        }
        if !(self.sigma >= 1.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "sigma = {} must be at least 1",
                self.sigma
            )));
        }
        let d = self.separation();
        if d < self.r1 + self.a {
            return Err(Error::InvalidGeometry(format!(
                "balls overlap: separation {d} < {} + {}",
                self.r1, self.a
            )));
        }
        if self.r1 < self.lambda1 {
            return Err(Error::InvalidGeometry(format!(
                "r1 = {} is below lambda1 = {}",
                self.r1, self.lambda1
            )));
        }
        if self.a < self.lambda2 {
            return Err(Error::InvalidGeometry(format!(
                "a = {} is below lambda2 = {}",
                self.a, self.lambda2
            )));
        }
        Ok(())
    }

    pub fn ratios(&self) -> ChainRatios {
        ChainRatios {
            c: self.r1 / self.lambda1,
            k: self.a / self.lambda2,
            big_c: self.separation() / self.lambda2,
        }
    }

    /// Largest `λ2^2/λ1^2` threshold of Theorem B, `8^n n (d^4/r1^4)(σ^2 + 6)`.
    pub fn threshold(&self, dim: Dim) -> f64 {
        let d = self.separation();
        thm_b_threshold(d, self.r1, self.sigma, dim)
    }
}

fn thm_b_threshold(d: f64, r1: f64, sigma: f64, dim: Dim) -> f64 {
    8f64.powi(dim.n() as i32) * dim.nf() * (d / r1).powi(4) * (sigma * sigma + 6.0)
}

/// Theorem B hypothesis `λ2^2/λ1^2 >= 8^n n (|ξ1-ξ2|^4/r1^4)(σ^2 + 6)`.
pub fn thm_b_condition(p: &ThmBParams, dim: Dim) -> Result<bool> {
    p.validate(dim)?;
    let q = p.lambda2 / p.lambda1;
    Ok(q * q >= p.threshold(dim))
}

/// The explicit lower bound for `sup |K - 1|` outside `B(ξ2, a)` in terms of
/// the ratios `c`, `k`, `C` and `t = λ1^2/λ2^2`:
///
/// `(n-2)/(2n) [k^2 t/(t + C^2)^2 + (n+2)/(n(n-2)) 8^(-n) k^2 t c^4/C^4
///  - 4k^2 - 2(n+2)/((n-2) k^2)]`.
///
/// The `u2` term uses `|ξ1 - ξ2|` in place of the slightly larger distance
/// of the evaluation point.
pub fn thm_b_chain_bound(p: &ThmBParams, dim: Dim) -> Result<f64> {
    p.validate(dim)?;
    let n = dim.nf();
    let ChainRatios { c, k, big_c } = p.ratios();
    let t = (p.lambda1 / p.lambda2).powi(2);
    let k2 = k * k;
    let first = k2 * t / (t + big_c * big_c).powi(2);
    let second =
        (n + 2.0) / (n * (n - 2.0)) * 8f64.powi(-(dim.n() as i32)) * k2 * t * (c / big_c).powi(4);
    let penalty = 4.0 * k2 + 2.0 * (n + 2.0) / (n - 2.0) / k2;
    Ok((n - 2.0) / (2.0 * n) * (first + second - penalty))
}

/// Grid maximum of `|K - 1|` over `region` with one refinement pass.
pub fn sup_scan(f: &dyn ScalarField, region: &ScanRegion, spec: &GridSpec) -> Result<KReport> {
    k_scan(f, region, spec)
}

/// Constant `C(n, κ)` with `r1^4/λ1^2 <= C(n, κ)/λ2^2` whenever
/// `|ξ1 - ξ2| <= 1` and `sup |K - 1|` stays below the combined-field bound.
pub fn deep_bubble_constant(kappa: f64, dim: Dim) -> Result<f64> {
    let (_, hi) = combined_k_bounds(kappa, dim)?;
    let n = dim.nf();
    let sigma_sq = 2.0 * n / (n + 2.0) * hi;
    Ok(8f64.powi(dim.n() as i32) * n * (sigma_sq + 6.0))
}

/// Largest `λ2^2/λ1^2` compatible with `sup |K - 1| <= hi`, where `hi` comes
/// from [`combined_k_bounds`]: the contrapositive of Theorem B with
/// `σ^2 = 2n/(n+2) hi`.
pub fn deep_bubble_bound(kappa: f64, d: f64, r1: f64, dim: Dim) -> Result<f64> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::InvalidGeometry(format!(
            "center distance {d} must lie in (0, 1]"
        )));
    }
    if !(r1 > 0.0 && r1.is_finite()) {
        return Err(Error::NonpositiveScale(r1));
    }
    Ok(deep_bubble_constant(kappa, dim)? * (d / r1).powi(4))
}

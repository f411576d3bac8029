//! The fundamental solution of the Laplacian and singular volume integrals.
//!
//! Integrals with a kernel singular at a point are taken in polar
//! coordinates about that point: along each direction `θ` the radial
//! integrand is multiplied by `t^(n-1)`, which cancels the `|x - ξ|^(2-n)`
//! singularity of `H`. Directions come from an [`AngularRule`]; the radial
//! integrals are adaptive Gauss–Kronrod.

mod quad;
mod region;
mod sphere;

use rayon::prelude::*;
use serde::Serialize;

pub use quad::{integrate, integrate_log, QuadResult, QuadTol};
pub use region::Region;
pub use sphere::{AngularRule, Direction};

use crate::dim::{axpy, dist, dot, norm_sq, sub, Dim};
use crate::error::{Error, Result};
use crate::field::{k_from_jet, Bubble, ScalarField};

/// `H(x, ξ) = |x - ξ|^(2-n) / ((2-n) ω_n)`, with `ω_n` the area of the unit
/// sphere, so that `ΔH = δ_ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kernel {
    dim: Dim,
    omega: f64,
}

impl Kernel {
    pub fn new(dim: Dim) -> Self {
        Self {
            dim,
            omega: dim.unit_sphere_area(),
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn h(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        self.dim.check(x)?;
        self.dim.check(xi)?;
        let r = dist(x, xi);
        if r == 0.0 {
            return Err(Error::Coincident);
        }
        let n = self.dim.nf();
        Ok(1.0 / ((2.0 - n) * self.omega * r.powf(n - 2.0)))
    }

    /// `∇_x H(x, ξ) = (x - ξ) / (ω_n |x - ξ|^n)`.
    pub fn grad_h(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let d = sub(x, xi);
        let r2 = norm_sq(&d);
        if r2 == 0.0 {
            return Err(Error::Coincident);
        }
        let c = 1.0 / (self.omega * r2.powf(self.dim.nf() / 2.0));
        Ok(d.iter().map(|v| c * v).collect())
    }
}

/// h_eval: the fundamental solution at `x` with pole `ξ`.
pub fn h_eval(k: &Kernel, x: &[f64], xi: &[f64]) -> Result<f64> {
    k.h(x, xi)
}

/// Radial integration settings for [`polar_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOpts {
    pub tol: QuadTol,
    /// Radii below this are excluded.
    pub t_min: f64,
    /// Below this radius the radial variable is integrated in `ln t`.
    pub log_below: Option<f64>,
}

impl Default for RadialOpts {
    fn default() -> Self {
        Self {
            tol: QuadTol::default(),
            t_min: 0.0,
            log_below: None,
        }
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn sum_over_rule<F>(
    dim: Dim,
    p: &[f64],
    region: &Region,
    dirs: &[Direction],
    g: &F,
    opts: &RadialOpts,
) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let n = dim.n() as i32;
    let per_dir: Vec<QuadResult> = dirs
        .par_iter()
        .map(|(theta, w)| {
            let radial = |t: f64| -> Result<f64> {
                let x = axpy(p, t, theta);
                Ok(g(&x)? * t.powi(n - 1))
            };
            let mut acc = QuadResult::default();
            for (a, b) in region.ray_intervals(p, theta, opts.t_min) {
                match opts.log_below {
                    Some(l) if a > 0.0 && a < l => {
                        let mid = b.min(l);
                        acc = acc + integrate_log(radial, a, mid, &opts.tol)?;
                        if b > mid {
                            acc = acc + integrate(radial, mid, b, &opts.tol)?;
                        }
                    }
                    _ => acc = acc + integrate(radial, a, b, &opts.tol)?,
                }
            }
            Ok(acc.scale(*w))
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = per_dir.iter().map(|q| q.value).collect();
    Ok(QuadResult {
        value: pairwise_sum(&values),
        err_est: per_dir.iter().map(|q| q.err_est).sum(),
        n_evals: per_dir.iter().map(|q| q.n_evals).sum(),
    })
}

/// `∫_region g(x) dx` in polar coordinates about `p`.
///
/// The error estimate adds the radial estimates to the change observed when
/// the angular rule is halved.
pub fn polar_integral<F>(
    dim: Dim,
    p: &[f64],
    region: &Region,
    rule: &AngularRule,
    g: F,
    opts: &RadialOpts,
) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    dim.check(p)?;
    region.check(dim)?;
    let fine = sum_over_rule(dim, p, region, &rule.directions(dim)?, &g, opts)?;
    let Some(coarse_rule) = rule.coarser() else {
        return Ok(fine);
    };
    let coarse = sum_over_rule(dim, p, region, &coarse_rule.directions(dim)?, &g, opts)?;
    Ok(QuadResult {
        value: fine.value,
        err_est: fine.err_est + (fine.value - coarse.value).abs(),
        n_evals: fine.n_evals + coarse.n_evals,
    })
}

/// Axisymmetric Gauss–Legendre order used when the geometry allows it.
pub const AXIAL_ORDER: usize = 96;

/// The cheapest exact-symmetry rule for an integrand centered at `p` over
/// `region`, given the symmetry centers of the fields involved (`None` for a
/// field without radial symmetry).
pub fn choose_rule(
    dim: Dim,
    p: &[f64],
    region: &Region,
    centers: &[Option<Vec<f64>>],
) -> AngularRule {
    if !region.is_concentric() || centers.iter().any(|c| c.is_none()) {
        return AngularRule::default_product(dim);
    }
    let mut pts: Vec<&[f64]> = vec![p, region.center()];
    pts.extend(centers.iter().flatten().map(|c| c.as_slice()));
    let scale = pts.iter().map(|q| norm_sq(q)).fold(1.0, f64::max).sqrt();
    let Some(far) = pts.iter().find(|q| dist(q, p) > 1e-14 * scale) else {
        return AngularRule::Radial;
    };
    let axis = sub(far, p);
    let a2 = norm_sq(&axis);
    let collinear = pts.iter().all(|q| {
        let d = sub(q, p);
        let along = dot(&d, &axis);
        (norm_sq(&d) - along * along / a2).max(0.0).sqrt() <= 1e-12 * scale
    });
    if collinear {
        AngularRule::Axisymmetric {
            axis,
            order: AXIAL_ORDER,
        }
    } else {
        AngularRule::default_product(dim)
    }
}

/// `∫_{B(0,R)} |H(x, ξ)| dx`, at most `R^2 / (2(n-2))` with equality only
/// at `ξ = 0`.
pub fn int_abs_h_ball(k: &Kernel, big_r: f64, xi: &[f64]) -> Result<QuadResult> {
    let dim = k.dim;
    let region = Region::ball(dim.origin(), big_r)?;
    if !region.contains(xi) {
        return Err(Error::BadConfig("xi must lie inside the ball".into()));
    }
    let rule = choose_rule(dim, xi, &region, &[]);
    polar_integral(
        dim,
        xi,
        &region,
        &rule,
        |x| Ok(k.h(x, xi)?.abs()),
        &RadialOpts::default(),
    )
}

/// `∫_{ρ<|x|<R} |H(x, 0)| dx = (R^2 - ρ^2) / (2(n-2))`.
pub fn int_abs_h_annulus(k: &Kernel, rho: f64, big_r: f64) -> Result<QuadResult> {
    let dim = k.dim;
    let region = Region::annulus(dim.origin(), rho, big_r)?;
    let o = dim.origin();
    polar_integral(
        dim,
        &o,
        &region,
        &AngularRule::Radial,
        |x| Ok(k.h(x, &o)?.abs()),
        &RadialOpts::default(),
    )
}

/// `|∇(f^(-2/(n-2)))|^2` at `x`.
fn grad_inv_sq(f: &dyn ScalarField, x: &[f64]) -> Result<f64> {
    let j = f.jet(x)?;
    if !(j.value > 0.0) {
        return Err(Error::NonpositiveValue { value: j.value });
    }
    Ok(norm_sq(&j.powf(-2.0 / (f.dim().nf() - 2.0)).gradient))
}

/// `∫_region |H(x, ξ)| |∇(f^(-2/(n-2)))(x)|^2 dx`.
pub fn weighted_grad_integral(
    k: &Kernel,
    f: &dyn ScalarField,
    region: &Region,
    xi: &[f64],
) -> Result<QuadResult> {
    let dim = k.dim;
    let rule = choose_rule(dim, xi, region, &[f.radial_center()]);
    polar_integral(
        dim,
        xi,
        region,
        &rule,
        |x| Ok(k.h(x, xi)?.abs() * grad_inv_sq(f, x)?),
        &RadialOpts::default(),
    )
}

/// Both sides of the representation identity for a glued field `u_c` that
/// equals a bubble near `ξ` and the bubble `u2` outside `Ω₂`:
///
/// ```text
/// 4n ∫_Ω₂ H(x,ξ) (K(x) - 1) dx
///   = u_c(ξ)^(-4/(n-2)) - u2(ξ)^(-4/(n-2))
///     + (n+2) ∫_Ω₂ |H(x,ξ)| (|∇u_c^(-2/(n-2))|^2 - |∇u2^(-2/(n-2))|^2) dx
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepIdentity {
    pub lhs: QuadResult,
    pub rhs: f64,
    pub rhs_integral: QuadResult,
    pub residual: f64,
}

impl RepIdentity {
    pub fn relative(&self) -> f64 {
        self.residual.abs()
            / self
                .lhs
                .value
                .abs()
                .max(self.rhs.abs())
                .max(f64::MIN_POSITIVE)
    }

    pub fn err_est(&self) -> f64 {
        self.lhs.err_est + (self.rhs_integral.err_est)
    }
}

pub fn rep_identity_residual(
    u_c: &dyn ScalarField,
    u2: &Bubble,
    omega2: &Region,
    xi: &[f64],
) -> Result<RepIdentity> {
    let dim = u_c.dim();
    let k = Kernel::new(dim);
    let n = dim.nf();
    if !omega2.contains(xi) {
        return Err(Error::BadConfig("xi must lie inside omega2".into()));
    }
    let rule = choose_rule(
        dim,
        xi,
        omega2,
        &[u_c.radial_center(), Some(u2.center().to_vec())],
    );
    let opts = RadialOpts::default();
    let lhs = polar_integral(
        dim,
        xi,
        omega2,
        &rule,
        |x| {
            let kx = k_from_jet(dim, &u_c.jet(x)?)?;
            Ok(4.0 * n * k.h(x, xi)? * (kx - 1.0))
        },
        &opts,
    )?;
    let rhs_integral = polar_integral(
        dim,
        xi,
        omega2,
        &rule,
        |x| Ok((n + 2.0) * k.h(x, xi)?.abs() * (grad_inv_sq(u_c, x)? - grad_inv_sq(u2, x)?)),
        &opts,
    )?;
    let m = -4.0 / (n - 2.0);
    let rhs = u_c.value(xi)?.powf(m) - u2.value(xi)?.powf(m) + rhs_integral.value;
    Ok(RepIdentity {
        lhs,
        rhs,
        rhs_integral,
        residual: lhs.value - rhs,
    })
}

/// Growth bounds near an isolated singularity `p`:
/// `|Δu| <= c1 / |x-p|^(n-1+μ)` and `|∇u| <= c2 / |x-p|^(n-1-ν)` on
/// `B(p, δ) \ {p}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularProfile {
    pub p: Vec<f64>,
    pub mu: f64,
    pub nu: f64,
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
}

impl SingularProfile {
    /// Sample the growth bounds along a few directions and radii.
    pub fn verify(&self, u: &dyn ScalarField, min_radius: f64) -> Result<()> {
        let dim = u.dim();
        dim.check(&self.p)?;
        if !(self.mu > 0.0 && self.mu < 1.0 && self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::BadConfig("mu and nu must lie in (0,1)".into()));
        }
        let n = dim.nf();
        let dirs = AngularRule::Product { order: 3 }.directions(dim)?;
        let mut r = self.delta;
        while r >= min_radius {
            for (theta, _) in &dirs {
                let x = axpy(&self.p, r, theta);
                let j = u.jet(&x)?;
                let lap_bound = self.c1 / r.powf(n - 1.0 + self.mu);
                if j.laplacian.abs() > lap_bound * (1.0 + 1e-12) {
                    return Err(Error::ProfileViolated {
                        distance: r,
                        what: format!("|Δu| = {} exceeds {}", j.laplacian.abs(), lap_bound),
                    });
                }
                let g = norm_sq(&j.gradient).sqrt();
                let grad_bound = self.c2 / r.powf(n - 1.0 - self.nu);
                if g > grad_bound * (1.0 + 1e-12) {
                    return Err(Error::ProfileViolated {
                        distance: r,
                        what: format!("|∇u| = {g} exceeds {grad_bound}"),
                    });
                }
            }
            r *= 0.5;
        }
        Ok(())
    }
}

/// One excluded radius in [`rep_formula_singular`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcludedBallRow {
    pub eps: f64,
    /// `∫_{Ω \ B(p,ε)} H Δu`.
    pub volume: QuadResult,
    /// `∫_{∂B(p,ε)} (H ∂u/∂n - u ∂H/∂n)` with `n` pointing into `p`.
    pub sphere: f64,
    /// `u(ξ) - volume - boundary`: what the excluded ball still owes.
    pub residual: f64,
    /// `u(ξ) - volume - boundary + sphere`: zero by Green's identity for
    /// every `ε`, so it measures quadrature error alone.
    pub closed_residual: f64,
}

/// Representation formula check around an isolated singularity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularRep {
    pub u_xi: f64,
    /// `∫_{∂Ω} (u ∂H/∂n - H ∂u/∂n)`.
    pub boundary: QuadResult,
    pub rows: Vec<ExcludedBallRow>,
    /// Convergence order of the residual estimated from the last three rows.
    pub observed_order: Option<f64>,
    /// Richardson extrapolation of the residual to `ε = 0`.
    pub extrapolated: Option<f64>,
}

/// `C^∞` step: one below `a`, zero above `b`.
///
/// Splitting a volume integral with a merely `C^2` partition makes the
/// per-direction integrals non-smooth in the angle wherever rays graze the
/// transition spheres, which stalls the angular rule. A smooth partition
/// keeps the angular convergence spectral.
#[derive(Debug, Clone, Copy)]
struct SmoothStep {
    a: f64,
    b: f64,
}

impl SmoothStep {
    fn phi(&self, r: f64) -> f64 {
        if r <= self.a {
            return 1.0;
        }
        if r >= self.b {
            return 0.0;
        }
        let t = (r - self.a) / (self.b - self.a);
        let f = |s: f64| (-1.0 / s).exp();
        let (p, q) = (f(1.0 - t), f(t));
        p / (p + q)
    }
}

/// Default excluded radii.
pub const EXCLUDED_RADII: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Evaluate `u(ξ)` against `∫_Ω H Δu + ∫_∂Ω (u ∂H/∂n - H ∂u/∂n)` with a
/// shrinking ball about the singular point removed.
///
/// The volume integral is split by a smooth partition of unity: the part
/// near `p` is integrated in polar coordinates about `p` (logarithmic radial
/// variable), the rest in polar coordinates about `ξ`.
pub fn rep_formula_singular(
    u: &dyn ScalarField,
    prof: &SingularProfile,
    omega: &Region,
    xi: &[f64],
    radii: &[f64],
) -> Result<SingularRep> {
    let dim = u.dim();
    let n = dim.nf();
    let k = Kernel::new(dim);
    let p = prof.p.as_slice();
    if !omega.holes().is_empty() {
        return Err(Error::BadConfig("omega must be a ball".into()));
    }
    if !omega.contains(xi) || !omega.contains(p) {
        return Err(Error::BadConfig("p and xi must lie inside omega".into()));
    }
    let d_pxi = dist(p, xi);
    if d_pxi == 0.0 {
        return Err(Error::Coincident);
    }
    let d_wall = omega.radius() - dist(p, omega.center());
    let split = prof.delta.min(0.5 * d_pxi).min(0.5 * d_wall);
    let psi = SmoothStep {
        a: 0.5 * split,
        b: split,
    };
    let eps_max = radii.iter().cloned().fold(0.0, f64::max);
    if !(eps_max < 0.5 * split) {
        return Err(Error::BadConfig(format!(
            "excluded radii must stay below {}",
            0.5 * split
        )));
    }
    let eps_min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    prof.verify(u, eps_min)?;

    let near_region = Region::ball(p.to_vec(), split)?;
    let near_rule = choose_rule(
        dim,
        p,
        &near_region,
        &[Some(xi.to_vec()), u.radial_center()],
    );
    let far_rule = match choose_rule(dim, xi, omega, &[u.radial_center(), Some(p.to_vec())]) {
        // Rays from ξ graze the partition spheres around p; the angular
        // integrand is smooth but steep there, so the tensor rule is doubled.
        AngularRule::Product { order } => AngularRule::Product { order: 2 * order },
        r => r,
    };

    let far = polar_integral(
        dim,
        xi,
        omega,
        &far_rule,
        |x| {
            let w = 1.0 - psi.phi(dist(x, p));
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(w * k.h(x, xi)? * u.jet(x)?.laplacian)
        },
        &RadialOpts::default(),
    )?;

    let boundary_dirs = far_rule_for_boundary(dim, omega, &[u.radial_center(), Some(xi.to_vec())])?;
    let rb = omega.radius();
    let area_scale = rb.powi(dim.n() as i32 - 1);
    let terms: Vec<f64> = boundary_dirs
        .par_iter()
        .map(|(theta, w)| {
            let x = axpy(omega.center(), rb, theta);
            let j = u.jet(&x)?;
            let dh = dot(&k.grad_h(&x, xi)?, theta);
            let du = dot(&j.gradient, theta);
            Ok(w * area_scale * (j.value * dh - k.h(&x, xi)? * du))
        })
        .collect::<Result<_>>()?;
    let boundary_value = pairwise_sum(&terms);
    let coarse_dirs = match far_rule_coarse(dim, omega, &[u.radial_center(), Some(xi.to_vec())]) {
        Some(r) => r.directions(dim)?,
        None => Vec::new(),
    };
    let coarse_value: f64 = if coarse_dirs.is_empty() {
        boundary_value
    } else {
        let terms: Vec<f64> = coarse_dirs
            .iter()
            .map(|(theta, w)| {
                let x = axpy(omega.center(), rb, theta);
                let j = u.jet(&x)?;
                let dh = dot(&k.grad_h(&x, xi)?, theta);
                let du = dot(&j.gradient, theta);
                Ok(w * area_scale * (j.value * dh - k.h(&x, xi)? * du))
            })
            .collect::<Result<_>>()?;
        pairwise_sum(&terms)
    };
    let boundary = QuadResult {
        value: boundary_value,
        err_est: (boundary_value - coarse_value).abs(),
        n_evals: boundary_dirs.len() + coarse_dirs.len(),
    };

    let u_xi = u.value(xi)?;
    let sphere_dirs = near_rule.directions(dim)?;
    let mut rows = Vec::with_capacity(radii.len());
    for &eps in radii {
        let near = polar_integral(
            dim,
            p,
            &near_region,
            &near_rule,
            |x| Ok(psi.phi(dist(x, p)) * k.h(x, xi)? * u.jet(x)?.laplacian),
            &RadialOpts {
                t_min: eps,
                log_below: Some(split),
                ..RadialOpts::default()
            },
        )?;
        let volume = near + far;
        let sterms: Vec<f64> = sphere_dirs
            .iter()
            .map(|(theta, w)| {
                let x = axpy(p, eps, theta);
                let j = u.jet(&x)?;
                // Outward normal of Ω \ B(p,ε) points toward p.
                let du = -dot(&j.gradient, theta);
                let dh = -dot(&k.grad_h(&x, xi)?, theta);
                Ok(w * eps.powf(n - 1.0) * (k.h(&x, xi)? * du - j.value * dh))
            })
            .collect::<Result<_>>()?;
        let sphere = pairwise_sum(&sterms);
        let residual = u_xi - volume.value - boundary.value;
        rows.push(ExcludedBallRow {
            eps,
            volume,
            sphere,
            residual,
            closed_residual: residual + sphere,
        });
    }

    let (observed_order, extrapolated) = richardson(&rows);
    Ok(SingularRep {
        u_xi,
        boundary,
        rows,
        observed_order,
        extrapolated,
    })
}

fn far_rule_for_boundary(
    dim: Dim,
    omega: &Region,
    centers: &[Option<Vec<f64>>],
) -> Result<Vec<Direction>> {
    boundary_rule(dim, omega, centers).directions(dim)
}

fn far_rule_coarse(dim: Dim, omega: &Region, centers: &[Option<Vec<f64>>]) -> Option<AngularRule> {
    boundary_rule(dim, omega, centers).coarser()
}

fn boundary_rule(dim: Dim, omega: &Region, centers: &[Option<Vec<f64>>]) -> AngularRule {
    match choose_rule(dim, omega.center(), omega, centers) {
        AngularRule::Product { .. } => {
            // Boundary integrands are smooth; the product rule at the default
            // order already has at least 2^12 points in n = 3.
            AngularRule::default_product(dim)
        }
        r => r,
    }
}

/// Order and zero-limit from the last three rows, assuming equal ratios of
/// successive radii.
fn richardson(rows: &[ExcludedBallRow]) -> (Option<f64>, Option<f64>) {
    if rows.len() < 3 {
        return (None, None);
    }
    let m = rows.len();
    let (a, b, c) = (&rows[m - 3], &rows[m - 2], &rows[m - 1]);
    let ratio = a.eps / b.eps;
    let d1 = a.residual - b.residual;
    let d2 = b.residual - c.residual;
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() {
        return (None, Some(c.residual));
    }
    let q = (d1 / d2).ln() / ratio.ln();
    let extrapolated = c.residual - d2 / (ratio.powf(q) - 1.0);
    (Some(q), Some(extrapolated))
}

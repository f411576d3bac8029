use serde::Serialize;

use crate::dim::Dim;
use crate::error::{Error, Result};

/// Outer glue radius `ρ_M` (in units of the bubble scale) for a target
/// deviation `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoMSolution {
    pub rho_big_m: f64,
    /// `δ̄ = δ^(2/(n-2))`.
    pub delta_bar: f64,
    pub alpha: f64,
    /// The admissible band for `(1/(1+ρ_M^2))^((n-2)/2)`.
    pub band: (f64, f64),
    dim: Dim,
}

impl RhoMSolution {
    /// `(1/(1+ρ^2))^((n-2)/2)`, the bubble profile relative to its peak.
    pub fn profile(&self, rho: f64) -> f64 {
        (1.0 / (1.0 + rho * rho)).powf(self.dim.half_weight())
    }

    /// Both inequalities of the band, evaluated at the stored `ρ_M`.
    pub fn in_band(&self) -> bool {
        let x = self.profile(self.rho_big_m);
        let tol = 1e-12 * x;
        self.band.0 <= x + tol && x <= self.band.1 + tol
    }

    /// Left minus right side of
    /// `[(1/(1+ρ_M^2))^((n-2)/2) - δ̄^((n-2)/2)]^((n+2)/(n-2)) >= δ̄^((n-2)/2 - α)`.
    pub fn floor_margin(&self) -> f64 {
        let h = self.dim.half_weight();
        let lhs = (self.profile(self.rho_big_m) - self.delta_bar.powf(h))
            .powf(self.dim.critical_exponent());
        lhs - self.delta_bar.powf(h - self.alpha)
    }

    /// Inner radius with `1 + ρ_m^2 = (1 + ρ_M^2) 2^(-2/(n+2))`.
    ///
    /// On `B(0, ρ_m)` the bubble to the power `(n+2)/(n-2)` is at least twice
    /// its value at `ρ_M`. Unlike `ρ_M - 10`, it stays positive for small `ρ_M`.
    pub fn rho_small_m(&self) -> Result<f64> {
        let n = self.dim.nf();
        let s = (1.0 + self.rho_big_m * self.rho_big_m) * 2f64.powf(-2.0 / (n + 2.0)) - 1.0;
        if s > 0.0 {
            Ok(s.sqrt())
        } else {
            Err(Error::NoSolution)
        }
    }
}

/// Solve for `ρ_M` at the geometric midpoint of the band
/// `δ̄^e + δ̄^((n-2)/2) <= (1/(1+ρ_M^2))^((n-2)/2) <= 2 δ̄^e`,
/// `e = (n-2)(n-2-2α)/(2(n+2))`.
pub fn solve_rho_m(delta: f64, alpha: f64, dim: Dim) -> Result<RhoMSolution> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadConfig(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    let n = dim.nf();
    if !(alpha > 0.0 && 2.0 * (1.0 + alpha) < n) {
        return Err(Error::BadConfig(format!(
            "alpha must satisfy 0 < alpha and 2(1+alpha) < n, got {alpha}"
        )));
    }
    let h = dim.half_weight();
    let delta_bar = delta.powf(2.0 / (n - 2.0));
    let e = (n - 2.0) * (n - 2.0 - 2.0 * alpha) / (2.0 * (n + 2.0));
    let lo = delta_bar.powf(e) + delta_bar.powf(h);
    let hi = 2.0 * delta_bar.powf(e);
    if !(lo < hi) {
        return Err(Error::NoSolution);
    }
    let x = (lo * hi).sqrt();
    if !(x < 1.0) {
        return Err(Error::NoSolution);
    }
    let rho = (x.powf(-1.0 / h) - 1.0).sqrt();
    Ok(RhoMSolution {
        rho_big_m: rho,
        delta_bar,
        alpha,
        band: (lo, hi),
        dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_and_floor() {
        let d = Dim::new(5).unwrap();
        for delta in [1e-2, 1e-3, 1e-4, 1e-6, 1e-12] {
            let s = solve_rho_m(delta, 0.25, d).unwrap();
            assert!(s.in_band());
            assert!(s.floor_margin() >= 0.0);
            assert!(s.rho_small_m().unwrap() < s.rho_big_m);
        }
    }

    #[test]
    fn rho_grows_as_delta_shrinks() {
        let d = Dim::new(5).unwrap();
        // At δ = 0.1 the whole band lies above the bubble peak.
        assert_eq!(solve_rho_m(0.1, 1.0, d), Err(Error::NoSolution));
        let mut prev = 0.0;
        for k in 2..=60 {
            let s = solve_rho_m(10f64.powi(-k), 1.0, d).unwrap();
            assert!(s.rho_big_m > prev);
            prev = s.rho_big_m;
        }
        // ρ_M passes 100 only for δ below roughly 1e-42.
        assert!(prev > 100.0);
    }

    #[test]
    fn preconditions() {
        let d = Dim::new(4).unwrap();
        assert!(solve_rho_m(1e-3, 1.0, d).is_err());
        assert!(solve_rho_m(2.0, 0.1, Dim::new(5).unwrap()).is_err());
        assert!(solve_rho_m(1e-3, 0.0, Dim::new(5).unwrap()).is_err());
    }
}

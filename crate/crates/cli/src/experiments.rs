//! One function per experiment kind. Each returns unjudged measurements.

use std::sync::Arc;

use bubbleforge::blowup::{detect, detect_all, BlowupInput, BlowupOpts};
use bubbleforge::bounds::{
    lower_bound_4_4, sup_scan, thm_a_bound, thm_a_conditions, thm_b_bound, thm_b_chain_bound,
    thm_b_condition, ThmBParams,
};
use bubbleforge::dim::{dist, scale};
use bubbleforge::field::{k_function, k_sum_limit, sum_field, AffineField, PowerField, SumField};
use bubbleforge::glue::{
    glue_bubble_into, glue_concentric, glue_disjoint, kg_deviation, solve_rho_m, ConcentricConfig,
    DisjointConfig, InsertConfig,
};
use bubbleforge::grid::{GridSpec, ScanRegion};
use bubbleforge::potential::{
    int_abs_h_ball, rep_formula_singular, rep_identity_residual, Kernel, Region, SingularProfile,
    EXCLUDED_RADII,
};
use bubbleforge::{Bubble, Dim, Error, FieldRef, Result};

use crate::config::{Kind, Params};
use crate::report::{Measurement, ParamList};

/// Settings shared by every experiment in a run.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub grid: GridSpec,
    pub seed: Option<u64>,
}

pub fn execute(kind: Kind, dim: Dim, p: &Params, ctx: &Ctx) -> Result<Vec<Measurement>> {
    match kind {
        Kind::ThmA => thm_a(dim, p, ctx),
        Kind::ThmB => thm_b(dim, p, ctx),
        Kind::Example525 => example_525(dim, p, ctx),
        Kind::GlueInsert => glue_insert(dim, p, ctx),
        Kind::Lemma37 => lemma_37(dim, p),
        Kind::RepIdentity => rep_identity(dim, p),
        Kind::RepSingular => rep_singular(dim, p),
        Kind::Blowup => blowup(dim, p, ctx),
    }
}

fn point_or(p: &Option<Vec<f64>>, dim: Dim, default: Vec<f64>) -> Result<Vec<f64>> {
    let x = p.clone().unwrap_or(default);
    dim.check(&x)?;
    Ok(x)
}

/// Concentric glue: the grid sup against `lower_bound_4_4` and, when a
/// hypothesis of Theorem A holds, against `(n+2)/n`.
fn thm_a(dim: Dim, p: &Params, ctx: &Ctx) -> Result<Vec<Measurement>> {
    let l1 = p.lambda1.unwrap_or(0.0099);
    let l2 = p.lambda2.unwrap_or(1.0);
    let rho = p.rho.unwrap_or(1.0);
    let big_r = p.big_r.unwrap_or(10.0);
    let params = ParamList::default()
        .num("n", dim.n())
        .num("lambda1", l1)
        .num("lambda2", l2)
        .num("rho", rho)
        .num("R", big_r)
        .finish();
    let (c1, c2) = thm_a_conditions(l1, l2, rho, big_r, dim)?;
    let lb = lower_bound_4_4(l1, l2, rho, big_r, dim)?;
    let u = glue_concentric(&ConcentricConfig::new(dim, l1, l2, rho, big_r)?)?;
    let sup = sup_scan(&u, &ScanRegion::ball(dim.origin(), big_r), &ctx.grid)?.sup_abs_dev;
    let mut rows = vec![Measurement::new("thm-a/bound-4-4", &params, sup, lb).at_least(1e-9)];
    if c1 || c2 {
        rows.push(Measurement::new("thm-a/theorem", &params, sup, thm_a_bound(dim)).at_least(1e-9));
    }
    Ok(rows)
}

/// Disjoint glue of a small bubble at `sep e1` and a unit-ball bubble at 0.
fn thm_b(dim: Dim, p: &Params, ctx: &Ctx) -> Result<Vec<Measurement>> {
    let sep = p.sep.unwrap_or(4.5);
    let tb = ThmBParams {
        lambda1: p.lambda1.unwrap_or(1.0 / 2200.0),
        lambda2: p.lambda2.unwrap_or(1.0),
        r1: p.r1.unwrap_or(1.0),
        a: p.a.unwrap_or(1.0),
        xi1: scale(&dim.unit(0), sep),
        xi2: dim.origin(),
        sigma: p.sigma.unwrap_or(1.0),
    };
    let params = ParamList::default()
        .num("n", dim.n())
        .num("lambda1", tb.lambda1)
        .num("lambda2", tb.lambda2)
        .num("r1", tb.r1)
        .num("a", tb.a)
        .num("sep", sep)
        .num("sigma", tb.sigma)
        .finish();
    let cond = thm_b_condition(&tb, dim)?;
    let q = tb.lambda2 / tb.lambda1;
    let mut rows = vec![Measurement::new(
        "thm-b/hypothesis",
        &params,
        q * q,
        tb.threshold(dim),
    )];
    if cond {
        let bound = thm_b_bound(tb.sigma, dim);
        let chain = thm_b_chain_bound(&tb, dim)?;
        rows.push(Measurement::new("thm-b/chain", &params, chain, bound).at_least(1e-9));
        let u = glue_disjoint(&DisjointConfig::new(
            Bubble::new(dim, tb.lambda1, tb.xi1.clone())?,
            tb.r1,
            Bubble::new(dim, tb.lambda2, tb.xi2.clone())?,
            tb.a,
        ))?;
        // A box around both transition annuli with a little room.
        let reach = 2.0 * tb.r1.max(tb.a) + 0.2;
        let mut lo = vec![-reach; dim.n()];
        let mut hi = vec![reach; dim.n()];
        lo[0] = (-2.0 * tb.a).min(sep - 2.0 * tb.r1) - 0.2;
        hi[0] = (2.0 * tb.a).max(sep + 2.0 * tb.r1) + 0.2;
        let sup = sup_scan(&u, &ScanRegion::Box { lo, hi }, &ctx.grid)?.sup_abs_dev;
        rows.push(Measurement::new("thm-b/witness", &params, sup, bound).at_least(1e-9));
    }
    Ok(rows)
}

/// Two bubbles summed without cutoffs, `u_{λ1, sep e1} + u_{λ2, 0}`.
fn example_525(dim: Dim, p: &Params, ctx: &Ctx) -> Result<Vec<Measurement>> {
    let l1 = p.lambda1.or(p.lambda).unwrap_or(1.0);
    let l2 = p.lambda2.or(p.lambda).unwrap_or(1.0);
    let sep = p.sep.unwrap_or(4.0);
    let params = ParamList::default()
        .num("n", dim.n())
        .num("lambda1", l1)
        .num("lambda2", l2)
        .num("sep", sep)
        .finish();
    let e1 = dim.unit(0);
    let u = SumField::new(vec![
        Arc::new(Bubble::new(dim, l1, scale(&e1, sep))?),
        Arc::new(Bubble::centered(dim, l2)?),
    ])?;
    let mut rows = Vec::new();
    if l1 == l2 {
        // On the midplane both bubbles agree, so K = 2^(1-p) = 2^(-4/(n-2)).
        let mid = 2f64.powf(-4.0 / (dim.nf() - 2.0));
        let k_mid = k_function(&u, &scale(&e1, sep / 2.0))?;
        rows.push(Measurement::new("example-525/midplane", &params, k_mid, mid).close(1e-6));
        let m = 3.0 * l1;
        let mut hi = vec![m; dim.n()];
        hi[0] = sep + m;
        let region = ScanRegion::Box {
            lo: vec![-m; dim.n()],
            hi,
        };
        let sup = sup_scan(&u, &region, &ctx.grid)?.sup_abs_dev;
        rows.push(Measurement::new("example-525/sup", &params, sup, 1.0 - mid).at_most(1e-6));
    }
    let far = k_function(&u, &scale(&dim.unit(dim.n() - 1), 1e6))?;
    rows.push(
        Measurement::new("example-525/far", &params, far, k_sum_limit(l1, l2, dim)?).close(1e-4),
    );
    Ok(rows)
}

/// A bubble of scale `λ` planted at `x1` into itself plus an affine
/// perturbation of C¹ size `δ λ^((2-n)/2)`.
fn glue_insert(dim: Dim, p: &Params, ctx: &Ctx) -> Result<Vec<Measurement>> {
    let n = dim.nf();
    let delta = p.delta.unwrap_or(1e-3);
    let alpha = match p.alpha {
        Some(a) => a,
        None => {
            let a = (n - 4.0) / 4.0;
            if a <= 0.0 {
                return Err(Error::BadConfig(format!(
                    "the default alpha (n-4)/4 is not positive for n = {}; pass --alpha",
                    dim.n()
                )));
            }
            a.min(0.999 * (n - 2.0) / 2.0)
        }
    };
    let lambda = p.lambda.unwrap_or(1e-2);
    let big_r = p.big_r.unwrap_or(10.0);
    let x1 = point_or(&p.xi, dim, scale(&dim.unit(0), 0.1))?;
    let params = ParamList::default()
        .num("n", dim.n())
        .num("delta", delta)
        .num("alpha", alpha)
        .num("lambda", lambda)
        .num("R", big_r)
        .point("xi", &x1)
        .finish();
    let sol = solve_rho_m(delta, alpha, dim)?;
    let rho_m = sol.rho_small_m()?;
    let amp = delta * lambda.powf(-dim.half_weight());
    let mut slope = vec![0.0; dim.n()];
    slope[0] = 0.25 * amp / (lambda * big_r);
    let offset = 0.5 * amp - slope[0] * x1[0];
    let host: FieldRef = sum_field(
        Arc::new(Bubble::new(dim, lambda, x1.clone())?),
        Arc::new(AffineField::new(dim, offset, slope)?),
    )?
    .into();
    let w = glue_bubble_into(&InsertConfig {
        host: host.clone(),
        x1: x1.clone(),
        lambda,
        rho_small_m: rho_m,
        rho_big_m: sol.rho_big_m,
    })?;
    let (inner, outer) = (lambda * rho_m, lambda * sol.rho_big_m);
    let kg = kg_deviation(&w, dim.origin(), inner, outer, &ctx.grid)?.sup_abs_dev;
    let eps = kg_deviation(host.as_ref(), x1, inner, outer, &ctx.grid)?.sup_abs_dev;
    let bound = 2.0 * eps.max(sol.delta_bar.powf(alpha));
    Ok(vec![Measurement::new(
        "glue-insert/sup",
        &params,
        kg,
        bound,
    )
    .at_most(0.0)])
}

fn lemma_37(dim: Dim, p: &Params) -> Result<Vec<Measurement>> {
    let big_r = p.big_r.unwrap_or(1.0);
    let xi = point_or(&p.xi, dim, dim.origin())?;
    let params = ParamList::default()
        .num("n", dim.n())
        .num("R", big_r)
        .point("xi", &xi)
        .finish();
    let q = int_abs_h_ball(&Kernel::new(dim), big_r, &xi)?;
    let bound = big_r * big_r / (2.0 * (dim.nf() - 2.0));
    let row = if xi.iter().all(|&c| c == 0.0) {
        Measurement::new("lemma-37/centered", &params, q.value, bound).close(1e-6)
    } else {
        Measurement::new("lemma-37/off-center", &params, q.value + q.err_est, bound).at_most(0.0)
    };
    Ok(vec![row])
}

fn rep_identity(dim: Dim, p: &Params) -> Result<Vec<Measurement>> {
    let l1 = p.lambda1.unwrap_or(0.0099);
    let l2 = p.lambda2.unwrap_or(1.0);
    let rho = p.rho.unwrap_or(1.0);
    let big_r = p.big_r.unwrap_or(10.0);
    let omega = p.omega.unwrap_or(big_r);
    let xi = point_or(&p.xi, dim, dim.origin())?;
    let params = ParamList::default()
        .num("n", dim.n())
        .num("lambda1", l1)
        .num("lambda2", l2)
        .num("rho", rho)
        .num("R", big_r)
        .num("omega", omega)
        .point("xi", &xi)
        .finish();
    let cfg = ConcentricConfig::new(dim, l1, l2, rho, big_r)?;
    let u = glue_concentric(&cfg)?;
    let rep = rep_identity_residual(&u, &cfg.b2, &Region::ball(dim.origin(), omega)?, &xi)?;
    Ok(vec![Measurement::new(
        "rep-identity/residual",
        &params,
        rep.lhs.value,
        rep.rhs,
    )
    .close(1e-3)])
}

/// The representation formula with a small ball cut out around a singular
/// point, for `u = |x|^s`.
fn rep_singular(dim: Dim, p: &Params) -> Result<Vec<Measurement>> {
    let s = p.exponent.unwrap_or(-0.5);
    let prof = SingularProfile {
        p: dim.origin(),
        mu: p.mu.unwrap_or(0.5),
        nu: p.nu.unwrap_or(0.5),
        c1: p.c1.unwrap_or(0.25),
        c2: p.c2.unwrap_or(0.5),
        delta: p.delta.unwrap_or(0.5),
    };
    let omega = p.omega.unwrap_or(1.0);
    let xi = point_or(&p.xi, dim, scale(&dim.unit(0), 0.5))?;
    let base = ParamList::default()
        .num("n", dim.n())
        .num("exponent", s)
        .num("mu", prof.mu)
        .num("nu", prof.nu)
        .num("c1", prof.c1)
        .num("c2", prof.c2)
        .num("delta", prof.delta)
        .num("omega", omega)
        .point("xi", &xi);
    let u = PowerField::new(dim, dim.origin(), 1.0, s)?;
    prof.verify(&u, 1e-6)?;
    let rep = rep_formula_singular(
        &u,
        &prof,
        &Region::ball(dim.origin(), omega)?,
        &xi,
        &EXCLUDED_RADII,
    )?;
    let mut rows: Vec<Measurement> = rep
        .rows
        .iter()
        .map(|r| {
            let params = format!("{};eps={}", base.finish(), r.eps);
            Measurement::new("rep-singular/closed", &params, r.closed_residual, 0.0).close(1e-6)
        })
        .collect();
    let extrap = rep.extrapolated.unwrap_or(f64::NAN);
    rows.push(
        Measurement::new("rep-singular/extrapolated", &base.finish(), extrap, 0.0).close(1e-4),
    );
    Ok(rows)
}

fn parse_plant(s: &str, dim: Dim) -> Result<Bubble> {
    let bad = || Error::BadConfig(format!("bad --plant `{s}`: expected SCALE@x1,x2,..."));
    let (mu, at) = s.split_once('@').ok_or_else(bad)?;
    let mu: f64 = mu.trim().parse().map_err(|_| bad())?;
    let at: Vec<f64> = at
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    Bubble::new(dim, mu, at)
}

/// Plant bubbles, run the detector, and match each plant to its nearest
/// detection.
fn blowup(dim: Dim, p: &Params, ctx: &Ctx) -> Result<Vec<Measurement>> {
    let plants: Vec<Bubble> = if p.plant.is_empty() {
        let mut y = dim.origin();
        y[1] = 0.3;
        y[2] = 0.1;
        vec![Bubble::new(dim, 1e-3, y)?]
    } else {
        p.plant
            .iter()
            .map(|s| parse_plant(s, dim))
            .collect::<Result<_>>()?
    };
    let eps = p.eps.unwrap_or(0.1);
    let big_r = p.big_r.unwrap_or(10.0);
    let target = p.delta_target.unwrap_or(1e-6);
    let max = p.max_bubbles.unwrap_or(plants.len());
    let mut params = ParamList::default()
        .num("n", dim.n())
        .num("eps", eps)
        .num("R", big_r)
        .num("delta_target", target);
    for b in &plants {
        params = params.num("mu", b.lambda()).point("at", b.center());
    }
    let params = params.finish();
    let field: FieldRef = Arc::new(SumField::new(
        plants
            .iter()
            .map(|b| Arc::new(b.clone()) as FieldRef)
            .collect(),
    )?);
    let inp = BlowupInput::new(field, eps, big_r, target)?;
    let mut opts = BlowupOpts::default();
    if let Some(seed) = ctx.seed {
        opts.fit.seed = seed;
    }
    let found = if max == 1 {
        detect(&inp, &opts)?.into_iter().collect()
    } else {
        detect_all(&inp, &opts, max)?
    };
    let mut rows = vec![Measurement::new(
        "blowup/count",
        &params,
        found.len() as f64,
        plants.len() as f64,
    )
    .close(0.0)];
    for (i, b) in plants.iter().enumerate() {
        let near = found.iter().min_by(|x, y| {
            dist(&x.bubble_center, b.center()).total_cmp(&dist(&y.bubble_center, b.center()))
        });
        let (ratio, offset, delta) = match near {
            Some(r) => (
                r.bubble_scale / b.lambda(),
                dist(&r.bubble_center, b.center()) / b.lambda(),
                r.delta_measured,
            ),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        // A fit within δ of a bubble pins the scale to about δ; neighbours
        // bend a multi-bubble fit by that much.
        rows.push(Measurement::new(format!("blowup/scale-{i}"), &params, ratio, 1.0).close(target));
        rows.push(
            Measurement::new(format!("blowup/center-{i}"), &params, offset, 0.0)
                .close(target.max(1e-3)),
        );
        rows.push(
            Measurement::new(format!("blowup/delta-{i}"), &params, delta, target).at_most(0.0),
        );
    }
    Ok(rows)
}

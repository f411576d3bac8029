//! Deterministic grid maximization with one level of local refinement.
//!
//! Values are computed in parallel but collected in grid-index order, and the
//! argmax is taken sequentially, so ties always resolve to the smallest
//! (lexicographic) grid index regardless of thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::dim::{dist, Dim};
use crate::error::{Error, Result};
use crate::field::{k_function, ScalarField};

/// Region scanned for a maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ScanRegion {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Annulus {
        center: Vec<f64>,
        inner: f64,
        outer: f64,
    },
}

impl ScanRegion {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        ScanRegion::Ball { center, radius }
    }

    pub fn annulus(center: Vec<f64>, inner: f64, outer: f64) -> Self {
        ScanRegion::Annulus {
            center,
            inner,
            outer,
        }
    }

    fn validate(&self, dim: Dim) -> Result<()> {
        match self {
            ScanRegion::Box { lo, hi } => {
                dim.check(lo)?;
                dim.check(hi)?;
                if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
                    return Err(Error::BadConfig("empty scan box".into()));
                }
            }
            ScanRegion::Ball { center, radius } => {
                dim.check(center)?;
                if !(*radius > 0.0) {
                    return Err(Error::BadRadii {
                        inner: 0.0,
                        outer: *radius,
                    });
                }
            }
            ScanRegion::Annulus {
                center,
                inner,
                outer,
            } => {
                dim.check(center)?;
                if !(*inner >= 0.0 && inner < outer) {
                    return Err(Error::BadRadii {
                        inner: *inner,
                        outer: *outer,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ScanRegion::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *l <= *v && *v <= *h),
            ScanRegion::Ball { center, radius } => dist(x, center) <= *radius,
            ScanRegion::Annulus {
                center,
                inner,
                outer,
            } => {
                let r = dist(x, center);
                *inner <= r && r <= *outer
            }
        }
    }

    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ScanRegion::Box { lo, hi } => (lo.clone(), hi.clone()),
            ScanRegion::Ball { center, radius: r }
            | ScanRegion::Annulus {
                center, outer: r, ..
            } => (
                center.iter().map(|c| c - r).collect(),
                center.iter().map(|c| c + r).collect(),
            ),
        }
    }

    /// Center and radial range, for regions that are balls or annuli.
    fn radial_range(&self) -> Option<(&[f64], f64, f64)> {
        match self {
            ScanRegion::Box { .. } => None,
            ScanRegion::Ball { center, radius } => Some((center, 0.0, *radius)),
            ScanRegion::Annulus {
                center,
                inner,
                outer,
            } => Some((center, *inner, *outer)),
        }
    }
}

/// Resolution settings for a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    /// Coarse points per axis; `None` picks a dimension-dependent default.
    pub per_axis: Option<usize>,
    /// Points per axis in each refinement box (spanning two coarse cells).
    pub refine_per_axis: usize,
    /// Number of coarse maxima refined.
    pub candidates: usize,
    /// Points along the ray when the scan reduces to one radial dimension.
    pub radial_points: usize,
    /// Allow the radial reduction when the objective is radially symmetric.
    pub allow_radial: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            per_axis: None,
            refine_per_axis: 21,
            candidates: 1,
            radial_points: 2048,
            allow_radial: true,
        }
    }
}

impl GridSpec {
    pub fn with_per_axis(mut self, k: usize) -> Self {
        self.per_axis = Some(k);
        self
    }

    pub fn default_per_axis(dim: Dim) -> usize {
        match dim.n() {
            3 => 64,
            4 => 24,
            _ => 12,
        }
    }
}

/// What was scanned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDescriptor {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub spacing: Vec<f64>,
    pub per_axis: usize,
    /// True when the scan ran along a single ray from the symmetry center.
    pub radial: bool,
}

/// Result of maximizing an objective over a region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanMax {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub grid: GridDescriptor,
    pub n_samples: usize,
}

/// Grid-scan record of `sup |K - 1|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KReport {
    pub sup_abs_dev: f64,
    pub argmax: Vec<f64>,
    pub grid: GridDescriptor,
    pub n_samples: usize,
}

impl From<ScanMax> for KReport {
    fn from(m: ScanMax) -> Self {
        KReport {
            sup_abs_dev: m.value,
            argmax: m.argmax,
            grid: m.grid,
            n_samples: m.n_samples,
        }
    }
}

/// A ball removed from the scanned region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Excluded {
    pub center: Vec<f64>,
    pub radius: f64,
}

pub(crate) fn lattice(lo: &[f64], hi: &[f64], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let spacing: Vec<f64> = lo
        .iter()
        .zip(hi)
        .map(|(l, h)| if k > 1 { (h - l) / (k - 1) as f64 } else { 0.0 })
        .collect();
    let n = lo.len();
    let total = k.pow(n as u32);
    let points = (0..total)
        .map(|mut idx| {
            let mut x = vec![0.0; n];
            for axis in (0..n).rev() {
                let i = idx % k;
                idx /= k;
                x[axis] = if k > 1 {
                    lo[axis] + spacing[axis] * i as f64
                } else {
                    0.5 * (lo[axis] + hi[axis])
                };
            }
            x
        })
        .collect();
    (spacing, points)
}

pub(crate) fn evaluate<F>(objective: &F, points: &[Vec<f64>]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    points
        .par_iter()
        .map(|x| {
            let v = objective(x)?;
            if v.is_nan() {
                return Err(Error::NonFinite { at: x.clone() });
            }
            Ok(v)
        })
        .collect()
}

/// Indices of the `k` largest values, ties broken by lower index.
fn top_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

fn first_argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if best.is_none_or(|b| *v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Maximize `objective` over `region` minus the `excluded` balls.
///
/// `radial_center` declares that the objective depends only on the distance
/// to that point; when it matches the center of a ball or annulus region the
/// scan runs along one ray instead of the full lattice.
pub fn scan_max<F>(
    objective: F,
    dim: Dim,
    region: &ScanRegion,
    spec: &GridSpec,
    excluded: &[Excluded],
    radial_center: Option<&[f64]>,
) -> Result<ScanMax>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    region.validate(dim)?;
    let keep =
        |x: &[f64]| region.contains(x) && excluded.iter().all(|e| dist(x, &e.center) >= e.radius);

    if let (true, Some(rc), Some((center, r_lo, r_hi))) =
        (spec.allow_radial, radial_center, region.radial_range())
    {
        if excluded.is_empty() && dist(rc, center) == 0.0 {
            return radial_scan(&objective, dim, center, r_lo, r_hi, spec);
        }
    }

    let k = spec
        .per_axis
        .unwrap_or_else(|| GridSpec::default_per_axis(dim));
    if k < 2 {
        return Err(Error::BadConfig(
            "grid needs at least 2 points per axis".into(),
        ));
    }
    let (lo, hi) = region.bounding_box();
    let (spacing, all) = lattice(&lo, &hi, k);
    let points: Vec<Vec<f64>> = all.into_iter().filter(|x| keep(x)).collect();
    if points.is_empty() {
        return Err(Error::BadConfig(
            "scan region contains no grid points".into(),
        ));
    }
    let values = evaluate(&objective, &points)?;
    let mut n_samples = points.len();
    let first = first_argmax(&values).expect("nonempty");
    let mut best_val = values[first];
    let mut best_x = points[first].clone();

    if spec.refine_per_axis >= 2 {
        for c in top_indices(&values, spec.candidates.max(1)) {
            let center = &points[c];
            let rlo: Vec<f64> = center.iter().zip(&spacing).map(|(x, h)| x - h).collect();
            let rhi: Vec<f64> = center.iter().zip(&spacing).map(|(x, h)| x + h).collect();
            let (_, local) = lattice(&rlo, &rhi, spec.refine_per_axis);
            let local: Vec<Vec<f64>> = local.into_iter().filter(|x| keep(x)).collect();
            let lv = evaluate(&objective, &local)?;
            n_samples += local.len();
            if let Some(i) = first_argmax(&lv) {
                if lv[i] > best_val {
                    best_val = lv[i];
                    best_x = local[i].clone();
                }
            }
        }
    }

    Ok(ScanMax {
        value: best_val,
        argmax: best_x,
        grid: GridDescriptor {
            lo,
            hi,
            spacing,
            per_axis: k,
            radial: false,
        },
        n_samples,
    })
}

/// Grid maximum of `|K - 1|` for `f` over `region`.
pub fn k_scan(f: &dyn ScalarField, region: &ScanRegion, spec: &GridSpec) -> Result<KReport> {
    let rc = f.radial_center();
    let m = scan_max(
        |x| Ok((k_function(f, x)? - 1.0).abs()),
        f.dim(),
        region,
        spec,
        &[],
        rc.as_deref(),
    )?;
    Ok(m.into())
}

fn radial_scan<F>(
    objective: &F,
    dim: Dim,
    center: &[f64],
    r_lo: f64,
    r_hi: f64,
    spec: &GridSpec,
) -> Result<ScanMax>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let m = spec.radial_points.max(2);
    let at = |r: f64| {
        let mut x = center.to_vec();
        x[0] += r;
        x
    };
    let dr = (r_hi - r_lo) / (m - 1) as f64;
    let radii: Vec<f64> = (0..m).map(|i| r_lo + dr * i as f64).collect();
    let points: Vec<Vec<f64>> = radii.iter().map(|&r| at(r)).collect();
    let values = evaluate(objective, &points)?;
    let mut n_samples = m;
    let first = first_argmax(&values).expect("nonempty");
    let mut best_val = values[first];
    let mut best_x = points[first].clone();

    if spec.refine_per_axis >= 2 {
        for c in top_indices(&values, spec.candidates.max(1)) {
            let k = spec.refine_per_axis;
            let a = (radii[c] - dr).max(r_lo);
            let b = (radii[c] + dr).min(r_hi);
            let local: Vec<Vec<f64>> = (0..k)
                .map(|i| at(a + (b - a) * i as f64 / (k - 1) as f64))
                .collect();
            let lv = evaluate(objective, &local)?;
            n_samples += k;
            if let Some(i) = first_argmax(&lv) {
                if lv[i] > best_val {
                    best_val = lv[i];
                    best_x = local[i].clone();
                }
            }
        }
    }

    let mut hi = center.to_vec();
    hi[0] += r_hi;
    let mut lo = center.to_vec();
    lo[0] += r_lo;
    let mut spacing = vec![0.0; dim.n()];
    spacing[0] = dr;
    Ok(ScanMax {
        value: best_val,
        argmax: best_x,
        grid: GridDescriptor {
            lo,
            hi,
            spacing,
            per_axis: m,
            radial: true,
        },
        n_samples,
    })
}

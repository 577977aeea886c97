//! Parallel volumes, the Steiner polynomial, and curvature measures
//! recovered from parallel-volume data.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{rounded_volume, sample_box, Shape};
use crate::linalg::{self, Weighting};
use crate::mc::{self, Executor};
use crate::real::{unit_ball_volume, Real, PI};
use crate::strata::intrinsic_volume;

/// Where parallel volumes come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Exact,
    Mc { samples: u64, seed: u64 },
}

/// Least-squares fit of `𝓛ⁿ([E]_r ∖ E) = Σ_{j=1}^n c_j r^j`, with
/// `C_k = c_{n−k} / ω_{n−k}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SteinerFit {
    pub r_grid: Vec<f64>,
    pub volumes: Vec<f64>,
    pub errors: Vec<f64>,
    /// `c_1..c_n`.
    pub coefficients: Vec<f64>,
    /// Row-major covariance of `coefficients`.
    pub covariance: Vec<f64>,
    /// `C_0..C_{n−1}`.
    pub curvature_measures: Vec<f64>,
    pub curvature_stderr: Vec<f64>,
    pub condition: f64,
}

fn check_radius(shape: &Shape, r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument("radius must be finite and ≥ 0".into()));
    }
    if r > 0.0 && r >= shape.reach() {
        return Err(Error::BeyondReach { r, reach: shape.reach() });
    }
    Ok(())
}

/// Closed-form `𝓛ⁿ([E]_r ∖ E)` for `0 ≤ r < reach(E)`.
pub fn parallel_volume_exact(shape: &Shape, r: f64) -> Result<f64> {
    check_radius(shape, r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let n = shape.dim();
    Ok(match shape {
        Shape::Ball(b) => unit_ball_volume(n) * ((b.radius + r).powi(n as i32) - b.radius.powi(n as i32)),
        Shape::Rounded(s) => rounded_volume(&s.core, s.radius + r) - rounded_volume(&s.core, s.radius),
        Shape::Union(u) => {
            let mut v = 0.0;
            for p in u.parts() {
                v += parallel_volume_exact(p, r)?;
            }
            v
        }
        Shape::Polytope(_) | Shape::Polygon(_) => {
            let p = shape.as_polytope().expect("positive reach polygon is convex");
            (0..n)
                .map(|k| unit_ball_volume(n - k) * r.powi((n - k) as i32) * intrinsic_volume(&p, k))
                .sum()
        }
    })
}

/// Monte Carlo `𝓛ⁿ{x : 0 < δ_E(x) ≤ r}` from the r-inflated bounding box.
pub fn parallel_volume_mc<E: Executor>(shape: &Shape, r: f64, samples: u64, seed: u64, exec: &E) -> Result<(f64, f64)> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument("radius must be finite and ≥ 0".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    if r == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (lo, hi) = shape.bounding_box();
    let lo: Vec<f64> = lo.iter().map(|x| x - r).collect();
    let hi: Vec<f64> = hi.iter().map(|x| x + r).collect();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let n = shape.dim();
    let m = mc::estimate_mean(exec, samples, seed, |rng| {
        let mut x = vec![0.0; n];
        sample_box(rng, &lo, &hi, &mut x);
        Ok(if !shape.contains_point(&x) && shape.distance_to(&x) <= r { 1.0 } else { 0.0 })
    })?;
    Ok((box_vol * m.mean, box_vol * m.stderr()))
}

/// `n + 3` Chebyshev-spaced radii in `[0.05, 0.5]·min(1, reach/2)`.
pub fn default_r_grid(shape: &Shape) -> Vec<f64> {
    let n = shape.dim();
    let s = (shape.reach() / 2.0).min(1.0);
    let (a, b) = (0.05 * s, 0.5 * s);
    let m = n + 3;
    let mut g: Vec<f64> = (0..m)
        .map(|k| {
            let x = ((2 * k + 1) as f64 * PI / (2 * m) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * x
        })
        .collect();
    g.sort_by(f64::total_cmp);
    g
}

/// Fits the Steiner polynomial on `r_grid` and reads off `C_0..C_{n−1}`.
pub fn fit_curvature_measures<E: Executor>(shape: &Shape, r_grid: &[f64], source: Source, exec: &E) -> Result<SteinerFit> {
    let n = shape.dim();
    let mut distinct = r_grid.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < n {
        return Err(Error::InvalidArgument(alloc::format!("need at least {n} distinct radii")));
    }
    for &r in r_grid {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument("radii must be > 0".into()));
        }
        check_radius(shape, r)?;
    }
    let mut volumes = Vec::with_capacity(r_grid.len());
    let mut errors = Vec::with_capacity(r_grid.len());
    for (i, &r) in r_grid.iter().enumerate() {
        let (v, e) = match source {
            Source::Exact => (parallel_volume_exact(shape, r)?, 0.0),
            Source::Mc { samples, seed } => parallel_volume_mc(shape, r, samples, seed.wrapping_add(i as u64), exec)?,
        };
        volumes.push(v);
        errors.push(e);
    }
    let design: Vec<Vec<f64>> = r_grid.iter().map(|r| (1..=n).map(|j| r.powi(j as i32)).collect()).collect();
    let weighting = match source {
        Source::Mc { .. } if errors.iter().all(|e| *e > 0.0) => Weighting::InverseVariance,
        _ => Weighting::Unweighted,
    };
    let fit = linalg::least_squares(&design, &volumes, &errors, weighting, 1e12)?;
    let curvature_measures = (0..n).map(|k| fit.coefficients[n - k - 1] / unit_ball_volume(n - k)).collect();
    let curvature_stderr = (0..n).map(|k| fit.stderr(n - k - 1) / unit_ball_volume(n - k)).collect();
    Ok(SteinerFit {
        r_grid: r_grid.to_vec(),
        volumes,
        errors,
        coefficients: fit.coefficients,
        covariance: fit.covariance,
        curvature_measures,
        curvature_stderr,
        condition: fit.condition,
    })
}

//! Blow-ups `E_{x₀,ρ} = (E − x₀)/ρ` against the tangent cone: windowed
//! Hausdorff distance and windowed symmetric-difference measure.

use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{sample_box, Shape};
use crate::mc::{self, Executor};
use crate::real::{unit_ball_volume, Real};
use crate::strata::{self, PolyhedralCone};
use crate::vector::{self, Point};

/// A closed cone given as a union of convex pieces.
fn cone_contains(c: &[PolyhedralCone], x: &[f64]) -> bool {
    c.iter().any(|k| k.contains(x))
}

/// Nearest point of `K ∩ B̄_r` for a convex cone `K` with apex at the
/// origin: project onto `K`, then pull back onto the ball.
fn cone_ball_project(c: &[PolyhedralCone], x: &[f64], r: f64) -> Point {
    let mut best: Option<(f64, Point)> = None;
    for k in c {
        let mut p = k.project(x);
        let l = vector::norm(&p);
        if l > r {
            p.iter_mut().for_each(|v| *v *= r / l);
        }
        let d = vector::dist(x, &p);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, p));
        }
    }
    best.expect("at least one cone piece").1
}

fn cone_ball_distance(c: &[PolyhedralCone], x: &[f64], r: f64) -> f64 {
    if vector::norm(x) <= r && cone_contains(c, x) {
        return 0.0;
    }
    vector::dist(x, &cone_ball_project(c, x, r))
}

/// Projection onto `A`, nudging off medial-axis ties.
fn shape_project(a: &Shape, x: &[f64]) -> Result<Point> {
    let mut y = x.to_vec();
    for k in 0..8 {
        match a.project(&y) {
            Err(Error::AmbiguousProjection { .. }) => {
                let eps = 1e-9 * (1.0 + vector::norm(x)) * (k + 1) as f64;
                y = x.iter().enumerate().map(|(i, v)| v + eps * (i + 1) as f64).collect();
            }
            other => return other,
        }
    }
    a.project(&y)
}

fn window_grid(n: usize, r: f64, h: f64) -> Vec<Point> {
    let m = (r / h).ceil() as i64 + 1;
    let reach = r + h * (n as f64).sqrt();
    let mut out = Vec::new();
    let mut idx = vec![-m; n];
    loop {
        let g: Point = idx.iter().map(|&i| i as f64 * h).collect();
        if vector::norm(&g) <= reach {
            out.push(g);
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] <= m {
                break;
            }
            idx[k] = -m;
            k += 1;
        }
    }
}

/// Windowed Hausdorff distance with its certified grid error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HausdorffEstimate {
    pub value: f64,
    /// `h√n`
    pub error: f64,
}

/// `dist_H(A ∩ B̄_r, C ∩ B̄_r)` from the nearest points of both sets to an
/// `h`-pitch grid (each an `h√n`-net of its set).
pub fn hausdorff_distance_windowed(a: &Shape, c: &[PolyhedralCone], r: f64, h: f64) -> Result<HausdorffEstimate> {
    if !(r > 0.0) || !(h > 0.0) {
        return Err(Error::InvalidArgument("window radius and grid pitch must be > 0".into()));
    }
    if c.is_empty() {
        return Err(Error::InvalidArgument("empty cone".into()));
    }
    let n = a.dim();
    for k in c {
        crate::error::check_dim(n, k.ambient_dim())?;
    }
    let grid = window_grid(n, r, h);
    let mut net_a: Vec<Point> = Vec::new();
    let mut net_c: Vec<Point> = Vec::new();
    for g in &grid {
        let p = shape_project(a, g)?;
        if vector::norm(&p) <= r {
            net_a.push(p);
        } else if vector::norm(g) <= r && a.contains_point(g) {
            net_a.push(g.clone());
        }
        net_c.push(cone_ball_project(c, g, r));
    }
    if net_a.is_empty() {
        return Err(Error::InvalidArgument("the shape does not meet the window".into()));
    }
    let mut d = 0.0f64;
    for p in &net_a {
        d = d.max(cone_ball_distance(c, p, r));
    }
    for q in &net_c {
        if a.contains_point(q) {
            continue;
        }
        let p = shape_project(a, q)?;
        let dq = if vector::norm(&p) <= r {
            vector::dist(q, &p)
        } else {
            net_a.iter().map(|x| vector::dist(q, x)).fold(f64::INFINITY, f64::min)
        };
        d = d.max(dq);
    }
    Ok(HausdorffEstimate {
        value: d,
        error: h * (n as f64).sqrt(),
    })
}

/// Uniform point of `B_r` (Gaussian direction, radius `r·U^{1/n}`).
fn ball_point(rng: &mut mc::Stream, n: usize, r: f64, out: &mut [f64]) {
    loop {
        let mut l2 = 0.0;
        for v in out.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *v = z;
            l2 += z * z;
        }
        if l2 > 0.0 {
            let mut u = [0.0];
            sample_box(rng, &[0.0], &[1.0], &mut u);
            let s = r * u[0].powf(1.0 / n as f64) / l2.sqrt();
            out.iter_mut().for_each(|v| *v *= s);
            return;
        }
    }
}

/// Monte Carlo `𝓛ⁿ((A Δ C) ∩ B_r)`; returns `(estimate, stderr)`.
pub fn symdiff_measure_mc<E: Executor>(
    a: &Shape,
    c: &[PolyhedralCone],
    r: f64,
    samples: u64,
    seed: u64,
    exec: &E,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("window radius must be > 0".into()));
    }
    let n = a.dim();
    let m = mc::estimate_mean(exec, samples, seed, |rng| {
        let mut x = vec![0.0; n];
        ball_point(rng, n, r, &mut x);
        Ok(if a.contains_point(&x) != cone_contains(c, &x) { 1.0 } else { 0.0 })
    })?;
    let vol = unit_ball_volume(n) * r.powi(n as i32);
    Ok((vol * m.mean, vol * m.stderr()))
}

/// Settings for [`convergence_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlowupOptions {
    /// Window radius after rescaling.
    pub r: f64,
    /// Hausdorff grid pitch; `None` picks `r/128` in the plane, `r/24` above.
    pub h: Option<f64>,
    pub samples: u64,
    pub seed: u64,
}

impl Default for BlowupOptions {
    fn default() -> Self {
        BlowupOptions {
            r: 1.0,
            h: None,
            samples: 200_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceTable {
    pub x0: Point,
    pub rho_grid: Vec<f64>,
    pub r: f64,
    pub hausdorff: Vec<f64>,
    pub hausdorff_error: f64,
    pub symdiff: Vec<f64>,
    pub symdiff_stderr: Vec<f64>,
    /// The tangent cone as a union of convex pieces.
    pub cone: Vec<PolyhedralCone>,
    pub reach: f64,
    /// `reach == 0`: the cone is still computed, but the set is outside
    /// the positive-reach theory.
    pub zero_reach: bool,
}

/// Both diagnostics along a decreasing `ρ` grid. The symmetric difference
/// reuses one seed for every `ρ` (common random numbers).
pub fn convergence_table<E: Executor>(
    shape: &Shape,
    x0: &[f64],
    rho_grid: &[f64],
    opts: &BlowupOptions,
    exec: &E,
) -> Result<ConvergenceTable> {
    if rho_grid.is_empty() || rho_grid.iter().any(|r| !(*r > 0.0)) || rho_grid.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::InvalidArgument("ρ grid must be positive and strictly decreasing".into()));
    }
    let cone = strata::tangent_cone_pieces(shape, x0)?;
    let n = shape.dim();
    let h = opts.h.unwrap_or(if n <= 2 { opts.r / 128.0 } else { opts.r / 24.0 });
    let mut hausdorff = Vec::with_capacity(rho_grid.len());
    let mut symdiff = Vec::with_capacity(rho_grid.len());
    let mut symdiff_stderr = Vec::with_capacity(rho_grid.len());
    let mut error = 0.0;
    for &rho in rho_grid {
        let a = shape.rescale(x0, rho)?;
        let hd = hausdorff_distance_windowed(&a, &cone, opts.r, h)?;
        error = hd.error;
        hausdorff.push(hd.value);
        let (s, se) = symdiff_measure_mc(&a, &cone, opts.r, opts.samples, opts.seed, exec)?;
        symdiff.push(s);
        symdiff_stderr.push(se);
    }
    let reach = shape.reach();
    Ok(ConvergenceTable {
        x0: x0.to_vec(),
        rho_grid: rho_grid.to_vec(),
        r: opts.r,
        hausdorff,
        hausdorff_error: error,
        symdiff,
        symdiff_stderr,
        cone,
        reach,
        zero_reach: reach == 0.0,
    })
}

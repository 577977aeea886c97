//! Gaussian integrals `∫_P φ(y) N(y; z, σ²I) dy` over boxes (closed form)
//! and over convex polygons/polyhedra (slicing with a closed-form innermost
//! coordinate).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::quad::{self, Tolerance};
use crate::real::{erf_diff, Real, SQRT_PI};
use crate::testfn::TestFunction;
use crate::vector::Point;

const SQRT_2: f64 = core::f64::consts::SQRT_2;
// Gaussian mass beyond 12σ is below 1e-32
const CLIP: f64 = 12.0;

/// `∫ w(y) {1, y, y², b(y)} dy` for one coordinate's weight `w`, where `b`
/// is the bump factor of a Gaussian-bump test function.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Weights {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub bump: f64,
}

fn std_pdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (SQRT_2 * SQRT_PI)
}

/// Bump center and width along one coordinate, if φ is a bump.
pub(crate) fn bump_axis(phi: &TestFunction, i: usize) -> Option<(f64, f64)> {
    match phi {
        TestFunction::GaussianBump { center, width, .. } => Some((center[i], *width)),
        _ => None,
    }
}

/// Moments of the `N(z, σ²)` density over `[a, b]`.
pub(crate) fn interval_gauss(a: f64, b: f64, z: f64, sigma: f64, bump: Option<(f64, f64)>) -> Weights {
    if !(b > a) {
        return Weights::default();
    }
    let u = (a - z) / sigma;
    let v = (b - z) / sigma;
    let m0 = 0.5 * erf_diff(u / SQRT_2, v / SQRT_2);
    let (pu, pv) = (if u.is_finite() { std_pdf(u) } else { 0.0 }, if v.is_finite() { std_pdf(v) } else { 0.0 });
    let (upu, vpv) = (if u.is_finite() { u * pu } else { 0.0 }, if v.is_finite() { v * pv } else { 0.0 });
    let e1 = pu - pv;
    let e2 = m0 + upu - vpv;
    let m1 = z * m0 + sigma * e1;
    let m2 = z * z * m0 + 2.0 * z * sigma * e1 + sigma * sigma * e2;
    let bump = match bump {
        None => 0.0,
        Some((c, w)) => {
            let s2 = sigma * sigma + w * w;
            let mu = (z * w * w + c * sigma * sigma) / s2;
            let s = sigma * w / s2.sqrt();
            let amp = (w / s2.sqrt()) * (-(z - c) * (z - c) / (2.0 * s2)).exp();
            amp * 0.5 * erf_diff((a - mu) / (s * SQRT_2), (b - mu) / (s * SQRT_2))
        }
    };
    Weights { m0, m1, m2, bump }
}

/// `∫ φ(y) Π_i w_i(y_i) dy` for separable weights given by their moments.
pub(crate) fn combine(phi: &TestFunction, w: &[Weights]) -> f64 {
    let n = w.len();
    let prod_except = |skip: &[usize]| -> f64 {
        (0..n).filter(|i| !skip.contains(i)).map(|i| w[i].m0).product()
    };
    match phi {
        TestFunction::Constant { c } => c * prod_except(&[]),
        TestFunction::Linear { v, c } => {
            c * prod_except(&[]) + (0..n).map(|i| v[i] * w[i].m1 * prod_except(&[i])).sum::<f64>()
        }
        TestFunction::Quadratic { a, v, c } => {
            let mut s = c * prod_except(&[]);
            for i in 0..n {
                s += v[i] * w[i].m1 * prod_except(&[i]);
                s += 0.5 * a[i * n + i] * w[i].m2 * prod_except(&[i]);
                for j in 0..n {
                    if j != i {
                        s += 0.5 * a[i * n + j] * w[i].m1 * w[j].m1 * prod_except(&[i, j]);
                    }
                }
            }
            s
        }
        TestFunction::GaussianBump { amplitude, .. } => amplitude * w.iter().map(|x| x.bump).product::<f64>(),
    }
}

/// The polytope as an axis-aligned box `[lo, hi]`, if it is one.
pub(crate) fn as_box(p: &Polytope) -> Option<(Point, Point)> {
    let n = p.dim();
    if p.facets().len() != 2 * n || p.vertices().len() != 1 << n {
        return None;
    }
    for h in p.facets() {
        let big = h.normal.iter().filter(|x| x.abs() > 1e-12).count();
        if big != 1 {
            return None;
        }
    }
    Some(p.bounding_box())
}

/// Box fast path of [`polytope_gauss`].
pub(crate) fn box_gauss(lo: &[f64], hi: &[f64], phi: &TestFunction, z: &[f64], sigma: f64) -> f64 {
    let w: Vec<Weights> = (0..lo.len())
        .map(|i| interval_gauss(lo[i], hi[i], z[i], sigma, bump_axis(phi, i)))
        .collect();
    combine(phi, &w)
}

/// `φ` restricted to the last coordinate as `α₀ + α₁y + α₂y²` with the
/// other coordinates fixed to `prefix` (polynomial kinds only).
fn poly_in_last(phi: &TestFunction, prefix: &[f64]) -> [f64; 3] {
    let k = prefix.len();
    match phi {
        TestFunction::Constant { c } => [*c, 0.0, 0.0],
        TestFunction::Linear { v, c } => {
            let base: f64 = (0..k).map(|i| v[i] * prefix[i]).sum();
            [base + c, v[k], 0.0]
        }
        TestFunction::Quadratic { a, v, c } => {
            let n = k + 1;
            let mut a0 = *c;
            for i in 0..k {
                a0 += v[i] * prefix[i];
                for j in 0..k {
                    a0 += 0.5 * a[i * n + j] * prefix[i] * prefix[j];
                }
            }
            let a1 = v[k] + (0..k).map(|i| 0.5 * (a[i * n + k] + a[k * n + i]) * prefix[i]).sum::<f64>();
            [a0, a1, 0.5 * a[k * n + k]]
        }
        TestFunction::GaussianBump { .. } => [0.0; 3],
    }
}

fn innermost_range(p: &Polytope, prefix: &[f64]) -> Option<(f64, f64)> {
    let k = prefix.len();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let tol = 1e-12 * p.scale();
    for h in p.facets() {
        let rest = h.offset - (0..k).map(|i| h.normal[i] * prefix[i]).sum::<f64>();
        let a = h.normal[k];
        if a > 1e-14 {
            hi = hi.min(rest / a);
        } else if a < -1e-14 {
            lo = lo.max(rest / a);
        } else if rest < -tol {
            return None;
        }
    }
    (hi > lo).then_some((lo, hi))
}

/// Points of the slice `P ∩ {y₀ = c}` that bound its extent in `y₁`.
fn slice_points_3d(p: &Polytope, c: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for f in p.faces_of_dim(1) {
        let a = &p.vertices()[f.vertices[0]];
        let b = &p.vertices()[f.vertices[1]];
        let (da, db) = (a[0] - c, b[0] - c);
        if da == 0.0 {
            out.push(a[1]);
        }
        if db == 0.0 {
            out.push(b[1]);
        }
        if da * db < 0.0 {
            let s = da / (da - db);
            out.push(a[1] + s * (b[1] - a[1]));
        }
    }
    out
}

fn breaks_in(lo: f64, hi: f64, mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|x| *x > lo && *x < hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `∫_P φ(y) N(y; z, σ²I) dy` for a convex polytope in ℝ² or ℝ³.
pub(crate) fn polytope_gauss(p: &Polytope, phi: &TestFunction, z: &[f64], sigma: f64, tol: Tolerance) -> Result<f64> {
    if let Some((lo, hi)) = as_box(p) {
        return Ok(box_gauss(&lo, &hi, phi, z, sigma));
    }
    let n = p.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::Unsupported("Gaussian polytope integrals need n = 2 or 3 (or a box)".into()));
    }
    let (blo, bhi) = p.bounding_box();
    let lo0 = blo[0].max(z[0] - CLIP * sigma);
    let hi0 = bhi[0].min(z[0] + CLIP * sigma);
    if !(hi0 > lo0) {
        return Ok(0.0);
    }
    let xs: Vec<f64> = p.vertices().iter().map(|v| v[0]).collect();
    let pts = breaks_in(lo0, hi0, xs);
    let inner = tol.inner();
    let est = quad::integrate_breaks(
        |y0| {
            let d0 = std_pdf((y0 - z[0]) / sigma) / sigma;
            if d0 == 0.0 {
                return Ok(0.0);
            }
            let prefix = [y0];
            if n == 2 {
                return Ok(d0 * last_coordinate(p, phi, &prefix, z, sigma));
            }
            let ys = slice_points_3d(p, y0);
            if ys.is_empty() {
                return Ok(0.0);
            }
            let lo1 = ys.iter().copied().fold(f64::INFINITY, f64::min).max(z[1] - CLIP * sigma);
            let hi1 = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max).min(z[1] + CLIP * sigma);
            if !(hi1 > lo1) {
                return Ok(0.0);
            }
            let pts1 = breaks_in(lo1, hi1, ys);
            let e = quad::integrate_breaks(
                |y1| {
                    let d1 = std_pdf((y1 - z[1]) / sigma) / sigma;
                    Ok(d1 * last_coordinate(p, phi, &[y0, y1], z, sigma))
                },
                &pts1,
                inner,
            )?;
            Ok(d0 * e.value)
        },
        &pts,
        tol,
    )?;
    Ok(est.value)
}

/// Closed-form integral over the last coordinate (prefix fixed), without
/// the prefix density factors.
fn last_coordinate(p: &Polytope, phi: &TestFunction, prefix: &[f64], z: &[f64], sigma: f64) -> f64 {
    let k = prefix.len();
    let Some((lo, hi)) = innermost_range(p, prefix) else {
        return 0.0;
    };
    let w = interval_gauss(lo, hi, z[k], sigma, bump_axis(phi, k));
    match phi {
        TestFunction::GaussianBump {
            center,
            width,
            amplitude,
        } => {
            let d2: f64 = (0..k).map(|i| (prefix[i] - center[i]).powi(2)).sum();
            amplitude * (-d2 / (2.0 * width * width)).exp() * w.bump
        }
        _ => {
            let [a0, a1, a2] = poly_in_last(phi, prefix);
            a0 * w.m0 + a1 * w.m1 + a2 * w.m2
        }
    }
}

//! Separable erf oracle for axis-aligned boxes and separated unions of
//! boxes.

use alloc::vec;
use alloc::vec::Vec;

use super::gauss::{as_box, bump_axis, combine, Weights};
use crate::error::{Error, Result};
use crate::geometry::Shape;
use crate::quad::{self, Tolerance};
use crate::real::{erf_diff, erfc, Real, SQRT_PI};
use crate::testfn::TestFunction;
use crate::vector::Point;

/// `I_a(t) = ∫₀^a P(y + √2 t Z ∈ [0, a]) dy
///         = a·erf(a/2t) − (2t/√π)(1 − e^{−a²/4t²})`.
pub fn box_stay(a: f64, t: f64) -> f64 {
    a - box_leak(a, t)
}

/// `a − I_a(t)`, evaluated without cancellation.
pub fn box_leak(a: f64, t: f64) -> f64 {
    a * erfc(a / (2.0 * t)) - (2.0 * t / SQRT_PI) * (-(a * a) / (4.0 * t * t)).exp_m1()
}

/// Axis-aligned boxes making up the shape, if it is a box or a union of
/// boxes.
pub fn box_parts(shape: &Shape) -> Option<Vec<(Point, Point)>> {
    match shape {
        Shape::Union(u) => {
            let mut out = Vec::new();
            for p in u.parts() {
                out.extend(box_parts(p)?);
            }
            Some(out)
        }
        other => Some(vec![as_box(other.as_polytope()?.as_ref())?]),
    }
}

#[derive(Clone, Copy)]
enum Weight {
    One,
    Stay,
    Leak,
    Hit(f64, f64),
}

/// Moments over `y ∈ [a1, a2]` of one coordinate's transition weight.
fn weights(kind: Weight, a1: f64, a2: f64, t: f64, bump: Option<(f64, f64)>) -> Result<Weights> {
    let s = 2.0 * t;
    let w = |y: f64| -> f64 {
        match kind {
            Weight::One => 1.0,
            Weight::Stay => 0.5 * erf_diff((a1 - y) / s, (a2 - y) / s),
            Weight::Leak => 0.5 * (erfc((a2 - y) / s) + erfc((y - a1) / s)),
            Weight::Hit(b1, b2) => 0.5 * erf_diff((b1 - y) / s, (b2 - y) / s),
        }
    };
    if let Weight::One = kind {
        let bump = match bump {
            None => 0.0,
            Some((c, wd)) => {
                let k = wd * core::f64::consts::SQRT_2;
                wd * (SQRT_PI / core::f64::consts::SQRT_2) * erf_diff((a1 - c) / k, (a2 - c) / k)
            }
        };
        return Ok(Weights {
            m0: a2 - a1,
            m1: 0.5 * (a2 * a2 - a1 * a1),
            m2: (a2 * a2 * a2 - a1 * a1 * a1) / 3.0,
            bump,
        });
    }
    let mut pts = vec![a1, a2];
    let mut feature = |x: f64| {
        for k in [0.25, 1.0, 3.0, 8.0, 20.0] {
            pts.push(x - k * t);
            pts.push(x + k * t);
        }
        pts.push(x);
    };
    match kind {
        Weight::Hit(b1, b2) => {
            feature(b1);
            feature(b2);
        }
        _ => {
            feature(a1);
            feature(a2);
        }
    }
    if let Some((c, _)) = bump {
        pts.push(c);
    }
    pts.retain(|x| *x >= a1 && *x <= a2);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let scale = a1.abs().max(a2.abs()).max(1.0);
    let tol = Tolerance::new(1e-17 * (a2 - a1) * scale * scale, 1e-13);
    let m = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        Ok(quad::integrate_breaks(|y| Ok(w(y) * f(y)), &pts, tol)?.value)
    };
    Ok(Weights {
        m0: m(&|_| 1.0)?,
        m1: m(&|y| y)?,
        m2: m(&|y| y * y)?,
        bump: match bump {
            None => 0.0,
            Some((c, wd)) => m(&|y| (-(y - c) * (y - c) / (2.0 * wd * wd)).exp())?,
        },
    })
}

/// `f_E(t)` for one box `[lo, hi]` alone: `∫_B φ (1 − Π_l stay_l)`,
/// telescoped into nonnegative terms.
fn single_box(lo: &[f64], hi: &[f64], phi: &TestFunction, t: f64) -> Result<f64> {
    let n = lo.len();
    if let TestFunction::Constant { c } = phi {
        let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
        let log_stay: f64 = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| (-box_leak(b - a, t) / (b - a)).ln_1p())
            .sum();
        return Ok(c * vol * -log_stay.exp_m1());
    }
    let mut per = Vec::with_capacity(n);
    for i in 0..n {
        let b = bump_axis(phi, i);
        per.push([
            weights(Weight::One, lo[i], hi[i], t, b)?,
            weights(Weight::Stay, lo[i], hi[i], t, b)?,
            weights(Weight::Leak, lo[i], hi[i], t, b)?,
        ]);
    }
    let mut total = 0.0;
    for k in 0..n {
        let w: Vec<Weights> = (0..n)
            .map(|l| match l.cmp(&k) {
                core::cmp::Ordering::Less => per[l][1],
                core::cmp::Ordering::Equal => per[l][2],
                core::cmp::Ordering::Greater => per[l][0],
            })
            .collect();
        total += combine(phi, &w);
    }
    Ok(total)
}

/// `∫_{B_i} φ(y) P(y + √2 t Z ∈ B_j) dy`.
fn cross_term(bi: &(Point, Point), bj: &(Point, Point), phi: &TestFunction, t: f64) -> Result<f64> {
    let n = bi.0.len();
    let mut w = Vec::with_capacity(n);
    for l in 0..n {
        w.push(weights(Weight::Hit(bj.0[l], bj.1[l]), bi.0[l], bi.1[l], t, bump_axis(phi, l))?);
    }
    Ok(combine(phi, &w))
}

/// Exact `f_E(t)` for a box or a union of separated boxes.
pub fn box_heat_content(shape: &Shape, phi: &TestFunction, t: f64) -> Result<f64> {
    let parts = box_parts(shape)
        .ok_or_else(|| Error::Unsupported("the erf oracle needs an axis-aligned box or a union of boxes".into()))?;
    let mut f = 0.0;
    for (i, b) in parts.iter().enumerate() {
        f += single_box(&b.0, &b.1, phi, t)?;
        for (j, c) in parts.iter().enumerate() {
            if i != j {
                f -= cross_term(b, c, phi, t)?;
            }
        }
    }
    Ok(f)
}

//! Heat content `f_E(t) = ∫_E φ(y) P(y + √2 t Z ∉ E) dy` (Z standard
//! normal): Monte Carlo, exact box and ball oracles, tube quadrature,
//! truncation bounds, and the L¹/L² norm identities.

mod ball;
mod boxes;
pub(crate) mod gauss;
pub(crate) mod tube;

use alloc::string::{String, ToString};
use alloc::vec;

use rand_distr::{Distribution, StandardNormal};

pub use ball::ball_heat_content;
pub use boxes::{box_heat_content, box_leak, box_parts, box_stay};

use crate::error::{Error, Result};
use crate::geometry::{Shape, UniformSampler};
use crate::mc::{self, Executor};
use crate::quad::Tolerance;
use crate::real::{Real, SQRT_PI};
use crate::testfn::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    Mc,
    BoxExact,
    BallQuad,
    TubeQuad,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::BoxExact => "box_exact",
            Method::BallQuad => "ball_quad",
            Method::TubeQuad => "tube_quad",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "mc" => Some(Method::Mc),
            "box_exact" | "exact" => Some(Method::BoxExact),
            "ball_quad" => Some(Method::BallQuad),
            "tube_quad" | "tube" => Some(Method::TubeQuad),
            _ => None,
        }
    }
}

/// One estimate of `f_E(t)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeatSample {
    pub t: f64,
    pub estimate: f64,
    /// Monte Carlo standard error; 0 for deterministic oracles.
    pub stderr: f64,
    pub method: Method,
    pub phi_id: String,
}

/// Which Gaussian endpoints `x = y + √2 t Z ∉ E` are counted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    All,
    /// `δ_E(x) ≤ r`
    Within(f64),
    /// `δ_E(x) > r`
    Beyond(f64),
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument("t must be finite and > 0".into()));
    }
    Ok(())
}

/// Monte Carlo `f_E(t) = 𝓛ⁿ(E)·E[φ(Y) 1{Y + √2 t Z ∉ E}]` with `Y`
/// uniform on `E`.
pub fn heat_content_mc<E: Executor>(
    shape: &Shape,
    phi: &TestFunction,
    t: f64,
    samples: u64,
    seed: u64,
    exec: &E,
) -> Result<HeatSample> {
    heat_content_mc_region(shape, phi, t, samples, seed, Region::All, exec)
}

pub fn heat_content_mc_region<E: Executor>(
    shape: &Shape,
    phi: &TestFunction,
    t: f64,
    samples: u64,
    seed: u64,
    region: Region,
    exec: &E,
) -> Result<HeatSample> {
    check_t(t)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let n = shape.dim();
    phi.check_dim(n)?;
    let sampler = UniformSampler::new(shape);
    let step = core::f64::consts::SQRT_2 * t;
    let m = mc::estimate_mean(exec, samples, seed, |rng| {
        let mut y = vec![0.0; n];
        let (mut att, mut acc) = (0, 0);
        sampler.draw(rng, &mut y, &mut att, &mut acc)?;
        let mut x = y.clone();
        for xi in x.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *xi += step * z;
        }
        if shape.contains_point(&x) {
            return Ok(0.0);
        }
        let counted = match region {
            Region::All => true,
            Region::Within(r) => shape.distance_to(&x) <= r,
            Region::Beyond(r) => shape.distance_to(&x) > r,
        };
        Ok(if counted { phi.eval(&y) } else { 0.0 })
    })?;
    let vol = shape.volume();
    Ok(HeatSample {
        t,
        estimate: vol * m.mean,
        stderr: vol * m.stderr(),
        method: Method::Mc,
        phi_id: phi.to_string(),
    })
}

/// Exact `f_E(t)` for axis-aligned boxes (and separated unions of them)
/// from one-dimensional erf integrals.
pub fn heat_content_box_exact(shape: &Shape, phi: &TestFunction, t: f64) -> Result<HeatSample> {
    check_t(t)?;
    phi.check_dim(shape.dim())?;
    Ok(HeatSample {
        t,
        estimate: box_heat_content(shape, phi, t)?,
        stderr: 0.0,
        method: Method::BoxExact,
        phi_id: phi.to_string(),
    })
}

/// Quadrature oracle for a ball with constant `φ`.
pub fn heat_content_ball_quad(shape: &Shape, phi: &TestFunction, t: f64, rel_tol: f64) -> Result<HeatSample> {
    check_t(t)?;
    let Shape::Ball(b) = shape else {
        return Err(Error::Unsupported("ball quadrature needs a ball".into()));
    };
    let TestFunction::Constant { c } = phi else {
        return Err(Error::Unsupported("ball quadrature needs a constant test function".into()));
    };
    Ok(HeatSample {
        t,
        estimate: ball_heat_content(b, *c, t, rel_tol)?,
        stderr: 0.0,
        method: Method::BallQuad,
        phi_id: phi.to_string(),
    })
}

/// Tube-coordinate quadrature over `[E]_r ∖ E` for convex polytopes
/// (n ≤ 3). The neglected part beyond `r` is bounded by [`tail_bound`].
pub fn heat_content_tube(shape: &Shape, phi: &TestFunction, t: f64, r: f64, rel_tol: f64) -> Result<HeatSample> {
    check_t(t)?;
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("truncation radius must be > 0".into()));
    }
    if r >= shape.reach() {
        return Err(Error::BeyondReach { r, reach: shape.reach() });
    }
    phi.check_dim(shape.dim())?;
    let p = shape
        .as_polytope()
        .ok_or_else(|| Error::Unsupported("tube quadrature needs a convex polytope".into()))?;
    let (lo, hi) = shape.bounding_box();
    let scale = phi.sup_norm_on(&lo, &hi).max(1e-300) * shape.perimeter() * t / SQRT_PI;
    let tol = Tolerance::new(rel_tol * scale, rel_tol);
    Ok(HeatSample {
        t,
        estimate: tube::tube_heat_content(&p, phi, t, r, tol)?,
        stderr: 0.0,
        method: Method::TubeQuad,
        phi_id: phi.to_string(),
    })
}

/// `2^{n/2} ‖φ‖_∞ e^{−r²/8t²} 𝓛ⁿ(E)`, bounding the heat reaching
/// `E^c ∖ [E]_r`.
pub fn tail_bound(shape: &Shape, phi: &TestFunction, t: f64, r: f64) -> Result<f64> {
    check_t(t)?;
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("r must be > 0".into()));
    }
    let n = shape.dim() as f64;
    let (lo, hi) = shape.bounding_box();
    Ok(2f64.powf(n / 2.0) * phi.sup_norm_on(&lo, &hi) * (-(r * r) / (8.0 * t * t)).exp() * shape.volume())
}

/// Truncation radius making [`tail_bound`] at most `10⁻³` of the
/// first-order term `t ‖φ‖_∞ P(E)/√π`.
pub fn default_truncation(shape: &Shape, phi: &TestFunction, t: f64) -> f64 {
    truncation_for(shape, phi, t, 1e-3)
}

/// Truncation radius making [`tail_bound`] at most `rel` times the
/// first-order term.
pub fn truncation_for(shape: &Shape, phi: &TestFunction, t: f64, rel: f64) -> f64 {
    let n = shape.dim() as f64;
    let (lo, hi) = shape.bounding_box();
    let sup = phi.sup_norm_on(&lo, &hi).max(1e-300);
    let first = rel * t * sup * shape.perimeter() / SQRT_PI;
    let ratio = 2f64.powf(n / 2.0) * sup * shape.volume() / first;
    t * (8.0 * ratio.max(1.0).ln()).sqrt()
}

/// `‖T_t 𝟙_E‖²_{L²}` and `‖T_t 𝟙_E − 𝟙_E‖_{L¹}` at semigroup time `t`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeatNorms {
    pub t: f64,
    pub l2_sq: f64,
    pub l2_sq_stderr: f64,
    pub l1: f64,
    pub l1_stderr: f64,
    pub method: Method,
}

/// Semigroup time `s` corresponds to `f_E(√s)`: `K_s(E, E^c) = f_E(√s)`
/// with `φ ≡ 1`. Then `l2_sq = 𝓛ⁿ(E) − K_{2s}` and `l1 = 2K_s`; boxes use
/// the erf oracle, other shapes Monte Carlo.
pub fn heat_norms<E: Executor>(shape: &Shape, t: f64, samples: u64, seed: u64, exec: &E) -> Result<HeatNorms> {
    check_t(t)?;
    let one = TestFunction::one();
    let (k1, k2) = if box_parts(shape).is_some() {
        (heat_content_box_exact(shape, &one, t.sqrt())?, heat_content_box_exact(shape, &one, (2.0 * t).sqrt())?)
    } else {
        (
            heat_content_mc(shape, &one, t.sqrt(), samples, seed, exec)?,
            heat_content_mc(shape, &one, (2.0 * t).sqrt(), samples, seed.wrapping_add(1), exec)?,
        )
    };
    Ok(HeatNorms {
        t,
        l2_sq: shape.volume() - k2.estimate,
        l2_sq_stderr: k2.stderr,
        l1: 2.0 * k1.estimate,
        l1_stderr: 2.0 * k1.stderr,
        method: k1.method,
    })
}

/// Settings shared by the estimators behind [`heat_content`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeatOptions {
    pub samples: u64,
    pub seed: u64,
    /// Relative tolerance of the quadrature oracles.
    pub rel_tol: f64,
    /// Tube truncation radius; `None` uses [`default_truncation`].
    pub truncation: Option<f64>,
}

impl Default for HeatOptions {
    fn default() -> Self {
        HeatOptions {
            samples: 1_000_000,
            seed: 0,
            rel_tol: 1e-10,
            truncation: None,
        }
    }
}

/// The most accurate estimator available for `(shape, φ)`.
pub fn auto_method(shape: &Shape, phi: &TestFunction) -> Method {
    if box_parts(shape).is_some() {
        return Method::BoxExact;
    }
    match shape {
        Shape::Ball(_) if phi.is_constant() => Method::BallQuad,
        _ if shape.dim() <= 3 && shape.as_polytope().is_some() => Method::TubeQuad,
        _ => Method::Mc,
    }
}

/// `f_E(t)` with the requested estimator.
pub fn heat_content<E: Executor>(
    shape: &Shape,
    phi: &TestFunction,
    t: f64,
    method: Method,
    opts: &HeatOptions,
    exec: &E,
) -> Result<HeatSample> {
    match method {
        Method::Mc => heat_content_mc(shape, phi, t, opts.samples, opts.seed, exec),
        Method::BoxExact => heat_content_box_exact(shape, phi, t),
        Method::BallQuad => heat_content_ball_quad(shape, phi, t, opts.rel_tol),
        Method::TubeQuad => {
            let r = opts.truncation.unwrap_or_else(|| default_truncation(shape, phi, t));
            heat_content_tube(shape, phi, t, r, opts.rel_tol)
        }
    }
}

#[cfg(test)]
mod tests;

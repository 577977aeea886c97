//! Second-order heat-content expansion
//! `f_E(t) = a₁t + a₂t² + o(t²)`: the analytic coefficients of the
//! conjectured formula, coefficient extraction from heat samples, and a
//! report comparing the two.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::boundary::{boundary_integral, ridge_integral};
use crate::error::{Error, Result};
use crate::geometry::Shape;
use crate::heat::{self, box_parts, HeatOptions, HeatSample, Method};
use crate::linalg::{self, Weighting};
use crate::mc::Executor;
use crate::quad::{self, Tolerance};
use crate::real::{erfc, Real, PI, SQRT_PI};
use crate::testfn::TestFunction;
use crate::vector::dot;

/// Sign convention for principal curvatures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Convention {
    /// Hessian of the local graph over the tangent plane with `E` below:
    /// curvatures are ≤ 0 on convex bodies.
    #[default]
    Graph,
    /// Normal-bundle curvatures: ≥ 0 on convex bodies.
    Bundle,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::Graph => "graph",
            Convention::Bundle => "bundle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "graph" => Some(Convention::Graph),
            "bundle" => Some(Convention::Bundle),
            _ => None,
        }
    }

    fn sign(&self) -> f64 {
        match self {
            Convention::Graph => -1.0,
            Convention::Bundle => 1.0,
        }
    }
}

/// Terms of `a₁t + [a2_smooth + a2_gradient + a2_corner] t²`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpansionCoefficients {
    pub a1: f64,
    /// `α ∫ H_E φ`
    pub a2_smooth: f64,
    /// `−∫ ⟨∇φ, ν⟩`
    pub a2_gradient: f64,
    /// `∫_{Σ_{n−2}} c φ`
    pub a2_corner: f64,
    pub alpha_used: f64,
    pub convention: Convention,
}

impl ExpansionCoefficients {
    pub fn a2(&self) -> f64 {
        self.a2_smooth + self.a2_gradient + self.a2_corner
    }
}

fn tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-11)
}

/// `α_n = 2^{n−2} π^{(n−1)/2} (n−1)`.
pub fn published_alpha(n: usize) -> f64 {
    let n = n as f64;
    2f64.powf(n - 2.0) * PI.powf((n - 1.0) / 2.0) * (n - 1.0)
}

/// `(1/√π) ∫_{𝓕E} φ dH^{n−1}`.
pub fn first_order_coeff(shape: &Shape, phi: &TestFunction) -> Result<f64> {
    phi.check_dim(shape.dim())?;
    Ok(boundary_integral(shape, &|x: &[f64], _: &[f64], _| phi.eval(x), tol())? / SQRT_PI)
}

/// `−∫_{𝓕E} ⟨∇φ, ν_E⟩ dH^{n−1}`.
pub fn gradient_term(shape: &Shape, phi: &TestFunction) -> Result<f64> {
    phi.check_dim(shape.dim())?;
    if phi.is_constant() {
        return Ok(0.0);
    }
    Ok(-boundary_integral(shape, &|x: &[f64], nu: &[f64], _| dot(&phi.gradient(x), nu), tol())?)
}

/// `−∫_E Δφ` for polynomial `φ` (constant Laplacian); `None` otherwise.
pub fn laplacian_integral(shape: &Shape, phi: &TestFunction) -> Option<f64> {
    match phi {
        TestFunction::GaussianBump { .. } => None,
        _ => Some(-phi.laplacian(&alloc::vec![0.0; shape.dim()]) * shape.volume()),
    }
}

/// `∫_{𝓕E} H_E φ dH^{n−1}` with curvatures signed by `convention`.
pub fn curvature_integral(shape: &Shape, phi: &TestFunction, convention: Convention) -> Result<f64> {
    phi.check_dim(shape.dim())?;
    let v = boundary_integral(
        shape,
        &|x: &[f64], _: &[f64], h: f64| if h == 0.0 { 0.0 } else { h * phi.eval(x) },
        tol(),
    )?;
    Ok(convention.sign() * v)
}

/// `α ∫_{𝓕E} H_E φ dH^{n−1}`.
pub fn mean_curvature_term(shape: &Shape, phi: &TestFunction, alpha: f64, convention: Convention) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument("alpha must be finite".into()));
    }
    Ok(alpha * curvature_integral(shape, phi, convention)?)
}

fn erfcx(x: f64) -> f64 {
    (x * x).exp() * erfc(x)
}

/// `e^{ρ²/4} ∫ e^{−‖w−y‖²/4} dw` over a half-line direction at distance
/// `x = |⟨y, ω⟩|/2`, integrated radially: `2 − 2√π x e^{x²} erfc(x)`.
fn ray_profile(x: f64) -> f64 {
    2.0 - 2.0 * SQRT_PI * x * erfcx(x)
}

const WEDGE_RHO_MAX: f64 = 24.0;

/// `J(θ)/(4π)`, where `J(θ) = ∫_{N₂} ‖y‖ ∫_{T₂} e^{−‖w−y‖²/4} dw dy` for
/// the planar wedge `T₂` of opening `θ` and its dual `N₂`.
pub fn wedge_coefficient(theta: f64) -> Result<f64> {
    Ok(wedge_j(theta)? / (4.0 * PI))
}

fn wedge_j(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidArgument(format!("wedge angle {theta} outside (0, π)")));
    }
    // w at angle φ ∈ [0, θ], y at angle ψ ∈ [θ + π/2, 3π/2]; only δ = ψ − φ
    // matters, with multiplicity λ(δ)
    let lambda = |d: f64| {
        let lo = (theta + PI / 2.0 - d).max(0.0);
        let hi = theta.min(1.5 * PI - d);
        (hi - lo).max(0.0)
    };
    let mut kinks = alloc::vec![PI / 2.0, theta + PI / 2.0, 1.5 * PI - theta, 1.5 * PI];
    kinks.sort_by(f64::total_cmp);
    kinks.dedup();
    let t = Tolerance::new(1e-14, 1e-12);
    let inner = t.inner();
    let e = quad::integrate_breaks(
        |rho| {
            if rho == 0.0 {
                return Ok(0.0);
            }
            let a = quad::integrate_breaks(|d| Ok(lambda(d) * ray_profile(-rho * d.cos() / 2.0)), &kinks, inner)?;
            Ok(rho * rho * (-rho * rho / 4.0).exp() * a.value)
        },
        &[0.0, 1.0, 2.0, 4.0, 8.0, 16.0, WEDGE_RHO_MAX],
        t,
    )?;
    Ok(e.value)
}

/// The wedge coefficient evaluated with the full ambient normalization
/// `(4π)^{−n/2}` and the edge-parallel Gaussian integrals done numerically.
pub fn wedge_coefficient_in(theta: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument("wedges live in dimension ≥ 2".into()));
    }
    let line = quad::integrate_breaks(|s| Ok((-s * s / 4.0).exp()), &[-60.0, -8.0, 0.0, 8.0, 60.0], tol())?.value;
    Ok(wedge_j(theta)? * line.powi(n as i32 - 2) / (4.0 * PI).powf(n as f64 / 2.0))
}

/// `¼ ∫₀^∞∫₀^∞ √(s²+u²) erfc(s/2) erfc(u/2) ds du`, the right-angle wedge
/// coefficient by an independent reduction.
pub fn quarter_plane_coefficient() -> Result<f64> {
    let pts = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0];
    let t = Tolerance::new(1e-14, 1e-12);
    let inner = t.inner();
    let e = quad::integrate_breaks(
        |s| {
            let es = erfc(s / 2.0);
            let a = quad::integrate_breaks(|u| Ok(s.hypot(u) * erfc(u / 2.0)), &pts, inner)?;
            Ok(es * a.value)
        },
        &pts,
        t,
    )?;
    Ok(e.value / 4.0)
}

/// `Σ_F c(θ_F) ∫_F φ dH^{n−2}` over the codimension-two strata.
pub fn corner_term(shape: &Shape, phi: &TestFunction) -> Result<f64> {
    phi.check_dim(shape.dim())?;
    let cache: RefCell<Vec<(f64, f64)>> = RefCell::new(Vec::new());
    ridge_integral(
        shape,
        &|x: &[f64], theta: f64| {
            let known = cache.borrow().iter().find(|(a, _)| *a == theta).map(|(_, c)| *c);
            let c = match known {
                Some(c) => c,
                None => {
                    let c = wedge_coefficient(theta)?;
                    cache.borrow_mut().push((theta, c));
                    c
                }
            };
            Ok(c * phi.eval(x))
        },
        tol(),
    )
}

/// `∫_{Σ_{n−2}} φ dH^{n−2}`.
pub fn ridge_measure(shape: &Shape, phi: &TestFunction) -> Result<f64> {
    phi.check_dim(shape.dim())?;
    ridge_integral(shape, &|x: &[f64], _| Ok(phi.eval(x)), tol())
}

/// All analytic coefficients; `alpha = None` uses [`published_alpha`].
pub fn analytic_coefficients(
    shape: &Shape,
    phi: &TestFunction,
    alpha: Option<f64>,
    convention: Convention,
) -> Result<ExpansionCoefficients> {
    let alpha = alpha.unwrap_or_else(|| published_alpha(shape.dim()));
    Ok(ExpansionCoefficients {
        a1: first_order_coeff(shape, phi)?,
        a2_smooth: mean_curvature_term(shape, phi, alpha, convention)?,
        a2_gradient: gradient_term(shape, phi)?,
        a2_corner: corner_term(shape, phi)?,
        alpha_used: alpha,
        convention,
    })
}

/// Options for [`fit_expansion_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitOptions {
    pub degree: usize,
    /// Adds a `t^{degree+1}` column absorbing the remainder.
    pub nuisance: bool,
    /// Samples above this time are rejected.
    pub t_max: Option<f64>,
    pub max_condition: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            degree: 2,
            nuisance: true,
            t_max: None,
            max_condition: 1e12,
        }
    }
}

/// Least-squares fit of `f(t) ≈ Σ_k a_k t^k` through the origin.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpansionFit {
    /// `a₁ … a_degree`, then the nuisance coefficient if fitted.
    pub coefficients: Vec<f64>,
    /// Row-major covariance of `coefficients`.
    pub covariance: Vec<f64>,
    pub degree: usize,
    pub nuisance: bool,
    pub weighted: bool,
    pub condition: f64,
    /// `log₂(t_max / t_min)` of the grid.
    pub octaves: f64,
    /// Set when the grid spans fewer than two dyadic octaves.
    pub unreliable: bool,
}

impl ExpansionFit {
    /// Coefficient of `t^k`, `k ≥ 1`.
    pub fn a(&self, k: usize) -> f64 {
        self.coefficients[k - 1]
    }

    pub fn stderr(&self, k: usize) -> f64 {
        let p = self.coefficients.len();
        self.covariance[(k - 1) * p + k - 1].max(0.0).sqrt()
    }

    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.covariance[(i - 1) * self.coefficients.len() + j - 1]
    }
}

pub fn fit_expansion(samples: &[HeatSample], degree: usize, with_nuisance: bool) -> Result<ExpansionFit> {
    fit_expansion_with(
        samples,
        &FitOptions {
            degree,
            nuisance: with_nuisance,
            ..FitOptions::default()
        },
    )
}

pub fn fit_expansion_with(samples: &[HeatSample], opts: &FitOptions) -> Result<ExpansionFit> {
    if opts.degree == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    for s in samples {
        if !(s.t > 0.0) || !s.t.is_finite() || !s.estimate.is_finite() {
            return Err(Error::InvalidArgument(format!("bad sample at t = {}", s.t)));
        }
        if let Some(m) = opts.t_max {
            if s.t > m {
                return Err(Error::InvalidArgument(format!("t = {} exceeds t_max = {m}", s.t)));
            }
        }
    }
    let p = opts.degree + opts.nuisance as usize;
    let mut ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < p.max(opts.degree + 1) {
        return Err(Error::SingularDesign(format!(
            "{} distinct times for {p} coefficients",
            ts.len()
        )));
    }
    let octaves = (ts[ts.len() - 1] / ts[0]).log2();
    let weighted = samples.iter().all(|s| s.stderr > 0.0);
    let design: Vec<Vec<f64>> = samples.iter().map(|s| (1..=p).map(|k| s.t.powi(k as i32)).collect()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.estimate).collect();
    let sigma: Vec<f64> = samples.iter().map(|s| s.stderr).collect();
    let w = if weighted {
        Weighting::InverseVariance
    } else {
        Weighting::Unweighted
    };
    let ls = linalg::least_squares(&design, &y, &sigma, w, opts.max_condition)?;
    Ok(ExpansionFit {
        coefficients: ls.coefficients,
        covariance: ls.covariance,
        degree: opts.degree,
        nuisance: opts.nuisance,
        weighted,
        condition: ls.condition,
        octaves,
        unreliable: octaves < 2.0,
    })
}

/// 8 dyadic times ending at `0.1 · inradius`, increasing.
pub fn default_t_grid(shape: &Shape) -> Vec<f64> {
    let top = 0.1 * shape.inradius();
    (0..8).rev().map(|j| top / 2f64.powi(j)).collect()
}

/// Estimator settings for [`compare_report`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorConfig {
    /// `None` picks [`heat::auto_method`].
    pub method: Option<Method>,
    pub heat: HeatOptions,
    /// `None` uses [`published_alpha`].
    pub alpha: Option<f64>,
    pub convention: Convention,
    pub fit: FitOptions,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            method: None,
            heat: HeatOptions::default(),
            alpha: None,
            convention: Convention::Graph,
            fit: FitOptions::default(),
        }
    }
}

/// `(a₁, a₂)` with their covariance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FittedCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a1_stderr: f64,
    pub a2_stderr: f64,
    pub cov_a1_a2: f64,
    pub fit: ExpansionFit,
}

impl FittedCoefficients {
    fn from_fit(fit: ExpansionFit) -> Result<Self> {
        if fit.degree < 2 {
            return Err(Error::InvalidArgument("the report needs a fit of degree ≥ 2".into()));
        }
        Ok(FittedCoefficients {
            a1: fit.a(1),
            a2: fit.a(2),
            a1_stderr: fit.stderr(1),
            a2_stderr: fit.stderr(2),
            cov_a1_a2: fit.cov(1, 2),
            fit,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a1_stderr: f64,
    pub a2_stderr: f64,
    pub source: String,
}

/// A value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Measured {
    pub value: f64,
    pub stderr: f64,
}

/// A disagreement beyond five combined standard errors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Flag {
    pub quantity: String,
    pub expected_label: String,
    pub expected: f64,
    pub observed_label: String,
    pub observed: f64,
    pub difference: f64,
    /// Combined standard error (with a numerical floor).
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExpansionReport {
    pub dim: usize,
    pub phi: TestFunction,
    pub samples: Vec<HeatSample>,
    pub analytic: ExpansionCoefficients,
    pub fitted: FittedCoefficients,
    pub oracle: Option<OracleCoefficients>,
    pub published_alpha: f64,
    /// `∫ H_E φ` in the report's convention.
    pub curvature_integral: f64,
    /// `∫_{Σ_{n−2}} φ`.
    pub ridge_measure: f64,
    /// `(fitted a₂ − a2_gradient − a2_corner) / ∫ H_E φ`.
    pub implied_alpha: Option<Measured>,
    /// `(fitted a₂ − a2_gradient − a2_smooth) / ∫_{Σ_{n−2}} φ`.
    pub implied_corner: Option<Measured>,
    /// `a2_corner / ∫_{Σ_{n−2}} φ`.
    pub analytic_corner: Option<f64>,
    pub flags: Vec<Flag>,
    pub unreliable: bool,
}

const FLAG_SIGMAS: f64 = 5.0;

fn check(
    flags: &mut Vec<Flag>,
    quantity: &str,
    expected: (&str, f64, f64),
    observed: (&str, f64, f64),
) {
    let floor = 1e-6 * expected.1.abs().max(observed.1.abs()).max(1.0);
    let sigma = (expected.2 * expected.2 + observed.2 * observed.2 + floor * floor).sqrt();
    let difference = observed.1 - expected.1;
    if !(difference.abs() <= FLAG_SIGMAS * sigma) {
        flags.push(Flag {
            quantity: quantity.to_string(),
            expected_label: expected.0.to_string(),
            expected: expected.1,
            observed_label: observed.0.to_string(),
            observed: observed.1,
            difference,
            sigma,
        });
    }
}

/// Closed-form Taylor coefficients of the box oracle for constant `φ = c`:
/// each box contributes `c·vol·(Σ d_i − Σ_{i<j} d_i d_j + …)` with
/// `d_i = 2t/(a_i√π)`.
fn box_taylor(parts: &[(Vec<f64>, Vec<f64>)], c: f64) -> (f64, f64) {
    let (mut a1, mut a2) = (0.0, 0.0);
    for (lo, hi) in parts {
        let sides: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
        let vol: f64 = sides.iter().product();
        let d: Vec<f64> = sides.iter().map(|a| 2.0 / (a * SQRT_PI)).collect();
        a1 += c * vol * d.iter().sum::<f64>();
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                a2 -= c * vol * d[i] * d[j];
            }
        }
    }
    (a1, a2)
}

/// Samples `f_E` on `t_grid` and compares the fit with the analytic
/// coefficients. MC samples at grid index `j` use seed `seed + j`.
pub fn compare_report<E: Executor>(
    shape: &Shape,
    phi: &TestFunction,
    t_grid: &[f64],
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<ExpansionReport> {
    let samples = sample_grid(shape, phi, t_grid, cfg, exec)?;
    report_from_samples(shape, phi, samples, cfg, exec)
}

// the default tube truncation leaves an O(t²) bias that would alias into a₂
const FIT_TRUNCATION: f64 = 1e-12;

/// Heat samples on a grid with the configured estimator.
pub fn sample_grid<E: Executor>(
    shape: &Shape,
    phi: &TestFunction,
    t_grid: &[f64],
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<Vec<HeatSample>> {
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("t grid must be positive and strictly increasing".into()));
    }
    let method = cfg.method.unwrap_or_else(|| heat::auto_method(shape, phi));
    t_grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let truncation = match (method, cfg.heat.truncation) {
                (Method::TubeQuad, None) => Some(heat::truncation_for(shape, phi, t, FIT_TRUNCATION)),
                (_, r) => r,
            };
            let opts = HeatOptions {
                seed: cfg.heat.seed.wrapping_add(j as u64),
                truncation,
                ..cfg.heat
            };
            heat::heat_content(shape, phi, t, method, &opts, exec)
        })
        .collect()
}

/// Builds the report from precomputed samples (e.g. read back from CSV).
pub fn report_from_samples<E: Executor>(
    shape: &Shape,
    phi: &TestFunction,
    samples: Vec<HeatSample>,
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<ExpansionReport> {
    let n = shape.dim();
    phi.check_dim(n)?;
    let analytic = analytic_coefficients(shape, phi, cfg.alpha, cfg.convention)?;
    let fitted = FittedCoefficients::from_fit(fit_expansion_with(&samples, &cfg.fit)?)?;
    let curvature = curvature_integral(shape, phi, cfg.convention)?;
    let ridge = ridge_measure(shape, phi)?;

    let oracle = oracle_coefficients(shape, phi, &samples, cfg, exec)?;

    let mut flags = Vec::new();
    check(
        &mut flags,
        "a1",
        ("analytic a1", analytic.a1, 0.0),
        ("fitted a1", fitted.a1, fitted.a1_stderr),
    );
    check(
        &mut flags,
        "a2",
        ("analytic a2", analytic.a2(), 0.0),
        ("fitted a2", fitted.a2, fitted.a2_stderr),
    );
    let implied_alpha = if curvature.abs() > 1e-12 {
        let m = Measured {
            value: (fitted.a2 - analytic.a2_gradient - analytic.a2_corner) / curvature,
            stderr: fitted.a2_stderr / curvature.abs(),
        };
        check(
            &mut flags,
            "alpha",
            ("alpha used", analytic.alpha_used, 0.0),
            ("implied alpha", m.value, m.stderr),
        );
        Some(m)
    } else {
        None
    };
    let (implied_corner, analytic_corner) = if ridge.abs() > 1e-12 {
        let m = Measured {
            value: (fitted.a2 - analytic.a2_gradient - analytic.a2_smooth) / ridge,
            stderr: fitted.a2_stderr / ridge.abs(),
        };
        let c = analytic.a2_corner / ridge;
        check(
            &mut flags,
            "corner coefficient",
            ("analytic corner coefficient", c, 0.0),
            ("implied corner coefficient", m.value, m.stderr),
        );
        (Some(m), Some(c))
    } else {
        (None, None)
    };
    if let Some(o) = &oracle {
        check(
            &mut flags,
            "oracle a1",
            ("oracle a1", o.a1, o.a1_stderr),
            ("fitted a1", fitted.a1, fitted.a1_stderr),
        );
        check(
            &mut flags,
            "oracle a2",
            ("oracle a2", o.a2, o.a2_stderr),
            ("fitted a2", fitted.a2, fitted.a2_stderr),
        );
    }
    let unreliable = fitted.fit.unreliable;
    Ok(ExpansionReport {
        dim: n,
        phi: phi.clone(),
        samples,
        analytic,
        fitted,
        oracle,
        published_alpha: published_alpha(n),
        curvature_integral: curvature,
        ridge_measure: ridge,
        implied_alpha,
        implied_corner,
        analytic_corner,
        flags,
        unreliable,
    })
}

fn oracle_coefficients<E: Executor>(
    shape: &Shape,
    phi: &TestFunction,
    samples: &[HeatSample],
    cfg: &EstimatorConfig,
    exec: &E,
) -> Result<Option<OracleCoefficients>> {
    if let (Some(parts), TestFunction::Constant { c }) = (box_parts(shape), phi) {
        let (a1, a2) = box_taylor(&parts, *c);
        return Ok(Some(OracleCoefficients {
            a1,
            a2,
            a1_stderr: 0.0,
            a2_stderr: 0.0,
            source: "box_taylor".into(),
        }));
    }
    let method = if box_parts(shape).is_some() {
        Method::BoxExact
    } else if matches!(shape, Shape::Ball(_)) && phi.is_constant() {
        Method::BallQuad
    } else {
        return Ok(None);
    };
    let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let exact = if samples.iter().all(|s| s.method == method) {
        samples.to_vec()
    } else {
        let c = EstimatorConfig {
            method: Some(method),
            ..cfg.clone()
        };
        let mut ts = ts;
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        sample_grid(shape, phi, &ts, &c, exec)?
    };
    let f = FittedCoefficients::from_fit(fit_expansion_with(&exact, &cfg.fit)?)?;
    Ok(Some(OracleCoefficients {
        a1: f.a1,
        a2: f.a2,
        a1_stderr: f.a1_stderr,
        a2_stderr: f.a2_stderr,
        source: method.as_str().to_string(),
    }))
}

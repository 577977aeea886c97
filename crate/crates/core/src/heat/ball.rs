//! Radial–angular quadrature oracle for balls.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Ball;
use crate::quad::{self, Tolerance};
use crate::real::{gamma, gamma_q_half, unit_ball_volume, Real, SQRT_PI};

/// `f_E(t)` for a ball and constant `φ = c`:
/// `c·nω_n ∫₀^R ρ^{n−1} P(‖y + √2 t Z‖ > R | ‖y‖ = ρ) dρ`, where the exit
/// probability averages `Q(n/2, s(θ)²/4t²)` over the direction angle θ to
/// the outward radius, with exit distance `s(θ) = −ρcosθ + √(R² − ρ²sin²θ)`.
pub fn ball_heat_content(ball: &Ball, c: f64, t: f64, rel_tol: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("t must be > 0".into()));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be > 0".into()));
    }
    let n = ball.center.len();
    let r = ball.radius;
    // ∫₀^π sin^{n−2}θ dθ
    let sphere_norm = SQRT_PI * gamma((n as f64 - 1.0) / 2.0) / gamma(n as f64 / 2.0);
    let exit = |rho: f64| -> Result<f64> {
        let mut pts: Vec<f64> = Vec::new();
        pts.push(0.0);
        let base = (t / r).sqrt();
        for k in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let th = k * base;
            if th < core::f64::consts::PI {
                pts.push(th);
            }
        }
        pts.push(core::f64::consts::PI);
        let e = quad::integrate_breaks(
            |th| {
                let (s_th, c_th) = (th.sin(), th.cos());
                let root = (r * r - rho * rho * s_th * s_th).max(0.0).sqrt();
                // −ρcosθ + root, rationalized where the two terms cancel
                let s = if c_th > 0.0 {
                    (r * r - rho * rho) / (rho * c_th + root)
                } else {
                    -rho * c_th + root
                };
                Ok(gamma_q_half(n, s * s / (4.0 * t * t)) * s_th.powi(n as i32 - 2))
            },
            &pts,
            Tolerance::new(1e-300, rel_tol * 0.01),
        )?;
        Ok(e.value / sphere_norm)
    };
    // the exit probability is below e^{−400} deeper than 40t
    let lo = (r - 40.0 * t).max(0.0);
    let mut pts = alloc::vec![lo];
    for k in [20.0, 10.0, 5.0, 2.0, 1.0, 0.5, 0.25] {
        let x = r - k * t;
        if x > lo {
            pts.push(x);
        }
    }
    pts.push(r);
    let e = quad::integrate_breaks(
        |rho| Ok(rho.powi(n as i32 - 1) * exit(rho)?),
        &pts,
        Tolerance::new(1e-300, rel_tol),
    )?;
    Ok(c * n as f64 * unit_ball_volume(n) * e.value)
}

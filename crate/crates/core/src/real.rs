//! `f64` math for a `no_std` build, backed by `libm`.

/// Elementary functions on `f64` that `core` does not provide.
pub trait Real: Copy {
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn log2(self) -> Self;
    fn ln_1p(self) -> Self;
    fn exp_m1(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, p: Self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn acos(self) -> Self;
    fn atan2(self, other: Self) -> Self;
    fn hypot(self, other: Self) -> Self;
    fn floor(self) -> Self;
    fn ceil(self) -> Self;
    fn round(self) -> Self;
}

impl Real for f64 {
    #[inline]
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline]
    fn exp(self) -> f64 {
        libm::exp(self)
    }
    #[inline]
    fn ln(self) -> f64 {
        libm::log(self)
    }
    #[inline]
    fn log2(self) -> f64 {
        libm::log2(self)
    }
    #[inline]
    fn ln_1p(self) -> f64 {
        libm::log1p(self)
    }
    #[inline]
    fn exp_m1(self) -> f64 {
        libm::expm1(self)
    }
    #[inline]
    fn powi(self, n: i32) -> f64 {
        let mut base = if n < 0 { 1.0 / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = 1.0;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    #[inline]
    fn powf(self, p: f64) -> f64 {
        libm::pow(self, p)
    }
    #[inline]
    fn sin(self) -> f64 {
        libm::sin(self)
    }
    #[inline]
    fn cos(self) -> f64 {
        libm::cos(self)
    }
    #[inline]
    fn acos(self) -> f64 {
        libm::acos(self)
    }
    #[inline]
    fn atan2(self, other: f64) -> f64 {
        libm::atan2(self, other)
    }
    #[inline]
    fn hypot(self, other: f64) -> f64 {
        libm::hypot(self, other)
    }

    #[inline]
    fn floor(self) -> f64 {
        libm::floor(self)
    }
    #[inline]
    fn ceil(self) -> f64 {
        libm::ceil(self)
    }
    #[inline]
    fn round(self) -> f64 {
        libm::round(self)
    }
}

pub const PI: f64 = core::f64::consts::PI;
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Volume of the unit ball in ℝ^k, `ω_k = π^{k/2} / Γ(k/2 + 1)`.
pub fn unit_ball_volume(k: usize) -> f64 {
    // ω_0 = 1, ω_1 = 2, ω_k = 2π/k · ω_{k-2}
    let mut w = if k % 2 == 0 { 1.0 } else { 2.0 };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        w *= 2.0 * PI / j as f64;
        j += 2;
    }
    w
}

/// Surface measure of the unit sphere 𝕊^{k-1} ⊂ ℝ^k, i.e. `k ω_k`.
pub fn unit_sphere_area(k: usize) -> f64 {
    k as f64 * unit_ball_volume(k)
}

/// Regularized upper incomplete gamma `Q(k/2, x)` for a half-integer
/// shape parameter, via the upward recurrence from `Q(1/2, x) = erfc(√x)`
/// or `Q(1, x) = e^{-x}`.
///
/// This is the survival function of a χ² variable with `k` degrees of
/// freedom evaluated at `2x`.
pub fn gamma_q_half(k: usize, x: f64) -> f64 {
    assert!(k >= 1);
    if x <= 0.0 {
        return 1.0;
    }
    // Q(a + 1, x) = Q(a, x) + x^a e^{-x} / Γ(a + 1)
    let (mut a, mut q, mut term) = if k % 2 == 1 {
        // term = x^{1/2} e^{-x} / Γ(3/2)
        (0.5, erfc(x.sqrt()), x.sqrt() * (-x).exp() / (0.5 * SQRT_PI))
    } else {
        (1.0, (-x).exp(), x * (-x).exp())
    };
    let target = k as f64 / 2.0;
    while a + 0.5 < target {
        q += term;
        a += 1.0;
        term *= x / (a + 1.0);
    }
    q
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `erf(b) - erf(a)` with the difference taken on the side where it is
/// not subject to cancellation.
pub fn erf_diff(a: f64, b: f64) -> f64 {
    if a >= 0.0 && b >= 0.0 {
        erfc(a) - erfc(b)
    } else if a <= 0.0 && b <= 0.0 {
        erfc(-b) - erfc(-a)
    } else {
        erf(b) - erf(a)
    }
}

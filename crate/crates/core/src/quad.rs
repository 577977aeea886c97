//! Globally adaptive Gauss–Kronrod (7/15) quadrature and nested rules over
//! simplices.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_9,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
// Gauss weights for the 7-point rule at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_9,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

/// Absolute/relative accuracy request for one integration level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_intervals: 4000,
        }
    }

    /// Tolerance for an integral nested inside one at this tolerance.
    pub fn inner(&self) -> Self {
        Tolerance {
            abs: self.abs * 0.1,
            rel: (self.rel * 0.1).max(1e-14),
            max_intervals: self.max_intervals,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-12, 1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    if !value.is_finite() {
        return Err(Error::Quadrature {
            estimate: value,
            error: f64::INFINITY,
            intervals: 1,
        });
    }
    Ok(Segment {
        a,
        b,
        value,
        error: err,
    })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_breaks(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, seeding the adaptive
/// partition with the interior `points` (kinks or known features).
pub fn integrate_breaks<F>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    assert!(points.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut err = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let s = gk15(&mut f, w[0], w[1])?;
            total += s.value;
            err += s.error;
            heap.push(s);
        }
    }
    if heap.is_empty() {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut intervals = heap.len();
    loop {
        if err <= tol.abs.max(tol.rel * total.abs()) {
            // confirm against a fresh sum before accepting
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
            if err <= tol.abs.max(tol.rel * total.abs()) {
                break;
            }
        }
        if intervals >= tol.max_intervals {
            return Err(Error::Quadrature {
                estimate: total,
                error: err,
                intervals,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine precision: accept what we have
            heap.push(worst);
            break;
        }
        let l = gk15(&mut f, worst.a, mid)?;
        let r = gk15(&mut f, mid, worst.b)?;
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        intervals += 1;
        if intervals % 64 == 0 {
            // resum to keep accumulated rounding out of the error budget
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(Estimate {
        value: heap.iter().map(|s| s.value).sum(),
        error: heap.iter().map(|s| s.error).sum(),
    })
}

/// Integrates `f(u)` over the unit simplex `{u ≥ 0, Σ uᵢ ≤ 1}` in `dim`
/// coordinates by nested adaptive quadrature. `dim = 0` evaluates `f(&[])`.
pub fn integrate_simplex<F>(dim: usize, f: F, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    integrate_simplex_graded(dim, f, tol, 0.0)
}

/// As [`integrate_simplex`], with breakpoints at `k·h` (`k = ½, 1, 2, …`)
/// from both ends of every nested interval, for integrands that vary on
/// scale `h` near the boundary of the simplex and are flat elsewhere.
pub fn integrate_simplex_graded<F>(dim: usize, mut f: F, tol: Tolerance, h: f64) -> Result<Estimate>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut buf = alloc::vec![0.0; dim];
    if dim == 0 {
        let v = f(&buf)?;
        return Ok(Estimate {
            value: v,
            error: 0.0,
        });
    }
    simplex_level(0, 1.0, &mut buf, &mut f, tol, h)
}

fn graded_points(len: f64, h: f64) -> Vec<f64> {
    let mut pts = alloc::vec![0.0];
    if h > 0.0 {
        let mut k = 0.5;
        while k * h < 0.5 * len {
            pts.push(k * h);
            k *= 2.0;
        }
        let n = pts.len();
        for i in (1..n).rev() {
            pts.push(len - pts[i]);
        }
    }
    pts.push(len);
    pts
}

fn simplex_level(
    level: usize,
    remaining: f64,
    buf: &mut Vec<f64>,
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    tol: Tolerance,
    h: f64,
) -> Result<Estimate> {
    let dim = buf.len();
    if remaining <= 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let inner = tol.inner();
    integrate_breaks(
        |u| {
            buf[level] = u;
            if level + 1 == dim {
                f(buf)
            } else {
                Ok(simplex_level(level + 1, remaining - u, buf, f, inner, h)?.value)
            }
        },
        &graded_points(remaining, h),
        tol,
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    use crate::real::Real;
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (crate::real::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

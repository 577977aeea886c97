//! Bounded test functions `φ ∈ C¹_b` weighting the heat content.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{check_dim, Error, Result};
use crate::real::Real;
use crate::vector::{self, dot, Point};

/// `constant`: `c`; `linear`: `⟨v,y⟩ + c`; `quadratic`: `½yᵀAy + ⟨v,y⟩ + c`
/// (A symmetric, row-major); `gaussian_bump`: `amp·exp(-‖y-c‖²/2w²)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum TestFunction {
    Constant {
        c: f64,
    },
    Linear {
        v: Point,
        c: f64,
    },
    Quadratic {
        a: Vec<f64>,
        v: Point,
        c: f64,
    },
    GaussianBump {
        center: Point,
        width: f64,
        amplitude: f64,
    },
}

impl TestFunction {
    pub fn one() -> Self {
        TestFunction::Constant { c: 1.0 }
    }

    pub fn constant(c: f64) -> Self {
        TestFunction::Constant { c }
    }

    pub fn linear(v: Point, c: f64) -> Self {
        TestFunction::Linear { v, c }
    }

    pub fn quadratic(a: Vec<f64>, v: Point, c: f64) -> Result<Self> {
        let n = v.len();
        if a.len() != n * n {
            return Err(Error::InvalidArgument(format!("quadratic form needs {} entries", n * n)));
        }
        for i in 0..n {
            for j in 0..i {
                if (a[i * n + j] - a[j * n + i]).abs() > 1e-12 * (1.0 + a[i * n + j].abs()) {
                    return Err(Error::InvalidArgument("quadratic form must be symmetric".into()));
                }
            }
        }
        Ok(TestFunction::Quadratic { a, v, c })
    }

    pub fn gaussian_bump(center: Point, width: f64, amplitude: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidArgument("bump width must be > 0".into()));
        }
        Ok(TestFunction::GaussianBump {
            center,
            width,
            amplitude,
        })
    }

    /// Dimension the function is tied to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            TestFunction::Constant { .. } => None,
            TestFunction::Linear { v, .. } | TestFunction::Quadratic { v, .. } => Some(v.len()),
            TestFunction::GaussianBump { center, .. } => Some(center.len()),
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) => check_dim(n, d),
            None => Ok(()),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TestFunction::Constant { .. })
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        match self {
            TestFunction::Constant { c } => *c,
            TestFunction::Linear { v, c } => dot(v, y) + c,
            TestFunction::Quadratic { a, v, c } => {
                let n = v.len();
                let mut q = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        q += a[i * n + j] * y[i] * y[j];
                    }
                }
                0.5 * q + dot(v, y) + c
            }
            TestFunction::GaussianBump {
                center,
                width,
                amplitude,
            } => {
                let d2 = vector::dist(y, center).powi(2);
                amplitude * (-d2 / (2.0 * width * width)).exp()
            }
        }
    }

    pub fn gradient(&self, y: &[f64]) -> Point {
        match self {
            TestFunction::Constant { .. } => alloc::vec![0.0; y.len()],
            TestFunction::Linear { v, .. } => v.clone(),
            TestFunction::Quadratic { a, v, .. } => {
                let n = v.len();
                (0..n)
                    .map(|i| v[i] + (0..n).map(|j| a[i * n + j] * y[j]).sum::<f64>())
                    .collect()
            }
            TestFunction::GaussianBump { center, width, .. } => {
                let e = self.eval(y) / (width * width);
                y.iter().zip(center).map(|(yi, ci)| -e * (yi - ci)).collect()
            }
        }
    }

    pub fn laplacian(&self, y: &[f64]) -> f64 {
        match self {
            TestFunction::Constant { .. } | TestFunction::Linear { .. } => 0.0,
            TestFunction::Quadratic { a, v, .. } => (0..v.len()).map(|i| a[i * v.len() + i]).sum(),
            TestFunction::GaussianBump { center, width, .. } => {
                let w2 = width * width;
                let d2 = vector::dist(y, center).powi(2);
                self.eval(y) * (d2 / w2 - y.len() as f64) / w2
            }
        }
    }

    /// Upper bound for `sup |φ|` over the box `[lo, hi]`.
    pub fn sup_norm_on(&self, lo: &[f64], hi: &[f64]) -> f64 {
        let m: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| a.abs().max(b.abs())).collect();
        match self {
            TestFunction::Constant { c } => c.abs(),
            TestFunction::Linear { v, c } => {
                // a linear function peaks at a corner
                let hi_part: f64 = v.iter().zip(lo.iter().zip(hi)).map(|(vi, (a, b))| (vi * a).max(vi * b)).sum();
                let lo_part: f64 = v.iter().zip(lo.iter().zip(hi)).map(|(vi, (a, b))| (vi * a).min(vi * b)).sum();
                (hi_part + c).abs().max((lo_part + c).abs())
            }
            TestFunction::Quadratic { a, v, c } => {
                let n = v.len();
                let mut s = c.abs();
                for i in 0..n {
                    s += v[i].abs() * m[i];
                    for j in 0..n {
                        s += 0.5 * a[i * n + j].abs() * m[i] * m[j];
                    }
                }
                s
            }
            TestFunction::GaussianBump { amplitude, .. } => amplitude.abs(),
        }
    }

    /// Whether `φ ≥ 0` on the box `[lo, hi]` is guaranteed.
    pub fn nonnegative_on(&self, lo: &[f64], hi: &[f64]) -> bool {
        match self {
            TestFunction::Constant { c } => *c >= 0.0,
            TestFunction::Linear { v, c } => {
                let min: f64 = v.iter().zip(lo.iter().zip(hi)).map(|(vi, (a, b))| (vi * a).min(vi * b)).sum();
                min + c >= 0.0
            }
            TestFunction::Quadratic { .. } => false,
            TestFunction::GaussianBump { amplitude, .. } => *amplitude >= 0.0,
        }
    }
}

fn list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x}")).collect();
    parts.join(",")
}

/// Compact spec syntax: `const:C`, `linear:v1,v2;c`,
/// `quadratic:a11,a12,a21,a22;v1,v2;c`, `bump:c1,c2;w;amp`.
impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Constant { c } => write!(f, "const:{c}"),
            TestFunction::Linear { v, c } => write!(f, "linear:{};{c}", list(v)),
            TestFunction::Quadratic { a, v, c } => write!(f, "quadratic:{};{};{c}", list(a), list(v)),
            TestFunction::GaussianBump {
                center,
                width,
                amplitude,
            } => write!(f, "bump:{};{width};{amplitude}", list(center)),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number {x:?} in test function")))
        })
        .collect()
}

fn parse_one(s: &str) -> Result<f64> {
    let v = parse_list(s)?;
    if v.len() != 1 {
        return Err(Error::InvalidArgument(format!("expected one number, got {s:?}")));
    }
    Ok(v[0])
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("test function {s:?} lacks a kind prefix")))?;
        let fields: Vec<&str> = rest.split(';').collect();
        let arity = |k: usize| -> Result<()> {
            if fields.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{kind} expects {k} ';'-separated fields")))
            }
        };
        match kind.trim() {
            "const" | "constant" => {
                arity(1)?;
                Ok(TestFunction::constant(parse_one(fields[0])?))
            }
            "linear" => {
                arity(2)?;
                Ok(TestFunction::linear(parse_list(fields[0])?, parse_one(fields[1])?))
            }
            "quadratic" => {
                arity(3)?;
                TestFunction::quadratic(parse_list(fields[0])?, parse_list(fields[1])?, parse_one(fields[2])?)
            }
            "bump" => {
                arity(3)?;
                TestFunction::gaussian_bump(parse_list(fields[0])?, parse_one(fields[1])?, parse_one(fields[2])?)
            }
            other => Err(Error::InvalidArgument(format!("unknown test function kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn samples() -> Vec<TestFunction> {
        vec![
            TestFunction::one(),
            TestFunction::linear(vec![1.0, -2.0], 0.5),
            TestFunction::quadratic(vec![2.0, 0.5, 0.5, -1.0], vec![0.1, 0.2], 3.0).unwrap(),
            TestFunction::gaussian_bump(vec![0.3, 0.4], 0.2, 1.5).unwrap(),
        ]
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let y = [0.37, -0.21];
        for f in samples() {
            let g = f.gradient(&y);
            for i in 0..2 {
                let h = 1e-6;
                let mut a = y;
                let mut b = y;
                a[i] += h;
                b[i] -= h;
                let fd = (f.eval(&a) - f.eval(&b)) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-8, "{f}");
            }
        }
    }

    #[test]
    fn laplacian_matches_finite_differences() {
        let y = [0.31, 0.52];
        for f in samples() {
            let h = 1e-4;
            let mut lap = 0.0;
            for i in 0..2 {
                let mut a = y;
                let mut b = y;
                a[i] += h;
                b[i] -= h;
                lap += (f.eval(&a) - 2.0 * f.eval(&y) + f.eval(&b)) / (h * h);
            }
            assert!((lap - f.laplacian(&y)).abs() < 1e-5, "{f}");
        }
    }

    #[test]
    fn spec_round_trip() {
        for f in samples() {
            let g: TestFunction = f.to_string().parse().unwrap();
            assert_eq!(f, g);
        }
        assert_eq!("const:2".parse::<TestFunction>().unwrap(), TestFunction::constant(2.0));
        assert!("linear:1,2".parse::<TestFunction>().is_err());
        assert!("cubic:1".parse::<TestFunction>().is_err());
        assert!("quadratic:1,2,3,4;0,0;0".parse::<TestFunction>().is_err());
    }

    #[test]
    fn sup_norm_bounds_sampled_values() {
        let (lo, hi) = ([-1.0, -0.5], [2.0, 1.0]);
        for f in samples() {
            let bound = f.sup_norm_on(&lo, &hi);
            for i in 0..=20 {
                for j in 0..=20 {
                    let y = [lo[0] + 3.0 * i as f64 / 20.0, lo[1] + 1.5 * j as f64 / 20.0];
                    assert!(f.eval(&y).abs() <= bound + 1e-12);
                }
            }
        }
        assert_eq!(TestFunction::linear(vec![1.0, 0.0], 0.0).sup_norm_on(&[0.0, 0.0], &[1.0, 1.0]), 1.0);
    }
}

//! Dense linear algebra on small systems, on top of `nalgebra`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vector::{dot, norm, Point};

fn columns(vectors: &[Point], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i])
}

/// Orthonormal basis of the span of `vectors` (ambient dimension `n`).
///
/// Singular values below `tol · max(1, σ_max)` are treated as zero.
pub fn span_basis(vectors: &[Point], n: usize, tol: f64) -> Vec<Point> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = columns(vectors, n);
    let svd = m.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > cut {
            out.push(u.column(k).iter().cloned().collect());
        }
    }
    out
}

pub fn rank(vectors: &[Point], n: usize, tol: f64) -> usize {
    span_basis(vectors, n, tol).len()
}

/// Extends an orthonormal family to an orthonormal basis of ℝⁿ and returns
/// only the added vectors, i.e. a basis of the orthogonal complement.
pub fn complement(basis: &[Point], n: usize) -> Vec<Point> {
    let mut all: Vec<Point> = basis.to_vec();
    let mut added = Vec::new();
    for i in 0..n {
        if all.len() == n {
            break;
        }
        let mut v = crate::vector::unit(n, i);
        // two passes of Gram-Schmidt for stability
        for _ in 0..2 {
            for b in &all {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let l = norm(&v);
        if l > 1e-6 {
            v.iter_mut().for_each(|x| *x /= l);
            all.push(v.clone());
            added.push(v);
        }
    }
    added
}

/// Orthonormal basis of `{x : ⟨r, x⟩ = 0 for every row r}`.
pub fn null_space(rows: &[Point], n: usize, tol: f64) -> Vec<Point> {
    let row_basis = span_basis(rows, n, tol);
    complement(&row_basis, n)
}

/// Solves the square system whose rows are `rows`; `None` if singular.
pub fn solve(rows: &[Point], rhs: &[f64]) -> Option<Point> {
    let n = rhs.len();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-12 * smax.max(1e-300) {
        return None;
    }
    let lu = a.lu();
    lu.solve(&DVector::from_column_slice(rhs))
        .map(|x| x.iter().cloned().collect())
}

/// Coordinates of `x - base` in the orthonormal `basis`.
pub fn coords(x: &[f64], base: &[f64], basis: &[Point]) -> Point {
    let d = crate::vector::sub(x, base);
    basis.iter().map(|b| dot(&d, b)).collect()
}

/// Orthogonal projection onto the affine subspace `base + span(basis)`.
pub fn project_affine(x: &[f64], base: &[f64], basis: &[Point]) -> Point {
    let c = coords(x, base, basis);
    let mut p: Point = base.to_vec();
    for (ci, b) in c.iter().zip(basis) {
        p.iter_mut().zip(b).for_each(|(pi, bi)| *pi += ci * bi);
    }
    p
}

/// Determinant of a square matrix given by rows.
pub fn det(rows: &[Point]) -> f64 {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

/// `sqrt(det(GᵀG))` for the columns `vectors`: the k-volume of the
/// parallelotope they span.
pub fn gram_volume(vectors: &[Point]) -> f64 {
    let k = vectors.len();
    if k == 0 {
        return 1.0;
    }
    let g = DMatrix::from_fn(k, k, |i, j| dot(&vectors[i], &vectors[j]));
    let d = g.determinant();
    if d <= 0.0 {
        0.0
    } else {
        libm::sqrt(d)
    }
}

/// Result of a (weighted) linear least-squares fit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// Row-major `p × p` covariance of the coefficients.
    pub covariance: Vec<f64>,
    pub condition: f64,
    /// Weighted residual sum of squares.
    pub rss: f64,
    pub dof: usize,
}

impl LeastSquares {
    pub fn stderr(&self, i: usize) -> f64 {
        let p = self.coefficients.len();
        libm::sqrt(self.covariance[i * p + i].max(0.0))
    }

    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.covariance[i * self.coefficients.len() + j]
    }
}

/// How coefficient covariance is derived from a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// Known per-observation standard errors; covariance `(XᵀWX)⁻¹`.
    InverseVariance,
    /// Equal weights; covariance `s² (XᵀX)⁻¹` from the residuals.
    Unweighted,
}

/// Least squares fit of `y ≈ X c`.
///
/// `design` holds the rows of `X`; `sigma` the per-row standard errors used
/// when `weighting` is [`Weighting::InverseVariance`]. Fails when the
/// design's condition number exceeds `max_condition`.
pub fn least_squares(
    design: &[Point],
    y: &[f64],
    sigma: &[f64],
    weighting: Weighting,
    max_condition: f64,
) -> Result<LeastSquares> {
    let m = design.len();
    if m == 0 {
        return Err(Error::SingularDesign("no observations".into()));
    }
    let p = design[0].len();
    if m < p {
        return Err(Error::SingularDesign(alloc::format!(
            "{m} observations for {p} coefficients"
        )));
    }
    let w: Vec<f64> = match weighting {
        Weighting::InverseVariance => sigma.iter().map(|s| 1.0 / s).collect(),
        Weighting::Unweighted => alloc::vec![1.0; m],
    };
    let x = DMatrix::from_fn(m, p, |i, j| design[i][j]);
    let cond = {
        let sv = x.clone().svd(false, false).singular_values;
        let smin = sv.min();
        if smin <= 0.0 {
            f64::INFINITY
        } else {
            sv.max() / smin
        }
    };
    if !(cond <= max_condition) {
        return Err(Error::IllConditioned { condition: cond });
    }
    let xw = DMatrix::from_fn(m, p, |i, j| design[i][j] * w[i]);
    let yw = DVector::from_fn(m, |i, _| y[i] * w[i]);
    // Column scaling keeps the SVD well balanced for power-law designs.
    let scales: Vec<f64> = (0..p)
        .map(|j| {
            let n = xw.column(j).norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let xs = DMatrix::from_fn(m, p, |i, j| xw[(i, j)] / scales[j]);
    let svd = xs.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-14 * smax {
        return Err(Error::SingularDesign("rank-deficient design".into()));
    }
    let cs = svd
        .solve(&yw, 0.0)
        .map_err(|e| Error::SingularDesign(e.into()))?;
    let coefficients: Vec<f64> = (0..p).map(|j| cs[j] / scales[j]).collect();
    let resid = &yw - &xw * DVector::from_column_slice(&coefficients);
    let rss = resid.norm_squared();
    let dof = m - p;
    // (XsᵀXs)⁻¹ = V Σ⁻² Vᵀ
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut cov = alloc::vec![0.0; p * p];
    let factor = match weighting {
        Weighting::InverseVariance => 1.0,
        Weighting::Unweighted => {
            if dof > 0 {
                rss / dof as f64
            } else {
                0.0
            }
        }
    };
    for i in 0..p {
        for j in 0..p {
            let mut s = 0.0;
            for k in 0..p {
                let sk = svd.singular_values[k];
                s += v_t[(k, i)] * v_t[(k, j)] / (sk * sk);
            }
            cov[i * p + j] = factor * s / (scales[i] * scales[j]);
        }
    }
    Ok(LeastSquares {
        coefficients,
        covariance: cov,
        condition: cond,
        rss,
        dof,
    })
}

//! Tube-coordinate quadrature for convex polytopes: the exterior
//! `[P]_r ∖ P` is swept by `x + ρν` with `x` on a face `F`, `ν` a unit
//! vector of `Nor(P, F)`, and `0 < ρ ≤ r`, with volume element
//! `ρ^{m−1} dρ dν dH^k(x)` (`m = n − k`).

use alloc::vec;
use alloc::vec::Vec;

use super::gauss;
use crate::error::{Error, Result};
use crate::geometry::{Face, Polytope};
use crate::linalg;
use crate::quad::{self, Tolerance};
use crate::real::Real;
use crate::testfn::TestFunction;
use crate::vector::{self, dot, Point};

/// A simplex of a face: `x(u) = base + Σ u_j e_j` over the unit simplex,
/// with Jacobian `jac`.
pub(crate) struct FaceCell {
    pub base: Point,
    pub edges: Vec<Point>,
    pub jac: f64,
}

impl FaceCell {
    pub fn point(&self, u: &[f64]) -> Point {
        let mut x = self.base.clone();
        for (e, s) in self.edges.iter().zip(u) {
            x.iter_mut().zip(e).for_each(|(a, b)| *a += s * b);
        }
        x
    }
}

/// A simplicial piece of `Nor ∩ 𝕊`: `ν(u) = q(u)/‖q(u)‖` with
/// `q(u) = g₀ + Σ u_j (g_j − g₀)`, and `dν = det/‖q‖^m du`.
pub(crate) struct ConeCell {
    pub base: Point,
    pub edges: Vec<Point>,
    pub det: f64,
    pub m: usize,
}

impl ConeCell {
    /// Unit direction and angular density at simplex coordinates `u`.
    pub fn direction(&self, u: &[f64]) -> (Point, f64) {
        let mut q = self.base.clone();
        for (e, s) in self.edges.iter().zip(u) {
            q.iter_mut().zip(e).for_each(|(a, b)| *a += s * b);
        }
        let len = vector::norm(&q);
        (vector::scale(&q, 1.0 / len), self.det / len.powi(self.m as i32))
    }
}

pub(crate) fn face_cells(p: &Polytope, face: usize) -> Vec<FaceCell> {
    p.triangulate(Some(face))
        .into_iter()
        .map(|s| {
            let base = s[0].clone();
            let edges: Vec<Point> = s[1..].iter().map(|v| vector::sub(v, &base)).collect();
            let jac = linalg::gram_volume(&edges);
            FaceCell { base, edges, jac }
        })
        .collect()
}

/// Fan decomposition of the sphere patch of the cone spanned by the unit
/// vectors `gens` (pointed, spanning an m-dimensional subspace; cones with
/// more than m rays need m ≤ 3).
pub(crate) fn cone_cells(gens: &[Point], n: usize) -> Result<Vec<ConeCell>> {
    let basis = linalg::span_basis(gens, n, 1e-10);
    let m = basis.len();
    let zero = vec![0.0; n];
    let mut g: Vec<Point> = gens.to_vec();
    if m == 3 && g.len() > 3 {
        let local: Vec<Point> = g.iter().map(|x| linalg::coords(x, &zero, &basis)).collect();
        let axis = vector::normalize(&vector::centroid(&local)).expect("pointed cone");
        let helper = linalg::complement(&[axis], 3);
        let mut idx: Vec<(f64, usize)> = local
            .iter()
            .enumerate()
            .map(|(i, u)| (dot(u, &helper[1]).atan2(dot(u, &helper[0])), i))
            .collect();
        idx.sort_by(|a, b| a.0.total_cmp(&b.0));
        g = idx.into_iter().map(|(_, i)| gens[i].clone()).collect();
    }
    let simplices: Vec<Vec<Point>> = match m {
        0 => Vec::new(),
        1 => vec![vec![g[0].clone()]],
        _ if g.len() == m => vec![g.clone()],
        2 => {
            // the two extreme rays
            let mut best = (2.0, 0, 1);
            for i in 0..g.len() {
                for j in i + 1..g.len() {
                    let c = dot(&g[i], &g[j]);
                    if c < best.0 {
                        best = (c, i, j);
                    }
                }
            }
            vec![vec![g[best.1].clone(), g[best.2].clone()]]
        }
        3 => (1..g.len() - 1).map(|i| vec![g[0].clone(), g[i].clone(), g[i + 1].clone()]).collect(),
        _ => return Err(Error::Unsupported("non-simplicial normal cones of dimension ≥ 4".into())),
    };
    Ok(simplices
        .into_iter()
        .map(|s| {
            let base = s[0].clone();
            let edges: Vec<Point> = s[1..].iter().map(|v| vector::sub(v, &base)).collect();
            let mut rows = vec![linalg::coords(&base, &zero, &basis)];
            rows.extend(edges.iter().map(|e| linalg::coords(e, &zero, &basis)));
            let det = linalg::det(&rows).abs();
            ConeCell { base, edges, det, m }
        })
        .collect())
}

/// Unit normals of the facets through a face.
pub(crate) fn face_normals(p: &Polytope, f: &Face) -> Vec<Point> {
    f.facets.iter().map(|&i| p.facets()[i].normal.clone()).collect()
}

/// `∫_{[P]_r ∖ P} (∫_P φ(y) g_t(x − y) dy) dx` in tube coordinates.
pub fn tube_heat_content(p: &Polytope, phi: &TestFunction, t: f64, r: f64, tol: Tolerance) -> Result<f64> {
    let n = p.dim();
    if n > 3 {
        return Err(Error::Unsupported("tube quadrature supports n ≤ 3".into()));
    }
    let sigma = core::f64::consts::SQRT_2 * t;
    let boxed = gauss::as_box(p);
    let g = |z: &[f64], tol: Tolerance| -> Result<f64> {
        match &boxed {
            Some((lo, hi)) => Ok(gauss::box_gauss(lo, hi, phi, z, sigma)),
            None => gauss::polytope_gauss(p, phi, z, sigma, tol),
        }
    };
    let mut rho_pts = vec![0.0];
    for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        if k * t < r {
            rho_pts.push(k * t);
        }
    }
    rho_pts.push(r);
    let faces: Vec<usize> = (0..p.faces().len()).filter(|&i| p.faces()[i].dim < n).collect();
    let per_face = Tolerance {
        abs: tol.abs / faces.len() as f64,
        ..tol
    };
    let mut total = 0.0;
    for fi in faces {
        let f = &p.faces()[fi];
        let m = n - f.dim;
        let cones = cone_cells(&face_normals(p, f), n)?;
        for cell in face_cells(p, fi) {
            for cone in &cones {
                let t1 = per_face;
                let t2 = t1.inner();
                let t3 = t2.inner();
                let t4 = t3.inner();
                let reach = cell.edges.iter().map(|e| vector::norm(e)).fold(0.0, f64::max);
                let h = if reach > 0.0 { t / reach } else { 0.0 };
                let e = quad::integrate_simplex_graded(
                    f.dim,
                    |u| {
                        let x = cell.point(u);
                        let inner = quad::integrate_simplex(
                            m - 1,
                            |w| {
                                let (nu, dens) = cone.direction(w);
                                let radial = quad::integrate_breaks(
                                    |rho| {
                                        let z = vector::axpy(&x, rho, &nu);
                                        Ok(rho.powi(m as i32 - 1) * g(&z, t4)?)
                                    },
                                    &rho_pts,
                                    t3,
                                )?;
                                Ok(dens * radial.value)
                            },
                            t2,
                        )?;
                        Ok(inner.value)
                    },
                    t1,
                    h,
                )?;
                total += cell.jac * e.value;
            }
        }
    }
    Ok(total)
}
